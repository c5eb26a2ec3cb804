"""Command-line interface: ``fricke-zeros {eval,zeros,verify-lemma,tables,report}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import re
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from importlib import metadata
from pathlib import Path

import numpy as np

from .dirichlet import epstein_closed_form, epstein_coprime_sum
from .inequalities import (
    check_lemma,
    check_special_cases,
    endpoint_sign_check,
    lemma_admissible,
    reference_constants,
    preset_lemma_cases,
    reproduce_table,
)
from .modular_core import MonomialWeight, elliptic_orders, fricke_level
from .poincare import EvalParams, eval_F_grid
from .zeros import InadmissibleParameters, phase_endpoint_integers, verify_theorem

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3
SCHEMA_PATH = Path(__file__).with_name("schema") / "report.schema.json"


class UsageError(Exception):
    pass


# ----------------------------------------------------------- serialization


def jsonable(obj):
    """Plain JSON data; rationals become exact strings, non-finite floats become strings."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# ------------------------------------------------------------------ config


@dataclass
class RunConfig:
    command: str
    p: int = 2
    k: int = 12
    n: int = 0
    grid: int = 4096
    tail_tol: float = 1e-10
    output_format: str = "text"
    output_path: str | None = None
    theorem: int | None = None
    k_range: str | None = None
    m_range: str | None = None
    paper_cases: bool = False
    csv_dir: str | None = None

    def validate(self):
        if self.p not in (2, 3):
            raise UsageError("--p must be 2 or 3")
        if self.k % 2 or self.k < 4:
            raise UsageError("--k must be even and >= 4")
        if self.grid < 1:
            raise UsageError("--grid must be positive")
        if not self.tail_tol > 0:
            raise UsageError("--tail-tol must be positive")

    def echo(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if k not in ("output_path", "csv_dir")}


def _parse_range(text: str, default_hi=None) -> tuple[int, int | str]:
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+|l)\s*)?", text)
    if not m:
        raise UsageError(f"bad range {text!r}; use N or A..B")
    lo = int(m.group(1))
    hi = m.group(2)
    if hi is None:
        return lo, lo
    return lo, hi if hi == "l" else int(hi)


def _apply_threads():
    raw = os.environ.get("FRICKE_ZEROS_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FRICKE_ZEROS_THREADS must be an integer, got {raw!r}") from None
    if n > 0:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------- commands


def _weight(cfg: RunConfig) -> MonomialWeight:
    return MonomialWeight(cfg.n)


def cmd_eval(cfg: RunConfig) -> tuple[str, int]:
    if cfg.grid < 2:
        raise UsageError("eval needs --grid >= 2")
    lvl = fricke_level(cfg.p)
    params = EvalParams.make(cfg.k, cfg.p, cfg.n, tail_tol=cfg.tail_tol)
    th = np.linspace(lvl.theta1, lvl.theta0, cfg.grid)
    ev = eval_F_grid(th, params, with_imag=True)
    h_names = ["re2h"] if cfg.p == 2 else ["re2h", "re2h2"]
    header = ["theta", "F", "re2g", *h_names, "Ftail", "imag"]
    rows = [
        [th[i], ev.f[i], 2 * ev.g[i].real, *(2 * ev.h[i].real), ev.f_tail[i], ev.residual_imag[i]]
        for i in range(th.size)
    ]
    if cfg.output_format == "csv":
        return to_csv(header, rows), EXIT_PASS
    if cfg.output_format == "json":
        samples = [dict(zip(header, r)) for r in rows]
        payload = {
            "config": cfg.echo(),
            "shell_radius": params.shell_radius,
            "max_error_bound": float(ev.error.max()),
            "samples": samples,
        }
        return dumps(payload), EXIT_PASS
    lines = [f"# p={cfg.p} k={cfg.k} n={cfg.n} shell_radius={params.shell_radius}", "  ".join(header)]
    lines += ["  ".join(f"{float(v): .10e}" for v in r) for r in rows]
    return "\n".join(lines) + "\n", EXIT_PASS


def _zero_exit(verdict: str) -> int:
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[verdict]


def cmd_zeros(cfg: RunConfig) -> tuple[str, int]:
    if cfg.grid < 512:
        raise UsageError("zeros needs --grid >= 512")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            params = EvalParams.make(cfg.k, cfg.p, cfg.n, tail_tol=cfg.tail_tol)
            rep = verify_theorem(cfg.k, cfg.p, _weight(cfg), cfg.grid, params=params)
    except InadmissibleParameters as exc:
        raise UsageError(str(exc)) from None
    unaccounted = rep.predicted - (1 if rep.n > 0 else 0) - rep.weighted_total
    code = _zero_exit(rep.verdict)
    if cfg.output_format == "json":
        payload = jsonable(rep)
        payload["unaccounted"] = str(unaccounted)
        payload["config"] = cfg.echo()
        return dumps(payload), code
    if cfg.output_format == "csv":
        rows = [[i, lo, hi, t] for i, ((lo, hi), t) in enumerate(zip(rep.brackets, rep.refined))]
        return to_csv(["index", "theta_lo", "theta_hi", "theta"], rows), code
    lines = [
        f"p={rep.p} k={rep.k} n={rep.n}",
        f"interior zeros: {rep.interior_count}",
        f"endpoint orders (i/sqrt p, rho): {rep.endpoint_orders}",
        f"weighted total on arc: {rep.weighted_total}",
        f"required by theorem: {rep.required}",
        f"valence total: {rep.predicted}",
        f"unaccounted: {unaccounted}",
        f"integer points: {rep.oracle_count}",
    ]
    lines += [f"zero: theta = {t!r}" for t in rep.refined]
    lines += [f"note: {s}" for s in rep.notes]
    lines.append(f"verdict: {rep.verdict}")
    return "\n".join(lines) + "\n", code


def _lemma_cases(cfg: RunConfig) -> list[tuple[int, int]]:
    if cfg.theorem not in (1, 2):
        raise UsageError("verify-lemma needs --theorem 1 or 2")
    if cfg.paper_cases:
        return preset_lemma_cases(cfg.p, cfg.theorem)
    k_lo, k_hi = _parse_range(cfg.k_range or str(cfg.k))
    m_lo, m_hi = _parse_range(cfg.m_range or "1")
    if k_hi == "l":
        raise UsageError("'l' is only allowed as the upper end of --m")
    sign = -1 if cfg.theorem == 1 else 1
    cases = []
    for k in range(k_lo + (k_lo % 2), int(k_hi) + 1, 2):
        top = elliptic_orders(k, cfg.p).l if m_hi == "l" else int(m_hi)
        for m in range(max(m_lo, 1), top + 1):
            if lemma_admissible(k, cfg.p, MonomialWeight(sign * m)):
                cases.append((k, sign * m))
    if not cases:
        raise UsageError("no admissible (k, m) in the requested ranges")
    return cases


def cmd_verify_lemma(cfg: RunConfig) -> tuple[str, int]:
    if cfg.grid < 1000:
        raise UsageError("verify-lemma needs --grid >= 1000")
    cases = _lemma_cases(cfg)
    reports = [check_lemma(k, cfg.p, MonomialWeight(n), cfg.grid) for k, n in cases]
    special = check_special_cases(cfg.p, cfg.theorem) if cfg.paper_cases else []
    total = len(reports) + len(special)
    good = sum(r.passed for r in reports) + sum(c.passed for c in special)
    code = EXIT_PASS if good == total else EXIT_FAIL
    fields = ["k", "p", "n", "theorem", "m_prime", "delta", "d_const", "x0", "grid_max", "theta_at_max",
              "passed", "grid_points", "cross_check_error", "pointwise_max"]
    if cfg.output_format == "json":
        rows = [{f: jsonable(getattr(r, f)) for f in fields} for r in reports]
        sp = [dict(jsonable(c), passed=c.passed) for c in special]
        payload = {"config": cfg.echo(), "rows": rows, "special_cases": sp, "certified": good, "total": total}
        return dumps(payload), code
    if cfg.output_format == "csv":
        return to_csv(fields, [[getattr(r, f) for f in fields] for r in reports]), code
    lines = []
    for r in reports:
        tag = "pass" if r.passed else "FAIL"
        lines.append(
            f"{tag} theorem {r.theorem} p={r.p} k={r.k} n={r.n}: max lhs {r.grid_max:.6f} "
            f"at theta {r.theta_at_max:.6f}, margin {1 - r.grid_max:.6f}, D={r.d_const:.6g}, x0={r.x0:.6g}"
        )
    for c in special:
        tag = "pass" if c.passed else "FAIL"
        lines.append(f"{tag} {c.kind} k={c.k} m={c.m}: {c.value:.6f} < {c.threshold:.6f}")
    lines.append(f"certified {good}/{total}")
    return "\n".join(lines) + "\n", code


TABLE_HEADER = ["table", "s1", "s2", "a1", "a2", "value", "paper_value", "abs_err", "admissible"]


def _table_rows() -> list[list]:
    rows = []
    for which in ("theorem1_p3", "theorem2_p3"):
        for r in reproduce_table(which):
            s2 = "inf" if r.s2 is None else r.s2
            rows.append([which, r.s1, s2, r.a1, r.a2, r.value, r.printed, abs(r.value - r.printed), r.admissible])
    return rows


def cmd_tables(cfg: RunConfig) -> tuple[str, int]:
    rows = _table_rows()
    code = EXIT_PASS if all(r[7] <= 5e-5 and r[8] for r in rows) else EXIT_FAIL
    if cfg.output_format == "csv":
        return to_csv(TABLE_HEADER, rows), code
    if cfg.output_format == "json":
        out: dict = {"theorem1_p3": [], "theorem2_p3": []}
        for r in rows:
            out[r[0]].append(dict(zip(TABLE_HEADER[1:], r[1:])))
        return dumps(out), code
    lines = ["  ".join(TABLE_HEADER)] + ["  ".join(_fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n", code


# ------------------------------------------------------------------ report


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def build_report(cfg: RunConfig) -> tuple[dict, dict[str, str]]:
    """Full reproduction bundle and its plot-ready CSV side files."""
    failures: list[str] = []
    out: dict = {"tool": "fricke-zeros", "version": _version(), "config": cfg.echo()}

    consts = reference_constants()
    out["constants"] = [dict(jsonable(c), ok=c.ok) for c in consts]
    failures += [f"constant {c.name}" for c in consts if not c.ok]

    tables = _table_rows()
    out["tables"] = [dict(zip(TABLE_HEADER, jsonable(r))) for r in tables]
    failures += [f"table {r[0]} row s1={r[1]}" for r in tables if not (r[7] <= 5e-5 and r[8])]

    ep = []
    for p in (2, 3):
        for k in (8, 12, 16):
            a, b = epstein_coprime_sum(k, p), epstein_closed_form(k, p)
            ep.append({"p": p, "k": k, "lattice_sum": a, "closed_form": b, "ok": abs(a - b) < 1e-8})
    out["epstein"] = ep
    failures += [f"epstein p={e['p']} k={e['k']}" for e in ep if not e["ok"]]

    special = []
    for p in (2, 3):
        for t in (1, 2):
            cs = check_special_cases(p, t)
            bad = [c for c in cs if not c.passed]
            special.append({"p": p, "theorem": t, "cases": len(cs), "passed": len(cs) - len(bad)})
            failures += [f"special p={p} theorem {t} {c.kind} k={c.k} m={c.m}" for c in bad]
    out["special_cases"] = special

    lemma = []
    for p in (2, 3):
        for t in (1, 2):
            reps = [check_lemma(k, p, MonomialWeight(n), 4096) for k, n in preset_lemma_cases(p, t)]
            worst = max(reps, key=lambda r: r.grid_max)
            lemma.append({
                "p": p, "theorem": t, "cases": len(reps), "passed": sum(r.passed for r in reps),
                "worst": {"k": worst.k, "n": worst.n, "grid_max": worst.grid_max},
                "pointwise_worst": max(r.pointwise_max for r in reps),
            })
            failures += [f"lemma p={p} theorem {t} k={r.k} n={r.n}" for r in reps if not r.passed]
    out["lemma"] = lemma

    signs = []
    for p, step in ((2, 8), (3, 12)):
        for k in range(step, 49, step):
            for n in (-3, -2, -1, 1, 2, 3):
                if n > 0 and n > elliptic_orders(k, p).l:
                    continue
                r = endpoint_sign_check(k, p, MonomialWeight(n))
                signs.append({"p": p, "k": k, "n": n, "agree": r.agree})
                if not r.agree:
                    failures.append(f"endpoint sign p={p} k={k} n={n}")
    out["endpoint_signs"] = signs

    zeros = []
    zero_rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for p, kmax in ((2, 40), (3, 36)):
            for k in range(4, kmax + 1, 2):
                for m in range(0, 6):
                    w = MonomialWeight(-m)
                    r = verify_theorem(k, p, w, 1024)
                    n0, n1 = phase_endpoint_integers(k, p, w)
                    zeros.append({"theorem": 1, "p": p, "k": k, "n": -m, "weighted_total": str(r.weighted_total),
                                  "required": str(r.required), "phase_n0_minus_n1": n0 - n1, "verdict": r.verdict})
                    zero_rows += [[p, k, -m, t] for t in r.refined]
                    if r.verdict != "pass" or n0 - n1 != m:
                        failures.append(f"zeros theorem 1 p={p} k={k} n={-m}")
        for p in (2, 3):
            for k in range(4, 41, 2):
                for m in range(1, elliptic_orders(k, p).l + 1):
                    r = verify_theorem(k, p, MonomialWeight(m), 1024)
                    zeros.append({"theorem": 2, "p": p, "k": k, "n": m, "weighted_total": str(r.weighted_total),
                                  "required": str(r.required), "cusp_ratio": r.cusp_decay["ratio"],
                                  "verdict": r.verdict, "notes": r.notes})
                    zero_rows += [[p, k, m, t] for t in r.refined]
                    if r.verdict != "pass":
                        failures.append(f"zeros theorem 2 p={p} k={k} n={m}")
    out["zeros"] = zeros

    curves = {}
    for p, k, n in ((2, 12, -2), (2, 16, 2), (3, 12, -1), (3, 12, 2)):
        lvl = fricke_level(p)
        th = np.linspace(lvl.theta1, lvl.theta0, 513)
        ev = eval_F_grid(th, EvalParams.make(k, p, n))
        curves[f"curve_p{p}_k{k}_n{n}.csv"] = to_csv(["theta", "F"], zip(th, ev.f))
    curves["zeros.csv"] = to_csv(["p", "k", "n", "theta"], zero_rows)

    out["failures"] = failures
    out["all_pass"] = not failures
    return out, curves


def cmd_report(cfg: RunConfig) -> tuple[str, int]:
    bundle, side = build_report(cfg)
    if cfg.csv_dir:
        d = Path(cfg.csv_dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in side.items():
            (d / name).write_text(text)
    code = EXIT_PASS if bundle["all_pass"] else EXIT_FAIL
    if cfg.output_format == "text":
        lines = [f"fricke-zeros {bundle['version']} reproduction report"]
        lines += [f"{'ok  ' if c['ok'] else 'FAIL'} {c['name']}: {c['computed']!r} vs {c['printed']!r}"
                  for c in bundle["constants"]]
        lines += [f"FAIL {f}" for f in bundle["failures"]]
        lines.append("all pass" if bundle["all_pass"] else f"{len(bundle['failures'])} failures")
        return "\n".join(lines) + "\n", code
    return dumps(bundle), code


COMMANDS = {
    "eval": cmd_eval,
    "zeros": cmd_zeros,
    "verify-lemma": cmd_verify_lemma,
    "tables": cmd_tables,
    "report": cmd_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fricke-zeros", description="Zeros of Poincare series for the Fricke groups of level 2 and 3.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=2, choices=(2, 3))
    common.add_argument("--grid", type=int, default=4096)
    common.add_argument("--tail-tol", type=float, default=1e-10)
    common.add_argument("--format", dest="output_format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", dest="output_path", default=None)
    point = _Parser(add_help=False)
    point.add_argument("--k", type=int, default=12)
    point.add_argument("--n", type=int, default=0, help="exponent of the weight R(t) = t^n")

    sub.add_parser("eval", parents=[common, point], help="sample F* and its decomposition on the arc")
    sub.add_parser("zeros", parents=[common, point], help="locate and count zeros on the arc")
    vl = sub.add_parser("verify-lemma", parents=[common], help="certify the lemma inequalities")
    vl.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    vl.add_argument("--k", dest="k_range", default=None, help="N or A..B")
    vl.add_argument("--m", dest="m_range", default=None, help="N, A..B or A..l")
    vl.add_argument("--paper-cases", action="store_true")
    sub.add_parser("tables", parents=[common], help="recompute both s-interval tables")
    rp = sub.add_parser("report", parents=[common], help="full reproduction bundle")
    rp.add_argument("--csv-dir", default=None)
    return ap


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    cfg = RunConfig(
        command=d["command"],
        p=d["p"],
        k=d.get("k", 12),
        n=d.get("n", 0),
        grid=d["grid"],
        tail_tol=d["tail_tol"],
        output_format=d["output_format"],
        output_path=d["output_path"],
        theorem=d.get("theorem"),
        k_range=d.get("k_range"),
        m_range=d.get("m_range"),
        paper_cases=d.get("paper_cases", False),
        csv_dir=d.get("csv_dir"),
    )
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        _apply_threads()
        text, code = COMMANDS[cfg.command](cfg)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"fricke-zeros: error: {exc}\n")
        return EXIT_USAGE
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
