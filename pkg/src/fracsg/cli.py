"""Command-line front end.

Subcommands
  run          one simulation; writes solution snapshots, the energy series,
               and resolved-config metadata
  convergence  refinement-ladder error tables over a set of fractional orders
  energy       long-time energy-conservation series per fractional order
  bench        wall-clock comparison of the dense direct solver against the
               FFT conjugate-gradient solver

All real numbers in CSV output use 16-significant-digit scientific notation,
and every output except bench timings is byte-stable across repeated runs.
Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import EnergyRecorder, convergence_ladder
from .operator import FracOperator, GridSpec
from .presets import BENCH_DEFAULTS, CONVERGENCE_PRESETS, ENERGY_PRESETS, RUN_PRESETS
from .problems import get_problem
from .scheme import IeqState, SchemeConfig, run
from .solvers import NumericalFailure, SolveConfig

_REAL = "{:.15e}".format


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the interface contract
    # reserves 2 for numerical failures
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.replace(",", " ").split())


def _domain(text: str) -> tuple[float, float]:
    parts = _floats(text)
    if len(parts) != 2:
        raise ValueError(f"domain needs two endpoints, got {text!r}")
    return parts


def _parse_config_file(path: str) -> dict[str, str]:
    """Flat key = value lines; blank lines and # comments ignored; keys match
    long option names with dashes replaced by underscores."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def _merge(ns: argparse.Namespace, converters: dict) -> dict:
    """Effective settings with precedence flags > config file > None.
    Presets and builtin defaults are applied by the caller on top."""
    from_file: dict[str, str] = {}
    if getattr(ns, "config", None):
        from_file = _parse_config_file(ns.config)
        unknown = sorted(set(from_file) - set(converters))
        if unknown:
            raise ValueError(f"unknown config file keys: {', '.join(unknown)}")
    merged = {}
    for dest, conv in converters.items():
        value = getattr(ns, dest, None)
        if value is None and dest in from_file:
            value = conv(from_file[dest])
        merged[dest] = value
    return merged


def _require(merged: dict, *keys: str) -> None:
    missing = [k for k in keys if merged[k] is None]
    if missing:
        raise ValueError(f"missing required settings: {', '.join(missing)}")


def _subdivisions(span: float, step: float, what: str) -> int:
    count = span / step
    if abs(count - round(count)) > 1e-9 * max(1.0, abs(count)):
        raise ValueError(f"{what}={step} does not divide {span} into whole steps")
    return round(count)


def _solve_config(merged: dict) -> SolveConfig:
    return SolveConfig(
        method=merged.get("method") or "cg",
        cg_rel_tol=merged.get("cg_tol") if merged.get("cg_tol") is not None else 1e-12,
        precond=merged.get("precond") or "none",
    )


def _write_csv(path: Path, header: str, rows) -> None:
    with path.open("w") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


class SnapshotWriter:
    """Writes solution_<n>.csv at the configured stride plus the final level."""

    def __init__(self, out_dir: Path, x: np.ndarray, stride: int, last: int):
        self.out_dir = out_dir
        self.x = x
        self.stride = stride
        self.last = last

    def __call__(self, state: IeqState, stats) -> None:
        if state.n % self.stride != 0 and state.n != self.last:
            return
        rows = (
            (_REAL(x), _REAL(u), _REAL(v), _REAL(w))
            for x, u, v, w in zip(self.x, state.U, state.V, state.W)
        )
        _write_csv(self.out_dir / f"solution_{state.n}.csv", "x,U,V,W", rows)


def cmd_run(ns: argparse.Namespace) -> int:
    merged = _merge(ns, {
        "example": str, "alpha": float, "omega": float, "domain": _domain,
        "h": float, "tau": float, "T": float, "method": str, "cg_tol": float,
        "precond": str, "snapshot_stride": int,
    })
    if ns.preset is not None:
        p = RUN_PRESETS[ns.preset]
        for dest, value in (("example", p.problem_key), ("domain", (p.a, p.b)),
                            ("h", p.h), ("tau", p.tau), ("T", p.T), ("omega", p.omega)):
            if merged[dest] is None:
                merged[dest] = value
    if merged["omega"] is None:
        merged["omega"] = 1.1
    _require(merged, "example", "alpha", "domain", "h", "tau", "T")

    a, b = merged["domain"]
    M = _subdivisions(b - a, merged["h"], "h")
    N = _subdivisions(merged["T"], merged["tau"], "tau")
    grid = GridSpec(a=a, b=b, M=M)
    problem = get_problem(merged["example"], omega=merged["omega"])
    cfg = SchemeConfig(grid=grid, alpha=merged["alpha"], T=merged["T"], N=N,
                       solve=_solve_config(merged))
    stride = merged["snapshot_stride"] or max(1, N // 100)
    if stride < 1:
        raise ValueError("snapshot stride must be >= 1")

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    op = FracOperator(cfg.alpha, grid)
    recorder = EnergyRecorder(op)
    snapshots = SnapshotWriter(out_dir, grid.interior_nodes(), stride, N)
    result = run(problem, cfg, observers=(recorder, snapshots), op=op)

    _write_csv(out_dir / "energy.csv", "n,t,E,RE",
               ((str(n), _REAL(t), _REAL(e), _REAL(re)) for n, t, e, re in recorder.rows))
    meta = {
        "example": problem.key,
        "omega": problem.omega,
        "alpha": cfg.alpha,
        "domain": [a, b],
        "h": grid.h,
        "M": M,
        "tau": cfg.tau,
        "N": N,
        "T": cfg.T,
        "method": cfg.solve.method,
        "cg_rel_tol": cfg.solve.cg_rel_tol,
        "precond": cfg.solve.precond,
        "snapshot_stride": stride,
        "fft_embed_size": op.embed_size,
        "startup_tol": cfg.startup_tol,
        "startup_iterations": result.startup_iterations,
        "cg_iterations_max": result.cg_iterations_max,
        "cg_iterations_mean": result.cg_iterations_mean,
        "residual_max": result.residual_max,
        "version": __version__,
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_convergence(ns: argparse.Namespace) -> int:
    merged = _merge(ns, {
        "example": str, "alphas": _floats, "omega": float, "domain": _domain,
        "base_h": float, "base_tau": float, "levels": int, "T": float,
        "method": str, "cg_tol": float, "precond": str,
    })
    if ns.preset is not None:
        p = CONVERGENCE_PRESETS[ns.preset]
        for dest, value in (("example", p.problem_key), ("alphas", p.alphas),
                            ("domain", (p.a, p.b)), ("base_h", p.base_h),
                            ("base_tau", p.base_tau), ("levels", p.levels),
                            ("T", p.T), ("omega", p.omega)):
            if merged[dest] is None:
                merged[dest] = value
    if merged["omega"] is None:
        merged["omega"] = 1.1
    if merged["levels"] is None:
        merged["levels"] = 4
    _require(merged, "example", "alphas", "domain", "base_h", "base_tau", "T")

    a, b = merged["domain"]
    solve_cfg = _solve_config(merged)
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for alpha in merged["alphas"]:
        problem = get_problem(merged["example"], omega=merged["omega"])
        report = convergence_ladder(problem, alpha, a, b, merged["base_h"],
                                    merged["base_tau"], merged["levels"], merged["T"],
                                    solve_cfg=solve_cfg)
        for row in report.rows:
            rows.append((_REAL(alpha), _REAL(row.h), _REAL(row.tau), _REAL(row.error),
                         "" if row.order is None else _REAL(row.order)))
    _write_csv(out_dir / "convergence.csv", "alpha,h,tau,error,order", rows)
    return 0


def cmd_energy(ns: argparse.Namespace) -> int:
    merged = _merge(ns, {
        "example": str, "alphas": _floats, "omega": float, "domain": _domain,
        "h": float, "tau": float, "T": float,
        "method": str, "cg_tol": float, "precond": str,
    })
    if ns.preset is not None:
        p = ENERGY_PRESETS[ns.preset]
        for dest, value in (("example", p.problem_key), ("alphas", p.alphas),
                            ("domain", (p.a, p.b)), ("h", p.h), ("tau", p.tau),
                            ("T", p.T), ("omega", p.omega)):
            if merged[dest] is None:
                merged[dest] = value
    if merged["omega"] is None:
        merged["omega"] = 1.1
    _require(merged, "example", "alphas", "domain", "h", "tau", "T")

    a, b = merged["domain"]
    M = _subdivisions(b - a, merged["h"], "h")
    N = _subdivisions(merged["T"], merged["tau"], "tau")
    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for alpha in merged["alphas"]:
        grid = GridSpec(a=a, b=b, M=M)
        problem = get_problem(merged["example"], omega=merged["omega"])
        cfg = SchemeConfig(grid=grid, alpha=alpha, T=merged["T"], N=N,
                           solve=_solve_config(merged))
        op = FracOperator(alpha, grid)
        recorder = EnergyRecorder(op)
        run(problem, cfg, observers=(recorder,), op=op)
        _write_csv(out_dir / f"energy_{alpha:g}.csv", "n,t,E,RE",
                   ((str(n), _REAL(t), _REAL(e), _REAL(re)) for n, t, e, re in recorder.rows))
    return 0


def _timed_run(problem, cfg: SchemeConfig, reps: int) -> tuple[float, np.ndarray]:
    times = []
    final = None
    for _ in range(reps):
        t0 = time.perf_counter()
        final = run(problem, cfg).state.U
        times.append(time.perf_counter() - t0)
    return statistics.median(times), final


def cmd_bench(ns: argparse.Namespace) -> int:
    merged = _merge(ns, {
        "sizes": _ints, "alphas": _floats, "taus": _floats, "h": float,
        "T": float, "reps": int, "cg_tol": float, "omega": float,
    })
    d = BENCH_DEFAULTS
    for dest, value in (("sizes", d.sizes), ("alphas", d.alphas), ("taus", d.taus),
                        ("h", d.h), ("T", d.T), ("reps", d.reps), ("omega", d.omega),
                        ("cg_tol", d.cg_tol)):
        if merged[dest] is None:
            merged[dest] = value
    if not merged["sizes"]:
        raise ValueError("sizes list must be nonempty")
    if merged["reps"] < 1:
        raise ValueError("reps must be >= 1")

    out_dir = Path(ns.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cg_tol = merged["cg_tol"]
    rows = []
    violations = []
    for alpha in merged["alphas"]:
        for M in merged["sizes"]:
            half_span = 0.5 * M * merged["h"]
            grid = GridSpec(a=-half_span, b=half_span, M=M)
            problem = get_problem("5.1", omega=merged["omega"])
            for tau in merged["taus"]:
                N = _subdivisions(merged["T"], tau, "tau")
                base = dict(grid=grid, alpha=alpha, T=merged["T"], N=N)
                direct_cfg = SchemeConfig(solve=SolveConfig(method="direct"), **base)
                fft_cfg = SchemeConfig(solve=SolveConfig(method="cg", cg_rel_tol=cg_tol), **base)
                t_direct, u_direct = _timed_run(problem, direct_cfg, merged["reps"])
                t_fft, u_fft = _timed_run(problem, fft_cfg, merged["reps"])
                diff = float(np.max(np.abs(u_direct - u_fft)))
                if diff > 1e-8:
                    raise NumericalFailure(
                        f"direct and FFT solution paths disagree by {diff:.3e} "
                        f"(alpha={alpha}, M={M}, tau={tau})")
                if M >= 400 and t_fft > t_direct:
                    violations.append(f"alpha={alpha} M={M} tau={tau}: "
                                      f"fft {t_fft:.3f}s > direct {t_direct:.3f}s")
                rows.append((_REAL(alpha), str(M), _REAL(grid.h), _REAL(tau), str(N),
                             _REAL(t_direct), _REAL(t_fft), _REAL(diff)))
    _write_csv(out_dir / "bench.csv",
               "alpha,M,h,tau,steps,direct_seconds,fft_seconds,solution_diff", rows)
    if violations:
        raise NumericalFailure(
            "FFT path slower than direct at M >= 400:\n  " + "\n  ".join(violations))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fracsg", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="flat key = value config file; flags take precedence")

    p_run = sub.add_parser("run", help="single simulation with snapshots and energy series")
    p_run.add_argument("--preset", choices=sorted(RUN_PRESETS),
                       help="wide-domain soliton evolution settings")
    p_run.add_argument("--example", choices=("5.1", "5.2"), help="benchmark problem")
    p_run.add_argument("--alpha", type=float, help="fractional order in (1, 2]")
    p_run.add_argument("--omega", type=float, help="width parameter of benchmark 5.1")
    p_run.add_argument("--domain", nargs=2, type=float, metavar=("A", "B"))
    p_run.add_argument("--h", type=float, help="mesh size (must divide the domain)")
    p_run.add_argument("--tau", type=float, help="time step (must divide T)")
    p_run.add_argument("--T", type=float, help="final time")
    p_run.add_argument("--method", choices=("cg", "direct"))
    p_run.add_argument("--cg-tol", type=float, dest="cg_tol",
                       help="CG relative residual tolerance (default 1e-12)")
    p_run.add_argument("--precond", choices=("none", "circulant"))
    p_run.add_argument("--snapshot-stride", type=int, dest="snapshot_stride",
                       help="write solution_<n>.csv every this many steps (default N/100)")
    add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("convergence", help="refinement-ladder error table")
    p_conv.add_argument("--preset", choices=sorted(CONVERGENCE_PRESETS))
    p_conv.add_argument("--example", choices=("5.1", "5.2"))
    p_conv.add_argument("--alphas", type=_floats, help="comma-separated fractional orders")
    p_conv.add_argument("--omega", type=float)
    p_conv.add_argument("--domain", nargs=2, type=float, metavar=("A", "B"))
    p_conv.add_argument("--base-h", type=float, dest="base_h", help="coarsest mesh size")
    p_conv.add_argument("--base-tau", type=float, dest="base_tau", help="coarsest time step")
    p_conv.add_argument("--levels", type=int, help="ladder depth (default 4)")
    p_conv.add_argument("--T", type=float)
    p_conv.add_argument("--method", choices=("cg", "direct"))
    p_conv.add_argument("--cg-tol", type=float, dest="cg_tol")
    p_conv.add_argument("--precond", choices=("none", "circulant"))
    add_common(p_conv)
    p_conv.set_defaults(func=cmd_convergence)

    p_en = sub.add_parser("energy", help="energy-conservation series per fractional order")
    p_en.add_argument("--preset", choices=sorted(ENERGY_PRESETS))
    p_en.add_argument("--example", choices=("5.1", "5.2"))
    p_en.add_argument("--alphas", type=_floats)
    p_en.add_argument("--omega", type=float)
    p_en.add_argument("--domain", nargs=2, type=float, metavar=("A", "B"))
    p_en.add_argument("--h", type=float)
    p_en.add_argument("--tau", type=float)
    p_en.add_argument("--T", type=float)
    p_en.add_argument("--method", choices=("cg", "direct"))
    p_en.add_argument("--cg-tol", type=float, dest="cg_tol")
    p_en.add_argument("--precond", choices=("none", "circulant"))
    add_common(p_en)
    p_en.set_defaults(func=cmd_energy)

    p_bench = sub.add_parser(
        "bench", help="dense-direct vs FFT-CG wall-clock comparison "
                      "(default settings take a few minutes)")
    p_bench.add_argument("--sizes", type=_ints, help="comma-separated interior sizes M")
    p_bench.add_argument("--alphas", type=_floats)
    p_bench.add_argument("--taus", type=_floats)
    p_bench.add_argument("--h", type=float)
    p_bench.add_argument("--T", type=float)
    p_bench.add_argument("--reps", type=int, help="repetitions per timing (median reported)")
    p_bench.add_argument("--omega", type=float)
    p_bench.add_argument("--cg-tol", type=float, dest="cg_tol",
                         help="CG tolerance for the FFT path (default 1e-14: keeps "
                              "the paths within the checked 1e-8 over long sweeps)")
    add_common(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return ns.func(ns)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
