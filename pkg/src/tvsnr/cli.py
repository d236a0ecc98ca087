"""Command-line front end: ``tvsnr schedules | sample | analyze``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
Failures print one JSON object ``{"error", "message", "exit_code"}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .analysis import curvature, density_shadow, peak_capture, relative_support
from .config import ExperimentConfig, load_config, resolve_schedule
from .errors import DegenerateDensityError, InvalidInputError, InvalidParameterError, QuadratureError, TvSnrError
from .samplers import TimeGrid, count_nfe, sample_batch
from .schedules import CATALOG, Family, ScheduleSpec, eval_point, issnr_scaled_eta, to_kernel
from .sde import tvsnr_sde

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

# flag name -> schedule parameter
_PARAM_FLAGS = {
    "eta": "eta",
    "kappa": "kappa",
    "t_min": "t_min",
    "t_max": "t_max",
    "sigma_min": "sigma_min",
    "sigma_max": "sigma_max",
    "rho": "rho",
    "beta_min": "beta_min",
    "beta_max": "beta_max",
    "s": "s",
    "nu": "nu",
    "eps": "eps",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise InvalidParameterError(f"{self.prog}: {message}")


def _eta_arg(text: str):
    if text == "scaled":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'scaled', got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_schedule_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("schedule")
    g.add_argument("--schedule", help="catalog entry or preset (e.g. VP-ISSNR, issnr-mol) or a JSON file")
    g.add_argument("--family", help="schedule family: smld, edm, edm-ut, otfm, ddpm-linear, ddpm-cos, issnr")
    g.add_argument("--vp", action=argparse.BooleanOptionalAction, default=None, help="force unit total variance")
    g.add_argument("--eta", type=_eta_arg, help="ISSNR/OTFM steepness, or 'scaled' for the NFE rule")
    g.add_argument("--kappa", type=float)
    g.add_argument("--t-min", type=float)
    g.add_argument("--t-max", type=float)
    g.add_argument("--sigma-min", type=float)
    g.add_argument("--sigma-max", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--beta-min", type=float)
    g.add_argument("--beta-max", type=float)
    g.add_argument("--s", type=float)
    g.add_argument("--nu", type=float)
    g.add_argument("--eps", type=float, help="endpoint clamp for singular schedules")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--config", help="experiment JSON; flags override its fields")
    g.add_argument("--mixture", help="data mixture preset (three-delta, single-delta) or JSON file")
    g.add_argument("--solver", choices=("euler", "heun", "sde"))
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--steps", type=int)
    g.add_argument("--grid", choices=("default", "uniform", "edm_rho"))
    g.add_argument("--batch", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.add_argument("--threads", type=int, help="worker threads (capped by TVSNR_THREADS)")


def _schedule_from_flags(args, base: ScheduleSpec) -> ScheduleSpec:
    spec = base
    if args.schedule:
        spec = resolve_schedule(args.schedule)
    if args.family:
        family = Family.parse(args.family)
        if family is not spec.family:
            # ISSNR is variance preserving by construction
            spec = ScheduleSpec(family, vp=family is Family.ISSNR)
    updates = {}
    for flag, key in _PARAM_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None and not (flag == "eta" and value == "scaled"):
            updates[key] = value
    if getattr(args, "eta", None) == "scaled":
        if spec.family not in (Family.ISSNR, Family.OTFM):
            raise InvalidParameterError("--eta scaled applies to ISSNR/OTFM schedules")
        steps = getattr(args, "steps", None) or 512
        updates.setdefault("kappa", 0.0)
        updates["eta"] = issnr_scaled_eta(steps)
    if updates:
        spec = spec.with_params(**updates)
    if args.vp is not None:
        spec = ScheduleSpec(spec.family, args.vp, spec.params)
    return spec


def build_config(args) -> ExperimentConfig:
    """Config file (if any) overlaid with command-line flags."""
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    changes = {"schedule": _schedule_from_flags(args, cfg.schedule)}
    for flag, name in (("mixture", "mixture"), ("solver", "solver"), ("lam", "lam"), ("steps", "steps"),
                       ("grid", "grid"), ("batch", "batch"), ("seed", "seed"), ("out", "output_dir")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    if changes.get("lam", cfg.lam) > 0 and "solver" not in changes and cfg.solver != "sde":
        changes["solver"] = "sde"
    return cfg.replace(**changes)


def _emit(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _eval_times(args, spec: ScheduleSpec) -> np.ndarray:
    if args.t:
        return np.asarray(args.t, dtype=float)
    lo, hi = spec.interval
    return np.linspace(lo, hi, args.t_grid)


def cmd_schedules(args) -> int:
    if args.action == "list":
        lines = ["name,family,vp,t_lo,t_hi,params"]
        for name, spec in CATALOG.items():
            lo, hi = spec.interval
            params = ";".join(f"{k}={v:g}" for k, v in spec.params.items())
            lines.append(f"{name},{spec.family.value},{str(spec.is_vp).lower()},{lo:g},{hi:g},{params}")
        lines.append("# alias issnr-mol = VP-ISSNR (eta=1 kappa=2 t_min=0.01 t_max=0.99)")
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    spec = build_config(args).schedule
    t = _eval_times(args, spec)
    point = eval_point(spec, t)
    kern = to_kernel(point)
    sde = tvsnr_sde(point)
    cols = [np.broadcast_to(np.asarray(c, dtype=float), t.shape) for c in
            (t, point.tv_sq, point.snr_sq, kern.a, kern.b, sde.f, sde.g_sq)]
    rows = ["t,tv_sq,snr_sq,a,b,f,g_sq"]
    rows += [",".join(io.fmt_float(v) for v in row) for row in zip(*(c.tolist() for c in cols))]
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = build_config(args)
    grid = cfg.time_grid()
    mix = cfg.mixture_data
    start = time.perf_counter()
    traj = sample_batch(cfg.schedule, grid, mix, cfg.batch, cfg.seed, cfg.solver, cfg.lam, threads=args.threads)
    elapsed = time.perf_counter() - start
    _check_finite(traj.states)
    out = Path(cfg.output_dir)
    if args.layout == "split":
        io.write_trajectory_files(out / "trajectories", traj)
    else:
        io.write_trajectories_long(out / "trajectories.csv", traj)
    io.write_grid(out / "grid.json", grid)
    (out / "config.json").write_text(cfg.to_json(), encoding="utf-8", newline="\n")
    capture = peak_capture(traj.final, mix, args.tol)
    summary = {
        "schedule": cfg.schedule.name,
        "solver": cfg.solver,
        "lambda": cfg.lam,
        "steps": grid.steps,
        "nfe": count_nfe(cfg.solver, grid, cfg.schedule),
        "batch": cfg.batch,
        "seed": cfg.seed,
        "peak_tol": args.tol,
        "peak_capture": capture.to_dict(),
        "wall_time_s": elapsed,
    }
    io.write_json(out / "summary.json", summary)
    return EXIT_OK


def _check_finite(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise FloatingPointError("solver produced non-finite states")


def _compare_specs(args, cfg: ExperimentConfig) -> list[tuple[str, ScheduleSpec]]:
    if not args.compare:
        return [(cfg.schedule.name, cfg.schedule)]
    return [(name.strip(), resolve_schedule(name.strip())) for name in args.compare.split(",") if name.strip()]


def _file_tag(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in label)


def cmd_analyze(args) -> int:
    cfg = build_config(args)
    runs = _compare_specs(args, cfg)
    if args.compare and not args.out:
        raise InvalidParameterError("--compare writes one file per schedule and needs --out")
    if args.kind == "curvature" and cfg.lam > 0:
        raise InvalidInputError("curvature is defined for probability-flow runs (lambda = 0)")
    for label, spec in runs:
        run_cfg = cfg.replace(schedule=spec)
        tag = _file_tag(label) if args.compare else args.kind
        target = Path(run_cfg.output_dir) / f"{args.kind}_{tag}.csv" if args.compare else None
        if args.kind == "curvature":
            _analyze_curvature(args, run_cfg, target)
        elif args.kind == "support":
            _analyze_support(args, run_cfg, target)
        else:
            _analyze_shadow(args, run_cfg, target)
    return EXIT_OK


def _target(args, cfg: ExperimentConfig, name: str, fixed: Path | None) -> Path | None:
    if fixed is not None:
        return fixed
    if args.out:
        return Path(cfg.output_dir) / f"{name}.csv"
    return None


def _analyze_curvature(args, cfg: ExperimentConfig, fixed: Path | None) -> None:
    grid = cfg.time_grid()
    mix = cfg.mixture_data
    traj = sample_batch(cfg.schedule, grid, mix, cfg.batch, cfg.seed, cfg.solver, 0.0, threads=args.threads)
    _check_finite(traj.states)
    report = curvature(traj, cfg.schedule, mix)
    meta = {"schedule": cfg.schedule.name, "batch": cfg.batch, "steps": grid.steps, "seed": cfg.seed}
    path = _target(args, cfg, "curvature", fixed)
    if path is None:
        rows = ["t,local"] + [f"{io.fmt_float(t)},{io.fmt_float(v)}" for t, v in zip(report.times, report.local)]
        sys.stdout.write("\n".join(rows) + "\n")
        sys.stderr.write(json.dumps({"global_curvature": report.global_curvature, **meta}) + "\n")
    else:
        io.write_curvature(path, report, meta)


def _analyze_support(args, cfg: ExperimentConfig, fixed: Path | None) -> None:
    spec = cfg.schedule
    if args.t:
        top = spec.interval[1]
        nodes = sorted({top, *args.t}, reverse=True)
        report = relative_support(spec, TimeGrid(np.asarray(nodes), "custom"))
        keep = np.isin(report.times, np.asarray(args.t, dtype=float))
        report = type(report)(report.times[keep], report.rel_support[keep])
    else:
        report = relative_support(spec, cfg.time_grid())
    path = _target(args, cfg, "support", fixed)
    if path is None:
        rows = ["t,rel_support"] + [f"{io.fmt_float(t)},{io.fmt_float(v)}" for t, v in zip(report.times, report.rel_support)]
        sys.stdout.write("\n".join(rows) + "\n")
    else:
        io.write_support(path, report, {"schedule": spec.name, "t_max": spec.interval[1]})


def _analyze_shadow(args, cfg: ExperimentConfig, fixed: Path | None) -> None:
    spec = cfg.schedule
    lo, hi = spec.interval
    t_grid = np.asarray(args.t, dtype=float) if args.t else np.linspace(hi, lo, args.t_points)
    half = 4.0 * math.sqrt(float(eval_point(spec, hi).tv_sq))
    x_grid = np.linspace(-half, half, args.x_points)
    t_grid, x_grid, pdf = density_shadow(cfg.mixture_data, spec, t_grid, x_grid)
    path = _target(args, cfg, "shadow", fixed)
    if path is None:
        tt, xx = np.meshgrid(t_grid, x_grid, indexing="ij")
        rows = ["t,x,pdf"] + [
            f"{io.fmt_float(a)},{io.fmt_float(b)},{io.fmt_float(c)}" for a, b, c in zip(tt.ravel(), xx.ravel(), pdf.ravel())
        ]
        sys.stdout.write("\n".join(rows) + "\n")
    else:
        io.write_shadow(path, t_grid, x_grid, pdf)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tvsnr", description="TV/SNR noise schedules, samplers and toy diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("schedules", help="list the catalog or evaluate a schedule")
    sp.add_argument("action", choices=("list", "eval"))
    _add_schedule_flags(sp)
    sp.add_argument("--config")
    sp.add_argument("--steps", type=int, help="NFE used by --eta scaled")
    sp.add_argument("--t", type=_float_list, help="comma-separated times")
    sp.add_argument("--t-grid", type=int, default=11, help="evenly spaced times over the schedule window")
    sp.add_argument("--out", help="CSV file (default: stdout)")
    sp.set_defaults(func=cmd_schedules)

    sm = sub.add_parser("sample", help="solve a batch of reverse trajectories")
    _add_schedule_flags(sm)
    _add_run_flags(sm)
    sm.add_argument("--layout", choices=("long", "split"), default="long",
                    help="one long-format CSV, or one CSV per trajectory")
    sm.add_argument("--tol", type=float, default=1e-2, help="peak-capture distance")
    sm.set_defaults(func=cmd_sample)

    an = sub.add_parser("analyze", help="curvature, support and density reports")
    an.add_argument("kind", choices=("curvature", "support", "shadow"))
    _add_schedule_flags(an)
    _add_run_flags(an)
    an.add_argument("--compare", help="comma-separated schedule names; one output file each")
    an.add_argument("--t", type=_float_list, help="support/shadow: evaluate at these times only")
    an.add_argument("--t-points", type=int, default=201)
    an.add_argument("--x-points", type=int, default=401)
    an.set_defaults(func=cmd_analyze)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (QuadratureError, DegenerateDensityError, ArithmeticError)):
        return EXIT_NUMERIC
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (TvSnrError, ValueError, TypeError)):
        return EXIT_CONFIG
    raise exc


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes below
        code = _exit_code(exc)
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
