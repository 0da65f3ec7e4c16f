"""Command-line front end: scans, optima, dynamics runs, figure-style data sets.

Every numeric value is printed with 17 significant digits and identical
argv produces byte-identical output.  Exit codes: 0 success, 1 domain
error (bad physics input, unreadable files), 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import dynamics, metrology, qsl, spectra

__all__ = ["main", "entry_point"]

_FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b")
_DYNAMICS_TEMPS = (0.25, 0.75, 1.5, 5.0)


class UsageError(Exception):
    """Bad flag combination that argparse alone cannot catch."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _jnum(x: float) -> str:
    return _fmt(x)


def _jarr(values) -> str:
    return "[" + ", ".join(_jnum(v) for v in values) + "]"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _csv(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# spectrum sources


def _load_spectrum_file(path: str, gaps: bool) -> spectra.EnergySpectrum:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read spectrum file {path}: {exc}") from exc
    return spectra.parse_spectrum(text, gaps=gaps)


def _family_spectrum(args, temp_hint: float) -> spectra.EnergySpectrum:
    if args.family == "qubit":
        return spectra.harmonic(2, args.delta)
    if args.family == "oscillator":
        return spectra.oscillator_truncated(args.delta, max(temp_hint, args.delta), 1e-12)
    if args.family == "harmonic":
        if args.d is None:
            raise UsageError("--family harmonic requires --d")
        return spectra.harmonic(args.d, args.delta)
    raise UsageError(f"unknown family {args.family!r}")


def _resolve_spectrum(args, temp_hint: float) -> spectra.EnergySpectrum:
    if args.spectrum is not None:
        return _load_spectrum_file(args.spectrum, args.gaps)
    return _family_spectrum(args, temp_hint)


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--family", choices=("qubit", "oscillator", "harmonic"))
    group.add_argument("--spectrum", metavar="FILE", help="spectrum JSON file")
    parser.add_argument("--delta", type=float, default=1.0, help="energy gap (family sources)")
    parser.add_argument("--d", type=int, default=None, help="dimension for --family harmonic")
    parser.add_argument(
        "--gaps",
        action="store_true",
        help="read file energies as successive gaps instead of absolute values",
    )


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", metavar="PATH", default=None)
    parser.add_argument("--format", choices=("csv", "json"), default=None)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_qfi(args) -> int:
    spectrum = _resolve_spectrum(args, args.tmax)
    if args.as_printed and (args.spectrum is not None or args.family != "qubit"):
        raise UsageError("--as-printed applies only to --family qubit")
    t_min = max(args.tmin, 1e-4 * spectrum.first_gap)
    scan = metrology.scan_qfi(spectrum, t_min, args.tmax, args.points)
    fmt = args.format or "csv"
    if args.as_printed:
        printed = metrology.qfi_qubit_closed(args.delta, scan.temperatures, as_printed=True)
        if fmt == "json":
            text = (
                "{\n"
                f'  "temperatures": {_jarr(scan.temperatures)},\n'
                f'  "qfi": {_jarr(scan.values)},\n'
                f'  "qfi_printed": {_jarr(printed)}\n'
                "}\n"
            )
        else:
            text = _csv(
                "T,qfi,qfi_printed",
                zip(map(float, scan.temperatures), map(float, scan.values), map(float, printed)),
            )
    elif fmt == "json":
        text = (
            "{\n"
            f'  "temperatures": {_jarr(scan.temperatures)},\n'
            f'  "qfi": {_jarr(scan.values)}\n'
            "}\n"
        )
    else:
        text = _csv("T,qfi", zip(map(float, scan.temperatures), map(float, scan.values)))
    _emit(text, args.out)
    return 0


def _optimum_json(report: metrology.OptimumReport) -> str:
    return (
        "{"
        f'"t_max": {_jnum(report.t_max)}, '
        f'"h_max": {_jnum(report.h_max)}, '
        f'"converged": {"true" if report.converged else "false"}'
        "}"
    )


def _cmd_optimum(args) -> int:
    hint = args.bracket[1] if args.bracket else 10.0 * args.delta
    spectrum = _resolve_spectrum(args, hint)
    bracket = tuple(args.bracket) if args.bracket else None
    report = metrology.find_optimal_temperature(spectrum, bracket)
    if (args.format or "json") == "json":
        _emit(_optimum_json(report) + "\n", args.out)
    else:
        _emit(
            _csv("t_max,h_max,converged", [(report.t_max, report.h_max, report.converged)]),
            args.out,
        )
    return 0


def _cmd_peaks(args) -> int:
    spectrum = _resolve_spectrum(args, args.tmax)
    t_min = max(args.tmin, 1e-4 * spectrum.first_gap)
    reports = metrology.find_peaks(spectrum, t_min, args.tmax, args.points)
    if (args.format or "json") == "json":
        body = ",\n  ".join(_optimum_json(r) for r in reports)
        _emit("[\n  " + body + "\n]\n" if reports else "[]\n", args.out)
    else:
        _emit(
            _csv("t_max,h_max,converged", [(r.t_max, r.h_max, r.converged) for r in reports]),
            args.out,
        )
    return 0


def _cmd_scaling(args) -> int:
    if args.family == "harmonic" and args.d is None:
        raise UsageError("--family harmonic requires --d")
    fit = metrology.scaling_study(args.delta, args.family, args.d)
    if (args.format or "json") == "json":
        points = ",\n    ".join(
            f'{{"delta": {_jnum(g)}, "t_max": {_jnum(t)}, "h_max": {_jnum(h)}}}'
            for g, t, h in zip(fit.gaps, fit.t_max_values, fit.h_max_values)
        )
        text = (
            "{\n"
            f'  "family": "{args.family}",\n'
            f'  "alpha": {_jnum(fit.alpha)},\n'
            f'  "quad_coeff": {_jnum(fit.quad_coeff)},\n'
            f'  "t_residual_norm": {_jnum(fit.t_residual_norm)},\n'
            f'  "quad_residual_norm": {_jnum(fit.quad_residual_norm)},\n'
            f'  "points": [\n    {points}\n  ]\n'
            "}\n"
        )
    else:
        text = _csv(
            "delta,t_max,h_max",
            zip(map(float, fit.gaps), map(float, fit.t_max_values), map(float, fit.h_max_values)),
        )
    _emit(text, args.out)
    return 0


def _trajectory_for(model: str, delta: float, coupling: float, temp: float, tmax: float, steps: int):
    t_grid = np.linspace(0.0, tmax, steps + 1)
    if model == "markov":
        return dynamics.markov_trajectory(dynamics.MarkovParams(delta, coupling, temp), t_grid)
    return dynamics.swap_trajectory(dynamics.SwapParams(delta, coupling, temp), t_grid)


def _traj_csv(traj) -> str:
    norms = [qsl.generator_op_norm(g) for g in traj.generators]
    return _csv(
        "t,p_e,gen_norm",
        zip(map(float, traj.times), map(float, traj.excited_populations), norms),
    )


def _qsl_csvs(traj) -> tuple[str, str]:
    report = qsl.evaluate_qsl(traj)
    series = _csv(
        "t,fidelity,bures,v_qsl",
        zip(
            map(float, report.times),
            map(float, report.fidelities),
            map(float, report.bures),
            map(float, report.speeds),
        ),
    )
    windows = _csv(
        "tau,e_tau,tau_qsl",
        zip(
            map(float, report.window_taus),
            map(float, report.e_tau_values),
            map(float, report.tau_qsl_values),
        ),
    )
    return series, windows


def _cmd_dynamics(args) -> int:
    coupling = args.gamma if args.model == "markov" else args.j
    temps = args.temp or [1.0]
    multi = len(temps) > 1
    for temp in temps:
        traj = _trajectory_for(args.model, args.delta, coupling, temp, args.tmax, args.steps)
        if args.qsl:
            series, windows = _qsl_csvs(traj)
            if args.out is None:
                sys.stdout.write(f"# qsl T={_fmt(temp)}\n" + series)
                sys.stdout.write(f"# windows T={_fmt(temp)}\n" + windows)
            else:
                base = Path(args.out)
                suffix = f"_T{temp:g}" if multi else ""
                series_path = base.with_name(base.stem + suffix + base.suffix)
                window_path = base.with_name(base.stem + suffix + "_window" + base.suffix)
                series_path.write_text(series)
                window_path.write_text(windows)
        else:
            text = _traj_csv(traj)
            if args.out is None:
                if multi:
                    sys.stdout.write(f"# T={_fmt(temp)}\n")
                sys.stdout.write(text)
            else:
                base = Path(args.out)
                suffix = f"_T{temp:g}" if multi else ""
                base.with_name(base.stem + suffix + base.suffix).write_text(text)
    return 0


# ---------------------------------------------------------------------------
# figure-style data sets


def _write_files(out_dir: str, files: dict[str, str]) -> int:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    for name in sorted(files):
        (directory / name).write_text(files[name])
        sys.stdout.write(str(directory / name) + "\n")
    return 0


def _scan_csv(spectrum, t_min, t_max, points=2000) -> str:
    scan = metrology.scan_qfi(spectrum, t_min, t_max, points)
    return _csv("T,qfi", zip(map(float, scan.temperatures), map(float, scan.values)))


def _closed_csv(func, t_min, t_max, points=2000) -> str:
    temps = metrology.GridSpec(t_min, t_max, points).build()
    return _csv("T,qfi", zip(map(float, temps), map(float, func(temps))))


def _reproduce_fig1() -> dict[str, str]:
    files = {}
    for delta in (0.5, 1.0, 2.0):
        files[f"fig1a_qubit_delta{delta:g}.csv"] = _closed_csv(
            lambda t, d=delta: metrology.qfi_qubit_closed(d, t), 0.01, 5.0
        )
        files[f"fig1a_oscillator_delta{delta:g}.csv"] = _closed_csv(
            lambda t, d=delta: metrology.qfi_oscillator_closed(d, t), 0.01, 5.0
        )
    for family in ("qubit", "oscillator"):
        fit = metrology.scaling_study((0.25, 0.5, 1.0, 2.0, 4.0), family)
        files[f"fig1bc_{family}_scaling.csv"] = _csv(
            "delta,t_max,h_max,inv_h_max",
            zip(
                map(float, fit.gaps),
                map(float, fit.t_max_values),
                map(float, fit.h_max_values),
                map(float, 1.0 / fit.h_max_values),
            ),
        )
    return files


def _reproduce_fig2() -> dict[str, str]:
    files = {}
    for d in (2, 3, 4, 5):
        files[f"fig2_qfi_d{d}.csv"] = _scan_csv(spectra.harmonic(d, 1.0), 0.01, 2.0)
    files["fig2_qfi_oscillator.csv"] = _closed_csv(
        lambda t: metrology.qfi_oscillator_closed(1.0, t), 0.01, 2.0
    )
    return files


def _reproduce_fig3() -> dict[str, str]:
    files = {}
    for gap2 in (1.0, 1.5, 2.0, 3.0):
        files[f"fig3_qfi_gap2_{gap2:g}.csv"] = _scan_csv(
            spectra.three_level(1.0, gap2), 0.01, 5.0
        )
    files["fig3_qfi_oscillator.csv"] = _closed_csv(
        lambda t: metrology.qfi_oscillator_closed(1.0, t), 0.01, 5.0
    )
    return files


def _staircase_files(tag: str, gap2: float, gap3: float) -> dict[str, str]:
    spectrum = spectra.degenerate_staircase(
        [(0.0, 1), (1.0, 1), (gap2, 100), (gap3, 10**6)]
    )
    temps = metrology.GridSpec(0.01, 50.0, 2000).build()
    from .thermal import log_populations

    log_p, _ = log_populations(spectrum, temps)
    pops = np.exp(log_p)  # block populations per level
    rows = [
        (float(t),) + tuple(float(p) for p in pops[:, k]) for k, t in enumerate(temps)
    ]
    header = "T," + ",".join(f"p{i}" for i in range(spectrum.num_levels))
    return {
        f"{tag}_qfi.csv": _scan_csv(spectrum, 0.01, 50.0),
        f"{tag}_populations.csv": _csv(header, rows),
    }


def _reproduce_fig5(model: str) -> dict[str, str]:
    files = {}
    for temp in _DYNAMICS_TEMPS:
        if model == "markov":
            traj = _trajectory_for("markov", 1.0, 1.0, temp, 5.0, 2000)
        else:
            traj = _trajectory_for("swap", 1.0, 1.0, temp, 2.0 * math.pi, 2000)
        series, windows = _qsl_csvs(traj)
        tag = "fig5a" if model == "markov" else "fig5b"
        files[f"{tag}_qsl_T{temp:g}.csv"] = series
        files[f"{tag}_window_T{temp:g}.csv"] = windows
    return files


def _cmd_reproduce(args) -> int:
    builders = {
        "fig1": _reproduce_fig1,
        "fig2": _reproduce_fig2,
        "fig3": _reproduce_fig3,
        "fig4a": lambda: _staircase_files("fig4a", 5.0, 25.0),
        "fig4b": lambda: _staircase_files("fig4b", 4.0, 15.0),
        "fig5a": lambda: _reproduce_fig5("markov"),
        "fig5b": lambda: _reproduce_fig5("swap"),
    }
    return _write_files(args.out, builders[args.figure]())


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtherm",
        description="Thermometry precision limits and quantum-speed-limit diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_qfi = sub.add_parser("qfi", help="QFI-vs-temperature scan")
    _add_source_flags(p_qfi)
    p_qfi.add_argument("--tmin", type=float, default=0.05)
    p_qfi.add_argument("--tmax", type=float, default=5.0)
    p_qfi.add_argument("--points", type=int, default=500)
    p_qfi.add_argument(
        "--as-printed",
        action="store_true",
        help="add a column with the doubled-prefactor qubit closed form",
    )
    _add_output_flags(p_qfi)
    p_qfi.set_defaults(handler=_cmd_qfi)

    p_opt = sub.add_parser("optimum", help="locate the QFI maximum")
    _add_source_flags(p_opt)
    p_opt.add_argument("--bracket", type=float, nargs=2, metavar=("TLO", "THI"), default=None)
    _add_output_flags(p_opt)
    p_opt.set_defaults(handler=_cmd_optimum)

    p_peaks = sub.add_parser("peaks", help="all interior QFI maxima on a log grid")
    _add_source_flags(p_peaks)
    p_peaks.add_argument("--tmin", type=float, default=0.01)
    p_peaks.add_argument("--tmax", type=float, default=50.0)
    p_peaks.add_argument("--points", type=int, default=2000)
    _add_output_flags(p_peaks)
    p_peaks.set_defaults(handler=_cmd_peaks)

    p_scale = sub.add_parser("scaling", help="fit t_max and 1/h_max power laws over gaps")
    p_scale.add_argument("--family", choices=("qubit", "oscillator", "harmonic"), required=True)
    p_scale.add_argument("--d", type=int, default=None)
    p_scale.add_argument(
        "--delta", type=float, action="append", required=True, help="gap value (repeat >= 5 times)"
    )
    _add_output_flags(p_scale)
    p_scale.set_defaults(handler=_cmd_scaling)

    p_dyn = sub.add_parser("dynamics", help="thermalization trajectories and QSL series")
    dyn_sub = p_dyn.add_subparsers(dest="model", required=True)
    for model in ("markov", "swap"):
        p_model = dyn_sub.add_parser(model)
        p_model.add_argument("--delta", type=float, default=1.0)
        if model == "markov":
            p_model.add_argument("--gamma", type=float, default=1.0)
        else:
            p_model.add_argument("--j", type=float, default=1.0)
        p_model.add_argument("--temp", type=float, action="append")
        p_model.add_argument("--tmax", type=float, required=True)
        p_model.add_argument("--steps", type=int, default=2000)
        p_model.add_argument("--qsl", action="store_true", help="emit QSL and window series")
        _add_output_flags(p_model)
        p_model.set_defaults(handler=_cmd_dynamics)

    p_rep = sub.add_parser("reproduce", help="emit figure-style CSV data sets")
    p_rep.add_argument("figure", choices=_FIGURE_IDS)
    p_rep.add_argument("--out", metavar="DIR", default=".")
    p_rep.set_defaults(handler=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:  # pragma: no cover - console-script shim
    sys.exit(main())
