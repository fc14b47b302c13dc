"""Double-slit trace simulation, spectral analysis and apparatus audit from the command line.

Exit codes: 0 success, 1 audit with failing checks, 2 unusable input or
output (missing files, malformed CSV, no fringes, unwritable directory).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from slitaudit import audit as audit_mod
from slitaudit import fileio, geometry, spectral, synthesis
from slitaudit.fringe_metrics import (
    visibility_elevation_corrected,
    visibility_extrema,
    visibility_from_coherence,
    visibility_from_r,
    visibility_from_r_envelope,
)

OUT_ENV = "SLITAUDIT_OUT"
REFERENCE_K_MIN = 10

log = logging.getLogger("slitaudit")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="apparatus config (TOML with unit strings)")
    common.add_argument("--trace", type=Path, help="trace CSV (pixel_index,intensity)")
    common.add_argument("--features", type=Path, help="observed-features override (TOML)")
    common.add_argument("--out", type=Path, default=None, help=f"output directory (default ${OUT_ENV} or .)")
    common.add_argument("--plots", action="store_true", help="also write SVG figures")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--a", dest="A", type=float, default=None, help="extended-envelope coefficient A")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="slitaudit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="write a synthetic trace CSV")
    sim.add_argument("--reference", action="store_true", help="angular textbook simulation, 10004 points")
    sim.add_argument("--v", dest="V", type=float, default=1.0, help="fringe visibility")
    sim.add_argument("--i0", type=float, default=787.0)
    sim.add_argument("--idc", type=float, default=0.0, help="detector offset")
    sim.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma")
    sim.add_argument("--model", choices=("exact", "window"), default="exact")
    sim.add_argument("--k", dest="K", type=float, default=None, help="window-model fringe wavenumber")

    sub.add_parser("spectrum", parents=[common], help="power spectrum of a trace")
    vis = sub.add_parser("visibility", parents=[common], help="visibility estimates")
    vis.add_argument("--i1", type=float)
    vis.add_argument("--i2", type=float)
    vis.add_argument("--gamma", type=float)
    sub.add_parser("audit", parents=[common], help="audit a trace or features against a config")
    sub.add_parser("fit", parents=[common], help="fit the extended-envelope coefficient A")
    sub.add_parser("report", parents=[common], help="audit plus spectrum, visibility and figures")
    return parser


def _out_dir(args) -> Path:
    out = args.out or Path(os.environ.get(OUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(args, *names):
    for name in names:
        path = getattr(args, name)
        if path is None:
            raise fileio.InputError(f"--{name} is required for '{args.command}'")
        if not path.is_file():
            raise FileNotFoundError(f"--{name}: no such file: {path}")


def _write(out: Path, name: str, text: str) -> Path:
    path = fileio.atomic_write(out / name, text)
    log.info("wrote %s", path)
    return path


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    if args.reference:
        trace = synthesis.simulate_reference()
        name = "reference"
    else:
        _require(args, "config")
        config = fileio.load_config(args.config)
        if args.model == "exact":
            trace = synthesis.exact_trace(
                config, I0=args.i0, V=args.V, I_DC=args.idc, noise_sigma=args.noise, rng_seed=args.seed
            )
        else:
            K = args.K if args.K is not None else round(config.pixel_count / geometry.fringe_spacing(config)[1])
            A = args.A or 0.0
            params = synthesis.SynthesisParams(
                I0=args.i0,
                V=args.V,
                K=K,
                I_DC=args.idc,
                envelope="extended" if A else "raised-cosine",
                A=A,
                noise_sigma=args.noise,
                rng_seed=args.seed,
            )
            trace = synthesis.synthesize_trace(params, config.pixel_count, config.pixel_pitch)
        name = "trace"
    _write(out, f"{name}.csv", fileio.trace_to_csv(trace))
    if args.plots:
        from slitaudit.plotting import plot_trace

        plot_trace(trace, out / f"{name}.svg", title=name)
    return 0


def _peak(trace, spectrum) -> int:
    if trace.unit == "rad":
        return spectral.detect_interference_peak(spectrum, REFERENCE_K_MIN)[0]
    try:
        features = audit_mod.extract_features(trace)
        return features.fft_peak_k
    except audit_mod.FeatureError:
        return spectral.detect_interference_peak(spectrum)[0]


def cmd_spectrum(args) -> int:
    _require(args, "trace")
    out = _out_dir(args)
    trace = fileio.read_trace(args.trace)
    spectrum = spectral.power_spectrum(trace)
    k = _peak(trace, spectrum)
    _write(out, "spectrum.csv", fileio.spectrum_to_csv(spectrum))
    print(f"interference peak: wavenumber {k} (frequency {spectrum.frequencies[k]:.6g}), power {spectrum[k]:.6g}")
    if spectrum.powers[1] > 0:
        print(f"R = P_K/P_1 = {spectral.r_statistic(spectrum, k):.6g}")
    if args.plots:
        from slitaudit.plotting import plot_spectrum

        plot_spectrum(spectrum, out / "spectrum.svg", mark_k=k, max_k=min(len(spectrum.powers) - 1, 4 * k))
    return 0


def _features(args):
    if args.features is not None:
        _require(args, "features")
        return fileio.load_features(args.features), None, None
    _require(args, "trace")
    trace = fileio.read_trace(args.trace)
    features = audit_mod.extract_features(trace)
    return features, trace, spectral.power_spectrum(trace)


def visibility_estimates(features, A=None, i1=None, i2=None, gamma=None) -> list:
    """Every visibility estimate the available inputs allow."""
    A = features.envelope_A if A is None else A
    estimates = [visibility_extrema(features.i_max, features.i_min)]
    if features.i_max > features.i_elev and features.i_min >= features.i_elev:
        estimates.append(visibility_elevation_corrected(features.i_max, features.i_min, features.i_elev))
    if features.r_value is not None:
        estimates.append(visibility_from_r(features.r_value))
        estimates.append(visibility_from_r_envelope(features.r_value, A))
    if None not in (i1, i2, gamma):
        estimates.append(visibility_from_coherence(i1, i2, gamma))
    return estimates


def cmd_visibility(args) -> int:
    out = _out_dir(args)
    features, _, _ = _features(args)
    estimates = visibility_estimates(features, args.A, args.i1, args.i2, args.gamma)
    for e in estimates:
        print(f"{e.method:20s} V = {e.value:.4f}{'  (clamped)' if e.clamped else ''}")
    _write(out, "visibility.json", fileio.to_json({"estimates": [e.to_dict() for e in estimates]}))
    return 0


def _run_audit(args, out: Path):
    _require(args, "config")
    config = fileio.load_config(args.config)
    features, trace, spectrum = _features(args)
    report = audit_mod.audit(config, features, envelope_A=args.A, spectrum=spectrum)
    _write(out, "audit.json", fileio.to_json(report.to_dict()))
    _write(out, "audit.txt", report.to_text())
    print(report.to_text(), end="")
    return report, features, trace, spectrum


def cmd_audit(args) -> int:
    report, *_ = _run_audit(args, _out_dir(args))
    return 0 if report.passed else 1


def cmd_fit(args) -> int:
    _require(args, "trace")
    out = _out_dir(args)
    trace = fileio.read_trace(args.trace)
    fit = audit_mod.fit_envelope_A(trace)
    print(f"A = {fit.A:.4f}  rms residual = {fit.residual:.4g}{'  (warn: no improvement)' if fit.warn else ''}")
    _write(out, "fit.json", fileio.to_json(fit.to_dict()))
    return 0


def cmd_report(args) -> int:
    from slitaudit.plotting import plot_spectrum, plot_trace

    out = _out_dir(args)
    report, features, trace, spectrum = _run_audit(args, out)
    estimates = visibility_estimates(features, args.A)
    _write(out, "visibility.json", fileio.to_json({"estimates": [e.to_dict() for e in estimates]}))
    if trace is not None:
        _write(out, "spectrum.csv", fileio.spectrum_to_csv(spectrum))
        fit = audit_mod.fit_envelope_A(trace)
        _write(out, "fit.json", fileio.to_json(fit.to_dict()))
        plot_trace(trace, out / "trace.svg", title="intensity trace", features=features)
        k = features.fft_peak_k
        plot_spectrum(spectrum, out / "spectrum.svg", title="power spectrum", mark_k=k, max_k=min(len(spectrum.powers) - 1, 4 * k))
    return 0 if report.passed else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "visibility": cmd_visibility,
    "audit": cmd_audit,
    "fit": cmd_fit,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        print(f"slitaudit {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
