"""Command-line interface.

Subcommands: ``transform``, ``compare-oracle``, ``sweep-contrast``,
``hybrid``, ``synth`` and ``line-scan``.  Exit codes: 0 success, 1 compute
or I/O failure, 2 usage error.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io, synth
from .analytic import compare_oracle, pst_smallphase
from .config import PRESETS, PstConfig
from .detectors import HybridPolicy, hybrid, normalize_robust, smooth_derivative, threshold
from .errors import InvalidParameterError, PhaseStretchError
from .kernel import cutoff_to_sigma, phase_profile, taylor_coeffs
from .spectral import freq_grid_1d
from .transform import FeatureMap, ImageF, default_pad_width, pst1d, pst2d

# peak phase (rad) used by --strength-scale small
SMALL_PHASE = 0.05
DEFAULT_SIGMA = 2.0


class UsageError(Exception):
    pass


# -- argument parsing -------------------------------------------------------

def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _lpf_value(text):
    if text.lower() in ("none", "off", "0"):
        return 0.0
    return float(text)


def _strength_scale(text):
    if text in ("raw", "small"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'raw', 'small' or a number")


def _pst_options(scale_default="raw"):
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("PST parameters")
    g.add_argument("--preset", choices=sorted(PRESETS), help="published warp/strength pair")
    g.add_argument("--warp", type=float)
    g.add_argument("--strength", type=float)
    g.add_argument("--strength-scale", type=_strength_scale, default=scale_default,
                   help="'raw', 'small' (peak phase %.2g rad) or a multiplier" % SMALL_PHASE)
    g.add_argument("--lpf", type=_lpf_value, default=None,
                   help="localization kernel size; 'none' disables it")
    g.add_argument("--lpf-domain", choices=("freq", "spatial"), default="spatial",
                   help="read --lpf as a frequency cutoff or a spatial sigma in px")
    g.add_argument("--pad", choices=("mirror", "periodic", "zero"), default=None)
    g.add_argument("--pad-width", type=int, default=None)
    g.add_argument("--order", type=int, default=None, help="Taylor order M of the oracle")
    g.add_argument("--eps", type=float, default=None)
    g.add_argument("--q-lo", type=float, default=None)
    g.add_argument("--q-hi", type=float, default=None)
    g.add_argument("--sigma", type=float, default=None,
                   help="derivative-of-Gaussian sigma in px (defaults to the spatial lpf sigma or 2)")
    g.add_argument("--config", help="JSON file with PstConfig fields and/or 'preset'")
    return p


def _output_options():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("outputs")
    g.add_argument("--report", help="write a JSON report here ('-' for stdout)")
    g.add_argument("--figure", help="render a figure to this file")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="phasestretch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    pst = _pst_options()
    out = _output_options()

    p = sub.add_parser("transform", parents=[pst, out],
                       help="run a detector on an image or 1D signal")
    p.add_argument("--method", choices=("pst", "derivative", "hybrid", "oracle"), default="pst")
    p.add_argument("--in", dest="input", default="-", help="PGM/PNG image or CSV signal ('-' = stdin)")
    p.add_argument("--out", default=None, help="feature map (PGM/PNG) or signal CSV ('-' = stdout)")
    p.add_argument("--mask-out", default=None, help="binary threshold map (PGM) or CSV")
    p.add_argument("--percentile", type=float, default=0.99)

    p = sub.add_parser("compare-oracle", parents=[_pst_options("small"), out],
                       help="numerical PST vs the closed-form small-phase oracle (1D)")
    p.add_argument("--in", dest="input", default=None, help="CSV signal (default: synthetic pulse)")
    p.add_argument("--out", default=None, help="table CSV: input, numerical, analytic")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--pulse-width", type=float, default=128.0)
    p.add_argument("--base", type=float, default=0.2)
    p.add_argument("--amplitude", type=float, default=0.6)
    p.add_argument("--edge-sigma", type=float, default=2.0)

    p = sub.add_parser("sweep-contrast", parents=[pst, out],
                       help="PST vs derivative on steps of increasing contrast")
    p.add_argument("--in", dest="input", default=None, help="CSV signal with ground truth metadata")
    p.add_argument("--out", default=None, help="table CSV: input, pst, derivative")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--contrasts", type=_float_list, default=[0.05, 0.1, 0.2])
    p.add_argument("--base", type=float, default=0.3)
    p.add_argument("--edge-sigma", type=float, default=1.0)

    p = sub.add_parser("hybrid", parents=[pst, out],
                       help="combine PST and derivative maps on an image")
    p.add_argument("--in", dest="input", default=None, help="image (default: HDR test card)")
    p.add_argument("--out", default=None, help="hybrid feature map (PGM/PNG)")
    p.add_argument("--percentile", type=float, default=0.99)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)

    p = sub.add_parser("synth", parents=[out], help="generate a synthetic input")
    p.add_argument("kind", choices=("pulse", "staircase", "hdr-card"))
    p.add_argument("--out", default="-")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--center", type=float, default=None)
    p.add_argument("--pulse-width", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=0.6)
    p.add_argument("--base", type=float, default=None)
    p.add_argument("--contrasts", type=_float_list, default=[0.05, 0.1, 0.2])
    p.add_argument("--edge-sigma", type=float, default=None)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--depth", type=int, default=14, help="PGM bit depth for hdr-card")
    p.add_argument("--noise", type=float, default=0.0, help="additive Gaussian noise std")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("line-scan", parents=[pst, out],
                       help="one image row with its PST and derivative responses")
    p.add_argument("--in", dest="input", default=None, help="image (default: HDR test card)")
    p.add_argument("--row", type=int, default=None)
    p.add_argument("--out", default=None, help="table CSV: input, pst, derivative")
    return parser


# -- configuration ----------------------------------------------------------

_FLAG_FIELDS = {
    "pad": "pad_mode", "pad_width": "pad_width", "order": "order",
    "eps": "eps", "q_lo": "q_lo", "q_hi": "q_hi",
}


def resolve_config(args, image_input=False):
    """Merge --config, --preset and explicit flags into a :class:`PstConfig`.

    Images default to a spatial localization kernel of 2 px; signals to none.
    """
    fields = {}
    preset = None
    if args.config:
        data = json.loads(Path(args.config).read_text())
        preset = data.pop("preset", None)
        fields.update(data)
    if args.preset:
        preset = args.preset
    explicit = [f for f in ("warp", "strength") if getattr(args, f) is not None]
    if preset and (explicit or any(f in fields for f in ("warp", "strength"))):
        raise UsageError(f"--preset {preset} conflicts with an explicit warp/strength")
    if preset:
        if preset not in PRESETS:
            raise UsageError(f"unknown preset {preset!r}")
        fields["warp"], fields["strength"] = PRESETS[preset]
    for f in explicit:
        fields[f] = getattr(args, f)
    for flag, name in _FLAG_FIELDS.items():
        if getattr(args, flag) is not None:
            fields[name] = getattr(args, flag)
    if args.lpf is not None:
        fields["lpf"] = args.lpf or None
        fields["lpf_domain"] = args.lpf_domain
    elif "lpf" not in fields and image_input:
        fields["lpf"], fields["lpf_domain"] = DEFAULT_SIGMA, "spatial"
    unknown = set(fields) - set(PstConfig.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown config fields: {sorted(unknown)}")
    cfg = PstConfig(**fields)
    scale = args.strength_scale
    if scale == "small":
        cfg = cfg.replace(strength=SMALL_PHASE)
    elif scale != "raw":
        cfg = cfg.replace(strength=cfg.strength * scale)
    return cfg


def derivative_sigma(args, cfg):
    if args.sigma is not None:
        return args.sigma
    if cfg.lpf is not None:
        return cfg.lpf if cfg.lpf_domain == "spatial" else cutoff_to_sigma(cfg.lpf)
    return DEFAULT_SIGMA


def oracle_coeffs(n, cfg):
    """Taylor coefficients matching the kernel ``pst1d`` builds for ``n`` samples."""
    width = default_pad_width((n,))[0] if cfg.pad_width is None else cfg.pad_width
    r_max = freq_grid_1d(n + 2 * width).r_max
    return taylor_coeffs(cfg.warp, cfg.strength, r_max, cfg.order)


# -- inputs -----------------------------------------------------------------

def load_input(src):
    """Return ``(samples or ImageF, ground truth or None)`` for any supported input."""
    data = io._read_bytes(src)
    kind = io.sniff(data)
    if kind == "pgm":
        img = io.read_pgm(data)
        meta = io.comment_metadata(img.comments)
    elif kind == "png":
        img, meta = io.read_png(data), {}
    else:
        img, meta = io.parse_signal_csv(data.decode("utf-8"))
    truth = meta.get("groundtruth")
    return img, (synth.EdgeGroundTruth.from_dict(truth) if truth else None)


def _image_input(args):
    if args.input is None:
        return synth.hdr_testcard(getattr(args, "width", 256), getattr(args, "height", 256))
    img, truth = load_input(args.input)
    if not isinstance(img, ImageF):
        raise InvalidParameterError("this command needs an image input")
    return img, truth


def _emit_report(args, report):
    if getattr(args, "report", None):
        io.write_report(args.report, report)


# -- commands ---------------------------------------------------------------

def _edge_summary(fmap, truth, contrasts=True):
    rows = synth.edge_table(fmap, truth)
    summary = {"edges": rows}
    if contrasts and rows:
        con = [r["contrast"] for r in rows]
        summary["peak_proportionality_deviation"] = synth.proportionality_deviation(
            [r["peak"] for r in rows], con)
        summary["swing_proportionality_deviation"] = synth.proportionality_deviation(
            [r["swing"] for r in rows], con)
    return summary


def cmd_transform(args):
    inp, truth = load_input(args.input)
    is_image = isinstance(inp, ImageF)
    x = inp.samples if is_image else np.asarray(inp)
    cfg = resolve_config(args, image_input=is_image)
    sigma = derivative_sigma(args, cfg)
    report = {"command": "transform", "method": args.method, "config": cfg.to_dict(),
              "shape": list(x.shape)}
    if args.method == "oracle":
        if x.ndim != 1:
            raise InvalidParameterError("the oracle method supports 1D signals only")
        values = pst_smallphase(x, oracle_coeffs(x.size, cfg), cfg.eps)
        fmap = FeatureMap(values, "oracle")
        report["taylor_coeffs"] = list(oracle_coeffs(x.size, cfg).coeffs)
    elif args.method == "pst":
        fmap = pst2d(x, cfg) if is_image else FeatureMap(pst1d(x, cfg), "pst")
    elif args.method == "derivative":
        fmap = smooth_derivative(x, sigma)
        report["sigma"] = sigma
    else:
        p = pst2d(x, cfg) if is_image else FeatureMap(pst1d(x, cfg), "pst")
        fmap = hybrid(p, smooth_derivative(x, sigma), HybridPolicy(args.percentile))
        report["sigma"] = sigma
    finite = np.isfinite(fmap.values)
    report["value_range"] = [float(fmap.values[finite].min()), float(fmap.values[finite].max())]
    if args.out:
        if is_image:
            report["scaling"] = io.save_image(fmap, args.out)
        else:
            io.write_signal_csv(args.out, fmap.values)
    if args.mask_out:
        mask = threshold(np.nan_to_num(fmap.values), cfg.q_lo, cfg.q_hi)
        report["mask_count"] = int(mask.sum())
        if is_image:
            io.save_image(ImageF(mask.astype(float)), args.mask_out, depth=8)
        else:
            io.write_signal_csv(args.mask_out, mask.astype(float))
    if truth is not None:
        report.update(_edge_summary(np.nan_to_num(fmap.values), truth, contrasts=not is_image))
    if args.figure:
        from . import plotting
        if is_image:
            plotting.maps_figure(args.figure, x, {args.method: fmap.values})
        else:
            plotting.sweep_figure(args.figure, x, fmap.values, np.zeros_like(x))
    _emit_report(args, report)


def cmd_compare_oracle(args):
    if args.input is None and args.preset is None and args.warp is None and not args.config:
        args.preset = "fig2"
    cfg = resolve_config(args)
    if args.input is None:
        x, _ = synth.smooth_pulse(args.n, width=args.pulse_width, amplitude=args.amplitude,
                                  base=args.base, sigma=args.edge_sigma)
    else:
        x, _ = load_input(args.input)
        x = np.asarray(x, dtype=float)
    numerical = pst1d(x, cfg)
    coeffs = oracle_coeffs(x.size, cfg)
    analytic = pst_smallphase(x, coeffs, cfg.eps)
    result = compare_oracle(numerical, analytic)
    if args.out:
        io.write_table_csv(args.out, {"input": x, "numerical": numerical, "analytic": analytic})
    if args.figure:
        from . import plotting
        u = freq_grid_1d(x.size).u
        plotting.oracle_figure(args.figure, x, numerical, analytic, u,
                               phase_profile(np.abs(u), cfg.warp, cfg.strength, 0.5))
    _emit_report(args, {"command": "compare-oracle", "config": cfg.to_dict(),
                        "taylor_coeffs": list(coeffs.coeffs), "n": int(x.size),
                        **result.to_dict()})


def cmd_sweep_contrast(args):
    if args.preset is None and args.warp is None and not args.config:
        args.preset = "fig3-4"
    cfg = resolve_config(args)
    if args.input is None:
        x, truth = synth.staircase(args.n, args.contrasts, args.base, args.edge_sigma)
    else:
        x, truth = load_input(args.input)
        x = np.asarray(x, dtype=float)
        if truth is None:
            raise InvalidParameterError("sweep-contrast input needs ground-truth metadata")
    sigma = derivative_sigma(args, cfg)
    p = pst1d(x, cfg)
    d = smooth_derivative(x, sigma).values
    if args.out:
        io.write_table_csv(args.out, {"input": x, "pst": p, "derivative": d})
    if args.figure:
        from . import plotting
        plotting.sweep_figure(args.figure, x, p, d)
    _emit_report(args, {"command": "sweep-contrast", "config": cfg.to_dict(), "sigma": sigma,
                        "pst": _edge_summary(p, truth), "derivative": _edge_summary(d, truth)})


def _region_stats(maps, truth):
    regions = sorted({e.region for e in truth if e.region})
    stats = {}
    for name, m in maps.items():
        stats[name] = {"min_all": synth.edge_minimum(m, truth)}
        for r in regions:
            sub = truth.region(r)
            stats[name][f"min_{r}"] = synth.edge_minimum(m, sub)
            stats[name][f"mean_{r}"] = float(np.mean(synth.edge_peaks(m, sub)))
    return stats


def cmd_hybrid(args):
    img, truth = _image_input(args)
    if args.preset is None and args.warp is None and not args.config:
        args.preset = "fig3-4"
    cfg = resolve_config(args, image_input=True)
    sigma = derivative_sigma(args, cfg)
    policy = HybridPolicy(args.percentile)
    p = pst2d(img, cfg)
    d = smooth_derivative(img, sigma)
    h = hybrid(p, d, policy)
    report = {"command": "hybrid", "config": cfg.to_dict(), "sigma": sigma,
              "percentile": policy.percentile, "shape": list(img.shape)}
    if args.out:
        report["scaling"] = io.save_image(h, args.out)
    maps = {"pst": normalize_robust(p, policy.percentile).values,
            "derivative": normalize_robust(d, policy.percentile).values,
            "hybrid": h.values}
    if truth is not None and len(truth):
        report["edge_stats"] = _region_stats(maps, truth)
    if args.figure:
        from . import plotting
        plotting.maps_figure(args.figure, img.samples, maps)
    _emit_report(args, report)


def cmd_synth(args):
    meta = {}
    if args.kind == "pulse":
        base = 0.2 if args.base is None else args.base
        x, truth = synth.smooth_pulse(args.n, args.center, args.pulse_width, args.amplitude,
                                      base, args.edge_sigma or 0.0)
    elif args.kind == "staircase":
        base = 0.3 if args.base is None else args.base
        x, truth = synth.staircase(args.n, args.contrasts, base,
                                   1.0 if args.edge_sigma is None else args.edge_sigma)
    else:
        img, truth = synth.hdr_testcard(args.width, args.height,
                                        1.0 if args.edge_sigma is None else args.edge_sigma)
        x = img.samples
    if args.noise:
        x = synth.add_noise(x, args.noise, args.seed)
        meta["noise"] = {"std": args.noise, "seed": args.seed}
    meta["groundtruth"] = truth.to_dict()
    if x.ndim == 1:
        io.write_signal_csv(args.out, x, metadata=meta)
    else:
        comments = tuple(io.metadata_comment(k, v) for k, v in sorted(meta.items()))
        io.save_image(ImageF(x, args.depth, comments), args.out)
    if args.figure:
        from . import plotting
        if x.ndim == 1:
            plotting.sweep_figure(args.figure, x, np.zeros_like(x), np.zeros_like(x))
        else:
            plotting.maps_figure(args.figure, x, {})
    _emit_report(args, {"command": "synth", "kind": args.kind, "shape": list(x.shape),
                        "n_edges": len(truth)})


def cmd_line_scan(args):
    img, truth = _image_input(args)
    row = img.height * 3 // 4 if args.row is None else args.row
    cfg = resolve_config(args, image_input=True)
    sigma = derivative_sigma(args, cfg)
    p = pst2d(img, cfg)
    d = smooth_derivative(img, sigma)
    scan = synth.line_scan(img, row)
    p_row = synth.line_scan(p.values, row)
    d_row = synth.line_scan(d.values, row)
    if args.out:
        io.write_table_csv(args.out, {"input": scan, "pst": p_row, "derivative": d_row})
    if args.figure:
        from . import plotting
        plotting.line_scan_figure(args.figure, scan,
                                  normalize_robust(p_row).values,
                                  normalize_robust(d_row).values, row)
    _emit_report(args, {"command": "line-scan", "row": row, "config": cfg.to_dict(),
                        "sigma": sigma,
                        "input_range": [float(scan.min()), float(scan.max())],
                        "pst_peak": float(np.abs(p_row).max()),
                        "derivative_peak": float(np.abs(d_row).max())})


COMMANDS = {
    "transform": cmd_transform,
    "compare-oracle": cmd_compare_oracle,
    "sweep-contrast": cmd_sweep_contrast,
    "hybrid": cmd_hybrid,
    "synth": cmd_synth,
    "line-scan": cmd_line_scan,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "preset", None) and (args.warp is not None or args.strength is not None):
        parser.error(f"--preset {args.preset} conflicts with an explicit --warp/--strength")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (PhaseStretchError, OSError, json.JSONDecodeError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
