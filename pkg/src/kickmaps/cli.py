"""Command-line front end.

    kickmaps butterfly --map khm --k-over-h 1 --l-over-h 1 --farey 30 -o fig1_khm.csv
    kickmaps evolve --map dkrm-res --hbar-tilde 26pi/41 --k1 1 --k2 1 --kicks 10000 -o var.csv
    kickmaps compare --hbar0 26pi/41 -o compare.csv
    kickmaps butterfly --figure 1 -o fig1.csv

Exit status: 0 success, 2 configuration error, 3 numerical failure.
Set KICKMAPS_WORKERS to fan butterfly sweeps out over processes.
"""

import argparse
from dataclasses import asdict
from fractions import Fraction
import logging
import math
from pathlib import Path
import re
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .classical import ClassicalState, HarperState, trajectory
from .dynamics import (
    MAX_WINDOW,
    diffusion_exponent,
    evolve_from_basis,
    modal_width,
    snapshot_widths,
)
from .errors import KickMapsError, NumericalError, ParameterError
from .floquet import KHM, DKRMGeneral, DKRMResonant
from .fractal import convergents, default_scales, dq_estimate
from .spectrum import (
    RatioFamily,
    RationalPlanck,
    band_structure,
    butterfly,
    compare_spectra,
    farey,
    max_bandwidth,
)
from .tables import write_sidecar, write_table

log = logging.getLogger("kickmaps")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
SNAP_B_MAX = 200

_PI_LITERAL = re.compile(r"^\s*([0-9]*\.?[0-9]*)\s*\*?\s*pi\s*(?:/\s*([0-9]*\.?[0-9]+))?\s*$")


class ConfigError(KickMapsError):
    pass


def parse_hbar(text):
    """'26pi/41', 'pi', '4pi' or a decimal -> (value, exact hbar/2pi Fraction or None)."""
    text = str(text).strip().lower()
    m = _PI_LITERAL.match(text)
    if m:
        num = m.group(1) or "1"
        den = m.group(2) or "1"
        try:
            frac = Fraction(num) / Fraction(den)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"cannot parse hbar literal {text!r}")
        return float(frac) * math.pi, frac / 2
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"cannot parse hbar value {text!r}")
    return value, None


def rational_planck(text, snaps):
    """Exact RationalPlanck for spectral commands; decimals snap to a convergent."""
    value, frac = parse_hbar(text)
    if frac is None:
        x = value / (2 * math.pi)
        whole = math.floor(x)
        if x - whole < 1e-12:
            frac = Fraction(int(whole))
        else:
            conv = convergents(x - whole, SNAP_B_MAX)
            frac = whole + (conv[-1].fraction if conv else Fraction(0))
        snaps.append({"input": text, "value": value, "snapped": f"{frac.numerator}/{frac.denominator}",
                      "snapped_value": float(frac) * 2 * math.pi})
    try:
        return RationalPlanck.from_fraction(frac)
    except ParameterError as exc:
        raise ConfigError(str(exc))


HBAR0 = "26pi/41"
HBAR0_MIRROR = "56pi/41"

PRESETS = {
    ("butterfly", 1): [
        ("khm", {"map": "khm", "k_over_h": 1.0, "l_over_h": 1.0, "farey": 30}),
        ("dkrm", {"map": "dkrm-res", "k1": 1.0, "k2": 1.0, "farey": 30}),
    ],
    ("bands", 2): [
        ("dkrm_hbar0", {"map": "dkrm-res", "hbar_tilde": HBAR0, "k1": 1.0, "k2": 1.0}),
        ("khm_hbar0", {"map": "khm", "hbar": HBAR0, "k_over_h": 1.0, "l_over_h": 1.0}),
        ("dkrm_mirror", {"map": "dkrm-res", "hbar_tilde": HBAR0_MIRROR, "k1": 1.0, "k2": 1.0}),
        ("khm_mirror", {"map": "khm", "hbar": HBAR0_MIRROR, "k_over_h": 1.0, "l_over_h": 1.0}),
    ],
    ("compare", 2): [("fig2", {"hbar0": HBAR0, "k_over_h": 1.0, "l_over_h": 1.0})],
    ("evolve", 3): [
        ("dkrm_hbar0", {"map": "dkrm-res", "hbar_tilde": HBAR0, "k1": 1.0, "k2": 1.0, "kicks": 10000}),
        ("dkrm_mirror", {"map": "dkrm-res", "hbar_tilde": HBAR0_MIRROR, "k1": 1.0, "k2": 1.0, "kicks": 10000}),
        ("khm_hbar0", {"map": "khm", "hbar": HBAR0, "k_over_h": 1.0, "l_over_h": 1.0, "kicks": 10000}),
        ("khm_mirror", {"map": "khm", "hbar": HBAR0_MIRROR, "k_over_h": 1.0, "l_over_h": 1.0, "kicks": 10000}),
    ],
    ("evolve", 4): [
        ("dkrm", {"map": "dkrm-res", "hbar_tilde": "2", "Kt1": 3.7, "Kt2": 3.7, "kicks": 1000,
                  "snapshot_at": [100, 250, 500, 1000]}),
        ("khm", {"map": "khm", "hbar": "2", "K": 3.7, "L": 3.7, "kicks": 1000,
                 "snapshot_at": [100, 250, 500, 1000]}),
    ],
}

DEFAULTS = {
    "map": None, "k_over_h": None, "l_over_h": None, "K": None, "L": None, "hbar": None,
    "hbar_tilde": None, "k1": None, "k2": None, "Kt1": None, "Kt2": None,
    "K1": None, "K2": None, "T": None, "eta": None,
    "farey": 30, "n_beta": 64, "kicks": 1000, "N": 1024, "max_N": MAX_WINDOW, "m0": 0,
    "snapshot_at": [], "hbar0": HBAR0, "b_max": 100, "q": [0.0, 1.0, 2.0],
    "variant": "dkrm", "q0": 1.0, "p0": 0.5, "steps": 1000, "precision": "extended",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="kickmaps", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"kickmaps {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output table path (default: <command>.<format>)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--figure", type=int, choices=[1, 2, 3, 4],
                        help="load the parameter sets of a reproduced figure")
    common.add_argument("-v", "--verbose", action="store_true")

    mapopts = argparse.ArgumentParser(add_help=False)
    g = mapopts.add_argument_group("map parameters")
    g.add_argument("--map", choices=["khm", "dkrm-res", "dkrm-gen"])
    g.add_argument("--k-over-h", dest="k_over_h", type=float, help="KHM K/hbar")
    g.add_argument("--l-over-h", dest="l_over_h", type=float, help="KHM L/hbar")
    g.add_argument("--K", type=float, help="KHM K (absolute)")
    g.add_argument("--L", type=float, help="KHM L (absolute)")
    g.add_argument("--hbar", help="hbar for khm / dkrm-gen, e.g. 26pi/41 or 2.0")
    g.add_argument("--hbar-tilde", dest="hbar_tilde", help="hbar_tilde = eta hbar for dkrm-res")
    g.add_argument("--k1", type=float, help="dkrm-res reduced strength Kt1/hbar_tilde")
    g.add_argument("--k2", type=float, help="dkrm-res reduced strength Kt2/hbar_tilde")
    g.add_argument("--Kt1", type=float, help="dkrm-res rescaled strength Kt1 = eta K1")
    g.add_argument("--Kt2", type=float, help="dkrm-res rescaled strength Kt2 = eta K2")
    g.add_argument("--K1", type=float, help="dkrm-gen first kick strength")
    g.add_argument("--K2", type=float, help="dkrm-gen second kick strength")
    g.add_argument("--T", type=float, help="dkrm-gen period")
    g.add_argument("--eta", type=float, help="dkrm-gen delay of the second kick")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("butterfly", parents=[common, mapopts], help="Farey sweep of Bloch spectra")
    p.add_argument("--farey", type=int, help="largest denominator b (default 30)")
    p.add_argument("--n-beta", dest="n_beta", type=int, help="Bloch angles per rational (default 64)")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("bands", parents=[common, mapopts], help="band summary at one rational hbar")
    p.add_argument("--n-beta", dest="n_beta", type=int)

    p = sub.add_parser("evolve", parents=[common, mapopts], help="kick-by-kick dynamics from |m0>")
    p.add_argument("--kicks", type=int)
    p.add_argument("--N", type=int, help="initial window size (doubled on overflow)")
    p.add_argument("--max-N", dest="max_N", type=int)
    p.add_argument("--m0", type=int)
    p.add_argument("--snapshot-at", dest="snapshot_at", type=int, nargs="*")
    p.add_argument("--precision", choices=["extended", "double"],
                   help="FFT precision (default extended; double is faster)")

    p = sub.add_parser("dq", parents=[common, mapopts], help="fractal dimensions at convergents")
    p.add_argument("--b-max", dest="b_max", type=int)
    p.add_argument("--q", type=float, nargs="+")
    p.add_argument("--n-beta", dest="n_beta", type=int)

    p = sub.add_parser("classical", parents=[common], help="classical phase-space orbits")
    p.add_argument("--variant", choices=["dkrm", "harper"])
    p.add_argument("--Kt1", type=float, default=None)
    p.add_argument("--Kt2", type=float, default=None)
    p.add_argument("--q0", type=float)
    p.add_argument("--p0", type=float)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("compare", parents=[common, mapopts], help="hbar0 <-> 2pi - hbar0 spectral comparison")
    p.add_argument("--hbar0")
    p.add_argument("--n-beta", dest="n_beta", type=int)
    return parser


def resolve(args, preset):
    """Merge defaults < figure preset < explicit flags."""
    cfg = dict(DEFAULTS)
    cfg.update(preset)
    for key, value in vars(args).items():
        if key in ("command", "output", "format", "figure", "verbose", "workers"):
            continue
        if value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    return cfg


def _need(cfg, *names):
    missing = [n for n in names if cfg.get(n) is None]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join('--' + n.replace('_', '-') for n in missing)}")


def map_spec(cfg, snaps, spectral):
    """(spec, planck or None) from resolved options."""
    kind = cfg["map"]
    if kind is None:
        raise ConfigError("--map is required")
    if kind == "khm":
        _need(cfg, "hbar")
        value, _ = parse_hbar(cfg["hbar"])
        planck = rational_planck(cfg["hbar"], snaps) if spectral else None
        h = planck.value if planck else value
        if cfg["k_over_h"] is not None or cfg["l_over_h"] is not None:
            _need(cfg, "k_over_h", "l_over_h")
            return KHM.from_ratios(cfg["k_over_h"], cfg["l_over_h"], h), planck
        _need(cfg, "K", "L")
        return KHM(cfg["K"], cfg["L"], h), planck
    if kind == "dkrm-res":
        _need(cfg, "hbar_tilde")
        value, _ = parse_hbar(cfg["hbar_tilde"])
        planck = rational_planck(cfg["hbar_tilde"], snaps) if spectral else None
        h = planck.value if planck else value
        if cfg["k1"] is not None or cfg["k2"] is not None:
            _need(cfg, "k1", "k2")
            return DKRMResonant(h, cfg["k1"], cfg["k2"]), planck
        _need(cfg, "Kt1", "Kt2")
        return DKRMResonant.from_scaled(cfg["Kt1"], cfg["Kt2"], h), planck
    _need(cfg, "K1", "K2", "hbar", "T", "eta")
    value, _ = parse_hbar(cfg["hbar"])
    spec = DKRMGeneral(cfg["K1"], cfg["K2"], value, cfg["T"], cfg["eta"])
    if not spectral:
        return spec, None
    reduced = spec.reduced()
    planck = rational_planck(repr(reduced.hbar_tilde), snaps)
    return DKRMResonant(planck.value, reduced.k1, reduced.k2), planck


def _family(cfg):
    kind = cfg["map"]
    if kind == "khm":
        _need(cfg, "k_over_h", "l_over_h")
        return RatioFamily("khm", cfg["k_over_h"], cfg["l_over_h"])
    if kind == "dkrm-res":
        _need(cfg, "k1", "k2")
        return RatioFamily("dkrm", cfg["k1"], cfg["k2"])
    raise ConfigError("butterfly sweeps need --map khm or dkrm-res with strength ratios")


def run_butterfly(cfg, out, fmt, snaps, workers):
    family = _family(cfg)
    rows = butterfly(family, farey(cfg["farey"]), cfg["n_beta"], workers=workers)
    write_table(out, ["a", "b", "hbar", "beta", "band_index", "epsilon"], rows, fmt)
    return {"n_points": len(rows), "family": repr(family)}


def run_bands(cfg, out, fmt, snaps, workers):
    spec, planck = map_spec(cfg, snaps, spectral=True)
    bs = band_structure(spec, planck, cfg["n_beta"])
    rows = [(planck.a, planck.b, i, lo, hi, w) for i, (lo, hi, w) in enumerate(bs.bands)]
    write_table(out, ["a", "b", "band_index", "eps_min", "eps_max", "width"], rows, fmt)
    return {"spec": asdict(spec), "period": bs.period, "n_bands": len(bs.bands),
            "max_bandwidth": max_bandwidth(bs)}


def run_evolve(cfg, out, fmt, snaps, workers):
    spec, _ = map_spec(cfg, snaps, spectral=False)
    kicks = cfg["kicks"]
    series = evolve_from_basis(spec, kicks, m0=cfg["m0"], N=cfg["N"], max_N=cfg["max_N"],
                               snapshot_at=cfg["snapshot_at"], precision=cfg["precision"])
    rows = list(zip(series.kicks, series.variance, series.survival))
    write_table(out, ["kick", "variance", "survival"], rows, fmt)
    snap_files = []
    out = Path(out)
    for k, m, P in series.snapshots:
        path = out.with_name(f"{out.stem}_snap{k}{out.suffix}")
        write_table(path, ["m", "P"], list(zip(m, P)), fmt)
        snap_files.append(str(path))
    info = {"spec": asdict(spec), "window": series.N, "snapshots": snap_files}
    if kicks >= 100:
        alpha, r2 = diffusion_exponent(series, (max(10, kicks // 5), kicks))
        info.update(alpha=alpha, alpha_fit_r2=r2, alpha_window=[max(10, kicks // 5), kicks])
    if series.snapshots:
        widths = snapshot_widths(series)
        info.update(staircase_modal_width=modal_width(widths), staircase_widths=widths)
    return info


def run_dq(cfg, out, fmt, snaps, workers):
    spec, _ = map_spec(cfg, snaps, spectral=False)
    x = (spec.planck / (2 * math.pi)) % 1.0
    convs = convergents(x, cfg["b_max"]) if x > 0 else []
    convs = [c for c in convs if c.b >= 3] or convs
    if not convs:
        raise ConfigError("no convergents with b <= --b-max")
    whole = int(spec.planck // (2 * math.pi))
    seq = []
    for conv in convs:
        planck = RationalPlanck.from_fraction(whole + conv.fraction)
        if isinstance(spec, KHM):
            s = KHM.from_ratios(spec.k, spec.l, planck.value)
        else:
            if isinstance(spec, DKRMGeneral):
                spec = spec.reduced()
            s = DKRMResonant(planck.value, spec.k1, spec.k2)
        bs = band_structure(s, planck, cfg["n_beta"], refine=False)
        pts = bs.points()
        for q in cfg["q"]:
            est = dq_estimate(pts, q, default_scales())
            seq.append((planck.a, planck.b, q, est.dq, est.fit_r2, min(est.scales_used), max(est.scales_used)))
    last_b = seq[-1][1]
    rows = [r[2:] for r in seq if r[1] == last_b]
    write_table(out, ["q", "dq", "fit_r2", "eps_min", "eps_max"], rows, fmt)
    out = Path(out)
    seq_path = out.with_name(f"{out.stem}_convergents{out.suffix}")
    write_table(seq_path, ["a", "b", "q", "dq", "fit_r2", "eps_min", "eps_max"], seq, fmt)
    return {"spec": asdict(spec), "convergent_table": str(seq_path)}


def run_classical(cfg, out, fmt, snaps, workers):
    _need(cfg, "Kt1", "Kt2")
    if cfg["variant"] == "dkrm":
        init, cols = ClassicalState(cfg["q0"], cfg["p0"]), ["step", "q", "p_tilde"]
        traj = [(s.q, s.p_tilde) for s in trajectory("dkrm", init, cfg["Kt1"], cfg["Kt2"], cfg["steps"])]
    else:
        init, cols = HarperState(cfg["q0"], cfg["p0"]), ["step", "Q", "P_tilde"]
        traj = [(s.Q, s.P_tilde) for s in trajectory("harper", init, cfg["Kt1"], cfg["Kt2"], cfg["steps"])]
    write_table(out, cols, [(i, a, b) for i, (a, b) in enumerate(traj)], fmt)
    return {}


def run_compare(cfg, out, fmt, snaps, workers):
    p0 = rational_planck(cfg["hbar0"], snaps)
    if p0.fraction >= 1:
        raise ConfigError("--hbar0 must lie below 2 pi")
    p1 = p0.mirror()
    k = 1.0 if cfg["k_over_h"] is None else cfg["k_over_h"]
    l = 1.0 if cfg["l_over_h"] is None else cfg["l_over_h"]
    k1 = k if cfg["k1"] is None else cfg["k1"]
    k2 = l if cfg["k2"] is None else cfg["k2"]
    fams = {"khm": RatioFamily("khm", k, l), "dkrm": RatioFamily("dkrm", k1, k2)}
    bands = {(name, str(p)): band_structure(fam(p), p, cfg["n_beta"])
             for name, fam in fams.items() for p in (p0, p1)}

    def row(label, x, y):
        bx, by = bands[x], bands[y]
        return (label, f"{x[0]}@{x[1]}", f"{y[0]}@{y[1]}", compare_spectra(bx.points(), by.points()),
                max_bandwidth(bx), max_bandwidth(by))

    rows = [
        row("khm_mirror_symmetry", ("khm", str(p0)), ("khm", str(p1))),
        row("dkrm_mirror_symmetry", ("dkrm", str(p0)), ("dkrm", str(p1))),
        row("dkrm_vs_khm_hbar0", ("dkrm", str(p0)), ("khm", str(p0))),
        row("dkrm_vs_khm_mirror", ("dkrm", str(p1)), ("khm", str(p1))),
    ]
    write_table(out, ["comparison", "first", "second", "hausdorff", "max_width_first",
                      "max_width_second"], rows, fmt)
    return {"hbar0": str(p0), "mirror": str(p1)}


RUNNERS = {
    "butterfly": run_butterfly,
    "bands": run_bands,
    "evolve": run_evolve,
    "dq": run_dq,
    "classical": run_classical,
    "compare": run_compare,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.figure is not None:
        runs = PRESETS.get((args.command, args.figure))
        if runs is None:
            print(f"error: figure {args.figure} has no {args.command!r} preset", file=sys.stderr)
            return EXIT_CONFIG
    else:
        runs = [(None, {})]
    base = Path(args.output or f"{args.command}.{args.format}")
    workers = getattr(args, "workers", None)
    for label, preset in runs:
        out = base if label is None or len(runs) == 1 else base.with_name(f"{base.stem}_{label}{base.suffix}")
        cfg = resolve(args, preset)
        snaps = []
        try:
            info = RUNNERS[args.command](cfg, out, args.format, snaps, workers)
        except (ConfigError, ParameterError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (NumericalError, np.linalg.LinAlgError) as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        write_sidecar(out, {
            "version": __version__,
            "backend": BACKEND,
            "command": args.command,
            "figure": args.figure,
            "label": label,
            "format": args.format,
            "config": cfg,
            "hbar_snaps": snaps,
            "result": info,
        })
        log.info("wrote %s", out)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
