"""Command-line entry point: ``dkglab {simulate,picard,verify,region,norms}``.

Every run writes ``manifest.json`` into its output directory; every other
output file names that manifest (a ``manifest`` key in JSON, a ``#`` comment
line in CSV, a metadata trailer in binary snapshots).  Apart from the
``wall_clock_s`` field, identical arguments give byte-identical outputs.

Exit codes: 0 success, 2 an exact claim was violated, 1 usage or runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bourgain, estimates, evolution, feasibility, fieldio
from .dkg import DkgParams
from .spectral import make_grid

log = logging.getLogger("dkglab")

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
MANIFEST = "manifest.json"
SEED_ENV = "DKGLAB_SEED"
EXACT_SUITES = ("algebra", "null", "lemma21", "prop22")
STATISTICAL_SUITES = ("embeddings", "cor21", "bilinear", "product")
PROP22_TOL = 1e-10
# inside the hypotheses with slack 0.1 in the sum conditions
PRODUCT_LAW_DEFAULT = dict(a=0.3, b=0.3, c=0.0, alpha=0.6, beta=0.6, gamma=0.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- helpers -----------------------------------------------------------------------

def _json(obj) -> str:
    return json.dumps(estimates._plain(obj), indent=1, sort_keys=True, allow_nan=True) + "\n"


def _csv(header, rows, meta=None) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return fieldio.comment_lines(meta) + "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fieldio.fmt(float(v))
    return str(v)


def read_config(path) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment.  Dashes in keys become underscores."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value, got {line!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        if not key:
            raise UsageError(f"{path}:{n}: empty key")
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def resolve_seed(value) -> int:
    if value is None:
        value = os.environ.get(SEED_ENV, "0")
    try:
        seed = int(value)
    except ValueError:
        raise UsageError(f"seed must be an integer, got {value!r}") from None
    if seed < 0:
        raise UsageError("seed must be nonnegative")
    return seed


class Run:
    """Collects outputs of one invocation and writes the manifest last."""

    def __init__(self, out: Path, subcommand: str, params: dict, seed: int | None):
        self.out = Path(out)
        self.subcommand = subcommand
        self.params = params
        self.seed = seed
        self.inputs: list = []
        self.outputs: list = []
        self.summary: dict = {}
        self.start = time.perf_counter()

    @property
    def ref(self) -> dict:
        return {"manifest": MANIFEST}

    def write(self, name: str, payload) -> Path:
        path = fieldio.atomic_write(self.out / name, payload)
        self.outputs.append(name)
        return path

    def write_json(self, name: str, obj: dict) -> Path:
        return self.write(name, _json({**obj, **self.ref}))

    def finish(self) -> Path:
        manifest = {
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "version": __version__,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "summary": self.summary,
            "wall_clock_s": time.perf_counter() - self.start,
        }
        return fieldio.atomic_write(self.out / MANIFEST, _json(manifest))


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "config"):
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


# --- simulate / picard ------------------------------------------------------------------

def _initial(args):
    grid = make_grid(args.N, args.L)
    params = DkgParams(M=args.M, m=args.m, g=args.g)
    state = evolution.wave_packet(grid, args.amp, args.k0, args.width, params)
    return grid, params, state


def _diag_rows(diag):
    return zip(diag["t"], diag["charge"], diag["phi_energy_proxy"], diag["max_abs_coeff"])


def cmd_simulate(args) -> int:
    grid, params, state = _initial(args)
    config = evolution.SolveConfig(args.T, args.dt, args.scheme, args.dealias)
    if args.save_every < 1:
        raise UsageError("--save-every must be at least 1")
    run = Run(args.out, "simulate", _echo(args), None)
    try:
        traj = evolution.solve(state, params, config)
        blown = None
    except evolution.BlowUpError as exc:
        traj, blown = exc.trajectory, exc.t_last
    diag = traj.diagnostics()
    run.write("diagnostics.csv", _csv(["t", "charge", "phi_energy_proxy", "max_abs_coeff"],
                                      _diag_rows(diag), run.ref))
    snaps = []
    writer = fieldio.SNAPSHOT_WRITERS[args.format]
    for i in range(0, len(traj), args.save_every):
        name = f"snapshots/snap_{i:06d}.{args.format}"
        run.write(name, writer(traj.state(i), run.ref))
        snaps.append({"file": name, "index": i, "t": float(traj.times[i])})
    q = np.sqrt(diag["charge"])
    run.summary = {
        "snapshots": snaps,
        "snapshot_dt": args.dt * args.save_every,
        "grid": {"N": grid.N, "L": grid.L},
        "charge_drift": float(np.max(np.abs(q - q[0])) / q[0]),
        "max_projection_residual": float(np.max(diag["projection_residual"])),
        "max_reality_residual": float(np.max(diag["reality_residual"])),
        "blow_up_t": blown,
    }
    run.finish()
    print(f"simulate: {len(traj)} samples, charge drift {run.summary['charge_drift']:.3e}")
    if blown is not None:
        print(f"simulate: non-finite coefficients after t = {blown:.17g}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_picard(args) -> int:
    _, params, state = _initial(args)
    config = evolution.SolveConfig(args.T, args.dt, "exponential-rk4", args.dealias)
    run = Run(args.out, "picard", _echo(args), None)
    res = evolution.picard(state, params, config, args.iterations)
    ratios = [None] + res.ratios
    rows = [(i + 1, r, ratios[i]) for i, r in enumerate(res.residuals)]
    run.write("residuals.csv", _csv(["iteration", "residual", "ratio"], rows, run.ref))
    run.summary = {"diverged": res.diverged, "residuals": res.residuals,
                   "max_ratio": max(res.ratios) if res.ratios else None}
    run.finish()
    last = res.residuals[-1] if res.residuals else float("nan")
    print(f"picard: {len(res.residuals)} iterations, last residual {last:.3e}"
          + (", diverged" if res.diverged else ""))
    return EXIT_OK


# --- verify ---------------------------------------------------------------------------

def _suite_reports(name: str, args, ens) -> list:
    E = estimates
    if name == "algebra":
        return [E.check_algebra(E.EnsembleSpec(ens.seed, count=100_000))]
    if name == "null":
        return [E.check_null_structure(E.EnsembleSpec(ens.seed, count=1000))]
    if name == "lemma21":
        return [E.check_lemma21(E.EnsembleSpec(ens.seed, count=1_000_000))]
    if name == "prop22":
        grid = make_grid(256, 2 * np.pi)
        rng = ens.rng(22)
        f = E.random_band_limited(grid, rng)
        g = E.random_band_limited(grid, rng)
        fw = E.check_free_wave_product(f, g, p=args.p)
        bad = int(not fw.max_rel_error < PROP22_TOL)
        return [E.RatioReport("prop22", fw.ratio, {}, bad, True,
                              [fw.max_rel_error] if bad else None, "exact",
                              {"seed": ens.seed, **fw.as_dict()})]
    if name == "embeddings":
        reps = E.check_embeddings(args.r, ens, args.eps, args.resolutions)
        return list(reps.values())
    if name == "cor21":
        return [E.check_corollary21(args.sigma, args.p, ens, args.resolutions)]
    if name == "bilinear":
        bp = E.BilinearParams(args.s, args.r, args.p, args.sigma, args.rho, args.eps)
        return [E.estimate_bilinear_constant(w, bp, ens, args.resolutions) for w in E.ESTIMATES]
    if name == "product":
        pl = E.ProductLawParams(**PRODUCT_LAW_DEFAULT)
        return [E.check_product_law(pl, ens, args.resolutions, out_sign=s) for s in (1, -1)]
    raise UsageError(f"unknown suite {name!r}")


def _suites(spec: str) -> list:
    if spec == "exact":
        return list(EXACT_SUITES)
    if spec == "statistical":
        return list(STATISTICAL_SUITES)
    if spec == "all":
        return list(EXACT_SUITES + STATISTICAL_SUITES)
    names = [x.strip() for x in spec.split(",") if x.strip()]
    bad = [x for x in names if x not in EXACT_SUITES + STATISTICAL_SUITES]
    if bad or not names:
        raise UsageError(f"unknown suite(s) {bad or spec!r}")
    return names


def _file_name(rep_name: str) -> str:
    keep = "".join(c if c.isalnum() or c in ".-" else "_" for c in rep_name)
    return keep.replace("*", "star").strip("_") + ".json"


def cmd_verify(args) -> int:
    seed = resolve_seed(args.seed)
    names = _suites(args.suite)
    if not 1 < args.p <= 2:
        raise UsageError("--p must lie in (1, 2]")
    ens = estimates.EnsembleSpec(seed, count=args.count)
    run = Run(args.out, "verify", {**_echo(args), "seed": seed}, seed)
    violations = 0
    summary = {}
    for name in names:
        for rep in _suite_reports(name, args, ens):
            fname = "reports/" + _file_name(rep.name.replace("*", "s"))
            run.write_json(fname, rep.as_dict())
            violations += rep.violations if rep.exact else 0
            summary[rep.name] = {"file": fname, "sup_ratio": rep.sup_ratio,
                                 "violations": rep.violations, "exact": rep.exact,
                                 "label": rep.label, "max_growth": rep.max_growth}
            status = ("FAIL" if rep.violations else "ok") if rep.exact else rep.label or "-"
            print(f"{rep.name:24s} sup={rep.sup_ratio:.6g} violations={rep.violations} [{status}]")
    run.summary = {"reports": summary, "exact_violations": violations}
    run.finish()
    return EXIT_VIOLATION if violations else EXIT_OK


# --- region ---------------------------------------------------------------------------

def cmd_region(args) -> int:
    if not 1 < args.p <= 2:
        raise UsageError("--p must lie in (1, 2]")
    if args.resolution < 16:
        raise UsageError("--resolution must be at least 16")
    run = Run(args.out, "region", _echo(args), None)
    rows = feasibility.region_csv_rows(args.p, args.resolution, eps=args.eps)
    run.write("region.csv", _csv(["s", "r", "admissible", "sigma", "rho"], rows, run.ref))
    segs = feasibility.region_boundary(args.p, args.resolution)
    brows = [(seg.label, i, float(pt[0]), float(pt[1]))
             for seg in segs for i, pt in enumerate(seg.points)]
    run.write("boundary.csv", _csv(["segment", "index", "s", "r"], brows, run.ref))
    summary = {"admissible_points": sum(r[2] for r in rows), "grid_points": len(rows),
               "segments": [{"label": s.label, "start": [float(v) for v in s.start],
                             "end": [float(v) for v in s.end], "degenerate": s.degenerate}
                            for s in segs]}
    if args.sweep > 0:
        rep = feasibility.verify_prop11(args.sweep, args.delta)
        run.write_json("sweep.json", rep.as_dict())
        summary["sweep"] = {"inside": rep.inside, "success_rate": rep.success_rate,
                            "revalidated": rep.revalidated}
        print(f"region: sweep {rep.successes}/{rep.inside} solved, {rep.revalidated} revalidated")
    run.summary = summary
    run.finish()
    print(f"region: {summary['admissible_points']}/{len(rows)} admissible grid points")
    if args.sweep > 0 and (rep.successes != rep.inside or rep.revalidated != rep.successes):
        return EXIT_VIOLATION
    return EXIT_OK


# --- norms ----------------------------------------------------------------------------

COMPONENT_PHASES = {
    "psi_plus": ("line", 1),
    "psi_minus": ("line", -1),
    "phi_plus": ("cone", 1),
    "phi_minus": ("cone", -1),
}


def load_run(run_dir):
    """Snapshots of a ``simulate`` run -> (grid, sample spacing, packed (n, 6, N), inputs)."""
    run_dir = Path(run_dir)
    try:
        manifest = json.loads((run_dir / MANIFEST).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {run_dir / MANIFEST}: {exc}") from exc
    if manifest.get("subcommand") != "simulate":
        raise UsageError(f"{run_dir} is not a simulate run")
    snaps = manifest["summary"]["snapshots"]
    states = [fieldio.read_snapshot(run_dir / s["file"], s["t"]) for s in snaps]
    times = np.array([s["t"] for s in snaps])
    dts = np.diff(times)
    if len(dts) == 0 or np.max(np.abs(dts - dts[0])) > 1e-9 * abs(dts[0]):
        raise UsageError("snapshots are not uniformly spaced in time")
    data = np.stack([st.pack() for st in states])
    return states[0].grid, float(dts[0]), float(times[0]), data, [s["file"] for s in snaps]


def cmd_norms(args) -> int:
    grid, dt, t0, data, files = load_run(args.run)
    samples = data[:-1]  # periodic window [t0, t0 + T)
    if len(samples) < bourgain.MIN_SAMPLES:
        raise UsageError(f"need at least {bourgain.MIN_SAMPLES + 1} snapshots, got {len(data)}")
    comps = list(COMPONENT_PHASES) if args.component == "all" else [args.component]
    run = Run(args.out, "norms", _echo(args), None)
    run.inputs = [str(Path(args.run) / MANIFEST)] + [str(Path(args.run) / f) for f in files]
    rows = {"psi_plus": samples[:, 0:2], "psi_minus": samples[:, 2:4],
            "phi_plus": samples[:, 4], "phi_minus": samples[:, 5]}
    reports = {}
    for name in comps:
        kind, sign = COMPONENT_PHASES[name]
        spec = bourgain._from_spatial_coeffs(rows[name], grid, dt, args.window, t0)
        phase = bourgain.PhaseSpec(kind, sign, args.l, args.b, args.p)
        reports[name] = bourgain.norm_report(spec, phase)
        print(f"{name:10s} {phase.label()} l={args.l} b={args.b} p={args.p}: "
              f"{reports[name]['value']:.10g}")
    run.write_json("norms.json", {"reports": reports})
    run.summary = {k: v["value"] for k, v in reports.items()}
    run.finish()
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------

def _resolutions(text: str) -> tuple:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 8 or v % 2 for v in vals):
        raise argparse.ArgumentTypeError("resolutions must be even integers >= 8")
    return vals


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _add_physics(p):
    p.add_argument("--N", type=int, default=512, help="spatial modes")
    p.add_argument("--L", type=float, default=2 * np.pi, help="period")
    p.add_argument("--T", type=float, default=1.0, help="final time")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--g", type=float, default=1.0, help="coupling")
    p.add_argument("--M", type=float, default=1.0, help="Dirac mass")
    p.add_argument("--m", type=float, default=1.0, help="Klein-Gordon mass")
    p.add_argument("--amp", type=float, default=2.0, help="packet amplitude")
    p.add_argument("--k0", type=int, default=32, help="packet carrier wavenumber")
    p.add_argument("--width", type=float, default=8.0, help="packet envelope sharpness")
    p.add_argument("--dealias", type=_bool, default=None,
                   help="force dealiasing on/off (default: on when g != 0)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dkglab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dkglab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", type=Path, help="key = value file; flags win")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "integrate the half-wave system from a wave packet")
    _add_physics(p)
    p.add_argument("--scheme", choices=evolution.SCHEMES, default="exponential-rk4")
    p.add_argument("--save-every", type=int, default=10, help="snapshot stride in steps")
    p.add_argument("--format", choices=sorted(fieldio.SNAPSHOT_WRITERS), default="bin")

    p = add("picard", cmd_picard, "Picard iteration on the integral equations")
    _add_physics(p)
    p.set_defaults(T=0.1, dt=0.0025, amp=0.1, k0=2, width=2.0, N=64)
    p.add_argument("--iterations", type=int, default=8)

    p = add("verify", cmd_verify, "run exact and statistical estimate checks")
    p.add_argument("--suite", default="exact",
                   help="exact, statistical, all, or a comma list of "
                        + ", ".join(EXACT_SUITES + STATISTICAL_SUITES))
    p.add_argument("--seed", default=None, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--count", type=int, default=8, help="fields per resolution")
    p.add_argument("--resolutions", type=_resolutions, default=(64, 128, 256))
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--rho", type=float, default=0.6)
    p.add_argument("--eps", type=float, default=estimates.DEFAULT_EPS)
    p.add_argument("--out", type=Path, default=Path("."))

    p = add("region", cmd_region, "admissible (s, r) region and exponent sweep")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--eps", type=float, default=feasibility.DEFAULT_EPS)
    p.add_argument("--sweep", type=int, default=0, help="points per axis of the sweep (0: skip)")
    p.add_argument("--delta", type=float, default=1e-3, help="sweep margin")
    p.add_argument("--out", type=Path, default=Path("."))

    p = add("norms", cmd_norms, "space-time norms of a simulate run")
    p.add_argument("--run", type=Path, required=True, help="directory of a simulate run")
    p.add_argument("--component", choices=["all", *COMPONENT_PHASES], default="all")
    p.add_argument("--l", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--window", choices=bourgain.WINDOWS, default="none")
    p.add_argument("--out", type=Path, default=Path("."))
    parser.commands = sub.choices
    return parser


def _apply_config(parser, argv):
    """Re-parse with config-file values as defaults so explicit flags win."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    cfg = read_config(args.config)
    sub = parser.commands[args.subcommand]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None or key in ("help", "config", "func"):
            raise UsageError(f"{args.config}: unknown key {key!r} for {args.subcommand}")
        try:
            value = act.type(raw) if act.type is not None else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{args.config}: bad value for {key}: {exc}") from None
        if act.choices is not None and value not in act.choices:
            raise UsageError(f"{args.config}: {key} must be one of {list(act.choices)}")
        defaults[key] = value
    saved = {k: actions[k].default for k in defaults}
    sub.set_defaults(**defaults)
    try:
        return parser.parse_args(argv)
    finally:
        sub.set_defaults(**saved)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
