"""Command-line front end tying the modules into reproducible runs.

Subcommands
-----------
special          spot-evaluate Gamma, Kummer M, Tricomi U, the positive-zero
                 finder, and the Wronskian residual
profile forward  expanding self-similar profile (CSV r,U,dU + JSON summary)
profile shrinker shrinker analysis: explicit at gamma=0, nonexistence report
                 at gamma=1, slope-defect sweep for gamma in (0,1)
tw               traveling-wave profile (CSV xi,phi,dphi + slope defect)
collide          colliding-wave scene (vertex, opening, time slices)
evolve           regularized-evolution run from a key=value config file
weiss            strip-energy audit over a completed run directory
verify           run the acceptance suite (one line per criterion)

Every subcommand writes into an output directory (default ./runs/<name>,
root overridable via FBPLAB_OUTPUT_ROOT) the delimited data, a JSON summary
with stable key order, and a rendered PNG figure (suppress with --no-plot).
Exit codes: 0 success, 1 assertion/check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import model, pde, runio, selfsim, specfun, waves, weiss
from .model import ModelParams

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _outdir(args, default_name: str) -> str:
    root = args.out or runio.output_root()
    path = os.path.join(root, args.name or default_name)
    os.makedirs(path, exist_ok=True)
    return path


def _maybe_plot(args) -> bool:
    return not args.no_plot


# ---------------------------------------------------------------------------
# special


def cmd_special(args) -> int:
    fn = args.fn
    if fn == "M":
        print(format(specfun.kummer_M(args.a, args.b, args.s), ".17g"))
    elif fn == "U":
        print(format(specfun.tricomi_U(args.a, args.b, args.s), ".17g"))
    elif fn == "gamma":
        print(format(specfun.gamma_fn(args.a), ".17g"))
    elif fn == "zero":
        print(format(specfun.kummer_positive_zero(args.b), ".17g"))
    elif fn == "wronskian":
        print(format(specfun.wronskian_residual(args.a, args.b, args.s), ".17g"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# profile


def cmd_profile_forward(args) -> int:
    res = selfsim.forward_profile(args.gamma, args.n, args.R, r_max=args.r_max,
                                  method=args.method)
    out = _outdir(args, f"forward_g{args.gamma}_n{args.n}")
    prof = res.profile
    runio.emit_csv({"r": prof.r, "U": prof.u, "dU": prof.du},
                   os.path.join(out, "profile.csv"))
    beta = model.beta_of_gamma(args.gamma)
    summary = {
        "gamma": args.gamma, "n": args.n, "R": res.R, "method": args.method,
        "asymptotic_c": res.asymptotic_c, "fb_slope": res.fb_slope,
        "fb_slope_target": math.sqrt(2.0) / beta,
        "fb_slope_defect": abs(res.fb_slope - math.sqrt(2.0) / beta),
        "diagnostics": res.diagnostics,
    }
    runio.emit_json(summary, os.path.join(out, "summary.json"))
    if _maybe_plot(args):
        from . import plots

        plots.profile_figure(prof.r, prof.u, prof.du,
                             os.path.join(out, "profile.png"),
                             title=f"expanding profile g={args.gamma} n={args.n}",
                             fb_radius=res.R)
    print(f"wrote {out} (fb_slope defect {summary['fb_slope_defect']:.2e})")
    return EXIT_OK


def cmd_profile_shrinker(args) -> int:
    out = _outdir(args, f"shrinker_g{args.gamma}_n{args.n}")
    if args.gamma == 0.0:
        res = selfsim.shrinker_gamma0(args.n)
        prof = res.profile
        runio.emit_csv({"r": prof.r, "U": prof.u, "dU": prof.du},
                       os.path.join(out, "profile.csv"))
        summary = {"gamma": 0.0, "n": args.n, "exists": True, "R": res.R,
                   "ell": res.ell, "s_star": res.s_star,
                   "slope_at_R": float(prof.du[-1])}
        runio.emit_json(summary, os.path.join(out, "summary.json"))
        if _maybe_plot(args):
            from . import plots

            plots.profile_figure(prof.r, prof.u, prof.du,
                                 os.path.join(out, "profile.png"),
                                 title=f"shrinker g=0 n={args.n}", fb_radius=res.R)
        print(f"wrote {out} (R={res.R:.8f}, ell={res.ell:.8f})")
        return EXIT_OK
    if args.gamma == 1.0:
        ells = args.ell if args.ell else [0.5, 1.0, 1.5, 2.0, 10.0]
        rep = selfsim.shrinker_gamma1_scan(args.n, ells)
        runio.emit_json(rep, os.path.join(out, "summary.json"))
        runio.emit_csv(
            {
                "ell": [c["ell"] for c in rep["candidates"]],
                "R": [c["R"] if c["R"] is not None else math.nan
                      for c in rep["candidates"]],
                "exponent": [c["exponent"] if c["exponent"] is not None else math.nan
                             for c in rep["candidates"]],
            },
            os.path.join(out, "candidates.csv"),
        )
        print(f"wrote {out} (no admissible shrinker at gamma=1)")
        return EXIT_OK
    # gamma in (0, 1): defect sweep as conjecture evidence
    ells = args.ell if args.ell else list(np.geomspace(1e-2, 1e2, 25))
    shots = selfsim.shrinker_defect_curve(args.gamma, args.n, ells)
    table = {
        "ell": [s.ell for s in shots],
        "hit_radius": [s.hit_radius if s.hit_radius is not None else math.nan
                       for s in shots],
        "slope": [s.slope if s.slope is not None else math.nan for s in shots],
        "defect": [s.defect if s.defect is not None else math.nan for s in shots],
    }
    runio.emit_csv(table, os.path.join(out, "defect_curve.csv"))
    defects = [abs(s.defect) for s in shots if s.defect is not None]
    summary = {
        "gamma": args.gamma, "n": args.n,
        "ell_range": [min(ells), max(ells)],
        "n_candidates": len(shots),
        "n_hitting_zero": sum(s.hit_radius is not None for s in shots),
        "min_abs_defect": min(defects) if defects else None,
        "note": "positive slope defects across the sweep support nonexistence",
    }
    runio.emit_json(summary, os.path.join(out, "summary.json"))
    if _maybe_plot(args):
        from . import plots

        mask = [s.defect is not None for s in shots]
        plots.defect_curve_figure(
            [s.ell for s, m in zip(shots, mask) if m],
            [s.defect for s, m in zip(shots, mask) if m],
            os.path.join(out, "defect_curve.png"),
            title=f"shrinker slope defect g={args.gamma} n={args.n}",
        )
    print(f"wrote {out} (min |defect| = {summary['min_abs_defect']})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# traveling waves


def cmd_tw(args) -> int:
    sign = +1 if args.sign == "+" else -1
    if args.gamma in (0.0, 1.0):
        prof = waves.explicit_wave_profile(args.gamma, args.c, sign,
                                           xi_max=args.xi_max)
    else:
        prof = waves.tw_profile(args.gamma, args.c, sign, xi_max=args.xi_max)
    defect = waves.fb_slope_check(prof)
    out = _outdir(args, f"tw_g{args.gamma}_c{args.c}{args.sign}")
    xi_signed = sign * prof.xi
    order = np.argsort(xi_signed)
    runio.emit_csv(
        {"xi": xi_signed[order], "phi": prof.phi[order],
         "dphi": (sign * prof.dphi)[order]},
        os.path.join(out, "wave.csv"),
    )
    summary = {
        "gamma": args.gamma, "c": args.c, "sign": args.sign,
        "fb_slope_defect": defect,
        "amplitude": model.wave_amplitude(model.beta_of_gamma(args.gamma)),
    }
    runio.emit_json(summary, os.path.join(out, "summary.json"))
    if _maybe_plot(args):
        from . import plots

        plots.wave_figure(xi_signed[order], prof.phi[order],
                          (sign * prof.dphi)[order],
                          os.path.join(out, "wave.png"),
                          title=f"wave g={args.gamma} c={args.c} {args.sign}")
        if 0.0 < args.gamma <= 1.0 and args.c != 0.0:
            seps = []
            for s, style, lbl in ((+1, "r-", "outgoing"), (-1, "b-", "incoming")):
                U, V = waves.separatrix(args.gamma, args.c, s, U_max=10.0)
                seps.append(((U, V), style, lbl))
            iso = []
            for s in (+1, -1):
                U = np.linspace(1e-3, 10.0, 200)
                iso.append((U, waves.null_isocline(U, args.gamma, args.c, s)))
            plots.phase_portrait_figure(args.gamma, args.c, seps, iso,
                                        os.path.join(out, "phase_plane.png"))
    print(f"wrote {out} (slope defect {defect:.2e})")
    return EXIT_OK


def cmd_collide(args) -> int:
    scene = waves.colliding_tw(args.gamma, args.c1, args.c2, args.xi1, args.xi2)
    out = _outdir(args, f"collide_g{args.gamma}")
    summary = {
        "gamma": args.gamma, "c1": args.c1, "c2": args.c2,
        "xi1": args.xi1, "xi2": args.xi2,
        "t_star": scene.t_star, "x_star": scene.x_star, "opening": scene.opening,
    }
    runio.emit_json(summary, os.path.join(out, "scene.json"))
    xs = np.linspace(scene.x_star - 4.0, scene.x_star + 4.0, 401)
    table = {"x": xs}
    for frac in (0.25, 0.5, 0.75):
        t = scene.t_star - (1.0 - frac) * 2.0 - 1e-9
        table[f"u_t{frac}"] = scene.u(xs, t)
    runio.emit_csv(table, os.path.join(out, "slices.csv"))
    if _maybe_plot(args):
        from . import plots

        plots.scene_figure(scene, os.path.join(out, "scene.png"))
    print(f"wrote {out} (t*={scene.t_star}, x*={scene.x_star}, "
          f"opening={scene.opening:.6f})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evolve / weiss


def _trajectory_to_run_dir(traj: pde.Trajectory, cfg: dict, out: str) -> None:
    os.makedirs(os.path.join(out, "snapshots"), exist_ok=True)
    with open(os.path.join(out, "config"), "w") as fh:
        fh.write(runio.format_config(cfg))
    width = len(str(len(traj.times)))
    for k, t in enumerate(traj.times):
        runio.emit_csv(
            {"x": traj.grid.x, "u": traj.snapshots[k]},
            os.path.join(out, "snapshots", f"snap_{k:0{width}d}.csv"),
        )
    runio.emit_csv(
        {"k": list(range(len(traj.times))), "t": traj.times},
        os.path.join(out, "snapshots", "index.csv"),
    )


def trajectory_from_run_dir(path: str) -> pde.Trajectory:
    """Rebuild a Trajectory from an evolve output directory."""
    with open(os.path.join(path, "config")) as fh:
        cfg = runio.parse_config(fh.read())
    grid = pde.Grid(cfg["geometry"], cfg["x_max"], cfg["m"],
                    n=cfg["n"] if cfg["geometry"] == "radial" else 1)
    params = ModelParams(gamma=cfg["gamma"])
    index = runio.read_csv(os.path.join(path, "snapshots", "index.csv"))
    times = np.asarray(index["t"], dtype=float)
    width = len(str(len(times)))
    snaps = []
    for k in range(len(times)):
        cols = runio.read_csv(os.path.join(path, "snapshots",
                                           f"snap_{k:0{width}d}.csv"))
        snaps.append(np.asarray(cols["u"], dtype=float))
    snaps = np.array(snaps)
    dt = float(np.min(np.diff(times))) if len(times) > 1 else cfg["eps"] ** 2
    return pde.Trajectory(
        grid=grid, params=params, eps=cfg["eps"], dt=dt, times=times,
        snapshots=snaps,
        meta={"initial": snaps[0], "sup_initial": float(snaps[0].max()),
              "sup_run": float(snaps.max()), "loaded_from": path},
    )


def cmd_evolve(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = runio.parse_config(fh.read())
    except runio.ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    grid = pde.Grid(cfg["geometry"], cfg["x_max"], cfg["m"],
                    n=cfg["n"] if cfg["geometry"] == "radial" else 1)
    params = ModelParams(gamma=cfg["gamma"])
    spec = pde.EvolveSpec(
        grid=grid, params=params, eps=cfg["eps"], t_end=cfg["t_end"],
        reaction=cfg["reaction"], dt=cfg["dt"],
        snapshot_spacing=cfg["snapshot_spacing"],
        bump=None if cfg["flat"] is not None
        else (cfg["bump_center"], cfg["bump_radius"], cfg["bump_height"]),
        flat=cfg["flat"],
    )
    traj = pde.evolve(spec)
    out = _outdir(args, f"evolve_g{cfg['gamma']}_eps{cfg['eps']}")
    _trajectory_to_run_dir(traj, cfg, out)

    report = pde.energy_report(traj)
    barrier = pde.barrier_envelope(traj)
    gaussian = pde.gaussian_envelope(traj)
    radii = [pde.support_radius(pde.GridField(grid, t, traj.snapshots[k]),
                                cfg["eps"], params.beta)
             for k, t in enumerate(traj.times)]
    summary = {
        "config": cfg,
        "energy": report,
        "barrier_envelope": barrier,
        "gaussian_envelope": gaussian,
        "support_radius": {"t": list(traj.times), "radius": radii},
        "dt": traj.dt,
        "n_snapshots": len(traj.times),
    }
    runio.emit_json(summary, os.path.join(out, "summary.json"))
    if _maybe_plot(args):
        from . import plots

        plots.waterfall_figure(traj, os.path.join(out, "evolution.png"))
    ok = report["linfty_ok"] and report["dissipation_ok"] and barrier["ok"]
    print(f"wrote {out} (bounds {'ok' if ok else 'VIOLATED'})")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_weiss(args) -> int:
    traj = trajectory_from_run_dir(args.run)
    grid = traj.grid
    r_lo = args.r_min if args.r_min else 4.0 * grid.dx
    r_hi = args.r_max if args.r_max else 0.4
    r_grid = np.geomspace(r_lo, r_hi, args.num)
    audit = weiss.monotonicity_audit(traj, (args.x0, args.t0), r_grid)
    out = _outdir(args, "weiss_audit")
    runio.emit_csv(
        {
            "r": [s.r for s in audit["samples"]],
            "W": [s.W for s in audit["samples"]],
            "z_term": [s.z_term for s in audit["samples"]],
            "h_term": [s.h_term for s in audit["samples"]],
        },
        os.path.join(out, "weiss.csv"),
    )
    summary = {k: v for k, v in audit.items() if k != "samples"}
    summary["center"] = {"x0": args.x0, "t0": args.t0}
    runio.emit_json(summary, os.path.join(out, "summary.json"))
    if _maybe_plot(args):
        from . import plots

        plots.weiss_figure(audit["samples"], os.path.join(out, "weiss.png"))
    ok = audit["defect_ok"] and audit["nondecreasing"]
    print(f"wrote {out} (defect {audit['defect']:.3e}, "
          f"{'ok' if ok else 'VIOLATED'})")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    from . import acceptance

    results = acceptance.run_suite(args.suite)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbplab",
        description="numerical laboratory for a singular parabolic "
                    "free-boundary problem",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output directory root")
        p.add_argument("--name", default=None, help="run directory name")
        p.add_argument("--no-plot", action="store_true",
                       help="skip figure rendering")

    p = sub.add_parser("special", help="special-function spot checks")
    p.add_argument("--fn", required=True,
                   choices=("M", "U", "gamma", "zero", "wronskian"))
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.set_defaults(func=cmd_special)

    prof = sub.add_parser("profile", help="self-similar profiles")
    psub = prof.add_subparsers(dest="kind", required=True)

    p = psub.add_parser("forward", help="expanding-support profile")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--method", default="fb_expansion",
                   choices=("fb_expansion", "delta_family", "explicit"))
    common(p)
    p.set_defaults(func=cmd_profile_forward)

    p = psub.add_parser("shrinker", help="bounded-support profile analysis")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--ell", type=float, nargs="*", default=None,
                   help="center heights to probe (default: log grid 1e-2..1e2,"
                        " a reporting choice, not mandated by theory)")
    common(p)
    p.set_defaults(func=cmd_profile_shrinker)

    p = sub.add_parser("tw", help="traveling-wave profile")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--sign", default="+", choices=("+", "-"))
    p.add_argument("--xi-max", type=float, default=20.0)
    common(p)
    p.set_defaults(func=cmd_tw)

    p = sub.add_parser("collide", help="colliding-wave scene")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--xi1", type=float, required=True)
    p.add_argument("--xi2", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_collide)

    p = sub.add_parser("evolve", help="run the regularized evolution")
    p.add_argument("--config", required=True, help="key=value config file")
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("weiss", help="strip-energy audit of a finished run")
    p.add_argument("--run", required=True, help="evolve output directory")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--r-min", type=float, default=None)
    p.add_argument("--r-max", type=float, default=None)
    p.add_argument("--num", type=int, default=25)
    common(p)
    p.set_defaults(func=cmd_weiss)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="full", choices=("fast", "full"))
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
