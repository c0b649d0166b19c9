"""Batch command-line front end.

Subcommands: hamiltonian, speed, hj, kinetic, converge, kolmogorov, nonlocal.
Each run writes CSV artifacts plus a manifest.csv into --out; identical
configurations produce byte-identical CSVs (the manifest timestamp line is
the single exemption).  Exit codes: 0 success, 1 solver error, 2 malformed
input.  KINETIC_FRONT_THREADS caps the fan-out of the per-momentum and
per-epsilon loops (default: processor count).
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, csvio, hamiltonian as ham, hj_solver, kinetic_solver
from . import spectral, unbounded_models as unb
from .operators import build_bgk, build_elliptic, build_kernel
from .velocity_space import make_grid, uniform_equilibrium

__all__ = ["RunConfig", "parse_args", "run", "main"]


class UsageError(ValueError):
    """Malformed command line; maps to exit status 2."""


@dataclass
class RunConfig:
    """Validated invocation: one command plus its parameters."""

    command: str
    out_dir: str
    params: dict = field(default_factory=dict)


def _max_workers() -> int:
    raw = os.environ.get("KINETIC_FRONT_THREADS", "")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise UsageError(f"KINETIC_FRONT_THREADS must be an integer, got {raw!r}")
        if value < 1:
            raise UsageError("KINETIC_FRONT_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinetic-fronts",
        description="Effective Hamiltonians of kinetic reaction-transport "
                    "equations and the fronts they drive.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("hamiltonian", help="tabulate H(p) for a discrete operator")
    p.add_argument("--model", choices=["bgk", "kernel", "elliptic"], default="bgk")
    p.add_argument("--vmax", type=float, default=1.0)
    p.add_argument("--n", type=int, default=201, help="velocity nodes")
    p.add_argument("--r", type=float, default=0.0, help="growth rate")
    p.add_argument("--kernel-csv", help="N x N kernel matrix (kernel model only)")
    p.add_argument("--diffusivity", type=float, default=1.0, help="elliptic D")
    p.add_argument("--p-max", type=float, default=3.0)
    p.add_argument("--p-step", type=float, default=0.1)
    common(p)

    p = sub.add_parser("speed", help="minimal front speed of a closed-form model")
    p.add_argument("--model", choices=["bgk", "quadratic", "vfp", "gaussian", "laplace"],
                   default="bgk")
    p.add_argument("--vmax", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--d", type=float, default=1.0, help="quadratic diffusivity")
    p.add_argument("--sigma", type=float, default=1.0, help="VFP sigma")
    common(p)

    p = sub.add_parser("hj", help="front propagation under the limit HJ equation")
    p.add_argument("--model", choices=["quadratic", "bgk", "bgk-tabulated"],
                   default="quadratic")
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--vmax", type=float, default=1.0)
    p.add_argument("--n", type=int, default=201, help="velocity nodes (bgk-tabulated)")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--cfl", type=float, default=0.9)
    p.add_argument("--xmax", type=float, default=0.0, help="0 = choose from c* T")
    common(p)

    p = sub.add_parser("kinetic", help="one finite-epsilon kinetic run")
    p.add_argument("--vmax", type=float, default=1.0)
    p.add_argument("--n", type=int, default=48)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--xmax", type=float, default=2.5)
    p.add_argument("--slope", type=float, default=12.0, help="initial phase slope")
    p.add_argument("--plateau", type=float, default=0.5, help="initial nullset radius")
    common(p)

    p = sub.add_parser("converge", help="phase convergence study over epsilon")
    p.add_argument("--vmax", type=float, default=1.0)
    p.add_argument("--n", type=int, default=48)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--eps", default="0.5,0.25,0.125",
                   help="comma-separated, strictly decreasing")
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--T", type=float, default=2.0)
    p.add_argument("--xmax", type=float, default=4.0)
    p.add_argument("--slope", type=float, default=12.0)
    p.add_argument("--plateau", type=float, default=0.5)
    common(p)

    p = sub.add_parser("kolmogorov", help="kinetic-diffusion fundamental solution checks")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--w", type=float, default=0.0, help="initial velocity")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--check", choices=["residual", "mass", "phase", "probe", "all"],
                   default="all")
    p.add_argument("--p", type=float, default=1.0, help="momentum for --check probe")
    common(p)

    p = sub.add_parser("nonlocal", help="convolution-kernel Hamiltonian and eigenvector")
    p.add_argument("--kernel", choices=["gaussian", "laplace"], default="laplace")
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--check", choices=["hamiltonian", "positivity", "all"], default="all")
    common(p)
    return parser


def parse_args(argv) -> RunConfig:
    """Validate argv into a RunConfig; malformed input raises UsageError."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):  # --help / --version
            raise
        # argparse already printed its one-line reason
        raise UsageError("") from exc
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "out")}

    r = params.get("r")
    if r is not None and r < 0:
        raise UsageError("growth rate must be >= 0")
    if ns.command in ("speed", "hj", "converge") and r is not None and r <= 0:
        raise UsageError(f"{ns.command} requires r > 0")
    if ns.command == "hamiltonian" and ns.model == "kernel" and not ns.kernel_csv:
        raise UsageError("kernel model needs --kernel-csv")
    for key in ("vmax", "dx", "T", "sigma", "d", "t"):
        if params.get(key) is not None and params[key] <= 0:
            raise UsageError(f"--{key} must be positive")
    if params.get("eps") is not None and ns.command == "converge":
        try:
            eps_list = [float(tok) for tok in str(params["eps"]).split(",") if tok]
        except ValueError:
            raise UsageError(f"bad epsilon list {params['eps']!r}")
        if not eps_list or any(e <= 0 for e in eps_list):
            raise UsageError("epsilon values must be positive")
        if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
            raise UsageError("epsilon list must be strictly decreasing")
        params["eps"] = eps_list
    elif ns.command == "kinetic" and params["eps"] <= 0:
        raise UsageError("--eps must be positive")
    return RunConfig(ns.command, ns.out, params)


def _operator(params, r=None):
    grid = make_grid(params["vmax"], params["n"])
    m = uniform_equilibrium(grid)
    r = params["r"] if r is None else r
    model = params.get("model", "bgk")
    if model == "kernel":
        path = params.get("kernel_csv")
        if not path:
            raise UsageError("kernel model needs --kernel-csv")
        k = np.loadtxt(path, delimiter=",", ndmin=2)
        return grid, build_kernel(grid, k, r, m)
    if model == "elliptic":
        return grid, build_elliptic(grid, np.full(grid.count, params["diffusivity"]), r, m)
    return grid, build_bgk(grid, m, r)


def _cmd_hamiltonian(cfg: RunConfig, out):
    params = cfg.params
    grid, op = _operator(params)
    steps = int(round(params["p_max"] / params["p_step"]))
    p_grid = np.linspace(-steps, steps, 2 * steps + 1) * params["p_step"]
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        h_values = np.array([s.h_value for s in
                             pool.map(lambda p: spectral.solve_direct(op, p), p_grid)])
    dh = np.gradient(h_values, p_grid)
    path = os.path.join(out, "hamiltonian.csv")
    csvio.write_csv(path, {"p": p_grid, "H": h_values, "dH": dh}, {
        "model": params["model"], "vmax": params["vmax"], "n": params["n"],
        "r": params["r"],
        "measured_lipschitz": float(np.max(np.abs(np.diff(h_values) / np.diff(p_grid)))),
    })
    return [path]


def _speed_model(params):
    name = params["model"]
    if name == "quadratic":
        return ham.QuadraticHamiltonian(params["d"])
    if name == "vfp":
        return ham.VFPHamiltonian(params["sigma"])
    if name == "gaussian":
        return ham.GaussianKernelHamiltonian()
    if name == "laplace":
        return ham.LaplaceKernelHamiltonian()
    return ham.BGKHamiltonian(params["vmax"], params["r"])


def _cmd_speed(cfg: RunConfig, out):
    params = cfg.params
    if params["r"] <= 0:
        raise UsageError("speed requires r > 0")
    model = _speed_model(params)
    result = ham.min_wave_speed(model, params["r"])
    path = os.path.join(out, "summary.csv")
    csvio.write_csv(path, {
        "c_star": [result.c_star], "p_star": [result.p_star],
        "at_horizon": [int(result.at_horizon)],
    }, {"model": params["model"], "r": params["r"]})
    print(f"c* = {result.c_star:.12g} at p* = {result.p_star:.12g}"
          + (" (at tabulation horizon)" if result.at_horizon else ""))
    return [path]


def _hj_model(params):
    if params["model"] == "quadratic":
        return ham.QuadraticHamiltonian(params["d"])
    if params["model"] == "bgk":
        return ham.BGKHamiltonian(params["vmax"], params["r"])
    grid, op = _operator(params)
    speed = ham.min_wave_speed(ham.BGKHamiltonian(params["vmax"], params["r"]), params["r"]) \
        if params["r"] > 0 else None
    p_star = speed.p_star if speed else 1.0
    p_hi = 1.25 * hj_solver.CONE_SLOPE_FACTOR * p_star
    return ham.tabulate(op, np.linspace(-p_hi, p_hi, 97))


def _cmd_hj(cfg: RunConfig, out):
    params = cfg.params
    if params["r"] <= 0:
        raise UsageError("the constrained front run requires r > 0")
    model = _hj_model(params)
    predicted = ham.min_wave_speed(model, params["r"])
    phi0, slope = hj_solver.point_cone(model, params["r"], cap=hj_solver.CONE_CAP)
    x_max = params["xmax"] or max(2.0, 1.6 * predicted.c_star * params["T"])
    fld, report = hj_solver.run(
        model, params["r"], phi0, params["T"], params["dx"],
        cfl=params["cfl"], x_max=x_max, predicted=predicted,
    )
    front_path = os.path.join(out, "front.csv")
    csvio.write_csv(front_path, {"t": report.times, "front_x": report.front_positions}, {
        "model": params["model"], "r": params["r"], "dx": params["dx"],
        "fitted_speed": report.fitted_speed,
        "predicted_c_star": report.predicted_c_star,
        "relative_error": report.relative_error,
        "cone_slope": slope, "x_max": x_max,
    })
    snap_path = os.path.join(out, "snapshots.csv")
    _write_hj_snapshots(snap_path, model, params, x_max, phi0)
    print(f"fitted speed = {report.fitted_speed:.6g}, "
          f"predicted c* = {report.predicted_c_star:.6g}")
    return [front_path, snap_path]


def _write_hj_snapshots(path, model, params, x_max, phi0):
    times = np.linspace(params["T"] / 4.0, params["T"], 4)
    ts, xs, phis = [], [], []
    for t_snap in times:
        fld, _ = hj_solver.run(model, params["r"], phi0, t_snap, params["dx"],
                               cfl=params["cfl"], x_max=x_max, predicted=None)
        ts.append(np.full(fld.x_grid.size, t_snap))
        xs.append(fld.x_grid)
        phis.append(fld.phi)
    csvio.write_csv(path, {
        "t": np.concatenate(ts), "x": np.concatenate(xs), "phi": np.concatenate(phis),
    }, {"model": params["model"], "r": params["r"], "dx": params["dx"]})


def _cone_plateau(slope, plateau):
    return lambda x: slope * np.maximum(np.abs(x) - plateau, 0.0)


def _cmd_kinetic(cfg: RunConfig, out):
    params = cfg.params
    grid, op = _operator({**params, "model": "bgk"})
    phi0 = _cone_plateau(params["slope"], params["plateau"])
    run = kinetic_solver.run_kinetic(
        op, params["eps"], phi0, params["T"], params["dx"], x_max=params["xmax"])
    nx, nv = run.field.f.shape
    x = np.repeat(run.field.x_grid, nv)
    v = np.tile(grid.nodes, nx)
    path = os.path.join(out, "kinetic_snapshots.csv")
    csvio.write_csv(path, {
        "t": np.full(nx * nv, run.field.time),
        "x": x, "v": v,
        "f": run.field.f.ravel(),
        "phi_eps": run.phase.phi.ravel(),
    }, {"eps": params["eps"], "r": params["r"], "dx": params["dx"],
        "max_bound_violation": run.field.max_bound_violation})
    return [path]


def _cmd_converge(cfg: RunConfig, out):
    params = cfg.params
    grid, op = _operator({**params, "model": "bgk"})
    phi0 = _cone_plateau(params["slope"], params["plateau"])
    p_hi = 1.25 * params["slope"]
    tab = ham.tabulate(op, np.linspace(-p_hi, p_hi, 97))
    hj_field, _ = hj_solver.run(tab, params["r"], phi0, params["T"], params["dx"],
                                x_max=params["xmax"])
    eps_list = params["eps"]
    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        recs = list(pool.map(
            lambda e: kinetic_solver.convergence_study(
                op, [e], phi0, params["T"], params["dx"], hj_field.phi,
                x_max=params["xmax"])[0],
            eps_list))
    path = os.path.join(out, "kinetic_summary.csv")
    csvio.write_csv(path, {
        "eps": [r.epsilon for r in recs],
        "gap": [r.gap for r in recs],
        "min_rho_nullset": [r.min_rho_nullset for r in recs],
        "max_f_positive": [r.max_f_over_m_positive for r in recs],
    }, {"r": params["r"], "dx": params["dx"], "T": params["T"],
        "slope": params["slope"], "n": params["n"]})
    for rec in recs:
        print(f"eps={rec.epsilon:g}: gap={rec.gap:.6g} "
              f"min_rho={rec.min_rho_nullset:.6g}")
    return [path]


def _cmd_kolmogorov(cfg: RunConfig, out):
    from scipy.integrate import dblquad

    params = cfg.params
    par = unb.KolmogorovParams(params["sigma"], params["w"])
    t = params["t"]
    names, values = [], []
    if params["check"] in ("mass", "all"):
        sv = np.sqrt(2.0 * params["sigma"] * t)
        sx = np.sqrt(params["sigma"] * t**3 / 6.0)
        mass, _ = dblquad(
            lambda xx, vv: float(unb.kolmogorov_density(par, t, xx, vv)),
            par.w - 6.0 * sv, par.w + 6.0 * sv,
            lambda vv: (vv + par.w) * t / 2.0 - 6.0 * sx,
            lambda vv: (vv + par.w) * t / 2.0 + 6.0 * sx)
        names.append("mass")
        values.append(mass)
    if params["check"] in ("residual", "all"):
        h = 1e-4
        for (xx, vv) in ((0.3, -0.2), (-0.5, 0.4), (1.0, 1.0)):
            ft = (unb.kolmogorov_density(par, t + h, xx, vv)
                  - unb.kolmogorov_density(par, t - h, xx, vv)) / (2 * h)
            fx = (unb.kolmogorov_density(par, t, xx + h, vv)
                  - unb.kolmogorov_density(par, t, xx - h, vv)) / (2 * h)
            fvv = (unb.kolmogorov_density(par, t, xx, vv + h)
                   - 2 * unb.kolmogorov_density(par, t, xx, vv)
                   + unb.kolmogorov_density(par, t, xx, vv - h)) / h**2
            names.append(f"residual@x={xx:g},v={vv:g}")
            values.append(abs(float(ft) + vv * float(fx) - params["sigma"] * float(fvv)))
    if params["check"] in ("phase", "all"):
        for xx in (0.5, 1.0, 2.0):
            names.append(f"phase_min@x={xx:g}")
            values.append(unb.kolmogorov_phase_min(params["sigma"], t, xx))
    path = os.path.join(out, "kolmogorov.csv")
    csvio.write_csv(path, {"check": np.array(names), "value": np.array(values)},
                    {"sigma": params["sigma"], "w": params["w"], "t": t})
    files = [path]
    if params["check"] in ("probe", "all"):
        # truncated-eigenvalue trend of the whole-space spectral problem
        rows = unb.spectral_nonexistence_probe(params["sigma"], params["p"])
        trend_path = os.path.join(out, "nonexistence_trend.csv")
        csvio.write_csv(trend_path, {
            "half_width": [h for h, _ in rows],
            "eigenvalue": [e for _, e in rows],
        }, {"sigma": params["sigma"], "p": params["p"]})
        files.append(trend_path)
    for n, v in zip(names, values):
        print(f"{n}: {v:.8g}")
    return files


def _cmd_nonlocal(cfg: RunConfig, out):
    params = cfg.params
    kernel = unb.NonlocalKernel(params["kernel"])
    files = []
    if params["check"] in ("hamiltonian", "all"):
        h = unb.convolution_hamiltonian(kernel, params["p"])
        path = os.path.join(out, "nonlocal.csv")
        csvio.write_csv(path, {"p": [params["p"]], "H": [h]},
                        {"kernel": params["kernel"]})
        print(f"H({params['p']:g}) = {h:.12g}")
        files.append(path)
    if params["check"] in ("positivity", "all"):
        res = unb.nonlocal_eigvec(kernel, params["p"])
        path = os.path.join(out, "qp.csv")
        csvio.write_csv(path, {"v": res.v_grid, "q": res.q}, {
            "kernel": params["kernel"], "p": params["p"], "min_q": res.min_q,
            "max_imag": res.max_imag, "normalization": res.normalization,
        })
        print(f"min Q = {res.min_q:.3e} over the synthesis window")
        files.append(path)
    return files


_COMMANDS = {
    "hamiltonian": _cmd_hamiltonian,
    "speed": _cmd_speed,
    "hj": _cmd_hj,
    "kinetic": _cmd_kinetic,
    "converge": _cmd_converge,
    "kolmogorov": _cmd_kolmogorov,
    "nonlocal": _cmd_nonlocal,
}


def run(config: RunConfig) -> int:
    """Execute a parsed configuration; the manifest is written even on failure."""
    os.makedirs(config.out_dir, exist_ok=True)
    manifest_params = {k: v for k, v in config.params.items()
                       if isinstance(v, (int, float, str))}
    try:
        files = _COMMANDS[config.command](config, config.out_dir)
    except UsageError:
        raise
    except Exception as exc:
        csvio.write_manifest(config.out_dir, config.command, manifest_params,
                             [], f"error: {type(exc).__module__}.{type(exc).__name__}: {exc}",
                             __version__)
        print(f"{config.command}: {type(exc).__module__}.{type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1
    csvio.write_manifest(config.out_dir, config.command, manifest_params,
                         [os.path.basename(f) for f in files], "ok", __version__)
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        config = parse_args(argv)
    except UsageError as exc:
        if str(exc):
            print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
