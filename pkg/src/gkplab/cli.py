"""Experiment-runner CLI (`gkp-lab`).

Every experiment writes RFC-4180 CSV with a `#`-prefixed metadata header
(config hash, package version, seed) so runs are self-describing and
reproducible; report-style runs also render a matplotlib PNG next to the
CSV.  Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .channels import NoiseSpec, capacity_bounds
from .errors import GkpLabError
from .lattices import pauli_data, standard_lattice
from .o2o import breakeven, mc_output, optimize_gain, output_lower_bound, tms_code
from .qubit_mc import mc_logical_rates, pauli_error_prob
from . import reports
from .fock import (
    GkpFockParams,
    dissipator_set,
    evolve_sbs,
    gkp_hamiltonian,
    gkp_state,
    hadamard_overlap,
    lindblad_evolve,
    stability_limit,
    stabilizer_ops,
    wigner,
)
from .fock.operators import operators
from .fock.paulis import generalized_pauli

LATTICE_NAMES = {
    "square": "square_qubit",
    "hex": "hex_qubit",
    "hexagonal": "hex_qubit",
    "tesseract": "tesseract",
    "d4": "d4_qubit",
    "canonical-square": "canonical_square",
    "canonical-hex": "canonical_hex",
    "canonical-d4": "canonical_d4",
    "e8": "e8",
    "gkp-bell": "gkp_bell",
}

ANCILLA_NAMES = {"square": "canonical_square", "hex": "canonical_hex", "d4": "canonical_d4"}


def _config_hash(cfg: dict) -> str:
    # thread count and output routing never affect results, so they are
    # excluded to keep CSVs byte-identical across --threads settings
    core = {k: v for k, v in cfg.items() if k not in ("threads", "out", "plot")}
    return hashlib.sha256(json.dumps(core, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    s = str(x)
    if any(ch in s for ch in (",", '"', "\n")):
        s = '"' + s.replace('"', '""') + '"'
    return s


def write_csv(path, rows, columns, cfg, units: str = "", extra_meta: dict = None):
    lines = [
        f"# gkplab {__version__}",
        f"# config-hash {_config_hash(cfg)}",
        f"# seed {cfg.get('seed', '-')}",
    ]
    if units:
        lines.append(f"# units: {units}")
    for key, val in (extra_meta or {}).items():
        lines.append(f"# {key}: {_fmt(val)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _threads(args) -> int:
    if args.threads is not None:
        if args.threads == "auto":
            return os.cpu_count() or 1
        return int(args.threads)
    env = os.environ.get("GKPLAB_THREADS")
    if env:
        return int(env)
    return 1


def run_lattice_info(args, cfg):
    lat = standard_lattice(LATTICE_NAMES[args.name], eta=args.eta)
    rows = [[lat.name, lat.n_modes, lat.d]]
    cols = ["lattice", "n_modes", "d"]
    extra = {"generator": json.dumps(lat.generator.tolist()),
             "gram": json.dumps(lat.gram.tolist())}
    if lat.d == 2:
        pd = pauli_data(lat)
        rows[0] += list(pd.distances)
        cols += ["dist_x", "dist_y", "dist_z"]
        print(f"{lat.name}: d={lat.d}, Pauli distances "
              f"({pd.distances[0]:.6g}, {pd.distances[1]:.6g}, {pd.distances[2]:.6g})")
    else:
        print(f"{lat.name}: d={lat.d} (canonical)")
    write_csv(args.out, rows, cols, cfg, units="distances in units of sqrt(2*pi)",
              extra_meta=extra)


def run_qubit_mc(args, cfg):
    lat = standard_lattice(LATTICE_NAMES[args.lattice], eta=args.eta)
    rates = mc_logical_rates(lat, args.sigma, int(args.trials), args.seed,
                             threads=_threads(args))
    closed = pauli_error_prob(lat, args.sigma)
    rows = [[lat.name, args.sigma, rates.trials, rates.p_x, rates.p_y, rates.p_z,
             rates.p_e, rates.stderr[0], rates.stderr[1], rates.stderr[2]]]
    cols = ["lattice", "sigma", "trials", "p_x", "p_y", "p_z", "p_e", "se_x", "se_y", "se_z"]
    write_csv(args.out, rows, cols, cfg, units="probabilities per channel use",
              extra_meta={"closed_form_p_e": closed.p_e})


def run_o2o(args, cfg):
    anc = standard_lattice(ANCILLA_NAMES[args.ancilla])
    n_data = args.n_data or anc.n_modes
    threads = _threads(args)
    if args.optimize_gain:
        opt = optimize_gain(anc, args.sigma, args.estimator, int(args.opt_trials),
                            args.seed, n_data=n_data, threads=threads)
        gain = opt.gain
    else:
        gain = args.gain
    code = tms_code([gain] * n_data, anc)
    Y = args.sigma ** 2 * np.eye(2 * (n_data + anc.n_modes))
    out = mc_output(code, Y, args.estimator, int(args.trials), args.seed + 1,
                    n_max=args.n_max, threads=threads)
    lb, _ = output_lower_bound([args.sigma] * (n_data + anc.n_modes), n_data)
    rows = [[args.ancilla, args.estimator, args.sigma, gain, out.rms_sq, out.gm_sq,
             out.stderr_rms_sq, lb]]
    cols = ["ancilla", "estimator", "sigma", "gain", "rms_sq", "gm_sq", "stderr", "sigma_lb"]
    write_csv(args.out, rows, cols, cfg, units="variances in vacuum units (hbar=1)")


def run_o2o_sweep(args, cfg):
    anc = standard_lattice(ANCILLA_NAMES[args.ancilla])
    n_data = args.n_data or anc.n_modes
    threads = _threads(args)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    rows = []
    for sig in sigmas:
        opt = optimize_gain(anc, sig, args.estimator, int(args.opt_trials), args.seed,
                            n_data=n_data, threads=threads)
        out = mc_output(tms_code([opt.gain] * n_data, anc),
                        sig ** 2 * np.eye(2 * (n_data + anc.n_modes)), args.estimator,
                        int(args.trials), args.seed + 1, n_max=args.n_max, threads=threads,
                        check_truncation=False)
        lb, _ = output_lower_bound([sig] * (n_data + anc.n_modes), n_data)
        rows.append([args.ancilla, args.estimator, sig, opt.gain, out.rms_sq, out.gm_sq,
                     out.stderr_rms_sq, lb])
    cols = ["ancilla", "estimator", "sigma", "gain", "rms_sq", "gm_sq", "stderr", "sigma_lb"]
    write_csv(args.out, rows, cols, cfg, units="variances in vacuum units (hbar=1)")


def run_breakeven(args, cfg):
    anc = standard_lattice(ANCILLA_NAMES[args.ancilla])
    star = breakeven(anc, args.estimator, int(args.trials), args.seed,
                     n_data=args.n_data, threads=_threads(args))
    rows = [[args.ancilla, args.estimator, star]]
    write_csv(args.out, rows, ["ancilla", "estimator", "sigma_star"], cfg)
    print(f"break-even sigma* = {star:.4f}")


def run_capacity(args, cfg):
    if args.channel:
        spec = NoiseSpec.from_json(json.loads(args.channel))
    elif args.sigma2 is not None:
        spec = NoiseSpec("agn", sigma2=args.sigma2)
    else:
        spec = NoiseSpec("loss", eta=args.eta, nbar=args.nbar)
    b = capacity_bounds(spec)
    rows = [[json.dumps(spec.to_json()), b.lower, b.upper, int(b.lower_vacuous)]]
    write_csv(args.out, rows, ["channel", "lower", "upper", "lower_vacuous"], cfg,
              units="qubits per channel use")


def run_fock_sbs(args, cfg):
    dim = args.dim
    vac = np.zeros(dim, complex)
    vac[0] = 1.0
    if args.start == "code":
        start = gkp_state(GkpFockParams(args.delta, "zero", dim))
    else:
        start = vac
    traj = evolve_sbs(start, args.delta, args.rounds, dim)
    rows = [[i + 1, traj["n_mean"][i], traj["re_Sx"][i], traj["re_Sp"][i],
             traj["Z"][i], traj["X"][i]] for i in range(args.rounds)]
    cols = ["round", "n_mean", "re_Sx", "re_Sp", "Z", "X"]
    write_csv(args.out, rows, cols, cfg,
              units="stabilizers are finite-energy; Z, X frame-corrected")


def run_fock_lindblad(args, cfg):
    dim = args.dim
    kw = {"delta": args.delta, "kappa": args.kappa, "kappa_phi": args.kappa_phi}
    diss = dissipator_set(args.dissipators, dim, **kw)
    dt = args.dt or 0.8 * stability_limit(diss)
    steps = int(np.ceil(args.gamma_t / dt))
    stab = stabilizer_ops(args.delta or 0.3, dim, "qubit", finite=True)
    obs = {
        "n_mean": operators(dim)["n"],
        "re_Sx": (stab["S_x"] + stab["S_x"].conj().T) / 2.0,
        "re_Sp": (stab["S_z"] + stab["S_z"].conj().T) / 2.0,
        "Z": generalized_pauli("Z", dim),
        "X": generalized_pauli("X", dim),
    }
    vac = np.zeros(dim, complex)
    vac[0] = 1.0
    out = lindblad_evolve(vac, None, diss, dt, steps, observables=obs,
                          record_every=max(1, steps // args.points))
    rows = [[t, n, sx, sp, z, xx] for t, n, sx, sp, z, xx in
            zip(out["times"], out["n_mean"], out["re_Sx"], out["re_Sp"], out["Z"], out["X"])]
    cols = ["gamma_t", "n_mean", "re_Sx", "re_Sp", "Z", "X"]
    write_csv(args.out, rows, cols, cfg, extra_meta={"dt": dt})


def run_fock_spectrum(args, cfg):
    res = gkp_hamiltonian(args.omega0, args.energy, args.energy_p or args.energy,
                          args.eta, args.d, args.dim)
    overlap = hadamard_overlap(res, args.omega0, args.energy, args.eta, args.d) \
        if args.d == 2 and args.eta == 1.0 else float("nan")
    rows = [[i, res["eigenvalues"][i]] for i in range(min(args.levels, args.dim))]
    write_csv(args.out, rows, ["level", "energy"], cfg, units=f"energy in omega0={args.omega0}",
              extra_meta={"splitting": res["splitting"], "gap": res["gap"],
                          "hadamard_overlap": overlap})


def run_wigner(args, cfg):
    grid = np.linspace(-args.extent, args.extent, args.points)
    psi = gkp_state(GkpFockParams(args.delta, args.logical, args.dim))
    W = wigner(psi, grid, grid)
    rows = [[grid[i], grid[j], W[i, j]] for i in range(len(grid)) for j in range(len(grid))]
    write_csv(args.out, rows, ["q", "p", "W"], cfg, units="hbar=1; integral of W over (q,p) is 1")
    if args.out not in (None, "-") and args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        fig, ax = plt.subplots(figsize=(4, 3.6))
        vmax = np.max(np.abs(W))
        im = ax.pcolormesh(grid, grid, W.T, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        fig.colorbar(im, ax=ax)
        ax.set_xlabel("q")
        ax.set_ylabel("p")
        fig.tight_layout()
        fig.savefig(_png_path(args.out), dpi=150)
        plt.close(fig)


def run_reproduce(args, cfg):
    kw = {}
    if args.figure in ("fig24", "fig25"):
        kw["seed"] = args.seed
        kw["threads"] = _threads(args)
    if args.figure == "fig25" and args.fast:
        kw["fast"] = True
    if args.figure == "fig24" and args.trials:
        kw["trials"] = int(args.trials)
    plot_path = _png_path(args.out) if (args.out not in (None, "-") and args.plot) else None
    rows, cols, meta = reports.reproduce(args.figure, plot_path, **kw)
    write_csv(args.out, rows, cols, cfg, extra_meta=meta)


def _png_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".png"


def _add_common(sp, seed=7):
    sp.add_argument("--seed", type=int, default=seed)
    sp.add_argument("--threads", default=None,
                    help="worker threads for Monte Carlo; 'auto' for cpu count "
                         "(results are thread-count independent)")
    sp.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    sp.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True,
                    help="render a PNG beside the CSV for report-style runs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkp-lab",
                                 description="GKP bosonic QEC experiment runner")
    ap.add_argument("--config", help="JSON config file; overrides subcommand flags")
    sub = ap.add_subparsers(dest="experiment")

    sp = sub.add_parser("lattice-info", help="Gram matrix, d, Pauli distances")
    sp.add_argument("--name", required=True, choices=sorted(LATTICE_NAMES))
    sp.add_argument("--eta", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("qubit-mc", help="Monte Carlo logical error rates")
    sp.add_argument("--lattice", required=True, choices=sorted(LATTICE_NAMES))
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--trials", type=float, default=1e5)
    _add_common(sp)

    sp = sub.add_parser("o2o", help="O2O output noise at one operating point")
    sp.add_argument("--ancilla", required=True, choices=sorted(ANCILLA_NAMES))
    sp.add_argument("--estimator", default="mmse", choices=("linear", "mmse"))
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--trials", type=float, default=2e5)
    sp.add_argument("--opt-trials", type=float, default=2e5)
    sp.add_argument("--gain", type=float, default=2.0)
    sp.add_argument("--optimize-gain", action="store_true")
    sp.add_argument("--n-data", type=int, default=None)
    sp.add_argument("--n-max", type=int, default=3)
    _add_common(sp)

    sp = sub.add_parser("o2o-sweep", help="O2O sweep over input noise")
    sp.add_argument("--ancilla", required=True, choices=sorted(ANCILLA_NAMES))
    sp.add_argument("--estimator", default="mmse", choices=("linear", "mmse"))
    sp.add_argument("--sigmas", required=True, help="comma-separated sigma list")
    sp.add_argument("--trials", type=float, default=2e5)
    sp.add_argument("--opt-trials", type=float, default=1e5)
    sp.add_argument("--n-data", type=int, default=None)
    sp.add_argument("--n-max", type=int, default=3)
    _add_common(sp)

    sp = sub.add_parser("breakeven", help="break-even input noise search")
    sp.add_argument("--ancilla", required=True, choices=sorted(ANCILLA_NAMES))
    sp.add_argument("--estimator", default="mmse", choices=("linear", "mmse"))
    sp.add_argument("--trials", type=float, default=6e5)
    sp.add_argument("--n-data", type=int, default=None)
    _add_common(sp)

    sp = sub.add_parser("capacity", help="quantum-capacity bounds")
    sp.add_argument("--channel", help='JSON, e.g. {"kind":"loss","eta":0.75,"nbar":0}')
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--nbar", type=float, default=0.0)
    sp.add_argument("--sigma2", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("fock-sbs", help="dissipative sBs stabilization rounds")
    sp.add_argument("--delta", type=float, default=0.3)
    sp.add_argument("--rounds", type=int, default=50)
    sp.add_argument("--dim", type=int, default=100)
    sp.add_argument("--start", default="vacuum", choices=("vacuum", "code"))
    _add_common(sp)

    sp = sub.add_parser("fock-lindblad", help="Lindblad master-equation evolution")
    sp.add_argument("--dissipators", default="modular",
                    choices=("modular", "displacement", "loss", "dephasing", "agn"))
    sp.add_argument("--delta", type=float, default=0.2)
    sp.add_argument("--kappa", type=float, default=None)
    sp.add_argument("--kappa-phi", type=float, default=None)
    sp.add_argument("--gamma-t", type=float, default=10.0)
    sp.add_argument("--dim", type=int, default=100)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--points", type=int, default=100)
    _add_common(sp)

    sp = sub.add_parser("fock-spectrum", help="confined GKP Hamiltonian spectrum")
    sp.add_argument("--omega0", type=float, default=1.0)
    sp.add_argument("--energy", type=float, default=50.0, help="E_q in units of omega0")
    sp.add_argument("--energy-p", type=float, default=None)
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--dim", type=int, default=220)
    sp.add_argument("--levels", type=int, default=12)
    _add_common(sp)

    sp = sub.add_parser("wigner", help="Wigner function of a finite-energy GKP state")
    sp.add_argument("--delta", type=float, default=0.3)
    sp.add_argument("--logical", default="zero", choices=("zero", "one", "canonical"))
    sp.add_argument("--dim", type=int, default=120)
    sp.add_argument("--extent", type=float, default=6.0)
    sp.add_argument("--points", type=int, default=81)
    _add_common(sp)

    sp = sub.add_parser("reproduce", help="canned figure-reproduction sweeps")
    sp.add_argument("--figure", required=True, choices=sorted(reports.RECIPES))
    sp.add_argument("--fast", action="store_true")
    sp.add_argument("--trials", type=float, default=None)
    _add_common(sp, seed=11)

    return ap


RUNNERS = {
    "lattice-info": run_lattice_info,
    "qubit-mc": run_qubit_mc,
    "o2o": run_o2o,
    "o2o-sweep": run_o2o_sweep,
    "breakeven": run_breakeven,
    "capacity": run_capacity,
    "fock-sbs": run_fock_sbs,
    "fock-lindblad": run_fock_lindblad,
    "fock-spectrum": run_fock_spectrum,
    "wigner": run_wigner,
    "reproduce": run_reproduce,
}


def _apply_config(parser, argv):
    """Resolve --config into subcommand argv; unknown keys are rejected."""
    ns, _ = parser.parse_known_args(argv)
    if not ns.config:
        return argv
    try:
        with open(ns.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config: {exc}")
    allowed = {"experiment", "params", "seed", "output", "threads"}
    unknown = set(cfg) - allowed
    if unknown:
        parser.error(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in cfg or cfg["experiment"] not in RUNNERS:
        parser.error(f"config must name an experiment from {sorted(RUNNERS)}")
    out = [cfg["experiment"]]
    for key, val in (cfg.get("params") or {}).items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                out.append(flag)
        else:
            out += [flag, str(val)]
    if "seed" in cfg:
        out += ["--seed", str(cfg["seed"])]
    if "threads" in cfg:
        out += ["--threads", str(cfg["threads"])]
    if "output" in cfg:
        out += ["--out", str(cfg["output"])]
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    argv = _apply_config(parser, argv)
    args = parser.parse_args(argv)
    if not args.experiment:
        parser.print_help()
        return 2
    cfg = {k: v for k, v in vars(args).items() if k != "config"}
    try:
        RUNNERS[args.experiment](args, cfg)
    except GkpLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
