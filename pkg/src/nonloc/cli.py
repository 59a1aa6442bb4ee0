"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 numerical failure (non-convergence,
annihilated projections).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from math import isfinite

import numpy as np

from . import __version__
from .entanglement import (
    alpha_closed_form,
    full_inseparability_report,
    is_fully_inseparable,
    p_col_threshold,
    p_nloc_threshold,
    p_ppt_threshold,
    pt_certificate,
)
from .linalg import StateError, dm, fidelity, load_state, save_state
from .localizability import (
    NoSupportError,
    certify_nonlocalizable,
    is_nonlocalizable,
)
from .localization import (
    conditional_localize,
    gamma_closed_form,
    success_probability,
    unconditional_localize,
)
from .states import basis_ket, family_mixture_weights, ghz, rho_p_mu
from .tomography import (
    ConvergenceError,
    CountsError,
    CountTable,
    make_statistic,
    maxlik_reconstruct,
    mix_frequencies,
    monte_carlo_many,
    simulate_counts,
)

DEFAULT_SEED = 7
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def default_seed() -> int:
    return int(os.environ.get("NONLOC_SEED", DEFAULT_SEED))


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _round(obj):
    """Round floats to 12 significant digits for stable, locale-free output."""
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(fmt(x)) if isfinite(x) else None
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_report(doc: dict) -> str:
    return json.dumps(_round(doc), sort_keys=True, indent=2) + "\n"


def digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _report(args, inputs: dict, results: dict, seed: int | None = None) -> dict:
    doc = {
        "command": args.command_line,
        "version": __version__,
        "inputs": {k: digest(v) for k, v in inputs.items()},
        "results": results,
    }
    if seed is not None:
        doc["seed"] = seed
    return doc


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ------------------------------------------------------------------ commands

def thresholds_csv(mu_steps: int) -> str:
    if mu_steps < 2:
        raise ValueError("--mu-steps must be at least 2")
    lines = ["mu,p_ppt,p_nloc,p_col"]
    for mu in np.linspace(0.0, 1.0, mu_steps):
        mu = float(mu)
        lines.append(",".join(fmt(v) for v in (mu, p_ppt_threshold(mu), p_nloc_threshold(mu), p_col_threshold(mu))))
    return "\n".join(lines) + "\n"


def certification(rho: np.ndarray) -> dict:
    alphas = full_inseparability_report(rho)
    betas = certify_nonlocalizable(rho)
    return {
        "alpha": {"ABC"[c.qubit]: c.min_eigenvalue for c in alphas},
        "beta": {
            "ABC"[c.measured_qubit]: {"value": c.beta_min, "theta": c.arg_theta, "phi": c.arg_phi}
            for c in betas
        },
        "fully_inseparable": is_fully_inseparable(alphas),
        "nonlocalizable": is_nonlocalizable(betas),
    }


def localization(rho: np.ndarray, mode: str) -> tuple[np.ndarray, dict]:
    if mode == "conditional":
        out, p0 = conditional_localize(rho)
        return out, {"mode": mode, "p0": p0, "delta": pt_certificate(out, 0).min_eigenvalue}
    out = unconditional_localize(rho)
    return out, {"mode": mode, "gamma": pt_certificate(out, 0).min_eigenvalue}


def cmd_state_make(args):
    rho = rho_p_mu(args.p, args.mu)
    save_state(args.out, rho)


def cmd_thresholds(args):
    _write(args.out, thresholds_csv(args.mu_steps))


def cmd_certify(args):
    rho = load_state(args.input)
    if rho.shape != (8, 8):
        raise StateError("certify needs a 3-qubit state")
    _write(args.report, dump_report(_report(args, {"state": args.input}, certification(rho))))


def cmd_localize(args):
    rho = load_state(args.input)
    if rho.shape != (8, 8):
        raise StateError("localize needs a 3-qubit state")
    out, summary = localization(rho, args.mode)
    if args.out:
        save_state(args.out, out)
    for k, v in summary.items():
        print(f"{k} = {v if isinstance(v, str) else fmt(v)}")


def cmd_tomo_simulate(args):
    rho = load_state(args.state)
    seed = default_seed() if args.seed is None else args.seed
    simulate_counts(rho, args.mean, seed).save(args.out)


def cmd_tomo_reconstruct(args):
    counts = CountTable.load(args.counts)
    save_state(args.out, maxlik_reconstruct(counts))


def cmd_tomo_mc(args):
    counts = CountTable.load(args.counts)
    seed = default_seed() if args.seed is None else args.seed
    inputs = {"counts": args.counts}
    stats = {}
    for name in args.statistic:
        reference = None
        if name.startswith("fidelity:"):
            name, ref_path = name.split(":", 1)
            reference = load_state(ref_path)
            inputs["reference"] = ref_path
        stats[name] = make_statistic(name, reference)
    results = monte_carlo_many(counts, args.samples, seed, stats, workers=args.workers)
    body = {n: {"mean": r.mean, "std": r.std, "n_samples": r.n_samples, "n_failed": r.n_failed}
            for n, r in results.items()}
    _write(args.report, dump_report(_report(args, inputs, body, seed)))


def pipeline_demo(p: float, mu: float, mean_counts: float, seed: int, samples: int, workers: int = 1) -> dict:
    """Simulate, mix, reconstruct, certify, localize and bootstrap one family state.

    The target state is assembled, as in the laboratory, from separately
    measured GHZ data and the eight computational basis states.
    """
    ideal = rho_p_mu(p, mu)
    w_ghz, w_basis = family_mixture_weights(p, mu)
    sources = [dm(ghz())] + [dm(basis_ket(format(b, "03b"))) for b in range(8)]
    sim_seeds = np.random.SeedSequence(seed).spawn(len(sources))
    tables = [simulate_counts(s, mean_counts, np.random.default_rng(ss)) for s, ss in zip(sources, sim_seeds)]
    weights = [w_ghz, *w_basis]
    rho_exp = maxlik_reconstruct(mix_frequencies(tables, weights))

    stats = {"fidelity": make_statistic("fidelity", ideal)}
    for q in "ABC":
        stats[f"alpha_{q}"] = make_statistic(f"alpha_{q}")
        stats[f"beta_{q}"] = make_statistic(f"beta_{q}")
    mc = monte_carlo_many(tables, samples, seed, stats, weights=weights, workers=workers)

    cond_state, p0 = conditional_localize(rho_exp)
    uncond_state = unconditional_localize(rho_exp)
    ideal_cert = certification(ideal)
    return {
        "params": {"p": p, "mu": mu, "mean_counts": mean_counts, "samples": samples},
        "theory": {
            "alpha": alpha_closed_form(p, mu),
            "beta": {q: v["value"] for q, v in ideal_cert["beta"].items()},
            "p0": success_probability(p, mu),
            "delta": alpha_closed_form(p, mu) / success_probability(p, mu),
            "gamma": gamma_closed_form(p, mu),
            "fully_inseparable": ideal_cert["fully_inseparable"],
            "nonlocalizable": ideal_cert["nonlocalizable"],
        },
        "reconstructed": {
            "fidelity": fidelity(rho_exp, ideal),
            **certification(rho_exp),
            "conditional": {"p0": p0, "delta": pt_certificate(cond_state, 0).min_eigenvalue},
            "unconditional": {"gamma": pt_certificate(uncond_state, 0).min_eigenvalue},
        },
        "monte_carlo": {n: {"mean": r.mean, "std": r.std, "n_failed": r.n_failed} for n, r in mc.items()},
    }


def cmd_pipeline_demo(args):
    seed = default_seed() if args.seed is None else args.seed
    body = pipeline_demo(args.p, args.mu, args.mean, seed, args.samples, args.workers)
    _write(args.report, dump_report(_report(args, {}, body, seed)))


# ------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonloc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    state = sub.add_parser("state", help="state construction").add_subparsers(dest="action", required=True)
    make = state.add_parser("make", help="write rho_{p,mu} as JSON")
    make.add_argument("--p", type=float, required=True)
    make.add_argument("--mu", type=float, required=True)
    make.add_argument("--out", required=True)
    make.set_defaults(func=cmd_state_make)

    th = sub.add_parser("thresholds", help="CSV of p_ppt, p_nloc, p_col against mu")
    th.add_argument("--mu-steps", type=int, default=101)
    th.add_argument("--out")
    th.set_defaults(func=cmd_thresholds)

    cert = sub.add_parser("certify", help="full inseparability and nonlocalizability certificates")
    cert.add_argument("--in", dest="input", required=True)
    cert.add_argument("--report")
    cert.set_defaults(func=cmd_certify)

    loc = sub.add_parser("localize", help="CNOT-based entanglement localization")
    loc.add_argument("--in", dest="input", required=True)
    loc.add_argument("--mode", choices=("conditional", "unconditional"), default="conditional")
    loc.add_argument("--out")
    loc.set_defaults(func=cmd_localize)

    tomo = sub.add_parser("tomo", help="tomography tools").add_subparsers(dest="action", required=True)
    sim = tomo.add_parser("simulate", help="Poisson counts for all 216 settings")
    sim.add_argument("--state", required=True)
    sim.add_argument("--mean", type=float, default=1e4)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_tomo_simulate)
    rec = tomo.add_parser("reconstruct", help="maximum-likelihood reconstruction")
    rec.add_argument("--counts", required=True)
    rec.add_argument("--out", required=True)
    rec.set_defaults(func=cmd_tomo_reconstruct)
    mc = tomo.add_parser("mc", help="Monte Carlo error bars")
    mc.add_argument("--counts", required=True)
    mc.add_argument("--samples", type=int, default=1000)
    mc.add_argument("--seed", type=int)
    mc.add_argument("--statistic", action="append", required=True,
                    help="alpha_A|alpha_B|alpha_C|beta_A|beta_B|beta_C|fidelity:ref.json (repeatable)")
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--report")
    mc.set_defaults(func=cmd_tomo_mc)

    demo = sub.add_parser("pipeline-demo", help="end-to-end simulated experiment")
    demo.add_argument("--p", type=float, default=0.25)
    demo.add_argument("--mu", type=float, default=1.0)
    demo.add_argument("--mean", type=float, default=1e4)
    demo.add_argument("--seed", type=int)
    demo.add_argument("--samples", type=int, default=100)
    demo.add_argument("--workers", type=int, default=1)
    demo.add_argument("--report")
    demo.set_defaults(func=cmd_pipeline_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.command_line = " ".join(["nonloc", *argv])
    try:
        args.func(args)
    except (ConvergenceError, NoSupportError) as exc:
        print(f"nonloc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (StateError, CountsError, OSError, ValueError, IndexError) as exc:
        print(f"nonloc: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
