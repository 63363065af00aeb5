"""Command-line interface.

Subcommands: gen, perturb, spectrum, fidelity, decompose, sweep.
Exit codes: 0 success, 2 invalid configuration or input, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

import numpy as np

from permflip import decomposition, harness, spectral
from permflip.exceptions import NumericalFailureError
from permflip.fidelity import random_state, relative_error_bounds
from permflip.operator_model import (
    ErrorSpec,
    load_errorspec,
    load_permsum,
    materialize,
    permsum_to_dict,
    save_errorspec,
    save_permsum,
)


def _c2list(z: complex) -> list:
    return [z.real, z.imag]


def _parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"grid step must be positive, got {step}")
    values = []
    i = 0
    while True:
        value = start + i * step
        if value > stop + 1e-12:
            break
        values.append(min(value, stop))
        i += 1
    if not values:
        raise ValueError(f"grid {text!r} contains no values")
    return tuple(values)


def _cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    a = harness.random_permsum(args.n, args.terms, args.alpha, rng)
    save_permsum(a, args.out)
    if args.errors_out:
        gmax = args.gmax if args.gmax is not None else args.n
        if not 1 <= gmax <= args.n:
            raise ValueError(f"gmax must lie in [1, {args.n}], got {gmax}")
        k = args.terms
        p = rng.uniform(0.0, args.pmax, k)
        b = np.array([harness.draw_mask(args.n, gmax, rng) for _ in range(k)])
        q = rng.uniform(0.0, args.qmax, k)
        phi = np.array([harness.draw_mask(args.n, gmax, rng) for _ in range(k)])
        save_errorspec(ErrorSpec(p=p, b=b, q=q, phi=phi), args.errors_out)
    return 0


def _cmd_perturb(args) -> int:
    a = load_permsum(args.infile)
    e = load_errorspec(args.errors)
    b = harness.apply_channel(a, e, args.model)
    save_permsum(b, args.out)
    return 0


def _cmd_spectrum(args) -> int:
    a = load_permsum(args.infile)
    dense_a = materialize(a)
    spec_a = spectral.eigenvalues(dense_a)
    report = {
        "eigenvalues": [_c2list(z) for z in spec_a.eigenvalues],
        "dominant": _c2list(spectral.dominant(spec_a)),
        "residual_bound": spec_a.residual_bound,
        "disks": [
            {"center": _c2list(d.center), "radius": d.radius}
            for d in spectral.gershgorin(dense_a)
        ],
    }
    if args.against:
        b = load_permsum(args.against)
        dense_b = materialize(b)
        spec_b = spectral.eigenvalues(dense_b)
        deltas = spectral.radius_deltas(dense_a, dense_b)
        report.update(
            {
                "eigenvalues_b": [_c2list(z) for z in spec_b.eigenvalues],
                "dominant_b": _c2list(spectral.dominant(spec_b)),
                "residual_bound_b": spec_b.residual_bound,
                "re": spectral.relative_error(
                    spectral.dominant(spec_a), spectral.dominant(spec_b)
                ),
                "nmse": spectral.nmse(spec_a, spec_b),
                "radius_deltas": deltas.tolist(),
                "max_radius_delta": float(deltas.max()),
            }
        )
    if args.errors:
        e = load_errorspec(args.errors)
        alphas = a.alphas()
        report["bitflip_radius_bound"] = spectral.bitflip_radius_bound(e, alphas)
        report["phaseflip_radius_bound"] = spectral.phaseflip_radius_bound(e, alphas)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_fidelity(args) -> int:
    a = load_permsum(args.a)
    b = load_permsum(args.b)
    if a.n != b.n:
        raise ValueError(f"operators disagree on qubit count: {a.n} vs {b.n}")
    dense_a = materialize(a)
    dense_b = materialize(b)
    rng = np.random.default_rng(args.seed)
    header = (
        "state,f_overlap,f_re,relative_error,bound_lower,bound_upper,"
        "sigma_min_a,sigma_max_a,sigma_max_b"
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for index in range(args.states):
            psi = random_state(a.n, args.mode, rng)
            rep = relative_error_bounds(dense_a, dense_b, psi)
            cells = [
                str(index),
                f"{rep.f_overlap:.17g}",
                f"{rep.f_re:.17g}",
                f"{rep.relative_error:.17g}",
                f"{rep.bound_lower:.17g}",
                f"{rep.bound_upper:.17g}",
                f"{rep.sigma_min_a:.17g}",
                f"{rep.sigma_max_a:.17g}",
                f"{rep.sigma_max_b:.17g}",
            ]
            fh.write(",".join(cells) + "\n")
    return 0


def _cmd_decompose(args) -> int:
    m = decomposition.read_matrix_csv(args.infile)
    scalings, permsum = decomposition.ingest(m, tol=args.tol)
    save_permsum(permsum, args.out)
    if args.scalings_out:
        with open(args.scalings_out, "w", encoding="utf-8") as fh:
            json.dump({"d1": scalings.d1.tolist(), "d2": scalings.d2.tolist()}, fh)
            fh.write("\n")
    return 0


def _cmd_sweep(args) -> int:
    if args.config:
        config = harness.SweepConfig.from_json(args.config)
    else:
        config = harness.SweepConfig()
    overrides = {
        "n": args.n,
        "terms": args.terms,
        "alpha_range": args.alpha,
        "channel": args.channel,
        "gmax": args.gmax,
        "trials": args.trials,
        "states_per_trial": args.states,
        "state_mode": args.state_mode,
        "seed": args.seed,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    if args.pmax_grid is not None:
        config.pmax_grid = _parse_grid(args.pmax_grid)
    if args.fixed_matrix:
        config.fixed_matrix = True
    if args.metrics == "spectral":
        records = harness.run_spectral_sweep(config, workers=args.workers)
    else:
        records = harness.run_fidelity_sweep(config, workers=args.workers)
    harness.write_csv(records, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permflip",
        description="Bit-flip/phase-flip perturbation analysis for permutation-sum operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random operator (and optional error spec)")
    gen.add_argument("--n", type=int, default=4)
    gen.add_argument("--terms", type=int, default=8)
    gen.add_argument("--alpha", choices=harness.ALPHA_RANGES, default="positive")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--errors-out", default=None)
    gen.add_argument("--pmax", type=float, default=0.0)
    gen.add_argument("--qmax", type=float, default=0.0)
    gen.add_argument("--gmax", type=int, default=None)
    gen.set_defaults(func=_cmd_gen)

    perturb = sub.add_parser("perturb", help="apply an error channel (mixture semantics)")
    perturb.add_argument("--model", choices=harness.CHANNELS, required=True)
    perturb.add_argument("--in", dest="infile", required=True)
    perturb.add_argument("--errors", required=True)
    perturb.add_argument("--out", required=True)
    perturb.set_defaults(func=_cmd_perturb)

    spectrum = sub.add_parser("spectrum", help="eigenvalues, disks, and error metrics")
    spectrum.add_argument("--in", dest="infile", required=True)
    spectrum.add_argument("--against", default=None)
    spectrum.add_argument("--errors", default=None,
                          help="error spec JSON; adds radius-change bounds to the report")
    spectrum.add_argument("--out", required=True)
    spectrum.set_defaults(func=_cmd_spectrum)

    fid = sub.add_parser("fidelity", help="state fidelities and bound chain over random states")
    fid.add_argument("--a", required=True)
    fid.add_argument("--b", required=True)
    fid.add_argument("--states", type=int, default=30)
    fid.add_argument("--mode", default="positive")
    fid.add_argument("--seed", type=int, default=0)
    fid.add_argument("--out", required=True)
    fid.set_defaults(func=_cmd_fidelity)

    dec = sub.add_parser("decompose", help="positive matrix -> scalings + permutation sum")
    dec.add_argument("--in", dest="infile", required=True)
    dec.add_argument("--tol", type=float, default=decomposition.BIRKHOFF_TOL)
    dec.add_argument("--out", required=True)
    dec.add_argument("--scalings-out", default=None)
    dec.set_defaults(func=_cmd_decompose)

    sweep = sub.add_parser("sweep", help="Monte-Carlo sweep over an error-probability grid")
    sweep.add_argument("--config", default=None, help="JSON config; flags override it")
    sweep.add_argument("--n", type=int, default=None)
    sweep.add_argument("--terms", type=int, default=None)
    sweep.add_argument("--alpha", choices=harness.ALPHA_RANGES, default=None)
    sweep.add_argument("--channel", choices=harness.CHANNELS, default=None)
    sweep.add_argument("--pmax-grid", default=None, help="start:stop:step")
    sweep.add_argument("--gmax", type=int, default=None)
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--states", type=int, default=None)
    sweep.add_argument("--state-mode", default=None)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--metrics", choices=("spectral", "fidelity"), default="spectral")
    sweep.add_argument("--fixed-matrix", action="store_true")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailureError as exc:
        print(f"permflip: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ZeroDivisionError as exc:
        print(f"permflip: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"permflip: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"permflip: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
