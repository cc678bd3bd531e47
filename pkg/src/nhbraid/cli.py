"""Batch command-line front end.

Each subcommand emits one JSON document (or a CSV flattening of its
series) with the fixed top-level keys config / series / events / braid /
eps / diagnostics, echoing the fully resolved configuration for
reproducibility.  Identical configuration and seed give byte-identical
output.  Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, dilation, eps, model, reconstruct, spectral
from .braid import exponent_sum, free_reduce, permutation_of, tau_to_sigma
from .errors import NumericalError


def _parse_pair(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"{name} must be 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def _empty_report(subcommand: str, config: dict) -> dict:
    return {
        "config": {"subcommand": subcommand, "version": __version__, **config},
        "series": {},
        "events": [],
        "braid": {},
        "eps": {},
        "diagnostics": {},
    }


def _emit(report: dict, output: str | None, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    else:
        series = report["series"]
        if not series:
            raise SystemExit(2)
        buf = io.StringIO()
        writer = csv.writer(buf)
        keys = list(series.keys())
        writer.writerow(keys)
        for row in zip(*(series[k] for k in keys)):
            writer.writerow(row)
        text = buf.getvalue()
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_braid_scan(args) -> dict:
    loop = model.Loop(args.alpha, args.r, tuple(args.center))
    path = spectral.track_bands(loop, n_min=args.n_samples)
    phases = spectral.relative_phases(path)
    events = spectral.detect_crossings(path, phases)
    word = tau_to_sigma(events)
    reduced = free_reduce(word)
    report = _empty_report("braid-scan", {
        "alpha": args.alpha, "r": args.r, "center": list(args.center),
        "n_samples": args.n_samples,
    })
    report["series"] = {
        "theta": [float(t) for t in path.thetas],
        **{f"band{i + 1}_re": [float(v) for v in path.bands[i].real] for i in range(3)},
        **{f"band{i + 1}_im": [float(v) for v in path.bands[i].imag] for i in range(3)},
        "phi_12": [float(v) for v in phases[0]],
        "phi_23": [float(v) for v in phases[1]],
        "phi_31": [float(v) for v in phases[2]],
    }
    report["events"] = [
        {"theta": float(ev.theta), "i": ev.i, "j": ev.j, "label": f"tau_{ev.i}{ev.j}"}
        for ev in events
    ]
    report["braid"] = {
        "word": word.to_text(),
        "reduced": reduced.to_text(),
        "permutation": list(permutation_of(word).images),
        "exponent_sum": exponent_sum(word),
        "closure_permutation": path.closure_permutation(),
    }
    report["diagnostics"] = {
        "n_theta": len(path.thetas),
        "min_band_gap": float(min(
            min(abs(path.bands[i, k] - path.bands[j, k]) for i, j in ((0, 1), (1, 2), (0, 2)))
            for k in range(path.bands.shape[1]))),
    }
    return report


def _cmd_ep_atlas(args) -> dict:
    report = _empty_report("ep-atlas", {
        "alpha_range": list(args.alpha_range), "step": args.step,
        "region": list(args.region), "trace": args.trace,
        "order_at": args.order_at, "charge_at": args.charge_at,
    })
    eps_out: dict = {}
    if args.trace:
        (x0, x1, y0, y1) = args.region
        trajectories = eps.trace_ep_paths(tuple(args.alpha_range), step=args.step,
                                          region=((x0, x1), (y0, y1)))
        eps_out["trajectories"] = [{
            "label": t.label,
            "charge": t.charge,
            "created": t.created,
            "annihilated": t.annihilated,
            "merged": t.merged,
            "partner": t.partner,
            "alpha": [float(a) for a in t.alphas],
            "k1": [float(v) for v in t.positions[:, 0]],
            "k2": [float(v) for v in t.positions[:, 1]],
        } for t in trajectories]
    orders = []
    for spec_text in args.order_at:
        alpha_text, point_text = spec_text.split(":")
        point = _parse_pair(point_text, "--order-at point")
        res = eps.ep_order(float(alpha_text), point)
        orders.append({
            "alpha": float(alpha_text),
            "point": [res.point[0], res.point[1]],
            "order": res.order,
            "degenerate_pair": (list(res.degenerate_pair)
                                if isinstance(res.degenerate_pair, tuple)
                                else res.degenerate_pair),
            "fidelities": [[float(v) for v in row] for row in res.fidelities],
            "eigenvalues_re": [float(v) for v in res.eigenvalues.real],
            "eigenvalues_im": [float(v) for v in res.eigenvalues.imag],
            "residual": res.residual,
        })
    eps_out["orders"] = orders
    charges = []
    for spec_text in args.charge_at:
        alpha_text, point_text, radius_text = spec_text.split(":")
        point = _parse_pair(point_text, "--charge-at point")
        nu = eps.charge(float(alpha_text), point, float(radius_text))
        charges.append({"alpha": float(alpha_text), "center": list(point),
                        "radius": float(radius_text), "charge": nu})
    eps_out["charges"] = charges
    report["eps"] = eps_out
    return report


def _cmd_transition(args) -> dict:
    report = _empty_report("transition", {
        "r": args.r, "alpha_range": list(args.alpha_range), "step": args.step,
    })
    trajectories = eps.trace_ep_paths(tuple(args.alpha_range), step=args.step)
    alpha0 = eps.transition_alpha(args.r, trajectories=trajectories)
    report["eps"] = {
        "transition_alpha": float(alpha0),
        "labels": sorted(t.label for t in trajectories),
    }
    return report


def _cmd_dilate_verify(args) -> dict:
    p = model.ModelParams(args.alpha, args.k[0], args.k[1])
    H = model.hamiltonian(p)
    m0_scale = args.m0
    auto = False
    if m0_scale is None:
        m0_scale = 1.3
        if dilation.metric_margin(H, args.T, m0_scale * np.eye(3), s=args.s) < 1e-3:
            # Smallest isotropic M(0) keeping min eig(M - I) >= 1e-3 on [0, T].
            worst = math.inf
            from scipy.linalg import expm
            for t in np.linspace(0.0, args.T, 256):
                G = expm(-1j * (args.s * H).conj().T * t) @ expm(1j * args.s * H * t)
                worst = min(worst, float(np.linalg.eigvalsh((G + G.conj().T) / 2.0).min()))
            m0_scale = 1.01 * (1.0 + 1e-3) / worst
            auto = True
    M0 = m0_scale * np.eye(3)
    bundle = dilation.build_dilation(H, args.T, M0=M0, steps=args.steps, s=args.s)
    herm = max(float(np.abs(bundle.Xi[k] - bundle.Xi[k].conj().T).max())
               for k in range(len(bundle.time_grid)))
    herm = max(herm, max(float(np.abs(bundle.Lambda[k] - bundle.Lambda[k].conj().T).max())
                         for k in range(len(bundle.time_grid))))
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    residual = dilation.verify_embedding(bundle, H, psi0, args.T)
    margin = dilation.metric_margin(H, args.T, M0, s=args.s)
    report = _empty_report("dilate-verify", {
        "alpha": args.alpha, "k": list(args.k), "T": args.T,
        "steps": args.steps, "s": args.s, "m0": m0_scale, "m0_auto": auto,
    })
    report["diagnostics"] = {
        "embedding_residual": float(residual),
        "max_hermiticity_error": herm,
        "metric_margin": float(margin),
    }
    return report


def _cmd_reconstruct_demo(args) -> dict:
    loop = model.Loop(args.alpha, args.r)
    p = model.loop_point(loop, args.theta)
    ratios = reconstruct.forward_ratios(p)
    spec = spectral.eigensolve(model.hamiltonian(p))
    truth = np.sort_complex(spec.eigenvalues)
    report = _empty_report("reconstruct-demo", {
        "alpha": args.alpha, "theta": args.theta, "r": args.r,
        "noise": args.noise, "trials": args.trials, "seed": args.seed,
    })
    rng = np.random.default_rng(args.seed)
    if args.noise == 0.0:
        eigs, residual = reconstruct.solve_eigenvalues(ratios, seed=args.seed)
        got = np.sort_complex(eigs)
        report["eps"] = {
            "indices": list(ratios.indices),
            "recovered_re": [float(v) for v in got.real],
            "recovered_im": [float(v) for v in got.imag],
            "truth_re": [float(v) for v in truth.real],
            "truth_im": [float(v) for v in truth.imag],
            "max_error": float(np.abs(got - truth).max()),
            "residual": float(residual),
        }
        return report
    recovered = []
    failures = 0
    for trial in range(args.trials):
        noisy = reconstruct.PopulationRatios(
            ratios.indices,
            tuple(max(v * (1.0 + args.noise * rng.standard_normal()), 0.0)
                  for v in ratios.ratio_a),
            tuple(max(v * (1.0 + args.noise * rng.standard_normal()), 0.0)
                  for v in ratios.ratio_b))
        try:
            eigs, _ = reconstruct.solve_eigenvalues(noisy, seed=args.seed + trial + 1,
                                                    n_starts=32)
            recovered.append(np.sort_complex(eigs))
        except NumericalError:
            failures += 1
    stack = np.array(recovered)
    report["eps"] = {
        "indices": list(ratios.indices),
        "truth_re": [float(v) for v in truth.real],
        "truth_im": [float(v) for v in truth.imag],
        "mean_re": [float(v) for v in stack.real.mean(axis=0)],
        "mean_im": [float(v) for v in stack.imag.mean(axis=0)],
        "std_re": [float(v) for v in stack.real.std(axis=0)],
        "std_im": [float(v) for v in stack.imag.std(axis=0)],
        "trials_ok": len(recovered),
        "trials_failed": failures,
    }
    return report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhbraid",
        description="Spectral topology of the three-band non-Hermitian model")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_output(p):
        p.add_argument("--output", default=None, help="write report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("braid-scan", help="track bands along a loop and read off the braid")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--center", type=lambda s: _parse_pair(s, "--center"), default=(0.0, 0.0))
    p.add_argument("--n-samples", type=int, default=64)
    add_output(p)
    p.set_defaults(func=_cmd_braid_scan)

    p = sub.add_parser("ep-atlas", help="trace EP trajectories, orders, and charges")
    p.add_argument("--alpha-range", type=lambda s: _parse_pair(s, "--alpha-range"),
                   default=(0.0, 3.2))
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--region", type=lambda s: tuple(float(v) for v in s.split(",")),
                   default=(-3.5, 3.5, -3.5, 3.5),
                   help="search rectangle x0,x1,y0,y1")
    p.add_argument("--no-trace", dest="trace", action="store_false")
    p.add_argument("--order-at", action="append", default=[],
                   metavar="ALPHA:K1,K2", help="classify EP order at a point")
    p.add_argument("--charge-at", action="append", default=[],
                   metavar="ALPHA:K1,K2:RADIUS", help="winding charge around a point")
    add_output(p)
    p.set_defaults(func=_cmd_ep_atlas)

    p = sub.add_parser("transition", help="loop-crossing transition alpha for radius r")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--alpha-range", type=lambda s: _parse_pair(s, "--alpha-range"),
                   default=(0.0, 3.2))
    p.add_argument("--step", type=float, default=0.01)
    add_output(p)
    p.set_defaults(func=_cmd_transition)

    p = sub.add_parser("dilate-verify", help="build the Hermitian dilation and check it")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k", type=lambda s: _parse_pair(s, "--k"), required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--m0", type=float, default=None,
                   help="isotropic M(0) scale; default 1.3, auto-raised if the metric degenerates")
    add_output(p)
    p.set_defaults(func=_cmd_dilate_verify)

    p = sub.add_parser("reconstruct-demo", help="forward + inverse eigenvalue acquisition")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--r", type=float, default=1.4)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    add_output(p)
    p.set_defaults(func=_cmd_reconstruct_demo)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "n_samples") and args.n_samples < 16:
        parser.error("--n-samples must be at least 16")
    if hasattr(args, "r") and args.r is not None and args.r <= 0:
        parser.error("--r must be positive")
    try:
        report = args.func(args)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    _emit(report, args.output, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
