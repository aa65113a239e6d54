"""Command-line entry point.

Exit codes: 0 ok, 1 validation error, 2 guard exceeded, 3 internal assertion failure.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import channel, converse_bounds as cb, lossy, mary_ht
from .binary_ht import alpha_beta, likelihood_ratio, ratio_leq
from .instances import random_decoder, random_joint, random_measure, ternary_joint
from .measures import (
    FiniteMeasure,
    JointDistribution,
    RandomizedKernel,
    ValidationError,
    joint_from_dict,
    joint_to_dict,
    load_instance,
    marginals,
)

log = logging.getLogger("bayes_mht")

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD, EXIT_ASSERTION = 0, 1, 2, 3
TOL = 1e-9


class CheckFailed(RuntimeError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_csv(comments: list[str], header: list[str], rows: list[list[float]]) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        if not all(np.isfinite(v) for v in row):
            raise CheckFailed(f"non-finite value in row {row}")
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, newline="\n")


# --- fig1 ------------------------------------------------------------------


def fig1_csv(gamma_grid: int = 101) -> str:
    """Spectrum-bound curves of the ternary example as CSV text."""
    pvy = ternary_joint()
    sol = mary_ht.map_solve(pvy)
    p_y = marginals(pvy)[1].weights
    mass = pvy.mass
    r_star = likelihood_ratio(mass, np.broadcast_to(sol.qy_star.weights, mass.shape))
    r_py = likelihood_ratio(mass, np.broadcast_to(p_y, mass.shape))

    jumps = np.concatenate([r_star.ravel(), r_py.ravel()])
    gammas = np.unique(np.concatenate([np.linspace(0.0, 1.0, gamma_grid), jumps[np.isfinite(jumps)]]))

    rows = []
    for g in gammas:
        t_star = mass[ratio_leq(r_star, g)].sum()
        t_py = mass[ratio_leq(r_py, g)].sum()
        rows.append([g, sol.error, t_star - g, t_py - g, (1 - g) * t_py, (1 - g) * t_star])
    table = np.array(rows)

    # optima must match the exact jump-point sweeps
    vh_best = cb.verdu_han(pvy).value
    checks = {
        "spectrum_qstar peaks at the exact error": abs(table[:, 2].max() - sol.error) <= TOL,
        "verdu_han_py peak matches jump-point sweep": abs(table[:, 3].max() - vh_best) <= TOL,
        "all columns are lower bounds": bool(np.all(table[:, 2:] <= sol.error + TOL)),
    }
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        raise CheckFailed("; ".join(failed))

    comments = [
        "scenario: ternary example, uniform prior, likelihood rows (.40 .27 .33) (.27 .40 .33) (.33 .27 .40)",
        f"exact minimum error probability: {_fmt(sol.error)}",
        "spectrum_qstar = Pr[P_VY/Q*_Y <= gamma] - gamma; verdu_han_py = Pr[P_VY/P_Y <= gamma] - gamma",
        "poor_verdu_py = (1-gamma) Pr[P_VY/P_Y <= gamma]; tight_pv = (1-gamma) Pr[P_VY/Q*_Y <= gamma]",
        f"peak spectrum_qstar = {_fmt(table[:, 2].max())}; peak verdu_han_py = {_fmt(vh_best)}",
        "literature: Verdu-Han and Poor-Verdu peaks reported as 0.574; "
        "Chen-Alajaji bound at theta=25 reported as 0.579 (annotation only, not computed)",
    ]
    header = ["gamma", "exact", "spectrum_qstar", "verdu_han_py", "poor_verdu_py", "tight_pv"]
    return _write_csv(comments, header, rows)


# --- fig2 ------------------------------------------------------------------


def fig2_csv(n_max: int = 6, delta: float = 0.1, M: int = 4, workers: int = 1, n_min: int = 1) -> str:
    """Best-code error, meta-converse at ``Q*_Y`` and the uniform relaxation per blocklength."""
    rows, comments = [], [
        f"scenario: BSC crossover {delta}, M = {M} codewords, exhaustive best-code search",
        "best_code_error: min over codes of ML error; metaconverse_qstar: per-code bound at Q*_Y; "
        "relaxed_uniform: input-relaxed bound at uniform P_X, Q_Y",
    ]
    for n in range(n_min, n_max + 1):
        if 2**n < M:
            continue
        W = channel.bsc(n, delta)
        code, err = channel.best_code_search(W, n, M, workers=workers)
        mc = channel.metaconverse_code(W, code)
        relaxed = channel.relaxed_metaconverse(W, M)
        if abs(mc - err) > TOL:
            raise CheckFailed(f"n={n}: meta-converse {mc} differs from best-code error {err}")
        if relaxed > min(err, mc) + TOL:
            raise CheckFailed(f"n={n}: relaxed bound {relaxed} exceeds the exact error {err}")
        comments.append(f"n={n} best code: {' '.join(code.bits())}")
        rows.append([n, err, mc, relaxed])
    header = ["n", "best_code_error", "metaconverse_qstar", "relaxed_uniform"]
    return _write_csv(comments, header, rows)


# --- solve -----------------------------------------------------------------


def _sweep_dict(sweep: cb.GammaSweep) -> dict[str, float]:
    return {"gamma": sweep.gamma, "value": sweep.value}


def _pick_qy(pvy: JointDistribution, choice: str, qy_file: Optional[str], data: dict) -> np.ndarray:
    if choice == "pstar":
        return mary_ht.map_solve(pvy).qy_star.weights
    if choice == "py":
        return marginals(pvy)[1].weights
    if choice == "file":
        if qy_file is not None:
            values = load_instance(qy_file)
            values = values.get("qy", values) if isinstance(values, dict) else values
        elif "qy" in data:
            values = data["qy"]
        else:
            raise ValueError('--qy file needs --qy-file or a "qy" entry in the instance')
        w = FiniteMeasure(values).weights
        if w.size != pvy.num_observations:
            raise ValueError(f"Q_Y has {w.size} entries, expected {pvy.num_observations}")
        return w
    raise ValueError(f"unknown --qy choice {choice!r}")


def solve_report(data: dict[str, Any], qy_choice: str = "py", qy_file: Optional[str] = None) -> dict[str, Any]:
    pvy = joint_from_dict(data)
    sol = mary_ht.map_solve(pvy)
    m = pvy.num_hypotheses
    qstar = sol.qy_star.weights
    qy = _pick_qy(pvy, qy_choice, qy_file, data)

    np_sol = alpha_beta(pvy.flatten(), np.outer(np.full(m, 1 / m), qstar).ravel(), 1 / m)
    spec_star = mary_ht.spectrum_bound(pvy, qstar)
    spec_qy = mary_ht.spectrum_bound(pvy, qy)
    report: dict[str, Any] = {
        "instance": joint_to_dict(pvy),
        "exact": sol.error,
        "mu": sol.mu,
        "qy_star": qstar.tolist(),
        "map_decoder": sol.decoder.rows.tolist(),
        "tie_sets": [list(s) for s in sol.tie_sets],
        "gamma_np": np_sol.gamma,
        "p": np_sol.p,
        "np_test": {"alpha": np_sol.alpha, "beta": np_sol.beta, "acceptance": np_sol.acceptance.tolist()},
        "at_qy_star": {
            "meta_converse": mary_ht.product_meta_converse(pvy, qstar),
            "spectrum": spec_star[0],
            "spectrum_gamma": spec_star[1],
            "counting_measure": mary_ht.counting_meta_converse(pvy),
        },
        "qy_choice": qy_choice,
        "qy": qy.tolist(),
        "at_qy": {
            "meta_converse": mary_ht.product_meta_converse(pvy, qy),
            "spectrum": spec_qy[0],
            "spectrum_gamma": spec_qy[1],
        },
    }

    pv_sweep, pv_flags = cb.poor_verdu_sweep(pvy, qy)
    valid = np.flatnonzero(pv_flags)
    pv_best = None
    if valid.size:
        i = valid[int(np.argmax(pv_sweep.values[valid]))]
        pv_best = {"gamma": float(pv_sweep.gammas[i]), "value": float(pv_sweep.values[i]), "condition_ok": True}
    bounds: dict[str, Any] = {
        "verdu_han": _sweep_dict(cb.verdu_han(pvy, qy)),
        "poor_verdu": pv_best,
        "poor_verdu_condition_always_ok": bool(pv_flags.all()),
        "tight_poor_verdu": _sweep_dict(cb.tight_poor_verdu(pvy)),
    }
    positive_prior = bool(np.all(pvy.mass.sum(axis=1) > 0))
    if positive_prior:
        bank, budgets = cb.bank_of_tests(pvy, qy)
        bank_star, _ = cb.bank_of_tests(pvy, qstar)
        bounds["wolfowitz"] = _sweep_dict(cb.wolfowitz(pvy, qy))
        bounds["wolfowitz_qy_star"] = _sweep_dict(cb.wolfowitz(pvy, qstar))
        bounds["bank_of_tests"] = {"value": bank, "budgets": budgets.tolist()}
        bounds["bank_of_tests_qy_star"] = bank_star
    report["bounds"] = bounds

    eps = sol.error
    checks = {
        "meta_converse_tight_at_qy_star": abs(report["at_qy_star"]["meta_converse"] - eps) <= TOL,
        "spectrum_tight_at_qy_star": abs(spec_star[0] - eps) <= TOL,
        "counting_measure_tight": abs(report["at_qy_star"]["counting_measure"] - eps) <= TOL,
        "tight_poor_verdu_exact": abs(bounds["tight_poor_verdu"]["value"] - eps) <= TOL,
        "meta_converse_at_qy_is_lower_bound": report["at_qy"]["meta_converse"] <= eps + TOL,
        "spectrum_at_qy_is_lower_bound": spec_qy[0] <= eps + TOL,
        "verdu_han_is_lower_bound": bounds["verdu_han"]["value"] <= eps + TOL,
        "poor_verdu_is_lower_bound": pv_best is None or pv_best["value"] <= eps + TOL,
    }
    if positive_prior:
        checks["wolfowitz_is_lower_bound"] = bounds["wolfowitz"]["value"] <= eps + TOL
        checks["bank_of_tests_is_lower_bound"] = bounds["bank_of_tests"]["value"] <= eps + TOL
        checks["bank_of_tests_tight_at_qy_star"] = abs(bounds["bank_of_tests_qy_star"] - eps) <= TOL

    if "metric" in data or "decoder" in data:
        if "decoder" in data:
            decoder = RandomizedKernel(data["decoder"])
        else:
            decoder = mary_ht.max_metric_decoder(data["metric"])
        dec_err = mary_ht.decoder_error(pvy, decoder)
        report["decoder_error"] = dec_err
        aux = JointDistribution(data["auxiliary"]) if "auxiliary" in data else pvy
        alpha, eps1 = mary_ht.decoder_meta_converse(pvy, aux, decoder)
        spec_val, spec_gamma = mary_ht.decoder_spectrum_bound(pvy, aux, decoder)
        report["decoder_alpha_bound"] = alpha
        report["decoder"] = {
            "auxiliary": "file" if "auxiliary" in data else "P_VY",
            "eps1": eps1,
            "alpha_bound": alpha,
            "spectrum_bound": spec_val,
            "spectrum_gamma": spec_gamma,
        }
        checks["decoder_alpha_is_lower_bound"] = alpha <= dec_err + TOL
        checks["decoder_spectrum_is_lower_bound"] = spec_val <= dec_err + TOL
        checks["decoder_error_at_least_exact"] = dec_err >= eps - TOL
        if "metric" in data:
            q_aux, mu_prime = mary_ht.metric_auxiliary(pvy, data["metric"])
            m_alpha, m_eps1 = mary_ht.decoder_meta_converse(pvy, q_aux, decoder)
            m_spec, _ = mary_ht.decoder_spectrum_bound(pvy, q_aux, decoder)
            report["decoder"]["metric_auxiliary"] = {
                "mu_prime": mu_prime,
                "eps1": m_eps1,
                "alpha_bound": m_alpha,
                "spectrum_bound": m_spec,
            }
            if "decoder" not in data:
                checks["metric_auxiliary_tight"] = abs(m_alpha - dec_err) <= TOL and abs(m_spec - dec_err) <= TOL

    report["checks"] = checks
    report["ok"] = all(checks.values())
    return report


# --- lossy -----------------------------------------------------------------


def lossy_report(data: dict[str, Any]) -> dict[str, Any]:
    pv = FiniteMeasure(data["source"])
    if data.get("identity") or "distortion" not in data:
        spec = lossy.DistortionSpec.identity(pv.alphabet_size, data.get("D", 0.0))
    else:
        spec = lossy.DistortionSpec(data["distortion"], data.get("D", 0.0))
    code = lossy.LossyCode(tuple(data["codebook"]))
    qv = FiniteMeasure(data["qv"]) if "qv" in data else FiniteMeasure.uniform(spec.source_size)

    excess = lossy.excess_distortion(pv, spec, code)
    exact = lossy.excess_distortion_exact(pv, spec, code)
    relaxed = lossy.codebook_free_bound(pv, spec, code.M, qv)
    flags = {
        "exact_equal": abs(exact - excess) <= TOL,
        "relaxation_dominated": relaxed <= excess + TOL,
        "relaxation_equal": abs(relaxed - excess) <= TOL,
    }
    return {
        "M": code.M,
        "D": spec.D,
        "excess_distortion": excess,
        "exact": exact,
        "relaxation": relaxed,
        "relaxation_budget": lossy.codebook_free_budget(qv, spec, code.M),
        "test_budget": lossy.lsc_test_budget(qv, spec, code),
        "flags": flags,
        "ok": flags["exact_equal"] and flags["relaxation_dominated"],
    }


# --- harness ---------------------------------------------------------------


def harness_report(seed: int, instances: int) -> dict[str, Any]:
    """Random-instance check of the tightness identities and lower-bound orderings."""
    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}

    def record(name: str, gap: float) -> None:
        worst[name] = max(worst.get(name, 0.0), float(gap))

    for _ in range(instances):
        pvy = random_joint(rng)
        sol = mary_ht.map_solve(pvy)
        eps = sol.error
        record("meta_converse_tightness", abs(mary_ht.product_meta_converse(pvy, sol.qy_star) - eps))
        record("spectrum_tightness", abs(mary_ht.spectrum_bound(pvy, sol.qy_star)[0] - eps))
        record("tight_poor_verdu", abs(cb.tight_poor_verdu(pvy).value - eps))
        record("bank_of_tests_tightness", abs(cb.bank_of_tests(pvy, sol.qy_star)[0] - eps))
        qy = random_measure(rng, pvy.num_observations)
        record("meta_converse_excess", max(0.0, mary_ht.product_meta_converse(pvy, qy) - eps))
        record("verdu_han_excess", max(0.0, cb.verdu_han(pvy, qy).value - eps))
        record("wolfowitz_excess", max(0.0, cb.wolfowitz(pvy, qy).value - eps))
        dec = random_decoder(rng, pvy.num_observations, pvy.num_hypotheses)
        record("decoder_tightness", abs(mary_ht.decoder_meta_converse(pvy, pvy, dec)[0] - mary_ht.decoder_error(pvy, dec)))
    return {"seed": seed, "instances": instances, "worst_gap": worst, "ok": all(v <= TOL for v in worst.values())}


# --- argparse wiring --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bayes-mht", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", help="spectrum-bound curves for the ternary example (CSV)")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--gamma-grid", type=int, default=101, help="display grid size; optima always come from jump points")

    p = sub.add_parser("fig2", help="BSC best-code error vs meta-converse bounds (CSV)")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("-M", type=int, default=4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("solve", help="evaluate all bounds on a JSON instance")
    p.add_argument("instance")
    p.add_argument("--qy", choices=["pstar", "py", "file"], default="py")
    p.add_argument("--qy-file", default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("lossy", help="excess-distortion report for a JSON lossy instance")
    p.add_argument("instance")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("harness", help="random-instance tightness harness")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("-o", "--output", default=None)
    return parser


def _json(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "fig1":
            _emit(fig1_csv(args.gamma_grid), args.output)
            return EXIT_OK
        if args.command == "fig2":
            _emit(fig2_csv(args.n_max, args.delta, args.M, args.workers, args.n_min), args.output)
            return EXIT_OK
        if args.command == "solve":
            report = solve_report(load_instance(args.instance), args.qy, args.qy_file)
        elif args.command == "lossy":
            report = lossy_report(load_instance(args.instance))
        else:
            report = harness_report(args.seed, args.instances)
        _emit(_json(report), args.output)
        if not report["ok"]:
            log.error("internal checks failed")
            return EXIT_ASSERTION
        return EXIT_OK
    except json.JSONDecodeError as exc:
        log.error("%s: line %d column %d: %s", getattr(args, "instance", "?"), exc.lineno, exc.colno, exc.msg)
        return EXIT_VALIDATION
    except channel.SearchSpaceTooLarge as exc:
        log.error("guard exceeded: %s", exc)
        return EXIT_GUARD
    except CheckFailed as exc:
        log.error("internal check failed: %s", exc)
        return EXIT_ASSERTION
    except (ValidationError, ValueError, KeyError, TypeError, OSError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
