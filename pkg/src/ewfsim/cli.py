"""Command-line runner for the protocol, erasure and estimate experiments.

Every command builds one document
``{command, config, results, exact_reference_values, seed}`` and writes it as
JSON, as RFC-4180 CSV (the result rows only) or as a plain text table.
Output depends only on the flags, so equal flags give byte-identical output.

Exit codes: 0 success, 2 usage error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.stats import binomtest

from . import agents, channels, erasure, estimates, ewf
from .qstate import InvariantViolation

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3

_PI_EXPR = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_phase(text: str):
    """Radians as a float, a multiple of pi such as ``2pi/3`` or ``-pi/2``, or ``random``."""
    t = text.strip().lower()
    if t == ewf.RANDOM:
        return ewf.RANDOM
    m = _PI_EXPR.match(t)
    if m:
        coeff, denom = m.groups()
        c = {"": 1.0, "+": 1.0, "-": -1.0}.get(coeff)
        c = float(coeff) if c is None else c
        value = c * math.pi / (float(denom) if denom else 1.0)
    else:
        try:
            value = float(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a phase: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"phase must be finite: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _phase_config(args) -> ewf.PhaseConfig:
    return ewf.PhaseConfig(args.alpha_bar, args.alpha, correlated=args.correlated)


def _evolution_model(args) -> agents.EvolutionModel:
    if args.model == "collapse":
        return agents.EvolutionModel.collapse(correlated=args.correlated)
    phases = _phase_config(args)
    if not phases.fixed:
        raise ValueError("--model unitary needs fixed phases; use --model collapse for random phases")
    return agents.EvolutionModel.unitary(phases.alpha_bar, phases.alpha)


def _ref(value, source: str) -> dict:
    return {"value": value, "source": source}


def _pair_key(pair) -> str:
    return f"{pair[0]},{pair[1]}"


def _empirical(counts, trials: int) -> dict:
    n_mm = counts.get((ewf.MINUS, ewf.MINUS), 0)
    n_bar_minus = sum(v for k, v in counts.items() if isinstance(k, tuple) and k[0] == ewf.MINUS)
    return {
        "p_wbar_plus": sum(v for k, v in counts.items() if isinstance(k, tuple) and k[0] == ewf.PLUS) / trials,
        "p_wbar_minus": n_bar_minus / trials,
        "p_minus_minus": n_mm / trials,
        "p_w_minus_given_wbar_minus": n_mm / n_bar_minus if n_bar_minus else None,
    }


def _exact_protocol(phases: ewf.PhaseConfig) -> dict:
    joint = ewf.exact_joint_averaged(phases)
    p_bar_minus = sum(p for (a, _), p in joint.items() if a == ewf.MINUS)
    src = "Born rule on the step-5 state" if phases.fixed else "Born rule on the phase-averaged step-5 density matrix"
    return {
        "p_wbar_plus": _ref(sum(p for (a, _), p in joint.items() if a == ewf.PLUS), src),
        "p_wbar_minus": _ref(p_bar_minus, src),
        "p_minus_minus": _ref(joint[(ewf.MINUS, ewf.MINUS)], src),
        "p_w_minus_given_wbar_minus": _ref(joint[(ewf.MINUS, ewf.MINUS)] / p_bar_minus, src),
    }


def cmd_protocol(args) -> dict:
    phases = _phase_config(args)
    results = ewf.run_trials(phases, args.trials, args.seed)
    counts = {}
    for r in results:
        counts[(r.wbar_outcome, r.w_outcome)] = counts.get((r.wbar_outcome, r.w_outcome), 0) + 1
    exact = _exact_protocol(phases)
    empirical = _empirical(counts, args.trials)
    out = {
        "trials": args.trials,
        "counts": {_pair_key(k): counts[k] for k in sorted(counts)},
        "empirical": empirical,
    }
    if args.trials <= 10:
        out["records"] = [
            {
                "trial": k,
                "phases": list(r.phases_used),
                "wbar_outcome": r.wbar_outcome,
                "w_outcome": r.w_outcome,
                "wbar_prob": r.wbar_prob,
                "w_prob": r.w_prob,
            }
            for k, r in enumerate(results)
        ]
    rows = [
        {"quantity": name, "simulated": empirical[name], "exact": exact[name]["value"]}
        for name in empirical
    ]
    return {"results": out, "rows": rows, "exact": exact}


def cmd_contradiction(args) -> dict:
    rule = agents.ReasoningRule(args.rule)
    model = _evolution_model(args)
    rate, counts = agents.contradiction_rate(rule, model, args.trials, args.seed)
    n_contra = counts["contradiction"]
    ci = binomtest(n_contra, args.trials).proportion_ci(confidence_level=0.95, method="wilson")
    joint = ewf.exact_joint_averaged(model.phase_config)
    if rule is agents.ReasoningRule.A1:
        exact_rate = joint[(ewf.MINUS, ewf.MINUS)]
        src = "A1 is certain of plus whenever W-bar sees minus: P(minus, minus)"
    else:
        exact_rate = 0.0
        src = f"{rule.value} never asserts certainty in this model"
    results = {
        "rule": rule.value,
        "model": model.kind.value,
        "trials": args.trials,
        "contradictions": n_contra,
        "rate": rate,
        "ci95": [float(ci.low), float(ci.high)],
        "is_observation": agents.is_observation(model),
        "counts": {_pair_key(k): v for k, v in sorted((k, v) for k, v in counts.items() if isinstance(k, tuple))},
    }
    rows = [{"rule": rule.value, "model": model.kind.value, "rate": rate,
             "ci_low": float(ci.low), "ci_high": float(ci.high), "exact": exact_rate}]
    return {"results": results, "rows": rows, "exact": {"rate": _ref(exact_rate, src)}}


def cmd_sweep(args) -> dict:
    n = args.grid
    if n < 2:
        raise ValueError("--grid must be at least 2")
    grid = 2.0 * np.pi * np.arange(n) / n
    rows = []
    for a in grid:
        for ab in grid:
            rows.append({
                "alpha": float(a),
                "alpha_bar": float(ab),
                "probability": ewf.confirm_probability(float(ab), float(a)),
                "closed_form": abs(ewf.overlap_closed_form(float(ab), float(a))) ** 2,
            })
    lo = min(rows, key=lambda r: r["probability"])
    hi = max(rows, key=lambda r: r["probability"])
    results = {
        "grid": n,
        "min": {"alpha": lo["alpha"], "alpha_bar": lo["alpha_bar"], "probability": lo["probability"]},
        "max": {"alpha": hi["alpha"], "alpha_bar": hi["alpha_bar"], "probability": hi["probability"]},
        "max_abs_error_vs_closed_form": max(abs(r["probability"] - r["closed_form"]) for r in rows),
    }
    src = "|<psi_5|psi~_5>|^2 with <psi_5|psi~_5> = (e^{ia} + e^{i(ab+a)} + e^{iab})/3"
    exact = {
        "max_at_zero_phases": _ref(1.0, src),
        "zero_at_2pi/3_4pi/3": _ref(0.0, src),
        "value_at_pi_0": _ref(1.0 / 9.0, src),
    }
    return {"results": results, "rows": rows, "exact": exact}


def _record_model(args, alpha: float) -> channels.RecordModel:
    return channels.RecordModel(
        n_qubits=args.n_qubits,
        alpha=alpha,
        lost_qubit_index=args.lost_qubit,
        phase_random=args.phase_random or args.alpha == ewf.RANDOM,
    )


def cmd_erasure(args) -> dict:
    random_phase = args.phase_random or args.alpha == ewf.RANDOM
    if random_phase:
        alphas = [0.0]
    elif args.alpha_given:
        alphas = [args.alpha]
    else:
        alphas = [float(a) for a in np.pi * np.arange(args.grid) / max(args.grid - 1, 1)]
    rows = []
    for a in alphas:
        model = _record_model(args, a)
        rows.append({
            "alpha": ewf.RANDOM if random_phase else a,
            "visibility": erasure.interference_visibility(model, args.trials, args.seed),
            "exact": erasure.exact_visibility(model),
            "erasure_possible": channels.erasure_possible(model),
        })
    results = {
        "n_qubits": args.n_qubits,
        "lost_qubit": args.lost_qubit,
        "phase_random": random_phase,
        "trials": args.trials,
        "tolerance": 3.0 / math.sqrt(args.trials),
        "sweep": rows,
    }
    exact = {"visibility": _ref("|cos alpha| if erasure possible else 0",
                                "erasure needs the whole register and a reproducible phase")}
    return {"results": results, "rows": rows, "exact": exact}


def cmd_record(args) -> dict:
    n = args.n_qubits
    alpha = 0.0 if args.alpha == ewf.RANDOM else args.alpha
    psi = channels.build_record_state(n, alpha)
    layout = psi.layout
    lost_pos = n if args.lost_qubit is None else args.lost_qubit + 1
    rho_lost = channels.lose_qubit(psi, lost_pos)
    rho_avg = channels.phase_average(lambda a: channels.build_record_state(n, a), args.samples, args.seed)
    branch0 = ["0"] * (n + 1)
    branch1 = ["1"] * (n + 1)
    kept = rho_lost.layout
    k0, k1 = kept.index(branch0[:n]), kept.index(branch1[:n])
    p0, p1 = layout.index(branch0), layout.index(branch1)
    model = _record_model(args, alpha)
    results = {
        "n_qubits": n,
        "alpha": args.alpha,
        "lost_qubit": args.lost_qubit,
        "after_loss": {
            "rho_00": float(rho_lost.entries[k0, k0].real),
            "rho_11": float(rho_lost.entries[k1, k1].real),
            "abs_rho_01": float(abs(rho_lost.entries[k0, k1])),
            "purity": rho_lost.purity,
        },
        "phase_average": {
            "samples": args.samples,
            "rho_00": float(rho_avg.entries[p0, p0].real),
            "rho_11": float(rho_avg.entries[p1, p1].real),
            "abs_rho_01": float(abs(rho_avg.entries[p0, p1])),
            "purity": rho_avg.purity,
        },
        "erasure_possible": channels.erasure_possible(model),
        "observation": not channels.erasure_possible(model),
    }
    rows = [
        {"route": "lose_qubit", **results["after_loss"]},
        {"route": "phase_average", **{k: v for k, v in results["phase_average"].items() if k != "samples"}},
    ]
    src = "equal mixture of |0>|0...0> and |1>|1...1>"
    exact = {"rho_00": _ref(0.5, src), "rho_11": _ref(0.5, src), "abs_rho_01": _ref(0.0, src)}
    return {"results": results, "rows": rows, "exact": exact}


def cmd_estimate(args) -> dict:
    dg = estimates.delta_g_for_pi(estimates.CAT_MASS, estimates.CAT_SEPARATION, estimates.CAT_TIME)
    acc = estimates.gravitational_acceleration(estimates.CAT_MASS, estimates.CAT_SEPARATION)
    phase = estimates.accumulated_phase(estimates.CAT_MASS, dg, estimates.CAT_SEPARATION, estimates.CAT_TIME)
    rows = [
        {"quantity": "delta_g_for_pi [m/s^2]", "computed": dg, "quoted": 1e-33},
        {"quantity": "cat_field_at_10cm [m/s^2]", "computed": acc, "quoted": 3e-8},
        {"quantity": "phase_at_delta_g [rad]", "computed": phase, "quoted": math.pi},
    ]
    results = {
        "mass_kg": estimates.CAT_MASS,
        "separation_m": estimates.CAT_SEPARATION,
        "time_s": estimates.CAT_TIME,
        "delta_g_for_pi": dg,
        "gravitational_acceleration": acc,
        "round_trip_phase": phase,
    }
    exact = {
        "delta_g_for_pi": _ref(1e-33, "quoted to order of magnitude for a 4 kg cat, 10 cm, 1 s"),
        "gravitational_acceleration": _ref(3e-8, "quoted to one figure for 4 kg at 10 cm"),
        "round_trip_phase": _ref(math.pi, "definition of delta_g_for_pi"),
    }
    return {"results": results, "rows": rows, "exact": exact}


COMMANDS: dict[str, Callable] = {
    "protocol": cmd_protocol,
    "contradiction": cmd_contradiction,
    "sweep": cmd_sweep,
    "erasure": cmd_erasure,
    "record": cmd_record,
    "estimate": cmd_estimate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=_positive_int, default=10_000)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--alpha", type=parse_phase, default=None,
                        help="phase of F's interaction: radians, e.g. 2pi/3, or 'random'")
    common.add_argument("--alpha-bar", type=parse_phase, default=0.0,
                        help="phase of F-bar's interaction: radians or 'random'")
    common.add_argument("--correlated", action="store_true",
                        help="one random draw serves both phases")
    common.add_argument("--rule", choices=[r.value for r in agents.ReasoningRule], default="A1")
    common.add_argument("--model", choices=["unitary", "collapse"], default="unitary")
    common.add_argument("--format", choices=["json", "csv", "table"], default="table")
    common.add_argument("--out", type=Path, default=None, help="write here instead of stdout")

    parser = argparse.ArgumentParser(prog="ewfsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("protocol", parents=[common], help="run the protocol and tally W-bar/W outcomes")
    sub.add_parser("contradiction", parents=[common], help="contradiction rate of a reasoning rule")
    p = sub.add_parser("sweep", parents=[common], help="confirm probability over an (alpha, alpha_bar) grid")
    p.add_argument("--grid", type=int, default=12)
    for name, helptext in (("erasure", "erasure visibility against alpha"),
                           ("record", "qubit loss vs phase averaging")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--n-qubits", type=_positive_int, default=2)
        p.add_argument("--lost-qubit", type=int, default=None, help="register qubit that escapes (0-based)")
        p.add_argument("--phase-random", action="store_true")
        p.add_argument("--grid", type=_positive_int, default=7)
        p.add_argument("--samples", type=_positive_int, default=10_000)
    sub.add_parser("estimate", parents=[common], help="gravitational sensitivity numbers")
    return parser


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in ("alpha_given",):
            continue
        cfg[k] = str(v) if isinstance(v, Path) else v
    return cfg


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def render(doc: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
            w.writeheader()
            w.writerows(_jsonable(rows))
        return buf.getvalue()
    return _table(doc, rows)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return "" if v is None else str(v)


def _table(doc: dict, rows: list[dict]) -> str:
    lines = [f"# {doc['command']}  seed={doc['seed']}"]
    if rows:
        cols = list(rows[0])
        cells = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
        lines.append("  ".join("-" * w for w in widths))
        lines.extend("  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells)
    return "\n".join(lines) + "\n"


def run(argv: Optional[list[str]] = None) -> tuple[int, str, Optional[Path]]:
    """Parse, execute and render; returns (exit code, output text, --out path)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    args.alpha_given = args.alpha is not None
    if args.alpha is None:
        args.alpha = 0.0
    try:
        out = COMMANDS[args.command](args)
    except InvariantViolation as exc:
        return EXIT_INVARIANT, f"invariant violation: {exc}\n", None
    except ValueError as exc:
        parser.error(str(exc))
    doc = {
        "command": args.command,
        "config": _config(args),
        "results": out["results"],
        "exact_reference_values": out["exact"],
        "seed": args.seed,
    }
    return EXIT_OK, render(doc, out["rows"], args.format), args.out


def main(argv: Optional[list[str]] = None) -> int:
    code, text, path = run(argv)
    if path is not None:
        path.write_text(text, encoding="utf-8", newline="")
    else:
        (sys.stdout if code == EXIT_OK else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
