"""Command line entry point ``emcs``.

Exit codes: 0 success, 1 no equilibrium (or a checked trace is not one),
2 input error, 3 search budget exceeded, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from .equilibrium import SearchStats, _enumerate, default_budget, oracle_equilibria
from .errors import BudgetExceeded, EMCSError, ParseError
from .evolution import _next_kb, enumerate_evolving_equilibria, is_evolving_equilibrium, trace_from
from .minimal_change import CostModel, DistanceModel, _horizon, _step_cost, global_cost, min_cost_global
from .parser import SystemDescription, parse_element, parse_observations, parse_system
from .report import config_view, dumps, fraction_text, render_text, state_view, trace_view, witness_view

EXIT_OK, EXIT_NONE, EXIT_INPUT, EXIT_BUDGET, EXIT_MISMATCH = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _trace_extras(desc: SystemDescription, Obs, trace, horizon, cheapest) -> Dict[str, Any]:
    M = desc.system
    costs = horizon.costs
    return {
        "step_costs": [_step_cost(M, S, Obs[j], costs) for j, S in enumerate(trace.states)],
        "global_cost": global_cost(M, trace, Obs, costs),
        "distances": [
            fraction_text(horizon.distance(a, b)) for a, b in zip(trace.states, trace.states[1:])
        ],
        "criteria": {
            "strong": horizon.strong(trace),
            "weak": horizon.weak(trace),
            "global_cost": trace in cheapest,
        },
    }


def _size(args, Obs) -> int:
    size = args.size if args.size is not None else len(Obs)
    if size < 1:
        raise InputError("--size must be at least 1 (and the observation file must have a step)")
    return size


def run(args, desc: SystemDescription, Obs, stats: SearchStats) -> tuple[int, Dict[str, Any]]:
    M = desc.system
    budget = args.budget
    canon: Dict[str, Any] = {
        "command": args.command,
        "aggregator": desc.aggregator,
        "contexts": desc.context_names,
        "observers": desc.observer_names,
        "observation_steps": len(Obs),
    }
    costs = CostModel.of(M)
    distance = DistanceModel.of(M, desc.aggregator)

    if args.command == "solve":
        first = Obs[0] if Obs else tuple(frozenset() for _ in M.observers)
        found = _enumerate(M, first, M.kbs, budget, stats)
        canon["equilibria"] = [witness_view(M, w, _step_cost(M, w.state, first, costs)) for w in found]
        canon["status"] = "ok" if found else "no-equilibrium"
        return (EXIT_OK if found else EXIT_NONE), canon

    if args.command in ("evolve", "select"):
        size = _size(args, Obs)
        canon["size"] = size
        traces = enumerate_evolving_equilibria(M, Obs, size, budget=budget, stats=stats)
        h = _horizon(M, Obs, size, costs, distance, True, budget, stats)
        cheapest = min_cost_global(M, Obs, size, costs=costs, traces=traces)
        views = [trace_view(M, t, **_trace_extras(desc, Obs, t, h, cheapest)) for t in traces]
        if args.command == "evolve":
            canon["traces"] = views
            canon["status"] = "ok" if traces else "no-equilibrium"
            return (EXIT_OK if traces else EXIT_NONE), canon
        criterion = args.criterion
        canon["criterion"] = criterion
        canon["total_traces"] = len(traces)
        canon["selected"] = [v for v in views if v["criteria"][criterion.replace("-", "_")]]
        canon["status"] = "ok" if canon["selected"] else "no-equilibrium"
        return (EXIT_OK if canon["selected"] else EXIT_NONE), canon

    if args.command == "check":
        return _check(args, desc, Obs, canon, costs, distance, budget)

    if args.command == "oracle":
        return _oracle(desc, Obs, canon, budget, stats)

    raise InputError(f"unknown command {args.command}")


def _load_states(M, raw_states) -> List[tuple]:
    names = [c.name for c in M.contexts]
    states = []
    for raw in raw_states:
        if isinstance(raw, dict):
            unknown = set(raw) - set(names)
            if unknown:
                raise InputError(f"unknown contexts in trace: {sorted(unknown)}")
            states.append(tuple(frozenset(raw.get(n, [])) for n in names))
        else:
            states.append(tuple(frozenset(s) for s in raw))
    return states


def _check(args, desc, Obs, canon, costs, distance, budget):
    M = desc.system
    if not args.trace:
        raise InputError("check needs --trace FILE")
    try:
        data = json.loads(_read(args.trace))
    except json.JSONDecodeError as exc:
        raise InputError(f"trace file is not JSON: {exc}") from None
    if "states" not in data:
        raise InputError("trace file needs a 'states' list")
    states = [M.check_state(S) for S in _load_states(M, data["states"])]
    if not states:
        raise InputError("trace has no states")
    witnesses = is_evolving_equilibrium(M, Obs, states)
    canon["size"] = len(states)
    canon["evolving_equilibrium"] = bool(witnesses)
    if "kb_configs" in data:
        names = [c.name for c in M.contexts]
        given = tuple(
            tuple(frozenset(parse_element(e, c) for e in K.get(n, [])) for n, c in zip(names, M.contexts))
            for K in data["kb_configs"]
        )
        witnesses = [w for w in witnesses if w == given]
        canon["given_configs_witness"] = bool(witnesses)
    h = _horizon(M, Obs, len(states), costs, distance, True, budget)
    report = []
    for configs in witnesses:
        t = trace_from(M, Obs, states, configs)
        report.append(
            {
                "kb_configs": [config_view(M, K) for K in configs],
                "strong": h.strong(t),
                "weak": h.weak(t),
                "global_cost": global_cost(M, t, Obs, costs),
            }
        )
    canon["witnesses"] = report
    canon["states"] = [state_view(M, S) for S in states]
    ok = bool(witnesses)
    canon["status"] = "ok" if ok else "not-an-evolving-equilibrium"
    return (EXIT_OK if ok else EXIT_NONE), canon


def _oracle(desc, Obs, canon, budget, stats):
    """Compare solver and brute force on every configuration reachable along the sequence."""
    M = desc.system
    steps = Obs or (tuple(frozenset() for _ in M.observers),)
    frontier = {M.kbs}
    comparisons = 0
    mismatches = []
    for j, obs in enumerate(steps):
        reached = set()
        for K in sorted(frontier, key=lambda K: str(config_view(M, K))):
            solved = [w.state for w in _enumerate(M, obs, K, budget, stats)]
            brute = oracle_equilibria(M, obs, K, cap=budget)
            comparisons += 1
            if solved != brute:
                mismatches.append(
                    {
                        "step": j + 1,
                        "kb_config": config_view(M, K),
                        "solver": [state_view(M, S) for S in solved],
                        "oracle": [state_view(M, S) for S in brute],
                    }
                )
            for S in brute:
                reached.update(_next_kb(M, S, obs, K))
        frontier = reached
    canon["comparisons"] = comparisons
    canon["mismatches"] = mismatches
    canon["status"] = "MATCH" if not mismatches else "MISMATCH"
    return (EXIT_OK if not mismatches else EXIT_MISMATCH), canon


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emcs", description="Evolving multi-context system reasoner.")
    p.add_argument("command", choices=["solve", "evolve", "select", "check", "oracle"])
    p.add_argument("--system", required=True, help="system description file")
    p.add_argument("--observations", help="observation sequence file (default: one empty step)")
    p.add_argument("--size", type=int, help="evolving equilibrium size (default: number of steps)")
    p.add_argument("--criterion", choices=["strong", "weak", "global-cost"], default="strong")
    p.add_argument("--budget", type=int, help="search budget (default: $EMCS_BUDGET or 1000000)")
    p.add_argument("--trace", help="trace JSON for the check command")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--canonical-only", action="store_true", help="omit the volatile timing section")
    return p


def main(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    args.budget = args.budget if args.budget is not None else default_budget()
    stats = SearchStats()
    started = time.perf_counter()
    try:
        desc = parse_system(_read(args.system))
        if args.observations:
            Obs = parse_observations(_read(args.observations), desc)
        else:
            Obs = (tuple(frozenset() for _ in desc.system.observers),)
        code, canon = run(args, desc, Obs, stats)
    except (InputError, ParseError) as exc:
        print(f"emcs: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"emcs: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EMCSError as exc:
        print(f"emcs: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report: Dict[str, Any] = {"canonical": canon}
    if not args.canonical_only:
        report["volatile"] = {
            "elapsed_seconds": round(time.perf_counter() - started, 6),
            "equilibrium_searches": stats.calls,
            "candidates_checked": stats.candidates,
        }
    stdout.write(dumps(report) if args.format == "json" else render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
