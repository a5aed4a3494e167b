"""JSON-ready views of equilibria and traces, plus a plain-text rendering."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Sequence

from .equilibrium import EquilibriumWitness
from .evolution import EquilibriumTrace
from .logic import render_element
from .system import EMCS


def fraction_text(value) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def state_view(M: EMCS, S) -> Dict[str, List[str]]:
    return {c.name: sorted(s) for c, s in zip(M.contexts, S)}


def config_view(M: EMCS, K) -> Dict[str, List[str]]:
    return {c.name: sorted(render_element(e) for e in k) for c, k in zip(M.contexts, K)}


def ops_view(M: EMCS, ops) -> Dict[str, List[str]]:
    return {c.name: sorted(str(f) for f in o) for c, o in zip(M.contexts, ops)}


def witness_view(M: EMCS, w: EquilibriumWitness, cost: int) -> Dict[str, Any]:
    return {"state": state_view(M, w.state), "witness_kbs": config_view(M, w.witness_kbs), "step_cost": cost}


def trace_view(M: EMCS, t: EquilibriumTrace, **extra) -> Dict[str, Any]:
    view = {
        "states": [state_view(M, S) for S in t.states],
        "kb_configs": [config_view(M, K) for K in t.kb_configs],
        "applied_next_ops": [ops_view(M, o) for o in t.applied_next_ops],
    }
    view.update(extra)
    return view


def dumps(report: Dict[str, Any]) -> str:
    """Sorted-key JSON with LF endings; equal reports give equal bytes."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _atoms(atoms: Sequence[str]) -> str:
    return "{" + ", ".join(atoms) + "}"


def _state_line(view: Dict[str, List[str]]) -> str:
    return "<" + ", ".join(f"{name}={_atoms(a)}" for name, a in view.items()) + ">"


def render_text(report: Dict[str, Any]) -> str:
    canon = report["canonical"]
    out = [f"command: {canon['command']}", f"status: {canon['status']}"]
    for key in ("size", "criterion", "aggregator"):
        if key in canon:
            out.append(f"{key}: {canon[key]}")
    for k, eq in enumerate(canon.get("equilibria", []), 1):
        out.append(f"equilibrium {k}: {_state_line(eq['state'])} cost={eq['step_cost']}")
    for label in ("traces", "selected"):
        for k, t in enumerate(canon.get(label, []), 1):
            out.append(f"{label[:-1] if label == 'traces' else 'selected'} {k}:")
            for j, (S, K) in enumerate(zip(t["states"], t["kb_configs"]), 1):
                kbs = ", ".join(f"{name}={_atoms(e)}" for name, e in K.items())
                out.append(f"  step {j}: {_state_line(S)}  kb: {kbs}")
            for key in ("global_cost", "step_costs", "distances", "criteria"):
                if key in t:
                    out.append(f"  {key}: {t[key]}")
    for key in ("comparisons", "mismatches", "evolving_equilibrium", "witnesses", "total_traces"):
        if key in canon:
            out.append(f"{key}: {canon[key]}")
    if "volatile" in report:
        out.append("# volatile")
        for key, value in sorted(report["volatile"].items()):
            out.append(f"# {key}: {value}")
    return "\n".join(out) + "\n"
