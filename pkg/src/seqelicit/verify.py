"""Polynomial-time existence decision for an appropriate sequential mechanism."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import _max_counts, build
from .model import InfoState, ProblemInstance

REASON_TRIVIAL = "trivial"
REASON_C_UNDEFINED = "c_undefined_at"
REASON_PIGEONHOLE = "pigeonhole_path"


@dataclass(frozen=True)
class Witness:
    """A root-to-end path packing more than `violating_rank` cheap decision points."""

    path: tuple[InfoState, ...]
    violating_rank: int
    count: int


@dataclass(frozen=True)
class Verdict:
    exists: bool
    reason: str | None
    undefined_at: InfoState | None = None
    witness: Witness | None = None


def exists_appropriate(instance: ProblemInstance) -> Verdict:
    """Decide whether some sequential mechanism computes the function in equilibrium.

    Empty reduced graph (constant function): trivially yes. A state where no
    agent is willing to compute: no, naming that state. Otherwise, no iff for
    some end node and some rank bound j a root-to-end path carries more than j
    nodes whose willing rank is at most j; only j distinct agents that cheap
    exist, so one of those decision points would be left to an unwilling agent.
    """
    graph = build(instance)
    if graph.root is None:
        return Verdict(True, REASON_TRIVIAL)
    for state, label in graph.labels.items():
        if label.c_of_v is None:
            return Verdict(False, REASON_C_UNDEFINED, undefined_at=state)
    n = instance.n
    tables = {j: _max_counts(graph, j) for j in range(1, n + 1)}
    for end in graph.end_nodes:
        for j in range(1, n + 1):
            best, pred = tables[j]
            if best[end] > j:
                path = [end]
                while pred[path[-1]] is not None:
                    path.append(pred[path[-1]])
                path.reverse()
                return Verdict(
                    False,
                    REASON_PIGEONHOLE,
                    witness=Witness(tuple(path), j, best[end]),
                )
    return Verdict(True, None)
