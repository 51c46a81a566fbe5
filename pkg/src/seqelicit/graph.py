"""The reduced DAG of undetermined information states.

Nodes are the states (i, k) where the output is still unknown; edges follow a
single extra reply (a 0 keeps k, a 1 increments it). Predecessors of an
undetermined state are themselves undetermined, so the whole graph hangs off
(0, 0), and every node with no undetermined successor sits at layer n-1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TargetNotInGraph
from .model import InfoState, ProblemInstance
from .pivotal import NodeLabel, determine, node_label


@dataclass
class StateGraph:
    """Immutable after build(); `labels` iterates in lexicographic (i, k) order."""

    instance: ProblemInstance
    labels: dict[InfoState, NodeLabel]
    edges: tuple[tuple[InfoState, InfoState], ...]
    end_nodes: tuple[InfoState, ...]
    root: InfoState | None
    succ: dict[InfoState, tuple[InfoState, ...]]

    @property
    def nodes(self) -> tuple[InfoState, ...]:
        return tuple(self.labels)


def build(instance: ProblemInstance) -> StateGraph:
    """Collect every undetermined state with its label and wire the edges.

    A constant function determines (0, 0) already and yields the empty graph.
    """
    labels: dict[InfoState, NodeLabel] = {}
    for i in range(instance.n):
        for k in range(i + 1):
            state = InfoState(i, k)
            if determine(state, instance.fn_spec) is None:
                labels[state] = node_label(state, instance)
    succ: dict[InfoState, tuple[InfoState, ...]] = {}
    edges: list[tuple[InfoState, InfoState]] = []
    for state in labels:
        outs = []
        for child in (
            InfoState(state.approached + 1, state.ones),
            InfoState(state.approached + 1, state.ones + 1),
        ):
            if child in labels:
                outs.append(child)
                edges.append((state, child))
        succ[state] = tuple(outs)
    end_nodes = tuple(state for state in labels if not succ[state])
    root = InfoState(0, 0) if InfoState(0, 0) in labels else None
    return StateGraph(instance, labels, tuple(edges), end_nodes, root, succ)


def _max_counts(graph: StateGraph, rank_bound: int):
    """Layered DP: best[v] = max, over root-to-v paths, of the number of path
    nodes whose willing rank is defined and at most `rank_bound`.

    Ties break toward the lexicographically smaller predecessor so witness
    extraction is deterministic.
    """
    best: dict[InfoState, int] = {}
    pred: dict[InfoState, InfoState | None] = {}
    for state, label in graph.labels.items():
        weight = 1 if label.c_of_v is not None and label.c_of_v <= rank_bound else 0
        i, k = state.approached, state.ones
        parents = [
            u
            for u in (InfoState(i - 1, k - 1) if k > 0 else None, InfoState(i - 1, k) if k < i else None)
            if u is not None and u in best
        ]
        if not parents:
            best[state] = weight
            pred[state] = None
            continue
        chosen = parents[0]
        for u in parents[1:]:
            if best[u] > best[chosen]:
                chosen = u
        best[state] = weight + best[chosen]
        pred[state] = chosen
    return best, pred


def max_count_path(
    graph: StateGraph, rank_bound: int, target: InfoState
) -> tuple[int, tuple[InfoState, ...]]:
    """Maximum number of nodes with willing rank <= rank_bound on any path from
    (0, 0) to `target`, together with one path achieving it."""
    if target not in graph.labels:
        raise TargetNotInGraph(f"state {target} is not in the reduced graph")
    if not 1 <= rank_bound <= graph.instance.n:
        raise ValueError(f"rank bound must lie in 1..{graph.instance.n}")
    best, pred = _max_counts(graph, rank_bound)
    path = [target]
    while pred[path[-1]] is not None:
        path.append(pred[path[-1]])
    path.reverse()
    return best[target], tuple(path)


def export_dot(graph: StateGraph) -> str:
    """Render the graph as DOT with byte-stable, lexicographic ordering.

    Node s_i_k carries the pivotal probability and the willing rank (or the
    undefined mark); end nodes get a doubled periphery.
    """
    name = graph.instance.fn_spec.name or "anonymous"
    lines = [f"// instance: {name}"]
    if not graph.labels:
        lines.append("digraph G { }")
        return "\n".join(lines) + "\n"
    ends = set(graph.end_nodes)
    lines.append("digraph G {")
    for state, label in graph.labels.items():
        c_text = "⊥" if label.c_of_v is None else str(label.c_of_v)
        attrs = f'label="({state.approached},{state.ones})\\nP={label.pivotal_prob}\\nc={c_text}"'
        if state in ends:
            attrs += ", peripheries=2"
        lines.append(f"  s_{state.approached}_{state.ones} [{attrs}];")
    for a, b in graph.edges:
        lines.append(f"  s_{a.approached}_{a.ones} -> s_{b.approached}_{b.ones};")
    lines.append("}")
    return "\n".join(lines) + "\n"
