"""Determination status, pivotality, and incentive thresholds at information states.

For an anonymous function, the pair (agents approached, ones reported) is a
sufficient statistic for everything the remaining agents can infer, so all
quantities here are functions of that pair.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import StateExhausted
from .model import AnonymousFunctionSpec, InfoState, ProblemInstance


@dataclass(frozen=True)
class NodeLabel:
    """Per-state summary: forced value (if any), pivotality, threshold, willing rank."""

    state: InfoState
    determined: int | None
    pivotal_prob: Fraction
    threshold: Fraction
    c_of_v: int | None


def _check_state(state: InfoState, n: int) -> None:
    if state.approached > n:
        raise ValueError(f"state {state} out of range for n={n}")


@lru_cache(maxsize=None)
def determine(state: InfoState, fn: AnonymousFunctionSpec) -> int | None:
    """The output forced at `state`, or None while both outcomes are reachable.

    The reachable ones-counts from (i, k) are k..k+(n-i); the output is forced
    exactly when the table is constant on that window.
    """
    _check_state(state, fn.n)
    window = fn.ones_to_one[state.ones : state.ones + (fn.n - state.approached) + 1]
    if all(window):
        return 1
    if not any(window):
        return 0
    return None


@lru_cache(maxsize=None)
def pivotal_prob(state: InfoState, instance: ProblemInstance) -> Fraction:
    """Probability that the next reply flips the output, under truthful play.

    Sums the binomial weight of each ones-count m of the n-i-1 agents other
    than the one being approached for which the table differs between totals
    k+m and k+m+1. Zero at a determined state; at layer n-1 it is 0 or 1.
    """
    _check_state(state, instance.n)
    if state.approached >= instance.n:
        raise StateExhausted(f"no agent left to approach at {state}")
    rest = instance.n - state.approached - 1
    q = instance.q
    table = instance.fn_spec.ones_to_one
    k = state.ones
    total = Fraction(0)
    for m in range(rest + 1):
        if table[k + m] != table[k + m + 1]:
            total += comb(rest, m) * q**m * (1 - q) ** (rest - m)
    return total


def threshold(state: InfoState, instance: ProblemInstance) -> Fraction:
    """Largest cost an agent will pay to compute at `state`: (1-q) * P(pivotal).

    An agent is eligible at the state iff its cost is at most this value
    (weak inequality).
    """
    return (1 - instance.q) * pivotal_prob(state, instance)


def c_of(state: InfoState, instance: ProblemInstance) -> int | None:
    """Largest 1-based cost rank still willing to compute at `state`.

    None when even the cheapest agent's cost exceeds the threshold.
    """
    rank = bisect_right(instance.costs, threshold(state, instance))
    return rank if rank > 0 else None


def node_label(state: InfoState, instance: ProblemInstance) -> NodeLabel:
    prob = pivotal_prob(state, instance)
    tau = (1 - instance.q) * prob
    rank = bisect_right(instance.costs, tau)
    return NodeLabel(
        state=state,
        determined=determine(state, instance.fn_spec),
        pivotal_prob=prob,
        threshold=tau,
        c_of_v=rank if rank > 0 else None,
    )
