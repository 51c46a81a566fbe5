"""Domain types and instance ingestion for multi-party computation games.

An instance couples a shared prior on binary secrets with per-agent access
costs (normalized so that learning the outcome is worth 1) and an anonymous
boolean function, represented by the set of ones-counts mapped to output 1.
Every probability and cost is an exact rational; nothing downstream of
ingestion touches floating point on a verdict-relevant path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BadFunctionTable, CostOutOfRange, MalformedDocument, QOutOfRange

Rational = Fraction

_DOCUMENT_KEYS = {"n", "q", "costs", "values", "agent_ids", "function"}
FUNCTION_SHORTCUTS = ("majority", "consensus", "parity", "unanimity")


def _as_rational(value, where: str) -> Fraction:
    # JSON floats are rejected: 0.4 the float is not 2/5.
    if isinstance(value, bool):
        raise MalformedDocument(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedDocument(f"{where}: cannot parse rational {value!r}") from exc
    raise MalformedDocument(
        f"{where}: expected an integer or a 'num/den' string, got {type(value).__name__}"
    )


@dataclass(frozen=True)
class AnonymousFunctionSpec:
    """Boolean function of n bits that depends only on the count of ones.

    Entry w of ``ones_to_one`` is True iff a total of w ones yields output 1.
    """

    n: int
    ones_to_one: tuple[bool, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise BadFunctionTable(f"agent count must be at least 1, got {self.n}")
        if len(self.ones_to_one) != self.n + 1:
            raise BadFunctionTable(
                f"table has {len(self.ones_to_one)} entries, need {self.n + 1}"
            )
        if not all(isinstance(b, bool) for b in self.ones_to_one):
            raise BadFunctionTable("table entries must be booleans")

    @property
    def is_constant(self) -> bool:
        return all(self.ones_to_one) or not any(self.ones_to_one)

    @property
    def ones_counts(self) -> tuple[int, ...]:
        """The counts mapped to output 1, ascending."""
        return tuple(w for w, b in enumerate(self.ones_to_one) if b)

    def value_at(self, ones: int) -> int:
        return 1 if self.ones_to_one[ones] else 0


def majority(n: int) -> AnonymousFunctionSpec:
    """Output 1 iff a strict majority of the n bits is 1."""
    cut = (n + 2) // 2
    return AnonymousFunctionSpec(n, tuple(w >= cut for w in range(n + 1)), "majority")


def consensus(n: int) -> AnonymousFunctionSpec:
    """Output 1 iff all n bits agree."""
    return AnonymousFunctionSpec(n, tuple(w in (0, n) for w in range(n + 1)), "consensus")


def parity(n: int) -> AnonymousFunctionSpec:
    """Output 1 iff the count of ones is odd."""
    return AnonymousFunctionSpec(n, tuple(w % 2 == 1 for w in range(n + 1)), "parity")


def unanimity(n: int) -> AnonymousFunctionSpec:
    """Output 1 iff every bit is 1."""
    return AnonymousFunctionSpec(n, tuple(w == n for w in range(n + 1)), "unanimity")


_SHORTCUT_BUILDERS = {
    "majority": majority,
    "consensus": consensus,
    "parity": parity,
    "unanimity": unanimity,
}


def from_ones_counts(n: int, counts: Iterable[int], name: str | None = None) -> AnonymousFunctionSpec:
    counts = tuple(counts)
    seen = set()
    for w in counts:
        if isinstance(w, bool) or not isinstance(w, int):
            raise MalformedDocument(f"ones_counts entries must be integers, got {w!r}")
        if not 0 <= w <= n:
            raise BadFunctionTable(f"ones-count {w} outside 0..{n}")
        if w in seen:
            raise BadFunctionTable(f"duplicate ones-count {w}")
        seen.add(w)
    return AnonymousFunctionSpec(n, tuple(w in seen for w in range(n + 1)), name)


class Report(Enum):
    """What an agent tells the center when approached."""

    ZERO = "0"
    ONE = "1"
    TRUTHFUL = "truthful"
    NEGATED = "negated"


@dataclass(frozen=True)
class Action:
    """One of the six legal per-approach choices.

    Reporting the computed value, or its negation, requires having computed.
    """

    compute: bool
    report: Report

    def __post_init__(self):
        if self.report in (Report.TRUTHFUL, Report.NEGATED) and not self.compute:
            raise ValueError(f"report {self.report.value} requires computing first")

    def reply(self, secret: int) -> int:
        if self.report is Report.ZERO:
            return 0
        if self.report is Report.ONE:
            return 1
        if self.report is Report.TRUTHFUL:
            return secret
        return 1 - secret


GUESS_ZERO = Action(False, Report.ZERO)
GUESS_ONE = Action(False, Report.ONE)
COMPUTE_REPORT_ZERO = Action(True, Report.ZERO)
COMPUTE_REPORT_ONE = Action(True, Report.ONE)
TRUTHFUL_COMPUTE = Action(True, Report.TRUTHFUL)
COMPUTE_NEGATED = Action(True, Report.NEGATED)

ALL_ACTIONS = (
    GUESS_ZERO,
    GUESS_ONE,
    COMPUTE_REPORT_ZERO,
    COMPUTE_REPORT_ONE,
    TRUTHFUL_COMPUTE,
    COMPUTE_NEGATED,
)

ACTION_NAMES = {
    "guess-0": GUESS_ZERO,
    "guess-1": GUESS_ONE,
    "compute-0": COMPUTE_REPORT_ZERO,
    "compute-1": COMPUTE_REPORT_ONE,
    "truthful": TRUTHFUL_COMPUTE,
    "lie": COMPUTE_NEGATED,
}


@dataclass(frozen=True, order=True)
class InfoState:
    """i agents approached so far, of which `ones` reported 1."""

    approached: int
    ones: int

    def __post_init__(self):
        if not 0 <= self.ones <= self.approached:
            raise ValueError(f"invalid state ({self.approached},{self.ones})")

    def __str__(self) -> str:
        return f"({self.approached},{self.ones})"


@dataclass(frozen=True)
class Transcript:
    """Ordered (rank, reply) pairs; each rank appears at most once."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ranks = [r for r, _ in self.entries]
        if len(set(ranks)) != len(ranks):
            raise ValueError("an agent may be approached at most once")
        if any(r < 1 for r in ranks) or any(b not in (0, 1) for _, b in self.entries):
            raise ValueError("transcript entries are (positive rank, bit)")

    @property
    def state(self) -> InfoState:
        return InfoState(len(self.entries), sum(b for _, b in self.entries))

    def extended(self, rank: int, bit: int) -> "Transcript":
        return Transcript(self.entries + ((rank, bit),))


@dataclass(frozen=True)
class ProblemInstance:
    """Agent count, prior, sorted costs, and the anonymous function.

    Costs are stored ascending; ``original_index[r-1]`` is the 1-based input
    position of the agent holding sorted rank r. Display names live in
    ``agent_ids`` (input order).
    """

    n: int
    q: Fraction
    costs: tuple[Fraction, ...]
    original_index: tuple[int, ...]
    fn_spec: AnonymousFunctionSpec
    agent_ids: tuple[str, ...]

    def __post_init__(self):
        if self.n < 1:
            raise MalformedDocument(f"agent count must be at least 1, got {self.n}")
        if not isinstance(self.q, Fraction) or not 0 < self.q < 1:
            raise QOutOfRange(f"prior must lie strictly between 0 and 1, got {self.q}")
        if len(self.costs) != self.n:
            raise MalformedDocument(f"{len(self.costs)} costs for {self.n} agents")
        for c in self.costs:
            if not isinstance(c, Fraction) or not 0 <= c < 1:
                raise CostOutOfRange(f"normalized cost {c} outside [0, 1)")
        if any(a > b for a, b in zip(self.costs, self.costs[1:])):
            raise MalformedDocument("costs must be sorted ascending")
        if sorted(self.original_index) != list(range(1, self.n + 1)):
            raise MalformedDocument("original_index must be a permutation of 1..n")
        if self.fn_spec.n != self.n:
            raise BadFunctionTable(
                f"function is over {self.fn_spec.n} agents, instance has {self.n}"
            )
        if len(self.agent_ids) != self.n or len(set(self.agent_ids)) != self.n:
            raise MalformedDocument("agent_ids must be n distinct strings")

    @classmethod
    def create(
        cls,
        q: Fraction,
        costs: Sequence[Fraction | int],
        fn_spec: AnonymousFunctionSpec,
        agent_ids: Sequence[str] | None = None,
    ) -> "ProblemInstance":
        """Build an instance from costs in input order, sorting them stably."""
        if any(isinstance(c, float) for c in costs):
            raise CostOutOfRange("costs must be exact rationals, not floats")
        costs = tuple(Fraction(c) for c in costs)
        n = len(costs)
        if agent_ids is None:
            agent_ids = tuple(str(p) for p in range(1, n + 1))
        order = sorted(range(n), key=lambda p: costs[p])
        return cls(
            n=n,
            q=Fraction(q),
            costs=tuple(costs[p] for p in order),
            original_index=tuple(p + 1 for p in order),
            fn_spec=fn_spec,
            agent_ids=tuple(agent_ids),
        )

    @property
    def ranks(self) -> range:
        return range(1, self.n + 1)

    def cost_of_rank(self, rank: int) -> Fraction:
        return self.costs[rank - 1]

    def agent_id_of_rank(self, rank: int) -> str:
        return self.agent_ids[self.original_index[rank - 1] - 1]

    def rank_of_agent_id(self, agent_id: str) -> int:
        for rank in self.ranks:
            if self.agent_id_of_rank(rank) == agent_id:
                return rank
        raise KeyError(agent_id)

    def user_costs(self) -> tuple[Fraction, ...]:
        """Costs back in input order."""
        out: list[Fraction] = [Fraction(0)] * self.n
        for rank, pos in enumerate(self.original_index, start=1):
            out[pos - 1] = self.costs[rank - 1]
        return tuple(out)


def _parse_function(value, n: int) -> AnonymousFunctionSpec:
    if isinstance(value, str):
        builder = _SHORTCUT_BUILDERS.get(value)
        if builder is None:
            raise MalformedDocument(f"unknown function shortcut {value!r}")
        return builder(n)
    if isinstance(value, Mapping):
        if set(value) != {"ones_counts"}:
            raise MalformedDocument("function object must have exactly the key 'ones_counts'")
        counts = value["ones_counts"]
        if not isinstance(counts, list):
            raise MalformedDocument("ones_counts must be a list of integers")
        return from_ones_counts(n, counts)
    raise MalformedDocument("function must be a shortcut name or {'ones_counts': [...]}")


def ingest(document, *, normalize: bool = False) -> ProblemInstance:
    """Parse an instance document (JSON text or a parsed mapping).

    Format::

        { "n": <int>, "q": "<num>/<den>", "costs": ["<num>/<den>", ...],
          "values": [...]?, "agent_ids": [<string>...]?,
          "function": "majority" | "consensus" | "parity" | "unanimity"
                      | {"ones_counts": [<int>...]} }

    Integer strings without "/" are accepted as integers. When ``values`` is
    present each cost is folded to cost/value. Priors below 1/2 are rejected
    unless ``normalize`` is set, in which case the instance is mirrored
    (q -> 1-q, ones-count w -> n-w), which preserves every verdict.
    """
    if isinstance(document, (bytes, str)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise MalformedDocument("instance document must be a JSON object")
    unknown = set(document) - _DOCUMENT_KEYS
    if unknown:
        raise MalformedDocument(f"unknown fields: {', '.join(sorted(unknown))}")
    for key in ("n", "q", "costs", "function"):
        if key not in document:
            raise MalformedDocument(f"missing required field {key!r}")

    n = document["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MalformedDocument("n must be an integer >= 1")

    q = _as_rational(document["q"], "q")
    if not 0 < q < 1:
        raise QOutOfRange(f"q must lie strictly between 0 and 1, got {q}")
    if q < Fraction(1, 2) and not normalize:
        raise QOutOfRange(f"q = {q} is below 1/2; rerun with normalization enabled")

    raw_costs = document["costs"]
    if not isinstance(raw_costs, list) or len(raw_costs) != n:
        raise MalformedDocument(f"costs must be a list of {n} rationals")
    costs = [_as_rational(c, f"costs[{idx}]") for idx, c in enumerate(raw_costs)]

    if "values" in document:
        raw_values = document["values"]
        if not isinstance(raw_values, list) or len(raw_values) != n:
            raise MalformedDocument(f"values must be a list of {n} rationals")
        values = [_as_rational(v, f"values[{idx}]") for idx, v in enumerate(raw_values)]
        if any(v <= 0 for v in values):
            raise MalformedDocument("values must be positive")
        costs = [c / v for c, v in zip(costs, values)]

    for c in costs:
        if not 0 <= c < 1:
            raise CostOutOfRange(f"normalized cost {c} outside [0, 1)")

    agent_ids = None
    if "agent_ids" in document:
        raw_ids = document["agent_ids"]
        if (
            not isinstance(raw_ids, list)
            or len(raw_ids) != n
            or not all(isinstance(a, str) and a for a in raw_ids)
            or len(set(raw_ids)) != n
        ):
            raise MalformedDocument("agent_ids must be n distinct nonempty strings")
        agent_ids = raw_ids

    fn_spec = _parse_function(document["function"], n)
    instance = ProblemInstance.create(q, costs, fn_spec, agent_ids)
    if instance.q < Fraction(1, 2):
        instance = normalize_low_q(instance)
    return instance


def emit(instance: ProblemInstance) -> dict:
    """Canonical document for an instance; ``ingest(emit(x)) == x``."""
    fn = instance.fn_spec
    if fn.name in _SHORTCUT_BUILDERS and _SHORTCUT_BUILDERS[fn.name](fn.n) == fn:
        function = fn.name
    else:
        function = {"ones_counts": list(fn.ones_counts)}
    return {
        "n": instance.n,
        "q": str(instance.q),
        "costs": [str(c) for c in instance.user_costs()],
        "agent_ids": list(instance.agent_ids),
        "function": function,
    }


def normalize_low_q(instance: ProblemInstance) -> ProblemInstance:
    """Mirror an instance with q < 1/2 onto the equivalent one with q > 1/2.

    Relabeling every secret 0 <-> 1 swaps q for 1-q and ones-count w for n-w;
    verdicts, pivotal probabilities, and willing-rank labels are unchanged.
    Returns the instance untouched when q >= 1/2 already.
    """
    if instance.q >= Fraction(1, 2):
        return instance
    mirrored = tuple(reversed(instance.fn_spec.ones_to_one))
    name = instance.fn_spec.name if mirrored == instance.fn_spec.ones_to_one else None
    fn = AnonymousFunctionSpec(instance.n, mirrored, name)
    return replace(instance, q=1 - instance.q, fn_spec=fn)
