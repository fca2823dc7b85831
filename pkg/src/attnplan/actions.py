"""Action models and the two update operations.

An attention action model carries two equivalence relations per agent: the
plain relation ``q`` (indistinguishable no matter what) and the starred
relation ``qstar`` (indistinguishable only while the agent's budget is too
low for the question asked).  Updating a state filters world/event pairs by
preconditions, charges each agent the cost of its question, and relates two
surviving pairs for an agent when their source worlds were related and the
events fall together under the branch rule:

* budget below cost: events related by ``q`` or ``qstar`` (no refinement);
* budget covers cost: events related by ``q``, or by ``qstar`` when their
  preconditions give the same answer to the question (both entail it, or
  neither does).

Costs are constant across each connected component of ``q`` union ``qstar``
by construction: explicit entries name a component via any member event and
lookups normalize to the component representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    CostLookupError,
    FormulaValidationError,
    IllFormedResult,
    NotApplicable,
    StateValidationError,
)
from .logic import (
    Formula,
    Signature,
    Top,
    TOP,
    entails,
    or_all,
    validate_formula,
)
from .models import (
    Atom,
    AttentionState,
    EpistemicState,
    Partition,
    _eval,
    _eval_epistemic,
    _normalize_partition,
    check,
    require_same_signature,
    validate_state,
)


@dataclass(frozen=True)
class CostEntry:
    """Explicit cost of asking ``formula`` within the component of ``event``."""

    agent: str
    formula: Formula
    event: str
    cost: int


@dataclass(frozen=True)
class CostTable:
    """Explicit entries, then per-agent defaults, then a global default.

    The trivial question ``T`` always costs 0, before any lookup.
    """

    entries: tuple[CostEntry, ...] = ()
    agent_defaults: Mapping[str, int] = field(default_factory=dict)
    default: int | None = None


def _fill_partitions(
    sig: Signature, events: tuple[str, ...], given: Mapping[str, Iterable[Iterable[str]]]
) -> dict[str, Partition]:
    out: dict[str, Partition] = {}
    for agent in sig.agents:
        blocks = given.get(agent)
        if blocks is None:
            out[agent] = tuple(frozenset((e,)) for e in events)
        else:
            out[agent] = _normalize_partition(events, blocks)
    return out


@dataclass(frozen=True)
class AttentionActionModel:
    """Events with preconditions, the two relations, and the cost table."""

    sig: Signature
    events: tuple[str, ...]
    q: Mapping[str, Partition]
    qstar: Mapping[str, Partition]
    pre: Mapping[str, Formula]
    cost: CostTable = field(default_factory=CostTable)

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "q", _fill_partitions(self.sig, self.events, self.q))
        object.__setattr__(
            self, "qstar", _fill_partitions(self.sig, self.events, self.qstar)
        )
        object.__setattr__(self, "pre", dict(self.pre))

    @cached_property
    def _component_rep(self) -> dict[str, dict[str, str]]:
        """Representative (least-index member) of each q-union-qstar component."""
        index = {e: k for k, e in enumerate(self.events)}
        reps: dict[str, dict[str, str]] = {}
        for agent in self.sig.agents:
            parent = {e: e for e in self.events}

            def find(x: str) -> str:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for blocks in (self.q[agent], self.qstar[agent]):
                for block in blocks:
                    members = sorted(block, key=lambda e: index.get(e, len(index)))
                    for member in members[1:]:
                        ra, rb = find(members[0]), find(member)
                        if ra != rb:
                            parent[rb] = ra
            components: dict[str, list[str]] = {}
            for e in self.events:
                components.setdefault(find(e), []).append(e)
            reps[agent] = {}
            for members in components.values():
                rep = min(members, key=lambda e: index[e])
                for e in members:
                    reps[agent][e] = rep
        return reps

    def component_of(self, agent: str, event: str) -> str:
        try:
            return self._component_rep[agent][event]
        except KeyError:
            raise CostLookupError(f"unknown agent {agent!r} or event {event!r}")

    def cost_of(self, agent: str, question: Formula, event: str) -> int:
        """Cost charged to ``agent`` for ``question`` at ``event``'s component."""
        if isinstance(question, Top):
            return 0
        rep = self.component_of(agent, event)
        found: list[int] = []
        for entry in self.cost.entries:
            if (
                entry.agent == agent
                and entry.formula == question
                and entry.event in self._component_rep[agent]
                and self._component_rep[agent][entry.event] == rep
            ):
                found.append(entry.cost)
        if found:
            if len(set(found)) > 1:
                raise CostLookupError(
                    f"conflicting explicit costs for agent {agent!r} in the "
                    f"component of {rep!r}"
                )
            return found[0]
        if agent in self.cost.agent_defaults:
            return self.cost.agent_defaults[agent]
        if self.cost.default is not None:
            return self.cost.default
        raise CostLookupError(
            f"no cost entry or default covers agent {agent!r} at event {event!r}"
        )

    def union_related(self, agent: str, e: str, f: str) -> bool:
        """Whether two events are related by q or qstar for ``agent``."""
        return self._same_block(self.q[agent], e, f) or self._same_block(
            self.qstar[agent], e, f
        )

    @staticmethod
    def _same_block(blocks: Partition, e: str, f: str) -> bool:
        return any(e in block and f in block for block in blocks)


@dataclass(frozen=True)
class AttentionAction:
    """An action model plus the question asked of each agent and the actual event."""

    name: str
    model: AttentionActionModel
    questions: Mapping[str, Formula] = field(default_factory=dict)
    actual: str = ""

    def __post_init__(self) -> None:
        filled = {a: self.questions.get(a, TOP) for a in self.model.sig.agents}
        object.__setattr__(self, "questions", filled)
        if not self.actual:
            object.__setattr__(self, "actual", self.model.events[0])

    @property
    def sig(self) -> Signature:
        return self.model.sig


@dataclass(frozen=True)
class EpistemicAction:
    """A plain action model: events, one relation per agent, pre and post.

    ``post`` maps each event to a partial map from atoms to formulas;
    missing atoms keep their truth value (identity).  ``actual_family``
    is non-empty for actions whose actual event must be resolved against
    the state it is applied to (see ``emulate.resolve_actual``); plain
    actions leave it empty.
    """

    sig: Signature
    events: tuple[str, ...]
    q: Mapping[str, Partition]
    pre: Mapping[str, Formula]
    post: Mapping[str, Mapping[Atom, Formula]] = field(default_factory=dict)
    actual: str = ""
    actual_family: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "q", _fill_partitions(self.sig, self.events, self.q))
        object.__setattr__(self, "pre", dict(self.pre))
        object.__setattr__(
            self, "post", {e: dict(m) for e, m in self.post.items()}
        )
        if not self.actual:
            object.__setattr__(self, "actual", self.events[0])

    def is_nopost(self) -> bool:
        return all(not mapping for mapping in self.post.values())

    @cached_property
    def _blocks(self) -> dict[str, dict[str, frozenset[str]]]:
        return {
            agent: {e: block for block in blocks for e in block}
            for agent, blocks in self.q.items()
        }

    def block_of(self, agent: str, event: str) -> frozenset[str]:
        return self._blocks[agent][event]


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str


def _check_partition(
    agent: str, label: str, blocks: Partition, events: tuple[str, ...]
) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    seen: set[str] = set()
    for block in blocks:
        if not block:
            out.append(Diagnostic("error", f"{label} of agent {agent!r} has an empty block"))
        overlap = seen & block
        if overlap:
            out.append(
                Diagnostic(
                    "error",
                    f"{label} of agent {agent!r} has overlapping blocks on {sorted(overlap)}",
                )
            )
        seen |= block
    if seen != set(events):
        out.append(
            Diagnostic(
                "error",
                f"{label} of agent {agent!r} does not partition the events exactly",
            )
        )
    return out


def validate_action(x: AttentionAction) -> list[Diagnostic]:
    """Structural diagnostics for an action; errors make updates unreliable."""
    out: list[Diagnostic] = []
    model = x.model
    sig = model.sig
    if not model.events:
        out.append(Diagnostic("error", "action model has no events"))
        return out
    if len(set(model.events)) != len(model.events):
        out.append(Diagnostic("error", "event names are not unique"))
    if x.actual not in model.events:
        out.append(Diagnostic("error", f"actual event {x.actual!r} is not an event"))
    if set(model.pre) != set(model.events):
        out.append(Diagnostic("error", "preconditions do not cover exactly the events"))
    for event, pre in model.pre.items():
        try:
            validate_formula(sig, pre)
        except FormulaValidationError as exc:
            out.append(Diagnostic("error", f"pre of {event!r}: {exc}"))
    for agent in sig.agents:
        out.extend(_check_partition(agent, "q", model.q[agent], model.events))
        out.extend(_check_partition(agent, "qstar", model.qstar[agent], model.events))
    for agent, question in x.questions.items():
        if agent not in sig.agents:
            out.append(Diagnostic("error", f"question for unknown agent {agent!r}"))
            continue
        try:
            validate_formula(sig, question)
        except FormulaValidationError as exc:
            out.append(Diagnostic("error", f"question for {agent!r}: {exc}"))
    seen_components: dict[tuple[str, Formula, str], int] = {}
    for entry in model.cost.entries:
        if entry.agent not in sig.agents:
            out.append(Diagnostic("error", f"cost entry for unknown agent {entry.agent!r}"))
            continue
        if entry.event not in model.events:
            out.append(
                Diagnostic(
                    "error",
                    f"cost entry of agent {entry.agent!r} names unknown event {entry.event!r}",
                )
            )
            continue
        try:
            validate_formula(sig, entry.formula)
        except FormulaValidationError as exc:
            out.append(Diagnostic("error", f"cost entry formula: {exc}"))
            continue
        if entry.cost < 0:
            out.append(
                Diagnostic(
                    "error",
                    f"cost entry of agent {entry.agent!r} has negative cost {entry.cost}",
                )
            )
        if isinstance(entry.formula, Top):
            out.append(
                Diagnostic(
                    "warning",
                    f"cost entry of agent {entry.agent!r} prices the trivial "
                    "question, which is fixed at 0; the entry is ignored",
                )
            )
            continue
        key = (entry.agent, entry.formula, model.component_of(entry.agent, entry.event))
        if key in seen_components:
            if seen_components[key] != entry.cost:
                out.append(
                    Diagnostic(
                        "error",
                        f"conflicting costs for agent {entry.agent!r} on the "
                        f"component of {key[2]!r}: {seen_components[key]} vs {entry.cost}",
                    )
                )
            else:
                out.append(
                    Diagnostic(
                        "warning",
                        f"duplicate cost entry for agent {entry.agent!r} on the "
                        f"component of {key[2]!r}",
                    )
                )
        else:
            seen_components[key] = entry.cost
    for agent in sig.agents:
        if not _union_transitive(model, agent):
            out.append(
                Diagnostic(
                    "warning",
                    f"q union qstar is not transitive for agent {agent!r}; "
                    "updates may raise IllFormedResult",
                )
            )
    return out


def _union_transitive(model: AttentionActionModel, agent: str) -> bool:
    events = model.events
    for e in events:
        for f in events:
            if not model.union_related(agent, e, f):
                continue
            for g in events:
                if model.union_related(agent, f, g) and not model.union_related(
                    agent, e, g
                ):
                    return False
    return True


def is_nfl(x: AttentionAction, relaxed: bool = False) -> bool:
    """Membership in the planning-friendly class.

    Strict: for every agent the starred relation is total and every
    possible cost is positive.  Relaxed keeps the cost condition but only
    asks that q and qstar together relate every pair of events.
    """
    model = x.model
    for agent in model.sig.agents:
        if relaxed:
            total = all(
                model.union_related(agent, e, f)
                for e in model.events
                for f in model.events
            )
        else:
            total = len(model.qstar[agent]) == 1 and set(model.qstar[agent][0]) == set(
                model.events
            )
        if not total:
            return False
        effective_default = model.cost.agent_defaults.get(agent, model.cost.default)
        if effective_default is None or effective_default <= 0:
            return False
    for entry in model.cost.entries:
        if not isinstance(entry.formula, Top) and entry.cost <= 0:
            return False
    return True


def applicable(s: AttentionState, x: AttentionAction) -> bool:
    """Whether the actual event's precondition holds at the actual world."""
    require_same_signature(s.sig, x.sig)
    return check(s, x.model.pre[x.actual], s.actual)


def _pair_name(world: str, event: str) -> str:
    return f"{world}*{event}"


def _find_intransitive_triple(
    members: list[str], related: set[tuple[str, str]]
) -> tuple[str, str, str] | None:
    for a in members:
        for b in members:
            if a != b and (a, b) not in related:
                continue
            for c in members:
                if (b, c) in related or b == c:
                    if a != c and (a, c) not in related:
                        return (a, b, c)
    return None


def attention_update(s: AttentionState, x: AttentionAction) -> AttentionState:
    """Execute an attention action on a state (the product of the two).

    Raises NotApplicable when the actual event fails at the actual world
    and IllFormedResult when some agent's updated relation is not
    transitive (the one way it can fail to be an equivalence).
    """
    require_same_signature(s.sig, x.sig)
    model = x.model
    sig = s.sig
    if not _eval(s, model.pre[x.actual], s.actual):
        raise NotApplicable(
            f"pre of actual event {x.actual!r} fails at actual world {s.actual!r}"
        )

    survivors = [
        (w, e)
        for w in s.worlds
        for e in model.events
        if _eval(s, model.pre[e], w)
    ]
    names = {pair: _pair_name(*pair) for pair in survivors}
    if len(set(names.values())) != len(names):
        raise ValueError("world and event names collide under pairing; rename one")

    costs = {
        agent: {e: model.cost_of(agent, x.questions[agent], e) for e in model.events}
        for agent in sig.agents
    }
    answers = {
        agent: {
            e: entails(sig, model.pre[e], x.questions[agent]) for e in model.events
        }
        for agent in sig.agents
    }

    partitions: dict[str, Partition] = {}
    for agent in sig.agents:
        q_blocks = model.q[agent]
        qstar_blocks = model.qstar[agent]
        related: set[tuple[str, str]] = set()
        for i, (w, e) in enumerate(survivors):
            for v, f in survivors[i + 1 :]:
                if v not in s.block_of(agent, w):
                    continue
                in_q = model._same_block(q_blocks, e, f)
                in_qstar = model._same_block(qstar_blocks, e, f)
                if not (in_q or in_qstar):
                    continue
                if costs[agent][e] > s.att(agent, w):
                    hit = True  # below budget: no refinement of qstar
                else:
                    hit = in_q or (in_qstar and answers[agent][e] == answers[agent][f])
                if hit:
                    a, b = names[(w, e)], names[(v, f)]
                    related.add((a, b))
                    related.add((b, a))
        # Connected components, then verify the relation is complete on each.
        parent = {names[p]: names[p] for p in survivors}

        def find(z: str) -> str:
            while parent[z] != z:
                parent[z] = parent[parent[z]]
                z = parent[z]
            return z

        for a, b in related:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
        components: dict[str, list[str]] = {}
        for pair in survivors:
            components.setdefault(find(names[pair]), []).append(names[pair])
        for members in components.values():
            if len(members) < 2:
                continue
            complete = all(
                a == b or (a, b) in related for a in members for b in members
            )
            if not complete:
                triple = _find_intransitive_triple(members, related)
                assert triple is not None
                raise IllFormedResult(agent, triple)
        partitions[agent] = tuple(
            frozenset(members) for members in components.values()
        )

    new_worlds = tuple(names[p] for p in survivors)
    valuation = {names[(w, e)]: s.valuation[w] for (w, e) in survivors}
    attention = {
        agent: {
            names[(w, e)]: max(0, s.att(agent, w) - costs[agent][e])
            for (w, e) in survivors
        }
        for agent in sig.agents
    }
    result = AttentionState(
        sig=sig,
        worlds=new_worlds,
        partitions=partitions,
        valuation=valuation,
        attention=attention,
        actual=names[(s.actual, x.actual)],
    )
    problems = validate_state(result)
    if problems:  # pragma: no cover - guarded by construction
        raise StateValidationError(problems)
    return result


def apply_sequence(
    s: AttentionState, actions: Iterable[AttentionAction]
) -> AttentionState:
    """Fold attention_update over ``actions``; NotApplicable carries the index."""
    current = s
    for index, action in enumerate(actions):
        if not applicable(current, action):
            raise NotApplicable(
                f"action {action.name!r} is not applicable at step {index}",
                index=index,
            )
        current = attention_update(current, action)
    return current


def background_announcement(x: AttentionAction) -> AttentionAction:
    """Collapse an action to its single-event background version.

    The one event's precondition is the event-order disjunction of the
    original preconditions, both relations are total, every question is
    trivial, and explicit costs are re-keyed to the new event (conflicting
    explicit costs for one agent and formula raise ValueError).
    """
    model = x.model
    event = "e!"
    pre = or_all([model.pre[e] for e in model.events])
    merged: dict[tuple[str, Formula], int] = {}
    for entry in model.cost.entries:
        key = (entry.agent, entry.formula)
        if key in merged and merged[key] != entry.cost:
            raise ValueError(
                f"explicit costs for agent {entry.agent!r} collide when all "
                "events share one component"
            )
        merged[key] = entry.cost
    entries = tuple(
        CostEntry(agent, formula, event, cost)
        for (agent, formula), cost in merged.items()
    )
    new_model = AttentionActionModel(
        sig=model.sig,
        events=(event,),
        q={agent: (frozenset((event,)),) for agent in model.sig.agents},
        qstar={agent: (frozenset((event,)),) for agent in model.sig.agents},
        pre={event: pre},
        cost=CostTable(
            entries=entries,
            agent_defaults=dict(model.cost.agent_defaults),
            default=model.cost.default,
        ),
    )
    return AttentionAction(
        name=x.name + "!",
        model=new_model,
        questions={agent: TOP for agent in model.sig.agents},
        actual=event,
    )


def product_update(k: EpistemicState, y: EpistemicAction) -> EpistemicState:
    """Standard product of an epistemic state with an epistemic action."""
    require_same_signature(k.sig, y.sig)
    if not _eval_epistemic(k, y.pre[y.actual], k.actual):
        raise NotApplicable(
            f"pre of actual event {y.actual!r} fails at actual world {k.actual!r}"
        )
    survivors = [
        (w, e) for w in k.worlds for e in y.events if _eval_epistemic(k, y.pre[e], w)
    ]
    names = {pair: _pair_name(*pair) for pair in survivors}
    if len(set(names.values())) != len(names):
        raise ValueError("world and event names collide under pairing; rename one")

    partitions: dict[str, Partition] = {}
    for agent in k.sig.agents:
        grouped: dict[tuple[int, int], list[str]] = {}
        source_blocks = {w: i for i, block in enumerate(k.partitions[agent]) for w in block}
        event_blocks = {e: i for i, block in enumerate(y.q[agent]) for e in block}
        for w, e in survivors:
            grouped.setdefault((source_blocks[w], event_blocks[e]), []).append(
                names[(w, e)]
            )
        partitions[agent] = tuple(frozenset(ws) for ws in grouped.values())

    valuation: dict[str, frozenset[Atom]] = {}
    for w, e in survivors:
        post = y.post.get(e, {})
        atoms: set[Atom] = {a for a in k.valuation[w] if a not in post}
        for atom, formula in post.items():
            if _eval_epistemic(k, formula, w):
                atoms.add(atom)
        valuation[names[(w, e)]] = frozenset(atoms)

    return EpistemicState(
        sig=k.sig,
        worlds=tuple(names[p] for p in survivors),
        partitions=partitions,
        valuation=valuation,
        actual=names[(k.actual, y.actual)],
    )
