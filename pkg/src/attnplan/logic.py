"""Epistemic language with attention atoms: AST, parser, printer, tableau.

The core connectives are truth, propositional atoms, per-agent attention
atoms ``(att_i = n)`` / ``(att_i < n)``, negation, conjunction, and the
knowledge modality ``K_i``.  Everything else (``F``, ``|``, ``->``, ``<->``,
``>=``, ``>``) is sugar that normalizes to the core at construction, so two
formulas are equal iff their core ASTs are equal.

Validity and entailment are decided by a tableau over equivalence-class
("clique") relations: each agent's accessibility within a branch is a
partition of the branch's worlds grown by diamond witnesses, and each
(agent, clique) pair carries a set of candidate attention values narrowed
by attention literals, which makes attention introspection come out valid
without extra rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import FormulaSyntaxError, FormulaValidationError

# ---------------------------------------------------------------------------
# Signature


@dataclass(frozen=True)
class Signature:
    """Agents, a common attention bound, and the propositional atoms."""

    agents: tuple[str, ...]
    attention_bound: int
    prop_atoms: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.agents:
            raise ValueError("signature needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("agent names must be unique")
        if len(set(self.prop_atoms)) != len(self.prop_atoms):
            raise ValueError("atom names must be unique")
        if self.attention_bound < 0:
            raise ValueError("attention bound must be >= 0")
        ident = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
        for name in self.agents + self.prop_atoms:
            if not ident.match(name):
                raise ValueError(f"{name!r} is not a valid identifier")
        for atom in self.prop_atoms:
            if atom in ("T", "F") or atom.startswith(("att_", "K_")):
                raise ValueError(f"atom name {atom!r} collides with reserved syntax")

    def attention_atoms(self) -> tuple["Formula", ...]:
        """Every attention atom expressible within the bound, in a fixed order."""
        out: list[Formula] = []
        for agent in self.agents:
            for n in range(self.attention_bound + 1):
                out.append(AttEq(agent, n))
            for n in range(self.attention_bound + 1):
                out.append(AttLess(agent, n))
        return tuple(out)


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    """Base class; concrete nodes are frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class PropAtom(Formula):
    name: str


@dataclass(frozen=True)
class AttEq(Formula):
    """``(att_agent = bound)`` — the agent's attention is exactly ``bound``."""

    agent: str
    bound: int


@dataclass(frozen=True)
class AttLess(Formula):
    """``(att_agent < bound)`` — the agent's attention is below ``bound``."""

    agent: str
    bound: int


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    sub: Formula


TOP = Top()


def bot() -> Formula:
    return Not(TOP)


def or_(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def iff(left: Formula, right: Formula) -> Formula:
    return And(implies(left, right), implies(right, left))


def att_geq(agent: str, bound: int) -> Formula:
    """``(att_agent >= bound)`` as negated strict inequality."""
    return Not(AttLess(agent, bound))


def att_gt(agent: str, bound: int) -> Formula:
    """``(att_agent > bound)``: neither below nor equal."""
    return And(Not(AttLess(agent, bound)), Not(AttEq(agent, bound)))


def and_all(parts: Iterable[Formula]) -> Formula:
    """Left-associated conjunction; empty yields truth."""
    result: Formula | None = None
    for part in parts:
        result = part if result is None else And(result, part)
    return TOP if result is None else result


def or_all(parts: Iterable[Formula]) -> Formula:
    """Left-associated disjunction; empty yields falsity."""
    result: Formula | None = None
    for part in parts:
        result = part if result is None else or_(result, part)
    return bot() if result is None else result


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.sub)
    elif isinstance(f, And):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Know):
        yield from subformulas(f.sub)


def modal_depth(f: Formula) -> int:
    """Maximum nesting of knowledge modalities."""
    if isinstance(f, (Top, PropAtom, AttEq, AttLess)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, And):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Know):
        return 1 + modal_depth(f.sub)
    raise ValueError(f"not a formula node: {f!r}")


def validate_formula(sig: Signature, f: Formula) -> None:
    """Raise FormulaValidationError if ``f`` does not fit ``sig``."""
    for sub in subformulas(f):
        if isinstance(sub, PropAtom):
            if sub.name not in sig.prop_atoms:
                raise FormulaValidationError(f"unknown atom {sub.name!r}")
        elif isinstance(sub, (AttEq, AttLess)):
            if sub.agent not in sig.agents:
                raise FormulaValidationError(f"unknown agent {sub.agent!r}")
            if not 0 <= sub.bound <= sig.attention_bound:
                raise FormulaValidationError(
                    f"attention value {sub.bound} outside 0..{sig.attention_bound}"
                )
        elif isinstance(sub, Know):
            if sub.agent not in sig.agents:
                raise FormulaValidationError(f"unknown agent {sub.agent!r}")
        elif not isinstance(sub, (Top, Not, And)):
            raise FormulaValidationError(f"not a formula node: {sub!r}")


# ---------------------------------------------------------------------------
# Printing


def format_formula(f: Formula) -> str:
    """Render a core AST; parses back to the same AST."""
    if isinstance(f, Top):
        return "T"
    if isinstance(f, PropAtom):
        return f.name
    if isinstance(f, AttEq):
        return f"(att_{f.agent} = {f.bound})"
    if isinstance(f, AttLess):
        return f"(att_{f.agent} < {f.bound})"
    if isinstance(f, Not):
        return "~" + format_formula(f.sub)
    if isinstance(f, And):
        return f"({format_formula(f.left)} & {format_formula(f.right)})"
    if isinstance(f, Know):
        return f"K_{f.agent} {format_formula(f.sub)}"
    raise ValueError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<geq>>=)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<neg>~)
  | (?P<conj>&)
  | (?P<disj>\|)
  | (?P<eq>=)
  | (?P<lt><)
  | (?P<gt>>)
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup or ""
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over the grammar:

    formula := andor (('->' | '<->') formula)?
    andor   := unary (('&' | '|') unary)*
    unary   := '~' unary | 'K_<agent>' unary | primary
    primary := 'T' | 'F' | atom | '(' attention ')' | '(' formula ')'
    attention := 'att_<agent>' ('=' | '<' | '>' | '>=') nat
    """

    def __init__(self, sig: Signature, tokens: list[_Token]):
        self.sig = sig
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.take()
        if tok.kind != kind:
            raise FormulaSyntaxError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok.kind != "eof":
            raise FormulaSyntaxError(f"unexpected trailing {tok.text!r}", tok.pos)
        return f

    def formula(self) -> Formula:
        left = self.andor()
        tok = self.peek()
        if tok.kind == "imp":
            self.take()
            return implies(left, self.formula())
        if tok.kind == "iff":
            self.take()
            return iff(left, self.formula())
        return left

    def andor(self) -> Formula:
        left = self.unary()
        while self.peek().kind in ("conj", "disj"):
            op = self.take()
            right = self.unary()
            left = And(left, right) if op.kind == "conj" else or_(left, right)
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "neg":
            self.take()
            return Not(self.unary())
        if tok.kind == "ident" and tok.text.startswith("K_") and len(tok.text) > 2:
            self.take()
            agent = tok.text[2:]
            if agent not in self.sig.agents:
                raise FormulaSyntaxError(f"unknown agent {agent!r}", tok.pos)
            return Know(agent, self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        if tok.kind == "ident":
            if tok.text == "T":
                return TOP
            if tok.text == "F":
                return bot()
            if tok.text not in self.sig.prop_atoms:
                raise FormulaSyntaxError(f"unknown atom {tok.text!r}", tok.pos)
            return PropAtom(tok.text)
        if tok.kind == "lpar":
            nxt = self.peek()
            if (
                nxt.kind == "ident"
                and nxt.text.startswith("att_")
                and self.peek(1).kind in ("eq", "lt", "gt", "geq")
            ):
                return self.attention_atom()
            f = self.formula()
            self.expect("rpar", "')'")
            return f
        raise FormulaSyntaxError(
            f"expected a formula, found {tok.text or 'end of input'!r}", tok.pos
        )

    def attention_atom(self) -> Formula:
        ident = self.take()
        agent = ident.text[4:]
        if agent not in self.sig.agents:
            raise FormulaSyntaxError(f"unknown agent {agent!r}", ident.pos)
        op = self.take()
        nat = self.expect("nat", "a number")
        n = int(nat.text)
        if n > self.sig.attention_bound:
            raise FormulaSyntaxError(
                f"attention value {n} exceeds the bound {self.sig.attention_bound}",
                nat.pos,
            )
        self.expect("rpar", "')'")
        if op.kind == "eq":
            return AttEq(agent, n)
        if op.kind == "lt":
            return AttLess(agent, n)
        if op.kind == "gt":
            return att_gt(agent, n)
        if op.kind == "geq":
            return att_geq(agent, n)
        raise FormulaSyntaxError(f"expected =, <, > or >= after att_{agent}", op.pos)


def parse_formula(sig: Signature, text: str) -> Formula:
    """Parse ``text`` against ``sig``; sugar normalizes to the core AST."""
    return _Parser(sig, _tokenize(text)).parse()


# ---------------------------------------------------------------------------
# Satisfiability: negation normal form

# NNF nodes are plain tuples so they hash cheaply:
#   ("top",) ("bot",) ("lit", name, polarity)
#   ("atteq", agent, n, polarity) ("attless", agent, n, polarity)
#   ("and", a, b) ("or", a, b) ("box", agent, a) ("dia", agent, a)

_Nnf = tuple


def _to_nnf(f: Formula, positive: bool) -> _Nnf:
    if isinstance(f, Top):
        return ("top",) if positive else ("bot",)
    if isinstance(f, PropAtom):
        return ("lit", f.name, positive)
    if isinstance(f, AttEq):
        return ("atteq", f.agent, f.bound, positive)
    if isinstance(f, AttLess):
        return ("attless", f.agent, f.bound, positive)
    if isinstance(f, Not):
        return _to_nnf(f.sub, not positive)
    if isinstance(f, And):
        left = _to_nnf(f.left, positive)
        right = _to_nnf(f.right, positive)
        return ("and" if positive else "or", left, right)
    if isinstance(f, Know):
        return ("box" if positive else "dia", f.agent, _to_nnf(f.sub, positive))
    raise ValueError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Satisfiability: clique tableau


class _Branch:
    """One tableau branch: worlds, per-agent cliques, pending obligations."""

    __slots__ = (
        "bound", "next_world", "next_clique", "clique", "members",
        "boxes", "att", "lits", "seen", "todo", "splits",
    )

    def __init__(self, bound: int):
        self.bound = bound
        self.next_world = 1
        self.next_clique = 0
        self.clique: dict[tuple[str, int], int] = {}
        self.members: dict[int, list[int]] = {}
        self.boxes: dict[int, list[_Nnf]] = {}
        self.att: dict[int, set[int]] = {}
        self.lits: dict[tuple[int, str], bool] = {}
        self.seen: set[tuple[int, _Nnf]] = set()
        self.todo: list[tuple[int, _Nnf]] = []
        self.splits: list[tuple[int, _Nnf]] = []

    def clone(self) -> "_Branch":
        other = _Branch.__new__(_Branch)
        other.bound = self.bound
        other.next_world = self.next_world
        other.next_clique = self.next_clique
        other.clique = dict(self.clique)
        other.members = {k: list(v) for k, v in self.members.items()}
        other.boxes = {k: list(v) for k, v in self.boxes.items()}
        other.att = {k: set(v) for k, v in self.att.items()}
        other.lits = dict(self.lits)
        other.seen = set(self.seen)
        other.todo = list(self.todo)
        other.splits = list(self.splits)
        return other

    def clique_of(self, agent: str, world: int) -> int:
        cid = self.clique.get((agent, world))
        if cid is None:
            cid = self.next_clique
            self.next_clique += 1
            self.clique[(agent, world)] = cid
            self.members[cid] = [world]
            self.boxes[cid] = []
        return cid

    def push(self, world: int, node: _Nnf) -> None:
        key = (world, node)
        if key not in self.seen:
            self.seen.add(key)
            self.todo.append(key)


def _expand(branch: _Branch) -> bool:
    """Apply non-branching rules to a fixpoint; False when the branch closes."""
    while branch.todo:
        world, node = branch.todo.pop()
        kind = node[0]
        if kind == "top":
            continue
        if kind == "bot":
            return False
        if kind == "lit":
            _, name, polarity = node
            prior = branch.lits.get((world, name))
            if prior is not None and prior != polarity:
                return False
            branch.lits[(world, name)] = polarity
        elif kind in ("atteq", "attless"):
            _, agent, n, polarity = node
            cid = branch.clique_of(agent, world)
            values = branch.att.setdefault(cid, set(range(branch.bound + 1)))
            if kind == "atteq":
                allowed = values & {n} if polarity else values - {n}
            else:
                allowed = {v for v in values if (v < n) == polarity}
            branch.att[cid] = allowed
            if not allowed:
                return False
        elif kind == "and":
            branch.push(world, node[1])
            branch.push(world, node[2])
        elif kind == "or":
            branch.splits.append((world, node))
        elif kind == "box":
            _, agent, body = node
            cid = branch.clique_of(agent, world)
            branch.boxes[cid].append(body)
            for member in branch.members[cid]:
                branch.push(member, body)
        elif kind == "dia":
            _, agent, body = node
            cid = branch.clique_of(agent, world)
            if any((member, body) in branch.seen for member in branch.members[cid]):
                continue
            fresh = branch.next_world
            branch.next_world += 1
            branch.clique[(agent, fresh)] = cid
            branch.members[cid].append(fresh)
            branch.push(fresh, body)
            for body_box in branch.boxes[cid]:
                branch.push(fresh, body_box)
        else:
            raise ValueError(f"unknown node kind {kind!r}")
    return True


def _satisfiable_branch(branch: _Branch) -> bool:
    if not _expand(branch):
        return False
    if not branch.splits:
        return True
    world, node = branch.splits.pop()
    for alternative in (node[1], node[2]):
        candidate = branch.clone()
        candidate.push(world, alternative)
        if _satisfiable_branch(candidate):
            return True
    return False


@lru_cache(maxsize=65536)
def _satisfiable(bound: int, node: _Nnf) -> bool:
    branch = _Branch(bound)
    branch.push(0, node)
    return _satisfiable_branch(branch)


def is_satisfiable(sig: Signature, f: Formula) -> bool:
    """Whether some pointed model over ``sig`` makes ``f`` true."""
    validate_formula(sig, f)
    return _satisfiable(sig.attention_bound, _to_nnf(f, True))


def is_valid(sig: Signature, f: Formula) -> bool:
    """Whether ``f`` holds at every world of every model over ``sig``."""
    validate_formula(sig, f)
    return not _satisfiable(sig.attention_bound, _to_nnf(f, False))


def entails(sig: Signature, f: Formula, g: Formula) -> bool:
    """Whether ``f -> g`` is valid over ``sig``."""
    return is_valid(sig, implies(f, g))
