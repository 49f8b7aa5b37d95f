"""LTL formulas and their evaluation on lasso-shaped words.

Concrete syntax: ``true``, ``false``, atom names, ``!``, ``&``, ``|``, ``->``,
``X`` (next), ``U`` (until), ``F`` (eventually), ``G`` (always).
Precedence (tightest first): unary operators, ``U``, ``&``, ``|``, ``->``.
``U`` and ``->`` associate to the right.

A :class:`LassoWord` is the finite representation ``prefix . cycle^omega`` of
an ultimately periodic infinite word over ``2^AP``; :func:`check_lasso`
decides satisfaction exactly by fixpoint evaluation over the finitely many
distinct positions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, ValidationError

__all__ = [
    "Formula",
    "Tru",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Next",
    "Until",
    "Eventually",
    "Always",
    "LassoWord",
    "parse_ltl",
    "check_lasso",
    "to_core",
]


class Formula:
    """Base class for LTL syntax-tree nodes. Nodes are immutable."""

    __slots__ = ()

    def __repr__(self):
        return f"{type(self).__name__}({to_str(self)!r})"

    def __str__(self):
        return to_str(self)

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()


@dataclass(frozen=True, eq=False, repr=False)
class Tru(Formula):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Formula):
    name: str

    def _key(self):
        return (self.name,)


@dataclass(frozen=True, eq=False, repr=False)
class Not(Formula):
    child: Formula

    def _key(self):
        return (self.child,)


@dataclass(frozen=True, eq=False, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def _key(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def _key(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def _key(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Next(Formula):
    child: Formula

    def _key(self):
        return (self.child,)


@dataclass(frozen=True, eq=False, repr=False)
class Until(Formula):
    left: Formula
    right: Formula

    def _key(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Eventually(Formula):
    child: Formula

    def _key(self):
        return (self.child,)


@dataclass(frozen=True, eq=False, repr=False)
class Always(Formula):
    child: Formula

    def _key(self):
        return (self.child,)


def atoms_of(f: Formula) -> frozenset[str]:
    """All atom names occurring in ``f``."""
    if isinstance(f, Atom):
        return frozenset({f.name})
    out: frozenset[str] = frozenset()
    for attr in ("child", "left", "right"):
        sub = getattr(f, attr, None)
        if sub is not None:
            out |= atoms_of(sub)
    return out


def to_core(f: Formula) -> Formula:
    """Rewrite derived operators into the core grammar.

    Core operators: true, atoms, negation, conjunction, next, until.
    The rewrite is semantics-preserving: Or/Implies via De Morgan,
    ``F p == true U p`` and ``G p == !(F !p)``.
    """
    if isinstance(f, (Tru, Atom)):
        return f
    if isinstance(f, Not):
        return Not(to_core(f.child))
    if isinstance(f, And):
        return And(to_core(f.left), to_core(f.right))
    if isinstance(f, Or):
        return Not(And(Not(to_core(f.left)), Not(to_core(f.right))))
    if isinstance(f, Implies):
        return to_core(Or(Not(f.left), f.right))
    if isinstance(f, Next):
        return Next(to_core(f.child))
    if isinstance(f, Until):
        return Until(to_core(f.left), to_core(f.right))
    if isinstance(f, Eventually):
        return Until(Tru(), to_core(f.child))
    if isinstance(f, Always):
        return Not(Until(Tru(), Not(to_core(f.child))))
    raise TypeError(f"not a formula node: {f!r}")


_PRECEDENCE = {Implies: 1, Or: 2, And: 3, Until: 4}


def to_str(f: Formula) -> str:
    """Render ``f`` in the concrete syntax; ``parse_ltl`` inverts this."""

    def wrap(sub: Formula, parent_prec: int, right_assoc_side: bool) -> str:
        text = to_str(sub)
        prec = _PRECEDENCE.get(type(sub))
        if prec is None:
            return text
        if prec < parent_prec or (prec == parent_prec and not right_assoc_side):
            return f"({text})"
        return text

    if isinstance(f, Tru):
        return "true"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _unary_operand(f.child)
    if isinstance(f, Next):
        return "X " + _unary_operand(f.child)
    if isinstance(f, Eventually):
        return "F " + _unary_operand(f.child)
    if isinstance(f, Always):
        return "G " + _unary_operand(f.child)
    if isinstance(f, Until):
        p = _PRECEDENCE[Until]
        return f"{wrap(f.left, p, False)} U {wrap(f.right, p, True)}"
    if isinstance(f, And):
        # left-associative: a right child of equal precedence needs parens
        p = _PRECEDENCE[And]
        return f"{wrap(f.left, p, True)} & {wrap(f.right, p, False)}"
    if isinstance(f, Or):
        p = _PRECEDENCE[Or]
        return f"{wrap(f.left, p, True)} | {wrap(f.right, p, False)}"
    if isinstance(f, Implies):
        p = _PRECEDENCE[Implies]
        return f"{wrap(f.left, p, False)} -> {wrap(f.right, p, True)}"
    raise TypeError(f"not a formula node: {f!r}")


def _unary_operand(sub: Formula) -> str:
    if isinstance(sub, (Tru, Atom, Not, Next, Eventually, Always)):
        return to_str(sub)
    return f"({to_str(sub)})"


# --- parsing -----------------------------------------------------------------

_SYMBOLS = ("->", "(", ")", "!", "&", "|")


def _tokenize(text: str):
    tokens = []  # (kind, value, position)
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        matched = False
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(("sym", sym, i))
                i += len(sym)
                matched = True
                break
        if matched:
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", position=i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens, ap):
        self.tokens = tokens
        self.pos = 0
        self.ap = ap

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", position=pos)

    def parse_implies(self):
        left = self.parse_or()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.peek()[1] == "|":
            self.take()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_until()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.parse_until())
        return left

    def parse_until(self):
        left = self.parse_unary()
        if self.peek()[1] == "U":
            self.take()
            return Until(left, self.parse_until())
        return left

    def parse_unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return Not(self.parse_unary())
        if kind == "name" and val in ("X", "F", "G"):
            self.take()
            child = self.parse_unary()
            return {"X": Next, "F": Eventually, "G": Always}[val](child)
        return self.parse_atom()

    def parse_atom(self):
        kind, val, pos = self.take()
        if val == "(":
            inner = self.parse_implies()
            self.expect(")")
            return inner
        if kind == "name":
            if val == "true":
                return Tru()
            if val == "false":
                return Not(Tru())
            if val in ("U", "X", "F", "G"):
                raise ParseError(f"operator {val!r} used where a formula was expected", position=pos)
            if val not in self.ap:
                raise ParseError(f"undeclared atom {val!r}", position=pos)
            return Atom(val)
        raise ParseError(f"expected a formula, found {val or 'end of input'!r}", position=pos)


def parse_ltl(text: str, ap) -> Formula:
    """Parse ``text`` into a formula over the atomic propositions ``ap``."""
    parser = _Parser(_tokenize(text), frozenset(ap))
    formula = parser.parse_implies()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input starting at {val!r}", position=pos)
    return formula


def parse_propositional(text: str, ap) -> Formula:
    """Parse a guard: like :func:`parse_ltl` but temporal operators are rejected."""
    formula = parse_ltl(text, ap)
    if _has_temporal(formula):
        raise ParseError(f"temporal operator not allowed in guard {text!r}")
    return formula


def _has_temporal(f: Formula) -> bool:
    if isinstance(f, (Next, Until, Eventually, Always)):
        return True
    return any(
        _has_temporal(sub)
        for attr in ("child", "left", "right")
        if (sub := getattr(f, attr, None)) is not None
    )


def eval_propositional(f: Formula, label) -> bool:
    """Evaluate a propositional formula on a single label set."""
    if isinstance(f, Tru):
        return True
    if isinstance(f, Atom):
        return f.name in label
    if isinstance(f, Not):
        return not eval_propositional(f.child, label)
    if isinstance(f, And):
        return eval_propositional(f.left, label) and eval_propositional(f.right, label)
    if isinstance(f, Or):
        return eval_propositional(f.left, label) or eval_propositional(f.right, label)
    if isinstance(f, Implies):
        return (not eval_propositional(f.left, label)) or eval_propositional(f.right, label)
    raise TypeError(f"not propositional: {f!r}")


# --- lasso words -------------------------------------------------------------


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . cycle^omega`` with letters in ``2^AP``."""

    prefix: tuple[frozenset[str], ...]
    cycle: tuple[frozenset[str], ...]

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValidationError("lasso cycle must be nonempty")
        object.__setattr__(self, "prefix", tuple(frozenset(x) for x in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(x) for x in self.cycle))

    @property
    def n_positions(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def letter(self, i: int) -> frozenset[str]:
        """Letter at absolute position ``i`` of the infinite word."""
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.cycle[(i - p) % len(self.cycle)]

    def normalize(self, i: int) -> int:
        """Fold absolute position ``i`` onto the finite position set."""
        p = len(self.prefix)
        if i < p:
            return i
        return p + (i - p) % len(self.cycle)


def check_lasso(f: Formula, w: LassoWord) -> bool:
    """Decide ``prefix . cycle^omega |= f`` exactly.

    Each subformula is evaluated as a vector over the ``|prefix| + |cycle|``
    distinct positions; Until is the least fixpoint on the lasso graph,
    Always the greatest. Work is O(positions * subformulas * positions) in
    the worst case, which is negligible at the sizes handled here.
    """
    n = w.n_positions
    p = len(w.prefix)
    succ = [i + 1 if i + 1 < n else p for i in range(n)]
    letters = list(w.prefix) + list(w.cycle)

    cache: dict[Formula, list[bool]] = {}

    def table(g: Formula) -> list[bool]:
        if g in cache:
            return cache[g]
        if isinstance(g, Tru):
            out = [True] * n
        elif isinstance(g, Atom):
            out = [g.name in letters[i] for i in range(n)]
        elif isinstance(g, Not):
            out = [not v for v in table(g.child)]
        elif isinstance(g, And):
            lt, rt = table(g.left), table(g.right)
            out = [a and b for a, b in zip(lt, rt)]
        elif isinstance(g, Or):
            lt, rt = table(g.left), table(g.right)
            out = [a or b for a, b in zip(lt, rt)]
        elif isinstance(g, Implies):
            lt, rt = table(g.left), table(g.right)
            out = [(not a) or b for a, b in zip(lt, rt)]
        elif isinstance(g, Next):
            ct = table(g.child)
            out = [ct[succ[i]] for i in range(n)]
        elif isinstance(g, Until):
            lt, rt = table(g.left), table(g.right)
            out = [False] * n
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    v = rt[i] or (lt[i] and out[succ[i]])
                    if v != out[i]:
                        out[i] = v
                        changed = True
        elif isinstance(g, Eventually):
            ct = table(g.child)
            out = [False] * n
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    v = ct[i] or out[succ[i]]
                    if v != out[i]:
                        out[i] = v
                        changed = True
        elif isinstance(g, Always):
            ct = table(g.child)
            out = [True] * n
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    v = ct[i] and out[succ[i]]
                    if v != out[i]:
                        out[i] = v
                        changed = True
        else:
            raise TypeError(f"not a formula node: {g!r}")
        cache[g] = out
        return out

    return table(f)[0]
