"""Labeled MDPs, gridworld construction, induced chains, and BSCC analysis.

Two input formats are supported:

* a grid file (dimensions, glyph rows, and a legend mapping glyphs to
  labels/obstacle/absorbing/restricted actions), compiled by
  :func:`build_gridworld` into an MDP with the 0.8/0.1/0.1 slip model;
* a generic edge-list file with ``s action s' prob`` lines plus
  ``label s: a b`` lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ParseError, ValidationError

__all__ = [
    "LabeledMdp",
    "GridSpec",
    "MemorylessPolicy",
    "MarkovChain",
    "build_gridworld",
    "parse_grid",
    "parse_mdp",
    "induce_chain",
    "bsccs",
    "sample_step",
    "ACTIONS",
]

PROB_TOL = 1e-9

# gridworld compass; "top" decreases the row index (row 0 at the top)
ACTIONS = ("top", "left", "down", "right")
_DELTA = {"top": (-1, 0), "left": (0, -1), "down": (1, 0), "right": (0, 1)}
# perpendicular slip directions for each intended direction
_SIDEWAYS = {
    "top": ("left", "right"),
    "down": ("left", "right"),
    "left": ("top", "down"),
    "right": ("top", "down"),
}
_P_FORWARD = Fraction(8, 10)
_P_SIDE = Fraction(1, 10)


@dataclass(frozen=True)
class LabeledMdp:
    """Finite MDP with per-state action availability and AP labels.

    ``trans[s][a]`` is a tuple of ``(successor, probability)`` pairs; only
    available actions appear. Immutable after validation.
    """

    n_states: int
    action_names: tuple[str, ...]
    available: tuple[tuple[int, ...], ...]
    trans: tuple[dict[int, tuple[tuple[int, float], ...]], ...]
    initial: int
    ap: tuple[str, ...]
    labels: tuple[frozenset[str], ...]
    state_names: tuple[str, ...] = None
    grid_shape: tuple[int, int] = None
    grid_cells: tuple[tuple[int, int], ...] = None

    def __post_init__(self):
        if self.n_states < 1:
            raise ValidationError("MDP needs at least one state")
        if not (0 <= self.initial < self.n_states):
            raise ValidationError("initial state out of range")
        if len(self.available) != self.n_states or len(self.trans) != self.n_states:
            raise ValidationError("per-state tables must cover all states")
        for s in range(self.n_states):
            if not self.available[s]:
                raise ValidationError(f"state {s} has no available action")
            for a in self.available[s]:
                dist = self.trans[s].get(a)
                if not dist:
                    raise ValidationError(f"missing distribution for state {s}, action {a}")
                total = sum(p for _, p in dist)
                if abs(total - 1.0) > PROB_TOL:
                    raise ValidationError(
                        f"probabilities for state {s}, action "
                        f"{self.action_names[a]} sum to {total!r}"
                    )
                for t, p in dist:
                    if not (0 <= t < self.n_states) or p < 0:
                        raise ValidationError(f"bad transition ({s},{a},{t},{p})")

    def name_of(self, s: int) -> str:
        return self.state_names[s] if self.state_names else str(s)


@dataclass(frozen=True)
class MemorylessPolicy:
    """Map state -> action index."""

    choice: tuple[int, ...]

    def __getitem__(self, s: int) -> int:
        return self.choice[s]


@dataclass(frozen=True)
class MarkovChain:
    """Policy-induced chain; ``rows[s]`` is a tuple of (successor, prob)."""

    n_states: int
    rows: tuple[tuple[tuple[int, float], ...], ...]
    initial: int

    def __post_init__(self):
        for s, row in enumerate(self.rows):
            total = sum(p for _, p in row)
            if abs(total - 1.0) > PROB_TOL:
                raise ValidationError(f"chain row {s} sums to {total!r}")

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n_states, self.n_states))
        for s, row in enumerate(self.rows):
            for t, p in row:
                out[s, t] += p
        return out


@dataclass(frozen=True)
class GridSpec:
    """Declarative gridworld: labels, obstacles, absorbing and restricted cells."""

    rows: int
    cols: int
    labels: dict[tuple[int, int], frozenset[str]] = field(default_factory=dict)
    obstacles: frozenset[tuple[int, int]] = frozenset()
    absorbing: frozenset[tuple[int, int]] = frozenset()
    restricted: dict[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)
    initial: tuple[int, int] = (0, 0)
    ap: tuple[str, ...] = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValidationError("grid must be at least 1x1")
        for cell in list(self.labels) + list(self.obstacles) + list(self.absorbing) + list(
            self.restricted
        ) + [self.initial]:
            r, c = cell
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValidationError(f"cell {cell} outside the {self.rows}x{self.cols} grid")
        if self.initial in self.obstacles:
            raise ValidationError("initial cell is an obstacle")
        if self.ap is None:
            names = sorted(set().union(*self.labels.values())) if self.labels else []
            object.__setattr__(self, "ap", tuple(names))
        for cell, acts in self.restricted.items():
            for a in acts:
                if a not in ACTIONS:
                    raise ValidationError(f"unknown action {a!r} at cell {cell}")
            if not acts:
                raise ValidationError(f"cell {cell} restricts away all actions")


def build_gridworld(g: GridSpec) -> LabeledMdp:
    """Compile a grid into an MDP with the 0.8 forward / 0.1+0.1 sideways slip.

    Slip mass whose direction is blocked by a wall or an obstacle stays in
    place (no renormalization). Absorbing cells self-loop with probability 1
    for every action. Probabilities are accumulated as exact rationals per
    destination and converted to floats once.
    """
    cells = [
        (r, c)
        for r in range(g.rows)
        for c in range(g.cols)
        if (r, c) not in g.obstacles
    ]
    if not cells:
        raise ValidationError("grid has no free cells")
    index = {cell: i for i, cell in enumerate(cells)}
    for cell in g.labels:
        if cell in g.obstacles:
            raise ValidationError(f"labeled cell {cell} is an obstacle")

    def blocked(r, c):
        return not (0 <= r < g.rows and 0 <= c < g.cols) or (r, c) in g.obstacles

    available = []
    trans = []
    for cell in cells:
        r, c = cell
        s = index[cell]
        acts = g.restricted.get(cell, ACTIONS)
        act_ids = tuple(ACTIONS.index(a) for a in acts)
        row: dict[int, tuple[tuple[int, float], ...]] = {}
        for a in acts:
            aid = ACTIONS.index(a)
            if cell in g.absorbing:
                row[aid] = ((s, 1.0),)
                continue
            mass: dict[int, Fraction] = {}
            moves = [(a, _P_FORWARD)] + [(d, _P_SIDE) for d in _SIDEWAYS[a]]
            for direction, p in moves:
                dr, dc = _DELTA[direction]
                nr, nc = r + dr, c + dc
                dest = s if blocked(nr, nc) else index[(nr, nc)]
                mass[dest] = mass.get(dest, Fraction(0)) + p
            assert sum(mass.values()) == 1
            row[aid] = tuple((t, float(p)) for t, p in sorted(mass.items()))
        available.append(act_ids)
        trans.append(row)

    labels = tuple(g.labels.get(cell, frozenset()) for cell in cells)
    return LabeledMdp(
        n_states=len(cells),
        action_names=ACTIONS,
        available=tuple(available),
        trans=tuple(trans),
        initial=index[g.initial],
        ap=g.ap,
        labels=labels,
        state_names=tuple(f"({r},{c})" for r, c in cells),
        grid_shape=(g.rows, g.cols),
        grid_cells=tuple(cells),
    )


def induce_chain(m: LabeledMdp, policy: MemorylessPolicy) -> MarkovChain:
    """Chain with exactly the policy-selected rows."""
    rows = []
    for s in range(m.n_states):
        a = policy[s]
        if a not in m.available[s]:
            raise ValidationError(
                f"policy selects unavailable action {a} at state {m.name_of(s)}"
            )
        rows.append(m.trans[s][a])
    return MarkovChain(n_states=m.n_states, rows=tuple(rows), initial=m.initial)


def bsccs(chain: MarkovChain) -> frozenset[frozenset[int]]:
    """Bottom SCCs: strongly connected components without outgoing edges."""
    src, dst = [], []
    for s, row in enumerate(chain.rows):
        for t, p in row:
            if p > 0:
                src.append(s)
                dst.append(t)
    n = chain.n_states
    graph = csr_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    n_comp, comp = connected_components(graph, directed=True, connection="strong")
    leaves = np.zeros(n_comp, dtype=bool)
    for s, t in zip(src, dst):
        if comp[s] != comp[t]:
            leaves[comp[s]] = True
    out = []
    for k in range(n_comp):
        if not leaves[k]:
            out.append(frozenset(np.flatnonzero(comp == k).tolist()))
    return frozenset(out)


def sample_step(m: LabeledMdp, s: int, a: int, rng: np.random.Generator) -> int:
    """Draw a successor from P(s, a, .); deterministic given the rng state."""
    if a not in m.available[s]:
        raise ValidationError(f"action {a} unavailable at state {m.name_of(s)}")
    dist = m.trans[s][a]
    u = rng.random()
    acc = 0.0
    for t, p in dist[:-1]:
        acc += p
        if u < acc:
            return t
    return dist[-1][0]


# --- file formats ----------------------------------------------------------


def parse_grid(text: str) -> GridSpec:
    """Parse the grid file format into a :class:`GridSpec`.

    Sections: ``ap:``, ``rows:``, ``cols:``, ``initial: r c``, ``legend:``
    (one ``glyph = property, ...`` per line; properties are ``label <name>``,
    ``obstacle``, ``absorbing``, ``actions <a> ...``) and ``grid:`` followed
    by ``rows`` lines of whitespace-separated glyphs.
    """
    ap = None
    rows = cols = None
    initial = (0, 0)
    legend: dict[str, dict] = {}
    grid_rows: list[list[str]] = []
    mode = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped == "legend:":
            mode = "legend"
            continue
        if stripped == "grid:":
            mode = "grid"
            continue
        if mode == "grid":
            grid_rows.append(stripped.split())
            continue
        if mode == "legend":
            if "=" not in stripped:
                raise ParseError(f"malformed legend line {raw!r}", line=lineno)
            glyph, _, props_txt = stripped.partition("=")
            glyph = glyph.strip()
            if len(glyph) != 1:
                raise ParseError(f"legend glyph must be one character: {glyph!r}", line=lineno)
            entry = {"labels": set(), "obstacle": False, "absorbing": False, "actions": None}
            for prop in filter(None, (p.strip() for p in props_txt.split(","))):
                words = prop.split()
                if words[0] == "label" and len(words) >= 2:
                    entry["labels"].update(words[1:])
                elif words[0] == "obstacle":
                    entry["obstacle"] = True
                elif words[0] == "absorbing":
                    entry["absorbing"] = True
                elif words[0] == "actions" and len(words) >= 2:
                    entry["actions"] = tuple(words[1:])
                else:
                    raise ParseError(f"unknown legend property {prop!r}", line=lineno)
            legend[glyph] = entry
            continue
        if ":" not in stripped:
            raise ParseError(f"malformed line {raw!r}", line=lineno)
        head, _, tail = stripped.partition(":")
        head, tail = head.strip(), tail.strip()
        if head == "ap":
            ap = tuple(tail.split())
        elif head == "rows":
            rows = int(tail)
        elif head == "cols":
            cols = int(tail)
        elif head == "initial":
            parts = tail.split()
            if len(parts) != 2:
                raise ParseError("initial expects 'row col'", line=lineno)
            initial = (int(parts[0]), int(parts[1]))
        else:
            raise ParseError(f"unknown header {head!r}", line=lineno)

    if rows is None or cols is None:
        raise ParseError("missing rows:/cols: headers")
    if len(grid_rows) != rows or any(len(r) != cols for r in grid_rows):
        raise ParseError(f"grid block must be {rows} rows of {cols} glyphs")

    labels = {}
    obstacles = set()
    absorbing = set()
    restricted = {}
    for r, row in enumerate(grid_rows):
        for c, glyph in enumerate(row):
            if glyph not in legend:
                raise ParseError(f"glyph {glyph!r} at ({r},{c}) missing from legend")
            entry = legend[glyph]
            if entry["obstacle"]:
                obstacles.add((r, c))
                continue
            if entry["labels"]:
                labels[(r, c)] = frozenset(entry["labels"])
            if entry["absorbing"]:
                absorbing.add((r, c))
            if entry["actions"] is not None:
                restricted[(r, c)] = entry["actions"]
    return GridSpec(
        rows=rows,
        cols=cols,
        labels=labels,
        obstacles=frozenset(obstacles),
        absorbing=frozenset(absorbing),
        restricted=restricted,
        initial=initial,
        ap=ap,
    )


def parse_mdp(text: str) -> LabeledMdp:
    """Parse the generic edge-list MDP format.

    Headers ``ap:``, ``states:``, ``initial:``; per-state labels as
    ``label <s>: a b``; transitions as ``<s> <action> <s'> <prob>`` lines.
    Action names are collected in order of first appearance.
    """
    ap = ()
    n_states = None
    initial = 0
    label_map: dict[int, frozenset[str]] = {}
    action_ids: dict[str, int] = {}
    edges: list[tuple[int, int, int, float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ap:"):
            ap = tuple(line[3:].split())
        elif line.startswith("states:"):
            n_states = int(line[7:])
        elif line.startswith("initial:"):
            initial = int(line[8:])
        elif line.startswith("label"):
            head, _, tail = line.partition(":")
            s = int(head.split()[1])
            label_map[s] = frozenset(tail.split())
        else:
            parts = line.split()
            if len(parts) != 4:
                raise ParseError(f"expected 's action s2 prob', found {raw!r}", line=lineno)
            s, act, t, p = parts
            aid = action_ids.setdefault(act, len(action_ids))
            edges.append((int(s), aid, int(t), float(p)))

    if n_states is None:
        raise ParseError("missing states: header")
    dists: list[dict[int, list[tuple[int, float]]]] = [dict() for _ in range(n_states)]
    for s, aid, t, p in edges:
        if not (0 <= s < n_states and 0 <= t < n_states):
            raise ParseError(f"state out of range in edge ({s},{t})")
        dists[s].setdefault(aid, []).append((t, p))
    available = tuple(tuple(sorted(d)) for d in dists)
    trans = tuple({a: tuple(pairs) for a, pairs in d.items()} for d in dists)
    labels = tuple(label_map.get(s, frozenset()) for s in range(n_states))
    for lab in labels:
        if not lab <= set(ap):
            raise ParseError(f"label {set(lab)} uses atoms outside ap {ap}")
    return LabeledMdp(
        n_states=n_states,
        action_names=tuple(action_ids),
        available=available,
        trans=trans,
        initial=initial,
        ap=ap,
        labels=labels,
    )
