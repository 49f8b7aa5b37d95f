"""ASCII rendering of values and policies for grid-backed products.

One panel per automaton state: cells show either the value rounded to two
decimals or the chosen action (``^ < v >`` for top/left/down/right, ``e1``
etc. for epsilon actions). Obstacles render as ``##``. Non-grid models fall
back to a two-column state/value table.
"""

from __future__ import annotations

import io

import numpy as np

from .mdp import ACTIONS, LabeledMdp, MemorylessPolicy
from .product import ProductMdp

__all__ = ["render_values", "render_policy", "render_table"]

_ARROWS = {"top": "^", "left": "<", "down": "v", "right": ">"}


def _grid_layout(m: LabeledMdp):
    if m.grid_shape is None:
        return None
    index = {cell: s for s, cell in enumerate(m.grid_cells)}
    return m.grid_shape, index


def render_table(values: np.ndarray, names=None) -> str:
    out = io.StringIO()
    out.write("state value\n")
    for s, v in enumerate(values):
        name = names[s] if names else str(s)
        out.write(f"{name} {v:.6f}\n")
    return out.getvalue()


def _panels(p: ProductMdp, cell_text) -> str:
    layout = _grid_layout(p.mdp)
    out = io.StringIO()
    (rows, cols), index = layout
    for q in range(p.automaton.n_states):
        out.write(f"automaton state q{q}:\n")
        for r in range(rows):
            cells = []
            for c in range(cols):
                s = index.get((r, c))
                cells.append("  ## " if s is None else cell_text(s, q))
            out.write("".join(cells).rstrip() + "\n")
        out.write("\n")
    return out.getvalue()


def render_values(p: ProductMdp, values: np.ndarray) -> str:
    """Grid panels of per-cell values, two decimals, one panel per q."""
    if _grid_layout(p.mdp) is None:
        return render_table(values, [p.name_of(x) for x in range(p.n_states)])

    def cell(s, q):
        return f" {values[p.join(s, q)]:.2f}"

    return _panels(p, cell)


def render_policy(p: ProductMdp, policy: MemorylessPolicy) -> str:
    """Grid panels of chosen actions; epsilon choices render as e1, e2, ..."""
    if _grid_layout(p.mdp) is None:
        names = [p.action_names[policy[x]] for x in range(p.n_states)]
        out = io.StringIO()
        out.write("state action\n")
        for x in range(p.n_states):
            out.write(f"{p.name_of(x)} {names[x]}\n")
        return out.getvalue()

    def cell(s, q):
        a = policy[p.join(s, q)]
        name = p.action_names[a]
        if p.is_eps(a):
            return f"  e{name[3:]} "
        return f"   {_ARROWS.get(name, '?')} "

    return _panels(p, cell)
