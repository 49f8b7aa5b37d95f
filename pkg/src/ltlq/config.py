"""Experiment configuration files (INI-style key = value sections).

Sections: ``[model]`` with ``mdp`` (grid or edge-list file), ``ldba`` and an
optional ``formula``; ``[scheme]`` with ``gamma`` plus either ``gamma_b`` or
``gamma_b_schedule``; ``[learn]`` mirroring :class:`~ltlq.learn.LearnConfig`
plus ``replications``; ``[output]`` with ``dir``. File paths are resolved
relative to the config file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .errors import LtlqError, ParseError, ValidationError
from .ldba import Ldba, parse_ldba
from .learn import LearnConfig
from .mdp import LabeledMdp, build_gridworld, parse_grid, parse_mdp
from .product import ProductMdp, build_product
from .reward import RewardScheme, gamma_b_schedule

__all__ = ["ExperimentConfig", "load_config"]


@dataclass(frozen=True)
class ExperimentConfig:
    mdp_path: Path
    ldba_path: Path | None
    formula: str | None
    scheme: RewardScheme
    learn: LearnConfig
    replications: int
    out_dir: Path

    def load_mdp(self) -> LabeledMdp:
        text = self.mdp_path.read_text()
        if self.mdp_path.suffix == ".grid":
            return build_gridworld(parse_grid(text))
        return parse_mdp(text)

    def load_ldba(self) -> Ldba:
        if self.ldba_path is None:
            raise ValidationError(
                "no LDBA configured: set 'ldba' in [model] to an automaton file "
                "(externally produced automata plug in here)"
            )
        return parse_ldba(self.ldba_path.read_text())

    def load_product(self) -> ProductMdp:
        return build_product(self.load_mdp(), self.load_ldba())


def load_config(path, *, seed=None, episodes=None, replications=None) -> ExperimentConfig:
    """Read a config file; keyword arguments override the file's values."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ParseError(f"bad config {path}: {exc}") from exc

    try:
        model = parser["model"]
    except KeyError:
        raise ParseError(f"{path}: missing [model] section") from None
    base = path.parent

    mdp_path = base / model["mdp"]
    if not mdp_path.exists():
        raise ValidationError(f"{path}: model file not found: {mdp_path}")
    ldba_path = None
    if model.get("ldba"):
        ldba_path = base / model["ldba"]
        if not ldba_path.exists():
            raise ValidationError(f"{path}: LDBA file not found: {ldba_path}")
    formula = model.get("formula") or None

    sch = parser["scheme"] if parser.has_section("scheme") else {}
    gamma = float(sch.get("gamma", "0.99999"))
    if sch.get("gamma_b_schedule"):
        gamma_b = gamma_b_schedule(sch["gamma_b_schedule"], gamma)
    else:
        gamma_b = float(sch.get("gamma_b", "0.99"))
    scheme = RewardScheme(gamma=gamma, gamma_b=gamma_b)

    ln = parser["learn"] if parser.has_section("learn") else {}
    snapshots = tuple(sorted(int(tok) for tok in ln.get("snapshots", "").split()))
    learn = LearnConfig(
        episodes=episodes if episodes is not None else int(ln.get("episodes", "10000")),
        horizon=int(ln.get("horizon", "100")),
        start=ln.get("start", "random"),
        seed=seed if seed is not None else int(ln.get("seed", "0")),
        snapshots=tuple(k for k in snapshots if episodes is None or k <= episodes),
    )
    reps = replications if replications is not None else int(ln.get("replications", "1"))
    if reps < 1:
        raise ValidationError("replications must be at least 1")

    out = parser["output"] if parser.has_section("output") else {}
    out_dir = base / out.get("dir", "out")

    cfg = ExperimentConfig(
        mdp_path=mdp_path,
        ldba_path=ldba_path,
        formula=formula,
        scheme=scheme,
        learn=learn,
        replications=reps,
        out_dir=out_dir,
    )
    # fail early on invalid model files
    try:
        cfg.load_mdp()
        if ldba_path is not None:
            cfg.load_ldba()
    except LtlqError as exc:
        raise type(exc)(f"{path}: {exc}") from exc
    return cfg
