"""Command-line front end.

Subcommands: ``check`` (exact maximal satisfaction probabilities), ``learn``
(Q-learning with optional replications and oracle comparison), ``simulate``
(seeded rollout of a learned policy through the projected controller),
``render`` (ASCII panels from dumped values or policies), ``compare``
(learned Q table against an oracle value file).

Exit codes: 0 success, 1 validation/parse error, 2 unexpected runtime error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import learn as learning
from . import oracle, render
from .config import ExperimentConfig, load_config
from .errors import LtlqError
from .ldba import StateLasso, buchi_accepts
from .ltl import LassoWord, check_lasso, parse_ltl
from .mdp import MemorylessPolicy, sample_step
from .product import ProductMdp, project_policy

__all__ = ["main"]


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _values_csv(values: np.ndarray) -> str:
    lines = ["state,value"]
    lines += [f"{s},{float(v)!r}" for s, v in enumerate(values)]
    return "\n".join(lines) + "\n"


def _read_values_csv(path: Path) -> np.ndarray:
    rows = [line for line in path.read_text().splitlines()[1:] if line.strip()]
    out = np.empty(len(rows))
    for line in rows:
        s, v = line.split(",")
        out[int(s)] = float(v)
    return out


def _policy_text(p: ProductMdp, policy: MemorylessPolicy) -> str:
    lines = [f"{x} {p.action_names[policy[x]]}" for x in range(p.n_states)]
    return "\n".join(lines) + "\n"


def _read_policy(path: Path, p: ProductMdp) -> MemorylessPolicy:
    names = {name: i for i, name in enumerate(p.action_names)}
    choice = [0] * p.n_states
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        s_txt, name = line.split()
        choice[int(s_txt)] = names[name]
    return MemorylessPolicy(tuple(choice))


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    product = cfg.load_product()
    values = oracle.max_buchi_probability(product)
    out = Path(args.out) if args.out else cfg.out_dir
    _write(out / "oracle.csv", _values_csv(values))
    _write(out / "oracle_render.txt", render.render_values(product, values))
    print(f"product states: {product.n_states}")
    print(f"max satisfaction probability at initial state: {values[product.initial]:.6f}")
    print(f"wrote {out / 'oracle.csv'} and {out / 'oracle_render.txt'}")
    return 0


def _one_replication(product, cfg: ExperimentConfig, seed: int):
    env = learning.ProductEnv(product)
    learn_cfg = learning.LearnConfig(
        episodes=cfg.learn.episodes,
        horizon=cfg.learn.horizon,
        start=cfg.learn.start,
        seed=seed,
        snapshots=cfg.learn.snapshots,
    )
    return learning.run_learning(env, cfg.scheme, learn_cfg)


def cmd_learn(args) -> int:
    cfg = load_config(
        args.config, seed=args.seed, episodes=args.episodes, replications=args.replications
    )
    product = cfg.load_product()
    out = Path(args.out) if args.out else cfg.out_dir

    if cfg.learn.episodes == 0:
        print("warning: 0 episodes configured; policy falls back to tie-break defaults")

    seeds = [cfg.learn.seed + r for r in range(cfg.replications)]
    if cfg.replications == 1:
        results = [_one_replication(product, cfg, seeds[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(8, cfg.replications)) as pool:
            results = list(pool.map(lambda s: _one_replication(product, cfg, s), seeds))

    oracle_values = None
    if args.oracle:
        oracle_values = oracle.max_buchi_probability(product)
        _write(out / "oracle.csv", _values_csv(oracle_values))

    # primary artifacts come from the first replication
    table, log = results[0]
    policy = learning.greedy_policy(table)
    _write(out / "qtable.txt", table.dump(product.action_names))
    _write(out / "policy.txt", _policy_text(product, policy))
    _write(out / "values.csv", _values_csv(table.state_values()))
    _write(out / "train_log.csv", log.to_csv(oracle_values))

    if oracle_values is not None:
        final_err = learning.l2_error(table.state_values(), oracle_values)
        print(f"final L2 error vs oracle: {final_err:.6f}")
        if cfg.learn.snapshots and cfg.replications > 1:
            lines = ["episodes,mean_l2_error,std_l2_error"]
            for i, ep in enumerate(cfg.learn.snapshots):
                errs = [
                    learning.l2_error(lg.snapshots[i][1], oracle_values)
                    for _, lg in results
                ]
                lines.append(f"{ep},{float(np.mean(errs))!r},{float(np.std(errs))!r}")
            _write(out / "error_curve.csv", "\n".join(lines) + "\n")
            print(f"wrote {out / 'error_curve.csv'}")
    print(f"wrote policy and Q table to {out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    product = cfg.load_product()
    m = product.mdp
    policy = _read_policy(Path(args.policy), product)
    controller = project_policy(policy, product)
    rng = np.random.default_rng(cfg.learn.seed)

    s = m.initial
    controller.reset()
    trace = []  # (mdp state, label, automaton state after eps-chasing, action)
    for _ in range(args.steps):
        a = controller.act(s)
        trace.append((s, m.labels[s], controller.q, a))
        s_next = sample_step(m, s, a, rng)
        controller.observe(s, s_next)
        s = s_next

    for t, (st, label, q, a) in enumerate(trace):
        lab = "{" + " ".join(sorted(label)) + "}"
        print(f"{t} {m.name_of(st)} {lab} q{q} {m.action_names[a]}")

    # lasso: first revisit of an (mdp state, automaton state) pair
    seen: dict[tuple[int, int], int] = {}
    lasso = None
    for i, (st, _, q, _) in enumerate(trace):
        if (st, q) in seen:
            lasso = (seen[(st, q)], i)
            break
        seen[(st, q)] = i
    if lasso is None:
        print("no lasso detected within the trace")
        return 0
    start, end = lasso
    cycle = trace[start:end]
    accepting = any(product.join(st, q) in product.accepting for st, _, q, _ in cycle)
    print(f"lasso: prefix length {start}, cycle length {end - start}")
    print(f"buchi accepting: {accepting}")
    if cfg.formula:
        formula = parse_ltl(cfg.formula, m.ap)
        word = LassoWord(
            prefix=tuple(lab for _, lab, _, _ in trace[:start]),
            cycle=tuple(lab for _, lab, _, _ in cycle),
        )
        print(f"formula satisfied: {check_lasso(formula, word)}")
        run = StateLasso(
            prefix=tuple(q for _, _, q, _ in trace[:start]),
            cycle=tuple(q for _, _, q, _ in cycle),
        )
        assert buchi_accepts(product.automaton, run) == accepting
    return 0


def cmd_render(args) -> int:
    cfg = load_config(args.config)
    product = cfg.load_product()
    if args.values:
        values = _read_values_csv(Path(args.values))
        print(render.render_values(product, values), end="")
    elif args.policy:
        policy = _read_policy(Path(args.policy), product)
        print(render.render_policy(product, policy), end="")
    else:
        print("nothing to render: pass --values or --policy", file=sys.stderr)
        return 1
    return 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    product = cfg.load_product()
    table = learning.QTable.load(Path(args.qtable).read_text(), product)
    if args.oracle:
        oracle_values = _read_values_csv(Path(args.oracle))
    else:
        oracle_values = oracle.max_buchi_probability(product)
    learned = table.state_values()
    policy = learning.greedy_policy(table)
    achieved = oracle.policy_buchi_probability(product, policy)
    l2 = learning.l2_error(learned, oracle_values)
    linf = float(np.max(np.abs(learned - oracle_values)))
    optimal_everywhere = bool(np.all(np.abs(achieved - oracle_values) < 1e-9))
    print(f"L2 error: {l2:.6f}")
    print(f"Linf error: {linf:.6f}")
    print(f"greedy policy optimal at all states: {optimal_everywhere}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ltlq",
        description="Synthesize and verify policies for LTL objectives on MDPs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="exact maximal satisfaction probabilities")
    pc.add_argument("--config", required=True)
    pc.add_argument("--out")
    pc.set_defaults(func=cmd_check)

    pl = sub.add_parser("learn", help="Q-learning synthesis")
    pl.add_argument("--config", required=True)
    pl.add_argument("--seed", type=int)
    pl.add_argument("--episodes", type=int)
    pl.add_argument("--replications", type=int)
    pl.add_argument("--oracle", action="store_true", help="also compute oracle values and errors")
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_learn)

    ps = sub.add_parser("simulate", help="seeded rollout of a learned policy")
    ps.add_argument("--config", required=True)
    ps.add_argument("--policy", required=True)
    ps.add_argument("--steps", type=int, default=50)
    ps.add_argument("--seed", type=int)
    ps.set_defaults(func=cmd_simulate)

    pr = sub.add_parser("render", help="ASCII panels from dumped values or policies")
    pr.add_argument("--config", required=True)
    pr.add_argument("--values")
    pr.add_argument("--policy")
    pr.set_defaults(func=cmd_render)

    pm = sub.add_parser("compare", help="learned Q table vs oracle")
    pm.add_argument("--config", required=True)
    pm.add_argument("--qtable", required=True)
    pm.add_argument("--oracle", help="oracle CSV; computed on the fly if omitted")
    pm.set_defaults(func=cmd_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LtlqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
