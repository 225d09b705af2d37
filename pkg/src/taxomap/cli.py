"""Command line front end.

Four subcommands:

* ``map``      align a source graph onto a target graph and write one
               mapping file per part of speech, plus a convergence figure;
* ``eval``     score mapping files against a gold sample, rendering a
               text table, a key-value dump, and an interval figure;
* ``gen``      produce a seeded synthetic graph pair with gold data;
* ``inspect``  re-run the solver while printing per-iteration support
               breakdowns for chosen source synsets.

All output orderings are sorted, so repeated runs with the same inputs
produce byte-identical files.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from .constraints import (
    Connection,
    load_stoplist,
    parse_constraint_config,
    total_support_parts,
    DEFAULT_STOPLIST,
)
from .errors import ConfigError, EvalInputError, TaxomapError
from .evaluate import evaluate, load_gold_file, render_kv, render_table
from .graph import POS_BY_CODE, load_graph, serialize_graph
from .pipeline import (
    PRESETS,
    candidate_problem,
    plan_from_spec,
    run_all,
    write_mapping_file,
)
from .relax import Mapping, Settings
from .synth import SynthConfig, generate


def _add_graph_args(parser):
    parser.add_argument("--source-nodes", required=True, help="source synset file")
    parser.add_argument("--source-edges", required=True, help="source relation file")
    parser.add_argument("--target-nodes", required=True, help="target synset file")
    parser.add_argument("--target-edges", required=True, help="target relation file")


def _add_solver_args(parser):
    parser.add_argument("--plan", default="nv>a>r", help="phase plan, e.g. nv>a>r (default)")
    parser.add_argument("--config", help="constraint configuration file")
    parser.add_argument("--init", default="uniform", choices=("uniform", "random"),
                        help="initial weight mode")
    parser.add_argument("--seed", type=int, default=0, help="seed for random init")
    parser.add_argument("--epsilon", type=float, default=1e-4,
                        help="stop when no weight moves by this much")
    parser.add_argument("--max-iters", type=int, default=500, help="iteration cap")
    parser.add_argument("--threshold", type=float, default=0.5,
                        help="minimum weight for an output link")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for independent problems in one phase")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taxomap",
        description="Align one sense graph onto another by relaxation labelling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="compute a mapping")
    _add_graph_args(p_map)
    _add_solver_args(p_map)
    p_map.add_argument("--out", required=True,
                       help="output prefix; writes <out>.n, <out>.v, ...")
    p_map.add_argument("--no-figures", action="store_true",
                       help="skip the convergence figure")
    p_map.set_defaults(func=_cmd_map)

    p_eval = sub.add_parser("eval", help="score a mapping against gold data")
    _add_graph_args(p_eval)
    p_eval.add_argument("--mapping", required=True,
                        help="mapping prefix as written by map")
    p_eval.add_argument("--gold", required=True, help="gold sample file")
    p_eval.add_argument("--plan", default="nv>a>r", help="phase plan, for report order")
    p_eval.add_argument("--out", help="directory for report.txt, report.tsv, report.png")
    p_eval.add_argument("--no-figures", action="store_true",
                        help="skip the report figure")
    p_eval.set_defaults(func=_cmd_eval)

    p_gen = sub.add_parser("gen", help="generate a synthetic graph pair")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--nodes", type=int, default=100, help="noun count when --pos is absent")
    p_gen.add_argument("--pos", help="per-pos counts, e.g. n=190,v=100,a=100,r=30")
    p_gen.add_argument("--word-pool", type=int, default=40)
    p_gen.add_argument("--polysemy", type=float, default=0.3)
    p_gen.add_argument("--extra-words", type=float, default=0.3)
    p_gen.add_argument("--branching", type=int, default=4)
    p_gen.add_argument("--gloss-tokens", type=int, default=3)
    p_gen.add_argument("--frame-rate", type=float, default=0.8)
    p_gen.add_argument("--delete", type=float, default=0.0, help="node delete rate")
    p_gen.add_argument("--split", type=float, default=0.0, help="node split rate")
    p_gen.add_argument("--rename", type=float, default=0.0, help="word rename rate")
    p_gen.add_argument("--rewire", type=float, default=0.0, help="edge rewire rate")
    p_gen.set_defaults(func=_cmd_gen)

    p_ins = sub.add_parser("inspect", help="trace support for chosen synsets")
    _add_graph_args(p_ins)
    _add_solver_args(p_ins)
    p_ins.add_argument("--trace", action="append", required=True, metavar="ID",
                       help="source synset id to trace; repeatable")
    p_ins.set_defaults(func=_cmd_inspect)
    return parser


def _load_run_inputs(args):
    """Graphs, plan and stoplist shared by map and inspect."""
    source = load_graph(args.source_nodes, args.source_edges)
    target = load_graph(args.target_nodes, args.target_edges)
    stoplist = DEFAULT_STOPLIST
    constraint_sets = None
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_constraint_config(fh.read(), path=args.config)
        constraint_sets = {pos: cfg.set_for(pos, PRESETS) for pos in POS_BY_CODE.values()}
        if cfg.stoplist_path:
            # Stoplist paths are taken relative to the config file.
            base = os.path.dirname(os.path.abspath(args.config))
            stoplist = load_stoplist(os.path.join(base, cfg.stoplist_path))
    plan = plan_from_spec(args.plan, constraint_sets)
    try:
        settings = Settings(
            init_mode=args.init,
            seed=args.seed,
            epsilon=args.epsilon,
            max_iterations=args.max_iters,
            output_threshold=args.threshold,
            threads=args.threads,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return source, target, plan, settings, stoplist


def _cmd_map(args) -> int:
    source, target, plan, settings, stoplist = _load_run_inputs(args)
    parent = os.path.dirname(args.out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    results = run_all(source, target, plan, settings, stoplist)
    deltas_by_code = {}
    for pos in plan.all_pos():
        result = results[pos]
        path = f"{args.out}.{pos.value}"
        write_mapping_file(result.mapping, path)
        deltas_by_code[pos.value] = list(result.stats.deltas)
        print(
            f"pos={pos.value} variables={result.stats.variables} "
            f"connections={result.stats.connections} "
            f"iterations={result.stats.iterations} "
            f"converged={'yes' if result.stats.converged else 'no'} "
            f"coverage={result.mapping.coverage():.4f}"
        )
        print(f"wrote {path}")
    if not args.no_figures:
        from .plots import plot_convergence

        figure_path = f"{args.out}.convergence.png"
        plot_convergence(deltas_by_code, figure_path)
        print(f"wrote {figure_path}")
    return 0


def _cmd_eval(args) -> int:
    source = load_graph(args.source_nodes, args.source_edges)
    target = load_graph(args.target_nodes, args.target_edges)
    gold = load_gold_file(args.gold)
    plan = plan_from_spec(args.plan)

    by_pos: dict = {}
    for sid in gold.ids():
        synset = source.synsets.get(sid)
        if synset is None:
            raise EvalInputError(f"gold id {sid!r} is not in the source graph")
        by_pos.setdefault(synset.pos, {})[sid] = gold.entries[sid]

    missing = [pos.value for pos in by_pos if pos not in plan.all_pos()]
    if missing:
        raise EvalInputError(
            f"gold contains pos {sorted(missing)} outside plan {args.plan!r}"
        )

    from .evaluate import GoldSample
    from .pipeline import load_mapping_file

    reports = []
    for pos in plan.all_pos():
        if pos not in by_pos:
            continue
        path = f"{args.mapping}.{pos.value}"
        if not os.path.exists(path):
            raise EvalInputError(f"missing mapping file {path}")
        mapping = Mapping(load_mapping_file(path))
        problem = candidate_problem(source, target, pos)
        reports.append(evaluate(mapping, GoldSample(by_pos[pos]), problem))

    table = render_table(reports)
    sys.stdout.write(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write(table)
        with open(os.path.join(args.out, "report.tsv"), "w", encoding="utf-8") as fh:
            fh.write(render_kv(reports))
        print(f"wrote {os.path.join(args.out, 'report.txt')}")
        print(f"wrote {os.path.join(args.out, 'report.tsv')}")
        if not args.no_figures:
            from .plots import plot_report

            figure_path = os.path.join(args.out, "report.png")
            plot_report({r.pos.value: r for r in reports}, figure_path)
            print(f"wrote {figure_path}")
    return 0


def _parse_pos_counts(text: str) -> dict:
    counts = {}
    for chunk in text.split(","):
        code, sep, value = chunk.partition("=")
        code = code.strip()
        if not sep or code not in POS_BY_CODE:
            raise ConfigError(f"bad pos count {chunk!r}; expected like n=190")
        try:
            counts[code] = int(value)
        except ValueError:
            raise ConfigError(f"bad pos count {chunk!r}; expected like n=190") from None
    return counts


def _cmd_gen(args) -> int:
    config = SynthConfig(
        seed=args.seed,
        node_count=args.nodes,
        pos_counts=_parse_pos_counts(args.pos) if args.pos else None,
        max_branching=args.branching,
        word_pool=args.word_pool,
        polysemy=args.polysemy,
        extra_word_rate=args.extra_words,
        node_delete=args.delete,
        node_split=args.split,
        word_rename=args.rename,
        edge_rewire=args.rewire,
        gloss_tokens=args.gloss_tokens,
        frame_rate=args.frame_rate,
    )
    source, target, gold = generate(config)
    os.makedirs(args.out, exist_ok=True)

    from .evaluate import format_gold

    for name, graph in (("source", source), ("target", target)):
        nodes_text, edges_text = serialize_graph(graph)
        for suffix, text in (("nodes", nodes_text), ("edges", edges_text)):
            path = os.path.join(args.out, f"{name}_{suffix}.tsv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        print(f"{name}: {len(graph.synsets)} synsets")
    gold_path = os.path.join(args.out, "gold.tsv")
    with open(gold_path, "w", encoding="utf-8") as fh:
        fh.write(format_gold(gold))
    print(f"gold: {len(gold)} entries")
    return 0


def _trace_observer(problem, traced, stream):
    """Print per-iteration support breakdowns for the traced variables."""

    def observer(iteration, before, supports, after, delta):
        for var in traced:
            vi = problem.var_index[var]
            print(f"iter {iteration} pos={problem.pos.value} {var}", file=stream)
            for t in problem.labels[vi]:
                parts = total_support_parts(
                    Connection(var, t),
                    problem.constraints,
                    before,
                    problem.frozen,
                    problem.source,
                    problem.target,
                    problem.stoplist,
                )
                total = math.fsum(v for _, v, _ in parts) / problem.constraints.total_weight
                print(
                    f"  {var}->{t}  weight {before.weight(var, t):.6f}"
                    f" -> {after.weight(var, t):.6f}  support {total:.6f}",
                    file=stream,
                )
                for label, value, contribs in parts:
                    if contribs is None:
                        print(f"    {label}: {value:.6f}", file=stream)
                        continue
                    shown = ", ".join(f"{s}->{u}:{w:.4f}" for s, u, w in contribs[:4])
                    more = f" (+{len(contribs) - 4} more)" if len(contribs) > 4 else ""
                    tail = f" [{shown}]{more}" if contribs else ""
                    print(f"    {label}: {value:.6f}{tail}", file=stream)

    return observer


def _cmd_inspect(args) -> int:
    source, target, plan, settings, stoplist = _load_run_inputs(args)
    traced_by_pos: dict = {}
    for sid in args.trace:
        synset = source.synsets.get(sid)
        if synset is None:
            print(f"warning: trace id {sid!r} is not a source synset", file=sys.stderr)
            continue
        if synset.pos not in plan.all_pos():
            print(f"warning: trace id {sid!r} has pos outside the plan", file=sys.stderr)
            continue
        traced_by_pos.setdefault(synset.pos, []).append(sid)
    if not traced_by_pos:
        raise ConfigError("no usable trace ids")

    # Run only as far as the last phase that contains a traced pos.
    keep = []
    for phase in plan.phases:
        keep.append(phase)
        if traced_by_pos and all(
            pos in {p for ph in keep for p in ph.pos} for pos in traced_by_pos
        ):
            break
    truncated = type(plan)(tuple(keep))

    def observer_for(pos, problem):
        traced = [v for v in traced_by_pos.get(pos, []) if v in problem.var_index]
        if not traced:
            return None
        return _trace_observer(problem, sorted(traced), sys.stdout)

    run_all(source, target, truncated, settings, stoplist, observer_for=observer_for)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TaxomapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
