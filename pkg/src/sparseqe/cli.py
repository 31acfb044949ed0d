"""Command-line interface.

Exit codes: 0 ok, 2 parse error, 3 validation error, 4 configuration error,
10 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .atoms import LinearAtom, Relation
from .benchgen import GenConfig, gen_instance, gen_properties_check
from .errors import (ConfigError, InvalidDecomposition, ParseError,
                     SparseQEError, ValidationError)
from .fme import ConstraintSet
from .graph import build_primal, read_gr, write_gr
from .parser import format_constraints, format_formula, parse_formula
from .pipeline import (StatsRecord, resolve_orders, run_fme_strategy,
                       run_projection_strategy, td_orders)
from .treedecomp import (TreeDecomp, heuristic_td, height, nicify, read_td,
                         validate_td, width, write_td)

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CONFIG = 4
EXIT_INTERNAL = 10


def _read(path):
    return Path(path).read_text()


def _write_out(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_formula(path):
    return parse_formula(_read(path))


def _strategy_arg(s):
    return s.replace("-", "_")


def cmd_gen(args):
    rel = None
    if args.relation:
        rel = {"le": Relation.LE, "ge": Relation.GE, "lt": Relation.LT,
               "gt": Relation.GT, "eq": Relation.EQ}[args.relation]
    cfg = GenConfig(k=args.k, n_vars=args.vars, max_deg=args.maxdeg,
                    include_prob=args.prob, coeff_lo=args.coeff_lo,
                    coeff_hi=args.coeff_hi, seed=args.seed,
                    n_atoms=args.atoms, n_elim=args.elim, relation=rel)
    formula, kt = gen_instance(cfg)
    report = gen_properties_check(formula, kt, cfg)
    if not report.ok:
        raise SparseQEError(f"generator self-check failed: {report.details}")
    text = format_formula(formula)
    out = Path(args.out)
    out.write_text(text)
    sidecar = out.with_suffix(out.suffix + ".json")
    sidecar.write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(formula.atoms)} atoms, "
          f"{len(formula.quantified)} quantified) and {sidecar}")
    return 0


def cmd_graph(args):
    formula = _load_formula(args.formula)
    _write_out(write_gr(build_primal(formula)), args.out)
    return 0


def _load_graph_input(path):
    text = _read(path)
    stripped = next((ln for ln in text.splitlines()
                     if ln.strip() and not ln.strip().startswith(("c", "#"))), "")
    if stripped.startswith("p "):
        return read_gr(text), None
    formula = parse_formula(text)
    return build_primal(formula), formula


def cmd_td(args):
    g, _ = _load_graph_input(args.input)
    if args.import_td:
        t = read_td(_read(args.import_td), variables=sorted(g.vertices))
        bad = validate_td(g, t)
        if bad is not None:
            raise InvalidDecomposition(f"{bad.condition}: {bad.witness}")
    else:
        t = heuristic_td(g, _strategy_arg(args.strategy))
    _write_out(write_td(t, n_vertices=len(g.vertices)), args.out)
    print(f"width {width(t)} height {height(t)} bags {len(t.bags)}", file=sys.stderr)
    return 0


def cmd_order(args):
    formula = _load_formula(args.formula)
    orders = resolve_orders(formula, args.strategy, seed=args.seed,
                            td_strategy=_strategy_arg(args.td_strategy))
    payload = {"strategy": args.strategy,
               "orders": [[v.name for v in o.vars] for o in orders]}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _explicit_decomposition(args, formula):
    if getattr(args, "td_file", None):
        primal = build_primal(formula)
        return read_td(_read(args.td_file), variables=sorted(primal.vertices))
    return None


def _explicit_order(args, formula):
    if getattr(args, "order", None):
        names = [n.strip() for n in args.order.split(",") if n.strip()]
        by_name = {v.name: v for v in formula.quantified}
        missing = [n for n in names if n not in by_name]
        if missing:
            raise ConfigError(f"order names not quantified: {missing}")
        if sorted(names) != sorted(by_name):
            raise ConfigError("order must permute the quantified variables")
        return [by_name[n] for n in names]
    return None


def cmd_fme(args):
    formula = _load_formula(args.formula)
    if not formula.linear:
        raise ConfigError("fme requires a linear formula; use 'project' for NRA")
    explicit = _explicit_order(args, formula)
    if explicit is not None:
        from .fme import run_fme
        result, st = run_fme(formula, explicit, cap=args.cap, raw=args.raw_count)
        rec = StatsRecord(args.formula, "fme", "explicit",
                          [v.name for v in explicit], list(st.per_step_counts),
                          st.peak, None if st.verdict == "cap_exceeded" else st.final,
                          st.elapsed_ms, st.verdict)
    else:
        result, rec = run_fme_strategy(
            formula, args.strategy, instance=args.formula, seed=args.seed,
            cap=args.cap, raw=args.raw_count,
            td_strategy=_strategy_arg(args.td_strategy),
            decomposition=_explicit_decomposition(args, formula),
            engine=args.engine)
    if rec.verdict == "cap_exceeded":
        print("# cap exceeded", file=sys.stderr)
    elif rec.verdict == "false" or (isinstance(result, ConstraintSet) and result.false):
        _write_out("exists ;\n0 = 1\n", args.out)
    else:
        atoms = {a for a in result if isinstance(a, LinearAtom)}
        _write_out(format_constraints(atoms), args.out)
    if args.stats:
        Path(args.stats).write_text(rec.to_json() + "\n")
    print(f"strategy {rec.strategy} final {rec.final_count} "
          f"peak {rec.peak} verdict {rec.verdict}", file=sys.stderr)
    return 0


def cmd_project(args):
    formula = _load_formula(args.formula)
    if formula.linear:
        raise ConfigError("project requires a polynomial formula; use 'fme' for LRA")
    explicit = _explicit_order(args, formula)
    if explicit is not None:
        from .cad import PolySet, projection_sequence
        full = explicit + (list(formula.free) if args.full else [])
        seq = projection_sequence(PolySet.from_formula(formula), full)
        from .cad import combined_degree
        counts = [len(s) for s in seq[1:]]
        degs = [combined_degree(s) if len(s) else 0 for s in seq]
        rec = StatsRecord(args.formula, "cad", "explicit", [v.name for v in full],
                          counts, max(len(s) for s in seq),
                          counts[-1] if counts else len(seq[0]), 0.0, "projected",
                          max_combined_degree=max(degs))
    else:
        seq, rec = run_projection_strategy(
            formula, args.strategy, instance=args.formula, seed=args.seed,
            td_strategy=_strategy_arg(args.td_strategy),
            decomposition=_explicit_decomposition(args, formula),
            include_free=args.full)
    final = seq[-1]
    lines = [str(p) for p in final.sorted()]
    _write_out("\n".join(lines) + ("\n" if lines else ""), args.out)
    if args.stats:
        Path(args.stats).write_text(rec.to_json() + "\n")
    print(f"strategy {rec.strategy} final {rec.final_count} "
          f"max_deg {rec.max_combined_degree}", file=sys.stderr)
    return 0


def cmd_compare(args):
    target = Path(args.path)
    files = sorted(target.glob("*.qf")) if target.is_dir() else [target]
    if not files:
        raise ConfigError(f"no instances under {target}")
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    records = []
    for f in files:
        formula = parse_formula(f.read_text())
        for strat in strategies:
            if formula.linear:
                _, rec = run_fme_strategy(formula, strat, instance=f.name,
                                          seed=args.seed, cap=args.cap)
            else:
                _, rec = run_projection_strategy(formula, strat, instance=f.name,
                                                 seed=args.seed)
            records.append(rec)
    colw = max(len(r.strategy) for r in records)
    namew = max(len(r.instance) for r in records)
    print(f"{'instance':<{namew}}  {'strategy':<{colw}}  {'final':>12}  "
          f"{'peak':>12}  {'ms':>10}  verdict")
    for r in records:
        final = "-" if r.final_count is None else str(r.final_count)
        print(f"{r.instance:<{namew}}  {r.strategy:<{colw}}  {final:>12}  "
              f"{r.peak:>12}  {r.elapsed_ms:>10.1f}  {r.verdict}")
    if args.out:
        Path(args.out).write_text(
            json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True) + "\n")
    return 0


def cmd_validate(args):
    g = read_gr(_read(args.gr))
    t = read_td(_read(args.td), variables=sorted(g.vertices))
    bad = validate_td(g, t)
    if bad is None:
        print("Ok")
        return 0
    print(f"Violation({bad.condition}: {bad.witness})")
    return EXIT_VALIDATION


def build_parser():
    p = argparse.ArgumentParser(prog="sparseqe",
                                description="Treewidth-aware quantifier elimination toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random sparse instance")
    g.add_argument("--k", type=int, required=True, help="target treewidth")
    g.add_argument("--vars", type=int, required=True)
    g.add_argument("--atoms", type=int, default=None)
    g.add_argument("--maxdeg", type=int, default=1)
    g.add_argument("--elim", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--prob", type=float, default=0.1)
    g.add_argument("--coeff-lo", type=int, default=-10)
    g.add_argument("--coeff-hi", type=int, default=10)
    g.add_argument("--relation", choices=["le", "ge", "lt", "gt", "eq"], default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    gr = sub.add_parser("graph", help="primal graph as PACE .gr")
    gr.add_argument("formula")
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_graph)

    td = sub.add_parser("td", help="compute or import a tree decomposition")
    td.add_argument("input", help="formula or .gr file")
    td.add_argument("--strategy", choices=["min-fill", "min-degree"], default="min-fill")
    td.add_argument("--import", dest="import_td", default=None, metavar="FILE.td")
    td.add_argument("--out")
    td.set_defaults(func=cmd_td)

    od = sub.add_parser("order", help="elimination order as JSON")
    od.add_argument("formula")
    od.add_argument("--strategy", default="td",
                    help="td | greedy | brown | natural | random[:N]")
    od.add_argument("--seed", type=int, default=0)
    od.add_argument("--td-strategy", choices=["min-fill", "min-degree"], default="min-fill")
    od.set_defaults(func=cmd_order)

    fm = sub.add_parser("fme", help="eliminate the quantified block (LRA)")
    fm.add_argument("formula")
    fm.add_argument("--order", default=None, help="comma-separated variable names")
    fm.add_argument("--td", dest="td_file", default=None, metavar="FILE.td")
    fm.add_argument("--strategy", default="td")
    fm.add_argument("--td-strategy", choices=["min-fill", "min-degree"], default="min-fill")
    fm.add_argument("--seed", type=int, default=0)
    fm.add_argument("--stats", default=None)
    fm.add_argument("--raw-count", action="store_true")
    fm.add_argument("--cap", type=int, default=None)
    fm.add_argument("--engine", choices=["order", "dp"], default="order")
    fm.add_argument("--out")
    fm.set_defaults(func=cmd_fme)

    pj = sub.add_parser("project", help="CAD projection of the quantified block (NRA)")
    pj.add_argument("formula")
    pj.add_argument("--order", default=None)
    pj.add_argument("--td", dest="td_file", default=None, metavar="FILE.td")
    pj.add_argument("--strategy", default="td")
    pj.add_argument("--td-strategy", choices=["min-fill", "min-degree"], default="min-fill")
    pj.add_argument("--seed", type=int, default=0)
    pj.add_argument("--stats", default=None)
    pj.add_argument("--full", action="store_true",
                    help="continue projecting the free variables")
    pj.add_argument("--out")
    pj.set_defaults(func=cmd_project)

    cp = sub.add_parser("compare", help="StatsRecord per (instance, strategy)")
    cp.add_argument("path", help="instance file or directory of *.qf")
    cp.add_argument("--strategies", required=True)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--cap", type=int, default=None)
    cp.add_argument("--out")
    cp.set_defaults(func=cmd_compare)

    va = sub.add_parser("validate", help="check a .td against a .gr")
    va.add_argument("--td", required=True)
    va.add_argument("--gr", required=True)
    va.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidDecomposition, ValidationError) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SparseQEError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
