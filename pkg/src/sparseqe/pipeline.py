"""End-to-end runs: strategy resolution, per-component decomposition,
elimination/projection, and the statistics records the CLI emits."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .atoms import LinearAtom
from .cad import PolySet, combined_degree, projection_sequence
from .errors import CapExceeded, ConfigError
from .fme import FALSE_SET, ConstraintSet, fme_dp, fme_order, run_fme
from .formula import QuantFormula
from .graph import build_primal, connected_components
from .ordering import (ElimOrder, brown_order, greedy_order, natural_order,
                       order_from_td, random_orders)
from .poly import Poly
from .treedecomp import heuristic_td, nicify, restrict_td


def _atom_polys(formula):
    if formula.linear:
        out = []
        for a in formula.atoms:
            p = Poly({((v, 1),): c for v, c in a.coeffs}) - Poly.const(a.rhs)
            out.append(p)
        return out
    return [a.poly for a in formula.atoms]


def td_orders(formula: QuantFormula, td_strategy: str = "min_fill"):
    """Per-component decompositions and the concatenated elimination order."""
    primal = build_primal(formula)
    comps = connected_components(primal)
    order = []
    infos = []
    for comp in comps:
        td = heuristic_td(comp, td_strategy)
        ntd = nicify(td)
        o = order_from_td(ntd, graph=comp)
        order.extend(o.vars)
        infos.append((comp, td, ntd))
    return ElimOrder(tuple(order), ("td",)), infos


def resolve_orders(formula: QuantFormula, strategy: str, seed: int = 0,
                   td_strategy: str = "min_fill", decomposition=None):
    """Elimination orders for a named strategy.

    Returns a list (several for ``random:N``, one otherwise).
    """
    if strategy == "natural":
        return [natural_order(formula.quantified)]
    if strategy == "td":
        if decomposition is not None:
            return [order_from_td(decomposition, graph=build_primal(formula))]
        order, _ = td_orders(formula, td_strategy)
        return [order]
    if strategy == "greedy":
        if not formula.linear:
            raise ConfigError("greedy ordering needs a linear formula")
        return [greedy_order(list(formula.atoms), formula.quantified)]
    if strategy == "brown":
        return [brown_order(_atom_polys(formula), formula.quantified)]
    if strategy.startswith("random"):
        n = 5
        if ":" in strategy:
            try:
                n = int(strategy.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad strategy {strategy!r}") from None
        return random_orders(formula.quantified, n, seed)
    raise ConfigError(f"unknown strategy {strategy!r}")


@dataclass
class StatsRecord:
    instance: str
    mode: str                 # "fme" | "cad"
    strategy: str
    order: list
    per_step_counts: list
    peak: int
    final_count: int | None
    elapsed_ms: float
    verdict: str
    max_combined_degree: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "instance": self.instance,
            "mode": self.mode,
            "strategy": self.strategy,
            "order": self.order,
            "per_step_counts": self.per_step_counts,
            "peak": self.peak,
            "final_count": self.final_count,
            "elapsed_ms": self.elapsed_ms,
            "verdict": self.verdict,
        }
        if self.mode == "cad":
            d["max_combined_degree"] = self.max_combined_degree
        d.update(self.extra)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_fme_strategy(formula: QuantFormula, strategy: str, *, instance="<memory>",
                     seed: int = 0, cap: int | None = None, raw: bool = False,
                     td_strategy: str = "min_fill", decomposition=None,
                     engine: str = "order"):
    """Eliminate the quantified block under a strategy; best-of-N for random."""
    if formula.is_false:
        return FALSE_SET, StatsRecord(instance, "fme", strategy, [], [], 0, 0, 0.0, "false")
    if engine == "dp":
        return _run_fme_dp(formula, strategy, instance=instance, cap=cap,
                           td_strategy=td_strategy, decomposition=decomposition)
    orders = resolve_orders(formula, strategy, seed=seed, td_strategy=td_strategy,
                            decomposition=decomposition)
    best = None
    trials = []
    for o in orders:
        result, st = run_fme(formula, o.vars, cap=cap, raw=raw)
        final = None if st.verdict == "cap_exceeded" else st.final
        trials.append({"order": [v.name for v in o.vars], "final": final,
                       "verdict": st.verdict})
        if best is None or _better(st, best[1]):
            best = (result, st, o)
    result, st, o = best
    rec = StatsRecord(instance, "fme", strategy, [v.name for v in o.vars],
                      list(st.per_step_counts), st.peak,
                      None if st.verdict == "cap_exceeded" else st.final,
                      st.elapsed_ms, st.verdict)
    if len(trials) > 1:
        rec.extra["trials"] = trials
    return result, rec


def _better(st, best_st):
    rank = {"false": 0, "qf": 1, "cap_exceeded": 2}
    a = (rank[st.verdict], st.final if st.verdict != "cap_exceeded" else float("inf"))
    b = (rank[best_st.verdict], best_st.final if best_st.verdict != "cap_exceeded" else float("inf"))
    return a < b


def _run_fme_dp(formula, strategy, *, instance, cap, td_strategy, decomposition):
    """Decomposition-driven engine; one component at a time."""
    if strategy != "td":
        raise ConfigError("the dp engine runs the td strategy only")
    start = time.perf_counter()
    primal = build_primal(formula)
    comps = connected_components(primal)
    result = ConstraintSet(a for a in formula.atoms
                           if not (a.vars() & formula.quantified_set()))
    counts = []
    order_names = []
    verdict = "qf"
    try:
        for comp in comps:
            if decomposition is not None:
                ntd = nicify(restrict_td(decomposition, comp.vertices))
            else:
                ntd = nicify(heuristic_td(comp, td_strategy))
            sub_atoms = [a for a in formula.atoms if a.vars() & comp.vertices]
            sub = QuantFormula(sorted(comp.vertices), sub_atoms)
            part = fme_dp(sub, ntd, cap=cap)
            order_names.extend(v.name for v in order_from_td(ntd, graph=comp).vars)
            counts.append(0 if part.false else len(part))
            result = result.union(part)
            if result.false:
                verdict = "false"
                break
    except CapExceeded:
        verdict = "cap_exceeded"
        result = None
    elapsed = (time.perf_counter() - start) * 1000.0
    final = None if result is None else (0 if result.false else len(result))
    rec = StatsRecord(instance, "fme", "td", order_names, counts,
                      max(counts, default=0), final, elapsed, verdict,
                      extra={"engine": "dp"})
    return result, rec


def run_projection_strategy(formula: QuantFormula, strategy: str, *,
                            instance="<memory>", seed: int = 0,
                            td_strategy: str = "min_fill", decomposition=None,
                            include_free: bool = False):
    """Project the quantified block (optionally the free tail too)."""
    orders = resolve_orders(formula, strategy, seed=seed, td_strategy=td_strategy,
                            decomposition=decomposition)
    best = None
    for o in orders:
        start = time.perf_counter()
        full = list(o.vars) + (list(formula.free) if include_free else [])
        seq = projection_sequence(PolySet.from_formula(formula), full)
        elapsed = (time.perf_counter() - start) * 1000.0
        counts = [len(s) for s in seq[1:]]
        degs = [combined_degree(s) if len(s) else 0 for s in seq]
        rec = StatsRecord(instance, "cad", strategy, [v.name for v in full],
                          counts, max([len(s) for s in seq]),
                          counts[-1] if counts else len(seq[0]),
                          elapsed, "projected", max_combined_degree=max(degs))
        if best is None or rec.final_count < best[1].final_count:
            best = (seq, rec)
    return best


def eliminate_formula(formula: QuantFormula, strategy: str = "td", **kw):
    """Dispatch on the formula's mode; returns (result, StatsRecord)."""
    if formula.linear:
        return run_fme_strategy(formula, strategy, **kw)
    kw.pop("cap", None)
    kw.pop("raw", None)
    kw.pop("engine", None)
    seq, rec = run_projection_strategy(formula, strategy, **kw)
    return seq[-1], rec
