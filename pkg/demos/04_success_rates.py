"""Success rates against the brute-force oracle, stratified by distance.

The interesting distances are the boundaries where the referee hands off
between its three branches: the low tail (promise protocol on (x, y)),
the high tail (promise protocol on the complemented pair), and the middle,
where two parity bits answer exactly.
"""

from xorsmp.harness import TrialConfig, run_trials

for spec in ("eq", "ham:5", "random:8"):
    cfg = TrialConfig(
        n=256,
        predicate_spec=spec,
        weights="auto",
        trials=500,
        seed=11,
        strategy="syndrome",
    )
    cells, _ = run_trials(cfg)
    print(f"\npredicate {spec} (n=256, 500 trials/cell, syndrome strategy)")
    print(f"  {'|x^y|':>6} {'rate':>7} {'low':>5} {'high':>5} {'parity':>7}  cost")
    for cell in cells:
        print(
            f"  {cell.weight:>6} {cell.rate:>7.3f}"
            f" {cell.branch_counts.get('low', 0):>5}"
            f" {cell.branch_counts.get('high', 0):>5}"
            f" {cell.branch_counts.get('parity', 0):>7}"
            f"  {cell.cost_bits}"
        )
