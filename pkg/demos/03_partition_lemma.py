"""Random partitions spread the differing positions thinly.

Scatter k ones over k blocks uniformly: the chance that any block collects
c = ceil(4 log2(k) / log2 log2(k)) or more of them is tiny, and bounded by
(e/c)^c * k.  This is what lets the promise protocol cap its per-block
distance search at c.
"""

from xorsmp.coins import c_of_k
from xorsmp.harness import lemma_partition_experiment

print(f"{'k':>4} {'c':>3} {'empirical':>10} {'bound':>10}   10^4 partitions each")
for k in (16, 32, 64, 128, 256):
    res = lemma_partition_experiment(k, 10_000, seed=42)
    print(f"{k:>4} {res.c:>3} {res.empirical:>10.2e} {res.bound:>10.2e}")

print("\nper-block cap c(k) for small k (clamped to k below 4):")
print("  " + ", ".join(f"c({k})={c_of_k(k)}" for k in (1, 2, 3, 4, 8, 16, 64, 256, 1024)))
