"""Monte Carlo experiment runner: success-rate estimation against the
brute-force oracle, the partition lemma check, sketch error measurement,
and cost sweeps.

Every trial draws its coins from a child stream derived from (seed, trial
index) alone, so results are reproducible byte for byte and independent of
execution order.  All empirical gates in the test suite compare against
binomial three-standard-error margins, which turns the probabilistic
claims into deterministic checks with a controlled flake rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bits import BitVector, sample_pair_with_distance
from .coins import CoinSource, c_of_k
from .predicate import (
    Predicate,
    Profile,
    compute_profile,
    family,
    oracle,
    parse_predicate,
)
from .protocol import (
    Transcript,
    TrialOutcome,
    bundles_from_transcript,
    format_transcript,
    p_referee,
    p_shared,
    p_transcript_entries,
    parse_transcript,
    run_protocol,
)


def resolve_predicate(spec: str, n: int, coins: CoinSource) -> Tuple[Predicate, str]:
    """Turn a CLI predicate spec into a predicate plus a replayable name.

    File-backed predicates are inlined as ``values:<bits>`` so that dumps
    remain replayable without the original file.
    """
    spec = spec.strip()
    if spec.startswith("file:"):
        path = Path(spec[5:])
        try:
            pred = parse_predicate(path.read_text())
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
        return pred, "values:" + "".join(str(v) for v in pred.values)
    if spec.startswith("values:"):
        row = spec[7:]
        if not row or row.strip("01"):
            raise ValueError(f"bad inline predicate {spec!r}")
        return Predicate([int(ch) for ch in row]), spec
    return family(spec, n, coins), spec.lower()


def auto_weights(profile: Profile, n: int) -> List[int]:
    """The boundary distances where the referee branches hand off."""
    cand = {
        0,
        profile.r0,
        profile.r0 + 1,
        n // 2,
        n - profile.r1 - 1,
        n - profile.r1,
        n,
    }
    return sorted(w for w in cand if 0 <= w <= n)


@dataclass(frozen=True)
class TrialConfig:
    n: int
    predicate_spec: str
    weights: Union[str, Sequence[int]]  # "auto" or explicit list
    trials: int
    seed: int
    strategy: str
    dump_dir: Optional[Path] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial per cell")


@dataclass
class CellStats:
    predicate: str
    weight: int
    trials: int = 0
    successes: int = 0
    branch_counts: Dict[str, int] = field(default_factory=dict)
    parity_branch_successes: int = 0
    cost_bits: int = 0

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.rate
        return math.sqrt(p * (1.0 - p) / self.trials)

    def branch_rate(self, branch: str) -> float:
        return self.branch_counts.get(branch, 0) / self.trials


RUN_CSV_HEADER = "trial,n,predicate,r0,r1,weight,output,truth,correct,cost_bits,seed"


def run_trials(cfg: TrialConfig) -> Tuple[List[CellStats], List[str]]:
    """Stratified success-probability estimation for one predicate.

    Returns per-cell statistics plus the per-trial CSV rows (strings,
    already in deterministic order).  When ``dump_dir`` is set, every trial
    also writes a replayable transcript dump.
    """
    root = CoinSource.from_seed(cfg.seed)
    pred, pred_name = resolve_predicate(
        cfg.predicate_spec, cfg.n, root.derive("predicate")
    )
    n = pred.n
    profile = compute_profile(pred)
    if cfg.weights == "auto":
        weights = auto_weights(profile, n)
    else:
        weights = list(cfg.weights)
        bad = [w for w in weights if not 0 <= w <= n]
        if bad:
            raise ValueError(f"weights {bad} outside [0, {n}]")
    if cfg.dump_dir is not None:
        cfg.dump_dir.mkdir(parents=True, exist_ok=True)
    cells: List[CellStats] = []
    rows: List[str] = []
    t = 0
    for w in weights:
        cell = CellStats(predicate=pred_name, weight=w)
        for _ in range(cfg.trials):
            trial_coins = root.derive(f"trial/{t}")
            x, y = sample_pair_with_distance(n, w, trial_coins.derive("input"))
            outcome = run_protocol(pred, profile, x, y, cfg.strategy, trial_coins)
            truth = oracle(pred, x, y)
            correct = int(outcome.output == truth)
            cell.trials += 1
            cell.successes += correct
            cell.branch_counts[outcome.branch] = (
                cell.branch_counts.get(outcome.branch, 0) + 1
            )
            if outcome.branch == "parity":
                cell.parity_branch_successes += correct
            cell.cost_bits = outcome.cost_bits
            rows.append(
                f"{t},{n},{pred_name},{profile.r0},{profile.r1},{w},"
                f"{outcome.output},{truth},{correct},{outcome.cost_bits},{cfg.seed}"
            )
            if cfg.dump_dir is not None:
                _dump_trial(cfg, pred_name, t, w, x, y, outcome)
            t += 1
        cells.append(cell)
    return cells, rows


def _dump_trial(
    cfg: TrialConfig,
    pred_name: str,
    t: int,
    w: int,
    x: BitVector,
    y: BitVector,
    outcome: TrialOutcome,
) -> None:
    nbytes = (x.length + 7) // 8
    transcript = Transcript(
        header={
            "seed": str(cfg.seed),
            "n": str(x.length),
            "predicate": pred_name,
            "strategy": cfg.strategy,
            "trial": str(t),
            "weight": str(w),
            "x": x.value.to_bytes(nbytes, "little").hex(),
            "y": y.value.to_bytes(nbytes, "little").hex(),
            "output": str(outcome.output),
            "branch": outcome.branch,
            "cost_bits": str(outcome.cost_bits),
        },
        entries=p_transcript_entries(outcome.shared, outcome.bundle_a, outcome.bundle_b),
    )
    path = cfg.dump_dir / f"trial-{t:06d}.txt"
    path.write_text(format_transcript(transcript))


@dataclass(frozen=True)
class ReplayResult:
    trial: int
    output: int
    recorded_output: int
    truth: int
    correct: int
    cost_bits: int
    consistent: bool


def replay_transcript_text(text: str) -> ReplayResult:
    """Re-run the referee on a dumped transcript and cross-check it."""
    t = parse_transcript(text)
    h = t.header
    seed, trial = int(h["seed"]), int(h["trial"])
    n = int(h["n"])
    root = CoinSource.from_seed(seed)
    pred, _ = resolve_predicate(h["predicate"], n, root.derive("predicate"))
    profile = compute_profile(pred)
    shared = p_shared(pred, profile, h["strategy"], root.derive(f"trial/{trial}"))
    bundle_a, bundle_b = bundles_from_transcript(shared, t)
    res = p_referee(shared, bundle_a, bundle_b)
    x = BitVector(n, int.from_bytes(bytes.fromhex(h["x"]), "little"))
    y = BitVector(n, int.from_bytes(bytes.fromhex(h["y"]), "little"))
    truth = oracle(pred, x, y)
    cost = transcript_total(t)
    consistent = (
        res.output == int(h["output"])
        and cost == int(h["cost_bits"])
        and res.branch == h["branch"]
    )
    return ReplayResult(
        trial=trial,
        output=res.output,
        recorded_output=int(h["output"]),
        truth=truth,
        correct=int(res.output == truth),
        cost_bits=cost,
        consistent=consistent,
    )


def transcript_total(t: Transcript) -> int:
    return sum(e.bit_length for e in t.entries)


@dataclass(frozen=True)
class LemmaResult:
    k: int
    c: int
    samples: int
    failures: int
    empirical: float
    bound: float
    stderr: float


def lemma_partition_experiment(k: int, samples: int, seed: int) -> LemmaResult:
    """Fraction of random k-partitions giving some block at least c of the
    k differing positions, against the union bound (e/c)^c * k.

    Only the k ones of the difference vector matter, so the experiment
    draws their block labels directly.
    """
    if k < 4:
        raise ValueError("the clamped regime k < 4 is excluded")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    c = c_of_k(k)
    gen = CoinSource.from_seed(seed).derive(f"lemma/{k}").generator()
    blocks = gen.integers(0, k, size=(samples, k), dtype=np.int64)
    flat = blocks + np.arange(samples, dtype=np.int64)[:, None] * k
    counts = np.bincount(flat.ravel(), minlength=samples * k).reshape(samples, k)
    failures = int((counts.max(axis=1) >= c).sum())
    empirical = failures / samples
    bound = (math.e / c) ** c * k
    stderr = math.sqrt(empirical * (1.0 - empirical) / samples)
    return LemmaResult(k, c, samples, failures, empirical, bound, stderr)


@dataclass(frozen=True)
class HdErrorResult:
    d: int
    epsilon: float
    strategy: str
    weight: int
    samples: int
    errors: int
    rate: float
    stderr: float


def hd_error_experiment(
    d: int,
    epsilon: float,
    strategy: str,
    samples: int,
    seed: int,
    n: Optional[int] = None,
) -> List[HdErrorResult]:
    """Verdict error rates at the hardest weights d and d + 1, scored
    against the exact comparison the raw strategy would make."""
    from .hamming import HDParams, hd_decide, hd_encode_shared, hd_shared

    if strategy not in ("bucket", "syndrome"):
        raise ValueError("measure bucket or syndrome against the raw oracle")
    if n is None:
        n = max(32, 8 * max(d, 1))
    root = CoinSource.from_seed(seed)
    params = HDParams(d=d, epsilon=epsilon, strategy=strategy, length=n)
    results = []
    for w in (d, d + 1):
        errors = 0
        for s in range(samples):
            coins = root.derive(f"hd/{w}/trial/{s}")
            x, y = sample_pair_with_distance(n, w, coins.derive("input"))
            shared = hd_shared(params, coins.derive("coins"))
            verdict = hd_decide(
                params, hd_encode_shared(shared, x), hd_encode_shared(shared, y)
            )
            errors += int(verdict.le != (w <= d))
        rate = errors / samples
        results.append(
            HdErrorResult(
                d=d,
                epsilon=epsilon,
                strategy=strategy,
                weight=w,
                samples=samples,
                errors=errors,
                rate=rate,
                stderr=math.sqrt(rate * (1.0 - rate) / samples),
            )
        )
    return results


SWEEP_CSV_HEADER = "r,n,strategy,trials,mean_cost_bits,normalizer,ratio"


@dataclass(frozen=True)
class SweepRow:
    r: int
    n: int
    strategy: str
    trials: int
    mean_cost_bits: float
    normalizer: float
    ratio: float

    def csv(self) -> str:
        return (
            f"{self.r},{self.n},{self.strategy},{self.trials},"
            f"{self.mean_cost_bits:.6g},{self.normalizer:.6g},{self.ratio:.6g}"
        )


def cost_normalizer(r: int) -> float:
    """The shape target r * log2(r)^3 / log2(log2(r))."""
    if r < 3:
        return float("nan")
    return r * math.log2(r) ** 3 / math.log2(math.log2(r))


def sweep_r(
    r_values: Sequence[int], n: int, strategy: str, trials: int, seed: int
) -> List[SweepRow]:
    """Mean transcript cost per tail length r, over random predicates with
    profile (r, 0), plus the cost/normalizer ratio."""
    root = CoinSource.from_seed(seed)
    rows = []
    for r in r_values:
        if r > n / 2:
            raise ValueError(f"r={r} exceeds n/2 for n={n}")
        total = 0
        for t in range(trials):
            coins = root.derive(f"sweep/{r}/trial/{t}")
            pred, _ = resolve_predicate(f"random:{r}", n, coins.derive("predicate"))
            profile = compute_profile(pred)
            w = int(coins.derive("weight").generator().integers(0, n + 1))
            x, y = sample_pair_with_distance(n, w, coins.derive("input"))
            outcome = run_protocol(pred, profile, x, y, strategy, coins)
            total += outcome.cost_bits
        mean_cost = total / trials
        norm = cost_normalizer(r)
        rows.append(
            SweepRow(
                r=r,
                n=n,
                strategy=strategy,
                trials=trials,
                mean_cost_bits=mean_cost,
                normalizer=norm,
                ratio=mean_cost / norm,
            )
        )
    return rows


__all__ = [
    "TrialConfig",
    "CellStats",
    "RUN_CSV_HEADER",
    "SWEEP_CSV_HEADER",
    "resolve_predicate",
    "auto_weights",
    "run_trials",
    "ReplayResult",
    "replay_transcript_text",
    "LemmaResult",
    "lemma_partition_experiment",
    "HdErrorResult",
    "hd_error_experiment",
    "SweepRow",
    "cost_normalizer",
    "sweep_r",
]
