import math

import numpy as np
import pytest

from xorsmp.bits import BitVector, complement, sample_pair_with_distance
from xorsmp.coins import CoinSource, c_of_k
from xorsmp.predicate import (
    Predicate,
    compute_profile,
    eq_predicate,
    family,
    ham_predicate,
    oracle,
    parity_predicate,
)
from xorsmp.protocol import (
    ALICE,
    BOB,
    BRANCH_HIGH,
    BRANCH_LOW,
    BRANCH_PARITY,
    PkInstance,
    Transcript,
    TranscriptEntry,
    bundles_from_transcript,
    format_transcript,
    p_party_messages,
    p_referee,
    p_shared,
    p_total_cost,
    p_transcript_entries,
    parse_transcript,
    pk_party_cost,
    pk_party_messages,
    pk_referee,
    pk_shared,
    pk_special_case_k0,
    run_protocol,
    transcript_cost,
)

ROOT = CoinSource.from_seed(0xACE)


def all_pairs(n):
    for xv in range(1 << n):
        for yv in range(1 << n):
            yield BitVector(n, xv), BitVector(n, yv)


def test_pk_epsilon_budget_identity():
    # per-instance budget makes the union bound land exactly on 1/10
    for k in (1, 2, 4, 7, 8, 16, 32, 64):
        inst = PkInstance.build(k, parity_predicate(64))
        assert inst.c == c_of_k(k)
        total = k * max(1.0, math.log2(inst.c)) * inst.epsilon
        assert abs(total - 0.1) < 1e-12


def test_pk_degenerate_k1():
    inst = PkInstance.build(1, eq_predicate(8))
    assert inst.c == 1
    sh = pk_shared(inst, 8, "syndrome", ROOT.derive("k1"))
    assert len(sh.stacks) == 2  # thresholds 0 and 1
    assert sh.partition.block_of.tolist() == [0] * 8


def test_pk_message_count_and_symmetry():
    n, k = 64, 4
    inst = PkInstance.build(k, ham_predicate(n, 3))
    sh = pk_shared(inst, n, "syndrome", ROOT.derive("cnt"))
    x, y = sample_pair_with_distance(n, 3, ROOT.derive("cnt/in"))
    ma, mb = pk_party_messages(sh, x), pk_party_messages(sh, y)
    assert len(ma.per_threshold) == inst.c + 1
    for j in range(inst.c + 1):
        for i in range(k):
            pa = ma.per_threshold[j].block_payload(i)
            pb = mb.per_threshold[j].block_payload(i)
            assert pa.size == pb.size  # identical layout on both sides
    # one entry per (block, threshold) pair per party
    entries_per_party = inst.k * (inst.c + 1)
    assert sum(1 for _ in range(entries_per_party)) == entries_per_party


def test_pk_equal_inputs_yield_d0():
    for spec in ("eq", "parity", "ham:3"):
        pred = family(spec, 32)
        inst = PkInstance.build(4, pred)
        sh = pk_shared(inst, 32, "syndrome", ROOT.derive(f"d0/{spec}"))
        x, _ = sample_pair_with_distance(32, 0, ROOT.derive(f"d0in/{spec}"))
        res = pk_referee(sh, pk_party_messages(sh, x), pk_party_messages(sh, x))
        assert res.output == pred(0)
        assert res.sum_h == 0


def test_pk_raw_is_exact_within_cap():
    # raw verdicts are exact, and k <= 8 keeps every block under the cap
    n, k = 10, 5
    pred = parity_predicate(n)
    inst = PkInstance.build(k, pred)
    for w in range(k + 1):
        for i in range(30):
            coins = ROOT.derive(f"rawpk/{w}/{i}")
            x, y = sample_pair_with_distance(n, w, coins.derive("in"))
            sh = pk_shared(inst, n, "raw", coins)
            res = pk_referee(sh, pk_party_messages(sh, x), pk_party_messages(sh, y))
            assert res.sum_h == w
            assert res.output == pred(w)


def test_pk_referee_is_lazy():
    n, k = 128, 8
    inst = PkInstance.build(k, parity_predicate(n))
    coins = ROOT.derive("lazy")
    x, y = sample_pair_with_distance(n, 5, coins.derive("in"))
    sh = pk_shared(inst, n, "syndrome", coins)
    res = pk_referee(sh, pk_party_messages(sh, x), pk_party_messages(sh, y))
    assert res.verdicts_evaluated <= k * math.ceil(math.log2(inst.c + 1))


def test_pk_special_case_k0():
    assert pk_special_case_k0(eq_predicate(8)) == 1
    assert pk_special_case_k0(ham_predicate(8, 2)) == 1
    assert pk_special_case_k0(Predicate([1 if k == 8 else 0 for k in range(9)])) == 0


def test_parity_predicate_degenerate_bundle():
    # r0 = r1 = 0: the bundle is two equality fingerprints plus the parity bit
    n = 64
    pred = parity_predicate(n)
    prof = compute_profile(pred)
    sh = p_shared(pred, prof, "syndrome", ROOT.derive("deg"))
    assert sh.pk_main is None and sh.pk_tilde is None
    x, _ = sample_pair_with_distance(n, 7, ROOT.derive("degin"))
    bundle = p_party_messages(sh, x, ALICE)
    f = math.ceil(math.log2(10)) + 4
    assert bundle.hd0_msg.bit_length == f
    assert bundle.hd1_msg.bit_length == f
    assert bundle.cost_bits == 2 * f + 1
    assert p_total_cost(prof, n, "syndrome") == 2 * (2 * f + 1)


def test_alice_bundle_independent_of_bob():
    # non-adaptivity: Alice's payloads depend on (x, coins) only
    n = 32
    pred = eq_predicate(n)
    prof = compute_profile(pred)
    coins = ROOT.derive("nonadapt")
    sh = p_shared(pred, prof, "syndrome", coins)
    x = BitVector.random(n, coins.derive("x"))
    b1 = p_party_messages(sh, x, ALICE)
    b2 = p_party_messages(sh, x, ALICE)
    e1 = p_transcript_entries(sh, b1, p_party_messages(sh, BitVector.zeros(n), BOB))
    e2 = p_transcript_entries(sh, b2, p_party_messages(sh, complement(BitVector.zeros(n)), BOB))
    alice1 = [e for e in e1 if e.party == ALICE]
    alice2 = [e for e in e2 if e.party == ALICE]
    assert len(alice1) == len(alice2)
    for a, b in zip(alice1, alice2):
        assert a.label == b.label
        assert (a.payload == b.payload).all()


def test_cost_decomposition():
    # total = 2 * (promise runs + threshold checks + parity bit), and the
    # arithmetic model matches the bits actually laid out
    n = 128
    for spec, strategy in (("ham:5", "syndrome"), ("eq", "bucket"), ("random:10", "raw")):
        pred = family(spec, n, ROOT.derive("fam/" + spec))
        prof = compute_profile(pred)
        coins = ROOT.derive(f"cost/{spec}/{strategy}")
        x, y = sample_pair_with_distance(n, 9, coins.derive("in"))
        out = run_protocol(pred, prof, x, y, strategy, coins)
        assert out.cost_bits == p_total_cost(prof, n, strategy)
        entries = p_transcript_entries(out.shared, out.bundle_a, out.bundle_b)
        t = Transcript(header={}, entries=entries)
        assert transcript_cost(t) == out.cost_bits
        if prof.r0 >= 1:
            sub = pk_party_cost(PkInstance.build(prof.r0, pred), n, strategy)
            assert out.cost_bits >= 2 * sub  # superset of the promise run


def test_transcript_cost_basics():
    assert transcript_cost(Transcript(header={})) == 0
    two_bits = Transcript(
        header={},
        entries=[
            TranscriptEntry(ALICE, "p/parity", np.array([1], dtype=np.uint8)),
            TranscriptEntry(BOB, "p/parity", np.array([0], dtype=np.uint8)),
        ],
    )
    assert transcript_cost(two_bits) == 2


def test_parity_predicate_exhaustive_exact_with_raw():
    # every pair at n = 4: the parity answer is exact once no verdict errs,
    # and raw verdicts never err
    n = 4
    pred = parity_predicate(n)
    prof = compute_profile(pred)
    for x, y in all_pairs(n):
        coins = ROOT.derive(f"pex/{x.value}/{y.value}")
        out = run_protocol(pred, prof, x, y, "raw", coins)
        assert out.output == oracle(pred, x, y)


def test_referee_branch_selection_raw():
    n = 16
    pred = ham_predicate(n, 2)  # r0 = 3, r1 = 0
    prof = compute_profile(pred)
    assert (prof.r0, prof.r1) == (3, 0)
    for w, branch in ((0, BRANCH_LOW), (3, BRANCH_LOW), (8, BRANCH_PARITY),
                      (16, BRANCH_HIGH)):
        coins = ROOT.derive(f"br/{w}")
        x, y = sample_pair_with_distance(n, w, coins.derive("in"))
        out = run_protocol(pred, prof, x, y, "raw", coins)
        assert out.branch == branch, (w, out.branch)
        assert out.output == oracle(pred, x, y)


def test_high_branch_uses_reflected_predicate():
    # weight >= n - r1 answers through the reflected predicate on the
    # complemented pair; with raw verdicts this is exact
    n = 12
    pred = Predicate([1 if k >= n - 2 else k % 2 for k in range(n + 1)])
    prof = compute_profile(pred)
    assert prof.r1 >= 1
    for w in range(n - prof.r1, n + 1):
        for i in range(10):
            coins = ROOT.derive(f"hi/{w}/{i}")
            x, y = sample_pair_with_distance(n, w, coins.derive("in"))
            out = run_protocol(pred, prof, x, y, "raw", coins)
            assert out.branch == BRANCH_HIGH
            assert out.output == oracle(pred, x, y)


def test_middle_branch_exact_when_taken():
    # whenever the parity branch answers, it answers exactly
    n = 64
    pred = family("random:6", n, ROOT.derive("mid/fam"))
    prof = compute_profile(pred)
    hit = 0
    for i in range(300):
        w = prof.r0 + 1 + (i % (n - prof.r1 - prof.r0 - 1))
        coins = ROOT.derive(f"mid/{i}")
        x, y = sample_pair_with_distance(n, w, coins.derive("in"))
        out = run_protocol(pred, prof, x, y, "syndrome", coins)
        if out.branch == BRANCH_PARITY:
            hit += 1
            assert out.output == oracle(pred, x, y)
    assert hit >= 290  # the guard thresholds fire only with tiny probability


def test_undefined_parity_sentinel_outputs_zero():
    # middle range {2} has no odd distances: t_odd is undefined and the
    # parity branch must fall back to 0
    pred = Predicate([0, 1, 0, 0, 1])
    prof = compute_profile(pred)
    assert prof.t_odd is None
    sh = p_shared(pred, prof, "syndrome", ROOT.derive("sent"))
    x, y = sample_pair_with_distance(4, 3, ROOT.derive("sentin"))
    ba = p_party_messages(sh, x, ALICE)
    bb = p_party_messages(sh, y, BOB)
    res = p_referee(sh, ba, bb)
    if res.branch == BRANCH_PARITY:  # reached unless a guard misfires
        assert res.output == 0


def test_determinism_bit_identical_transcripts():
    n = 64
    pred = family("ham:4", n)
    prof = compute_profile(pred)
    texts = []
    for _ in range(2):
        coins = CoinSource.from_seed(321).derive("trial/9")
        x, y = sample_pair_with_distance(n, 5, coins.derive("input"))
        out = run_protocol(pred, prof, x, y, "syndrome", coins)
        entries = p_transcript_entries(out.shared, out.bundle_a, out.bundle_b)
        texts.append(
            format_transcript(Transcript(header={"seed": "321"}, entries=entries))
        )
    assert texts[0] == texts[1]


def test_transcript_roundtrip_replays_referee():
    n = 48
    pred = family("ham:3", n)
    prof = compute_profile(pred)
    for w in (0, 2, 10, 44, 48):
        coins = CoinSource.from_seed(777).derive(f"trial/{w}")
        x, y = sample_pair_with_distance(n, w, coins.derive("input"))
        out = run_protocol(pred, prof, x, y, "syndrome", coins)
        t = Transcript(
            header={"w": str(w)},
            entries=p_transcript_entries(out.shared, out.bundle_a, out.bundle_b),
        )
        parsed = parse_transcript(format_transcript(t))
        assert parsed.header == t.header
        ba, bb = bundles_from_transcript(out.shared, parsed)
        res = p_referee(out.shared, ba, bb)
        assert res.output == out.output
        assert res.branch == out.branch


def test_transcript_labels_follow_grammar():
    n = 32
    pred = family("ham:2", n)
    prof = compute_profile(pred)
    coins = ROOT.derive("labels")
    x, y = sample_pair_with_distance(n, 2, coins.derive("in"))
    out = run_protocol(pred, prof, x, y, "syndrome", coins)
    entries = p_transcript_entries(out.shared, out.bundle_a, out.bundle_b)
    labels = {e.label for e in entries}
    k, c = prof.r0, c_of_k(prof.r0)
    assert "p/hd0" in labels and "p/hd1" in labels and "p/parity" in labels
    for i in range(k):
        for j in range(c + 1):
            assert f"p/pk/main/block/{i}/hd/{j}" in labels
    per_party = 3 + k * (c + 1)  # hd0, hd1, parity, and the block grid
    assert len(entries) == 2 * per_party


def test_referee_rejects_same_party_bundles():
    n = 16
    pred = eq_predicate(n)
    prof = compute_profile(pred)
    sh = p_shared(pred, prof, "syndrome", ROOT.derive("same"))
    x, y = sample_pair_with_distance(n, 1, ROOT.derive("samein"))
    ba = p_party_messages(sh, x, ALICE)
    with pytest.raises(ValueError):
        p_referee(sh, ba, p_party_messages(sh, y, ALICE))
