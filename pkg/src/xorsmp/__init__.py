"""Public-coin SMP protocols for symmetric XOR functions f(x,y) = D(|x XOR y|).

A library plus CLI simulator: bit vectors, predicate profiles, shared
randomness, distance-threshold sketches, the partition-based promise
protocol and the full three-branch protocol, with bit-exact transcript
cost accounting and a Monte Carlo harness.
"""

from .bits import (
    BitVector,
    complement,
    hamming_distance,
    parity,
    sample_pair_with_distance,
)
from .coins import CoinSource, Partition, c_of_k, sample_partition
from .gf2 import BchCode, bch_code, gf2_decode
from .hamming import (
    HDMessage,
    HDParams,
    HDShared,
    HDVerdict,
    exact_block_distance,
    find_threshold,
    hd_decide,
    hd_encode,
    hd_shared,
)
from .predicate import (
    Predicate,
    Profile,
    compute_profile,
    family,
    oracle,
    tilde,
    violations,
)
from .protocol import (
    PkInstance,
    pk_party_messages,
    pk_referee,
    pk_shared,
    pk_special_case_k0,
    p_party_messages,
    p_referee,
    p_shared,
    p_total_cost,
    run_protocol,
    transcript_cost,
)

__version__ = "0.1.0"

__all__ = [
    "BitVector",
    "hamming_distance",
    "parity",
    "complement",
    "sample_pair_with_distance",
    "CoinSource",
    "Partition",
    "sample_partition",
    "c_of_k",
    "BchCode",
    "bch_code",
    "gf2_decode",
    "HDParams",
    "HDShared",
    "HDMessage",
    "HDVerdict",
    "hd_shared",
    "hd_encode",
    "hd_decide",
    "find_threshold",
    "exact_block_distance",
    "Predicate",
    "Profile",
    "violations",
    "compute_profile",
    "tilde",
    "oracle",
    "family",
    "PkInstance",
    "pk_shared",
    "pk_party_messages",
    "pk_referee",
    "pk_special_case_k0",
    "p_shared",
    "p_party_messages",
    "p_referee",
    "p_total_cost",
    "run_protocol",
    "transcript_cost",
    "__version__",
]
