"""GF(2^m) arithmetic and binary BCH syndrome decoding.

The syndrome sketch strategy compresses a length-B parity vector p to
H @ p over GF(2), where H stacks the bit rows of the field elements
alpha^(1j), alpha^(3j), ..., alpha^((2d-1)j): the parity-check matrix of a
narrow-sense BCH code of designed distance 2d + 1.  Decoding recovers the
up-to-d odd buckets from the d transmitted syndrome elements (the even
ones follow by squaring).  Weight 0, 1 and 2 patterns, which dominate the
protocol workload, are decoded in O(1) from the tables below;
Berlekamp-Massey plus a vectorized root search handles the rest.

Every successful decode is verified against the full transmitted syndrome
before being returned, so a returned vector always reproduces the input
syndrome; ambiguity beyond the code's packing radius is the caller's
fingerprint check to screen.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np

# Primitive polynomials over GF(2), one per extension degree (low-bit = x^0).
_PRIMITIVE_POLY = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


class Field:
    """GF(2^m) with exp/log tables; alpha is the root of the primitive poly."""

    def __init__(self, m: int):
        if m not in _PRIMITIVE_POLY:
            raise ValueError(f"no primitive polynomial configured for m={m}")
        self.m = m
        self.order = (1 << m) - 1
        self.poly = _PRIMITIVE_POLY[m]
        exp = [0] * (2 * self.order)
        log = [0] * (1 << m)
        x = 1
        for i in range(self.order):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= self.poly
        if x != 1:
            raise ValueError(f"polynomial {self.poly:#x} is not primitive for m={m}")
        for i in range(self.order, 2 * self.order):
            exp[i] = exp[i - self.order]
        self.exp = exp
        self.log = log
        self.exp_np = np.array(exp[: self.order], dtype=np.int64)
        self.exp_np2 = np.array(exp, dtype=np.int64)  # doubled: skip mod on gathers
        self._qsolve: Optional[Dict[int, int]] = None
        self._chien: Dict[int, np.ndarray] = {}

    def chien_exponents(self, j: int) -> np.ndarray:
        """(j * e) mod order for all e, cached per power of the locator."""
        tbl = self._chien.get(j)
        if tbl is None:
            tbl = (j * np.arange(self.order, dtype=np.int64)) % self.order
            self._chien[j] = tbl
        return tbl

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^m)")
        return self.exp[self.order - self.log[a]]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0
        return self.exp[(self.log[a] * e) % self.order]

    def qsolve(self, u: int) -> Optional[int]:
        """Some w with w^2 + w = u, or None when u is outside the image."""
        if self._qsolve is None:
            table: Dict[int, int] = {}
            for w in range(1 << self.m):
                table.setdefault(self.mul(w, w) ^ w, w)
            self._qsolve = table
        return self._qsolve.get(u)


_FIELDS: Dict[int, Field] = {}


def field(m: int) -> Field:
    if m not in _FIELDS:
        _FIELDS[m] = Field(m)
    return _FIELDS[m]


class BchCode:
    """Narrow-sense binary BCH code over positions [0, n_buckets).

    d is the correction capacity (designed distance 2d + 1); the code
    length is 2^m - 1 for the smallest m that fits n_buckets, with unused
    positions simply never occurring in error vectors.
    """

    def __init__(self, n_buckets: int, d: int):
        if d < 1:
            raise ValueError("correction capacity must be at least 1")
        if n_buckets < 1:
            raise ValueError("need at least one position")
        m = 2
        while (1 << m) - 1 < n_buckets:
            m += 1
        self.field = field(m)
        self.m = m
        self.d = d
        self.n_buckets = n_buckets
        if 2 * d >= (1 << m):
            raise ValueError(f"capacity {d} too large for code length {(1 << m) - 1}")
        self.redundancy = d * m
        fld = self.field
        # H[(i-1)*m + t, j] = bit t of alpha^((2i-1) * j), i = 1..d
        cols = np.arange(n_buckets, dtype=np.int64)
        odd = np.arange(1, 2 * d, 2, dtype=np.int64)
        elems = fld.exp_np[(odd[:, None] * cols[None, :]) % fld.order]
        elems[:, 0] = 1  # alpha^0 column: exponent 0 for every row
        bits = (elems[:, None, :] >> np.arange(m)[None, :, None]) & 1
        self.H = bits.reshape(d * m, n_buckets).astype(np.uint8)
        self.H_f32 = self.H.astype(np.float32)
        self._elem_mask = (1 << m) - 1

    def elements_from_packed(self, packed: int) -> List[int]:
        """Split a little-endian packed syndrome row into its d field elements."""
        return [
            (packed >> (i * self.m)) & self._elem_mask for i in range(self.d)
        ]

    def syndrome_elements(self, syndrome_bits: np.ndarray) -> List[int]:
        """Unpack d field elements S_1, S_3, ..., S_(2d-1) from the bit row."""
        bits = np.asarray(syndrome_bits, dtype=np.uint8).ravel()
        if bits.size != self.redundancy:
            raise ValueError(
                f"syndrome has {bits.size} bits, expected {self.redundancy}"
            )
        packed = int.from_bytes(
            np.packbits(bits, bitorder="little").tobytes(), "little"
        )
        return self.elements_from_packed(packed)

    def syndrome_of(self, positions) -> List[int]:
        """Transmitted syndrome elements of the error with ones at positions."""
        fld = self.field
        out = []
        for i in range(self.d):
            e = 2 * i + 1
            acc = 0
            for p in positions:
                acc ^= fld.exp[(e * p) % fld.order]
            out.append(acc)
        return out

    def _verify(self, positions: Tuple[int, ...], selems: List[int]) -> bool:
        return self.syndrome_of(positions) == selems

    def decode_elements(self, selems: List[int]) -> Optional[Tuple[int, ...]]:
        """Positions of a weight <= d error matching the syndrome, or None."""
        fld = self.field
        if not any(selems):
            return ()
        s1 = selems[0]
        if s1:
            # weight-1: column j has S_(2i-1) = alpha^((2i-1) j)
            pos = fld.log[s1]
            if pos < self.n_buckets and all(
                selems[i] == fld.exp[((2 * i + 1) * pos) % fld.order]
                for i in range(1, self.d)
            ):
                return (pos,)
        if self.d >= 2 and s1:
            hit = self._decode_pair(selems)
            if hit is not None:
                return hit
        if self.d < 3:
            return None
        return self._decode_general(selems)

    def decode(self, syndrome_bits: np.ndarray) -> Optional[Tuple[int, ...]]:
        return self.decode_elements(self.syndrome_elements(syndrome_bits))

    def _decode_pair(self, selems: List[int]) -> Optional[Tuple[int, ...]]:
        # X1 + X2 = S1, X1.X2 = (S3 + S1^3)/S1; roots of z^2 + S1 z + P.
        fld = self.field
        s1, s3 = selems[0], selems[1]
        inv_s1 = fld.inv(s1)
        prod = fld.mul(s3 ^ fld.pow(s1, 3), inv_s1)
        if prod == 0:
            return None
        u = fld.mul(fld.mul(prod, inv_s1), inv_s1)
        w = fld.qsolve(u)
        if w is None:
            return None
        x1 = fld.mul(s1, w)
        x2 = x1 ^ s1
        if x1 == 0 or x2 == 0:
            return None
        p1, p2 = fld.log[x1], fld.log[x2]
        if p1 >= self.n_buckets or p2 >= self.n_buckets:
            return None
        hit = tuple(sorted((p1, p2)))
        return hit if self._verify(hit, selems) else None

    def _decode_general(self, selems: List[int]) -> Optional[Tuple[int, ...]]:
        fld = self.field
        syn = [0] * (2 * self.d)  # syn[i] = S_(i+1)
        for i, s in enumerate(selems):
            syn[2 * i] = s
        for j in range(2, 2 * self.d + 1, 2):  # S_(2j) = S_j squared
            half = syn[j // 2 - 1]
            if half:
                syn[j - 1] = fld.exp[(2 * fld.log[half]) % fld.order]
        lam = _berlekamp_massey(fld, syn)
        deg = len(lam) - 1
        if deg < 1 or deg > self.d:
            return None
        # Chien search: Lambda(alpha^e) = 0  <=>  position (order - e) % order
        acc = np.zeros(fld.order, dtype=np.int64)
        for j, coeff in enumerate(lam):
            if coeff:
                acc ^= fld.exp_np2[fld.log[coeff] + fld.chien_exponents(j)]
        root_es = np.nonzero(acc == 0)[0]
        if len(root_es) != deg:
            return None
        positions = tuple(sorted(int((fld.order - e) % fld.order) for e in root_es))
        if positions[-1] >= self.n_buckets or len(set(positions)) != deg:
            return None
        return positions if self._verify(positions, selems) else None


def _berlekamp_massey(fld: Field, syn: List[int]) -> List[int]:
    """Minimal LFSR connection polynomial for the syndrome sequence."""
    exp, log, order = fld.exp, fld.log, fld.order
    cur = [1]
    prev = [1]
    shift = 1
    prev_delta = 1
    length = 0
    for n_i in range(len(syn)):
        delta = syn[n_i]
        top = min(length, len(cur) - 1)
        for i in range(1, top + 1):
            c, s = cur[i], syn[n_i - i]
            if c and s:
                delta ^= exp[log[c] + log[s]]
        if delta == 0:
            shift += 1
            continue
        scale_log = (log[delta] + order - log[prev_delta]) % order
        update = cur[:]
        need = shift + len(prev)
        if len(update) < need:
            update.extend([0] * (need - len(update)))
        for i, coeff in enumerate(prev):
            if coeff:
                update[shift + i] ^= exp[scale_log + log[coeff]]
        if 2 * length <= n_i:
            prev = cur
            prev_delta = delta
            length = n_i + 1 - length
            shift = 1
        else:
            shift += 1
        cur = update
    while len(cur) > 1 and cur[-1] == 0:
        cur.pop()
    return cur


_CODES: Dict[Tuple[int, int], BchCode] = {}


def bch_code(n_buckets: int, d: int) -> BchCode:
    key = (n_buckets, d)
    if key not in _CODES:
        _CODES[key] = BchCode(n_buckets, d)
    return _CODES[key]


def gf2_decode(code: BchCode, syndrome_bits: np.ndarray) -> Optional[Tuple[int, ...]]:
    """Recover a weight <= d error vector from its syndrome, or None on failure."""
    return code.decode(syndrome_bits)


__all__ = ["Field", "field", "BchCode", "bch_code", "gf2_decode"]
