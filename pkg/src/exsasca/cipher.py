"""Byte-level arithmetic of the first AES-128 round, plus a GF(16) miniature.

Two cipher variants share one code path: the real AES byte field GF(256)
with the standard S-box, and a nibble-sized twin over GF(16) whose entire
input space (2^16 column inputs) can be enumerated in tests.  The column
mixing step is expanded into all of its intermediates (the ``ColumnTrace``)
because the attack models every one of those values as a leaking variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

AES_SBOX = (
    0x63, 0x7C, 0x77, 0x7B, 0xF2, 0x6B, 0x6F, 0xC5, 0x30, 0x01, 0x67, 0x2B, 0xFE, 0xD7, 0xAB, 0x76,
    0xCA, 0x82, 0xC9, 0x7D, 0xFA, 0x59, 0x47, 0xF0, 0xAD, 0xD4, 0xA2, 0xAF, 0x9C, 0xA4, 0x72, 0xC0,
    0xB7, 0xFD, 0x93, 0x26, 0x36, 0x3F, 0xF7, 0xCC, 0x34, 0xA5, 0xE5, 0xF1, 0x71, 0xD8, 0x31, 0x15,
    0x04, 0xC7, 0x23, 0xC3, 0x18, 0x96, 0x05, 0x9A, 0x07, 0x12, 0x80, 0xE2, 0xEB, 0x27, 0xB2, 0x75,
    0x09, 0x83, 0x2C, 0x1A, 0x1B, 0x6E, 0x5A, 0xA0, 0x52, 0x3B, 0xD6, 0xB3, 0x29, 0xE3, 0x2F, 0x84,
    0x53, 0xD1, 0x00, 0xED, 0x20, 0xFC, 0xB1, 0x5B, 0x6A, 0xCB, 0xBE, 0x39, 0x4A, 0x4C, 0x58, 0xCF,
    0xD0, 0xEF, 0xAA, 0xFB, 0x43, 0x4D, 0x33, 0x85, 0x45, 0xF9, 0x02, 0x7F, 0x50, 0x3C, 0x9F, 0xA8,
    0x51, 0xA3, 0x40, 0x8F, 0x92, 0x9D, 0x38, 0xF5, 0xBC, 0xB6, 0xDA, 0x21, 0x10, 0xFF, 0xF3, 0xD2,
    0xCD, 0x0C, 0x13, 0xEC, 0x5F, 0x97, 0x44, 0x17, 0xC4, 0xA7, 0x7E, 0x3D, 0x64, 0x5D, 0x19, 0x73,
    0x60, 0x81, 0x4F, 0xDC, 0x22, 0x2A, 0x90, 0x88, 0x46, 0xEE, 0xB8, 0x14, 0xDE, 0x5E, 0x0B, 0xDB,
    0xE0, 0x32, 0x3A, 0x0A, 0x49, 0x06, 0x24, 0x5C, 0xC2, 0xD3, 0xAC, 0x62, 0x91, 0x95, 0xE4, 0x79,
    0xE7, 0xC8, 0x37, 0x6D, 0x8D, 0xD5, 0x4E, 0xA9, 0x6C, 0x56, 0xF4, 0xEA, 0x65, 0x7A, 0xAE, 0x08,
    0xBA, 0x78, 0x25, 0x2E, 0x1C, 0xA6, 0xB4, 0xC6, 0xE8, 0xDD, 0x74, 0x1F, 0x4B, 0xBD, 0x8B, 0x8A,
    0x70, 0x3E, 0xB5, 0x66, 0x48, 0x03, 0xF6, 0x0E, 0x61, 0x35, 0x57, 0xB9, 0x86, 0xC1, 0x1D, 0x9E,
    0xE1, 0xF8, 0x98, 0x11, 0x69, 0xD9, 0x8E, 0x94, 0x9B, 0x1E, 0x87, 0xE9, 0xCE, 0x55, 0x28, 0xDF,
    0x8C, 0xA1, 0x89, 0x0D, 0xBF, 0xE6, 0x42, 0x68, 0x41, 0x99, 0x2D, 0x0F, 0xB0, 0x54, 0xBB, 0x16,
)

# 4-bit S-box of the PRESENT cipher; any published 4-bit permutation works,
# this one is fixed so datasets and circuits are reproducible.
MINI_SBOX = (0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2)

# Names of the 21 column-mixing bytes, in dataflow order.  x1..x4 are the
# mixing inputs, x12..x41 the pairwise xors, g the column-wide xor, xt* the
# doubled pairs, xp* the g-shifted doubles, xm* the mixing outputs.
TRACE_NAMES = (
    "x1", "x2", "x3", "x4",
    "x12", "x23", "x34", "x41",
    "g",
    "xt12", "xt23", "xt34", "xt41",
    "xp12", "xp23", "xp34", "xp41",
    "xm1", "xm2", "xm3", "xm4",
)

# Bytes that survive the belief-merging reduction at a fixed g.
REDUCED_NAMES = ("x1", "x2", "x3", "x4", "x12", "x23", "xm1", "xm2", "xm3", "xm4")

# Bytes folded away by merging (all deterministic functions of the reduced
# set once g is fixed).
MERGED_AWAY_NAMES = tuple(n for n in TRACE_NAMES if n not in REDUCED_NAMES and n != "g")


@dataclass(frozen=True)
class Variant:
    """One field size: bit width, reduction polynomial and S-box table."""

    name: str
    bits: int
    poly: int  # full modulus, e.g. 0x11B for AES
    sbox_table: tuple[int, ...]

    @property
    def n(self) -> int:
        return 1 << self.bits

    @property
    def mask(self) -> int:
        return self.n - 1

    @cached_property
    def sbox_inv_table(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for i, v in enumerate(self.sbox_table):
            inv[v] = i
        return tuple(inv)

    @cached_property
    def xtime_table(self) -> tuple[int, ...]:
        out = []
        for a in range(self.n):
            r = a << 1
            if r & self.n:
                r ^= self.poly
            out.append(r & self.mask)
        return tuple(out)

    @cached_property
    def hw_table(self) -> tuple[int, ...]:
        return tuple(bin(v).count("1") for v in range(self.n))

    # numpy copies of the tables, for vectorized enumeration
    @cached_property
    def sbox_np(self) -> np.ndarray:
        return np.array(self.sbox_table, dtype=np.int64)

    @cached_property
    def sbox_inv_np(self) -> np.ndarray:
        return np.array(self.sbox_inv_table, dtype=np.int64)

    @cached_property
    def xtime_np(self) -> np.ndarray:
        return np.array(self.xtime_table, dtype=np.int64)

    @cached_property
    def hw_np(self) -> np.ndarray:
        return np.array(self.hw_table, dtype=np.int64)

    def xtime_bit_sources(self, j: int) -> tuple[int, ...]:
        """Input bit positions whose xor gives output bit j of xtime."""
        src = []
        if j > 0:
            src.append(j - 1)
        if (self.poly >> j) & 1:
            src.append(self.bits - 1)
        return tuple(src)


BYTE = Variant("aes", 8, 0x11B, AES_SBOX)
MINI = Variant("mini", 4, 0x13, MINI_SBOX)

VARIANTS = {v.name: v for v in (BYTE, MINI)}


def xtime(a: int, variant: Variant = BYTE) -> int:
    return variant.xtime_table[a]


def sbox(a: int, variant: Variant = BYTE) -> int:
    return variant.sbox_table[a]


def sbox_inverse(a: int, variant: Variant = BYTE) -> int:
    return variant.sbox_inv_table[a]


def mini_xtime(a: int) -> int:
    return MINI.xtime_table[a]


@dataclass(frozen=True)
class ColumnTrace:
    """All 21 values computed while mixing one column."""

    x1: int
    x2: int
    x3: int
    x4: int
    x12: int
    x23: int
    x34: int
    x41: int
    g: int
    xt12: int
    xt23: int
    xt34: int
    xt41: int
    xp12: int
    xp23: int
    xp34: int
    xp41: int
    xm1: int
    xm2: int
    xm3: int
    xm4: int

    def as_dict(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in TRACE_NAMES}

    @property
    def outputs(self) -> tuple[int, int, int, int]:
        return (self.xm1, self.xm2, self.xm3, self.xm4)


def mix_column_trace(x1: int, x2: int, x3: int, x4: int,
                     variant: Variant = BYTE) -> ColumnTrace:
    xt = variant.xtime_table
    x12, x23, x34, x41 = x1 ^ x2, x2 ^ x3, x3 ^ x4, x4 ^ x1
    g = x12 ^ x34
    xt12, xt23, xt34, xt41 = xt[x12], xt[x23], xt[x34], xt[x41]
    xp12, xp23, xp34, xp41 = xt12 ^ g, xt23 ^ g, xt34 ^ g, xt41 ^ g
    return ColumnTrace(
        x1, x2, x3, x4, x12, x23, x34, x41, g,
        xt12, xt23, xt34, xt41, xp12, xp23, xp34, xp41,
        x1 ^ xp12, x2 ^ xp23, x3 ^ xp34, x4 ^ xp41,
    )


def mix_column(x1: int, x2: int, x3: int, x4: int,
               variant: Variant = BYTE) -> tuple[int, int, int, int]:
    return mix_column_trace(x1, x2, x3, x4, variant).outputs


def mini_mix_column(x1: int, x2: int, x3: int, x4: int):
    return mix_column(x1, x2, x3, x4, MINI)


def mini_mix_column_trace(x1: int, x2: int, x3: int, x4: int) -> ColumnTrace:
    return mix_column_trace(x1, x2, x3, x4, MINI)


@dataclass(frozen=True)
class FirstRound:
    """Intermediates of the first round: y = k xor p, x = S(y), 4 mixed columns."""

    y: tuple[int, ...]
    x: tuple[int, ...]
    columns: tuple[ColumnTrace, ...]


def first_round_intermediates(key, plaintext, variant: Variant = BYTE) -> FirstRound:
    """Run key addition, substitution and column mixing on 16 positions.

    Row shifting is a fixed relabeling of positions and is deliberately not
    modeled; column c consumes substituted positions 4c..4c+3 directly.
    """
    key = tuple(key)
    plaintext = tuple(plaintext)
    if len(key) != 16 or len(plaintext) != 16:
        raise ValueError("expected 16 key and 16 plaintext values")
    y = tuple(k ^ p for k, p in zip(key, plaintext))
    x = tuple(variant.sbox_table[v] for v in y)
    cols = tuple(
        mix_column_trace(x[4 * c], x[4 * c + 1], x[4 * c + 2], x[4 * c + 3], variant)
        for c in range(4)
    )
    return FirstRound(y=y, x=x, columns=cols)


def reduced_trace_values(x1: int, x2: int, x3: int, x4: int,
                         variant: Variant = BYTE) -> dict[str, int]:
    """The trace restricted to the bytes kept after belief merging."""
    t = mix_column_trace(x1, x2, x3, x4, variant).as_dict()
    return {name: t[name] for name in REDUCED_NAMES}


def value_permutation(g: int, g_prime: int, byte: str, variant: Variant = BYTE) -> "np.ndarray":
    """Per-byte value map carrying models at column-xor g to models at g_prime.

    Holding x1, x2, x3 fixed and moving g to g_prime (so x4 absorbs the
    difference), each reduced byte shifts by a constant:

        x4, xm1, xm2  ->  xor (g ^ g')
        xm3           ->  xor (xtime(g ^ g') ^ (g ^ g'))
        xm4           ->  xor xtime(g ^ g')
        others        ->  unchanged

    Returned as a length-n permutation array: value v maps to perm[v].
    """
    if byte not in REDUCED_NAMES:
        raise KeyError(f"unknown reduced byte {byte!r}")
    delta = g ^ g_prime
    xt_delta = variant.xtime_table[delta]
    shift = {
        "x4": delta,
        "xm1": delta,
        "xm2": delta,
        "xm3": xt_delta ^ delta,
        "xm4": xt_delta,
    }.get(byte, 0)
    return np.arange(variant.n, dtype=np.int64) ^ shift


def byte_bijection(g: int, g_prime: int, byte: str, x: int,
                   variant: Variant = BYTE) -> int:
    """Apply the g-to-g' model bijection to a single byte value."""
    return int(value_permutation(g, g_prime, byte, variant)[x])
