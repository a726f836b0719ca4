"""Bit-blasting of the column-mixing relation into CNF.

Every byte-level line of the mixing computation becomes per-bit parity
constraints: three-variable xors for byte xor assignments, and
equality/xor constraints for doubling (whose bit formula follows from the
field's reduction polynomial).  Variables are numbered slice-major (all
bytes' bit B-1 first, then bit 0, 1, ...), which makes linear vtrees over
the natural order behave like a trellis during compilation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .cipher import BYTE, MERGED_AWAY_NAMES, REDUCED_NAMES, TRACE_NAMES, Variant


@dataclass
class Cnf:
    num_vars: int
    clauses: list[tuple[int, ...]] = field(default_factory=list)

    def add(self, clause) -> None:
        clause = tuple(clause)
        if any(lit == 0 for lit in clause):
            raise ValueError("literal 0 is not allowed")
        if len({abs(l) for l in clause}) != len(clause):
            raise ValueError(f"clause mentions a variable twice: {clause}")
        for lit in clause:
            if not (1 <= abs(lit) <= self.num_vars):
                raise ValueError(f"variable {abs(lit)} out of range")
        self.clauses.append(clause)

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        return all(
            any(assignment[abs(l)] == (l > 0) for l in clause)
            for clause in self.clauses
        )

    def __eq__(self, other):
        return (isinstance(other, Cnf)
                and self.num_vars == other.num_vars
                and self.clauses == other.clauses)


def parity_clauses(variables: list[int], rhs: int) -> list[tuple[int, ...]]:
    """Clauses forcing xor of the variables to equal rhs (0 or 1)."""
    k = len(variables)
    out = []
    for bits in product((0, 1), repeat=k):
        if sum(bits) % 2 != rhs:  # violating assignment: rule it out
            out.append(tuple(v if b == 0 else -v for v, b in zip(variables, bits)))
    return out


class VarMap:
    """Bijection between (byte name, bit index) and CNF variable indices.

    Bit 0 is the least significant bit.  Two layouts exist: "sliced"
    interleaves bytes by bit position (slice order: top bit first, then
    bits 0 upward) and "blocked" keeps each byte's bits contiguous.
    """

    def __init__(self, names: tuple[str, ...], bits: int, layout: str = "sliced"):
        if layout not in ("sliced", "blocked"):
            raise ValueError(f"unknown layout {layout!r}")
        self.names = tuple(names)
        self.bits = bits
        self.layout = layout
        self._fwd: dict[tuple[str, int], int] = {}
        self._rev: dict[int, tuple[str, int]] = {}
        if layout == "sliced":
            slice_order = [bits - 1] + list(range(bits - 1))
            idx = 1
            for j in slice_order:
                for name in self.names:
                    self._fwd[(name, j)] = idx
                    self._rev[idx] = (name, j)
                    idx += 1
        else:
            idx = 1
            for name in self.names:
                for j in range(bits):
                    self._fwd[(name, j)] = idx
                    self._rev[idx] = (name, j)
                    idx += 1

    @property
    def num_vars(self) -> int:
        return len(self._fwd)

    def var(self, name: str, bit: int) -> int:
        return self._fwd[(name, bit)]

    def name_bit(self, var: int) -> tuple[str, int]:
        return self._rev[var]

    def bits_of(self, name: str) -> list[int]:
        return [self._fwd[(name, j)] for j in range(self.bits)]

    def variables_in_leaf_order(self) -> list[int]:
        return sorted(self._rev)

    def assignment_for(self, values: dict[str, int]) -> dict[int, bool]:
        out = {}
        for name, value in values.items():
            for j in range(self.bits):
                out[self._fwd[(name, j)]] = bool((value >> j) & 1)
        return out

    def value_of(self, name: str, assignment: dict[int, bool]) -> int:
        v = 0
        for j in range(self.bits):
            if assignment[self._fwd[(name, j)]]:
                v |= 1 << j
        return v

    def save(self, path) -> None:
        with open(path, "w") as fh:
            for var in sorted(self._rev):
                name, bit = self._rev[var]
                fh.write(f"{name}.{bit} {var}\n")

    @classmethod
    def load(cls, path, bits: int, layout: str = "sliced") -> "VarMap":
        entries = {}
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                key, var = line.split()
                name, bit = key.rsplit(".", 1)
                entries[(name, int(bit))] = int(var)
        names = []
        for (name, _), _ in sorted(entries.items(), key=lambda kv: kv[1]):
            if name not in names:
                names.append(name)
        vm = cls(tuple(names), bits, layout)
        if vm._fwd != entries:
            raise ValueError("variable map file does not match the expected layout")
        return vm


# Byte xor assignments of the column-mixing computation: out = a xor b.
_XOR_LINES = (
    ("x12", "x1", "x2"),
    ("x23", "x2", "x3"),
    ("x34", "x3", "x4"),
    ("x41", "x4", "x1"),
    ("g", "x12", "x34"),
    ("xp12", "xt12", "g"),
    ("xp23", "xt23", "g"),
    ("xp34", "xt34", "g"),
    ("xp41", "xt41", "g"),
    ("xm1", "x1", "xp12"),
    ("xm2", "x2", "xp23"),
    ("xm3", "x3", "xp34"),
    ("xm4", "x4", "xp41"),
)

_XTIME_LINES = (("xt12", "x12"), ("xt23", "x23"), ("xt34", "x34"), ("xt41", "x41"))


def _emit_xtime(cnf: Cnf, vm: VarMap, out: str, inp: str, variant: Variant,
                rhs_const: int = 0) -> None:
    for j in range(variant.bits):
        sources = [vm.var(inp, src) for src in variant.xtime_bit_sources(j)]
        rhs = (rhs_const >> j) & 1
        for clause in parity_clauses([vm.var(out, j)] + sources, rhs):
            cnf.add(clause)


def encode_mix_column(variant: Variant = BYTE) -> tuple[Cnf, VarMap]:
    """CNF over all 21 bytes whose models are exactly the valid column traces."""
    vm = VarMap(TRACE_NAMES, variant.bits, layout="sliced")
    cnf = Cnf(vm.num_vars)
    for out, a, b in _XOR_LINES:
        for j in range(variant.bits):
            for clause in parity_clauses([vm.var(out, j), vm.var(a, j), vm.var(b, j)], 0):
                cnf.add(clause)
    for out, inp in _XTIME_LINES:
        _emit_xtime(cnf, vm, out, inp, variant)
    return cnf, vm


def encode_mini_mix_column():
    from .cipher import MINI
    return encode_mix_column(MINI)


def encode_conditioned_mix_column(variant: Variant, g: int,
                                  layout: str = "sliced") -> tuple[Cnf, VarMap]:
    """CNF over the ten merge-surviving bytes, with the column xor fixed to g.

    The folded-away bytes are deterministic in these ten once g is fixed, so
    the models here are exactly the g-slice of the full relation projected
    onto the reduced byte set (one model per (x1, x2, x3) choice).
    """
    vm = VarMap(REDUCED_NAMES, variant.bits, layout=layout)
    cnf = Cnf(vm.num_vars)
    xt = variant.xtime_table
    c = xt[g] ^ g

    def xor_line(out, operands, rhs_const):
        for j in range(variant.bits):
            vs = [vm.var(out, j)] + [vm.var(op, j) for op in operands]
            for clause in parity_clauses(vs, (rhs_const >> j) & 1):
                cnf.add(clause)

    def xtime_line(out, plain, doubled, rhs_const):
        # out = plain xor xtime(doubled) xor rhs_const
        for j in range(variant.bits):
            vs = [vm.var(out, j), vm.var(plain, j)]
            vs += [vm.var(doubled, src) for src in variant.xtime_bit_sources(j)]
            for clause in parity_clauses(vs, (rhs_const >> j) & 1):
                cnf.add(clause)

    xor_line("x12", ("x1", "x2"), 0)
    xor_line("x23", ("x2", "x3"), 0)
    xor_line("x4", ("x12", "x3"), g)
    xtime_line("xm1", "x1", "x12", g)
    xtime_line("xm2", "x2", "x23", g)
    xtime_line("xm3", "x3", "x12", c)
    xtime_line("xm4", "x4", "x23", c)
    return cnf, vm


def merged_away_bit_vars(vm: VarMap) -> list[int]:
    """CNF variables of the bytes that belief merging removes (full map only)."""
    out = []
    for name in MERGED_AWAY_NAMES:
        out.extend(vm.bits_of(name))
    return out


def to_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    for clause in cnf.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    cnf = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {raw!r}")
            cnf = Cnf(int(parts[2]))
            continue
        if cnf is None:
            raise ValueError("clause before DIMACS header")
        lits = [int(tok) for tok in line.split()]
        if lits[-1] != 0:
            raise ValueError(f"clause line not zero-terminated: {raw!r}")
        cnf.add(lits[:-1])
    if cnf is None:
        raise ValueError("missing DIMACS header")
    return cnf
