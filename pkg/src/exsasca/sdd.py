"""Bottom-up compiler substrate for sentential decision diagrams.

Nodes are stored in one arena per manager and referenced by integer id;
structural hashing makes circuits canonical for a fixed vtree, so equality
of functions is equality of ids.  Decision nodes keep their (prime, sub)
element pairs compressed (no duplicate subs) and trimmed, which the apply
operation relies on for canonicity.
"""

from __future__ import annotations

import sys
from typing import Iterable

from .vtree import Vtree, VtreeNode

AND = 0
OR = 1

TRUE = 0
FALSE = 1

_KIND_TRUE = 0
_KIND_FALSE = 1
_KIND_LIT = 2
_KIND_DEC = 3


class SddError(Exception):
    pass


class SddManager:
    """Owns the node arena, unique table and apply cache for one vtree."""

    def __init__(self, vtree: Vtree):
        self.vtree = vtree
        self._kind: list[int] = [_KIND_TRUE, _KIND_FALSE]
        self._vt: list[int] = [-1, -1]            # vtree node id
        self._lit: list[int] = [0, 0]             # signed var for literals
        self._elems: list[tuple] = [(), ()]
        self._neg: list[int] = [FALSE, TRUE]
        self._unique: dict[tuple, int] = {}
        self._lit_id: dict[int, int] = {}
        self._apply_cache: dict[tuple, int] = {}
        self._mc_cache: dict[int, int] = {}
        for v in vtree.variables():
            leaf = vtree.var_to_leaf[v].id
            pos = self._new_node(_KIND_LIT, leaf, lit=v)
            neg = self._new_node(_KIND_LIT, leaf, lit=-v)
            self._lit_id[v] = pos
            self._lit_id[-v] = neg
            self._neg[pos] = neg
            self._neg[neg] = pos
        depth = max(n.depth for n in vtree.nodes)
        need = 50 * depth + 10000
        if sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)

    # -- arena ----------------------------------------------------------

    def _new_node(self, kind: int, vt: int, lit: int = 0, elems: tuple = ()) -> int:
        nid = len(self._kind)
        self._kind.append(kind)
        self._vt.append(vt)
        self._lit.append(lit)
        self._elems.append(elems)
        self._neg.append(-1)
        return nid

    @property
    def node_count(self) -> int:
        return len(self._kind)

    def literal(self, signed_var: int) -> int:
        try:
            return self._lit_id[signed_var]
        except KeyError:
            raise SddError(f"variable {abs(signed_var)} is not in the vtree") from None

    def is_decision(self, n: int) -> bool:
        return self._kind[n] == _KIND_DEC

    def is_literal(self, n: int) -> bool:
        return self._kind[n] == _KIND_LIT

    def literal_of(self, n: int) -> int:
        return self._lit[n]

    def elements(self, n: int) -> tuple:
        return self._elems[n]

    def vtree_node(self, n: int) -> VtreeNode | None:
        vt = self._vt[n]
        return None if vt < 0 else self.vtree.nodes[vt]

    # -- construction ----------------------------------------------------

    def make_decision(self, vnode: VtreeNode, elements: Iterable[tuple[int, int]]) -> int:
        """Compress, trim and hash-cons a decision node at vnode."""
        by_sub: dict[int, int] = {}
        for p, s in elements:
            if p == FALSE:
                continue
            if s in by_sub:
                by_sub[s] = self.apply(by_sub[s], p, OR)
            else:
                by_sub[s] = p
        elems = tuple(sorted(((p, s) for s, p in by_sub.items())))
        if len(elems) == 1:
            p, s = elems[0]
            if p != TRUE:
                raise SddError("decision primes do not cover the space")
            return s
        if len(elems) == 2:
            subs = {elems[0][1], elems[1][1]}
            if subs == {TRUE, FALSE}:
                return elems[0][0] if elems[0][1] == TRUE else elems[1][0]
        key = (vnode.id, elems)
        nid = self._unique.get(key)
        if nid is None:
            nid = self._new_node(_KIND_DEC, vnode.id, elems=elems)
            self._unique[key] = nid
        return nid

    # -- apply -----------------------------------------------------------

    def negate(self, n: int) -> int:
        known = self._neg[n]
        if known >= 0:
            return known
        elems = tuple((p, self.negate(s)) for p, s in self._elems[n])
        res = self.make_decision(self.vtree.nodes[self._vt[n]], elems)
        self._neg[n] = res
        if self._neg[res] < 0:
            self._neg[res] = n
        return res

    def apply(self, a: int, b: int, op: int) -> int:
        if a == b:
            return a
        if op == AND:
            if a == FALSE or b == FALSE:
                return FALSE
            if a == TRUE:
                return b
            if b == TRUE:
                return a
            if self._neg[a] == b:
                return FALSE
        else:
            if a == TRUE or b == TRUE:
                return TRUE
            if a == FALSE:
                return b
            if b == FALSE:
                return a
            if self._neg[a] == b:
                return TRUE
        if a > b:
            a, b = b, a
        key = (a, b, op)
        cached = self._apply_cache.get(key)
        if cached is not None:
            return cached
        va = self.vtree.nodes[self._vt[a]]
        vb = self.vtree.nodes[self._vt[b]]
        if va is vb:
            if self._kind[a] == _KIND_LIT:
                # same leaf, opposite signs (equal ids handled above)
                res = FALSE if op == AND else TRUE
            else:
                res = self._apply_decomp(va, self._elems[a], self._elems[b], op)
        else:
            lca = self.vtree.lca(va, vb)
            ea = self._lift(a, va, lca)
            eb = self._lift(b, vb, lca)
            res = self._apply_decomp(lca, ea, eb, op)
        self._apply_cache[key] = res
        return res

    def _lift(self, n: int, vn: VtreeNode, target: VtreeNode) -> tuple:
        """Element view of n as a decision normalized at target."""
        if vn is target:
            return self._elems[n]
        if Vtree.contains(target.left, vn):
            return ((n, TRUE), (self.negate(n), FALSE))
        return ((TRUE, n),)

    def _apply_decomp(self, vnode: VtreeNode, ea: tuple, eb: tuple, op: int) -> int:
        out = []
        for p1, s1 in ea:
            for p2, s2 in eb:
                p = self.apply(p1, p2, AND)
                if p == FALSE:
                    continue
                out.append((p, self.apply(s1, s2, op)))
        return self.make_decision(vnode, out)

    def conjoin(self, a: int, b: int) -> int:
        return self.apply(a, b, AND)

    def disjoin(self, a: int, b: int) -> int:
        return self.apply(a, b, OR)

    # -- conditioning and quantification ----------------------------------

    def condition(self, f: int, assignment: dict[int, bool]) -> int:
        """Fix variables to constants; result no longer mentions them."""
        amap = {int(v): bool(val) for v, val in assignment.items()}
        memo: dict[int, int] = {}

        def walk(n: int) -> int:
            if n == TRUE or n == FALSE:
                return n
            got = memo.get(n)
            if got is not None:
                return got
            if self._kind[n] == _KIND_LIT:
                lit = self._lit[n]
                var = abs(lit)
                if var in amap:
                    res = TRUE if amap[var] == (lit > 0) else FALSE
                else:
                    res = n
            else:
                elems = []
                for p, s in self._elems[n]:
                    p2 = walk(p)
                    if p2 == FALSE:
                        continue
                    elems.append((p2, walk(s)))
                res = self.make_decision(self.vtree.nodes[self._vt[n]], elems)
            memo[n] = res
            return res

        return walk(f)

    def exists(self, f: int, variables: Iterable[int]) -> int:
        for v in variables:
            f = self.disjoin(self.condition(f, {v: False}),
                             self.condition(f, {v: True}))
        return f

    # -- model counting ----------------------------------------------------

    def _free_counts(self, free_vars) -> list[int]:
        """Per-vtree-node count of counted variables, indexed by vtree id."""
        counts = [0] * len(self.vtree.nodes)
        include = None if free_vars is None else set(free_vars)

        def walk(node: VtreeNode) -> int:
            if node.is_leaf:
                c = 1 if include is None or node.var in include else 0
            else:
                c = walk(node.left) + walk(node.right)
            counts[node.id] = c
            return c

        walk(self.vtree.root)
        return counts

    def model_count(self, f: int, free_vars: Iterable[int] | None = None) -> int:
        """Exact model count of f over free_vars (default: all vtree variables)."""
        counts = self._free_counts(free_vars)
        memo: dict[int, int] = {}

        def scoped(n: int, vnode: VtreeNode) -> int:
            if n == FALSE:
                return 0
            if n == TRUE:
                return 1 << counts[vnode.id]
            if self._kind[n] == _KIND_LIT:
                return 1 << (counts[vnode.id] - 1)
            return at_own(n) << (counts[vnode.id] - counts[self._vt[n]])

        def at_own(n: int) -> int:
            got = memo.get(n)
            if got is not None:
                return got
            vnode = self.vtree.nodes[self._vt[n]]
            total = 0
            for p, s in self._elems[n]:
                sc = scoped(s, vnode.right)
                if sc:
                    total += scoped(p, vnode.left) * sc
            memo[n] = total
            return total

        return scoped(f, self.vtree.root)

    # -- inspection ---------------------------------------------------------

    def reachable(self, roots: Iterable[int]) -> list[int]:
        seen: set[int] = set()
        stack = [r for r in roots]
        order = []
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            order.append(n)
            if self._kind[n] == _KIND_DEC:
                for p, s in self._elems[n]:
                    stack.append(p)
                    stack.append(s)
        return order

    def size(self, *roots: int) -> int:
        """Circuit size: total element count over reachable decision nodes."""
        return sum(len(self._elems[n]) for n in self.reachable(roots)
                   if self._kind[n] == _KIND_DEC)

    def sums_and_products(self, *roots: int) -> tuple[int, int]:
        """Paper-style size metric: decision nodes (sums) and elements (products)."""
        decs = [n for n in self.reachable(roots) if self._kind[n] == _KIND_DEC]
        return len(decs), sum(len(self._elems[n]) for n in decs)

    def evaluate(self, f: int, assignment: dict[int, bool]) -> bool:
        memo: dict[int, bool] = {}

        def walk(n: int) -> bool:
            if n == TRUE:
                return True
            if n == FALSE:
                return False
            got = memo.get(n)
            if got is not None:
                return got
            if self._kind[n] == _KIND_LIT:
                lit = self._lit[n]
                res = assignment[abs(lit)] == (lit > 0)
            else:
                res = False
                for p, s in self._elems[n]:
                    if walk(p):
                        res = walk(s)
                        break
            memo[n] = res
            return res

        return walk(f)

    def validate(self, f: int, semantic: bool = True) -> None:
        """Check decision-node invariants; raises SddError on violation."""
        for n in self.reachable([f]):
            if self._kind[n] != _KIND_DEC:
                continue
            vnode = self.vtree.nodes[self._vt[n]]
            if vnode.is_leaf:
                raise SddError(f"decision node {n} at a leaf vtree node")
            elems = self._elems[n]
            subs = [s for _, s in elems]
            if len(set(subs)) != len(subs):
                raise SddError(f"node {n} has duplicate subs (uncompressed)")
            for p, s in elems:
                if p == FALSE:
                    raise SddError(f"node {n} has a false prime")
                if p != TRUE:
                    pv = self.vtree.nodes[self._vt[p]]
                    if not Vtree.contains(vnode.left, pv):
                        raise SddError(f"node {n}: prime outside left scope")
                if s not in (TRUE, FALSE):
                    sv = self.vtree.nodes[self._vt[s]]
                    if not Vtree.contains(vnode.right, sv):
                        raise SddError(f"node {n}: sub outside right scope")
            if semantic:
                total = FALSE
                for i, (p, _) in enumerate(elems):
                    for q, _ in elems[i + 1:]:
                        if self.apply(p, q, AND) != FALSE:
                            raise SddError(f"node {n}: overlapping primes")
                    total = self.apply(total, p, OR)
                if total != TRUE:
                    raise SddError(f"node {n}: primes do not cover the space")

    # -- transfer ------------------------------------------------------------

    def rebuild_into(self, target: "SddManager", f: int,
                     var_map: dict[int, int] | None = None,
                     memo: dict[int, int] | None = None) -> int:
        """Reconstruct f inside another manager (possibly different vtree)."""
        if memo is None:
            memo = {}

        def walk(n: int) -> int:
            if n == TRUE or n == FALSE:
                return n
            got = memo.get(n)
            if got is not None:
                return got
            if self._kind[n] == _KIND_LIT:
                lit = self._lit[n]
                var = abs(lit)
                tvar = var_map[var] if var_map else var
                res = target.literal(tvar if lit > 0 else -tvar)
            else:
                res = FALSE
                for p, s in self._elems[n]:
                    res = target.disjoin(res, target.conjoin(walk(p), walk(s)))
            memo[n] = res
            return res

        return walk(f)

    # -- serialization ---------------------------------------------------------

    def save(self, f: int, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps(f))

    def dumps(self, f: int) -> str:
        lines = []
        emitted: set[int] = set()

        def walk(n: int) -> None:
            if n in emitted:
                return
            emitted.add(n)
            kind = self._kind[n]
            if kind == _KIND_TRUE:
                lines.append(f"T {n} TRUE")
            elif kind == _KIND_FALSE:
                lines.append(f"T {n} FALSE")
            elif kind == _KIND_LIT:
                lines.append(f"L {n} {self._lit[n]}")
            else:
                parts = []
                for p, s in self._elems[n]:
                    walk(p)
                    walk(s)
                    parts.append(f"{p} {s}")
                lines.append(f"D {n} {self._vt[n]} {len(parts)} " + " ".join(parts))

        walk(f)
        return "\n".join(lines) + "\n"

    def load(self, path) -> int:
        with open(path) as fh:
            return self.loads(fh.read())

    def loads(self, text: str) -> int:
        """Parse a saved circuit into this manager; returns the root id."""
        id_map: dict[int, int] = {}
        root = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                tag = parts[0]
                old = int(parts[1])
                if tag == "T":
                    node = TRUE if parts[2] == "TRUE" else FALSE
                elif tag == "L":
                    node = self.literal(int(parts[2]))
                elif tag == "D":
                    vt_id = int(parts[2])
                    if not (0 <= vt_id < len(self.vtree.nodes)) \
                            or self.vtree.nodes[vt_id].is_leaf:
                        raise SddError(f"vtree node {vt_id} not usable here")
                    k = int(parts[3])
                    pairs = parts[4:]
                    if len(pairs) != 2 * k:
                        raise SddError("element count mismatch")
                    elems = [(id_map[int(pairs[2 * i])], id_map[int(pairs[2 * i + 1])])
                             for i in range(k)]
                    vnode = self.vtree.nodes[vt_id]
                    for p, s in elems:
                        for child, side in ((p, vnode.left), (s, vnode.right)):
                            if child in (TRUE, FALSE):
                                continue
                            cv = self.vtree.nodes[self._vt[child]]
                            if not Vtree.contains(side, cv):
                                raise SddError("element scope violates vtree")
                    node = self.make_decision(vnode, elems)
                else:
                    raise SddError(f"unknown record {tag!r}")
            except (IndexError, KeyError, ValueError, SddError) as exc:
                raise SddError(f"malformed circuit line {lineno}: {raw!r}: {exc}") from exc
            id_map[old] = node
            root = node
        if root is None:
            raise SddError("empty circuit file")
        return root
