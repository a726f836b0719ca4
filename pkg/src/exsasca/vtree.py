"""Variable trees: full binary trees whose leaves carry Boolean variables.

A vtree fixes how every decision-diagram node may split its variable scope.
Node ids are in-order positions (leaves even, internals odd), and because
leaves appear in in-order sequence, the variables under any node form one
contiguous range of leaf ranks; scope and gap computations below are all
range arithmetic.
"""

from __future__ import annotations


class VtreeNode:
    __slots__ = ("id", "var", "left", "right", "parent", "depth",
                 "leaf_lo", "leaf_hi")

    def __init__(self):
        self.id = -1
        self.var = None          # variable label, leaves only
        self.left = None
        self.right = None
        self.parent = None
        self.depth = 0
        self.leaf_lo = -1        # inclusive leaf-rank range under this node
        self.leaf_hi = -1

    @property
    def is_leaf(self) -> bool:
        return self.var is not None

    def __repr__(self):
        if self.is_leaf:
            return f"VtreeNode(leaf id={self.id} var={self.var})"
        return f"VtreeNode(id={self.id})"


class Vtree:
    """Immutable after construction; shared by a manager and its circuits."""

    def __init__(self, root: VtreeNode):
        self.root = root
        self.nodes: list[VtreeNode] = []
        self.leaves: list[VtreeNode] = []
        self.var_to_leaf: dict[int, VtreeNode] = {}
        self._index()

    # -- construction -------------------------------------------------

    @staticmethod
    def _leaf(var: int) -> VtreeNode:
        n = VtreeNode()
        n.var = var
        return n

    @staticmethod
    def _internal(left: VtreeNode, right: VtreeNode) -> VtreeNode:
        n = VtreeNode()
        n.left, n.right = left, right
        left.parent = right.parent = n
        return n

    @classmethod
    def from_structure(cls, shape) -> "Vtree":
        """Build from nested pairs of variables, e.g. ((1, 2), (3, (4, 5)))."""
        def build(s):
            if isinstance(s, int):
                return cls._leaf(s)
            if len(s) == 1:
                return build(s[0])
            if len(s) != 2:
                raise ValueError("shape nodes must be variables or pairs")
            return cls._internal(build(s[0]), build(s[1]))
        return cls(build(shape))

    @classmethod
    def right_linear(cls, variables) -> "Vtree":
        variables = list(variables)
        if not variables:
            raise ValueError("need at least one variable")
        node = cls._leaf(variables[-1])
        for v in reversed(variables[:-1]):
            node = cls._internal(cls._leaf(v), node)
        return cls(node)

    @classmethod
    def left_linear(cls, variables) -> "Vtree":
        variables = list(variables)
        if not variables:
            raise ValueError("need at least one variable")
        node = cls._leaf(variables[0])
        for v in variables[1:]:
            node = cls._internal(node, cls._leaf(v))
        return cls(node)

    @classmethod
    def balanced(cls, variables) -> "Vtree":
        variables = list(variables)
        if not variables:
            raise ValueError("need at least one variable")

        def build(vs):
            if len(vs) == 1:
                return cls._leaf(vs[0])
            m = len(vs) // 2
            return cls._internal(build(vs[:m]), build(vs[m:]))
        return cls(build(variables))

    def _index(self) -> None:
        self.nodes = []
        self.leaves = []
        self.var_to_leaf = {}
        self.root.parent = None
        # in-order ids
        order: list[VtreeNode] = []
        stack: list[VtreeNode] = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            order.append(node)
            node = node.right
        for pos, n in enumerate(order):
            n.id = pos
        self.nodes = order
        # depth (top-down) and leaf-rank ranges (bottom-up)
        rank = 0
        work = [(self.root, 0, False)]
        while work:
            n, depth, done = work.pop()
            if n.is_leaf:
                n.depth = depth
                n.leaf_lo = n.leaf_hi = rank
                self.leaves.append(n)
                if n.var in self.var_to_leaf:
                    raise ValueError(f"duplicate variable {n.var}")
                self.var_to_leaf[n.var] = n
                rank += 1
            elif done:
                n.leaf_lo = n.left.leaf_lo
                n.leaf_hi = n.right.leaf_hi
            else:
                n.depth = depth
                work.append((n, depth, True))
                work.append((n.right, depth + 1, False))
                work.append((n.left, depth + 1, False))

    # -- queries -------------------------------------------------------

    @property
    def var_count(self) -> int:
        return len(self.leaves)

    def variables(self) -> list[int]:
        return [leaf.var for leaf in self.leaves]

    def n_vars_under(self, node: VtreeNode) -> int:
        return node.leaf_hi - node.leaf_lo + 1

    @staticmethod
    def contains(ancestor: VtreeNode, node: VtreeNode) -> bool:
        return ancestor.leaf_lo <= node.leaf_lo and node.leaf_hi <= ancestor.leaf_hi

    def lca(self, a: VtreeNode, b: VtreeNode) -> VtreeNode:
        while a.depth > b.depth:
            a = a.parent
        while b.depth > a.depth:
            b = b.parent
        while a is not b:
            a = a.parent
            b = b.parent
        return a

    def vars_between(self, ancestor: VtreeNode, node: VtreeNode) -> list[int]:
        """Variables under ancestor but not under node."""
        out = []
        for r in range(ancestor.leaf_lo, node.leaf_lo):
            out.append(self.leaves[r].var)
        for r in range(node.leaf_hi + 1, ancestor.leaf_hi + 1):
            out.append(self.leaves[r].var)
        return out

    def vars_under(self, node: VtreeNode) -> list[int]:
        return [self.leaves[r].var for r in range(node.leaf_lo, node.leaf_hi + 1)]

    def structure(self):
        """Nested-pair shape, inverse of from_structure."""
        def walk(node):
            if node.is_leaf:
                return node.var
            return (walk(node.left), walk(node.right))
        return walk(self.root)

    def __eq__(self, other):
        return isinstance(other, Vtree) and self.structure() == other.structure()

    def __hash__(self):
        return hash(self.structure())

    # -- local moves (used by vtree minimization) ----------------------

    def with_rotate_left(self, node_id: int) -> "Vtree":
        """a=(x,(y,z)) becomes ((x,y),z); identity shape raises ValueError."""
        def rebuild(node):
            if node.is_leaf:
                return node.var
            if node.id == node_id:
                if node.right.is_leaf:
                    raise ValueError("rotate-left needs an internal right child")
                x = rebuild(node.left)
                y = rebuild(node.right.left)
                z = rebuild(node.right.right)
                return ((x, y), z)
            return (rebuild(node.left), rebuild(node.right))
        return Vtree.from_structure(rebuild(self.root))

    def with_rotate_right(self, node_id: int) -> "Vtree":
        """((x,y),z) becomes (x,(y,z))."""
        def rebuild(node):
            if node.is_leaf:
                return node.var
            if node.id == node_id:
                if node.left.is_leaf:
                    raise ValueError("rotate-right needs an internal left child")
                x = rebuild(node.left.left)
                y = rebuild(node.left.right)
                z = rebuild(node.right)
                return (x, (y, z))
            return (rebuild(node.left), rebuild(node.right))
        return Vtree.from_structure(rebuild(self.root))

    def with_swap(self, node_id: int) -> "Vtree":
        def rebuild(node):
            if node.is_leaf:
                return node.var
            l, r = rebuild(node.left), rebuild(node.right)
            if node.id == node_id:
                return (r, l)
            return (l, r)
        return Vtree.from_structure(rebuild(self.root))

    # -- serialization -------------------------------------------------

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    def dumps(self) -> str:
        lines = []
        def walk(node):
            if node.is_leaf:
                lines.append(f"L {node.id} {node.var}")
                return
            walk(node.left)
            walk(node.right)
            lines.append(f"I {node.id} {node.left.id} {node.right.id}")
        walk(self.root)
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, path) -> "Vtree":
        with open(path) as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text: str) -> "Vtree":
        by_id: dict[int, VtreeNode] = {}
        last = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "L":
                    node = cls._leaf(int(parts[2]))
                    by_id[int(parts[1])] = node
                elif parts[0] == "I":
                    node = cls._internal(by_id[int(parts[2])], by_id[int(parts[3])])
                    by_id[int(parts[1])] = node
                else:
                    raise ValueError(f"unknown record {parts[0]!r}")
            except (IndexError, KeyError, ValueError) as exc:
                raise ValueError(f"malformed vtree line {lineno}: {raw!r}") from exc
            last = node
        if last is None:
            raise ValueError("empty vtree file")
        return cls(last)
