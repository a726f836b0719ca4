"""Clause-by-clause circuit compilation and vtree local search."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cnf import Cnf, VarMap
from .sdd import FALSE, TRUE, SddManager
from .vtree import Vtree


@dataclass
class CompileStats:
    seconds: float = 0.0
    clauses: int = 0
    size: int = 0                 # elements of the final circuit
    sums: int = 0                 # decision nodes
    products: int = 0             # elements (same as size)
    minimize_rounds: int = 0
    peak_size: int = 0
    history: list[int] = field(default_factory=list)


def clause_to_sdd(manager: SddManager, clause) -> int:
    node = FALSE
    for lit in clause:
        node = manager.disjoin(node, manager.literal(lit))
    return node


def compile_cnf(cnf: Cnf, initial_vtree: Vtree, minimize_budget: float = 0.0,
                size_trigger: float = 2.0,
                check_every: int = 16) -> tuple[SddManager, int, CompileStats]:
    """Conjoin all clauses bottom-up; returns (manager, root, stats).

    Clauses are conjoined in ascending width (ties by input order).  When a
    minimize budget is given, a local vtree search runs whenever the live
    size has grown past `size_trigger` times its value after the last
    search; with budget 0 compilation is fully deterministic.
    """
    stats = CompileStats(clauses=len(cnf.clauses))
    start = time.monotonic()
    manager = SddManager(initial_vtree)
    root = TRUE
    budget_left = minimize_budget
    last_search_size = None
    ordered = sorted(cnf.clauses, key=len)  # stable: input order within a width
    for i, clause in enumerate(ordered):
        root = manager.conjoin(root, clause_to_sdd(manager, clause))
        if root == FALSE:
            break
        if budget_left > 0 and (i + 1) % check_every == 0:
            live = manager.size(root)
            stats.peak_size = max(stats.peak_size, live)
            if last_search_size is None:
                last_search_size = live
            elif live > size_trigger * last_search_size:
                t0 = time.monotonic()
                manager, (root,), _ = minimize_vtree(manager, [root], budget_left)
                budget_left -= time.monotonic() - t0
                stats.minimize_rounds += 1
                last_search_size = manager.size(root)
            stats.history.append(live)
    if budget_left > 0 and root not in (TRUE, FALSE):
        t0 = time.monotonic()
        manager, (root,), improved = minimize_vtree(manager, [root], budget_left)
        if improved:
            stats.minimize_rounds += 1
    stats.size = manager.size(root)
    stats.sums, stats.products = manager.sums_and_products(root)
    stats.peak_size = max(stats.peak_size, stats.size)
    stats.seconds = time.monotonic() - start
    return manager, root, stats


def _rebuild_on(vtree: Vtree, manager: SddManager, roots, size_cap=None):
    """Reconstruct roots on a fresh manager over vtree; None if cap exceeded."""
    target = SddManager(vtree)
    memo: dict[int, int] = {}
    out = []
    for r in roots:
        try:
            out.append(_capped_rebuild(manager, target, r, memo, size_cap))
        except _SizeCapExceeded:
            return None, None
    return target, out


class _SizeCapExceeded(Exception):
    pass


def _capped_rebuild(src: SddManager, dst: SddManager, node: int,
                    memo: dict[int, int], size_cap) -> int:
    if node in (TRUE, FALSE):
        return node
    got = memo.get(node)
    if got is not None:
        return got
    if src.is_literal(node):
        res = dst.literal(src.literal_of(node))
    else:
        res = FALSE
        for p, s in src.elements(node):
            res = dst.disjoin(res, dst.conjoin(
                _capped_rebuild(src, dst, p, memo, size_cap),
                _capped_rebuild(src, dst, s, memo, size_cap)))
            if size_cap is not None and dst.node_count > size_cap:
                raise _SizeCapExceeded
    memo[node] = res
    return res


def minimize_vtree(manager: SddManager, roots: list[int], budget: float,
                   ) -> tuple[SddManager, list[int], bool]:
    """Greedy size-decreasing local search over rotate/swap vtree moves.

    Accepts a move only if the total live size strictly decreases; each
    candidate is evaluated by rebuilding the live roots on the moved vtree.
    Returns (manager, roots, improved); with budget <= 0 both are unchanged.
    """
    if budget <= 0:
        return manager, list(roots), False
    deadline = time.monotonic() + budget
    best_size = manager.size(*roots)
    improved_any = False
    while time.monotonic() < deadline:
        improved_this_pass = False
        for node in list(manager.vtree.nodes):
            if time.monotonic() >= deadline:
                break
            if node.is_leaf:
                continue
            candidates = []
            if not node.right.is_leaf:
                candidates.append(manager.vtree.with_rotate_left(node.id))
            if not node.left.is_leaf:
                candidates.append(manager.vtree.with_rotate_right(node.id))
            candidates.append(manager.vtree.with_swap(node.id))
            for cand in candidates:
                if time.monotonic() >= deadline:
                    break
                new_mgr, new_roots = _rebuild_on(
                    cand, manager, roots, size_cap=4 * manager.node_count + 10000)
                if new_mgr is None:
                    continue
                new_size = new_mgr.size(*new_roots)
                if new_size < best_size:
                    manager, roots, best_size = new_mgr, new_roots, new_size
                    improved_this_pass = improved_any = True
                    break
        if not improved_this_pass:
            break
    return manager, list(roots), improved_any


def sliced_vtree(vm: VarMap, style: str = "right") -> Vtree:
    """Linear vtree over the variable-map order (trellis-friendly for
    slice-major maps)."""
    variables = vm.variables_in_leaf_order()
    if style == "right":
        return Vtree.right_linear(variables)
    if style == "left":
        return Vtree.left_linear(variables)
    if style == "balanced":
        return Vtree.balanced(variables)
    raise ValueError(f"unknown vtree style {style!r}")
