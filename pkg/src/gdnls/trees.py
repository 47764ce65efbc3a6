"""Ordered rooted trees whose internal nodes have exactly 3 or 5 children.

Each such tree indexes one multilinear term of the Picard expansion: a
3-ary node stands for the cubic Duhamel operator (slot 3 conjugated and
differentiated), a 5-ary node for the quintic one (slots 2 and 4
conjugated).  Trees are planar: child order matters because the operator
slots are not interchangeable.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import ResourceError

DEFAULT_DEPTH_CAP = 4

__all__ = [
    "Tree",
    "TreeStats",
    "LeafSignature",
    "LEAF",
    "enumerate_trees",
    "count_trees",
    "tree_stats",
    "leaf_signature",
    "fitted_growth_constant",
    "tree_to_json",
    "tree_from_json",
]


@dataclass(frozen=True)
class Tree:
    """Ordered tree node; a leaf has no children, internal nodes have 3 or 5."""

    children: tuple["Tree", ...] = ()

    def __post_init__(self):
        if len(self.children) not in (0, 3, 5):
            raise ValueError(f"node must have 0, 3 or 5 children, got {len(self.children)}")

    @property
    def kind(self) -> str:
        return {0: "leaf", 3: "node3", 5: "node5"}[len(self.children)]

    @property
    def is_leaf(self) -> bool:
        return not self.children


LEAF = Tree()


@dataclass(frozen=True)
class TreeStats:
    n3: int
    n5: int
    total: int
    internal: int
    terminal: int


@dataclass(frozen=True)
class LeafSignature:
    """Per-leaf flags, in left-to-right leaf order.

    ``conjugated[i]`` is True when the i-th leaf argument enters the
    multilinear term complex-conjugated; ``differentiated[i]`` is True when
    the leaf sits directly in the differentiated third slot of a 3-ary node.
    """

    conjugated: tuple[bool, ...]
    differentiated: tuple[bool, ...]


def tree_stats(tree: Tree) -> TreeStats:
    n3 = n5 = 0
    stack = [tree]
    while stack:
        node = stack.pop()
        if len(node.children) == 3:
            n3 += 1
        elif len(node.children) == 5:
            n5 += 1
        stack.extend(node.children)
    return TreeStats(
        n3=n3,
        n5=n5,
        total=3 * n3 + 5 * n5 + 1,
        internal=n3 + n5,
        terminal=2 * n3 + 4 * n5 + 1,
    )


# Slots counted from 1: the cubic operator conjugates slot 3, the quintic
# operator conjugates slots 2 and 4.
_CONJ_SLOTS = {3: (False, False, True), 5: (False, True, False, True, False)}


def leaf_signature(tree: Tree) -> LeafSignature:
    conj: list[bool] = []
    deriv: list[bool] = []

    def walk(node: Tree, conjugated: bool) -> None:
        if node.is_leaf:
            conj.append(conjugated)
            deriv.append(False)
            return
        slots = _CONJ_SLOTS[len(node.children)]
        for i, (child, slot_conj) in enumerate(zip(node.children, slots)):
            child_conjugated = conjugated ^ slot_conj
            if child.is_leaf:
                conj.append(child_conjugated)
                deriv.append(len(node.children) == 3 and i == 2)
            else:
                walk(child, child_conjugated)

    walk(tree, False)
    return LeafSignature(conjugated=tuple(conj), differentiated=tuple(deriv))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of `parts` nonnegative ints summing to `total`,
    in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def enumerate_trees(k: int, p: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> list[Tree]:
    """Every ordered tree with exactly k 3-ary and p 5-ary internal nodes.

    Deterministic order: trees with a 3-ary root precede trees with a 5-ary
    root; within each arity, child generation splits are visited in
    lexicographic order.
    """
    if k < 0 or p < 0:
        raise ValueError("k and p must be nonnegative")
    if k + p > depth_cap:
        raise ResourceError(
            f"enumeration of generation (k={k}, p={p}) exceeds depth cap {depth_cap}"
        )
    return list(_enumerate(k, p))


@functools.lru_cache(maxsize=None)
def _enumerate(k: int, p: int) -> list[Tree]:
    if k == 0 and p == 0:
        return [LEAF]
    out: list[Tree] = []
    if k >= 1:
        for ks in _compositions(k - 1, 3):
            for ps in _compositions(p, 3):
                pools = [_enumerate(ki, pi) for ki, pi in zip(ks, ps)]
                for combo in itertools.product(*pools):
                    out.append(Tree(children=combo))
    if p >= 1:
        for ks in _compositions(k, 5):
            for ps in _compositions(p - 1, 5):
                pools = [_enumerate(ki, pi) for ki, pi in zip(ks, ps)]
                for combo in itertools.product(*pools):
                    out.append(Tree(children=combo))
    return out


@functools.lru_cache(maxsize=None)
def count_trees(k: int, p: int) -> int:
    """Number of ordered ternary-quinary trees in generation (k, p).

    Uses the root-split recursion with Python's arbitrary-precision
    integers, so no overflow is possible.
    """
    if k < 0 or p < 0:
        raise ValueError("k and p must be nonnegative")
    if k == 0 and p == 0:
        return 1
    total = 0
    if k >= 1:
        for ks in _compositions(k - 1, 3):
            for ps in _compositions(p, 3):
                prod = 1
                for ki, pi in zip(ks, ps):
                    prod *= count_trees(ki, pi)
                total += prod
    if p >= 1:
        for ks in _compositions(k, 5):
            for ps in _compositions(p - 1, 5):
                prod = 1
                for ki, pi in zip(ks, ps):
                    prod *= count_trees(ki, pi)
                total += prod
    return total


def fitted_growth_constant(depth_cap: int) -> float:
    """Smallest C with count_trees(k, p) <= C**(k+p) for all 1 <= k+p <= depth_cap."""
    best = 1.0
    for j in range(1, depth_cap + 1):
        for k in range(j + 1):
            c = count_trees(k, j - k) ** (1.0 / j)
            best = max(best, c)
    return best


def tree_to_json(tree: Tree) -> str:
    def encode(node: Tree) -> dict:
        d: dict = {"kind": node.kind}
        if node.children:
            d["children"] = [encode(c) for c in node.children]
        return d

    return json.dumps(encode(tree))


def tree_from_json(text: str) -> Tree:
    def decode(d: dict) -> Tree:
        children = tuple(decode(c) for c in d.get("children", ()))
        expected = {"leaf": 0, "node3": 3, "node5": 5}[d["kind"]]
        if len(children) != expected:
            raise ValueError(f"{d['kind']} node with {len(children)} children")
        return Tree(children=children)

    return decode(json.loads(text))
