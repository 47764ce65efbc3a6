"""Enumerate the ternary-quinary trees behind the Picard series.

Each tree indexes one multilinear term: 3-ary nodes are applications of the
cubic Duhamel operator, 5-ary nodes of the quintic one.  The script prints
the generation table, the per-leaf conjugation pattern of a mixed tree, and
the fitted exponential growth constant.
"""

from gdnls.trees import (
    count_trees,
    enumerate_trees,
    fitted_growth_constant,
    leaf_signature,
    tree_to_json,
)


def main():
    print("generation table |T^{3,5}(k, p)|:")
    print("      " + "".join(f"p={p:<8d}" for p in range(4)))
    for k in range(4):
        row = "".join(f"{count_trees(k, p):<10d}" for p in range(4))
        print(f"k={k}  {row}")

    print("\nthe 8 trees with one 3-ary and one 5-ary node:")
    for tree in enumerate_trees(1, 1):
        print(" ", tree_to_json(tree))

    tree = enumerate_trees(1, 1)[0]
    sig = leaf_signature(tree)
    print("\nleaf pattern of the first of them (c = conjugated, d = differentiated):")
    flags = [
        ("c" if c else "-") + ("d" if d else "-")
        for c, d in zip(sig.conjugated, sig.differentiated)
    ]
    print("  " + " ".join(flags))

    print(f"\nfitted growth constant (depth 6): C = {fitted_growth_constant(6):.3f}")
    print("so |T^{3,5}| summed over a level grows at most like C^level")


if __name__ == "__main__":
    main()
