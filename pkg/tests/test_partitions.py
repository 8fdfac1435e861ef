"""Partition enumeration against the Euler pentagonal recurrence."""

import pytest

from iombench.partitions import (
    Node,
    Partition,
    enumerate_pairs,
    enumerate_partitions,
    node_weight,
    nodes,
    partitions_up_to,
)


def pentagonal_counts(n_max: int) -> list[int]:
    """p(0..n_max) from the pentagonal-number recurrence, independent of the package."""
    p = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > n:
                break
            sign = -1 if k % 2 == 0 else 1
            total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


P = pentagonal_counts(40)


def test_counts_match_pentagonal_recurrence():
    for n in range(41):
        assert len(enumerate_partitions(n)) == P[n]


def test_partitions_are_valid_and_ordered():
    for n in range(12):
        parts_list = enumerate_partitions(n)
        assert len(set(parts_list)) == len(parts_list)
        for lam in parts_list:
            assert lam.size == n
            assert all(a >= b for a, b in zip(lam.parts, lam.parts[1:]))
        # reverse lexicographic: (n) first, all-ones last
        if n:
            assert parts_list[0].parts == (n,)
            assert parts_list[-1].parts == (1,) * n


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))
    with pytest.raises(ValueError):
        enumerate_partitions(-1)


def test_pair_counts():
    # |pairs(n)| = sum_k p(k) p(n-k)
    for n in range(9):
        expected = sum(P[k] * P[n - k] for k in range(n + 1))
        assert len(enumerate_pairs(n)) == expected
    assert len(enumerate_pairs(2)) == 5


def test_nodes_and_containment():
    lam = Partition((2, 1))
    assert nodes(lam) == [Node(1, 1), Node(1, 2), Node(2, 1)]
    assert lam.contains((1, 2))
    assert not lam.contains((2, 2))
    assert not lam.contains((0, 1))


def test_node_weight_exponents():
    q1, q3 = 0.7 + 0.1j, 1.3 - 0.2j
    assert node_weight(Node(1, 1), q1, q3) == 1.0
    assert node_weight(Node(3, 2), q1, q3) == pytest.approx(q3 ** 2 * q1)


def test_partitions_up_to_sizes_ascend():
    seen = list(partitions_up_to(6))
    sizes = [lam.size for lam in seen]
    assert sizes == sorted(sizes)
    assert len(seen) == sum(P[: 6 + 1])
