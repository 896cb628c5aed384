"""Gluing module elements along partitions of unity.

The boolean-valued equality ``[[x = y]]`` (complement of the support of
|x - y|) makes every fiberwise module a set with boolean-algebra-valued
equality; a mixing glues a family of elements along a partition of unity.
Relative cyclic compactness of a set is certified by a countable partition
(q_n) and finite sets F_n whose mixings epsilon-approximate every element
on the corresponding component; at finite scale the constructive existence
argument (greedy witness chain plus exhaustion) is executable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, DimensionMismatchError
from .stone import (
    DEFAULT_TOL,
    Idempotent,
    PartitionOfUnity,
    exhaustion,
)
from .fibered import FiniteSet, ModuleVector, defect, greedy_order, truncate_to_ball


def eq_idempotent(
    x: ModuleVector, y: ModuleVector, tol: float = DEFAULT_TOL
) -> Idempotent:
    """Boolean-valued equality: the component where x and y agree within tol."""
    return (x - y).lattice_norm().support(tol).complement()


def mix(partition: PartitionOfUnity, family: list[ModuleVector]) -> ModuleVector:
    """Glue the family along the partition: take x_a on the part p_a."""
    if len(family) != len(partition):
        raise ValueError(
            f"family size {len(family)} != partition size {len(partition)}"
        )
    space = family[0].space
    if partition.base != space.base:
        raise DimensionMismatchError("partition on a different point set")
    out = ModuleVector.zeros(space)
    for p, x in zip(partition, family):
        if x.space != space:
            raise DimensionMismatchError("family members on different fiber spaces")
        out = out + p * x
    return out


@dataclass
class MixWitness:
    """Certificate that a vector is a mixing of a family.

    ``assignment[a]`` indexes the family member selected on part a.
    """

    partition: PartitionOfUnity
    assignment: tuple[int, ...]


def mix_membership(
    x: ModuleVector, M: FiniteSet, tol: float = DEFAULT_TOL
) -> MixWitness | None:
    """Exhibit x as a mixing of elements of M, or report that none exists.

    Fiberwise characterization: a witness exists iff at every point some
    element of M matches x within tol; the lowest such index is chosen.
    """
    if x.space != M.space:
        raise DimensionMismatchError("vector and set on different fiber spaces")
    n_pts = x.space.n_points
    pick = np.full(n_pts, -1, dtype=int)
    for w in range(n_pts):
        dists = np.linalg.norm(M.stacks[w] - x.fibers[w][None, :], axis=1)
        hits = np.nonzero(dists <= tol)[0]
        if hits.size == 0:
            return None
        pick[w] = int(hits[0])
    used = sorted(set(pick.tolist()))
    parts = [Idempotent(x.space.base, pick == j) for j in used]
    return MixWitness(PartitionOfUnity(parts), tuple(used))


@dataclass
class CyclicWitness:
    """Partition (q_n) with finite sets F_n whose mixings approximate a set."""

    parts: list[tuple[Idempotent, FiniteSet]]
    epsilon: float

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "parts": [
                {
                    "mask": q.mask.astype(int).tolist(),
                    "set_size": len(F),
                    "set": [
                        [f.tolist() for f in F[i].fibers] for i in range(len(F))
                    ],
                }
                for q, F in self.parts
            ],
        }


def cyclic_witness(
    M: FiniteSet, eps: float, r: float, tol: float = DEFAULT_TOL
) -> CyclicWitness:
    """Constructive cyclic-compactness witness for a finite set.

    Candidates are the greedy order-boundedness witness prefixes of M after
    truncation to the ball of radius 2r, taken at every size 1..|M|; the
    exhaustion principle (first fit, ascending cardinality) assigns each
    point to the smallest candidate already eps-covering it there, and the
    per-cardinality generators are glued along that partition.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if len(M) == 0:
        raise ValueError("cyclic witness needs a nonempty set")
    truncated = truncate_to_ball(M, r, tol)
    order = greedy_order(truncated)
    order_sets = [truncated.subset(order[:n]) for n in range(1, len(order) + 1)]

    covers = []
    for F in order_sets:
        u = defect(M, F).value
        covers.append(Idempotent(M.space.base, u.values <= eps + tol))
    total = covers[0]
    for c in covers[1:]:
        total = total | c
    if not total.is_one():
        raise ConstructionError(
            f"no candidate of size <= {len(M)} reaches defect <= {eps} "
            "everywhere; the set is not order-precompact at this level over "
            "the truncation ball"
        )
    partition = exhaustion(covers)
    parts = []
    for p, F in zip(partition, order_sets):
        glued = FiniteSet(
            F.space,
            [s * p.mask[w] for w, s in enumerate(F.stacks)],
            len(F),
        )
        parts.append((p, glued))
    return CyclicWitness(parts, eps)


def verify_cyclic(
    M: FiniteSet, eps: float, w: CyclicWitness, tol: float = DEFAULT_TOL
) -> bool:
    """Check a cyclic-compactness witness against every element of M.

    For each element x and each part (q_n, F_n) the fiberwise nearest
    selection z_n from F_n is a mixing of F_n, and the check is
    q_n |x - z_n| <= eps pointwise, which simultaneously bounds
    q_n inf_{y in F_n} |x - y|.
    """
    if len(M) == 0:
        return True
    PartitionOfUnity([q for q, _ in w.parts])  # validates the masks
    for q, F in w.parts:
        if q.is_zero():
            continue
        if len(F) == 0:
            return False
        localized = defect(M, F).value * q
        if not localized.le(eps, tol):
            return False
    return True
