import numpy as np
import pytest

from latnorm import (
    ConstructionError,
    FiberSpace,
    FiniteSet,
    Idempotent,
    ModuleVector,
    PartitionOfUnity,
    PointSet,
    StoneElement,
    cyclic_witness,
    defect,
    eq_idempotent,
    mix,
    mix_membership,
    verify_cyclic,
)
from latnorm.fixtures import random_fiber_space, random_finite_set

TOL = 1e-9


def rng_sets(seed, n_elems=3, **kw):
    rng = np.random.default_rng(seed)
    space = random_fiber_space(rng, **kw)
    return rng, space, random_finite_set(rng, space, n_elems)


class TestEqIdempotent:
    def test_reflexive(self):
        _, _, M = rng_sets(0)
        assert eq_idempotent(M[0], M[0]).is_one()

    def test_disjoint_supports(self):
        space = FiberSpace(PointSet.of_size(3), (1, 1, 1))
        x = ModuleVector(space, [np.array([1.0]), np.array([0.0]), np.array([0.0])])
        y = ModuleVector(space, [np.array([0.0]), np.array([2.0]), np.array([0.0])])
        eq = eq_idempotent(x, y)
        union = x.lattice_norm().support() | y.lattice_norm().support()
        assert eq == union.complement()

    def test_transitivity_on_random_triples(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            space = random_fiber_space(rng)
            xs = random_finite_set(rng, space, 3)
            # plant coincidences so the idempotents are not all trivial
            stacks = [s.copy() for s in xs.stacks]
            for w in range(space.n_points):
                if rng.random() < 0.5:
                    stacks[w][1] = stacks[w][0]
                if rng.random() < 0.5:
                    stacks[w][2] = stacks[w][1]
            xs = FiniteSet(space, stacks, 3)
            x, y, z = xs[0], xs[1], xs[2]
            assert eq_idempotent(x, y) == eq_idempotent(y, x)
            assert (eq_idempotent(x, y) & eq_idempotent(y, z)).le(
                eq_idempotent(x, z)
            )


class TestMix:
    def test_single_part(self):
        _, space, M = rng_sets(2)
        part = PartitionOfUnity([Idempotent.one(space.base)])
        out = mix(part, [M[0]])
        assert (out - M[0]).lattice_norm().sup_norm() == 0.0

    def test_constant_family(self):
        rng, space, M = rng_sets(3)
        mask = rng.random(space.n_points) < 0.5
        p = Idempotent(space.base, mask)
        out = mix(PartitionOfUnity([p, p.complement()]), [M[0], M[0]])
        assert (out - M[0]).lattice_norm().sup_norm() == 0.0

    def test_length_mismatch(self):
        _, space, M = rng_sets(4)
        part = PartitionOfUnity([Idempotent.one(space.base)])
        with pytest.raises(ValueError):
            mix(part, [M[0], M[1]])

    def test_distance_mixes(self):
        # |z - mix| equals the mixing of the individual distances
        rng, space, M = rng_sets(5, n_elems=4)
        z = random_finite_set(rng, space, 1)[0]
        assign = rng.integers(0, 3, size=space.n_points)
        parts = PartitionOfUnity(
            [Idempotent(space.base, assign == a) for a in range(3)]
        )
        glued = mix(parts, [M[0], M[1], M[2]])
        lhs = (z - glued).lattice_norm()
        rhs = StoneElement.zeros(space.base)
        for p, xa in zip(parts, [M[0], M[1], M[2]]):
            rhs = rhs + (z - xa).lattice_norm() * p
        assert lhs.eq(rhs, TOL)


class TestMixMembership:
    def test_element_itself(self):
        _, _, M = rng_sets(6)
        wit = mix_membership(M[1], M)
        assert wit is not None and wit.assignment == (1,)

    def test_recovers_constructed_mixing(self):
        rng, space, M = rng_sets(7, n_elems=2)
        mask = rng.random(space.n_points) < 0.5
        p = Idempotent(space.base, mask)
        glued = mix(PartitionOfUnity([p, p.complement()]), [M[0], M[1]])
        wit = mix_membership(glued, M)
        assert wit is not None
        rebuilt = mix(wit.partition, [M[i] for i in wit.assignment])
        assert (rebuilt - glued).lattice_norm().sup_norm() <= TOL

    def test_perturbation_refused(self):
        _, space, M = rng_sets(8)
        tol = 1e-9
        x = M[0].copy()
        x.fibers[0] = x.fibers[0] + 10 * tol
        assert mix_membership(x, M, tol) is None


class TestCyclic:
    def test_roundtrip_random(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            space = random_fiber_space(rng, max_points=4, max_dim=3)
            M = random_finite_set(rng, space, int(rng.integers(1, 6)))
            r = M.norm_sup().sup_norm() + 0.1
            for eps in (0.5, 0.1):
                w = cyclic_witness(M, eps, r)
                assert verify_cyclic(M, eps, w)
                for q, Fn in w.parts:
                    assert Fn.norm_sup().le(2 * r, TOL)

    def test_zero_defect_single_part(self):
        space = FiberSpace(PointSet.of_size(2), (1, 1))
        v = ModuleVector(space, [np.array([0.5]), np.array([0.5])])
        M = FiniteSet.from_vectors([v], space)
        w = cyclic_witness(M, eps=0.25, r=1.0)
        assert w.parts[0][0].is_one()
        assert verify_cyclic(M, 0.25, w)

    def test_halved_eps_fails_on_slack_witness(self):
        # two nearby elements: the one-element cover works at eps but the
        # same witness cannot survive a halved tolerance
        space = FiberSpace(PointSet.of_size(2), (1, 1))
        x = ModuleVector(space, [np.array([0.0]), np.array([0.0])])
        y = ModuleVector(space, [np.array([0.4]), np.array([0.4])])
        M = FiniteSet.from_vectors([x, y], space)
        w = cyclic_witness(M, eps=0.5, r=1.0)
        assert verify_cyclic(M, 0.5, w)
        assert len(w.parts[0][1]) == 1  # the size-1 candidate covered everything
        assert not verify_cyclic(M, 0.25, w)

    def test_empty_probe_vacuous(self):
        space = FiberSpace(PointSet.of_size(2), (1, 1))
        empty = FiniteSet(space, [np.zeros((0, 1), complex)] * 2, 0)
        w = cyclic_witness(
            FiniteSet.from_vectors([ModuleVector.zeros(space)], space), 0.5, 1.0
        )
        assert verify_cyclic(empty, 0.5, w)

    def test_unreachable_level_raises(self):
        space = FiberSpace(PointSet.of_size(2), (1, 1))
        v = ModuleVector(space, [np.array([5.0]), np.array([5.0])])
        M = FiniteSet.from_vectors([v], space)
        # radius too small: truncation empties the ball, defect stays at 5
        with pytest.raises(ConstructionError):
            cyclic_witness(M, eps=0.1, r=0.5)

    def test_localized_defect_bound(self):
        # a passing witness forces the localized defect below eps
        rng = np.random.default_rng(10)
        space = random_fiber_space(rng)
        M = random_finite_set(rng, space, 4)
        eps = 0.5
        w = cyclic_witness(M, eps, M.norm_sup().sup_norm() + 0.1)
        assert verify_cyclic(M, eps, w)
        for q, Fn in w.parts:
            if q.is_zero():
                continue
            assert (defect(M, Fn).value * q).le(eps, TOL)


def test_defect_is_mix_invariant():
    rng = np.random.default_rng(11)
    for _ in range(30):
        space = random_fiber_space(rng)
        M = random_finite_set(rng, space, 3)
        F = random_finite_set(rng, space, 2)
        base_val = defect(M, F).value
        mixes = []
        for _ in range(5):
            assign = rng.integers(0, 3, size=space.n_points)
            parts = PartitionOfUnity(
                [Idempotent(space.base, assign == a) for a in range(3)]
            )
            mixes.append(mix(parts, [M[0], M[1], M[2]]))
        enlarged = FiniteSet.from_vectors(list(M) + mixes, space)
        assert defect(enlarged, F).value.eq(base_val, TOL)
