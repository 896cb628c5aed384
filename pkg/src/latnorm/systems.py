"""Finite measure-preserving systems, group actions, and extensions.

Dynamics are measure-preserving point permutations acting by composition
(Koopman operators); an extension is a factor map intertwining two such
systems. The conditional expectation averages over factor fibers, and the
relative inner product/norm turn the upstairs function space into a
fiberwise module over the downstairs algebra via ``RelModule.encode``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    CapExceededError,
    DimensionMismatchError,
    UnknownGroupElementError,
)
from .fibered import FiberSpace, ModuleVector
from .stone import DEFAULT_TOL, PointSet, StoneElement


class FiniteProbabilitySpace:
    """Finite point set with strictly positive weights summing to one."""

    __slots__ = ("labels", "weights")

    def __init__(self, labels, weights, tol: float = DEFAULT_TOL):
        labels = tuple(str(l) for l in labels)
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(labels),):
            raise ValueError("one weight per point required")
        if len(set(labels)) != len(labels):
            raise ValueError("point labels must be distinct")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(float(np.sum(weights)) - 1.0) > max(tol, 1e-9):
            raise ValueError(f"weights sum to {float(np.sum(weights))}, not 1")
        self.labels = labels
        self.weights = weights

    @property
    def size(self) -> int:
        return len(self.labels)

    def point_set(self) -> PointSet:
        return PointSet(self.labels)

    def integral(self, f: np.ndarray) -> complex:
        return complex(np.sum(np.asarray(f) * self.weights))

    def inner(self, f, g) -> complex:
        """Weighted L2 inner product, linear in the first argument."""
        f = np.asarray(f, dtype=complex)
        g = np.asarray(g, dtype=complex)
        return complex(np.sum(f * np.conj(g) * self.weights))

    def norm2(self, f) -> float:
        return float(np.sqrt(max(self.inner(f, f).real, 0.0)))

    def __eq__(self, other):
        return (
            isinstance(other, FiniteProbabilitySpace)
            and self.labels == other.labels
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.labels, self.weights.tobytes()))


class MPMap:
    """Invertible point map of a finite space, stored as an image array."""

    __slots__ = ("perm",)

    def __init__(self, perm: Sequence[int]):
        perm = np.asarray(perm, dtype=int)
        n = perm.shape[0]
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError(f"{perm.tolist()} is not a permutation")
        self.perm = perm

    def __len__(self):
        return len(self.perm)

    def inverse(self) -> "MPMap":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(len(self.perm))
        return MPMap(inv)

    def compose(self, other: "MPMap") -> "MPMap":
        """self after other: (self . other)(i) = self(other(i))."""
        return MPMap(self.perm[other.perm])

    def preserves(self, space: FiniteProbabilitySpace, tol: float = DEFAULT_TOL) -> bool:
        if len(self.perm) != space.size:
            return False
        return bool(np.all(np.abs(space.weights[self.perm] - space.weights) <= tol))

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(i) for i in self.perm)


def enumerate_group(
    gens: Sequence[MPMap], cap: int = 10**5
) -> tuple[tuple[int, ...], ...]:
    """Closure of the generators under composition and inversion.

    Breadth-first from the identity, scanning known elements and generators
    in order, so the enumeration is deterministic. Raises once the closure
    would exceed ``cap``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not gens:
        raise ValueError("need at least one generator")
    n = len(gens[0])
    steps = []
    for g in gens:
        if len(g) != n:
            raise DimensionMismatchError("generators act on different point counts")
        steps.append(g)
        steps.append(g.inverse())
    identity = MPMap(np.arange(n))
    closure = [identity.as_tuple()]
    seen = {closure[0]}
    frontier = [identity]
    while frontier:
        new_frontier = []
        for el in frontier:
            for s in steps:
                nxt = s.compose(el)
                key = nxt.as_tuple()
                if key not in seen:
                    if len(seen) + 1 > cap:
                        raise CapExceededError(
                            f"group closure exceeds cap {cap}"
                        )
                    seen.add(key)
                    closure.append(key)
                    new_frontier.append(nxt)
        frontier = new_frontier
    return tuple(closure)


class GroupAction:
    """Enumerated permutation action on a finite probability space."""

    def __init__(
        self,
        space: FiniteProbabilitySpace,
        generators: Sequence[MPMap],
        cap: int = 10**5,
    ):
        self.space = space
        self.generators = tuple(generators)
        for g in self.generators:
            if len(g) != space.size:
                raise DimensionMismatchError("generator size mismatch")
        self.cap = cap
        self.closure = enumerate_group(self.generators, cap)
        self._members = frozenset(self.closure)

    def __len__(self):
        return len(self.closure)

    def contains(self, t) -> bool:
        return _as_perm_tuple(t) in self._members

    def koopman(self, t, f: np.ndarray) -> np.ndarray:
        """Composition operator: (T_t f)(x) = f(t^{-1} x)."""
        perm = _as_perm_tuple(t)
        if perm not in self._members:
            raise UnknownGroupElementError(f"{perm} not in the enumerated closure")
        f = np.asarray(f, dtype=complex)
        out = np.empty_like(f)
        out[np.asarray(perm)] = f
        return out


def _as_perm_tuple(t) -> tuple[int, ...]:
    if isinstance(t, MPMap):
        return t.as_tuple()
    return tuple(int(i) for i in t)


@dataclass
class ValidationReport:
    valid: bool
    violations: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations)}


class Extension:
    """Two intertwined systems with a factor map from the big one down.

    ``factor[x]`` is the index of the downstairs point below upstairs point
    x; generator i upstairs is paired with generator i downstairs. The
    downstairs image of any closure element is derived through the factor
    map, so the two actions stay consistently paired.
    """

    def __init__(
        self,
        upstairs: FiniteProbabilitySpace,
        upstairs_gens: Sequence[MPMap],
        downstairs: FiniteProbabilitySpace,
        downstairs_gens: Sequence[MPMap],
        factor: Sequence[int],
        cap: int = 10**5,
    ):
        if len(upstairs_gens) != len(downstairs_gens):
            raise ValueError("generator lists must be paired")
        self.upstairs = upstairs
        self.downstairs = downstairs
        self.upstairs_gens = tuple(upstairs_gens)
        self.downstairs_gens = tuple(downstairs_gens)
        self.factor = np.asarray(factor, dtype=int)
        if self.factor.shape != (upstairs.size,):
            raise ValueError("factor map needs one image per upstairs point")
        if np.any(self.factor < 0) or np.any(self.factor >= downstairs.size):
            raise ValueError("factor map image out of range")
        self.cap = cap
        self._action = None

    @property
    def action(self) -> GroupAction:
        if self._action is None:
            self._action = GroupAction(self.upstairs, self.upstairs_gens, self.cap)
        return self._action

    def downstairs_perm(self, t) -> np.ndarray:
        """Downstairs image of an upstairs closure element."""
        perm = np.asarray(_as_perm_tuple(t), dtype=int)
        sigma = np.full(self.downstairs.size, -1, dtype=int)
        sigma[self.factor] = self.factor[perm]
        if np.any(sigma < 0):
            raise ValueError("factor map is not surjective")
        return sigma

    def koopman_y(self, t, g: np.ndarray) -> np.ndarray:
        """Downstairs composition operator paired with upstairs t."""
        sigma = self.downstairs_perm(t)
        g = np.asarray(g, dtype=complex)
        out = np.empty_like(g)
        out[sigma] = g
        return out

    def fibers(self) -> list[np.ndarray]:
        """Upstairs indices over each downstairs point, in point order."""
        return [
            np.nonzero(self.factor == y)[0] for y in range(self.downstairs.size)
        ]


def validate_extension(ext: Extension, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Diagnostic check of measure preservation, pushforward and intertwining."""
    violations = []
    for i, g in enumerate(ext.upstairs_gens):
        if len(g) != ext.upstairs.size:
            violations.append(f"upstairs generator {i} has wrong size")
        elif not g.preserves(ext.upstairs, tol):
            violations.append(f"upstairs generator {i} does not preserve the measure")
    for i, g in enumerate(ext.downstairs_gens):
        if len(g) != ext.downstairs.size:
            violations.append(f"downstairs generator {i} has wrong size")
        elif not g.preserves(ext.downstairs, tol):
            violations.append(
                f"downstairs generator {i} does not preserve the measure"
            )
    push = np.zeros(ext.downstairs.size)
    np.add.at(push, ext.factor, ext.upstairs.weights)
    for y in range(ext.downstairs.size):
        if abs(push[y] - ext.downstairs.weights[y]) > tol:
            violations.append(
                f"pushforward mass {push[y]:.12g} at point "
                f"{ext.downstairs.labels[y]} != weight "
                f"{ext.downstairs.weights[y]:.12g}"
            )
    empty = [
        ext.downstairs.labels[y]
        for y in range(ext.downstairs.size)
        if not np.any(ext.factor == y)
    ]
    if empty:
        violations.append(f"empty fibers over {empty}")
    for i, (tau, sigma) in enumerate(zip(ext.upstairs_gens, ext.downstairs_gens)):
        if len(tau) != ext.upstairs.size or len(sigma) != ext.downstairs.size:
            continue
        lhs = ext.factor[tau.perm]
        rhs = sigma.perm[ext.factor]
        if not np.array_equal(lhs, rhs):
            violations.append(f"generator pair {i} does not intertwine the factor map")
    return ValidationReport(valid=not violations, violations=violations)


def cond_expectation(f: np.ndarray, ext: Extension) -> np.ndarray:
    """Average f over each factor fiber, weighted by conditional mass."""
    f = np.asarray(f, dtype=complex)
    num = np.zeros(ext.downstairs.size, dtype=complex)
    np.add.at(num, ext.factor, f * ext.upstairs.weights)
    return num / ext.downstairs.weights


def embed_J(g: np.ndarray, ext: Extension) -> np.ndarray:
    """Lift a downstairs function to a fiberwise-constant upstairs one."""
    return np.asarray(g, dtype=complex)[ext.factor]


def rel_inner(f: np.ndarray, g: np.ndarray, ext: Extension) -> np.ndarray:
    """Fiberwise inner product with values downstairs."""
    return cond_expectation(np.asarray(f, dtype=complex) * np.conj(g), ext)


def rel_norm(f: np.ndarray, ext: Extension) -> StoneElement:
    """Fiberwise norm of an upstairs function, as a downstairs element."""
    vals = np.real(rel_inner(f, f, ext))
    return StoneElement(ext.downstairs.point_set(), np.sqrt(np.maximum(vals, 0.0)))


class RelModule:
    """Fiberwise module picture of the upstairs function space.

    The fiber over a downstairs point lists its preimage points in order;
    ``encode`` rescales by the square root of the conditional weights so
    the Euclidean fiber norm of the encoded vector equals the relative
    norm of the function.
    """

    def __init__(self, ext: Extension):
        report = validate_extension(ext)
        if not report.valid:
            raise ValueError(
                "invalid extension: " + "; ".join(report.violations)
            )
        self.ext = ext
        self.fiber_points = ext.fibers()
        dims = tuple(len(p) for p in self.fiber_points)
        self.space = FiberSpace(ext.downstairs.point_set(), dims)
        self.sqrt_weights = [
            np.sqrt(ext.upstairs.weights[pts] / ext.downstairs.weights[y])
            for y, pts in enumerate(self.fiber_points)
        ]

    def encode(self, f: np.ndarray) -> ModuleVector:
        f = np.asarray(f, dtype=complex)
        fibers = [
            f[pts] * sw for pts, sw in zip(self.fiber_points, self.sqrt_weights)
        ]
        return ModuleVector(self.space, fibers)

    def decode(self, v: ModuleVector) -> np.ndarray:
        out = np.zeros(self.ext.upstairs.size, dtype=complex)
        for pts, sw, fib in zip(self.fiber_points, self.sqrt_weights, v.fibers):
            out[pts] = fib / sw
        return out


def as_rel_module(ext: Extension) -> RelModule:
    return RelModule(ext)
