"""Truncated bounded-sequence model separating the two precompactness notions.

The model is a window of length N into the space of bounded Hilbert-space
valued sequences: points 1..N plus one designated tail coordinate, every
fiber of dimension N. The probe set consists of the single-coordinate
indicators 1_{k} (x) e_j for j <= k <= N; the nets F_n = {0, 1 (x) e_1, ...,
1 (x) e_n} drive the pointwise defect to zero on growing prefixes while any
finite candidate set of size d < N keeps a sup-norm defect of at least
sqrt(2)/2 somewhere beyond coordinate d. With the dyadic weights
mu({k}) = 2^{-k} the model also demonstrates trading mass for uniformity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleTruncationError
from .fibered import FiberSpace, FiniteSet, defect
from .stone import DEFAULT_TOL, Idempotent, PointSet, StoneElement

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TruncatedSeqSpace:
    """Length-N window with a tail coordinate; every fiber is C^N."""

    n: int
    fiber_space: FiberSpace

    @staticmethod
    def build(n: int) -> "TruncatedSeqSpace":
        if n < 2:
            raise ValueError("need a prefix of length >= 2")
        labels = tuple(str(k) for k in range(1, n + 1)) + ("tail",)
        return TruncatedSeqSpace(n, FiberSpace(PointSet(labels), (n,) * (n + 1)))

    def weights(self) -> np.ndarray:
        """Dyadic weights 2^{-k} on the prefix, remainder mass on the tail."""
        w = np.array([2.0 ** -k for k in range(1, self.n + 1)] + [2.0 ** -self.n])
        return w

    def basis_vector(self, j: int) -> np.ndarray:
        """e_j (1-based) in the fiber."""
        e = np.zeros(self.n, dtype=complex)
        e[j - 1] = 1.0
        return e


def build_counterexample(n: int) -> tuple[TruncatedSeqSpace, FiniteSet, list[FiniteSet]]:
    """Probe set M and net chain F_1..F_n of the truncated model.

    M holds 1_{k} (x) e_j for 1 <= j <= k <= n (zero tail); F_m holds the
    zero element and the constants 1 (x) e_l for l <= m (zero tail).
    """
    space = TruncatedSeqSpace.build(n)
    fs = space.fiber_space
    n_pts = fs.n_points

    m_rows = []
    for k in range(1, n + 1):
        for j in range(1, k + 1):
            m_rows.append((k, j))
    m_stacks = []
    for w in range(n_pts):
        s = np.zeros((len(m_rows), n), dtype=complex)
        for i, (k, j) in enumerate(m_rows):
            if w == k - 1:
                s[i, j - 1] = 1.0
        m_stacks.append(s)
    M = FiniteSet(fs, m_stacks, len(m_rows))

    nets = []
    for m in range(1, n + 1):
        rows = m + 1  # zero element plus the first m constants
        stacks = []
        for w in range(n_pts):
            s = np.zeros((rows, n), dtype=complex)
            if w < n:  # constants vanish on the tail coordinate
                for l in range(1, m + 1):
                    s[l, l - 1] = 1.0
            stacks.append(s)
        nets.append(FiniteSet(fs, stacks, rows))
    return space, M, nets


def verify_tob_bound(
    n: int, m: int, tol: float = DEFAULT_TOL
) -> tuple[bool, StoneElement]:
    """Defect of the probe set against F_m: zero on 1..m, at most sqrt(2) after."""
    if not 1 <= m <= n:
        raise ValueError("net index out of range")
    _, M, nets = build_counterexample(n)
    value = defect(M, nets[m - 1]).value
    ok = bool(
        np.all(value.values[:m] <= tol) and np.all(value.values <= SQRT2 + tol)
    )
    return ok, value


def verify_not_utob(
    n: int, F: FiniteSet | None, tol: float = DEFAULT_TOL
) -> tuple[int, int]:
    """Exhibit the uniform failure against an arbitrary candidate set.

    For |F| = d < n there are a coordinate index n0 > d and a basis index
    i <= n0 whose indicator stays at distance >= sqrt(2)/2 from every
    candidate at coordinate n0; counting the basis vectors against the d
    balls of radius sqrt(2)/2 guarantees one exists. Returns (i, n0),
    1-based.
    """
    space = TruncatedSeqSpace.build(n)
    if F is None or len(F) == 0:
        F = _zero_set(space)
        d = 0
    else:
        if F.space != space.fiber_space:
            raise ValueError("candidate set lives on a different truncation")
        d = len(F)
    if d >= n:
        raise ValueError("candidate set must be smaller than the prefix length")
    for n0 in range(d + 1, n + 1):
        cand = F.stacks[n0 - 1]  # (d, n) fiber values at coordinate n0
        for i in range(1, n0 + 1):
            e = space.basis_vector(i)
            dist = float(np.min(np.linalg.norm(cand - e[None, :], axis=1)))
            if dist >= SQRT2 / 2.0 - tol:
                return i, n0
    raise RuntimeError(
        "no pigeonhole witness found; the truncated model is inconsistent"
    )


def _zero_set(space: TruncatedSeqSpace) -> FiniteSet:
    fs = space.fiber_space
    return FiniteSet(fs, [np.zeros((1, d), dtype=complex) for d in fs.dims], 1)


@dataclass
class EgoroffDemo:
    """Localization of the weighted model at a mass budget."""

    m: int
    kept: Idempotent
    removed_mass: float
    masked_set: FiniteSet
    witness: FiniteSet
    defect_value: StoneElement

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "kept": self.kept.mask.astype(int).tolist(),
            "removed_mass": self.removed_mass,
            "witness_size": len(self.witness),
            "max_defect_on_kept": float(
                np.max(self.defect_value.values[self.kept.mask])
            )
            if np.any(self.kept.mask)
            else 0.0,
        }


def egoroff_demo(n: int, delta: float, tol: float = DEFAULT_TOL) -> EgoroffDemo:
    """Cut the model down to a prefix whose complement mass fits the budget.

    Keeps A = {1..m} for the smallest m with 2^{-m} <= delta; the cut probe
    set 1_A M is then uniformly totally order-bounded at every level, with
    witness 1_A F_m of defect zero. Budgets below the tail mass 2^{-n} are
    not representable at this truncation.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    space, M, nets = build_counterexample(n)
    m = 0
    while 2.0 ** -m > delta:
        m += 1
        if m > n:
            raise InfeasibleTruncationError(
                f"budget {delta} is below the tail mass {2.0 ** -n} of the "
                f"length-{n} truncation"
            )
    base = space.fiber_space.base
    mask = np.zeros(base.size, dtype=bool)
    mask[:m] = True
    kept = Idempotent(base, mask)
    removed_mass = float(np.sum(space.weights()[~mask]))

    masked_set = FiniteSet(
        M.space, [s * mask[w] for w, s in enumerate(M.stacks)], len(M)
    )
    net = nets[m - 1] if m >= 1 else _zero_set(space)
    witness = FiniteSet(
        net.space, [s * mask[w] for w, s in enumerate(net.stacks)], len(net)
    )
    value = defect(masked_set, witness).value
    return EgoroffDemo(m, kept, removed_mass, masked_set, witness, value)
