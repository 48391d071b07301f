"""Seeded verification corpora for the block form, the CZ engine and parity.

Each trial draws from its own child of ``SeedSequence(seed)``, so results do
not depend on how trials are distributed over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .bundles import CONVERGENCE_TOL, compute_unstable, holonomy_sign, random_hyperbolic_cocycle
from .czindex import (
    cz_index,
    direct_sum_path,
    hyperbolic_path,
    iterate_path,
    negative_hyperbolic_path,
    rotation_path,
)
from .symplin import (
    DEGENERACY_TOL,
    DET_REL_TOL,
    Parity,
    det_chain_check,
    det_sign_parity,
    make_lagrangian_invariant,
    random_lagrangian_invariant,
)

NONDEGENERATE_MIN = 1e-6
MAX_ITERATE = 10
HYPERBOLIC_CORPUS = 4
RATE_RANGE = (0.2, 2.0)


@dataclass(frozen=True)
class CheckRow:
    check: str
    trials: int
    passed: int
    worst: float     # largest defect seen, 0 for exact checks

    @property
    def ok(self):
        return self.passed == self.trials


def _rngs(seed, n, salt):
    root = np.random.SeedSequence([int(seed) & (2 ** 64 - 1), salt])
    return root.spawn(n)


def blockform_sample(rng):
    """Random Lagrangian-invariant ``P`` with ``|det(I - P)| > 1e-6``, m in {1, 2, 3}."""
    m = int(rng.integers(1, 4))
    while True:
        A, S = random_lagrangian_invariant(rng, m)
        P = make_lagrangian_invariant(A, S).entries
        if abs(np.linalg.det(np.eye(2 * m) - P)) > NONDEGENERATE_MIN:
            E = np.vstack([np.eye(m), np.zeros((m, m))])
            return P, E, A


def _blockform_job(args):
    seq, tol, degeneracy_tol = args
    P, E, A = blockform_sample(np.random.default_rng(seq))
    defect = det_chain_check(P, E, degeneracy_tol)
    even = det_sign_parity(P, degeneracy_tol) == Parity.EVEN
    return defect, defect <= tol, even == (np.linalg.det(A) > 0)


def verify_blockform(trials, seed, workers=None, tol=DET_REL_TOL, degeneracy_tol=DEGENERACY_TOL):
    out = pmap(_blockform_job, [(s, tol, degeneracy_tol) for s in _rngs(seed, trials, 1)], workers)
    return [
        CheckRow("det_chain", trials, int(sum(ok for _, ok, _ in out)), max((d for d, _, _ in out), default=0.0)),
        CheckRow("parity_vs_det_A", trials, int(sum(p for _, _, p in out)), 0.0),
    ]


def rotation_sample(rng):
    while True:
        theta = float(rng.uniform(0.0, 5.0))
        if theta != math.floor(theta):
            return theta


def _rotation_job(args):
    seq, degeneracy_tol = args
    theta = rotation_sample(np.random.default_rng(seq))
    return cz_index(rotation_path(theta), degeneracy_tol).index == 2 * math.floor(theta) + 1


def hyperbolic_corpus_path(kind, rng):
    """Hyperbolic paths whose iterates have index ``j`` times the simple index.

    ``kind`` cycles through negative, positive, and their 4-d direct sum.
    """
    a, b = (float(x) for x in rng.uniform(*RATE_RANGE, size=2))
    if kind % 3 == 0:
        return negative_hyperbolic_path(a)
    if kind % 3 == 1:
        return hyperbolic_path(a)
    return direct_sum_path(negative_hyperbolic_path(a), hyperbolic_path(b))


def _iteration_job(args):
    kind, seq, degeneracy_tol = args
    path = hyperbolic_corpus_path(kind, np.random.default_rng(seq))
    base = cz_index(path, degeneracy_tol).index
    return all(cz_index(iterate_path(path, j), degeneracy_tol).index == j * base
               for j in range(2, MAX_ITERATE + 1))


def verify_cz(trials, seed, workers=None, degeneracy_tol=DEGENERACY_TOL, corpus=HYPERBOLIC_CORPUS):
    rot = pmap(_rotation_job, [(s, degeneracy_tol) for s in _rngs(seed, trials, 2)], workers)
    it = pmap(_iteration_job,
              [(k, s, degeneracy_tol) for k, s in enumerate(_rngs(seed, corpus, 3))], workers)
    return [
        CheckRow("rotation_index", trials, int(sum(rot)), 0.0),
        CheckRow("hyperbolic_iteration", corpus, int(sum(it)), 0.0),
    ]


def _parity_job(args):
    seq, tol = args
    rng = np.random.default_rng(seq)
    m = int(rng.integers(1, 4))
    cocycle, A = random_hyperbolic_cocycle(rng, m)
    sign = holonomy_sign(compute_unstable(cocycle, tol=tol))
    even = det_sign_parity(cocycle.product()) == Parity.EVEN
    return even == (sign == 1), even == (np.linalg.det(A) > 0)


def verify_parity(trials, seed, workers=None, tol=CONVERGENCE_TOL):
    out = pmap(_parity_job, [(s, tol) for s in _rngs(seed, trials, 4)], workers)
    return [
        CheckRow("parity_vs_holonomy", trials, int(sum(a for a, _ in out)), 0.0),
        CheckRow("parity_vs_det_A", trials, int(sum(b for _, b in out)), 0.0),
    ]
