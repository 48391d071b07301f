"""Invariant Lagrangian subbundles along closed orbits.

A closed orbit is sampled as a cocycle ``M_0, ..., M_{L-1}`` of symplectic
matrices.  The unstable bundle is found by power iteration with QR
re-orthonormalisation at every step, and orientability along the orbit is
read off from the sign of the once-around transition determinant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.stats import ortho_group

from ._parallel import pmap
from .errors import HyperbolicityError, IsotropyError, ValidationError
from .records import CensusTable
from .symplin import MAX_CONDITION, Parity, det_sign_parity, make_lagrangian_invariant, standard_j

MAX_ITERATIONS = 200
CONVERGENCE_TOL = 1e-10
ISOTROPY_TOL = 1e-8
INVARIANCE_TOL = 1e-8
POLISH_SWEEPS = 2


@dataclass(frozen=True)
class CocycleSample:
    steps: tuple
    closed: bool = True

    def __post_init__(self):
        steps = tuple(np.asarray(s, dtype=float) for s in self.steps)
        if not steps:
            raise ValidationError("cocycle needs at least one step")
        dim = steps[0].shape
        if any(s.shape != dim for s in steps) or dim[0] != dim[1] or dim[0] % 2:
            raise ValidationError("cocycle steps must share one even square shape")
        object.__setattr__(self, "steps", steps)

    @property
    def dim(self):
        return self.steps[0].shape[0]

    def product(self):
        P = np.eye(self.dim)
        for M in self.steps:
            P = M @ P
        return P


@dataclass(frozen=True)
class BundleSample:
    frames: tuple       # frame over the base point of each step
    transitions: tuple  # G_i with M_i F_i = F_{i+1} G_i
    defect: float
    closed: bool = True


def _largest_angle_sine(Q1, Q2):
    # sine of the largest principal angle between orthonormal frames
    return float(np.linalg.norm(Q1 - Q2 @ (Q2.T @ Q1), 2))


def _orthonormal(X):
    Q, _ = np.linalg.qr(X)
    return Q


def _check_hyperbolic(cocycle, tol):
    P = cocycle.product()
    if cocycle.closed:
        moduli = np.abs(np.linalg.eigvals(P))
    else:
        moduli = np.linalg.svd(P, compute_uv=False)
    m = cocycle.dim // 2
    moduli = np.sort(moduli)[::-1]
    if not (moduli[m - 1] > 1 + tol and moduli[m] < 1 - tol):
        raise HyperbolicityError(
            f"no dominated splitting: moduli {moduli[m - 1]:.6g} and {moduli[m]:.6g} straddle 1"
        )


def compute_unstable(cocycle, iterations=MAX_ITERATIONS, tol=CONVERGENCE_TOL):
    """Frames of the expanding Lagrangian subbundle along the cocycle.

    Raises
    ------
    HyperbolicityError
        The product has spectrum too close to the unit circle, or the
        principal-angle defect is still above ``tol`` after ``iterations``
        sweeps.
    """
    _check_hyperbolic(cocycle, max(tol, 1e-12) * 1e2)
    m = cocycle.dim // 2
    rng = np.random.default_rng(0)
    F = _orthonormal(rng.standard_normal((cocycle.dim, m)))
    defect = np.inf
    polish = POLISH_SWEEPS
    for _ in range(iterations):
        start = F
        frames = [F]
        for M in cocycle.steps:
            F = _orthonormal(M @ F)
            frames.append(F)
        defect = _largest_angle_sine(start, F)
        if defect <= tol:
            if not polish:
                break
            polish -= 1
    else:
        if defect > tol:
            raise HyperbolicityError(f"power iteration stalled at defect {defect:.3e}")

    frames = frames[:-1] if cocycle.closed else frames
    J = standard_j(cocycle.dim)
    for F in frames:
        iso = np.max(np.abs(F.T @ J @ F))
        if iso > ISOTROPY_TOL:
            raise IsotropyError(f"computed unstable frame is not isotropic ({iso:.3e})")

    transitions = []
    for i, M in enumerate(cocycle.steps):
        if i + 1 < len(frames):
            target = frames[i + 1]
        elif cocycle.closed:
            target = frames[0]
        else:
            break
        image = M @ frames[i]
        G, *_ = np.linalg.lstsq(target, image, rcond=None)
        if np.linalg.cond(G) > MAX_CONDITION:
            raise ValidationError(f"transition {i} is ill-conditioned")
        resid = np.max(np.abs(image - target @ G))
        if resid > INVARIANCE_TOL * max(1.0, float(np.max(np.abs(image)))):
            raise HyperbolicityError(f"frame {i} is not carried to frame {i + 1} ({resid:.3e})")
        transitions.append(G)
    return BundleSample(tuple(frames), tuple(transitions), defect, cocycle.closed)


def transported_bundle(cocycle, frame):
    """Bundle obtained by pushing a given invariant frame along the cocycle."""
    frames = [_orthonormal(np.asarray(frame, dtype=float).reshape(cocycle.dim, -1))]
    for M in cocycle.steps[:-1]:
        frames.append(_orthonormal(M @ frames[-1]))
    transitions = []
    for i, M in enumerate(cocycle.steps):
        target = frames[(i + 1) % len(frames)]
        image = M @ frames[i]
        G, *_ = np.linalg.lstsq(target, image, rcond=None)
        if np.max(np.abs(image - target @ G)) > INVARIANCE_TOL * max(1.0, float(np.max(np.abs(image)))):
            raise ValidationError("frame is not invariant under the cocycle")
        transitions.append(G)
    return BundleSample(tuple(frames), tuple(transitions), 0.0, cocycle.closed)


def holonomy_sign(bundle):
    """``+1`` iff the bundle is orientable along the closed orbit."""
    if not bundle.closed:
        raise ValidationError("holonomy is defined only for closed cocycles")
    sign = 1
    for G in bundle.transitions:
        sign *= int(np.sign(np.linalg.det(G)))
    if sign == 0:
        raise ValidationError("singular transition")
    return sign


def parity_equivalence_check(cocycle, frame=None):
    """Is the orbit's parity Even exactly when the invariant bundle is orientable?

    The bundle is the computed unstable one unless an invariant ``frame`` is given.
    """
    bundle = compute_unstable(cocycle) if frame is None else transported_bundle(cocycle, frame)
    parity = det_sign_parity(cocycle.product())
    return (parity == Parity.EVEN) == (holonomy_sign(bundle) == 1)


def random_hyperbolic_cocycle(rng, m, steps=3, expansion=(1.5, 4.0), spread=0.5):
    """Closed cocycle whose product is hyperbolic and Lagrangian-invariant.

    The product is ``[[A, A S], [0, A^-T]]`` with every singular value of
    ``A`` in ``expansion`` (so the unstable bundle at the base point is the
    ``q``-plane), factored into ``steps`` symplectic matrices of which all
    but the last are random exponentials of scale ``spread``.

    Returns
    -------
    (CocycleSample, ndarray)
        The cocycle and the ``A`` block, whose determinant sign gives the
        expected parity.
    """
    U = ortho_group.rvs(m, random_state=rng) if m > 1 else np.array([[rng.choice((-1.0, 1.0))]])
    V = ortho_group.rvs(m, random_state=rng) if m > 1 else np.array([[1.0]])
    A = U @ np.diag(rng.uniform(*expansion, size=m)) @ V.T
    S = rng.uniform(-1.0, 1.0, size=(m, m))
    P = make_lagrangian_invariant(A, (S + S.T) / 2).entries
    J = standard_j(2 * m)
    factors = []
    for _ in range(steps - 1):
        H = rng.uniform(-spread, spread, size=(2 * m, 2 * m))
        factors.append(expm(J @ (H + H.T) / 2))
    partial = np.eye(2 * m)
    for M in factors:
        partial = M @ partial
    factors.append(P @ np.linalg.inv(partial))
    return CocycleSample(tuple(factors)), A


@lru_cache(maxsize=4096)
def _suspension_orbit_sign(matrix, n):
    A = np.array(matrix, dtype=float).reshape(2, 2)
    return holonomy_sign(compute_unstable(CocycleSample((A,) * n)))


def _sign_job(args):
    return _suspension_orbit_sign(*args)


def attach_suspension_holonomy(table, workers=None):
    """Fill ``holonomy_sign`` on every record of a suspension census.

    The transverse cocycle of a record with label ``k m`` is ``A`` repeated
    ``k m`` times, so signs are computed once per label.
    """
    if table.model.get("type") != "cat-suspension":
        raise ValidationError("holonomy data is only available for suspension censuses")
    matrix = tuple(table.model["matrix"])
    labels = sorted({r.class_label for r in table.records})
    signs = dict(zip(labels, pmap(_sign_job, [(matrix, n) for n in labels], workers)))
    records = tuple(r.with_(holonomy_sign=signs[r.class_label]) for r in table.records)
    return CensusTable(table.model, table.truncation, records, table.grading,
                       table.label_coarsened, table.meta)


def record_parity_matches_sign(table):
    """Per record: parity Even exactly when the holonomy sign is ``+1``."""
    return all((r.cz_parity == Parity.EVEN) == (r.holonomy_sign == 1) for r in table.records)


def homology_naturality_check(table):
    """True iff the holonomy sign is constant on each class label."""
    seen = {}
    missing = [f"{r.simple_id}^{r.iterate}" for r in table.records if r.holonomy_sign is None]
    if missing:
        raise ValidationError(f"records without holonomy data: {missing[:5]}")
    for r in table.records:
        if seen.setdefault(r.class_label, r.holonomy_sign) != r.holonomy_sign:
            return False
    return True
