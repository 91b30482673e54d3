"""Half-integer path index for Lagrangian frames along symplectic paths.

Frames are n x 2n row matrices spanning Lagrangian subspaces of standard
symplectic R^{2n}; paths act on a start frame.  The index counts signed
crossings with a fixed reference Lagrangian: interior crossings contribute
the full signature of the crossing form, endpoint crossings half of it.
The value is stored doubled as an exact integer so that additivity checks
never touch floating point.

Crossings are located by tracking the determinant of the stacked frame
matrix (orthonormalized for conditioning) through sign changes and
near-zero minima; crossing forms are differentiated on the smooth,
un-orthonormalized frame so the finite differences see a continuous
family.  A crossing form with a near-zero eigenvalue triggers a retry
against slightly rotated references; if the retries disagree the crossing
is genuinely unstable and :class:`DegenerateCrossing` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg, optimize

from .errors import DegenerateCrossing, InvalidInput, NumericFailure

ISOTROPY_TOL = 1e-9
KERNEL_TOL = 1e-8
ENDPOINT_TOL = 1e-9


def J_matrix(n):
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def omega(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = u.size // 2
    return float(u[:n] @ v[n:] - u[n:] @ v[:n])


class LagrangianFrame:
    """Rows span a Lagrangian subspace; isotropy and rank are enforced."""

    def __init__(self, rows):
        F = np.atleast_2d(np.asarray(rows, dtype=float))
        n, two_n = F.shape
        if two_n != 2 * n:
            raise InvalidInput(f"frame must be n x 2n, got {F.shape}")
        if np.linalg.matrix_rank(F, tol=1e-10) != n:
            raise InvalidInput("frame rows are linearly dependent")
        J = J_matrix(n)
        skew = F @ J @ F.T
        if np.max(np.abs(skew)) > ISOTROPY_TOL:
            raise InvalidInput(
                f"frame is not isotropic: residual {np.max(np.abs(skew)):.2e}"
            )
        self.matrix = F
        self.n = n

    @classmethod
    def horizontal(cls, n):
        return cls(np.hstack([np.eye(n), np.zeros((n, n))]))

    @classmethod
    def vertical(cls, n):
        return cls(np.hstack([np.zeros((n, n)), np.eye(n)]))

    @classmethod
    def graph(cls, S):
        """Graph of a symmetric matrix over the horizontal Lagrangian."""
        S = np.asarray(S, dtype=float)
        return cls(np.hstack([np.eye(S.shape[0]), S]))

    @classmethod
    def line(cls, angle):
        """The line through angle radians in the symplectic plane."""
        return cls([[np.cos(angle), np.sin(angle)]])

    def transform(self, M):
        return LagrangianFrame(self.matrix @ np.asarray(M, dtype=float).T)

    def to_dict(self):
        return {"rows": self.matrix.tolist()}


class SymplecticPath:
    """A callable t -> M(t) on [0, 1], spot-checked for symplecticity."""

    def __init__(self, fn, n, check_samples=9):
        self.fn = fn
        self.n = n
        J = J_matrix(n)
        for t in np.linspace(0.0, 1.0, check_samples):
            M = np.asarray(fn(float(t)), dtype=float)
            if M.shape != (2 * n, 2 * n):
                raise InvalidInput(f"path value at t={t} has shape {M.shape}")
            if np.max(np.abs(M.T @ J @ M - J)) > ISOTROPY_TOL:
                raise InvalidInput(f"path is not symplectic at t={t}")
        self._cache = {}

    def __call__(self, t):
        key = round(float(t), 15)
        if key not in self._cache:
            self._cache[key] = np.asarray(self.fn(float(t)), dtype=float)
        return self._cache[key]

    @classmethod
    def from_generators(cls, generators, n=None):
        """Piecewise path: each symmetric generator S contributes a segment
        exp(s J S), traversed in order on equal subintervals."""
        mats = [np.asarray(S, dtype=float) for S in generators]
        if not mats:
            raise InvalidInput("need at least one generator")
        if n is None:
            n = mats[0].shape[0] // 2
        J = J_matrix(n)
        for S in mats:
            if S.shape != (2 * n, 2 * n) or np.max(np.abs(S - S.T)) > 1e-12:
                raise InvalidInput("generators must be symmetric 2n x 2n")
        k = len(mats)

        def fn(t):
            M = np.eye(2 * n)
            pos = t * k
            for i, S in enumerate(mats):
                s = min(max(pos - i, 0.0), 1.0)
                if s > 0:
                    M = linalg.expm(s * (J @ S)) @ M
                else:
                    break
            return M

        return cls(fn, n)

    @classmethod
    def rotation(cls, angle):
        """Rigid rotation of the symplectic plane up to the given angle."""
        def fn(t):
            c, s = np.cos(angle * t), np.sin(angle * t)
            return np.array([[c, -s], [s, c]])

        return cls(fn, 1)


def reverse_path(path):
    return SymplecticPath(lambda t: path(1.0 - t), path.n)


def concatenate_paths(p1, p2):
    if p1.n != p2.n:
        raise InvalidInput("paths act on different dimensions")

    def fn(t):
        if t <= 0.5:
            return p1(2 * t)
        return np.asarray(p2(2 * t - 1.0)) @ np.asarray(p1(1.0))

    return SymplecticPath(fn, p1.n)


# ---------------------------------------------------------------------------
# crossings


def _orth_cols(A):
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


@dataclass
class Crossing:
    t: float
    dim: int
    signature: int
    endpoint: bool

    def to_dict(self):
        return {
            "t": self.t,
            "dim": self.dim,
            "signature": self.signature,
            "endpoint": self.endpoint,
        }


@dataclass
class IndexResult:
    index2: int
    crossings: list = field(default_factory=list)

    @property
    def value(self):
        return Fraction(self.index2, 2)

    def to_dict(self):
        return {
            "index2": self.index2,
            "value": str(self.value),
            "value_float": float(self.value),
            "crossings": [c.to_dict() for c in self.crossings],
        }


def _golden_min(f, lo, hi, xtol=1e-12):
    """Golden-section minimum; handles the kinked |det| profiles that the
    library bounded minimizer refuses to localize past sqrt(eps)."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _crossing_times(det_fn, samples):
    ts = np.linspace(0.0, 1.0, samples)
    vals = np.array([det_fn(t) for t in ts])
    times = []
    for i in range(len(ts) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            times.append(ts[i])
        elif np.sign(a) * np.sign(b) < 0:
            times.append(float(optimize.brentq(det_fn, ts[i], ts[i + 1], xtol=1e-14)))
    if vals[-1] == 0.0:
        times.append(ts[-1])
    # even-order zeros: |det| dips without a sign change
    absvals = np.abs(vals)
    for i in range(1, len(ts) - 1):
        if absvals[i] <= absvals[i - 1] and absvals[i] <= absvals[i + 1]:
            if 0.0 < absvals[i] < 1e-2:
                t_star = _golden_min(
                    lambda t: abs(det_fn(t)), ts[i - 1], ts[i + 1]
                )
                if abs(det_fn(t_star)) < KERNEL_TOL:
                    times.append(min(max(t_star, 0.0), 1.0))
    for t_end in (0.0, 1.0):
        if abs(det_fn(t_end)) < KERNEL_TOL:
            times.append(t_end)
    times.sort()
    merged = []
    for t in times:
        if not merged or t - merged[-1] > 1e-7:
            merged.append(t)
        elif t == 1.0 and merged[-1] < 1.0 - ENDPOINT_TOL:
            merged.append(t)
    return merged


def _resolve_endpoint(t):
    if t < ENDPOINT_TOL:
        return 0.0, True
    if t > 1.0 - ENDPOINT_TOL:
        return 1.0, True
    return t, False


def _index_once(frame_fn, ref, samples, delta, deg_tol):
    """One full sweep; returns (result, degenerate_times)."""
    n = ref.n
    ref_orth = _orth_cols(ref.matrix.T)

    def det_fn(t):
        F = _orth_cols(np.asarray(frame_fn(t)).T)
        return float(np.linalg.det(np.hstack([F, -ref_orth])))

    crossings = []
    degenerate = []
    index2 = 0
    for t_raw in _crossing_times(det_fn, samples):
        t, endpoint = _resolve_endpoint(t_raw)
        F_smooth = np.asarray(frame_fn(t), dtype=float)
        F_orth = _orth_cols(F_smooth.T)
        K = np.hstack([F_orth, -ref_orth])
        _, sv, Vt = np.linalg.svd(K)
        null = Vt[sv < KERNEL_TOL]
        if null.size == 0:
            continue
        dim = null.shape[0]
        # intersection vectors and their smooth-frame coordinates
        xs = [row[:n] @ F_orth.T for row in null]
        As = [np.linalg.lstsq(F_smooth.T, x, rcond=None)[0] for x in xs]
        lo = max(t - delta, 0.0)
        hi = min(t + delta, 1.0)
        F_lo = np.asarray(frame_fn(lo), dtype=float)
        F_hi = np.asarray(frame_fn(hi), dtype=float)
        Q = np.zeros((dim, dim))
        for i in range(dim):
            for j in range(dim):
                w_hi = F_hi.T @ As[j]
                w_lo = F_lo.T @ As[j]
                Q[i, j] = (omega(xs[i], w_hi) - omega(xs[i], w_lo)) / (hi - lo)
        Q = 0.5 * (Q + Q.T)
        eigs = np.linalg.eigvalsh(Q)
        scale = max(np.max(np.abs(eigs)), 1.0)
        if np.min(np.abs(eigs)) < deg_tol * scale:
            degenerate.append(t)
            continue
        sig = int(np.sum(eigs > 0) - np.sum(eigs < 0))
        index2 += sig if endpoint else 2 * sig
        crossings.append(Crossing(t, dim, sig, endpoint))
    return IndexResult(index2, crossings), degenerate


def robbin_salamon_index(
    path,
    start,
    reference,
    samples=401,
    delta=1e-6,
    deg_tol=1e-6,
    perturb=1e-6,
):
    """Index of the frame family M(t) . start against the reference.

    ``path`` is a :class:`SymplecticPath`, ``start`` and ``reference`` are
    :class:`LagrangianFrame` objects of matching dimension.
    """
    if not (path.n == start.n == reference.n):
        raise InvalidInput("path and frames have mismatched dimensions")

    def frame_fn(t):
        return start.matrix @ np.asarray(path(t)).T

    result, degenerate = _index_once(frame_fn, reference, samples, delta, deg_tol)
    if not degenerate:
        return result
    # retry with the reference nudged along the symplectic rotation; a
    # stable answer must not depend on the nudge size
    J = J_matrix(path.n)
    retries = []
    for eps in (perturb, 2 * perturb):
        ref_eps = reference.transform(linalg.expm(eps * J))
        r_eps, deg_eps = _index_once(frame_fn, ref_eps, samples, delta, deg_tol)
        if deg_eps:
            raise DegenerateCrossing(
                "crossing form stayed degenerate after perturbation",
                location=deg_eps[0],
            )
        retries.append(r_eps)
    if retries[0].index2 != retries[1].index2:
        raise DegenerateCrossing(
            "perturbed indices disagree; crossing is unstable",
            location=degenerate[0],
        )
    return retries[0]


# ---------------------------------------------------------------------------
# chord grading


@dataclass
class ChordIndexResult:
    label: str
    value: Fraction
    morse_bott: bool

    def to_dict(self):
        return {
            "label": self.label,
            "value": str(self.value),
            "value_float": float(self.value),
            "morse_bott": self.morse_bott,
        }


def chord_index(chord):
    """Path index of a chord class of the flat three-torus model.

    The linearized flow is a momentum shear.  Against the conormal-type
    reference the first two coordinate blocks stay inside the reference
    for all t, a constant-intersection family that contributes nothing;
    the computation happens on the remaining symplectic plane, where the
    moving vertical line crosses the reference vertical once, at t = 0.

    Constant-family chords are degenerate in the Morse--Bott sense: the
    result is flagged and no path computation is attempted.
    """
    if chord.constant_family:
        return ChordIndexResult(chord.label(), Fraction(0), True)
    shear = float(abs(chord.wrap))

    def fn(t):
        return np.array([[1.0, shear * t], [0.0, 1.0]])

    path = SymplecticPath(fn, 1)
    vertical = LagrangianFrame.vertical(1)
    res = robbin_salamon_index(path, vertical, vertical)
    return ChordIndexResult(chord.label(), res.value, False)


# ---------------------------------------------------------------------------
# serialization for the command line


def path_from_dict(doc):
    gens = doc.get("generators")
    if gens:
        path = SymplecticPath.from_generators(gens)
    elif "rotation" in doc:
        path = SymplecticPath.rotation(float(doc["rotation"]) * np.pi)
    else:
        raise InvalidInput("path document needs 'generators' or 'rotation'")
    start = LagrangianFrame(doc["start"])
    if start.n != path.n:
        raise InvalidInput("start frame dimension does not match the path")
    return path, start


def frame_from_dict(doc):
    return LagrangianFrame(doc["rows"])


def random_symmetric(rng, two_n, scale=1.0):
    A = rng.normal(size=(two_n, two_n)) * scale
    return 0.5 * (A + A.T)
