"""Chord spectra of flat torus models, and the Hamiltonian side checks.

Two quadratic models are enumerated exactly, with rational arithmetic:

* the three-torus with a displacement parameter h, whose chord classes are
  indexed by an integer wrap k with energy (k h)^2 / 2;
* the two-torus with a rational Gram matrix G, whose classes are nonzero
  integer vectors v with energy v.G.v / 2.

Actions are -energy by construction; only classes with action at or above
a cutoff are kept, plus the single constant family at action zero.  The
companion routines cover the geometric plumbing the spectra rely on: the
cylindrical metric adjustment, the Hamiltonian vector field in both
charts, bi-Lipschitz constants between Gram matrices, and the quadratic
rescaling behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg

from .errors import InvalidInput


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(*x.as_integer_ratio())
    raise InvalidInput(f"cannot treat {x!r} as a rational number")


@dataclass(frozen=True)
class ChordClass:
    model: str
    wrap: object  # int for t3, (m, n) tuple for t2
    energy: Fraction
    action: Fraction
    constant_family: bool

    def label(self):
        if self.constant_family:
            return "const"
        if self.model == "t3":
            return f"k={self.wrap:+d}"
        return f"v=({self.wrap[0]},{self.wrap[1]})"

    @property
    def length(self):
        """Geodesic length, recovered from energy = length^2 / 2."""
        return math.sqrt(2.0 * float(self.energy))

    def to_dict(self):
        return {
            "model": self.model,
            "label": self.label(),
            "wrap": self.wrap if self.model == "t3" else list(self.wrap),
            "length": self.length,
            "energy": str(self.energy),
            "action": str(self.action),
            "action_float": float(self.action),
            "constant_family": self.constant_family,
        }


def _sorted_spectrum(classes):
    # constant family first, then by decreasing action, then by wrap
    def key(c):
        wrap = (c.wrap,) if c.model == "t3" else tuple(c.wrap)
        return (not c.constant_family, -c.action, wrap)

    return sorted(classes, key=key)


def enumerate_chords_T3(h=1, cutoff=-8):
    """Chord classes of the three-torus model.

    With displacement h, wrap k carries energy (k h)^2 / 2 and action
    minus that; classes are kept while the action stays at or above the
    cutoff.  The constant family (k = 0, action 0) is always present.
    """
    h = _frac(h)
    cutoff = _frac(cutoff)
    if h <= 0:
        raise InvalidInput("displacement h must be positive")
    if cutoff >= 0:
        raise InvalidInput("cutoff must be negative")
    out = [ChordClass("t3", 0, Fraction(0), Fraction(0), True)]
    k = 1
    while True:
        energy = Fraction(k * k) * h * h / 2
        if -energy < cutoff:
            break
        for wrap in (-k, k):
            out.append(ChordClass("t3", wrap, energy, -energy, False))
        k += 1
    return _sorted_spectrum(out)


def _gram(gram):
    if len(gram) == 3:  # flat (a, b, c) for [[a, b], [b, c]]
        a, b, c = (_frac(x) for x in gram)
        G = ((a, b), (b, c))
    else:
        G = tuple(tuple(_frac(x) for x in row) for row in gram)
        if len(G) != 2 or any(len(r) != 2 for r in G):
            raise InvalidInput("Gram matrix must be 2x2")
        if G[0][1] != G[1][0]:
            raise InvalidInput("Gram matrix must be symmetric")
    if G[0][0] <= 0 or G[0][0] * G[1][1] - G[0][1] ** 2 <= 0:
        raise InvalidInput("Gram matrix must be positive definite")
    return G


def enumerate_chords_T2(gram=((1, 0), (0, 1)), cutoff=-2):
    """Chord classes of the two-torus model with a rational Gram matrix."""
    G = _gram(gram)
    cutoff = _frac(cutoff)
    if cutoff >= 0:
        raise InvalidInput("cutoff must be negative")
    Gf = np.array([[float(x) for x in row] for row in G])
    lam_min = float(np.min(np.linalg.eigvalsh(Gf)))
    bound = int(math.isqrt(int(math.ceil(2 * float(-cutoff) / lam_min)))) + 2
    out = [ChordClass("t2", (0, 0), Fraction(0), Fraction(0), True)]
    for m in range(-bound, bound + 1):
        for n in range(-bound, bound + 1):
            if m == 0 and n == 0:
                continue
            energy = (
                G[0][0] * m * m + 2 * G[0][1] * m * n + G[1][1] * n * n
            ) / 2
            if -energy >= cutoff:
                out.append(ChordClass("t2", (m, n), energy, -energy, False))
    return _sorted_spectrum(out)


def action_gap(classes):
    """Smallest energy among nonconstant classes, as an exact Fraction."""
    energies = [c.energy for c in classes if not c.constant_family]
    if not energies:
        raise InvalidInput("no nonconstant chord classes in the spectrum")
    return min(energies)


def max_fiber_norm(classes):
    """Largest fiber momentum norm over a spectrum.

    Each flat chord has constant momentum of norm equal to its length, so
    this is just the longest length present; the constant family
    contributes zero.
    """
    if not classes:
        raise InvalidInput("empty spectrum")
    return max(c.length for c in classes)


# ---------------------------------------------------------------------------
# metric adjustment


def smoothstep5(t):
    """Monotone quintic interpolant: 0 below 0, 1 above 1, C^2 across."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (6.0 * t * t - 15.0 * t + 10.0)


def cylindrical_adjust(a, stage):
    """Diagonal metric coefficients (g_aa, g_theta, g_phi) at radial
    coordinate a for adjustment stage i >= 1.

    Below a = i - 1/2 the cross-section shrinks like exp(-2a); beyond
    a = i it is frozen at the constant eps_1^2 = exp(-2i); the quintic
    blend in between keeps the profile monotone.
    """
    stage = float(stage)
    if stage < 1:
        raise InvalidInput("adjustment stage must be at least 1")
    a = np.asarray(a, dtype=float)
    t = 2.0 * (a - (stage - 0.5))
    s = a + smoothstep5(t) * (stage - a)
    s = np.where(a >= stage, stage, s)
    coeff = np.exp(-2.0 * s)
    return coeff, coeff, np.ones_like(coeff)


# ---------------------------------------------------------------------------
# Hamiltonian vector field


def hamiltonian_model(chart):
    """Quadratic kinetic Hamiltonian in the given chart.

    Chart "a" uses cylindrical coordinates (a, theta, phi) with flat
    kinetic energy; chart "r" substitutes a = -log r, so p_a = -r p_r and
    H = (r^2 p_r^2 + p_theta^2 + p_phi^2) / 2.
    """
    if chart == "a":
        def H(q, p):
            p = np.asarray(p, dtype=float)
            return 0.5 * float(p @ p)

        return H
    if chart == "r":
        def H(q, p):
            q = np.asarray(q, dtype=float)
            p = np.asarray(p, dtype=float)
            return 0.5 * float((q[0] * p[0]) ** 2 + p[1] ** 2 + p[2] ** 2)

        return H
    raise InvalidInput(f"unknown chart {chart!r}")


def hamiltonian_vector_field(H, q, p, h=1e-4):
    """X_H = (dH/dp, -dH/dq) by central differences, one slot at a time."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    n = q.size
    qdot = np.zeros(n)
    pdot = np.zeros(n)
    for i in range(n):
        dp = np.zeros(n)
        dp[i] = h
        qdot[i] = (H(q, p + dp) - H(q, p - dp)) / (2 * h)
        dq = np.zeros(n)
        dq[i] = h
        pdot[i] = -(H(q + dq, p) - H(q - dq, p)) / (2 * h)
    return qdot, pdot


def xh_closed_form(q, p, chart):
    """Exact X_H for the model Hamiltonians, both charts."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if chart == "a":
        return p.copy(), np.zeros_like(p)
    if chart == "r":
        r, pr = q[0], p[0]
        qdot = np.array([r * r * pr, p[1], p[2]])
        pdot = np.array([-r * pr * pr, 0.0, 0.0])
        return qdot, pdot
    raise InvalidInput(f"unknown chart {chart!r}")


def chart_change_momentum(r, p_r):
    """Momentum transported to the a-chart along a = -log r."""
    return -r * p_r


# ---------------------------------------------------------------------------
# metric comparison and rescaling


def lipschitz_constant(G1, G2):
    """Bi-Lipschitz constant between two positive definite Gram matrices:
    the larger of the top generalized eigenvalues of (G1, G2) in either
    order."""
    G1 = np.asarray(G1, dtype=float)
    G2 = np.asarray(G2, dtype=float)
    for G in (G1, G2):
        if G.shape[0] != G.shape[1] or not np.allclose(G, G.T, atol=1e-12):
            raise InvalidInput("Gram matrices must be symmetric")
        try:
            np.linalg.cholesky(G)
        except np.linalg.LinAlgError as exc:
            raise InvalidInput("Gram matrices must be positive definite") from exc
    up = float(np.max(linalg.eigh(G2, G1, eigvals_only=True)))
    down = float(np.max(linalg.eigh(G1, G2, eigvals_only=True)))
    return max(up, down)


def quadratic_rescale_check(w_values, H=None, points=None, seed=0, h=1, cutoff=-8):
    """Check the two faces of quadratic rescaling.

    Numerically: H(q, w p) / w^2 = H(q, p) at sample points, for every w.
    Exactly: rescaling the displacement of the three-torus model by w
    relabels the spectrum wrap-for-wrap with actions scaled by w^2 (the
    cutoff scales along).  A degree-one Hamiltonian such as the momentum
    norm fails the numeric check, which the tests use as the negative
    control.
    """
    if H is None:
        H = hamiltonian_model("a")
    if points is None:
        rng = np.random.default_rng(seed)
        points = [(rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)) for _ in range(25)]

    per_w = []
    worst = 0.0
    relabel_ok = True
    base = enumerate_chords_T3(h=h, cutoff=cutoff)
    for w in w_values:
        wf = float(w)
        if wf <= 0:
            raise InvalidInput("rescale factors must be positive")
        resid = 0.0
        for q, p in points:
            resid = max(resid, abs(H(q, wf * np.asarray(p)) / wf**2 - H(q, p)))
        wq = _frac(w)
        scaled = enumerate_chords_T3(h=wq * _frac(h), cutoff=wq * wq * _frac(cutoff))
        pairs_ok = len(base) == len(scaled) and all(
            b.wrap == s.wrap and s.action == wq * wq * b.action
            for b, s in zip(base, scaled)
        )
        relabel_ok = relabel_ok and pairs_ok
        per_w.append({"w": wf, "residual": resid, "relabel": pairs_ok})
        worst = max(worst, resid)
    return {"max_residual": worst, "relabel_exact": relabel_ok, "per_w": per_w}
