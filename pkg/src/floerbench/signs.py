"""Exact sign bookkeeping for multilinear composition identities.

Every function here returns a bit (0 or 1), the exponent of (-1) in front of a
composition term.  Inputs are integer degree tuples; nothing is ever a float.
The three ``verify_identity`` targets are consistency statements between the
per-factor signs of a two-level composition and the global sign of the
corresponding term in the quadratic relation:

``m-composition``
    an inner k-linear product glued into an outer one,
``f-composition``
    an inner product glued into a morphism-type map,
``fprime-composition``
    a top product applied to a tuple of morphism-type maps (one block each).

Glued-generator degrees are always derived from the rigidity/degree-shift
conventions (product maps shift total degree by ``2 - k``, morphism maps by
``1 - k``); they are never free parameters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence


def dagger(degrees: Sequence[int]) -> int:
    """Position-weighted sum: sum of i * mu_i over inputs, mod 2."""
    return sum(i * mu for i, mu in enumerate(degrees, start=1)) % 2


def ddagger(degrees: Sequence[int], n: int) -> int:
    """Prefix sign: sum of the first n degrees minus n, mod 2."""
    if not 0 <= n <= len(degrees):
        raise ValueError(f"prefix length {n} out of range for {len(degrees)} degrees")
    return (sum(degrees[:n]) - n) % 2


def spade(degrees: Sequence[int], k: int | None = None) -> int:
    """Morphism-map sign: dagger plus the arity k, mod 2.

    k defaults to the number of degrees, which is the only case the
    composite identities ever use; the parameter exists so the k-offset
    relative to dagger can be probed directly.
    """
    if k is None:
        k = len(degrees)
    return (dagger(degrees) + k) % 2


def club(degrees: Sequence[int], parts: Sequence[int], i: int, reading: str = "ell") -> int:
    """Sign of the mixed term where block ``i`` (1-based) of the partition
    ``parts`` carries the homotopy slot: sum of all degrees strictly before
    block i, minus a block-length correction, mod 2.

    The correction subtracts the lengths of the blocks before block i
    (``reading="ell"``).  The source formula is typeset ambiguously and
    admits a second reading where the subtracted subscript is the marked
    block itself, i.e. (i-1) copies of parts[i-1] (``reading="lam"``).
    Both are kept so tests can demonstrate which one the composition
    relations actually need; "ell" is the default and the one consistent
    with the rest of the sign system.
    """
    if sum(parts) != len(degrees):
        raise ValueError("partition does not sum to the number of degrees")
    if not 1 <= i <= len(parts):
        raise ValueError(f"block index {i} out of range for {len(parts)} blocks")
    before = sum(parts[: i - 1])
    if reading == "ell":
        correction = before
    elif reading == "lam":
        correction = (i - 1) * parts[i - 1]
    else:
        raise ValueError(f"unknown club reading {reading!r}")
    return (sum(degrees[:before]) - correction) % 2


def square_m(degrees: Sequence[int], n: int, m: int) -> int:
    """Koszul-reordering bit for an inner product of arity m inserted after
    position n into a d-tuple."""
    d = len(degrees)
    _check_insertion(d, n, m)
    return (m * (d - m - 1) + m * sum(degrees[n + m :])) % 2


def triangle(d: int, n: int, m: int) -> int:
    """Parameter-space orientation bit for the same insertion."""
    _check_insertion(d, n, m)
    return (m * (d - n) + m + n) % 2


def square_f(degrees: Sequence[int], n: int, m: int) -> int:
    """Koszul-reordering bit when the outer factor is a morphism-type map."""
    d = len(degrees)
    _check_insertion(d, n, m)
    return (m * (d - m) + m * sum(degrees[n + m :])) % 2


def square_fprime(degrees: Sequence[int], parts: Sequence[int]) -> int:
    """Koszul-reordering bit for a product of morphism maps over the blocks of
    ``parts``.  Uses the reduced block lengths s' = s - 1 and the block output
    degrees."""
    ell = len(parts)
    if sum(parts) != len(degrees):
        raise ValueError("partition does not sum to the number of degrees")
    sp = [s - 1 for s in parts]
    y = block_output_degrees(degrees, parts)
    total = sum(sp) * ell
    total += sum(sp[i] * sp[j] for i in range(ell) for j in range(i, ell))
    total += sum(sum(sp[: i + 1]) * y[i + 1] for i in range(ell - 1))
    return total % 2


def triangle_parts(d: int, parts: Sequence[int]) -> int:
    """Parameter-space orientation bit for the block decomposition."""
    ell = len(parts)
    if sum(parts) != d:
        raise ValueError("partition does not sum to the arity")
    sp = [s - 1 for s in parts]
    total = d * ell + d
    total += sum(sp[i] * sp[j] for i in range(ell) for j in range(i, ell))
    return total % 2


def glued_product_degree(degrees: Sequence[int]) -> int:
    """Degree of a rigid m-ary product output: sum of inputs plus m - 2.

    This is the dimension-zero degree condition, not the map's degree
    shift; the two differ by an even integer, so every sign below is
    unaffected by the distinction.
    """
    return sum(degrees) + len(degrees) - 2


def glued_morphism_degree(degrees: Sequence[int]) -> int:
    """Degree of a rigid s-ary morphism-map output: sum of inputs plus s - 1."""
    return sum(degrees) + len(degrees) - 1


def block_output_degrees(degrees: Sequence[int], parts: Sequence[int]) -> list[int]:
    """Rigid output degree of the morphism map on each consecutive block."""
    out = []
    pos = 0
    for s in parts:
        out.append(glued_morphism_degree(degrees[pos : pos + s]))
        pos += s
    return out


def _check_insertion(d: int, n: int, m: int) -> None:
    if m < 1 or m > d or n < 0 or n > d - m:
        raise ValueError(f"invalid insertion (d={d}, n={n}, m={m})")


def compositions(d: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of positive integers summing to d."""
    if d == 0:
        yield ()
        return
    for first in range(1, d + 1):
        for rest in compositions(d - first):
            yield (first,) + rest


@dataclass
class IdentityReport:
    identity: str
    passed: bool
    checked: int
    counterexample: dict | None = None
    dropped_terms: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "dropped_terms": list(self.dropped_terms),
        }


_IDENTITIES = ("m-composition", "f-composition", "fprime-composition")


def verify_identity(
    which: str,
    degree_range: Sequence[int] = (0, 1, 2, 3),
    d_max: int = 5,
    drop_terms: Sequence[str] = (),
) -> IdentityReport:
    """Exhaustively check one of the composition sign identities.

    Configurations are visited in lexicographic order -- (d, n, m, degrees)
    for the insertion identities and (d, parts, degrees) for the partition
    identity -- so a returned counterexample is the least one.  ``drop_terms``
    removes named contributions from the left side; it exists so tests can
    confirm the checker actually fails when the identity is broken.
    """
    if which not in _IDENTITIES:
        raise ValueError(f"unknown identity {which!r}; expected one of {_IDENTITIES}")
    drop = frozenset(drop_terms)
    degrees = tuple(degree_range)
    checked = 0
    if which in ("m-composition", "f-composition"):
        for d in range(1, d_max + 1):
            for n in range(0, d):
                for m in range(1, d - n + 1):
                    for mu in itertools.product(degrees, repeat=d):
                        checked += 1
                        bad = _check_insertion_identity(which, mu, n, m, drop)
                        if bad is not None:
                            return IdentityReport(which, False, checked, bad, tuple(drop))
    else:
        for d in range(1, d_max + 1):
            for parts in compositions(d):
                for mu in itertools.product(degrees, repeat=d):
                    checked += 1
                    bad = _check_partition_identity(mu, parts, drop)
                    if bad is not None:
                        return IdentityReport(which, False, checked, bad, tuple(drop))
    return IdentityReport(which, True, checked, None, tuple(drop))


def _check_insertion_identity(which, mu, n, m, drop):
    d = len(mu)
    inner = mu[n : n + m]
    glued = glued_product_degree(inner)
    outer = mu[:n] + (glued,) + mu[n + m :]
    if which == "m-composition":
        bits = {
            "dagger_outer": dagger(outer),
            "dagger_inner": dagger(inner),
            "square": square_m(mu, n, m),
            "triangle": triangle(d, n, m),
        }
        rhs = (ddagger(mu, n) + sum((i + 1) * x for i, x in enumerate(mu, start=1))) % 2
    else:
        bits = {
            "spade_outer": spade(outer),
            "dagger_inner": dagger(inner),
            "square": square_f(mu, n, m),
            "triangle": triangle(d, n, m),
        }
        rhs = (
            ddagger(mu, n)
            + 1
            + sum((i + 1) * x for i, x in enumerate(mu, start=1))
            + d
        ) % 2
    lhs = sum(v for k, v in bits.items() if k not in drop) % 2
    if lhs == rhs:
        return None
    return {
        "identity": which,
        "d": d,
        "n": n,
        "m": m,
        "degrees": list(mu),
        "glued_degree": glued,
        "bits": bits,
        "lhs": lhs,
        "rhs": rhs,
    }


def _check_partition_identity(mu, parts, drop):
    d = len(mu)
    y = block_output_degrees(mu, parts)
    bits = {
        "square": square_fprime(mu, parts),
        "triangle": triangle_parts(d, parts),
        "dagger_top": dagger(y),
    }
    pos = 0
    spade_total = 0
    for s in parts:
        spade_total += spade(mu[pos : pos + s])
        pos += s
    bits["spade_blocks"] = spade_total % 2
    rhs = (sum((i + 1) * x for i, x in enumerate(mu, start=1)) + d) % 2
    lhs = sum(v for k, v in bits.items() if k not in drop) % 2
    if lhs == rhs:
        return None
    return {
        "identity": "fprime-composition",
        "d": d,
        "parts": list(parts),
        "degrees": list(mu),
        "block_degrees": y,
        "bits": bits,
        "lhs": lhs,
        "rhs": rhs,
    }


def revalidate_counterexample(cex: dict) -> dict:
    """Recompute both sides of a reported counterexample from scratch.

    This is a deliberately separate code path: every exponent is rebuilt
    with raw index loops instead of the helper functions above, so a bug in
    the helpers cannot silently confirm itself.  Returns the recomputed
    bits and whether they agree with the report.
    """
    mu = list(cex["degrees"])
    d = len(mu)
    which = cex["identity"]
    if which in ("m-composition", "f-composition"):
        n, m = cex["n"], cex["m"]
        inner = mu[n : n + m]
        glued = sum(inner) + m - 2
        outer = mu[:n] + [glued] + mu[n + m :]
        lhs = 0
        for i, x in enumerate(inner):
            lhs += (i + 1) * x
        for i, x in enumerate(outer):
            lhs += (i + 1) * x
        rhs = sum(mu[:n]) - n
        for i, x in enumerate(mu):
            rhs += (i + 2) * x
        if which == "m-composition":
            lhs += m * (d - m - 1) + m * sum(mu[n + m :])
            lhs += m * (d - n) + m + n
        else:
            lhs += len(outer)  # spade offset relative to dagger
            lhs += m * (d - m) + m * sum(mu[n + m :])
            lhs += m * (d - n) + m + n
            rhs += 1 + d
    else:
        parts = list(cex["parts"])
        ell = len(parts)
        blocks = []
        pos = 0
        for s in parts:
            blocks.append(mu[pos : pos + s])
            pos += s
        y = [sum(b) + len(b) - 1 for b in blocks]
        sp = [s - 1 for s in parts]
        lhs = sum(sp) * ell + d * ell + d
        for i in range(ell):
            for j in range(i, ell):
                lhs += 2 * sp[i] * sp[j]
        for i in range(ell - 1):
            lhs += sum(sp[: i + 1]) * y[i + 1]
        for j, yj in enumerate(y):
            lhs += (j + 1) * yj
        for b in blocks:
            lhs += len(b)
            for i, x in enumerate(b):
                lhs += (i + 1) * x
        rhs = d
        for i, x in enumerate(mu):
            rhs += (i + 2) * x
    lhs %= 2
    rhs %= 2
    return {
        "lhs": lhs,
        "rhs": rhs,
        "mismatch": lhs != rhs,
        "matches_report": lhs == cex["lhs"] and rhs == cex["rhs"],
    }
