"""Command line workbench.

Subcommands mirror the library surface: ``beta`` for slit domains,
``trees`` for the moduli cell counts and facets, ``signs`` for the
composition identities, ``ainfty`` for the relation verifiers, ``chords``
for spectra and the Hamiltonian side, ``grading`` for path indices, and
``suite`` for a configurable battery of self-checks.

Exit codes: 0 when the requested check passes (or the command is pure
construction), 1 when a check ran and failed, 2 for usage errors.
A default suite configuration file can be pointed at with the
``FLOERBENCH_CONFIG`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from collections import Counter
from fractions import Fraction

import numpy as np

from . import ainfty, grading, plots, report, signs, slit, spectra, trees
from .errors import DegenerateCrossing, FloerbenchError, InvalidInput, NumericFailure

PASS, FAIL, USAGE = 0, 1, 2


def _floats(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated numbers, got {text!r}") from exc


def _common(parser, figures=False, seed=False):
    parser.add_argument("--json", action="store_true", help="emit JSON instead of text")
    parser.add_argument("--out", metavar="FILE", help="write the report to a file")
    if figures:
        parser.add_argument("--figures", metavar="DIR", help="render figures into DIR")
    if seed:
        parser.add_argument("--seed", type=int, default=0)


def build_parser():
    p = argparse.ArgumentParser(prog="floerbench", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    beta = sub.add_parser("beta", help="slit-domain one-forms").add_subparsers(
        dest="action", required=True
    )
    b = beta.add_parser("build", help="construct a slit map")
    b.add_argument("--punctures", required=True, type=_floats)
    b.add_argument("--weights", required=True, type=_floats, help="input weights; the output weight is their sum")
    _common(b, figures=True)
    b.set_defaults(fn=cmd_beta_build)

    b = beta.add_parser("verify", help="check the one-form conditions")
    b.add_argument("--punctures", type=_floats)
    b.add_argument("--weights", required=True, type=_floats)
    b.add_argument("--grid", type=int, default=200)
    b.add_argument("--tol", type=float, default=1e-9)
    b.add_argument("--end-tol", type=float, default=1e-6)
    _common(b, figures=True)
    b.set_defaults(fn=cmd_beta_verify)

    b = beta.add_parser("glue", help="splice one domain into another and track residuals")
    b.add_argument("--outer-punctures", required=True, type=_floats)
    b.add_argument("--outer-weights", required=True, type=_floats)
    b.add_argument("--inner-punctures", required=True, type=_floats)
    b.add_argument("--inner-weights", required=True, type=_floats)
    b.add_argument("--slot", required=True, type=int)
    b.add_argument("--lengths", type=_floats, default=(2.0, 4.0, 8.0, 16.0))
    _common(b, figures=True)
    b.set_defaults(fn=cmd_beta_glue)

    tr = sub.add_parser("trees", help="moduli cell structure").add_subparsers(
        dest="action", required=True
    )
    t = tr.add_parser("enumerate", help="list trees or strata")
    t.add_argument("--k", required=True, type=int)
    t.add_argument("--space", choices=("M", "N", "L"), default="M")
    _common(t)
    t.set_defaults(fn=cmd_trees_enumerate)

    t = tr.add_parser("facets", help="codimension-one boundary facets")
    t.add_argument("--k", required=True, type=int)
    t.add_argument("--space", choices=("N", "L"), default="N")
    _common(t)
    t.set_defaults(fn=cmd_trees_facets)

    sg = sub.add_parser("signs", help="composition sign identities").add_subparsers(
        dest="action", required=True
    )
    s = sg.add_parser("verify", help="exhaustive identity check")
    s.add_argument("--identity", choices=("m", "f", "fprime"), required=True)
    s.add_argument("--deg-max", type=int, default=3)
    s.add_argument("--arity-max", type=int, default=5)
    _common(s)
    s.set_defaults(fn=cmd_signs_verify)

    ai = sub.add_parser("ainfty", help="relation verifiers").add_subparsers(
        dest="action", required=True
    )
    a = ai.add_parser("verify", help="run a relation check on a JSON document")
    a.add_argument("--kind", choices=("m", "f", "h"), required=True)
    a.add_argument("--in", dest="infile", metavar="FILE")
    a.add_argument("--fixture", choices=("dga", "functor", "homotopy"))
    a.add_argument("--kmax", type=int, default=3)
    a.add_argument("--club-reading", choices=("ell", "lam"), default="ell")
    _common(a)
    a.set_defaults(fn=cmd_ainfty_verify)

    ch = sub.add_parser("chords", help="chord spectra and Hamiltonian checks").add_subparsers(
        dest="action", required=True
    )
    c = ch.add_parser("spectrum", help="enumerate chord classes")
    c.add_argument("--model", choices=("t3", "t2"), default="t3")
    c.add_argument("--h", default="1", help="displacement (t3 model), rational")
    c.add_argument("--gram", default="1,0,1", help="a,b,c for [[a,b],[b,c]] (t2 model)")
    c.add_argument("--cutoff", default=None, help="action cutoff, rational")
    c.add_argument("--csv", metavar="FILE", help="write the classes as CSV")
    _common(c, figures=True)
    c.set_defaults(fn=cmd_chords_spectrum)

    c = ch.add_parser("lipschitz", help="bi-Lipschitz constant between Gram matrices")
    c.add_argument("--g1", required=True, help="a,b,c for [[a,b],[b,c]]")
    c.add_argument("--g2", required=True)
    _common(c)
    c.set_defaults(fn=cmd_chords_lipschitz)

    c = ch.add_parser("xh", help="Hamiltonian vector field at a point")
    c.add_argument("--point", required=True, type=_floats, help="q1,q2,q3,p1,p2,p3")
    c.add_argument("--chart", choices=("a", "r"), default="a")
    c.add_argument("--tol", type=float, default=1e-10)
    _common(c)
    c.set_defaults(fn=cmd_chords_xh)

    gr = sub.add_parser("grading", help="Lagrangian path index").add_subparsers(
        dest="action", required=True
    )
    g = gr.add_parser("rs", help="index of a path document against a reference frame")
    g.add_argument("--path", required=True, metavar="FILE")
    g.add_argument("--ref", required=True, metavar="FILE")
    _common(g)
    g.set_defaults(fn=cmd_grading_rs)

    su = sub.add_parser("suite", help="run the self-check battery")
    su.add_argument("--config", metavar="FILE", help="JSON config (checks/ranges/tolerances/seed)")
    _common(su, seed=True)
    su.set_defaults(fn=cmd_suite, action=None)

    return p


# ---------------------------------------------------------------------------
# beta


def _emit(args, command, payload, passed=None, seed=None, elapsed=None):
    rep = report.make_report(command, payload, passed=passed, seed=seed, elapsed=elapsed)
    report.emit(rep, as_json=args.json, out=args.out)
    if passed is None:
        return PASS
    return PASS if passed else FAIL


def cmd_beta_build(args):
    sm = slit.build_slit_map(args.punctures, args.weights)
    payload = sm.to_dict()
    if args.figures:
        payload["figure"] = plots.slit_domain_figure(
            sm, plots.figure_dir(args.figures, "slit_domain.png")
        )
    return _emit(args, "beta build", payload)


def cmd_beta_verify(args):
    punctures = args.punctures
    if punctures is None:
        punctures = tuple(float(i) for i in range(len(args.weights)))
    sm = slit.build_slit_map(punctures, args.weights)
    t0 = time.perf_counter()
    rep = slit.verify_beta_conditions(
        sm, grid=args.grid, tol=args.tol, end_tol=args.end_tol
    )
    payload = {"slit_map": sm.to_dict(), "checks": rep.to_dict()}
    if args.figures:
        payload["figure"] = plots.slit_domain_figure(
            sm, plots.figure_dir(args.figures, "slit_domain.png")
        )
    return _emit(args, "beta verify", payload, passed=rep.passed,
                 elapsed=time.perf_counter() - t0)


def cmd_beta_glue(args):
    outer = slit.build_slit_map(args.outer_punctures, args.outer_weights)
    inner = slit.build_slit_map(args.inner_punctures, args.inner_weights)
    rows = slit.gluing_residual(outer, inner, args.slot, args.lengths)
    decreasing = all(
        rows[i + 1]["residual"] < rows[i]["residual"] for i in range(len(rows) - 1)
    )
    payload = {
        "outer": outer.to_dict(),
        "inner": inner.to_dict(),
        "residuals": rows,
        "decreasing": decreasing,
    }
    if args.figures:
        payload["figure"] = plots.gluing_figure(
            rows, plots.figure_dir(args.figures, "gluing_residual.png")
        )
    return _emit(args, "beta glue", payload, passed=decreasing)


# ---------------------------------------------------------------------------
# trees


def cmd_trees_enumerate(args):
    if args.space == "M":
        ts = trees.enumerate_trees(args.k)
        payload = {
            "k": args.k,
            "count": len(ts),
            "shapes": [trees.shape_key(t.shape) for t in ts],
        }
    else:
        strata = (
            trees.enumerate_strata_N(args.k)
            if args.space == "N"
            else trees.enumerate_strata_L(args.k)
        )
        payload = {
            "k": args.k,
            "space": args.space,
            "count": len(strata),
            "top_dimension": max(dim for _, dim in strata),
            "cells": [
                {**cell.to_dict(), "dimension": dim} for cell, dim in strata
            ],
        }
    return _emit(args, "trees enumerate", payload)


def cmd_trees_facets(args):
    facets = (
        trees.boundary_facets_N(args.k)
        if args.space == "N"
        else trees.boundary_facets_L(args.k)
    )
    terms = (
        ainfty.functor_relation_terms(args.k)
        if args.space == "N"
        else ainfty.homotopy_relation_terms(args.k)
    )
    bijection = Counter(f.relation_term for f in facets) == Counter(terms)
    payload = {
        "k": args.k,
        "space": args.space,
        "count": len(facets),
        "relation_term_bijection": bijection,
        "facets": [f.to_dict() for f in facets],
    }
    return _emit(args, "trees facets", payload, passed=bijection)


# ---------------------------------------------------------------------------
# signs


def cmd_signs_verify(args):
    name = {"m": "m-composition", "f": "f-composition", "fprime": "fprime-composition"}[
        args.identity
    ]
    t0 = time.perf_counter()
    rep = signs.verify_identity(
        name, degree_range=range(args.deg_max + 1), d_max=args.arity_max
    )
    payload = rep.to_dict()
    if rep.counterexample is not None:
        payload["revalidation"] = signs.revalidate_counterexample(rep.counterexample)
    return _emit(args, "signs verify", payload, passed=rep.passed,
                 elapsed=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# ainfty


def cmd_ainfty_verify(args):
    if (args.infile is None) == (args.fixture is None):
        raise InvalidInput("provide exactly one of --in or --fixture")
    if args.fixture:
        obj = {
            "dga": ainfty.dga_fixture,
            "functor": lambda: ainfty.theta_functor(),
            "homotopy": ainfty.theta_homotopy,
        }[args.fixture]()
    else:
        obj = ainfty.load_document(args.infile)
    if args.kind == "m":
        if not isinstance(obj, ainfty.AInftyCategory):
            raise InvalidInput("--kind m needs a category document")
        rep = ainfty.verify_ainfty(obj, args.kmax)
    elif args.kind == "f":
        if not isinstance(obj, ainfty.AInftyFunctor):
            raise InvalidInput("--kind f needs a functor document")
        rep = ainfty.verify_functor(obj, args.kmax)
    else:
        if not isinstance(obj, ainfty.AInftyHomotopy):
            raise InvalidInput("--kind h needs a homotopy document")
        rep = ainfty.verify_homotopy(obj, args.kmax, club_reading=args.club_reading)
    return _emit(args, "ainfty verify", rep.to_dict(), passed=rep.passed)


# ---------------------------------------------------------------------------
# chords


def _gram_arg(text):
    vals = text.split(",")
    if len(vals) != 3:
        raise InvalidInput("Gram matrix argument must be a,b,c")
    return tuple(vals)


def cmd_chords_spectrum(args):
    if args.model == "t3":
        cutoff = args.cutoff if args.cutoff is not None else "-8"
        classes = spectra.enumerate_chords_T3(h=args.h, cutoff=cutoff)
    else:
        cutoff = args.cutoff if args.cutoff is not None else "-2"
        classes = spectra.enumerate_chords_T2(gram=_gram_arg(args.gram), cutoff=cutoff)
    payload = {
        "model": args.model,
        "cutoff": str(cutoff),
        "count_nonconstant": sum(1 for c in classes if not c.constant_family),
        "action_gap": str(spectra.action_gap(classes)),
        "max_fiber_norm": spectra.max_fiber_norm(classes),
        "classes": [c.to_dict() for c in classes],
    }
    if args.csv:
        rows = [c.to_dict() for c in classes]
        for r in rows:
            r["wrap"] = str(r["wrap"])
        payload["csv"] = report.write_csv(args.csv, rows)
    if args.figures:
        payload["figure"] = plots.spectrum_figure(
            classes, plots.figure_dir(args.figures, "spectrum.png")
        )
    return _emit(args, "chords spectrum", payload)


def cmd_chords_lipschitz(args):
    def mat(text):
        a, b, c = (float(x) for x in _gram_arg(text))
        return np.array([[a, b], [b, c]])

    c = spectra.lipschitz_constant(mat(args.g1), mat(args.g2))
    return _emit(args, "chords lipschitz", {"constant": c})


def cmd_chords_xh(args):
    if len(args.point) != 6:
        raise InvalidInput("--point needs 6 coordinates q1,q2,q3,p1,p2,p3")
    q, p = np.array(args.point[:3]), np.array(args.point[3:])
    H = spectra.hamiltonian_model(args.chart)
    qd, pd = spectra.hamiltonian_vector_field(H, q, p)
    qc, pc = spectra.xh_closed_form(q, p, args.chart)
    resid = float(max(np.max(np.abs(qd - qc)), np.max(np.abs(pd - pc))))
    payload = {
        "chart": args.chart,
        "qdot": qc.tolist(),
        "pdot": pc.tolist(),
        "fd_residual": resid,
    }
    return _emit(args, "chords xh", payload, passed=resid < args.tol)


# ---------------------------------------------------------------------------
# grading


def cmd_grading_rs(args):
    with open(args.path) as fh:
        path_doc = json.load(fh)
    with open(args.ref) as fh:
        ref_doc = json.load(fh)
    path, start = grading.path_from_dict(path_doc)
    ref = grading.frame_from_dict(ref_doc)
    res = grading.robbin_salamon_index(path, start, ref)
    return _emit(args, "grading rs", res.to_dict())


# ---------------------------------------------------------------------------
# suite


DEFAULT_CHECKS = (
    "slit",
    "gluing",
    "trees",
    "facets",
    "signs-m",
    "signs-f",
    "signs-fprime",
    "ainfty",
    "spectra",
    "xh",
    "grading",
)


def _suite_config(args):
    cfg = {}
    path = args.config or os.environ.get("FLOERBENCH_CONFIG")
    if path:
        with open(path) as fh:
            cfg = json.load(fh)
    checks = cfg.get("checks", list(DEFAULT_CHECKS))
    ranges = {"deg_max": 3, "d_max": 4, "k_max": 4, **cfg.get("ranges", {})}
    tols = {"beta": 1e-9, "end": 1e-6, "xh": 1e-10, "round_trip": 1e-8,
            **cfg.get("tolerances", {})}
    seed = cfg.get("seed", args.seed)
    return checks, ranges, tols, seed


def _check_slit(ranges, tols, rng):
    sm = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    ok = sm.critical_points[0] == 0.5
    ok &= abs(sm.slit_params[0] + 2 * math.log(2) / math.pi) < 1e-12
    rep = slit.verify_beta_conditions(sm, grid=100, tol=tols["beta"], end_tol=tols["end"])
    ok &= rep.passed
    k = int(rng.integers(2, 4))
    w = tuple(rng.uniform(0.5, 2.0, k))
    a = (0.0,) + tuple(np.cumsum(rng.uniform(0.3, 2.0, k - 1)))
    back = slit.invert_slit_params(w, slit.build_slit_map(a, w).slit_params)
    ok &= max(abs(x - y) for x, y in zip(a, back)) < tols["round_trip"]
    return bool(ok), f"worked example, one-form checks, round trip at k={k}"


def _check_gluing(ranges, tols, rng):
    inner = slit.build_slit_map((0.0, 1.0), (1.0, 1.0))
    outer = slit.build_slit_map((0.0, 1.5), (2.0, 1.0))
    rows = slit.gluing_residual(outer, inner, 1, (2.0, 4.0, 8.0))
    ok = all(rows[i + 1]["residual"] < rows[i]["residual"] for i in range(len(rows) - 1))
    return ok, "residual decreases over lengths 2, 4, 8"


def _check_trees(ranges, tols, rng):
    expected = {2: 1, 3: 3, 4: 11, 5: 45}
    ok = True
    for k, want in expected.items():
        ts = trees.enumerate_trees(k)
        ok &= len(ts) == want
        strata = trees.enumerate_strata_N(k)
        ok &= max(d for _, d in strata) == k - 1
    return bool(ok), "tree counts and top cell dimension through k=5"

def _check_facets(ranges, tols, rng):
    ok = True
    for k in range(2, ranges["k_max"] + 1):
        ok &= Counter(f.relation_term for f in trees.boundary_facets_N(k)) == Counter(
            ainfty.functor_relation_terms(k)
        )
        ok &= Counter(f.relation_term for f in trees.boundary_facets_L(k)) == Counter(
            ainfty.homotopy_relation_terms(k)
        )
    return bool(ok), f"facet/term bijection through k={ranges['k_max']}"


def _check_signs(which):
    def run(ranges, tols, rng):
        rep = signs.verify_identity(
            which, degree_range=range(ranges["deg_max"] + 1), d_max=ranges["d_max"]
        )
        if which != "fprime-composition":
            return rep.passed, f"exhaustive over {rep.checked} configurations"
        if rep.passed:
            return True, "identity held exhaustively"
        val = signs.revalidate_counterexample(rep.counterexample)
        ok = val["mismatch"] and val["matches_report"]
        return ok, (
            "identity fails as stated; least counterexample independently "
            f"confirmed at d={rep.counterexample['d']}, parts="
            f"{rep.counterexample['parts']}"
        )

    return run


def _check_ainfty(ranges, tols, rng):
    cat = ainfty.dga_fixture()
    ok = ainfty.verify_ainfty(cat, 5).passed
    ok &= ainfty.verify_functor(ainfty.theta_functor(cat), 3).passed
    H = ainfty.theta_homotopy()
    ok &= ainfty.verify_homotopy(H, 3).passed
    ok &= not ainfty.verify_homotopy(H, 3, club_reading="lam").passed
    return bool(ok), "fixtures pass; alternative block-sign reading is rejected"


def _check_spectra(ranges, tols, rng):
    sp = spectra.enumerate_chords_T3()
    ok = sum(1 for c in sp if not c.constant_family) == 8
    ok &= spectra.action_gap(sp) == Fraction(1, 2)
    ok &= all(c.action <= -spectra.action_gap(sp) for c in sp if not c.constant_family)
    ok &= sum(1 for c in spectra.enumerate_chords_T2() if not c.constant_family) == 12
    G = np.array([[2.0, 0.5], [0.5, 1.0]])
    c = 1.0 + float(rng.uniform(0.1, 3.0))
    ok &= abs(spectra.lipschitz_constant(G, c * G) - c) < 1e-12 * c
    rep = spectra.quadratic_rescale_check([0.5, 2.0, 3.0])
    ok &= rep["max_residual"] < 1e-12 and rep["relabel_exact"]
    return bool(ok), "spectrum counts, gap, Lipschitz scaling, rescaling"


def _check_xh(ranges, tols, rng):
    worst = 0.0
    for chart in ("a", "r"):
        H = spectra.hamiltonian_model(chart)
        for _ in range(20):
            q = rng.uniform(0.2, 2.0, 3)
            p = rng.uniform(-2.0, 2.0, 3)
            qd, pd = spectra.hamiltonian_vector_field(H, q, p)
            qc, pc = spectra.xh_closed_form(q, p, chart)
            worst = max(worst, float(np.max(np.abs(qd - qc))), float(np.max(np.abs(pd - pc))))
    return worst < tols["xh"], f"worst deviation {worst:.2e} over both charts"


def _check_grading(ranges, tols, rng):
    rot = grading.SymplecticPath.rotation(np.pi)
    hor = grading.LagrangianFrame.horizontal(1)
    ok = grading.robbin_salamon_index(rot, hor, hor).value == 1
    const = grading.SymplecticPath(lambda t: np.eye(2), 1)
    ok &= grading.robbin_salamon_index(const, hor, grading.LagrangianFrame.vertical(1)).index2 == 0
    chord = spectra.enumerate_chords_T3()[1]
    ok &= grading.chord_index(chord).value == Fraction(-1, 2)
    for _ in range(3):
        S = grading.random_symmetric(rng, 2)
        p = grading.SymplecticPath.from_generators([S], 1)
        fwd = grading.robbin_salamon_index(p, hor, grading.LagrangianFrame.vertical(1))
        bwd = grading.robbin_salamon_index(
            grading.reverse_path(p), hor, grading.LagrangianFrame.vertical(1)
        )
        ok &= fwd.index2 == -bwd.index2
    return bool(ok), "known values, chord index, reversal"


SUITE_TABLE = {
    "slit": _check_slit,
    "gluing": _check_gluing,
    "trees": _check_trees,
    "facets": _check_facets,
    "signs-m": _check_signs("m-composition"),
    "signs-f": _check_signs("f-composition"),
    "signs-fprime": _check_signs("fprime-composition"),
    "ainfty": _check_ainfty,
    "spectra": _check_spectra,
    "xh": _check_xh,
    "grading": _check_grading,
}


def cmd_suite(args):
    checks, ranges, tols, seed = _suite_config(args)
    rng = np.random.default_rng(seed)
    results = []
    all_ok = True
    t0 = time.perf_counter()
    for name in checks:
        if name not in SUITE_TABLE:
            raise InvalidInput(f"unknown suite check {name!r}")
        t1 = time.perf_counter()
        ok, detail = SUITE_TABLE[name](ranges, tols, rng)
        results.append(
            {
                "name": name,
                "passed": ok,
                "detail": detail,
                "elapsed_s": round(time.perf_counter() - t1, 3),
            }
        )
        all_ok &= ok
        if not args.json and not args.out:
            print(report.pass_line(name, ok, detail))
    payload = {"checks": results, "ranges": ranges, "tolerances": tols}
    if args.json or args.out:
        rep = report.make_report(
            "suite", payload, passed=all_ok, seed=seed,
            elapsed=time.perf_counter() - t0,
        )
        report.emit(rep, as_json=args.json, out=args.out)
    return PASS if all_ok else FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (NumericFailure, DegenerateCrossing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    except FloerbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
