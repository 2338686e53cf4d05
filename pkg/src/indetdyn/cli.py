"""Command-line front end: analysis, the staged pipeline and the acceptance gate.

Exit codes: 0 success, 2 hypothesis violation, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import mpmath as mp

from . import escape as esc
from .errors import (ConstantAtInfinity, HypothesisViolation, IndetDynError, NoIndeterminacy,
                     NotInClass, ParseError)
from .fixtures import get_fixture
from .gclass import GMap, attraction_criterion
from .green_weights import lambda_table, trace_measure
from .numbers import format_fraction
from .orbit_lab import (build_boxes, certify_tree, example3_boxes, example3_mass_collapse,
                        example3_region_check, green_function_seq, horizontal_like_certificate,
                        iterate_orbit)
from .sphere_dyn import build_etree_checked, hyperbolicity_probe, periodicity_check, ProjPoint
from .subshift import RNG_DOC, build_model, transitivity_check, verify_invariance

EXIT_OK, EXIT_HYPOTHESIS, EXIT_NUMERIC = 0, 2, 3
STAGES = ("analyze", "etree", "weights", "subshift", "escape", "orbit")


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (mp.mpf, mp.mpc)):
        return mp.nstr(x, 17)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def load_map(args) -> GMap:
    if args.map:
        path = Path(args.map)
        if not path.exists():
            raise ParseError(f"map file {path} does not exist")
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        try:
            f = GMap.from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: malformed map description ({exc})") from exc
    else:
        f = get_fixture(args.fixture)
    return f.to_float() if args.backend == "float" else f


def _config(args) -> dict:
    return {"map": args.map, "fixture": None if args.map else args.fixture, "depth": args.depth,
            "seed": args.seed, "backend": args.backend, "rest_mode": args.rest_mode,
            "node_cap": args.node_cap, "eps_match": args.eps_match, "snap_tol": args.snap_tol,
            "samples": args.samples}


def _is_exceptional_example(f) -> bool:
    """One indeterminacy point at u = 0, totally invariant under u -> u^2."""
    pts = f.indeterminacy()
    if len(pts) != 1 or not pts[0].point.close(ProjPoint.make(0, 1)):
        return False
    g = f.f_inf()
    return g.degree == 2 and all(g(ProjPoint.from_u(u)).close(ProjPoint.from_u(u * u), 1e-9)
                                 for u in (Fraction(1, 3), Fraction(2, 5), Fraction(-3, 7)))


class Pipeline:
    """Runs the stages in order; a failed stage marks the later ones SKIPPED."""

    def __init__(self, f, args):
        self.f, self.args = f, args
        self.report = {"stages": {}, "warnings": []}
        self.csv = {}
        self.ctx = {}
        self.exit = EXIT_OK

    def warn(self, msg):
        self.report["warnings"].append(msg)

    def run(self, stages):
        failed = None
        for name in stages:
            if failed:
                self.report["stages"][name] = {"status": "SKIPPED", "reason": f"stage {failed} failed"}
                continue
            try:
                block = getattr(self, "stage_" + name)()
                self.report["stages"][name] = {"status": "OK", **block}
            except HypothesisViolation as exc:
                failed = name
                self.exit = max(self.exit, EXIT_HYPOTHESIS)
                self.report["stages"][name] = {"status": "FAILED", "kind": "hypothesis",
                                               "reason": str(exc)}
            except IndetDynError as exc:
                failed = name
                self.exit = EXIT_NUMERIC
                self.report["stages"][name] = {"status": "FAILED", "kind": type(exc).__name__,
                                               "reason": str(exc)}
        return self

    # -- stages -------------------------------------------------------------
    def stage_analyze(self):
        f = self.f
        crit = attraction_criterion(f)
        per = periodicity_check(f)
        for rep in per:
            if rep.status != "Clear":
                self.warn(f"indeterminacy point {rep.index}: {rep.status} after {rep.k} step(s)")
        hyp = hyperbolicity_probe(f.f_inf())
        self.ctx["periodic"] = any(r.status == "Periodic" for r in per)
        return {"D": f.D, "d": f.d, "dprime": f.dprime, "normal_form": f.to_json(),
                "indeterminacy": [ip.to_json() for ip in f.indeterminacy()],
                "f_inf": {"num": f.P1.to_json(), "den": f.P2.to_json()},
                "criterion": crit.to_json(), "periodicity": [r.to_json() for r in per],
                "hyperbolicity": _jsonable({k: v for k, v in hyp.items() if k != "critical_points"}),
                "tolerance": {"eps_match": 1e-9, "eps_cluster": 1e-6}}

    def stage_etree(self):
        tree = build_etree_checked(self.f, self.args.depth, self.args.node_cap)
        self.ctx["tree"] = tree
        self.csv["etree"] = tree.to_csv()
        return {"nodes": len(tree.nodes), "depth": tree.depth_max,
                "collisions": sum(nd.is_collision for nd in tree.nodes)}

    def stage_weights(self):
        table = lambda_table(self.ctx["tree"], self.f)
        self.ctx["table"] = table
        self.csv["weights"] = table.to_csv()
        out = table.to_json()
        out["trace_residual"] = format_fraction(trace_measure(table).residual)
        return out

    def stage_subshift(self):
        if self.ctx.get("periodic"):
            self.exit = max(self.exit, EXIT_HYPOTHESIS)
            self.warn("subshift: a periodic indeterminacy point is outside the decomposition's hypotheses")
        m = build_model(self.f, self.ctx["tree"], self.ctx["table"], self.args.rest_mode)
        self.ctx["model"] = m
        self.csv["subshift"] = m.to_csv()
        inv = verify_invariance(m)
        tr = transitivity_check(m)
        return {"model": m.to_json(), "invariance": _jsonable(inv),
                "transitivity": {k: tr[k] for k in ("all_reachable", "schedule_ok", "matches_schedule")},
                "rng": RNG_DOC}

    def stage_escape(self):
        f = self.f
        exps = esc.exponents_for(f, seed=self.args.seed, snap_tol=self.args.snap_tol)
        self.ctx["exponents"] = exps
        out = {"exponents": [e.to_json() for e in exps]}
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                out["topological_degree"] = esc.topological_degree(f, exps)
            except IndetDynError as exc:
                out["topological_degree"] = None
                out["topological_degree_error"] = str(exc)
        for w in caught:
            self.warn(f"escape: {w.message}")
        if f.exact:
            out["preimage_count"] = esc.count_preimages_numeric(f, (0, 1), seed=self.args.seed,
                                                                eps_match=self.args.eps_match)
        out["range"] = esc.escape_range(exps, f.D)
        out["mean_escape_rate"] = esc.mean_escape_rate(self.ctx["table"], exps, f)
        out["lambda_outside"] = 1 - sum(float(x) for x in esc.lambda_indet(self.ctx["table"], f))
        if not self.ctx.get("periodic"):
            m = build_model(f, self.ctx["tree"], self.ctx["table"], "reinject")
            out["birkhoff"] = esc.birkhoff_check(f, self.ctx["tree"], m, self.ctx["table"], exps,
                                                 n_words=self.args.samples, length=500,
                                                 seed=self.args.seed)
        return out

    def stage_orbit(self):
        f = self.f
        if self.ctx.get("periodic"):
            if not _is_exceptional_example(f):
                raise HypothesisViolation("periodic indeterminacy without a supported special layout")
            return self._orbit_exceptional()
        tree = self.ctx["tree"]
        depth = min(tree.depth_max, 4)
        boxes = build_boxes(f, tree, depth=depth)
        certs = certify_tree(f, tree, boxes, seed=self.args.seed)
        out = {"boxes": [b.to_json() for b in boxes],
               "certificates": [{k: v for k, v in c.items()} for c in certs],
               "slice_equals_transition": all(c["slice_degree"] == c["transition_degree"] for c in certs)}
        b0 = boxes[0]
        start = (b0.chart, complex(b0.s_c) + b0.disk_radius / 3, b0.v_bound / 2)
        rec = iterate_orbit(f, start, 8, boxes)
        self.csv["orbit"] = rec.to_csv()
        out["green_sequence"] = green_function_seq(f, (2, 3), 12)
        m = build_model(f, tree, self.ctx["table"], depth=depth)
        law = esc.itinerary_escape_law_check(f, m, tree, boxes, self.ctx["exponents"],
                                             word_length=26, n_orbits=10, seed=self.args.seed)
        self.csv["escape_law"] = law.to_csv()
        out["escape_law"] = law.to_json()
        return out

    def _orbit_exceptional(self):
        f = self.f
        bx = example3_boxes()
        certs = {}
        for a, b in ((1, 0), (1, 2), (2, 2)):
            certs[f"{bx[a].id}->{bx[b].id}"] = horizontal_like_certificate(f, bx[a], bx[b],
                                                                           seed=self.args.seed)
        degs = tuple(certs[k]["slice_degree"] for k in ("D1->D0", "D1->D2", "D2->D2"))
        mass = example3_mass_collapse(20, degrees=degs, D=f.D)
        region = example3_region_check(100_000, seed=self.args.seed)
        self.csv["mass_collapse"] = "step,m1,m2\n" + "".join(
            f"{k},{format_fraction(a)},{format_fraction(b)}\n" for k, (a, b) in enumerate(mass["history"]))
        mass = {k: v for k, v in mass.items() if k != "history"}
        return {"layout": "exceptional", "boxes": [b.to_json() for b in bx], "certificates": certs,
                "mass_collapse": _jsonable(mass), "region": region}


def _write(out: Path, report: dict, csvs: dict):
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    for name, text in csvs.items():
        (out / f"{name}.csv").write_text(text)


def _run(args, stages) -> int:
    cfg = _config(args)
    try:
        f = load_map(args)
    except (ConstantAtInfinity, NoIndeterminacy, NotInClass) as exc:
        print(f"error: map outside the class: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except IndetDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    pipe = Pipeline(f, args).run(stages)
    from .discrepancies import discrepancies
    report = {"provenance": {"config": cfg,
                             "config_hash": hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest(),
                             "seed": args.seed, "backend": args.backend},
              **pipe.report}
    if args.command == "pipeline":
        report["printed_value_discrepancies"] = [c.to_json() for c in discrepancies()]
    _write(Path(args.out), report, pipe.csv)
    for name, block in pipe.report["stages"].items():
        print(f"{name:9s} {block['status']}" + (f"  ({block['reason']})" if "reason" in block else ""))
    return pipe.exit


def cmd_verify(args) -> int:
    from .acceptance import run_all
    from .discrepancies import discrepancies
    results = run_all()
    for r in results:
        print(r.line())
    notes = discrepancies()
    for c in notes:
        print(f"discrepancy: {c.location}: printed {c.printed}; derived {c.derived}; "
              f"correction {c.correction}; oracle {c.oracle}")
    if args.out:
        _write(Path(args.out), {"criteria": [r.__dict__ for r in results],
                                "printed_value_discrepancies": [c.to_json() for c in notes]}, {})
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


STAGES_FOR = {
    "analyze": ("analyze",),
    "etree": ("analyze", "etree"),
    "subshift": ("analyze", "etree", "weights", "subshift"),
    "escape": ("analyze", "etree", "weights", "escape"),
    "orbit": ("analyze", "etree", "weights", "escape", "orbit"),
    "pipeline": STAGES,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="indetdyn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*STAGES_FOR, "verify"):
        sp = sub.add_parser(name)
        sp.add_argument("--out", default=None if name == "verify" else "out",
                        help="output directory for report.json and CSVs")
        if name == "verify":
            continue
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--map", help="JSON map file (normal form or {'f1', 'f2'} term lists)")
        src.add_argument("--fixture", default="example1",
                         help="example1..example3, example4 or example4:n1,n2,n")
        sp.add_argument("--depth", type=int, default=6)
        sp.add_argument("--node-cap", type=int, default=5000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--backend", choices=("float", "rational"), default="rational")
        sp.add_argument("--rest-mode", choices=("absorb", "reinject"), default="absorb")
        sp.add_argument("--eps-match", type=float, default=1e-7,
                        help="relative distance below which two preimages are one")
        sp.add_argument("--snap-tol", type=float, default=esc.SNAP_TOL,
                        help="distance within which a growth exponent snaps to an integer")
        sp.add_argument("--samples", type=int, default=2000, help="words in the Birkhoff check")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.depth < 1:
        print("error: --depth must be at least 1", file=sys.stderr)
        return EXIT_NUMERIC
    if min(args.eps_match, args.snap_tol, args.samples) <= 0:
        print("error: tolerances and sample counts must be positive", file=sys.stderr)
        return EXIT_NUMERIC
    return _run(args, STAGES_FOR[args.command])


if __name__ == "__main__":
    sys.exit(main())
