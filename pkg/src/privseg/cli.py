"""Command-line entry point: ``privseg <subcommand> --input doc.json``.

Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analysis, geometry, measure, oracle, svg
from .lp import LinearProgram, NumericalError, solve, solve_exact
from .model import AGGREGATE_ATOL, MASS_ATOL, Market, Segmentation, ValueGrid
from .pricing import PricingRegions
from .segmentation import PricedSegmentation, build_segmentation, first_degree_segmentation
from .simulation import DEFAULT_TRIALS, simulate

SCHEMA = 1
EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3


class DocumentError(ValueError):
    pass


@dataclass
class ProblemDocument:
    grid: ValueGrid
    aggregate: Market
    beta: float
    seed: int = 0
    samples: int = measure.DEFAULT_SAMPLES
    trials: int = DEFAULT_TRIALS
    beta_grid: Optional[list] = None
    segmentation: Optional[object] = None

    @classmethod
    def from_json(cls, obj) -> "ProblemDocument":
        if not isinstance(obj, dict):
            raise DocumentError("document must be a JSON object")
        for key in ("values", "aggregate", "beta"):
            if key not in obj:
                raise DocumentError(f"missing field {key!r}")
        try:
            grid = ValueGrid(obj["values"])
        except (TypeError, ValueError) as e:
            raise DocumentError(f"values: {e}") from None
        agg = obj["aggregate"]
        if not isinstance(agg, list) or len(agg) != grid.K:
            raise DocumentError(f"aggregate must be a list of {grid.K} numbers")
        try:
            agg = np.array(agg, dtype=float)
        except (TypeError, ValueError):
            raise DocumentError("aggregate entries must be numbers") from None
        if abs(agg.sum() - 1.0) > AGGREGATE_ATOL:
            raise DocumentError(f"aggregate sums to {agg.sum():.12g}, not 1")
        try:
            aggregate = Market(agg if abs(agg.sum() - 1.0) <= MASS_ATOL else agg / agg.sum())
        except ValueError as e:
            raise DocumentError(f"aggregate: {e}") from None
        beta = _number(obj["beta"], "beta")
        if not 0 <= beta <= 1:
            raise DocumentError("beta must lie in [0, 1]")
        doc = cls(grid, aggregate, beta)
        for key in ("seed", "samples", "trials"):
            if key in obj:
                val = obj[key]
                if not isinstance(val, int) or isinstance(val, bool) or val < (0 if key == "seed" else 1):
                    raise DocumentError(f"{key} must be a {'nonnegative' if key == 'seed' else 'positive'} integer")
                setattr(doc, key, val)
        if "beta_grid" in obj:
            doc.beta_grid = parse_beta_grid(obj["beta_grid"]) if isinstance(obj["beta_grid"], str) else [_number(b, "beta_grid") for b in obj["beta_grid"]]
        if "segmentation" in obj:
            doc.segmentation = _parse_segmentation(obj["segmentation"], aggregate, grid.K)
        return doc


def _number(x, name) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise DocumentError(f"{name} must be a finite number")
    return float(x)


def _parse_segmentation(segs, aggregate, K):
    if not isinstance(segs, list) or not segs:
        raise DocumentError("segmentation must be a non-empty list of segments")
    try:
        parts = []
        for s in segs:
            m = s["market"]
            if len(m) != K:
                raise DocumentError("segment market length does not match values")
            parts.append((s["weight"], Market(m), s.get("price_index")))
        if all(p[2] is not None for p in parts):
            return PricedSegmentation(tuple(parts), aggregate)
        return Segmentation(tuple((g, m) for g, m, _ in parts), aggregate)
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"segmentation: {e}") from None


def parse_beta_grid(text: str) -> list:
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise DocumentError("beta grid must look like a:b:step") from None
    if step <= 0 or b < a:
        raise DocumentError("beta grid needs a <= b and step > 0")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + k * step, 12) for k in range(n)]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in r) + "\n")
    return out.getvalue()


def _json(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2, allow_nan=False) + "\n"


def _shift(doc, args):
    return measure.shift_vector(doc.beta, doc.aggregate, doc.grid, args.samples or doc.samples, _seed(doc, args))


def _seed(doc, args):
    return doc.seed if args.seed is None else args.seed


# ---------------------------------------------------------------------------
# subcommands; each returns the stdout text


def cmd_regions(doc, args):
    reg = PricingRegions.compute(doc.beta, doc.grid)
    est = measure.region_probabilities(doc.beta, doc.grid, args.samples or doc.samples, _seed(doc, args))
    out = {
        "beta": doc.beta,
        "bar_beta": reg.bar_beta.tolist(),
        "feasible": [bool(f) for f in reg.feasible],
        "region_probabilities": [e.value for e in est],
        "std_errors": [e.std_error for e in est],
        "samples": est[0].samples,
    }
    t = reg.tstar()
    if t is not None:
        out["tstar"] = t
    return _json(out)


def cmd_shift(doc, args):
    return _json({"beta": doc.beta, **_shift(doc, args).to_dict()})


def _polygons(doc, args):
    sh = _shift(doc, args)
    sprime = None
    if doc.beta < 1 - geometry.DEGENERATE_BETA:
        sprime = geometry.project_sprime(doc.grid, doc.aggregate, doc.beta, exact=args.exact)
    S = geometry.surplus_set(doc.grid, doc.aggregate, doc.beta, sh, sprime=sprime)
    return sh, sprime, S


def cmd_polygon(doc, args):
    _, sprime, S = _polygons(doc, args)
    target = sprime if args.pre_shift and sprime is not None else S
    if args.svg:
        ref = geometry.unmasked_triangle(doc.grid, doc.aggregate)
        layers = [(ref.vertices, {"stroke": "gray", "dashed": True}), (target.vertices, {"stroke": "navy", "fill": "steelblue"})]
        with open(args.svg, "w") as fh:
            fh.write(svg.render(layers, f"beta = {doc.beta:g}"))
    return _csv(("consumer", "producer"), [(float(a), float(b)) for a, b in target.vertices])


def cmd_segment(doc, args):
    try:
        tc, tp = (float(t) for t in args.target.split(","))
    except ValueError:
        raise DocumentError("--target must look like consumer,producer") from None
    if doc.beta >= 1:
        raise DocumentError("no segmentation choice matters at beta = 1")
    sh = _shift(doc, args)
    b = doc.beta
    goal = np.array([(tc - b * sh.consumer) / (1 - b), (tp - b * sh.producer) / (1 - b)])
    poly = geometry.build_polytope(doc.grid, doc.aggregate, b)
    cons, prod = geometry.surplus_coefficients(doc.grid)
    lp = LinearProgram(
        poly.n_vars,
        list(goal[0] * cons + goal[1] * prod),
        poly.A_ub,
        poly.b_ub,
        poly.A_eq + [list(cons), list(prod)],
        poly.b_eq + [goal[0], goal[1]],
        nonneg=True,
    )
    sol = solve_exact(lp) if args.exact else solve(lp)
    if not sol.optimal:
        raise NumericalError(f"target ({tc}, {tp}) is not attainable at beta={b} (LP {sol.status})")
    seg = build_segmentation(np.asarray(sol.point, dtype=float), doc.grid, doc.aggregate, b)
    got = seg.surplus_point(doc.grid, b, sh)
    return _json({"beta": b, "target": [tc, tp], "achieved": list(got), **seg.to_dict()})


def cmd_analyze(doc, args):
    d = analysis.diagnose(doc.grid, doc.aggregate, doc.beta, samples=args.samples or doc.samples, seed=_seed(doc, args))
    return _json({"beta": doc.beta, **d.to_dict()})


def cmd_curves(doc, args):
    betas = parse_beta_grid(args.beta_grid) if args.beta_grid else doc.beta_grid
    if not betas:
        raise DocumentError("curves needs --beta-grid or a beta_grid field")
    rows = analysis.extrema_curves(doc.grid, doc.aggregate, betas, samples=args.samples or doc.samples, seed=_seed(doc, args), exact=args.exact)
    keys = ["beta", "max_producer", "min_producer", "max_consumer", "min_consumer"]
    if doc.grid.K == 2:
        keys += ["closed_max_producer", "closed_min_consumer"]
    return _csv(keys, [[r.get(k, "") for k in keys] for r in rows])


def cmd_simulate(doc, args):
    seg = doc.segmentation if doc.segmentation is not None else first_degree_segmentation(doc.aggregate)
    trials = args.trials or doc.trials
    rep = simulate(seg, doc.beta, doc.grid, trials, _seed(doc, args), args.tie_policy, analytic_samples=args.samples or doc.samples)
    return _json({"beta": doc.beta, "trials": trials, **rep.to_dict()})


def cmd_oracle(doc, args):
    D = args.lattice
    if D is None or D < 1:
        raise DocumentError("oracle needs --lattice D with D >= 1")
    sh = _shift(doc, args)
    cloud = oracle.enumerate_cloud(doc.grid, doc.aggregate, doc.beta, D, shift=sh)
    if doc.beta < 1 - geometry.DEGENERATE_BETA:
        S = geometry.surplus_set(doc.grid, doc.aggregate, doc.beta, sh, exact=args.exact)
    else:
        S = geometry.surplus_set(doc.grid, doc.aggregate, doc.beta, sh)
    viol, excess = oracle.containment_report(cloud, S)
    report = {**cloud.to_dict(), "violations": viol, "max_excess": excess if math.isfinite(excess) else None}
    if len(cloud) and len(S) >= 1:
        report["hull_hausdorff"] = oracle.hull_distance(cloud, S)
    text = _json(report)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return _csv(("consumer", "producer"), [(float(a), float(b)) for a, b in cloud.points])


COMMANDS = {
    "regions": cmd_regions,
    "shift": cmd_shift,
    "polygon": cmd_polygon,
    "segment": cmd_segment,
    "analyze": cmd_analyze,
    "curves": cmd_curves,
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", default="-", help="problem document (JSON file or - for stdin)")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int, help="Monte Carlo samples for region probabilities")
    common.add_argument("--exact", action="store_true", help="solve LPs in rational arithmetic")
    p = _Parser(prog="privseg", description="Attainable utilities of market segmentation under market masking.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "polygon":
            sp.add_argument("--svg", help="also write an SVG figure")
            sp.add_argument("--pre-shift", action="store_true", help="emit S' instead of S")
        elif name == "segment":
            sp.add_argument("--target", required=True, help="consumer,producer")
        elif name == "curves":
            sp.add_argument("--beta-grid", help="a:b:step")
        elif name == "simulate":
            sp.add_argument("--trials", type=int)
            sp.add_argument("--tie-policy", default="uniform", choices=["uniform", "lowest", "highest", "assigned"])
        elif name == "oracle":
            sp.add_argument("--lattice", type=int, required=True)
            sp.add_argument("--report", help="write the containment report here instead of stderr")
    return p


def _load(path):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e}") from None


def dispatch(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID
    try:
        if args.samples is not None and args.samples < 1:
            raise DocumentError("--samples must be positive")
        if getattr(args, "trials", None) is not None and args.trials < 1:
            raise DocumentError("--trials must be positive")
        doc = ProblemDocument.from_json(_load(args.input))
        text = COMMANDS[args.command](doc, args)
    except NumericalError as e:
        sys.stderr.write(f"numerical failure: {e}\n")
        return EXIT_NUMERIC
    except (DocumentError, ValueError) as e:
        sys.stderr.write(f"invalid input: {e}\n")
        return EXIT_INVALID
    sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(dispatch())
