"""Command line front end.

Exit codes: 0 for success (and a true verdict), 1 for a false verdict or
failed oracle check, 2 for invalid input or usage errors. Every randomized
command takes --rng-seed and is bit-deterministic given it.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from .diagram import (
    brute_force_assign,
    construct_slvd,
    parse_gen,
    random_generators,
    random_sphere_points,
    serialize_gen,
)
from .errors import GeometryError, InvalidTessellation, ParseError
from .polyhedra import write_off
from .recognition import (
    algorithm1_seed,
    algorithm2_propagate,
    algorithm3_verify,
    default_seed_choice,
    recognize,
)
from .render import build_svg
from .sphere import polygon_edge_normals
from .tessellation import parse_tes, perturb_vertex, serialize_tes

BOUNDARY_BAND = 1e-6  # radians; samples this close to a region border are skipped


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _read(path: str) -> str:
    with open(path, "r", encoding="ascii") as fh:
        return fh.read()


def cmd_generate(args) -> int:
    if args.n < 4:
        raise ValueError(f"need at least 4 generators, got {args.n}")
    rng = np.random.default_rng(args.rng_seed)
    gens = random_generators(args.n, rng)
    text = serialize_gen(gens, comments=(f"n={args.n} rng-seed={args.rng_seed}",))
    _write_output(text, args.out)
    return 0


def cmd_construct(args) -> int:
    gens = parse_gen(_read(args.gen_file))
    fw = construct_slvd(gens)
    comments = (
        f"constructed from {args.gen_file}",
        "active " + " ".join(str(i) for i in fw.active),
    )
    _write_output(serialize_tes(fw.tessellation, comments=comments), args.out)
    if fw.dropped:
        print(f"dropped generators (empty regions): {' '.join(map(str, fw.dropped))}")
    else:
        print("dropped generators (empty regions): none")
    if args.off:
        _write_output(write_off(fw.polyhedron), args.off)
    return 0


def cmd_recognize(args) -> int:
    tess = parse_tes(_read(args.tes_file))
    report = tess.validate()
    if not report.ok:
        for issue in report.issues:
            print(f"invalid tessellation: {issue.message}", file=sys.stderr)
        return 2
    try:
        choice = default_seed_choice(tess, seed_vertex=args.seed_vertex,
                                     q_j_param=args.qj_param)
        result = recognize(tess, choice, eps_rec=args.eps_rec)
    except InvalidTessellation as exc:
        print(f"invalid tessellation: {exc}", file=sys.stderr)
        return 2
    if result.verdict:
        print(f"true (max radial residual {result.max_residual:.3e} rad)")
        if result.generators is not None:
            text = serialize_gen(
                result.generators,
                comments=(f"recovered from {args.tes_file} eps-rec={args.eps_rec}",))
            if args.out:
                _write_output(text, args.out)
            else:
                sys.stdout.write(text)
        return 0
    w = result.witness
    print(f"false (witness vertex {w.vertex}, residual {w.residual:.3e} rad)")
    return 1


def cmd_perturb(args) -> int:
    if args.magnitude <= 0:
        raise ValueError(f"perturbation magnitude must be positive, got {args.magnitude}")
    tess = parse_tes(_read(args.tes_file))
    rng = np.random.default_rng(args.rng_seed)
    index = int(rng.integers(tess.n_vertices))
    moved = perturb_vertex(tess, index, args.magnitude, rng)
    comments = (f"perturbed vertex {index} by {args.magnitude:.17g} rad "
                f"rng-seed={args.rng_seed}",)
    _write_output(serialize_tes(moved, comments=comments), args.out)
    print(f"perturbed vertex {index}")
    return 0


def cmd_render(args) -> int:
    tess = parse_tes(_read(args.tes_file))
    gens = parse_gen(_read(args.gen_file)) if args.gen_file else None
    _write_output(build_svg(tess, gens), args.out)
    return 0


def cmd_bench(args) -> int:
    if any(n < 4 for n in args.sizes):
        raise ValueError("bench sizes must be at least 4")
    rows = ["n,construct_ms,propagate_ms,verify_ms"]
    for n in args.sizes:
        construct_ms, propagate_ms, verify_ms = [], [], []
        for trial in range(args.trials):
            rng = np.random.default_rng([args.rng_seed, n, trial])
            gens = random_generators(n, rng)
            t0 = time.perf_counter()
            fw = construct_slvd(gens)
            t1 = time.perf_counter()
            tess = fw.tessellation
            choice = default_seed_choice(tess)
            t2 = time.perf_counter()
            planes = algorithm1_seed(tess, choice)
            pa = algorithm2_propagate(tess, choice.seed_vertex, planes)
            t3 = time.perf_counter()
            algorithm3_verify(tess, pa)
            t4 = time.perf_counter()
            construct_ms.append((t1 - t0) * 1e3)
            propagate_ms.append((t3 - t2) * 1e3)
            verify_ms.append((t4 - t3) * 1e3)
        rows.append(
            f"{n},{statistics.median(construct_ms):.3f},"
            f"{statistics.median(propagate_ms):.3f},"
            f"{statistics.median(verify_ms):.3f}")
    _write_output("\n".join(rows) + "\n", args.out)
    return 0


def oracle_mismatches(gens, fw, samples) -> tuple[int, int]:
    """(mismatches, excluded) between proximity argmax and face membership.

    A sample's geometric face is the one it sits deepest inside; samples
    whose clearance from that face's border is below BOUNDARY_BAND are
    excluded, as the two sides legitimately disagree within rounding there.
    """
    tess = fw.tessellation
    edge_normals = []
    owners = []
    for fi in range(tess.n_faces):
        ns = polygon_edge_normals(tess.face_polygon(fi))
        edge_normals.append(ns)
        owners.extend([fi] * len(ns))
    all_normals = np.vstack(edge_normals)
    owners = np.array(owners)

    winners, _ = brute_force_assign(gens, samples)
    mismatches = 0
    excluded = 0
    chunk = 8192
    for lo in range(0, len(samples), chunk):
        pts = samples[lo:lo + chunk]
        dots = pts @ all_normals.T
        margins = np.full((len(pts), tess.n_faces), np.inf)
        np.minimum.at(margins.T, owners, dots.T)
        best_face = np.argmax(margins, axis=1)
        best_margin = margins[np.arange(len(pts)), best_face]
        near_boundary = best_margin < np.sin(BOUNDARY_BAND)
        excluded += int(np.sum(near_boundary))
        expect = np.array([fw.active[f] for f in best_face])
        bad = (~near_boundary) & (expect != winners[lo:lo + chunk])
        mismatches += int(np.sum(bad))
    return mismatches, excluded


def cmd_oracle_check(args) -> int:
    gens = parse_gen(_read(args.gen_file))
    fw = construct_slvd(gens)
    rng = np.random.default_rng(args.rng_seed)
    samples = random_sphere_points(args.samples, rng)
    mismatches, excluded = oracle_mismatches(gens, fw, samples)
    print(f"samples={args.samples} excluded={excluded} mismatches={mismatches}")
    return 0 if mismatches == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherical-laguerre",
        description="Construct and recognize spherical Laguerre Voronoi diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, rng=True):
        p.add_argument("--out", help="output path (default: stdout)")
        if rng:
            p.add_argument("--rng-seed", type=int, default=0)

    p = sub.add_parser("generate", help="write a random generator (GEN) file")
    p.add_argument("n", type=int)
    add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("construct", help="build the diagram (TES) of a GEN file")
    p.add_argument("gen_file")
    p.add_argument("--off", help="also dump the polyhedron in OFF format")
    add_common(p, rng=False)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("recognize", help="decide whether a TES file is a Laguerre diagram")
    p.add_argument("tes_file")
    p.add_argument("--eps-rec", type=float, default=1e-6)
    p.add_argument("--seed-vertex", type=int, default=0)
    p.add_argument("--qj-param", type=float, default=0.5)
    add_common(p, rng=False)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("perturb", help="displace one random vertex of a TES file")
    p.add_argument("tes_file")
    p.add_argument("magnitude", type=float)
    add_common(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("render", help="render a TES file (plus optional GEN) to SVG")
    p.add_argument("tes_file")
    p.add_argument("gen_file", nargs="?", default=None)
    add_common(p, rng=False)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="time the pipeline phases over random instances")
    p.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000])
    p.add_argument("--trials", type=int, default=5)
    add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check", help="compare the diagram against the proximity argmax")
    p.add_argument("gen_file")
    p.add_argument("--samples", type=int, default=100000)
    add_common(p)
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, GeometryError, OSError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
