"""Command-line entry point.

One binary with a subcommand per pipeline link so every stage can be run
and inspected in isolation: instance generation, the exact-rational LP,
the vortex walk dynamic program, thin subgraph construction, end-to-end
tours, exact oracles, the topological transforms, the hardness reduction
chain, and batch verification sweeps.  All randomness flows from the
``--seed`` flag; identical invocations produce byte-identical artifacts.

Exit codes: 0 success, 1 property failure, 2 guard or parse error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .gen import Profile, generate_instance
from .graphs import (Digraph, MetricClosure, Walk, format_fraction,
                     parse_digraph, parse_fraction, write_digraph)
from .hardness import (CliqueInstance, GuardExceeded, build_gadget_Hs,
                       build_gadget_HX, enumerate_gadget_types,
                       expected_types_Hs, expected_types_HX, harden_chain,
                       verify_chain)
from .heldkarp import solve_lp, verify_cuts_exhaustive
from .instances import (NearlyEmbeddableInstance, parse_instance, validate,
                        write_instance)
from .oracles import ORACLE_GUARD, atsp_optimum, optimal_tour
from .pipeline import PipelineError, approximate_atsp
from .thin import thin_subgraph_nearly
from .topo import (cross_normalize, facially_normalize, merge_vortices)
from .vortexdp import optimal_vortex_walk_with_apices, oracle_vortex_walk

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_GUARD = 2


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


# ---------------------------------------------------------------------------
# shared plumbing


def _load_instance(args) -> NearlyEmbeddableInstance:
    if args.instance is not None:
        with open(args.instance) as fh:
            inst = parse_instance(fh.read())
    else:
        profile = Profile(n=args.n, p=args.p, a=args.a)
        inst = generate_instance(args.seed, profile)
    bad = validate(inst)
    if bad:
        raise CliError(f"invalid instance: {bad}", EXIT_GUARD)
    return inst


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_instance_args(sp) -> None:
    sp.add_argument("--instance", help="read the instance from this file")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--a", type=int, default=0)


def _add_common(sp) -> None:
    sp.add_argument("--out", help="write the artifact here instead of stdout")
    sp.add_argument("--format", choices=["text"], default="text")
    sp.add_argument("--guard-oracle", type=int, default=ORACLE_GUARD)
    sp.add_argument("--guard-cuts", type=int, default=16)


def _write_walk(tag: str, cost: Fraction, walk: Walk) -> str:
    seq = " ".join(str(v) for v in walk.seq)
    return (f"{tag} cost {format_fraction(cost)} length {len(walk.seq)}\n"
            f"seq {seq}\n")


def parse_walk(text: str) -> Tuple[Fraction, Walk]:
    lines = [s for s in text.splitlines() if s.strip()]
    head = lines[0].split()
    cost = parse_fraction(head[2])
    seq = tuple(int(t) for t in lines[1].split()[1:])
    return cost, Walk(seq, closed=True)


def write_lp_point(pt) -> str:
    lines = [f"lp objective {format_fraction(pt.objective)} "
             f"cuts {len(pt.cuts)}"]
    for (u, v) in sorted(pt.x):
        if pt.x[(u, v)] != 0:
            lines.append(f"x {u} {v} {format_fraction(pt.x[(u, v)])}")
    return "\n".join(lines) + "\n"


def parse_lp_point(text: str) -> Tuple[Fraction, Dict[Tuple[int, int],
                                                      Fraction]]:
    lines = [s for s in text.splitlines() if s.strip()]
    objective = parse_fraction(lines[0].split()[2])
    x = {}
    for s in lines[1:]:
        _, u, v, f = s.split()
        x[(int(u), int(v))] = parse_fraction(f)
    return objective, x


def write_thin(res) -> str:
    lines = [f"thin mode {res.cert.mode} "
             f"alpha_star {format_fraction(Fraction(res.cert.alpha_star))} "
             f"union_alpha {format_fraction(Fraction(res.union_cert.alpha_star))} "
             f"s21 {res.s21} s22 {res.s22}"]
    for (u, v) in sorted(res.s_edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def parse_thin(text: str) -> Tuple[Fraction, List[Tuple[int, int]]]:
    lines = [s for s in text.splitlines() if s.strip()]
    head = lines[0].split()
    alpha = parse_fraction(head[head.index("alpha_star") + 1])
    edges = [(int(a), int(b)) for _, a, b in
             (s.split() for s in lines[1:])]
    return alpha, edges


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    inst = _load_instance(args)
    _emit(args, write_instance(inst))
    return EXIT_OK


def cmd_lp(args) -> int:
    inst = _load_instance(args)
    pt = solve_lp(inst.g)
    if inst.g.n <= args.guard_cuts:
        bad = verify_cuts_exhaustive(inst.g, pt.x)
        if bad:
            print(f"violated cuts: {bad}", file=sys.stderr)
            return EXIT_FAIL
    _emit(args, write_lp_point(pt))
    return EXIT_OK


def cmd_vortex_walk(args) -> int:
    inst = _load_instance(args)
    cost, walk = optimal_vortex_walk_with_apices(inst)
    _emit(args, _write_walk("vortex-walk", cost, walk))
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load_instance(args)
    if inst.g.n > args.guard_oracle:
        raise CliError(f"instance size {inst.g.n} exceeds the oracle guard "
                       f"{args.guard_oracle}", EXIT_GUARD)
    cost, walk = atsp_optimum(inst.g, args.guard_oracle)
    if walk is None:
        raise CliError("no spanning closed walk exists", EXIT_FAIL)
    _emit(args, _write_walk("oracle", cost, walk))
    return EXIT_OK


def cmd_thin(args) -> int:
    from .heldkarp import augment, symz
    from .thin import (planar_thin_tree, thin_forest_a_apex,
                       thin_tree_one_apex)
    from .graphs import symmetrize

    inst = _load_instance(args)
    pt = solve_lp(inst.g)
    cost, walk_mc = optimal_vortex_walk_with_apices(inst)
    walk = MetricClosure(inst.g).expand_walk(walk_mc)
    z = symz(augment(pt, walk).x)
    if args.mode == "vortex":
        res = thin_subgraph_nearly(inst, z, walk)
        _emit(args, write_thin(res))
        return EXIT_OK
    ug = symmetrize(inst.g)
    if args.mode == "planar":
        cert = planar_thin_tree(ug, z)
    elif args.mode == "one-apex":
        if inst.a < 1:
            raise CliError("one-apex mode needs an apex", EXIT_GUARD)
        cert = thin_tree_one_apex(ug, inst.apices[0], z)
    else:
        if inst.a < 1:
            raise CliError("a-apex mode needs apices", EXIT_GUARD)
        cert = thin_forest_a_apex(ug, list(inst.apices), z)
    lines = [f"thin mode {cert.mode} "
             f"alpha_star {format_fraction(Fraction(cert.alpha_star))} "
             f"components {cert.components}"]
    for (u, v) in sorted(cert.edges):
        lines.append(f"e {u} {v}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_tour(args) -> int:
    inst = _load_instance(args)
    try:
        res = approximate_atsp(inst, compare_oracle=args.compare_oracle)
    except PipelineError as exc:
        raise CliError(str(exc), EXIT_FAIL)
    lines = [f"tour cost {format_fraction(res.cost)} "
             f"lp {format_fraction(res.lp_objective)}"]
    for key in sorted(res.ledger):
        lines.append(f"ledger {key} {format_fraction(res.ledger[key])}")
    lines.append("seq " + " ".join(str(v) for v in res.walk.seq))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_normalize(args) -> int:
    inst = _load_instance(args)
    if args.kind == "facial":
        out, _cert = facially_normalize(inst)
    else:
        out, _cert = cross_normalize(inst, expand_grids=args.expand_grids)
    bad = validate(out)
    if bad:
        raise CliError(f"normalized instance invalid: {bad}", EXIT_FAIL)
    _emit(args, write_instance(out))
    return EXIT_OK


def cmd_merge_vortices(args) -> int:
    inst = _load_instance(args)
    out = inst if inst.k <= 1 else merge_vortices(inst)
    bad = validate(out)
    if bad:
        raise CliError(f"merged instance invalid: {bad}", EXIT_FAIL)
    _emit(args, write_instance(out))
    return EXIT_OK


# ---------------------------------------------------------------------------
# harden


def parse_clique_file(text: str) -> CliqueInstance:
    from .graphs import edge_of
    lines = [s for s in text.splitlines()
             if s.strip() and not s.lstrip().startswith("#")]
    n = int(lines[0].split()[-1])
    edges = set()
    for s in lines[1:]:
        u, v = (int(t) for t in s.split()[:2])
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ValueError(f"bad edge {u} {v}")
        edges.add(edge_of(u, v))
    return CliqueInstance(n, frozenset(edges))


def write_clique_file(ci: CliqueInstance) -> str:
    lines = [f"graph {ci.n}"]
    for (u, v) in sorted(ci.edges):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def write_bundle(bundle) -> str:
    out = [f"harden k {bundle.k}",
           "clique " + write_clique_file(bundle.clique).replace("\n", ";")]
    bi = bundle.biclique
    if bi is not None:
        cls = "|".join(",".join(map(str, c)) for c in bi.classes)
        edg = " ".join(f"{u}-{v}" for (u, v) in sorted(bi.edges))
        out.append(f"biclique classes {cls}")
        out.append(f"biclique edges {edg}")
    eb = bundle.balancing
    if eb is not None:
        out.append("balancing vertices "
                   + " ".join(map(str, eb.vertices)))
        for a in eb.arcs:
            out.append(f"balancing arc {a[0]} {a[1]} "
                       + ",".join(map(str, eb.sets[a])))
    wi = bundle.walk
    if wi is not None:
        out.append(f"walk n {wi.n} width {wi.width_claim}")
        out.append("walk U " + " ".join(map(str, sorted(wi.exactly_once))))
        out.append("walk arcs "
                   + " ".join(f"{u}-{v}" for (u, v) in sorted(wi.arcs)))
    ar = bundle.atsp
    if ar is not None:
        out.append(f"atsp threshold {format_fraction(ar.threshold)}")
    for stage, why in sorted(bundle.skipped.items()):
        out.append(f"skipped {stage} {why}")
    return "\n".join(out) + "\n"


def parse_bundle_header(text: str) -> Tuple[CliqueInstance, int]:
    lines = text.splitlines()
    k = int(lines[0].split()[-1])
    clique_text = lines[1][len("clique "):].replace(";", "\n")
    return parse_clique_file(clique_text), k


def cmd_harden(args) -> int:
    if args.action == "clique":
        with open(args.graph) as fh:
            ci = parse_clique_file(fh.read())
        bundle = harden_chain(ci, args.k, stage=args.stage,
                              walk_guard=args.guard_walk)
        _emit(args, write_bundle(bundle))
        return EXIT_OK
    # verify: replay the chain from the bundle's clique input and re-run
    # every solver and backward map
    with open(args.bundle) as fh:
        text = fh.read()
    ci, k = parse_bundle_header(text)
    bundle = harden_chain(ci, k, walk_guard=args.guard_walk)
    if write_bundle(bundle) != text:
        print("bundle does not reproduce from its clique input",
              file=sys.stderr)
        return EXIT_FAIL
    try:
        report = verify_chain(bundle)
    except AssertionError as exc:
        print(f"chain verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    lines = [f"{stage} {answer}" for stage, answer in sorted(report.items())
             if stage != "skipped"]
    for stage, why in sorted(report["skipped"].items()):
        lines.append(f"skipped {stage} {why}")
    print("\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites


def _suite_lp(seed: int, guard_cuts: int) -> Optional[str]:
    inst = generate_instance(seed, Profile(n=8))
    pt = solve_lp(inst.g)
    opt, walk = atsp_optimum(inst.g)
    if walk is None or pt.objective > opt:
        return f"lp objective {pt.objective} exceeds optimum {opt}"
    if inst.g.n <= guard_cuts and verify_cuts_exhaustive(inst.g, pt.x):
        return "violated cuts remain"
    return None


def _suite_vortex(seed: int, _g: int) -> Optional[str]:
    inst = generate_instance(seed, Profile(n=8, p=1 + seed % 2))
    c1, _ = optimal_vortex_walk_with_apices(inst)
    c2, _ = oracle_vortex_walk(inst)
    if c1 != c2:
        return f"dp {c1} != oracle {c2}"
    return None


def _suite_thin(seed: int, _g: int) -> Optional[str]:
    from .heldkarp import augment, predicates, symz
    inst = generate_instance(seed, Profile(n=8))
    pt = solve_lp(inst.g)
    _, walk_mc = optimal_vortex_walk_with_apices(inst)
    walk = MetricClosure(inst.g).expand_walk(walk_mc)
    z = symz(augment(pt, walk).x)
    pred = predicates(inst.g.vertices, z, walk, Fraction(2))
    if not (pred["is_thick"] and pred["is_dense"]):
        return f"weights not thick/dense: {pred}"
    res = thin_subgraph_nearly(inst, z, walk)
    bound = 20 * max(inst.p, 1) ** 2
    if res.cert.alpha_star > bound:
        return f"alpha* {res.cert.alpha_star} above {bound}"
    return None


def _suite_tour(seed: int, _g: int) -> Optional[str]:
    inst = generate_instance(seed, Profile(n=8))
    res = approximate_atsp(inst, compare_oracle=True)
    if res.cost < res.lp_objective:
        return "tour cheaper than LP"
    if set(res.walk.seq) < set(inst.g.vertices):
        return "tour does not span"
    return None


def _suite_harden(seed: int, _g: int) -> Optional[str]:
    import random
    from .graphs import edge_of
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    edges = {edge_of(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < 0.5}
    ci = CliqueInstance(n, frozenset(edges))
    bundle = harden_chain(ci, 2)
    try:
        verify_chain(bundle)
    except AssertionError as exc:
        return f"chain verification failed: {exc}"
    return None


SUITES = {"lp": _suite_lp, "vortex": _suite_vortex, "thin": _suite_thin,
          "tour": _suite_tour, "harden": _suite_harden}


def cmd_verify(args) -> int:
    runner = SUITES[args.suite]
    failures = 0
    lines = []
    for seed in args.seeds:
        try:
            msg = runner(seed, args.guard_cuts)
        except GuardExceeded as exc:
            lines.append(f"seed {seed} skipped {exc}")
            continue
        if msg is None:
            lines.append(f"seed {seed} ok")
        else:
            lines.append(f"seed {seed} FAIL {msg}")
            failures += 1
    lines.append(f"summary suite {args.suite} "
                 f"ran {len(args.seeds)} failed {failures}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_gadgets(args) -> int:
    """Hidden maintenance check: replay the gadget type laws."""
    for s in range(1, 4):
        g = build_gadget_Hs(s)
        if enumerate_gadget_types(g) != expected_types_Hs(g, s):
            print(f"H_{s} type law violated", file=sys.stderr)
            return EXIT_FAIL
    g = build_gadget_HX((1, 2))
    if enumerate_gadget_types(g) != expected_types_HX(g, (1, 2)):
        print("H_X type law violated", file=sys.stderr)
        return EXIT_FAIL
    print("gadget type laws ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vortour", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, fn, needs_inst in [
            ("gen", cmd_gen, True), ("lp", cmd_lp, True),
            ("vortex-walk", cmd_vortex_walk, True),
            ("oracle", cmd_oracle, True), ("tour", cmd_tour, True),
            ("normalize", cmd_normalize, True),
            ("merge-vortices", cmd_merge_vortices, True),
            ("thin", cmd_thin, True)]:
        sp = sub.add_parser(name)
        if needs_inst:
            _add_instance_args(sp)
        _add_common(sp)
        sp.set_defaults(fn=fn)
    sub._name_parser_map["thin"].add_argument(
        "--mode", choices=["planar", "one-apex", "a-apex", "vortex"],
        default="vortex")
    sub._name_parser_map["tour"].add_argument(
        "--compare-oracle", action="store_true")
    sub._name_parser_map["normalize"].add_argument(
        "--kind", choices=["facial", "cross"], default="facial")
    sub._name_parser_map["normalize"].add_argument(
        "--expand-grids", action="store_true")

    hp = sub.add_parser("harden")
    hsub = hp.add_subparsers(dest="action", required=True)
    hc = hsub.add_parser("clique")
    hc.add_argument("graph")
    hc.add_argument("--k", type=int, required=True)
    hc.add_argument("--stage",
                    choices=["biclique", "balancing", "walk", "atsp"],
                    default="atsp")
    hc.add_argument("--guard-walk", type=int, default=4000)
    _add_common(hc)
    hc.set_defaults(fn=cmd_harden)
    hv = hsub.add_parser("verify")
    hv.add_argument("bundle")
    hv.add_argument("--guard-walk", type=int, default=4000)
    _add_common(hv)
    hv.set_defaults(fn=cmd_harden)

    vp = sub.add_parser("verify")
    vp.add_argument("suite", choices=sorted(SUITES))
    vp.add_argument("seeds", type=int, nargs="*", default=list(range(10)))
    _add_common(vp)
    vp.set_defaults(fn=cmd_verify)

    gp = sub.add_parser("gadgets")
    _add_common(gp)
    gp.set_defaults(fn=cmd_gadgets)
    return ap


def main(argv: Optional[Sequence[int]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except GuardExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
