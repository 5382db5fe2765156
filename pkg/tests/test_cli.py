"""Command-line interface: artifacts, determinism, exit codes."""
import os

import pytest

from vortour.cli import (main, parse_lp_point, parse_thin, parse_walk,
                         write_clique_file)
from vortour.gen import Profile, generate_instance
from vortour.hardness import CliqueInstance
from vortour.instances import parse_instance, validate
from vortour.oracles import atsp_optimum


def run(tmp_path, *argv, name="out.txt"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def test_gen_writes_a_valid_instance_deterministically(tmp_path):
    code1, t1 = run(tmp_path, "gen", "--seed", "4", "--n", "7", name="a.txt")
    code2, t2 = run(tmp_path, "gen", "--seed", "4", "--n", "7", name="b.txt")
    assert code1 == code2 == 0
    assert t1 == t2
    inst = parse_instance(t1)
    assert validate(inst) == []


def test_lp_artifact_parses_and_matches_library(tmp_path):
    code, text = run(tmp_path, "lp", "--seed", "1", "--n", "6")
    assert code == 0
    objective, x = parse_lp_point(text)
    from vortour.heldkarp import solve_lp
    inst = generate_instance(1, Profile(n=6))
    assert objective == solve_lp(inst.g).objective


def test_vortex_walk_against_oracle_command(tmp_path):
    code, text = run(tmp_path, "vortex-walk", "--seed", "2", "--n", "6")
    assert code == 0
    cost, walk = parse_walk(text)
    code2, text2 = run(tmp_path, "oracle", "--seed", "2", "--n", "6",
                       name="oracle.txt")
    assert code2 == 0
    opt, _ = parse_walk(text2)
    assert cost == opt


def test_oracle_guard_exit_code(tmp_path):
    code, _ = run(tmp_path, "oracle", "--seed", "0", "--n", "8",
                  "--guard-oracle", "3")
    assert code == 2


def test_thin_modes(tmp_path):
    code, text = run(tmp_path, "thin", "--seed", "0", "--n", "7")
    assert code == 0
    alpha, edges = parse_thin(text)
    assert alpha >= 0          # S may legitimately be empty when W spans
    code, text = run(tmp_path, "thin", "--seed", "0", "--n", "7",
                     "--mode", "planar", name="planar.txt")
    assert code == 0
    _, tree = parse_thin(text)
    assert tree                # a spanning tree is never empty
    code, _ = run(tmp_path, "thin", "--seed", "0", "--n", "7",
                  "--mode", "one-apex")
    assert code == 2           # no apex in the instance


def test_tour_command_reports_a_ledger(tmp_path):
    code, text = run(tmp_path, "tour", "--seed", "0", "--n", "7",
                     "--compare-oracle")
    assert code == 0
    assert "ledger ratio" in text
    assert text.splitlines()[-1].startswith("seq ")


def test_normalize_and_merge_roundtrip(tmp_path):
    code, text = run(tmp_path, "normalize", "--seed", "0", "--n", "7",
                     "--kind", "facial")
    assert code == 0
    assert validate(parse_instance(text)) == []
    code, text = run(tmp_path, "merge-vortices", "--seed", "0", "--n", "7")
    assert code == 0           # single-vortex input passes through
    assert validate(parse_instance(text)) == []


def test_harden_roundtrip(tmp_path):
    ci = CliqueInstance(4, frozenset({(0, 1), (1, 2), (0, 2), (2, 3)}))
    graph = tmp_path / "graph.txt"
    graph.write_text(write_clique_file(ci))
    code, bundle = run(tmp_path, "harden", "clique", str(graph), "--k", "2",
                       name="bundle.txt")
    assert code == 0
    assert bundle.startswith("harden k 2")
    bpath = tmp_path / "bundle.txt"
    assert main(["harden", "verify", str(bpath)]) == 0


def test_verify_suite_exit_codes(tmp_path):
    assert main(["verify", "lp", "0", "1"]) == 0
    assert main(["verify", "vortex", "0"]) == 0


def test_gadgets_maintenance_command():
    assert main(["gadgets"]) == 0


def test_bad_instance_file_is_a_guard_error(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("this is not an instance\n")
    assert main(["lp", "--instance", str(bad)]) == 2
