import json

from importlib.resources import files

from quivhom.quiver import Quiver
from quivhom.walks import GeneratedOracle, compose, inverse, word_walk
from quivhom.coverings import build_regular_cover, identity_covering
from quivhom.surfaces import COLOR_I, COLOR_II, TaggedTriangulation, Triangulation
from quivhom import serialize as ser
from quivhom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error_of(err: str) -> dict:
    return json.loads(err)["error"]


def write_json(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(ser.dumps_canonical(doc), encoding="utf-8")
    return str(path)


def triangle() -> Quiver:
    return Quiver.from_pairs(3, [(2, 0), (1, 2), (0, 1)], labels=["a", "b", "c"])


def triangle_files(tmp_path, cyclic: bool):
    q = triangle()
    oracle = (GeneratedOracle(q, [word_walk(q, "a b c")]) if cyclic
              else None)
    qfile = write_json(tmp_path, "q.json", ser.quiver_to_json(q))
    hdoc = ser.homotopy_to_json(oracle) if oracle else {"type": "trivial"}
    hfile = write_json(tmp_path, "h.json", hdoc)
    return qfile, hfile


def undecided_quiver_and_oracle():
    # the lone generator is a 2-cycle word times a commutator, which the
    # bounded search cannot settle either way
    q = Quiver.from_pairs(3, [(0, 1), (1, 2), (2, 0), (2, 0), (2, 0)],
                          labels=["a", "b", "e", "f", "g"])
    x, y, z = (word_walk(q, "b a " + l) for l in "efg")
    comm = compose(compose(y, z), compose(inverse(y), inverse(z)))
    return q, GeneratedOracle(q, [compose(x, comm)], search_bound=300)


def digon(color: str) -> Triangulation:
    return Triangulation(
        arcs=[1, 2], boundary=["L", "R"],
        ends={"L": ("A", "B"), "R": ("B", "A"), 1: ("A", "c"), 2: ("c", "B")},
        triangles=[[("L", 0), (2, 1), (1, 1)], [(1, 0), (2, 0), ("R", 0)]],
        punctures={"c": color})


def digon_file(tmp_path, color: str):
    doc = ser.triangulation_to_json(TaggedTriangulation(digon(color)))
    return write_json(tmp_path, "tri.json", doc)


def klein_cover_file(tmp_path):
    base = Quiver.from_pairs(
        3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)], labels="abcdef")
    cover = build_regular_cover(base, {1: (1, 0, 3, 2), 2: (2, 3, 0, 1),
                                       3: (1, 0, 3, 2), 5: (2, 3, 0, 1)})
    return write_json(tmp_path, "cover.json", ser.covering_to_json(cover))


def a2_principal_file(tmp_path):
    a2 = Quiver.from_pairs(2, [(0, 1)], labels="a")
    return write_json(tmp_path, "seed.json",
                      {"quiver": ser.quiver_to_json(a2),
                       "homotopy": {"type": "full"}, "principal": True})


# ---------------------------------------------------------------------------
# repro targets and goldens


def test_repro_targets_match_their_goldens(capsys):
    for target in ("fig1", "markov-homotopies", "pentagon", "klein-laurent",
                   "torus-quiver"):
        code, out, err = run(capsys, "repro", target)
        assert code == 0, err
        golden = (files("quivhom") / "golden" /
                  (target.replace("-", "_") + ".json")).read_text("utf-8")
        assert out == golden  # byte-for-byte, not just structurally


def test_repro_unknown_target_is_usage_error(capsys):
    code, out, err = run(capsys, "repro", "bogus")
    assert code == 1
    assert error_of(err)["type"] == "usage"


# ---------------------------------------------------------------------------
# mutate


def test_mutate_cyclic_deletes_the_new_two_cycle(capsys, tmp_path):
    qfile, hfile = triangle_files(tmp_path, cyclic=True)
    out_path = tmp_path / "tracked.json"
    dot_path = tmp_path / "result.dot"
    code, out, err = run(capsys, "mutate", "--quiver", qfile,
                         "--homotopy", hfile, "--at", "1",
                         "--out", str(out_path), "--dot", str(dot_path))
    assert code == 0 and out == ""
    doc = json.loads(out_path.read_text())
    assert doc["log"] == [1]
    assert sorted((a["src"], a["tgt"]) for a in doc["quiver"]["arrows"]) == \
        [(1, 0), (2, 1)]
    (rec,) = doc["deletions"]
    assert rec["pair"] == [0, 2]
    assert rec["forward_label"] == "[bc]" and rec["backward_label"] == "a"
    assert rec["witness"]["verdict"] == "in"
    dot = dot_path.read_text()
    assert '1 -> 0 [label="c*"];' in dot and '2 -> 1 [label="b*"];' in dot


def test_mutate_trivial_keeps_the_two_cycle(capsys, tmp_path):
    qfile, hfile = triangle_files(tmp_path, cyclic=False)
    code, out, err = run(capsys, "mutate", "--quiver", qfile,
                         "--homotopy", hfile, "--at", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["deletions"] == []
    assert sorted((a["src"], a["tgt"]) for a in doc["quiver"]["arrows"]) == \
        [(0, 2), (1, 0), (2, 0), (2, 1)]


def test_mutate_sequence_is_involutive(capsys, tmp_path):
    qfile, hfile = triangle_files(tmp_path, cyclic=False)
    code, out, err = run(capsys, "mutate", "--quiver", qfile,
                         "--homotopy", hfile, "--seq", "1,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["log"] == [1, 1]
    assert sorted((a["src"], a["tgt"]) for a in doc["quiver"]["arrows"]) == \
        [(0, 1), (1, 2), (2, 0)]


def test_mutate_flag_combinations(capsys, tmp_path):
    qfile, hfile = triangle_files(tmp_path, cyclic=False)
    for extra in (["--at", "1", "--seq", "0,1"], [], ["--seq", "1,,2"],
                  ["--seq", "a,b"], ["--at", "1", "--bogus"]):
        code, out, err = run(capsys, "mutate", "--quiver", qfile,
                             "--homotopy", hfile, *extra)
        assert code == 1
        assert error_of(err)["type"] == "usage"


def test_unknown_subcommand_is_usage_error(capsys):
    code, out, err = run(capsys, "transmogrify")
    assert code == 1
    assert error_of(err)["type"] == "usage"


def test_mutate_out_of_range_vertex_is_domain_error(capsys, tmp_path):
    qfile, hfile = triangle_files(tmp_path, cyclic=False)
    code, out, err = run(capsys, "mutate", "--quiver", qfile,
                         "--homotopy", hfile, "--at", "7")
    assert code == 1
    assert error_of(err)["type"] == "domain"


def test_mutate_undecided_exits_two(capsys, tmp_path):
    q, oracle = undecided_quiver_and_oracle()
    qfile = write_json(tmp_path, "q.json", ser.quiver_to_json(q))
    hfile = write_json(tmp_path, "h.json", ser.homotopy_to_json(oracle))
    code, out, err = run(capsys, "mutate", "--quiver", qfile,
                         "--homotopy", hfile, "--at", "1")
    assert code == 2
    assert error_of(err)["type"] == "undecided"


def test_schema_error_carries_its_pointer(capsys, tmp_path):
    doc = ser.quiver_to_json(triangle())
    doc["arrows"][1]["id"] = doc["arrows"][0]["id"]
    qfile = write_json(tmp_path, "q.json", doc)
    code, out, err = run(capsys, "export", "--quiver", qfile)
    assert code == 1
    e = error_of(err)
    assert e["type"] == "schema"
    assert e["pointer"] == "/arrows/1/id"


def test_missing_and_malformed_files_are_domain_errors(capsys, tmp_path):
    code, out, err = run(capsys, "export", "--quiver", str(tmp_path / "no.json"))
    assert code == 1 and error_of(err)["type"] == "domain"
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    code, out, err = run(capsys, "export", "--quiver", str(bad))
    assert code == 1
    assert "not valid JSON" in error_of(err)["message"]


# ---------------------------------------------------------------------------
# coverings


def test_orbit_mutate_round_trips_through_the_cli(capsys, tmp_path):
    cfile = klein_cover_file(tmp_path)
    code, out, err = run(capsys, "orbit-mutate", "--cover", cfile, "--at", "0")
    assert code == 0
    c = ser.covering_from_json(json.loads(out))
    assert c.base.n == 3 and c.total.n == 12


def test_orbit_mutate_rejects_two_cycles_in_the_total(capsys, tmp_path):
    cyclic = Quiver.from_pairs(2, [(0, 1), (1, 0), (0, 1)], labels="abc")
    doc = ser.covering_to_json(identity_covering(cyclic))
    cfile = write_json(tmp_path, "cover.json", doc)
    code, out, err = run(capsys, "orbit-mutate", "--cover", cfile, "--at", "0")
    assert code == 1
    assert error_of(err)["type"] == "domain"


def test_orbit_mutate_rejects_broken_projections(capsys, tmp_path):
    cfile = klein_cover_file(tmp_path)
    doc = json.loads(open(cfile).read())
    doc["vmap"][0] = (doc["vmap"][0] + 1) % 3
    cfile = write_json(tmp_path, "broken.json", doc)
    code, out, err = run(capsys, "orbit-mutate", "--cover", cfile, "--at", "0")
    assert code == 1
    assert "not a covering" in error_of(err)["message"]


def test_check_global_reports_ok_and_witness(capsys, tmp_path):
    cfile = klein_cover_file(tmp_path)
    code, out, err = run(capsys, "check-global", "--cover", cfile,
                         "--depth", "2")
    assert code == 0
    assert json.loads(out) == {"depth": 2, "ok": True, "witness": None}

    hexagon = build_regular_cover(
        Quiver.from_pairs(2, [(0, 1), (1, 0)], labels="ab"), {1: (1, 2, 0)})
    hfile = write_json(tmp_path, "hex.json", ser.covering_to_json(hexagon))
    code, out, err = run(capsys, "check-global", "--cover", hfile,
                         "--depth", "1")
    assert code == 0
    assert json.loads(out) == {"depth": 1, "ok": False, "witness": [0]}


# ---------------------------------------------------------------------------
# surfaces


def test_flip_emits_a_valid_triangulation(capsys, tmp_path):
    tfile = digon_file(tmp_path, COLOR_II)
    code, out, err = run(capsys, "flip", "--tri", tfile, "--at", "1")
    assert code == 0
    back = ser.triangulation_from_json(json.loads(out))
    assert len(back.triangulation.arcs) == 2
    assert back.triangulation.boundary == ("L", "R")

    code, out, err = run(capsys, "flip", "--tri", tfile, "--at", "99")
    assert code == 1
    assert error_of(err)["type"] == "domain"


def test_flip_graph_of_the_punctured_digon(capsys, tmp_path):
    dot_path = tmp_path / "flips.dot"
    code, out, err = run(capsys, "flip-graph", "--tri",
                         digon_file(tmp_path, COLOR_II), "--dot", str(dot_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["nodes"] == 6 and len(doc["edges"]) == 6
    assert doc["degrees"] == [2] * 6
    dot = dot_path.read_text()
    assert dot.startswith("graph flips {") and dot.count(" -- ") == 6

    code, out, err = run(capsys, "flip-graph", "--tri",
                         digon_file(tmp_path, COLOR_I))
    assert code == 0
    doc = json.loads(out)
    assert doc["nodes"] == 4 and doc["degrees"] == [2] * 4


def test_flip_graph_node_cap_is_a_domain_error(capsys, tmp_path):
    code, out, err = run(capsys, "flip-graph", "--tri",
                         digon_file(tmp_path, COLOR_II), "--max-nodes", "2")
    assert code == 1
    assert error_of(err)["type"] == "domain"


def test_verify_flip_mutation_all_arcs(capsys, tmp_path):
    code, out, err = run(capsys, "verify-flip-mutation", "--tri",
                         digon_file(tmp_path, COLOR_II))
    assert code == 0
    assert json.loads(out) == {"results": {"1": True, "2": True}, "all": True}


# ---------------------------------------------------------------------------
# cluster exploration


def test_cluster_explore_principal_reports_g_and_f(capsys, tmp_path):
    code, out, err = run(capsys, "cluster-explore", "--seed",
                         a2_principal_file(tmp_path), "--depth", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "exhaustive"
    assert doc["all_laurent"] is True and doc["all_nonnegative"] is True
    by_path = {tuple(e["path"]): e for e in doc["entries"]}
    assert set(by_path) == {(0,), (0, 1), (1,), (1, 0)}
    assert by_path[(0,)]["g_vector"] == [-1, 1]
    assert by_path[(0,)]["f_polynomial"] == "y0 + 1"
    assert by_path[(1,)]["g_vector"] == [0, -1]
    assert by_path[(1,)]["f_polynomial"] == "y1 + 1"
    assert by_path[(0, 1)]["g_vector"] == [-1, 0]
    assert by_path[(0, 1)]["f_polynomial"] == "y0*y1 + y0 + 1"
    assert by_path[(1, 0)]["f_polynomial"] == "y0*y1 + y0 + 1"
    assert all(e["laurent"] and e["nonnegative"] for e in doc["entries"])


def test_cluster_explore_random_mode_is_pinned_by_rng(capsys, tmp_path):
    seed = a2_principal_file(tmp_path)
    argv = ("cluster-explore", "--seed", seed, "--depth", "3",
            "--paths", "3", "--rng", "7")
    code, first, err = run(capsys, *argv)
    assert code == 0
    code, second, err = run(capsys, *argv)
    assert first == second
    doc = json.loads(first)
    assert doc["mode"] == "random" and doc["paths"] == 3 and doc["rng"] == 7


def test_cluster_explore_undecided_exits_two(capsys, tmp_path):
    q, oracle = undecided_quiver_and_oracle()
    sfile = write_json(tmp_path, "seed.json",
                       {"quiver": ser.quiver_to_json(q),
                        "homotopy": ser.homotopy_to_json(oracle)})
    code, out, err = run(capsys, "cluster-explore", "--seed", sfile,
                         "--depth", "1")
    assert code == 2
    doc = json.loads(out)
    assert doc["entries"] == []
    assert doc["undecided"] == [[0], [1], [2]]


# ---------------------------------------------------------------------------
# export


def test_export_json_and_dot(capsys, tmp_path):
    q = triangle()
    qfile = write_json(tmp_path, "q.json", ser.quiver_to_json(q))
    code, out, err = run(capsys, "export", "--quiver", qfile)
    assert code == 0
    assert out == ser.dumps_canonical(ser.quiver_to_json(q))
    code, out, err = run(capsys, "export", "--quiver", qfile,
                         "--format", "dot")
    assert code == 0
    assert out == ser.quiver_to_dot(q)
