import io
import json

import pytest

from jetlegendre.canonical import dirac_chain
from jetlegendre.cli import SECTIONS, main
from jetlegendre.manifest import load_fixture
from jetlegendre.report import even_pipeline, odd_pipeline
from jetlegendre.symcore import parse


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    doc = json.loads(out)
    assert tuple(doc) == SECTIONS
    return doc


@pytest.mark.parametrize("name", ["example1", "pais_uhlenbeck"])
def test_el_ostro_schmidt_bridge(name):
    el = report("el", "--manifest", name)["el"]
    assert el["order"] == 4
    assert el["nondegenerate"]
    ost = report("ostro", "--manifest", name)["ostrogradsky"]
    assert ost["reproduces_el"]
    sch = report("schmidt", "--manifest", name)["schmidt"]
    assert sch["mode"] == "even"
    assert sch["legendre_identity"] == "0"
    assert sch["constraint_recovery"]
    br = report("bridge", "--manifest", name)["canonical_map"]
    assert br["certificate"]["ok"]
    assert br["transport_difference"] == "0"
    assert br["pi2_sign"] == -1


def test_only_requested_section_filled():
    doc = report("el", "--manifest", "pais_uhlenbeck")
    assert [k for k, v in doc.items() if v is not None] == ["el"]


def test_example1_report_lists_discrepancies():
    sch = report("schmidt", "--manifest", "example1")["schmidt"]
    fields = {d["field"] for d in sch["discrepancies"]}
    assert {"schmidt_H", "ostrogradsky_H"} <= fields


def test_schmidt_round_trip():
    m = load_fixture("pais_uhlenbeck")
    sch = report("schmidt", "--manifest", "pais_uhlenbeck")["schmidt"]
    _, _, res = even_pipeline(m)
    ctx = res.phase.ctx
    assert parse(sch["H"], ctx) == res.H
    for eq in sch["equations"]:
        assert parse(eq["rate"], ctx) is not None


@pytest.mark.parametrize("name", ["example3", "sarioglu_tekin", "clement"])
def test_dirac_report(name):
    doc = report("dirac", "--manifest", name)
    d = doc["dirac_chain"]
    assert d["status"] == "multiplier-determined"
    assert d["complete"] and d["sound"]
    assert all("stage" in c for c in d["constraints"])
    assert all("assumptions" in s and s["stage"] is not None for s in d["multiplier_solutions"])
    m = load_fixture(name)
    _, res = odd_pipeline(m)
    ctx = res.H_T.ctx
    chain = dirac_chain(res.H_T)
    emitted = [parse(c["expr"], ctx) for c in d["constraints"]]
    assert emitted == list(chain.constraints)
    assert doc["schmidt"]["mode"] == "odd"


def test_example3_assumptions_reported():
    d = report("dirac", "--manifest", "example3")["dirac_chain"]
    by_name = {s["multiplier"]: s for s in d["multiplier_solutions"]}
    assert by_name["lam_a"]["assumptions"] == ["p_s"]


def test_obstruction_exit_code():
    code, out, err = run("schmidt", "--manifest", "example3", "--mode", "even")
    assert code == 3
    doc = json.loads(err)
    assert doc["error"] == "IntegrabilityError"
    assert {doc["witness"]["i"], doc["witness"]["j"]} == {0, 1}


def test_bad_manifest_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "coordinates": ["q"],\n  "order": 2,\n  "lagrangian": "q''^2 +"\n}')
    code, out, err = run("el", "--manifest", str(path))
    assert code == 2
    doc = json.loads(err)
    assert doc["line"] == 4
    assert "column" in doc


def test_missing_manifest_and_file():
    assert run("el")[0] == 2
    assert run("el", "--manifest", "/no/such/file.json")[0] == 2


def test_free_particle(tmp_path):
    path = tmp_path / "free.json"
    path.write_text(json.dumps({"coordinates": ["q"], "order": 1, "lagrangian": "q'^2/2"}))
    el = report("el", "--manifest", str(path))["el"]
    assert el["equations"] == ["q''"] or el["equations"] == ["-q''"]


def test_simulate_writes_csv(tmp_path):
    doc = report("simulate", "--manifest", "pais_uhlenbeck", "--dt", "0.01", "--T", "1",
                 "--out", str(tmp_path))
    num = doc["numeric"]
    assert num["rows"] == 101
    assert len(num["files"]) == 3
    assert num["map_error"] <= 1e-6
    assert (tmp_path / "pais_uhlenbeck_schmidt.csv").exists()


def test_simulate_needs_simulation_block():
    code, _, err = run("simulate", "--manifest", "example3")
    assert code == 2
    assert "simulation" in json.loads(err)["message"]


def test_verify_json():
    code, out, _ = run("verify", "--json")
    rows = json.loads(out)
    assert {r["id"] for r in rows} >= {"1", "2", "3", "4", "5a", "6", "7", "8", "9"}
    assert code == (0 if all(r["passed"] for r in rows) else 4)
