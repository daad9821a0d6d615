import copy
import json
import subprocess
import sys

import pytest

from oracles import CLUTCH_MAPPING_DEGREE, SU2_GENERATOR_DEGREE
from symdeg import cli, gallery
from symdeg.problem import DocumentError, from_dict


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def strip_timing(report):
    r = copy.deepcopy(report)
    r.pop("timing")
    return r


# ---------------------------------------------------------------- documents


def test_every_gallery_entry_parses():
    for doc in gallery.gallery():
        p = from_dict(doc)
        assert p.name == doc["name"]


def test_missing_xi_declaration_names_path():
    doc = gallery.identity_family()
    del doc["variables"]["xi"]
    with pytest.raises(DocumentError) as info:
        from_dict(doc)
    assert info.value.path == "$.variables.xi"


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.update(version=2), "$.version"),
        (lambda d: d["dims"].update(q=3), "$.dims.q"),
        (lambda d: d["symbol"]["coefficients"][0].update(alpha=[1]), "$.symbol.coefficients[0].alpha"),
        (lambda d: d["symbol"]["coefficients"][0].update(matrix=[["1"]]), "$.symbol.coefficients[0].matrix"),
        (lambda d: d["symbol"]["coefficients"][0]["matrix"][1].__setitem__(0, "xi"),
         "$.symbol.coefficients[0].matrix[1][0]"),
        (lambda d: d["symbol"]["coefficients"][0]["matrix"][0].__setitem__(1, "2 +"),
         "$.symbol.coefficients[0].matrix[0][1]"),
        (lambda d: d.update(sigma=[["1"]]), "$"),
        (lambda d: d.update(basepoint=[1.0]), "$.basepoint"),
        (lambda d: d.update(unknown=1), "$"),
        (lambda d: d["quadrature"].update(resolution=2), "$.quadrature.resolution"),
    ],
)
def test_schema_errors_name_the_path(mutate, path):
    doc = gallery.identity_family()
    mutate(doc)
    with pytest.raises(DocumentError) as info:
        from_dict(doc)
    assert info.value.path == path


def test_sphere_documents_need_odd_dimension():
    doc = gallery.su2_generator()
    doc["dims"]["sphere_dim"] = 2
    with pytest.raises(DocumentError, match="odd"):
        from_dict(doc)


def test_reserved_names_rejected():
    doc = gallery.scalar_winding()
    doc["variables"]["sphere"] = ["i", "s"]
    with pytest.raises(DocumentError, match="cannot be used"):
        from_dict(doc)


# ---------------------------------------------------------------- run()


def test_degree_on_identity_family():
    code, rep = cli.run("degree", "gallery:identity-family")
    assert code == 0
    assert rep["degrees"][0]["snapped"] == 0
    assert rep["degrees"][0]["mode"] == "symbol"
    assert [v["status"] for v in rep["validation"]] == ["PASS"] * 3


def test_certify_su2_clutch_grants():
    code, rep = cli.run("certify", "gallery:su2-clutch")
    assert code == 0
    assert rep["degrees"][0]["snapped"] == CLUTCH_MAPPING_DEGREE * SU2_GENERATOR_DEGREE
    assert rep["degrees"][0]["mode"] == "direct-sigma"
    cert = rep["certificates"][0]
    assert cert["status"] == "GRANT" and cert["bound"] == 3
    assert rep["summary"]["best_bound"] == 3


def test_missing_xi_exits_with_input_error(tmp_path):
    doc = gallery.identity_family()
    del doc["variables"]["xi"]
    code, rep = cli.run("degree", write(tmp_path, doc))
    assert code == 1
    assert rep["summary"]["error"]["path"] == "$.variables.xi"


def test_unreadable_documents(tmp_path):
    assert cli.run("degree", str(tmp_path / "missing.json"))[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = cli.run("validate", str(bad))
    assert code == 1 and "invalid JSON" in rep["summary"]["error"]["message"]
    assert cli.run("degree", None)[0] == 1


def test_validation_failure_exits_3(tmp_path):
    doc = gallery.identity_family()
    doc["symbol"]["coefficients"][0]["matrix"] = [["l0", "0"], ["0", "1"]]
    code, rep = cli.run("degree", write(tmp_path, doc))
    assert code == 3
    assert "interior_ellipticity" in rep["summary"]["failed_checks"]
    assert rep["degrees"] == []


def test_locality_failure_exits_3(tmp_path):
    doc = gallery.identity_family()
    doc["symbol"]["coefficients"][0]["matrix"] = [["1", "l0*x/10"], ["0", "1"]]
    code, rep = cli.run("validate", write(tmp_path, doc))
    assert code == 3
    assert rep["summary"]["failed_checks"] == ["interior_locality"]


def test_non_convergence_exits_2(tmp_path):
    doc = gallery.scalar_winding(1)
    doc["sigma"] = [["c + i*s - 0.9"]]
    doc["quadrature"] = {"resolution": 4, "max_refinements": 0}
    code, rep = cli.run("degree", write(tmp_path, doc))
    assert code == 2
    assert rep["degrees"][0]["status"] == "refine"
    assert rep["degrees"][0]["snapped"] is None


def test_singular_map_exits_3(tmp_path):
    doc = gallery.scalar_winding(1)
    doc["dims"]["m"] = 2
    doc["sigma"] = [["1", "0"], ["0", "c - 0.7071067811865476"]]
    doc["quadrature"] = {"resolution": 4}
    code, rep = cli.run("degree", write(tmp_path, doc))
    assert code == 3
    assert rep["singular_witness"]["condition_number"] == "inf"


def test_chern_subcommand():
    code, rep = cli.run("chern", "gallery:su2-clutch", resolution=12)
    assert code == 0
    assert rep["summary"]["chern_pairing"] == -CLUTCH_MAPPING_DEGREE * SU2_GENERATOR_DEGREE
    assert "chern_pairing = -degree" in rep["conventions"]["constants"]["relation"]
    assert cli.run("chern", "gallery:scalar-winding")[0] == 1


def test_validate_direct_sigma_notes_checks_do_not_apply():
    code, rep = cli.run("validate", "gallery:su2-generator")
    assert code == 0 and rep["validation"] == []
    assert "direct-sigma" in rep["validation_note"]


def test_certify_needs_requests_and_d(tmp_path):
    assert cli.run("certify", "gallery:identity-family")[0] == 1
    doc = gallery.su2_clutch()
    del doc["dims"]["d"]
    code, rep = cli.run("certify", write(tmp_path, doc))
    assert code == 1 and rep["summary"]["error"]["path"] == "$.dims.d"


def test_certify_mismatched_and_manual_requests(tmp_path):
    doc = gallery.su2_clutch()
    doc["certificates_requested"] = [{"path": "wu", "p": 3}, {"path": "sw", "q": 4}, {"path": "w1"}]
    code, rep = cli.run("certify", write(tmp_path, doc))
    assert code == 0
    assert [c["status"] for c in rep["certificates"]] == ["REFUSE"] * 3
    assert rep["summary"]["verdict"] == "no certificate"
    doc["assertions"]["index_bundle_nonorientable"] = True
    doc["certificates_requested"] = [{"path": "w1"}, {"path": "sw", "q": 2}]
    code, rep = cli.run("certify", write(tmp_path, doc))
    assert rep["summary"]["best_bound"] == 4
    doc["certificates_requested"] = [{"path": "wu", "p": 4}]
    code, rep = cli.run("certify", write(tmp_path, doc))
    assert code == 1 and rep["summary"]["error"]["path"] == "$.certificates_requested[0].p"


def test_unasserted_hypotheses_refuse(tmp_path):
    doc = gallery.su2_clutch()
    doc["assertions"]["h1_lopatinskij"] = False
    code, rep = cli.run("certify", write(tmp_path, doc))
    assert code == 0
    assert rep["certificates"][0]["status"] == "REFUSE"
    assert rep["certificates"][0]["checklist"]["h1_lopatinskij"] == "unasserted"


def test_resolution_flag_and_minimum():
    code, rep = cli.run("degree", "gallery:su2-generator", resolution=8)
    assert rep["degrees"][0]["resolutions_used"][0] == 8
    code, rep = cli.run("degree", "gallery:su2-generator", resolution=2)
    assert code == 1


def test_reports_are_deterministic_apart_from_timing():
    a = cli.dumps(strip_timing(cli.run("certify", "gallery:su2-clutch", threads=1)[1]))
    b = cli.dumps(strip_timing(cli.run("certify", "gallery:su2-clutch", threads=2)[1]))
    assert a == b


def test_report_layout():
    code, rep = cli.run("degree", "gallery:scalar-winding")
    for key in ("input_echo", "validation", "degrees", "certificates", "summary", "timing", "conventions"):
        assert key in rep
    assert rep["input_echo"]["name"] == "scalar-winding"
    assert set(rep["degrees"][0]["raw"]) == {"re", "im"}
    assert "outward normal" in rep["conventions"]["orientation"]
    json.loads(cli.dumps(rep))


# ---------------------------------------------------------------- gallery


def test_gallery_listing():
    code, rep = cli.run("gallery")
    assert code == 0
    names = [e["name"] for e in rep["gallery"]]
    assert len(names) >= 5
    for required in ("identity-family", "scalar-winding", "su2-generator", "su2-clutch", "laplacian-family"):
        assert required in names


def test_scalar_winding_metadata():
    assert gallery.scalar_winding(-2)["expected"]["degree"] == -2
    assert gallery.su2_generator()["expected"]["abs_degree"] == 1


@pytest.mark.parametrize("name", gallery.names())
def test_gallery_entry_reproduces_expected_degree(name):
    code, rep = cli.run("gallery", name)
    assert code == 0
    assert rep["summary"]["expected_match"] is True
    exp = gallery.get(name)["expected"]
    assert rep["degrees"][0]["snapped"] == exp["degree"]
    if "best_bound" in exp:
        assert rep["summary"]["best_bound"] == exp["best_bound"]


def test_unknown_gallery_entry():
    assert cli.run("gallery", "nope")[0] == 1
    assert cli.run("degree", "gallery:nope")[0] == 1


# ---------------------------------------------------------------- entry point


def test_main_writes_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = cli.main(["degree", "gallery:scalar-winding", "--out", str(out), "--threads", "1"])
    assert code == 0
    assert json.loads(out.read_text())["summary"]["degree"] == -2
    assert "report written" in capsys.readouterr().out


def test_console_script_exit_code(tmp_path):
    doc = gallery.identity_family()
    del doc["variables"]["xi"]
    proc = subprocess.run(
        [sys.executable, "-m", "symdeg.cli", "degree", write(tmp_path, doc)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["summary"]["error"]["path"] == "$.variables.xi"
