import json
import math

import numpy as np
import pytest

from app.cli import main, parse_system, solve_command
from app.config import TrackerConfig
from app.errors import InvalidArgumentError, ParseError
from app.schemas import SolutionDocument, SystemDocument
from app.systems import hyperbola_homotopy, wilkinson_system


def _endpoints(solution: SolutionDocument):
    return [complex(*p.endpoint[0]) for p in solution.paths]


def test_parse_one_variable_document(x2_minus_1_document):
    doc = parse_system(json.dumps(x2_minus_1_document))
    assert len(doc.polynomials) == 1
    assert len(doc.polynomials[0]) == 2
    assert not doc.is_homotopy


def test_parse_hyperbola_document_is_homotopy(hyperbola_document):
    doc = parse_system(json.dumps(hyperbola_document))
    assert doc.is_homotopy
    assert len(doc.start_points()) == 2


def test_parse_from_file(tmp_path, x2_minus_1_document):
    path = tmp_path / "system.json"
    path.write_text(json.dumps(x2_minus_1_document), encoding="utf-8")
    assert parse_system(str(path)).variables == ["x"]


def test_parse_merges_duplicate_terms():
    doc = parse_system(
        json.dumps(
            {
                "variables": ["x"],
                "polynomials": [
                    [
                        {"coeff_re": 1.0, "exponents": [1]},
                        {"coeff_re": 2.0, "coeff_im": 1.0, "exponents": [1]},
                        {"coeff_re": -1.0, "exponents": [0]},
                    ]
                ],
            }
        )
    )
    assert len(doc.polynomials[0]) == 2
    assert doc.polynomials[0][0].coefficient == 3.0 + 1.0j


def test_parse_exponent_length_mismatch():
    text = json.dumps(
        {
            "variables": ["x", "y"],
            "polynomials": [
                [{"coeff_re": 1.0, "exponents": [1, 0, 0]}],
                [{"coeff_re": 1.0, "exponents": [0, 1]}],
            ],
        }
    )
    with pytest.raises(ParseError):
        parse_system(text)


def test_parse_non_square_and_malformed_json():
    with pytest.raises(ParseError):
        parse_system(json.dumps({"variables": ["x", "y"], "polynomials": [[{"coeff_re": 1.0, "exponents": [1, 0]}]]}))
    with pytest.raises(ParseError) as exc:
        parse_system('{"variables": ["x"],\n "polynomials": [[}')
    assert exc.value.line == 2


def test_parse_rejects_non_finite_coefficients():
    with pytest.raises(ParseError):
        parse_system('{"variables": ["x"], "polynomials": [[{"coeff_re": NaN, "exponents": [1]}]]}')


def test_document_round_trip():
    doc = SystemDocument.from_homotopy(hyperbola_homotopy(0.1))
    again = parse_system(doc.model_dump_json())
    assert again.model_dump() == doc.model_dump()
    H = again.to_homotopy()
    assert {m.key: m.coefficient for m in H.polys[0].monomials} == {
        m.key: m.coefficient for m in hyperbola_homotopy(0.1).polys[0].monomials
    }


def test_solve_x2_minus_1(x2_minus_1_document):
    doc = SystemDocument.model_validate(x2_minus_1_document)
    solution = solve_command(doc, TrackerConfig(), seed=1)
    assert solution.all_succeeded
    assert sorted(z.real for z in _endpoints(solution)) == [pytest.approx(-1.0), pytest.approx(1.0)]
    assert solution.summary["success"] == 2
    assert solution.gamma is not None
    assert len(solution.paths) == 2


def test_solve_is_deterministic_for_fixed_seed(x2_minus_1_document):
    doc = SystemDocument.model_validate(x2_minus_1_document)
    a = solve_command(doc, TrackerConfig(), seed=42)
    b = solve_command(doc, TrackerConfig(), seed=42)
    assert a.model_dump(exclude={"wall_time"}) == b.model_dump(exclude={"wall_time"})


def test_solve_wilkinson_ten():
    doc = SystemDocument.from_homotopy(wilkinson_system(10))
    solution = solve_command(doc, TrackerConfig(), seed=0)
    assert solution.all_succeeded
    roots = sorted(z.real for z in _endpoints(solution))
    np.testing.assert_allclose(roots, np.arange(1, 11), atol=1e-6)
    assert all(p.residual < 1e-9 for p in solution.paths)


def test_solve_explicit_homotopy(hyperbola_document):
    doc = SystemDocument.model_validate(hyperbola_document)
    solution = solve_command(doc, TrackerConfig())
    assert solution.gamma is None
    ends = _endpoints(solution)
    assert ends[0] == pytest.approx(math.sqrt(0.26))
    assert ends[1] == pytest.approx(-math.sqrt(0.26))


def test_homotopy_without_starts_is_rejected(hyperbola_document):
    hyperbola_document.pop("starts")
    doc = SystemDocument.model_validate(hyperbola_document)
    with pytest.raises(InvalidArgumentError):
        solve_command(doc, TrackerConfig())


def test_main_solve_writes_document(tmp_path, x2_minus_1_document):
    system = tmp_path / "system.json"
    system.write_text(json.dumps(x2_minus_1_document), encoding="utf-8")
    out = tmp_path / "solution.json"
    code = main(["solve", str(system), "--seed", "3", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert len(payload["paths"]) == 2
    assert payload["config"]["L"] == 5
    assert {p["status"] for p in payload["paths"]} == {"success"}


def test_main_solve_to_stdout_with_flags(capsys, x2_minus_1_document):
    code = main(["solve", json.dumps(x2_minus_1_document), "--L", "4", "--M", "2", "--max-step", "0.25", "--seed", "1"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["config"]["L"] == 4
    assert payload["config"]["M"] == 2
    assert payload["config"]["max_step"] == 0.25


def test_main_exit_codes(tmp_path):
    assert main(["solve", "{not json"]) == 2
    assert main(["solve", '{"variables": ["x"], "polynomials": [[{"coeff_re": 1, "exponents": [1]}]]}', "--beta1", "2"]) == 2
    assert main(["experiment", "nope"]) == 2
    # (x - 1)^2 ends on a singular root on both paths
    double = {
        "variables": ["x"],
        "polynomials": [
            [
                {"coeff_re": 1.0, "exponents": [2]},
                {"coeff_re": -2.0, "exponents": [1]},
                {"coeff_re": 1.0, "exponents": [0]},
            ]
        ],
    }
    assert main(["solve", json.dumps(double), "--seed", "3", "--out", str(tmp_path / "s.json")]) == 3


def test_main_experiment_table(capsys):
    code = main(["experiment", "hyperbola", "--k", "1", "2"])
    assert code == 0
    out = capsys.readouterr().out
    assert "jumped" in out
    assert "no_jump: 2" in out


def test_main_experiment_json(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["experiment", "poles", "--p", "0.1", "--samples", "3", "--json", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["experiment"] == "poles"
    assert len(report["rows"]) == 3
    assert json.loads(capsys.readouterr().out)["experiment"] == "poles"


def test_main_experiment_invalid_parameters():
    assert main(["experiment", "hyperbola", "--k", "0"]) == 2


def test_main_maps_arithmetic_errors_to_numeric_exit(x2_minus_1_document, monkeypatch):
    def overflowing(*args, **kwargs):
        raise OverflowError("(34, 'Numerical result out of range')")

    monkeypatch.setattr("app.cli.solve_command", overflowing)
    assert main(["solve", json.dumps(x2_minus_1_document)]) == 4


def test_main_pade_comparison_json(capsys):
    code = main(["experiment", "pade-compare", "--ell", "1", "3", "--json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["experiment"] == "pade-compare"
    assert [(r["L"], r["M"]) for r in report["rows"]] == [(1, 1), (1, 1), (3, 3), (5, 1)]


def test_main_poles_on_straight_path_with_two_poles(capsys):
    argv = ["experiment", "poles", "--p", "0.05", "--samples", "3", "--L", "6", "--M", "2", "--path", "gamma1"]
    code = main(argv + ["--json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["parameters"]["path"] == "gamma1"
    assert "pole2_im" in report["columns"]
    middle = report["rows"][1]
    assert middle["pole_im"] * middle["pole2_im"] < 0
