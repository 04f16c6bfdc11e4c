"""
Golden corpus through the command line: expected NSI types, exit codes and stable output.
"""

import json
from collections import Counter
from pathlib import Path

import pytest

from main import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VIOLATIONS, main, run_validate
from quickstart import check_golden_corpus
from replay import replay
from scenarios import DeploymentScenario, ScenarioKind, ViolationCode, scenario_report

EXPECTED_TYPES = {
    "closed_campus": {"Type1": 1, "Type2": 2},
    "closed_multisite": {"Type1": 2, "Type3": 1},
    "open_mno_shared": {"Type1": 1, "Type3": 2},
    "mixed_imported_core": {"Type1": 2, "Type2": 2, "Type3": 2},
    "mixed_service_binding": {"Type1": 2, "Type3": 1},
    "open_public": {"Type1": 1},
    "open_mno_single": {"Type3": 2},
}


def _types(report) -> Counter:
    return Counter(entry.nsi_type.value for entry in report.nsis)


@pytest.mark.parametrize("name", sorted(EXPECTED_TYPES))
def test_golden_type_multisets(golden, app_settings, name):
    document = golden(name)
    report = scenario_report(replay(document, app_settings).plan, document.scenario)
    assert _types(report) == Counter(EXPECTED_TYPES[name])
    assert report.passed, [v.code.value for v in report.violations]
    assert report.warning_count == 0


def test_corpus_covers_every_scenario(golden):
    kinds = {golden(name).scenario.kind for name in EXPECTED_TYPES}
    assert kinds == set(ScenarioKind)


def test_open_mno_public_slice_is_the_type1(golden, app_settings):
    document = golden("open_mno_shared")
    report = scenario_report(replay(document, app_settings).plan, document.scenario)
    by_tenant = {entry.tenant: entry for entry in report.nsis}
    assert by_tenant["public"].nsi_type.value == "Type1"
    assert by_tenant["subs-a"].foreign_constituents == ["cn-mno-a"]
    assert by_tenant["subs-b"].foreign_constituents == ["cn-mno-b"]


def test_service_binding_links_staff_slice(golden, app_settings):
    plan = replay(golden("mixed_service_binding"), app_settings).plan
    assert plan.nsi("nsi-r-staff").linked_foreign_nsis == ["mno-a-embb"]
    assert plan.nsi("nsi-r-clinic").lifecycle.value == "Active"


def test_closed_campus_under_open_public_fails(golden, app_settings):
    document = golden("closed_campus")
    rewritten = document.model_copy(update={"scenario": DeploymentScenario(kind=ScenarioKind.OPEN_PUBLIC)})
    result = run_validate(rewritten, "structured", app_settings)
    assert result.exit_code == EXIT_VIOLATIONS
    payload = json.loads(result.output)
    codes = [v["code"] for v in payload["violations"]]
    assert codes == [ViolationCode.FORBIDDEN_NSI_TYPE.value] * 2
    assert payload["passed"] is False


# ==================== COMMAND LINE ====================

@pytest.mark.parametrize("name", sorted(EXPECTED_TYPES))
@pytest.mark.parametrize("command", ["validate", "plan", "graph", "replay"])
def test_every_command_exits_clean_on_the_corpus(golden_dir, capsys, name, command):
    assert main([command, str(golden_dir / f"{name}.json")]) == EXIT_OK
    assert capsys.readouterr().out


def test_validate_text_report(golden_dir, capsys):
    assert main(["validate", str(golden_dir / "closed_campus.json")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("Scenario: ClosedA")
    assert "Allowed types: Type1, Type2" in out
    assert "  [PASS] (a) NSI types permitted by the deployment" in out
    assert out.rstrip().endswith("Result: PASS (0 error(s), 0 warning(s))")


def test_rewritten_scenario_exits_with_violations(golden_dir, tmp_path, capsys):
    text = (golden_dir / "closed_campus.json").read_text(encoding="utf-8")
    path = tmp_path / "campus_public.json"
    path.write_text(text.replace('"kind": "ClosedA"', '"kind": "OpenPublic"'), encoding="utf-8")
    assert main(["validate", str(path)]) == EXIT_VIOLATIONS
    out = capsys.readouterr().out
    assert out.count("ERROR ForbiddenNsiType") == 2
    assert "Result: FAIL (2 error(s), 0 warning(s))" in out


def test_input_errors_exit_2(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text('{"schema_version": 1,\n', encoding="utf-8")
    assert main(["validate", str(broken)]) == EXIT_INPUT_ERROR
    assert "DocumentSyntaxError" in capsys.readouterr().err

    assert main(["plan", str(tmp_path / "missing.json")]) == EXIT_INPUT_ERROR


def test_non_utf8_document_exits_2(tmp_path, capsys):
    path = tmp_path / "latin.json"
    path.write_bytes(b'{"schema_version": 1, "x": "\xff\xfe"}')
    assert main(["validate", str(path)]) == EXIT_INPUT_ERROR
    assert "DocumentSyntaxError" in capsys.readouterr().err


def test_closed_network_holding_a_peered_nssi_exits_1(tmp_path, capsys):
    path = tmp_path / "leaky.json"
    path.write_text(json.dumps({
        "schema_version": 1,
        "scenario": {"kind": "ClosedA"},
        "domains": [{"id": "uo", "kind": "MicroOperator"}, {"id": "mno-a", "kind": "MNO"}],
        "nssis": [
            {"id": "an1", "kind": "AN", "owner": "uo", "capacity": 10},
            {"id": "cn-m", "kind": "CN", "owner": "mno-a", "capacity": 10},
        ],
        "tenants": [{"id": "t", "locations": ["site"]}],
        "agreements": [{"mno": "mno-a", "direction": "MicroOperatorUsesMno", "exported_nssis": ["cn-m"]}],
        "nsis": [{"id": "s1", "tenant": "t", "constituents": ["an1", "cn-m"]}],
    }), encoding="utf-8")
    assert main(["validate", str(path), "--format", "structured"]) == EXIT_VIOLATIONS
    codes = [v["code"] for v in json.loads(capsys.readouterr().out)["violations"]]
    assert codes == [ViolationCode.FORBIDDEN_NSI_TYPE.value, ViolationCode.FOREIGN_CONSTITUENT_IN_CLOSED.value]


def test_planning_failure_exits_2(tmp_path, capsys):
    path = tmp_path / "wide.json"
    path.write_text(json.dumps({
        "schema_version": 1,
        "scenario": {"kind": "ClosedA"},
        "domains": [{"id": "uo", "kind": "MicroOperator"}],
        "tenants": [{"id": "t", "locations": ["site"]}],
        "requests": [{"id": "r1", "tenant": "t", "wide_area": True, "demand": 1, "locations": ["site"]}],
    }), encoding="utf-8")
    assert main(["replay", str(path)]) == EXIT_INPUT_ERROR
    assert "ScenarioForbidsFederation" in capsys.readouterr().err


@pytest.mark.parametrize("command", ["validate", "plan", "graph", "replay"])
def test_output_is_byte_identical_across_runs(golden_dir, tmp_path, command):
    source = str(golden_dir / "mixed_imported_core.json")
    first, second = tmp_path / "first.out", tmp_path / "second.out"
    assert main([command, source, "--out", str(first)]) == EXIT_OK
    assert main([command, source, "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes()


def test_structured_formats_are_json(golden_dir, capsys):
    source = str(golden_dir / "closed_multisite.json")
    assert main(["validate", source, "--format", "structured"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert report["type_counts"] == {"Type1": 2, "Type2": 0, "Type3": 1}

    assert main(["plan", source, "--format", "structured"]) == EXIT_OK
    plan = json.loads(capsys.readouterr().out)
    assert [n["id"] for n in plan["nsis"]] == ["nsi-r-logistics", "nsi-r-maintenance", "nsi-r-robotics"]

    assert main(["replay", source, "--format", "structured"]) == EXIT_OK
    log = json.loads(capsys.readouterr().out)
    assert [step["action"] for step in log["steps"]] == ["register", "instantiate", "instantiate", "instantiate"]
    assert log["final_version"] == 4


def test_unknown_format_is_rejected(golden_dir):
    with pytest.raises(SystemExit):
        main(["validate", str(golden_dir / "open_public.json"), "--format", "yaml"])


def test_quickstart_validates_the_corpus(monkeypatch, capsys):
    monkeypatch.chdir(Path(__file__).parent)
    assert check_golden_corpus() is True
    assert "closed_campus.json" in capsys.readouterr().out
