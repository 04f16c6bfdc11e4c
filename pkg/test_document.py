"""
Plan document parsing: syntax, schema version, grammar, model and reference checks.
"""

import json

import pytest

from document import (
    BindEvent,
    InstantiateEvent,
    PlanDocument,
    TransitionEvent,
    load_document,
    load_schema,
    parse_document,
    serialize_document,
)
from errors import DocumentError
from models import (
    Domain,
    InstantiationMode,
    Nsi,
    Nssi,
    PeeringAgreement,
    Reservation,
    ServiceBinding,
    ServiceRequest,
    Tenant,
)
from scenarios import DeploymentScenario, ScenarioKind

MINIMAL = """{
  "schema_version": 1,
  "scenario": {"kind": "ClosedA"},
  "domains": [{"id": "uo", "kind": "MicroOperator"}],
  "nssis": [
    {"id": "an1", "kind": "AN", "owner": "uo", "capacity": 10},
    {"id": "cn1", "kind": "CN", "owner": "uo", "capacity": 10}
  ],
  "tenants": [{"id": "t", "locations": ["site"]}],
  "nsis": [
    {"id": "s1", "tenant": "t", "constituents": ["an1", "cn1"]}
  ]
}
"""


def _errors(text: str) -> DocumentError:
    with pytest.raises(DocumentError) as e:
        parse_document(text)
    return e.value


def _line_of(text: str, needle: str) -> int:
    return text[:text.index(needle)].count("\n") + 1


def test_minimal_document():
    document = parse_document(MINIMAL)
    assert document.scenario == DeploymentScenario(kind=ScenarioKind.CLOSED_A)
    assert document.events is None
    plan = document.initial_plan()
    assert [n.id for n in plan.nssis] == ["an1", "cn1"]
    assert plan.nsi("s1").constituents == ["an1", "cn1"]
    assert plan.version == 0


def test_unknown_constituent_is_reported_with_its_line():
    text = MINIMAL.replace('["an1", "cn1"]', '["an1", "cn9"]')
    error = _errors(text)
    assert error.codes == ["UnknownReference"]
    issue = error.issues[0]
    assert issue.line == _line_of(text, '"cn9"')
    assert issue.path == "nsis.0.constituents.1"
    assert "cn9" in issue.message
    assert issue.render().startswith(f"UnknownReference (line {issue.line}, column ")


def test_every_reference_issue_is_collected():
    text = MINIMAL.replace('"tenant": "t"', '"tenant": "ghost"').replace('"cn1"]', '"cn9"]')
    assert _errors(text).codes == ["UnknownReference", "UnknownReference"]


def test_duplicate_ids():
    text = MINIMAL.replace('{"id": "cn1", "kind": "CN"', '{"id": "an1", "kind": "CN"')
    error = _errors(text)
    assert "DuplicateId" in error.codes
    duplicate = error.issues[error.codes.index("DuplicateId")]
    assert duplicate.path == "nssis.1.id"


@pytest.mark.parametrize("version", ['2', '"1"', 'null'])
def test_unsupported_schema_version(version):
    text = MINIMAL.replace('"schema_version": 1', f'"schema_version": {version}')
    error = _errors(text)
    assert error.codes == ["UnsupportedSchemaVersion"]
    assert error.issues[0].line == 2
    assert error.issues[0].path == "schema_version"


def test_missing_schema_version_points_at_the_root():
    error = _errors('{"scenario": {"kind": "ClosedA"}}')
    assert error.codes == ["UnsupportedSchemaVersion"]
    assert error.issues[0].path == "$"


def test_syntax_error_line():
    text = '{\n  "schema_version": 1,\n  "scenario": {"kind": "ClosedA"},\n}\n'
    error = _errors(text)
    assert error.codes == ["DocumentSyntaxError"]
    assert error.issues[0].line == 4


def test_undecodable_bytes_are_a_syntax_error(tmp_path):
    path = tmp_path / "latin.json"
    path.write_bytes(b'{"schema_version": 1,\n "x": "\xff"}\n')
    with pytest.raises(DocumentError) as e:
        load_document(path)
    assert e.value.codes == ["DocumentSyntaxError"]
    assert (e.value.issues[0].line, e.value.issues[0].column) == (2, 8)


def test_grammar_error_points_at_the_object():
    text = MINIMAL.replace('{"id": "uo", "kind": "MicroOperator"}', '{"id": "uo", "kind": "MicroOperator", "colour": "red"}')
    error = _errors(text)
    assert error.codes == ["InvalidDocument"]
    assert error.issues[0].path == "domains.0"
    assert error.issues[0].line == _line_of(text, '{"id": "uo"')


def test_model_rules_beyond_the_grammar():
    text = MINIMAL.replace(
        '{"id": "t", "locations": ["site"]}',
        '{"id": "t", "subscriber_class": "MnoSubscriberGroup", "locations": ["site"]}',
    )
    error = _errors(text)
    assert error.codes == ["InvalidDocument"]
    assert error.issues[0].path == "tenants.0"
    assert "home_mno" in error.issues[0].message


# ==================== EVENTS ====================

def _with_events(events) -> str:
    data = json.loads(MINIMAL)
    data["requests"] = [{"id": "r1", "tenant": "t", "demand": 1, "locations": ["site"]}]
    data["events"] = events
    return json.dumps(data, indent=2)


def test_events_are_tagged_by_action():
    document = parse_document(_with_events([
        {"action": "instantiate", "request": "r1"},
        {"action": "transition", "nsi": "nsi-r1", "target": "Instantiated", "actor": "Tenant"},
        {"action": "bind", "binding": {"service": "svc", "local_nsis": ["nsi-r1", "s1"]}},
    ]))
    instantiate, move, bind = document.events
    assert isinstance(instantiate, InstantiateEvent)
    assert instantiate.mode is InstantiationMode.REQUEST
    assert isinstance(move, TransitionEvent)
    assert isinstance(bind, BindEvent)
    assert document.request("r1").demand == 1
    with pytest.raises(KeyError):
        document.request("r2")


def test_events_may_only_name_planned_nsis():
    error = _errors(_with_events([
        {"action": "instantiate", "request": "r1"},
        {"action": "transition", "nsi": "nsi-r9", "target": "Instantiated", "actor": "Tenant"},
    ]))
    assert error.codes == ["UnknownReference"]
    assert error.issues[0].path == "events.1.nsi"


def test_repeated_requests_are_referenced_by_their_suffixed_ids():
    document = parse_document(_with_events([
        {"action": "instantiate", "request": "r1"},
        {"action": "instantiate", "request": "r1"},
        {"action": "transition", "nsi": "nsi-r1-2", "target": "Instantiated", "actor": "Tenant"},
    ]))
    assert document.events[2].nsi == "nsi-r1-2"

    error = _errors(_with_events([
        {"action": "instantiate", "request": "r1"},
        {"action": "instantiate", "request": "r1"},
        {"action": "transition", "nsi": "nsi-r1-3", "target": "Instantiated", "actor": "Tenant"},
    ]))
    assert error.codes == ["UnknownReference"]
    assert error.issues[0].path == "events.2.nsi"


def test_planned_id_steps_around_a_declared_nsi():
    data = json.loads(_with_events([
        {"action": "instantiate", "request": "r1"},
        {"action": "transition", "nsi": "nsi-r1-2", "target": "Instantiated", "actor": "Tenant"},
    ]))
    data["nsis"][0]["id"] = "nsi-r1"
    document = parse_document(json.dumps(data))
    assert [e.action for e in document.events] == ["instantiate", "transition"]


def test_unknown_event_action_is_a_grammar_error():
    error = _errors(_with_events([{"action": "teleport", "nsi": "s1"}]))
    assert error.codes[0] == "InvalidDocument"
    assert error.issues[0].path.startswith("events.0")


def test_empty_event_list_is_kept_apart_from_no_events():
    assert parse_document(_with_events([])).events == []


# ==================== ROUND TRIP ====================

def test_serialization_round_trips_the_golden_corpus(golden_dir):
    for path in sorted(golden_dir.glob("*.json")):
        document = parse_document(path.read_text(encoding="utf-8"))
        text = serialize_document(document)
        assert parse_document(text) == document, path.name
        assert serialize_document(parse_document(text)) == text


def test_serialization_is_canonical():
    text = serialize_document(parse_document(MINIMAL))
    assert text.endswith("}\n")
    assert '"location"' not in text
    assert list(json.loads(text)) == sorted(json.loads(text))


# ==================== SCHEMA / MODEL AGREEMENT ====================

@pytest.mark.parametrize("definition, model", [
    ("scenario", DeploymentScenario),
    ("domain", Domain),
    ("nssi", Nssi),
    ("tenant", Tenant),
    ("agreement", PeeringAgreement),
    ("nsi", Nsi),
    ("reservation", Reservation),
    ("request", ServiceRequest),
    ("binding", ServiceBinding),
])
def test_schema_and_models_name_the_same_fields(definition, model):
    schema = load_schema()["$defs"][definition]
    assert set(schema["properties"]) == set(model.model_fields)
    required = {name for name, field in model.model_fields.items() if field.is_required()}
    assert set(schema.get("required", [])) == required


def test_schema_top_level_matches_document_model():
    schema = load_schema()
    assert set(schema["properties"]) == set(PlanDocument.model_fields)
