"""Knowledge extraction schema, themes, and direct form input."""

import json

import pytest

from courseforge.gateway import ConfigKey, PageImage
from courseforge.knowledge import (
    ConceptForm,
    DocumentPages,
    EmptyRequiredField,
    GradeLevel,
    MalformedJson,
    PageLimitExceeded,
    SchemaViolation,
    StructuredKnowledge,
    SubjectArea,
    build_analysis_prompt,
    knowledge_from_form,
    lighten,
    parse_analysis_response,
    select_theme,
)
from courseforge.prompts import ANALYSIS_PROMPT

VALID_RESPONSE = {
    "main_topics": ["Kinematics", "Forces", "Energy", "Momentum"],
    "key_concepts": ["velocity", "acceleration", "net force"],
    "learning_objectives": ["compute net force from mass and acceleration"],
    "prerequisite_knowledge": ["basic algebra"],
    "procedural_concepts": [
        {
            "name": "Projectile launch",
            "steps": ["set the angle", "set the speed", "launch and observe"],
            "parameters": [
                {"name": "angle", "description": "launch angle in degrees"},
                {"name": "speed", "description": "initial speed"},
            ],
        }
    ],
    "subject_area": "Physics",
    "grade_level": "Middle",
}


def pages(n):
    return DocumentPages([PageImage(b"\x89PNG" + bytes([i]), "image/png") for i in range(n)])


# ------------------------------------------------------------- analysis


def test_build_analysis_prompt_carries_pages_in_order():
    doc = pages(3)
    request = build_analysis_prompt(doc)
    assert request.config_key is ConfigKey.MULTI_MODAL_ANALYSIS
    assert request.messages == [("user", ANALYSIS_PROMPT)]
    assert [img.data for img in request.images] == [p.data for p in doc.pages]


def test_page_limit_enforced():
    with pytest.raises(PageLimitExceeded):
        pages(51)
    with pytest.raises(ValueError):
        DocumentPages([])
    assert pages(50).page_count == 50


def test_parse_valid_response():
    record = parse_analysis_response(json.dumps(VALID_RESPONSE))
    assert record.main_topics == VALID_RESPONSE["main_topics"]
    assert record.key_concepts == VALID_RESPONSE["key_concepts"]
    assert record.learning_objectives == VALID_RESPONSE["learning_objectives"]
    assert record.prerequisite_knowledge == VALID_RESPONSE["prerequisite_knowledge"]
    assert record.subject_area is SubjectArea.PHYSICS
    assert record.grade_level is GradeLevel.MIDDLE
    procedure = record.procedural_concepts[0]
    assert procedure.name == "Projectile launch"
    assert len(procedure.steps) == 3
    assert [p.name for p in procedure.parameters] == ["angle", "speed"]
    assert record.warnings == []


def test_parse_fenced_response_equals_unfenced():
    plain = parse_analysis_response(json.dumps(VALID_RESPONSE))
    fenced = parse_analysis_response("```json\n" + json.dumps(VALID_RESPONSE) + "\n```")
    assert fenced == plain


def test_parse_unknown_subject_normalizes_to_other():
    payload = dict(VALID_RESPONSE, subject_area="Astronomy")
    record = parse_analysis_response(json.dumps(payload))
    assert record.subject_area is SubjectArea.OTHER
    assert any("Astronomy" in w for w in record.warnings)


def test_parse_malformed_json():
    with pytest.raises(MalformedJson):
        parse_analysis_response("I could not find any educational content, sorry!")


def test_parse_missing_field():
    payload = dict(VALID_RESPONSE)
    del payload["learning_objectives"]
    with pytest.raises(SchemaViolation):
        parse_analysis_response(json.dumps(payload))


def test_parse_topic_count_bounds():
    payload = dict(VALID_RESPONSE, main_topics=["only", "two"])
    with pytest.raises(SchemaViolation):
        parse_analysis_response(json.dumps(payload))


def test_serialize_parse_identity():
    record = parse_analysis_response(json.dumps(VALID_RESPONSE))
    assert parse_analysis_response(record.to_json()) == record


def test_parse_string_parameters_accepted():
    payload = dict(VALID_RESPONSE)
    payload["procedural_concepts"] = [
        {"name": "Mixing", "steps": ["pour", "stir"], "parameters": ["temperature"]}
    ]
    record = parse_analysis_response(json.dumps(payload))
    assert record.procedural_concepts[0].parameters[0].name == "temperature"


# --------------------------------------------------------------- themes


def rgb(hex_color):
    v = hex_color.lstrip("#")
    return tuple(int(v[i : i + 2], 16) for i in (0, 2, 4))


def test_theme_families():
    r, g, b = rgb(select_theme(SubjectArea.PHYSICS).primary_color)
    assert b > r and b > g  # blue family
    r, g, b = rgb(select_theme(SubjectArea.BIOLOGY).primary_color)
    assert g > r and g > b  # green family
    r, g, b = rgb(select_theme(SubjectArea.CHEMISTRY).primary_color)
    assert r > g > b  # orange family
    r, g, b = rgb(select_theme(SubjectArea.OTHER).primary_color)
    assert max(r, g, b) - min(r, g, b) < 50  # neutral gray family


def test_theme_total_and_distinct():
    primaries = {select_theme(s).primary_color for s in SubjectArea}
    assert len(primaries) == len(SubjectArea)
    for subject in SubjectArea:
        theme = select_theme(subject)
        assert theme.accent_color == lighten(theme.primary_color)
        assert select_theme(subject) == theme  # deterministic


# ----------------------------------------------------------- form input

NEWTON_FORM = ConceptForm(
    subject="Physics",
    concept_name="Newton's First Law",
    overview="An object in motion stays in motion unless acted on by a force.",
    mastery_points=[
        "State the law of inertia",
        "Predict motion in the absence of net force",
        "Relate friction to stopping distance",
    ],
    design_ideas=(
        "Show a skater on a frictionless rink. Students can adjust skater mass, "
        "initial velocity, and friction to observe how inertia affects stopping distance."
    ),
)


def test_form_newton_first_law():
    record = knowledge_from_form(NEWTON_FORM)
    assert record.subject_area is SubjectArea.PHYSICS
    assert record.grade_level is GradeLevel.HIGH
    assert record.main_topics[0] == "Newton's First Law"
    assert 3 <= len(record.main_topics) <= 5
    assert record.key_concepts[0] == "Newton's First Law"
    assert record.learning_objectives == NEWTON_FORM.mastery_points
    assert len(record.procedural_concepts) == 1
    names = [p.name for p in record.procedural_concepts[0].parameters]
    assert names == ["skater mass", "initial velocity", "friction"]


def test_form_empty_required_fields():
    with pytest.raises(EmptyRequiredField):
        knowledge_from_form(ConceptForm(subject="Physics", concept_name=""))
    with pytest.raises(EmptyRequiredField):
        knowledge_from_form(ConceptForm(subject="  ", concept_name="X"))


def test_form_is_pure():
    a = knowledge_from_form(NEWTON_FORM)
    b = knowledge_from_form(NEWTON_FORM)
    assert a == b


def test_form_unknown_subject_maps_to_other():
    form = ConceptForm(subject="Astronomy", concept_name="Kepler orbits")
    record = knowledge_from_form(form)
    assert record.subject_area is SubjectArea.OTHER


def test_form_without_design_ideas_has_no_procedure():
    form = ConceptForm(
        subject="Math",
        concept_name="Quadratic equations",
        overview="Solving ax^2+bx+c=0.",
        mastery_points=["factorization", "quadratic formula"],
    )
    record = knowledge_from_form(form)
    assert record.procedural_concepts == []
    assert "Solving ax^2+bx+c=0." in record.key_concepts


def test_form_numbered_design_ideas_become_steps():
    form = ConceptForm(
        subject="Chemistry",
        concept_name="Titration",
        design_ideas="1. Fill the burette\n2. Add indicator\n3. Titrate to endpoint",
    )
    record = knowledge_from_form(form)
    steps = record.procedural_concepts[0].steps
    assert steps == ["Fill the burette", "Add indicator", "Titrate to endpoint"]
