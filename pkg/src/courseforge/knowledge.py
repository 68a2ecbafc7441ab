"""Structured pedagogical knowledge: extraction schema, themes, form input."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum

from .gateway import ChatRequest, ConfigKey, PageImage
from .prompts import ANALYSIS_PROMPT
from .util import strip_code_fences

MAX_DOCUMENT_PAGES = 50


class SubjectArea(str, Enum):
    PHYSICS = "Physics"
    CHEMISTRY = "Chemistry"
    BIOLOGY = "Biology"
    MATH = "Math"
    GEOGRAPHY = "Geography"
    OTHER = "Other"


class GradeLevel(str, Enum):
    PRIMARY = "Primary"
    MIDDLE = "Middle"
    HIGH = "High"
    UNDERGRADUATE = "Undergraduate"
    GRADUATE = "Graduate"


class MalformedJson(Exception):
    pass


class SchemaViolation(Exception):
    pass


class PageLimitExceeded(Exception):
    pass


class EmptyRequiredField(Exception):
    pass


@dataclass
class AdjustableParameter:
    name: str
    description: str = ""


@dataclass
class ProceduralConcept:
    name: str
    steps: list[str]
    parameters: list[AdjustableParameter] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "steps": list(self.steps),
            "parameters": [{"name": p.name, "description": p.description} for p in self.parameters],
        }


@dataclass
class StructuredKnowledge:
    main_topics: list[str]
    key_concepts: list[str]
    learning_objectives: list[str]
    prerequisite_knowledge: list[str]
    procedural_concepts: list[ProceduralConcept]
    subject_area: SubjectArea
    grade_level: GradeLevel
    warnings: list[str] = field(default_factory=list)  # not serialized

    def validate(self) -> None:
        if not 3 <= len(self.main_topics) <= 5:
            raise SchemaViolation("main_topics must have 3-5 entries")
        if not self.key_concepts and not self.procedural_concepts:
            raise SchemaViolation("key_concepts or procedural_concepts must be non-empty")
        for procedure in self.procedural_concepts:
            if not procedure.steps:
                raise SchemaViolation(f"procedure {procedure.name!r} has no steps")

    def to_dict(self) -> dict:
        return {
            "main_topics": list(self.main_topics),
            "key_concepts": list(self.key_concepts),
            "learning_objectives": list(self.learning_objectives),
            "prerequisite_knowledge": list(self.prerequisite_knowledge),
            "procedural_concepts": [p.to_dict() for p in self.procedural_concepts],
            "subject_area": self.subject_area.value,
            "grade_level": self.grade_level.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class DocumentPages:
    pages: list[PageImage]

    def __post_init__(self) -> None:
        if len(self.pages) > MAX_DOCUMENT_PAGES:
            raise PageLimitExceeded(f"{len(self.pages)} pages exceeds the {MAX_DOCUMENT_PAGES}-page limit")
        if not self.pages:
            raise ValueError("a document needs at least one page")

    @property
    def page_count(self) -> int:
        return len(self.pages)


@dataclass
class Theme:
    primary_color: str
    accent_color: str
    subject_area: SubjectArea

    def to_dict(self) -> dict:
        return {
            "primary_color": self.primary_color,
            "accent_color": self.accent_color,
            "subject_area": self.subject_area.value,
        }


def theme_from_dict(payload: dict) -> Theme:
    return Theme(
        primary_color=payload["primary_color"],
        accent_color=payload["accent_color"],
        subject_area=SubjectArea(payload["subject_area"]),
    )


@dataclass
class ConceptForm:
    subject: str
    concept_name: str
    overview: str = ""
    mastery_points: list[str] = field(default_factory=list)
    design_ideas: str = ""


# ------------------------------------------------------------------ themes

THEME_PRIMARIES = {
    SubjectArea.PHYSICS: "#1E5AA8",
    SubjectArea.BIOLOGY: "#2E7D32",
    SubjectArea.CHEMISTRY: "#E65100",
    SubjectArea.MATH: "#6A1B9A",
    SubjectArea.GEOGRAPHY: "#00695C",
    SubjectArea.OTHER: "#455A64",
}


def lighten(hex_color: str, amount: float = 0.4) -> str:
    """Blend a 6-digit hex color toward white by `amount`."""
    value = hex_color.lstrip("#")
    channels = [int(value[i : i + 2], 16) for i in (0, 2, 4)]
    blended = [round(c + (255 - c) * amount) for c in channels]
    return "#" + "".join(f"{c:02X}" for c in blended)


def select_theme(subject: SubjectArea) -> Theme:
    primary = THEME_PRIMARIES[subject]
    return Theme(primary_color=primary, accent_color=lighten(primary), subject_area=subject)


# ------------------------------------------------------------- analysis


def build_analysis_prompt(pages: DocumentPages) -> ChatRequest:
    """Fixed analysis instruction plus the page images, in page order."""
    return ChatRequest(
        messages=[("user", ANALYSIS_PROMPT)],
        config_key=ConfigKey.MULTI_MODAL_ANALYSIS,
        images=list(pages.pages),
    )


def _as_text_list(value, field_name: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaViolation(f"{field_name} must be a list of strings")
    return [v.strip() for v in value if v.strip()]


def _parse_parameters(raw) -> list[AdjustableParameter]:
    params = []
    for item in raw or []:
        if isinstance(item, str):
            params.append(AdjustableParameter(name=item))
        elif isinstance(item, dict) and isinstance(item.get("name"), str):
            params.append(
                AdjustableParameter(name=item["name"], description=str(item.get("description", "")))
            )
        else:
            raise SchemaViolation(f"unparseable adjustable parameter: {item!r}")
    return params


def _parse_procedures(raw) -> list[ProceduralConcept]:
    if raw is None:
        return []
    if not isinstance(raw, list):
        raise SchemaViolation("procedural_concepts must be a list")
    procedures = []
    for item in raw:
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            raise SchemaViolation(f"unparseable procedural concept: {item!r}")
        procedures.append(
            ProceduralConcept(
                name=item["name"],
                steps=_as_text_list(item.get("steps", []), "steps"),
                parameters=_parse_parameters(item.get("parameters")),
            )
        )
    return procedures


def parse_analysis_response(text: str) -> StructuredKnowledge:
    """Validate a model's analysis output into a StructuredKnowledge record.

    Raises MalformedJson when the payload is not JSON at all (the caller is
    expected to fall back to manual input) and SchemaViolation when fields
    are missing or mis-shaped. Unknown subject or grade strings normalize to
    Other / High with a warning rather than failing.
    """
    try:
        payload = json.loads(strip_code_fences(text))
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(payload, dict):
        raise MalformedJson("analysis response is not a JSON object")
    return knowledge_from_dict(payload)


def knowledge_from_dict(payload: dict) -> StructuredKnowledge:
    required = (
        "main_topics",
        "key_concepts",
        "learning_objectives",
        "prerequisite_knowledge",
        "procedural_concepts",
        "subject_area",
        "grade_level",
    )
    missing = [name for name in required if name not in payload]
    if missing:
        raise SchemaViolation(f"missing fields: {', '.join(missing)}")

    warnings: list[str] = []
    subject_raw = str(payload["subject_area"]).strip()
    try:
        subject = SubjectArea(subject_raw.capitalize())
    except ValueError:
        subject = SubjectArea.OTHER
        warnings.append(f"unknown subject_area {subject_raw!r} normalized to Other")
    grade_raw = str(payload["grade_level"]).strip()
    try:
        grade = GradeLevel(grade_raw.capitalize())
    except ValueError:
        grade = GradeLevel.HIGH
        warnings.append(f"unknown grade_level {grade_raw!r} normalized to High")

    record = StructuredKnowledge(
        main_topics=_as_text_list(payload["main_topics"], "main_topics"),
        key_concepts=_as_text_list(payload["key_concepts"], "key_concepts"),
        learning_objectives=_as_text_list(payload["learning_objectives"], "learning_objectives"),
        prerequisite_knowledge=_as_text_list(payload["prerequisite_knowledge"], "prerequisite_knowledge"),
        procedural_concepts=_parse_procedures(payload["procedural_concepts"]),
        subject_area=subject,
        grade_level=grade,
        warnings=warnings,
    )
    record.validate()
    return record


# ------------------------------------------------------------- form input

_STEP_ITEM = re.compile(r"(?m)^\s*(?:\d+[.)]|step\s+\d+[:.]?|[-*•])\s*(.+)$", re.IGNORECASE)
_ADJUST_PHRASE = re.compile(r"adjust(?:able|ing|s)?\s+(?:the\s+)?([^.;]+)", re.IGNORECASE)


def _steps_from_text(text: str) -> list[str]:
    items = [m.strip() for m in _STEP_ITEM.findall(text)]
    if len(items) >= 2:
        return items
    sentences = [s.strip() for s in re.split(r"(?<=[.!?])\s+", text) if s.strip()]
    return sentences


def _parameters_from_text(text: str) -> list[AdjustableParameter]:
    match = _ADJUST_PHRASE.search(text)
    if not match:
        return []
    blob = re.split(r"\s+to\s+|\s+so\s+|\s+and\s+observe\b", match.group(1))[0]
    parts = re.split(r",\s*(?:and\s+)?|\s+and\s+", blob)
    names = [p.strip() for p in parts if p.strip()]
    cleaned = [re.sub(r"\s*parameters?$", "", n) for n in names]
    return [AdjustableParameter(name=n, description="adjustable parameter") for n in cleaned if n]


def knowledge_from_form(form: ConceptForm) -> StructuredKnowledge:
    """Deterministically map a direct-input concept form to a knowledge record."""
    if not form.subject.strip():
        raise EmptyRequiredField("subject is required")
    if not form.concept_name.strip():
        raise EmptyRequiredField("concept_name is required")

    try:
        subject = SubjectArea(form.subject.strip().capitalize())
    except ValueError:
        subject = SubjectArea.OTHER

    topics = [form.concept_name.strip()]
    for point in form.mastery_points:
        if len(topics) >= 5:
            break
        if point.strip() and point.strip() not in topics:
            topics.append(point.strip())
    for filler in (form.subject.strip(), "Overview"):
        if len(topics) >= 3:
            break
        if filler and filler not in topics:
            topics.append(filler)

    key_concepts = [form.concept_name.strip()]
    if form.overview.strip():
        key_concepts.append(form.overview.strip())

    procedures: list[ProceduralConcept] = []
    design = form.design_ideas.strip()
    if design:
        parameters = _parameters_from_text(design)
        numbered = _STEP_ITEM.findall(design)
        if len(numbered) >= 2 or parameters:
            procedures.append(
                ProceduralConcept(
                    name=form.concept_name.strip(),
                    steps=_steps_from_text(design),
                    parameters=parameters,
                )
            )
        else:
            key_concepts.append(design)

    record = StructuredKnowledge(
        main_topics=topics[:5],
        key_concepts=key_concepts,
        learning_objectives=[p.strip() for p in form.mastery_points if p.strip()],
        prerequisite_knowledge=[],
        procedural_concepts=procedures,
        subject_area=subject,
        grade_level=GradeLevel.HIGH,
    )
    record.validate()
    return record
