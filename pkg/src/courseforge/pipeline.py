"""Two-stage generation with validation feedback and graceful degradation.

The ladder never raises: stage 1 + stage 2 success yields Full, a stage 1
failure falls back to single-pass generation (SinglePass), a stage 2 failure
keeps stage 1 output with injected styling (BasicStyle), and when everything
fails a deterministic emergency page is returned (Emergency).
"""

from __future__ import annotations

import html as html_escape
from dataclasses import dataclass, field
from enum import Enum

from .dom import DomTree, parse_html
from .gateway import AllModelsFailed, ChatRequest, ConfigKey, Gateway
from .knowledge import StructuredKnowledge, Theme, select_theme
from .prompts import (
    SINGLE_PASS_PROMPT,
    STAGE1_PROMPT,
    STAGE2_PROMPT,
    VALIDATION_RETRY_SUFFIX,
)
from .util import strip_code_fences

DEFAULT_STAGE1_ATTEMPTS = 3
DEFAULT_STAGE2_ATTEMPTS = 2

_PROCESS_MARKERS = ("process", "step")
_SIMULATION_MARKERS = ("simulation", "control")
_CONTROL_TAGS = {"INPUT", "BUTTON", "SELECT", "TEXTAREA"}

STYLE_MARKER_ID = "courseforge-basic-theme"


class DegradationLevel(str, Enum):
    FULL = "Full"
    SINGLE_PASS = "SinglePass"
    BASIC_STYLE = "BasicStyle"
    EMERGENCY = "Emergency"


@dataclass
class ValidationReport:
    well_formed: bool
    has_script: bool
    has_interactive_control: bool
    has_two_panel_layout: bool
    errors: list[tuple[str, str, str]] = field(default_factory=list)  # (code, message, location)

    @property
    def content_checks_pass(self) -> bool:
        return (
            self.well_formed
            and self.has_script
            and self.has_interactive_control
            and self.has_two_panel_layout
        )

    @property
    def polish_checks_pass(self) -> bool:
        return self.well_formed and not any(code == "missing-theme-color" for code, _, _ in self.errors)


@dataclass
class GenerationOutcome:
    html: str
    level: DegradationLevel
    stage1_attempts: int
    stage2_attempts: int
    reports: list[ValidationReport] = field(default_factory=list)


class Stage1Failed(Exception):
    def __init__(self, attempts: int, reports: list[ValidationReport]):
        self.attempts = attempts
        self.reports = reports
        super().__init__(f"content stage failed after {attempts} attempts")


class Stage2Failed(Exception):
    def __init__(self, attempts: int, reports: list[ValidationReport]):
        self.attempts = attempts
        self.reports = reports
        super().__init__(f"polish stage failed after {attempts} attempts")


# ------------------------------------------------------------- prompts


def _numbered(items: list[str]) -> str:
    if not items:
        return "(none provided)"
    return "\n".join(f"{i}. {item}" for i, item in enumerate(items, start=1))


def _procedures_block(knowledge: StructuredKnowledge) -> str:
    if not knowledge.procedural_concepts:
        return "(none provided)"
    blocks = []
    for i, procedure in enumerate(knowledge.procedural_concepts, start=1):
        lines = [f"{i}. {procedure.name}"]
        lines.extend(f"   step: {step}" for step in procedure.steps)
        lines.extend(
            f"   adjustable parameter: {p.name}" + (f" ({p.description})" if p.description else "")
            for p in procedure.parameters
        )
        blocks.append("\n".join(lines))
    return "\n".join(blocks)


def build_stage1_prompt(knowledge: StructuredKnowledge) -> str:
    return STAGE1_PROMPT.format(
        subject_area=knowledge.subject_area.value,
        key_concepts=_numbered(knowledge.key_concepts),
        procedural_concepts=_procedures_block(knowledge),
    )


def build_stage2_prompt(stage1_html: str, theme: Theme) -> str:
    return STAGE2_PROMPT.format(
        stage1_html=stage1_html,
        theme_config=f"{theme.subject_area.value} (primary {theme.primary_color}, accent {theme.accent_color})",
        primary=theme.primary_color,
        accent=theme.accent_color,
    )


def build_single_pass_prompt(knowledge: StructuredKnowledge, theme: Theme) -> str:
    return SINGLE_PASS_PROMPT.format(
        subject_area=knowledge.subject_area.value,
        key_concepts=_numbered(knowledge.key_concepts),
        procedural_concepts=_procedures_block(knowledge),
        primary=theme.primary_color,
        accent=theme.accent_color,
    )


# ------------------------------------------------------------ validation


def _structure_errors(tree: DomTree) -> list[tuple[str, str, str]]:
    return [("structure", "markup needed structural repair", detail) for _, detail in tree.repairs]


def _has_marker(node, markers) -> bool:
    blob = (node.attrs.get("id", "") + " " + node.attrs.get("class", "")).lower()
    return any(marker in blob for marker in markers)


def _has_two_panel_layout(tree: DomTree) -> bool:
    parents = [tree.root, *tree.elements()]
    for parent in parents:
        kids = parent.element_children()
        process = [k for k in kids if _has_marker(k, _PROCESS_MARKERS)]
        simulation = [k for k in kids if _has_marker(k, _SIMULATION_MARKERS)]
        if any(p is not s for p in process for s in simulation):
            return True
    return False


def validate_stage1(html: str) -> ValidationReport:
    """Static checks that the content stage produced an interactive page."""
    tree = parse_html(html)
    errors = _structure_errors(tree)
    elements = list(tree.elements())

    has_script = any(node.tag == "SCRIPT" for node in elements)
    has_control = any(
        node.tag in _CONTROL_TAGS or any(name.startswith("on") for name in node.attrs)
        for node in elements
    )
    has_panels = _has_two_panel_layout(tree)

    if not has_script:
        errors.append(("no-script", "no script block found", ""))
    if not has_control:
        errors.append(("no-interactive-control", "no input/button/select or event handler found", ""))
    if not has_panels:
        errors.append(
            (
                "no-two-panel-layout",
                "expected sibling containers marked process/step and simulation/control",
                "",
            )
        )
    return ValidationReport(
        well_formed=not tree.repairs,
        has_script=has_script,
        has_interactive_control=has_control,
        has_two_panel_layout=has_panels,
        errors=errors,
    )


def validate_stage2(html: str, theme: Theme) -> ValidationReport:
    """Well-formedness plus presence of the theme's primary color."""
    report = validate_stage1(html)
    if theme.primary_color.lower() not in html.lower():
        report.errors.append(
            ("missing-theme-color", f"primary color {theme.primary_color} not found", "")
        )
    return report


def _format_errors(report: ValidationReport) -> str:
    return "\n".join(f"- {code}: {message} {location}".rstrip() for code, message, location in report.errors)


# ------------------------------------------------------------- stages


def _generate(gateway: Gateway, prompt: str) -> str:
    raw = gateway.complete(ChatRequest([("user", prompt)], ConfigKey.TEXT_GENERATION))
    return strip_code_fences(raw)


def run_stage1(
    knowledge: StructuredKnowledge,
    gateway: Gateway,
    max_attempts: int = DEFAULT_STAGE1_ATTEMPTS,
) -> tuple[str, int, list[ValidationReport]]:
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    base = build_stage1_prompt(knowledge)
    prompt = base
    reports: list[ValidationReport] = []
    for attempt in range(1, max_attempts + 1):
        try:
            html = _generate(gateway, prompt)
        except AllModelsFailed as exc:
            raise Stage1Failed(attempt, reports) from exc
        report = validate_stage1(html)
        reports.append(report)
        if report.content_checks_pass:
            return html, attempt, reports
        prompt = base + VALIDATION_RETRY_SUFFIX.format(errors=_format_errors(report))
    raise Stage1Failed(max_attempts, reports)


def run_stage2(
    stage1_html: str,
    theme: Theme,
    gateway: Gateway,
    max_attempts: int = DEFAULT_STAGE2_ATTEMPTS,
) -> tuple[str, int, list[ValidationReport]]:
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    base = build_stage2_prompt(stage1_html, theme)
    prompt = base
    reports: list[ValidationReport] = []
    for attempt in range(1, max_attempts + 1):
        try:
            html = _generate(gateway, prompt)
        except AllModelsFailed as exc:
            raise Stage2Failed(attempt, reports) from exc
        report = validate_stage2(html, theme)
        reports.append(report)
        if report.polish_checks_pass:
            return html, attempt, reports
        prompt = base + VALIDATION_RETRY_SUFFIX.format(errors=_format_errors(report))
    raise Stage2Failed(max_attempts, reports)


def run_pipeline(
    knowledge: StructuredKnowledge,
    gateway: Gateway,
    stage1_attempts: int = DEFAULT_STAGE1_ATTEMPTS,
    stage2_attempts: int = DEFAULT_STAGE2_ATTEMPTS,
) -> GenerationOutcome:
    """Execute the full ladder; always returns a usable document."""
    theme = select_theme(knowledge.subject_area)
    reports: list[ValidationReport] = []

    try:
        stage1_html, attempts1, stage_reports = run_stage1(knowledge, gateway, stage1_attempts)
        reports.extend(stage_reports)
    except Stage1Failed as failure:
        reports.extend(failure.reports)
        try:
            html = _generate(gateway, build_single_pass_prompt(knowledge, theme))
            report = validate_stage2(html, theme)
            reports.append(report)
            if report.well_formed:
                return GenerationOutcome(
                    html, DegradationLevel.SINGLE_PASS, failure.attempts, 0, reports
                )
        except AllModelsFailed:
            pass
        return GenerationOutcome(
            emergency_template(knowledge), DegradationLevel.EMERGENCY, failure.attempts, 0, reports
        )

    try:
        stage2_html, attempts2, stage_reports = run_stage2(
            stage1_html, theme, gateway, stage2_attempts
        )
        reports.extend(stage_reports)
        return GenerationOutcome(stage2_html, DegradationLevel.FULL, attempts1, attempts2, reports)
    except Stage2Failed as failure:
        reports.extend(failure.reports)
        return GenerationOutcome(
            apply_basic_styling(stage1_html, theme),
            DegradationLevel.BASIC_STYLE,
            attempts1,
            failure.attempts,
            reports,
        )


# ------------------------------------------------------------ fallbacks


def apply_basic_styling(html: str, theme: Theme) -> str:
    """Inject a deterministic theme style block; idempotent, no model call."""
    if STYLE_MARKER_ID in html:
        return html
    style = (
        f'<style id="{STYLE_MARKER_ID}">\n'
        f"body {{ font-family: system-ui, sans-serif; margin: 1.5rem; color: #212121; }}\n"
        f"h1, h2, h3 {{ color: {theme.primary_color}; }}\n"
        f"button {{ background: {theme.primary_color}; color: #ffffff; "
        f"border: 1px solid {theme.accent_color}; padding: 0.4rem 0.9rem; }}\n"
        f"input[type=range] {{ accent-color: {theme.primary_color}; }}\n"
        f"a {{ color: {theme.accent_color}; }}\n"
        f"</style>"
    )
    lowered = html.lower()
    head_end = lowered.find("</head>")
    if head_end != -1:
        return html[:head_end] + style + "\n" + html[head_end:]
    body_open = lowered.find("<body")
    if body_open != -1:
        tag_end = html.find(">", body_open)
        if tag_end != -1:
            return html[: tag_end + 1] + "\n" + style + html[tag_end + 1:]
    return style + "\n" + html


def emergency_template(knowledge: StructuredKnowledge) -> str:
    """Static, always well-formed page shown when every generation path fails."""
    concepts = list(knowledge.key_concepts) + [p.name for p in knowledge.procedural_concepts]
    items = "".join(f"<li>{html_escape.escape(c)}</li>" for c in concepts) or "<li>(no concepts recorded)</li>"
    subject = html_escape.escape(knowledge.subject_area.value)
    return (
        "<!DOCTYPE html>\n"
        "<html>\n"
        "<head>\n"
        '<meta charset="utf-8">\n'
        "<title>Courseware unavailable</title>\n"
        "<style>\n"
        "body { font-family: system-ui, sans-serif; margin: 3rem auto; max-width: 40rem; color: #333; }\n"
        ".notice { border: 1px solid #ccc; border-radius: 8px; padding: 1.5rem 2rem; }\n"
        "</style>\n"
        "</head>\n"
        "<body>\n"
        '<main class="notice">\n'
        "<h1>We could not build this simulation right now</h1>\n"
        "<p>Generation did not complete, but your content is safe. "
        "Please try again in a few minutes, or adjust the concepts and regenerate.</p>\n"
        f"<h2>Subject</h2>\n<p>{subject}</p>\n"
        f"<h2>Concepts captured</h2>\n<ul>{items}</ul>\n"
        "</main>\n"
        "</body>\n"
        "</html>"
    )
