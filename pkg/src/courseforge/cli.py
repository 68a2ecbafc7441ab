"""Command-line entry points; every subcommand runs offline with --mock-script."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .diffs import (
    DiffError,
    EXACT_POLICY,
    apply_patch,
    join_lines,
    parse_unified_diff,
    split_lines,
)
from .gateway import (
    AllModelsFailed,
    Gateway,
    HttpGateway,
    MockGateway,
    PageImage,
    load_mock_script,
    load_settings,
)
from .knowledge import (
    ConceptForm,
    DocumentPages,
    EmptyRequiredField,
    GradeLevel,
    SchemaViolation,
    StructuredKnowledge,
    SubjectArea,
    knowledge_from_dict,
    knowledge_from_form,
    select_theme,
)
from .service import (
    CoursewareService,
    EditFailed,
    EditRequest,
    ElementSelector,
    ManualInputRequired,
    SelectorMiss,
)
from .store import ORIGIN_GENERATED, Repository

_IMAGE_SUFFIXES = {".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg"}


def _fail(code: str, message: str, status: int = 1) -> int:
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)
    return status


def _build_gateway(args) -> Gateway:
    settings = load_settings(getattr(args, "config", None))
    if getattr(args, "mock_script", None):
        return MockGateway(load_mock_script(args.mock_script), settings)
    return HttpGateway(settings)


def _build_service(args) -> CoursewareService:
    store_path = getattr(args, "store", None) or os.environ.get("COURSEFORGE_STORE") or ":memory:"
    return CoursewareService(Repository(store_path), _build_gateway(args))


def _stub_knowledge() -> StructuredKnowledge:
    # minimal valid record to host a standalone HTML file in the store
    return StructuredKnowledge(
        main_topics=["Document", "Editing", "Session"],
        key_concepts=["standalone document"],
        learning_objectives=[],
        prerequisite_knowledge=[],
        procedural_concepts=[],
        subject_area=SubjectArea.OTHER,
        grade_level=GradeLevel.HIGH,
    )


def cmd_analyze(args) -> int:
    source = Path(args.source)
    if not source.exists():
        return _fail("missing-file", f"{source} does not exist", 2)
    if source.suffix.lower() == ".json":
        try:
            form = ConceptForm(**json.loads(source.read_text(encoding="utf-8")))
            knowledge = knowledge_from_form(form)
        except (TypeError, ValueError, EmptyRequiredField, SchemaViolation) as exc:
            return _fail("invalid-form", str(exc))
        print(knowledge.to_json())
        return 0
    if not source.is_dir():
        return _fail("invalid-source", f"{source} is neither a directory nor a .json form", 2)
    images = sorted(p for p in source.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not images:
        return _fail("no-pages", f"no .png/.jpg images in {source}", 2)
    pages = DocumentPages(
        [PageImage(p.read_bytes(), _IMAGE_SUFFIXES[p.suffix.lower()]) for p in images]
    )
    service = _build_service(args)
    try:
        document_id = service.upload_document(pages)
        knowledge = service.analyze_document(document_id)
    except ManualInputRequired as exc:
        return _fail("manual-input-required", str(exc))
    except AllModelsFailed as exc:
        return _fail("all-models-failed", str(exc))
    print(knowledge.to_json())
    return 0


def cmd_generate(args) -> int:
    path = Path(args.knowledge)
    if not path.exists():
        return _fail("missing-file", f"{path} does not exist", 2)
    try:
        knowledge = knowledge_from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (ValueError, SchemaViolation) as exc:
        return _fail("invalid-knowledge", str(exc))
    service = _build_service(args)
    courseware = service.generate_courseware(knowledge=knowledge)
    html = courseware.current().html
    if args.output:
        Path(args.output).write_text(html + "\n", encoding="utf-8")
    else:
        print(html)
    print(
        json.dumps(
            {
                "courseware_id": courseware.id,
                "version": courseware.current_version,
                "level": courseware.current().level,
            }
        ),
        file=sys.stderr,
    )
    return 0


def cmd_edit(args) -> int:
    path = Path(args.courseware)
    if not path.exists():
        return _fail("missing-file", f"{path} does not exist", 2)
    service = _build_service(args)
    knowledge = _stub_knowledge()
    courseware = service.repository.create_courseware(
        knowledge,
        select_theme(knowledge.subject_area),
        html=join_lines(split_lines(path.read_text(encoding="utf-8"))),
        origin=ORIGIN_GENERATED,
        level=None,
        created_at=service.clock(),
    )
    request = EditRequest(
        element_selector=ElementSelector(
            xpath=args.xpath or "",
            css_selector=args.css_selector or "",
            snippet=args.snippet or "",
        ),
        instruction=args.instruction,
        context_html=courseware.current().html,
    )
    try:
        session, _events = service.edit(courseware.id, request)
    except (SelectorMiss, EditFailed) as exc:
        return _fail(type(exc).__name__.lower(), str(exc))
    updated = service.get_courseware(courseware.id)
    target = Path(args.output) if args.output else path
    target.write_text(updated.current().html + "\n", encoding="utf-8")
    print(
        json.dumps(
            {
                "status": session.status,
                "attempts": session.attempts,
                "version": updated.current_version,
                "output": str(target),
            }
        )
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(_build_service(args)), host=args.host, port=args.port)
    return 0


def cmd_diff_apply(args) -> int:
    original_path = Path(args.original)
    patch_path = Path(args.patch)
    for p in (original_path, patch_path):
        if not p.exists():
            return _fail("missing-file", f"{p} does not exist", 2)
    text = original_path.read_text(encoding="utf-8")
    lines = split_lines(text)
    try:
        diff = parse_unified_diff(patch_path.read_text(encoding="utf-8"))
        policy = EXACT_POLICY if args.exact else None
        new_lines, report = apply_patch(lines, diff, policy)
    except DiffError as exc:
        return _fail(type(exc).__name__, str(exc))
    result = join_lines(new_lines) + ("\n" if text.endswith("\n") else "")
    if args.output:
        Path(args.output).write_text(result, encoding="utf-8")
    else:
        sys.stdout.write(result)
    if not report.clean:
        print(
            json.dumps(
                {
                    "clean": False,
                    "offsets": [h.offset_used for h in report.hunks],
                }
            ),
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="courseforge")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mock-script", help="JSON mock transcript; run fully offline")
    common.add_argument("--config", help="gateway config file (JSON)")
    common.add_argument("--store", help="SQLite store path (default: in-memory)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analyze page images or a concept form")
    p.add_argument("source", help="directory of page images, or a .json concept form")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", parents=[common], help="generate courseware from knowledge JSON")
    p.add_argument("knowledge", help="StructuredKnowledge JSON file")
    p.add_argument("--output", help="write the generated HTML here instead of stdout")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("edit", parents=[common], help="edit an HTML file via a cited element")
    p.add_argument("courseware", help="HTML file to edit")
    p.add_argument("--xpath", default="", help="xpath of the element to edit")
    p.add_argument("--css-selector", default="", dest="css_selector")
    p.add_argument("--snippet", default="", help="first 500 chars of the element's HTML")
    p.add_argument("--instruction", required=True, help="natural-language change request")
    p.add_argument("--output", help="write the result here instead of in place")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("diff-apply", parents=[common], help="apply a unified diff to a file")
    p.add_argument("original")
    p.add_argument("patch")
    p.add_argument("--output", help="write the result here instead of stdout")
    p.add_argument("--exact", action="store_true", help="disable fuzzy context matching")
    p.set_defaults(func=cmd_diff_apply)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
