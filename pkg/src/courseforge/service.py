"""Courseware service: document analysis with caching, generation, and
streaming click-to-edit sessions with the diff-then-regenerate retry ladder."""

from __future__ import annotations

import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .diffs import (
    DiffError,
    FuzzPolicy,
    HunkApplicationFailure,
    PatchReport,
    apply_patch,
    join_lines,
    parse_unified_diff,
    split_lines,
)
from .dom import (
    DomTree,
    Node,
    UnsupportedXPathSyntax,
    make_citation,
    parse_html,
    resolve_css_selector,
    resolve_xpath,
    snippet_search,
)
from .gateway import ChatRequest, ConfigKey, Gateway
from .knowledge import (
    DocumentPages,
    MalformedJson,
    SchemaViolation,
    StructuredKnowledge,
    build_analysis_prompt,
    parse_analysis_response,
    select_theme,
)
from .pipeline import run_pipeline
from .prompts import EDIT_PROMPT, EDIT_RETRY_CONTEXT, REGENERATE_PROMPT
from .store import (
    Courseware,
    NotFound,
    ORIGIN_EDITED,
    ORIGIN_GENERATED,
    ORIGIN_REGENERATED,
    Repository,
    Version,
)
from .util import content_hash, strip_code_fences

ANALYSIS_CACHE_TTL_SECONDS = 24 * 60 * 60
MAX_DIFF_ATTEMPTS = 3
MAX_EDIT_ATTEMPTS = 4  # 3 diff attempts + 1 full regeneration
RETRY_WINDOW_LINES = 40
MAX_SNIPPET_CHARS = 500


class ManualInputRequired(Exception):
    """Analysis output was unusable; the caller should offer manual input."""


class SelectorMiss(Exception):
    pass


class StaleContext(Exception):
    pass


class EditFailed(Exception):
    pass


@dataclass
class ElementSelector:
    xpath: str = ""
    css_selector: str = ""
    snippet: str = ""
    bounding_box: tuple[float, float, float, float] | None = None

    def __post_init__(self) -> None:
        if len(self.snippet) > MAX_SNIPPET_CHARS:
            raise ValueError(f"snippet exceeds {MAX_SNIPPET_CHARS} characters")


@dataclass
class EditRequest:
    element_selector: ElementSelector
    instruction: str
    context_html: str

    def __post_init__(self) -> None:
        if not self.instruction.strip():
            raise ValueError("instruction must be non-empty")


@dataclass
class AttemptRecord:
    prompt_chars: int
    diff_text: str = ""
    error: str = ""
    patch_report: "PatchReport | None" = None


@dataclass
class EditSession:
    courseware_id: str
    attempts: int = 0
    status: str = "Pending"  # Pending | DiffApplied | Regenerated | Failed
    records: list[AttemptRecord] = field(default_factory=list)


def _canonical(html: str) -> str:
    """Normalize line endings so hash checks and patching agree."""
    return join_lines(split_lines(html))


def _error_event(code: str, message: str, session: EditSession) -> dict:
    return {
        "event": "error",
        "data": {"code": code, "message": message, "attempts": session.attempts},
    }


_ERROR_TYPES = {
    "selector-miss": SelectorMiss,
    "stale-context": StaleContext,
    "edit-failed": EditFailed,
    "not-found": NotFound,
}


class CoursewareService:
    def __init__(
        self,
        repository: Repository,
        gateway: Gateway,
        clock: Callable[[], float] = time.time,
        fuzz_policy: FuzzPolicy | None = None,
    ):
        self.repository = repository
        self.gateway = gateway
        self.clock = clock
        self.fuzz_policy = fuzz_policy or FuzzPolicy()
        self._analysis_cache: dict[str, tuple[float, StructuredKnowledge]] = {}
        self._cache_lock = threading.Lock()
        self._edit_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._edit_locks_guard = threading.Lock()

    # -------------------------------------------------------- documents

    def upload_document(self, pages: DocumentPages) -> str:
        return self.repository.save_document(pages.pages, created_at=self.clock())

    def analyze_document(self, document_id: str) -> StructuredKnowledge:
        pages = self.repository.get_document(document_id)
        cache_key = content_hash(
            b"".join(p.media_type.encode() + b"\x00" + p.data + b"\x00" for p in pages)
        )
        now = self.clock()
        with self._cache_lock:
            cached = self._analysis_cache.get(cache_key)
            if cached and now < cached[0]:
                return cached[1]
        text = self.gateway.complete(build_analysis_prompt(DocumentPages(pages)))
        try:
            knowledge = parse_analysis_response(text)
        except (MalformedJson, SchemaViolation) as exc:
            raise ManualInputRequired(str(exc)) from exc
        with self._cache_lock:
            self._analysis_cache[cache_key] = (self.clock() + ANALYSIS_CACHE_TTL_SECONDS, knowledge)
        return knowledge

    # ------------------------------------------------------- generation

    def generate_courseware(
        self,
        knowledge: StructuredKnowledge | None = None,
        document_id: str | None = None,
    ) -> Courseware:
        if knowledge is None:
            if document_id is None:
                raise ValueError("either knowledge or document_id is required")
            knowledge = self.analyze_document(document_id)
        knowledge.validate()
        theme = select_theme(knowledge.subject_area)
        outcome = run_pipeline(knowledge, self.gateway)
        return self.repository.create_courseware(
            knowledge,
            theme,
            html=_canonical(outcome.html),
            origin=ORIGIN_GENERATED,
            level=outcome.level.value,
            created_at=self.clock(),
        )

    # ------------------------------------------------------------ reads

    def get_courseware(self, courseware_id: str) -> Courseware:
        return self.repository.get_courseware(courseware_id)

    def list_versions(self, courseware_id: str) -> list[Version]:
        return self.repository.get_courseware(courseware_id).versions

    def rollback(self, courseware_id: str, version: int) -> Courseware:
        self.repository.set_current_version(courseware_id, version)
        return self.repository.get_courseware(courseware_id)

    # ------------------------------------------------------------ edits

    def _lock_for(self, courseware_id: str) -> threading.Lock:
        with self._edit_locks_guard:
            return self._edit_locks[courseware_id]

    def _resolve(self, tree: DomTree, selector: ElementSelector) -> Node | None:
        node = None
        if selector.xpath:
            try:
                node = resolve_xpath(tree, selector.xpath)
            except UnsupportedXPathSyntax:
                node = None
        if node is None and selector.css_selector:
            node = resolve_css_selector(tree, selector.css_selector)
        if node is None and selector.snippet:
            node = snippet_search(tree, selector.snippet)
        return node

    def _collect_stream(self, prompt: str):
        """Yield token events; return {'text': ..., 'error': ...} when done."""
        request = ChatRequest([("user", prompt)], ConfigKey.TEXT_GENERATION)
        outcome = {"text": None, "error": None}
        for event in self.gateway.stream(request):
            if event.kind == "token":
                yield {"event": "token", "data": {"text": event.text}}
            elif event.kind == "done":
                outcome["text"] = event.text
            else:
                outcome["error"] = f"{event.code}: {event.message}"
        return outcome

    def submit_edit(
        self,
        courseware_id: str,
        request: EditRequest,
        session: EditSession | None = None,
    ) -> Iterator[dict]:
        """Run one edit as a stream of events; terminal event is
        applied, regenerated, or error. Writes to one courseware serialize."""
        if session is None:
            session = EditSession(courseware_id=courseware_id)
        with self._lock_for(courseware_id):
            yield from self._run_edit(courseware_id, request, session)

    def edit(self, courseware_id: str, request: EditRequest) -> tuple[EditSession, list[dict]]:
        """Drain the edit stream; raise the typed error for error terminals."""
        session = EditSession(courseware_id=courseware_id)
        events = list(self.submit_edit(courseware_id, request, session))
        terminal = events[-1]
        if terminal["event"] == "error":
            code = terminal["data"]["code"]
            raise _ERROR_TYPES.get(code, EditFailed)(terminal["data"]["message"])
        return session, events

    def _run_edit(self, courseware_id: str, request: EditRequest, session: EditSession):
        try:
            courseware = self.repository.get_courseware(courseware_id)
        except NotFound as exc:
            session.status = "Failed"
            yield _error_event("not-found", str(exc), session)
            return

        current = courseware.current()
        if content_hash(request.context_html) != content_hash(current.html):
            session.status = "Failed"
            yield _error_event(
                "stale-context", "context_html does not match the stored current version", session
            )
            return

        tree = parse_html(current.html)
        node = self._resolve(tree, request.element_selector)
        if node is None:
            session.status = "Failed"
            yield _error_event(
                "selector-miss",
                "element not found by xpath, css selector, or snippet search",
                session,
            )
            return
        citation = make_citation(tree, node, 1)
        resolved = {
            "xpath": citation.xpath,
            "css_selector": citation.css_selector,
            "snippet": citation.snippet,
        }
        lines = split_lines(current.html)

        failure_reason = ""
        for _ in range(MAX_DIFF_ATTEMPTS):
            prompt = EDIT_PROMPT.format(
                citation_index=citation.index,
                xpath=citation.xpath,
                css_selector=citation.css_selector,
                snippet=citation.snippet,
                instruction=request.instruction,
                context_html=current.html,
            )
            if failure_reason:
                center = max(node.source_line - 1, 0)
                start = max(0, center - RETRY_WINDOW_LINES)
                end = min(len(lines), center + RETRY_WINDOW_LINES)
                prompt += EDIT_RETRY_CONTEXT.format(
                    failure_reason=failure_reason,
                    window_start=start + 1,
                    window_end=end,
                    window=join_lines(lines[start:end]),
                )
            session.attempts += 1
            record = AttemptRecord(prompt_chars=len(prompt))
            session.records.append(record)

            outcome = yield from self._collect_stream(prompt)
            if outcome["error"] is not None:
                failure_reason = f"model call failed ({outcome['error']})"
                record.error = failure_reason
                continue
            diff_text = strip_code_fences(outcome["text"])
            record.diff_text = diff_text
            try:
                diff = parse_unified_diff(diff_text)
                new_lines, report = apply_patch(lines, diff, self.fuzz_policy)
            except DiffError as exc:
                failure_reason = f"{type(exc).__name__}: {exc}"
                record.error = failure_reason
                if isinstance(exc, HunkApplicationFailure):
                    record.patch_report = exc.report
                continue
            record.patch_report = report

            yield {
                "event": "diff",
                "data": {"diff": diff_text, "attempt": session.attempts, "clean": report.clean},
            }
            version = self.repository.append_version(
                courseware_id, join_lines(new_lines), ORIGIN_EDITED, created_at=self.clock()
            )
            session.status = "DiffApplied"
            yield {
                "event": "applied",
                "data": {
                    "version": version,
                    "attempts": session.attempts,
                    "status": session.status,
                    "resolved": resolved,
                },
            }
            return

        # diff attempts exhausted: one full regeneration honoring the instruction
        session.attempts += 1
        prompt = REGENERATE_PROMPT.format(
            snippet=citation.snippet,
            instruction=request.instruction,
            context_html=current.html,
        )
        session.records.append(AttemptRecord(prompt_chars=len(prompt)))
        outcome = yield from self._collect_stream(prompt)
        text = (outcome["text"] or "").strip()
        if outcome["error"] is not None or not text:
            session.status = "Failed"
            last = outcome["error"] or "empty regeneration output"
            yield _error_event(
                "edit-failed",
                f"all {MAX_EDIT_ATTEMPTS} attempts exhausted; last failure: {last}",
                session,
            )
            return
        new_html = _canonical(strip_code_fences(text))
        version = self.repository.append_version(
            courseware_id, new_html, ORIGIN_REGENERATED, created_at=self.clock()
        )
        session.status = "Regenerated"
        yield {
            "event": "regenerated",
            "data": {
                "version": version,
                "attempts": session.attempts,
                "status": session.status,
                "resolved": resolved,
            },
        }
