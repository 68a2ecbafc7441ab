"""Unified-diff parsing, generation, and fuzzy patch application.

Documents are handled as sequences of lines without terminators. Carriage
returns are stripped on ingest and never re-emitted.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field

CONTEXT = " "
REMOVE = "-"
ADD = "+"

_HUNK_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


class DiffError(Exception):
    """Base class for diff parsing and application failures."""


class MalformedHeader(DiffError):
    pass


class CountMismatch(DiffError):
    pass


class UnknownLinePrefix(DiffError):
    pass


class OverlappingHunks(DiffError):
    pass


class HunkApplicationFailure(DiffError):
    """A hunk found no acceptable anchor; the whole patch is aborted."""

    def __init__(self, hunk_index: int, best_candidate: int | None, report: "PatchReport"):
        self.hunk_index = hunk_index
        self.best_candidate = best_candidate
        self.report = report
        at = "no candidate" if best_candidate is None else f"best candidate at line {best_candidate + 1}"
        super().__init__(f"hunk {hunk_index} could not be anchored ({at})")


@dataclass
class Hunk:
    source_start: int  # 1-based; for source_len == 0 it is the line the insert follows
    source_len: int
    target_start: int
    target_len: int
    lines: list[tuple[str, str]]  # (tag, text), tag in {CONTEXT, REMOVE, ADD}

    def source_lines(self) -> list[tuple[str, str]]:
        return [(tag, text) for tag, text in self.lines if tag != ADD]

    def target_lines(self) -> list[str]:
        return [text for tag, text in self.lines if tag != REMOVE]

    def validate(self) -> None:
        n_source = sum(1 for tag, _ in self.lines if tag != ADD)
        n_target = sum(1 for tag, _ in self.lines if tag != REMOVE)
        if n_source != self.source_len or n_target != self.target_len:
            raise CountMismatch(
                f"hunk declares -{self.source_start},{self.source_len} "
                f"+{self.target_start},{self.target_len} but carries "
                f"{n_source} source / {n_target} target lines"
            )


@dataclass
class DiffDocument:
    source_name: str = "original.html"
    target_name: str = "modified.html"
    hunks: list[Hunk] = field(default_factory=list)


@dataclass
class FuzzPolicy:
    """Bounds on how far patch anchoring may relax when context has drifted.

    Remove lines must always match exactly or whitespace-normalized; the
    similarity allowance applies to context lines only, so content is never
    deleted that the diff did not actually quote.
    """

    max_offset: int = 20
    whitespace_normalize: bool = True
    max_mismatched_context_per_hunk: int = 1
    line_similarity_threshold: float = 0.8

    def __post_init__(self) -> None:
        if self.max_offset < 0:
            raise ValueError("max_offset must be >= 0")
        if not 0.0 <= self.line_similarity_threshold <= 1.0:
            raise ValueError("line_similarity_threshold must be in [0, 1]")


#: Policy for byte-exact application (round-trip of freshly generated diffs).
EXACT_POLICY = FuzzPolicy(
    max_offset=0,
    whitespace_normalize=False,
    max_mismatched_context_per_hunk=0,
    line_similarity_threshold=1.0,
)


@dataclass
class HunkOutcome:
    applied: bool
    offset_used: int = 0
    normalized_match: bool = False
    mismatched_context_count: int = 0


@dataclass
class PatchReport:
    hunks: list[HunkOutcome] = field(default_factory=list)
    failed_hunk_indices: list[int] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.failed_hunk_indices and all(
            h.applied and h.offset_used == 0 and not h.normalized_match and h.mismatched_context_count == 0
            for h in self.hunks
        )


def split_lines(text: str) -> list[str]:
    """Split text into terminator-free lines, stripping carriage returns."""
    if not text:
        return []
    lines = [line.removesuffix("\r") for line in text.split("\n")]
    if lines and lines[-1] == "" and text.endswith("\n"):
        lines.pop()
    return lines


def join_lines(lines: list[str]) -> str:
    return "\n".join(lines)


def parse_unified_diff(text: str) -> DiffDocument:
    """Parse unified-diff text into a DiffDocument.

    Raises MalformedHeader for a missing or garbled ``@@`` header,
    CountMismatch when declared lengths disagree with the tagged lines, and
    UnknownLinePrefix for body lines with an unrecognized first character.
    """
    if not text.strip():
        raise MalformedHeader("diff text is empty")

    doc = DiffDocument()
    saw_file_header = False
    hunks: list[Hunk] = []

    pending: Hunk | None = None
    pending_body: list[tuple[str, str]] = []
    pending_src = pending_dst = 0

    def body_complete() -> bool:
        assert pending is not None
        return pending_src >= pending.source_len and pending_dst >= pending.target_len

    def close_pending() -> None:
        nonlocal pending, pending_body, pending_src, pending_dst
        if pending is None:
            return
        pending.lines = pending_body
        pending.validate()
        # A hunk with no Remove or Add lines is a no-op; dropping it keeps
        # the document semantically equivalent.
        if any(tag != CONTEXT for tag, _ in pending.lines):
            hunks.append(pending)
        pending = None
        pending_body = []
        pending_src = pending_dst = 0

    for raw in split_lines(text):
        # While the open hunk still owes lines per its declared counts, every
        # line is body; this keeps Remove/Add lines that happen to start with
        # "---"/"+++"/"@@" from being mistaken for headers.
        if pending is not None and not body_complete():
            if raw.startswith("\\"):
                continue  # "\ No newline at end of file"
            if raw == "":
                # Models routinely drop the leading space on blank context lines.
                tag, payload = CONTEXT, ""
            elif raw.startswith("@@") and _HUNK_HEADER.match(raw):
                raise CountMismatch(
                    f"hunk declares -{pending.source_start},{pending.source_len} "
                    f"+{pending.target_start},{pending.target_len} but its body ended early"
                )
            elif raw[0] in (CONTEXT, REMOVE, ADD):
                tag, payload = raw[0], raw[1:]
            else:
                raise UnknownLinePrefix(f"unexpected line prefix {raw[0]!r} in {raw!r}")
            pending_body.append((tag, payload))
            if tag != ADD:
                pending_src += 1
            if tag != REMOVE:
                pending_dst += 1
            continue

        if pending is not None and raw and raw[0] in (CONTEXT, REMOVE, ADD):
            # Counts are satisfied; more body-prefixed lines mean the header
            # under-declared, unless this is genuinely the next header.
            is_header = raw.startswith("--- ") or raw.startswith("+++ ") or raw.startswith("@@")
            if not is_header:
                raise CountMismatch(
                    f"hunk declares -{pending.source_start},{pending.source_len} "
                    f"but carries extra line {raw!r}"
                )

        if raw.startswith("--- "):
            close_pending()
            if hunks or saw_file_header:
                raise MalformedHeader("multiple file sections are not supported")
            doc.source_name = raw[4:].split("\t", 1)[0].strip()
            saw_file_header = True
            continue
        if raw.startswith("+++ ") and saw_file_header and not hunks and pending is None:
            doc.target_name = raw[4:].split("\t", 1)[0].strip()
            continue
        if raw.startswith("@@"):
            close_pending()
            m = _HUNK_HEADER.match(raw)
            if not m:
                raise MalformedHeader(f"garbled hunk header: {raw!r}")
            pending = Hunk(
                source_start=int(m.group(1)),
                source_len=int(m.group(2)) if m.group(2) is not None else 1,
                target_start=int(m.group(3)),
                target_len=int(m.group(4)) if m.group(4) is not None else 1,
                lines=[],
            )
            continue
        if raw.strip() == "":
            continue
        if raw.startswith(("diff ", "index ", "Index:")):
            continue  # tool preamble occasionally echoed by models
        raise MalformedHeader(f"expected a diff header before {raw!r}")

    close_pending()
    if not saw_file_header and not hunks:
        raise MalformedHeader("no hunks found")
    doc.hunks = hunks
    return doc


def serialize_diff(doc: DiffDocument) -> str:
    """Render a DiffDocument as standard unified-diff text."""
    out = [f"--- {doc.source_name}", f"+++ {doc.target_name}"]
    for hunk in doc.hunks:
        hunk.validate()
        out.append(
            f"@@ -{hunk.source_start},{hunk.source_len} "
            f"+{hunk.target_start},{hunk.target_len} @@"
        )
        out.extend(tag + text for tag, text in hunk.lines)
    return "\n".join(out) + "\n"


def generate_unified_diff(
    original: list[str], modified: list[str], context: int = 3
) -> DiffDocument:
    """Diff two line sequences into hunks with up to `context` context lines."""
    matcher = difflib.SequenceMatcher(a=original, b=modified, autojunk=False)
    hunks: list[Hunk] = []
    for group in matcher.get_grouped_opcodes(context):
        first, last = group[0], group[-1]
        lines: list[tuple[str, str]] = []
        for tag, i1, i2, j1, j2 in group:
            if tag == "equal":
                lines.extend((CONTEXT, line) for line in original[i1:i2])
                continue
            if tag in ("replace", "delete"):
                lines.extend((REMOVE, line) for line in original[i1:i2])
            if tag in ("replace", "insert"):
                lines.extend((ADD, line) for line in modified[j1:j2])
        source_len = last[2] - first[1]
        target_len = last[4] - first[3]
        hunks.append(
            Hunk(
                source_start=first[1] + 1 if source_len else first[1],
                source_len=source_len,
                target_start=first[3] + 1 if target_len else first[3],
                target_len=target_len,
                lines=lines,
            )
        )
    return DiffDocument(hunks=hunks)


def _ws_normalize(line: str) -> str:
    return " ".join(line.split())


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def line_similarity(a: str, b: str) -> float:
    """Similarity in [0, 1] from normalized edit distance."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    return 1.0 - _levenshtein(a, b) / max(len(a), len(b))


def _match_block(
    src: list[str],
    pos: int,
    block: list[tuple[str, str]],
    allow_norm: bool,
    allow_sim: bool,
    policy: FuzzPolicy,
) -> tuple[bool, int] | None:
    """Try to match a hunk's source block at `pos`; returns (normalized, mismatches)."""
    normalized = False
    mismatched = 0
    for i, (tag, text) in enumerate(block):
        actual = src[pos + i]
        if actual == text:
            continue
        if allow_norm and _ws_normalize(actual) == _ws_normalize(text):
            normalized = True
            continue
        if tag == REMOVE or not allow_sim:
            return None
        if mismatched >= policy.max_mismatched_context_per_hunk:
            return None
        if line_similarity(actual, text) < policy.line_similarity_threshold:
            return None
        mismatched += 1
    return normalized, mismatched


def _candidate_positions(center: int, floor: int, ceiling: int, max_offset: int):
    for d in range(max_offset + 1):
        for pos in ((center + d,) if d == 0 else (center + d, center - d)):
            if floor <= pos <= ceiling:
                yield pos


def _best_effort_position(
    src: list[str], block: list[tuple[str, str]], center: int, floor: int, policy: FuzzPolicy
) -> int | None:
    """Closest candidate with the most matching lines, for failure reporting."""
    ceiling = len(src) - len(block)
    best_pos, best_score = None, -1
    for pos in _candidate_positions(center, floor, ceiling, policy.max_offset):
        score = sum(
            1
            for i, (_, text) in enumerate(block)
            if src[pos + i] == text or _ws_normalize(src[pos + i]) == _ws_normalize(text)
        )
        if score > best_score:
            best_pos, best_score = pos, score
    return best_pos


def apply_patch(
    original: list[str],
    diff: DiffDocument,
    policy: FuzzPolicy | None = None,
) -> tuple[list[str], PatchReport]:
    """Apply a parsed diff to a line sequence using fuzzy context anchoring.

    Hunks apply top-to-bottom with a cumulative offset tracker. Each hunk is
    anchored by escalating passes: exact match (declared position first, then
    scanning +/- max_offset), whitespace-normalized match, and finally a match
    tolerating up to max_mismatched_context_per_hunk context lines whose
    similarity clears the policy threshold. Application is atomic: the first
    unanchorable hunk raises HunkApplicationFailure and nothing is returned.
    """
    if policy is None:
        policy = FuzzPolicy()
    _check_hunk_layout(diff.hunks)

    src = list(original)
    out: list[str] = []
    consumed = 0
    running_offset = 0
    report = PatchReport()

    for index, hunk in enumerate(diff.hunks):
        declared = hunk.source_start - 1 if hunk.source_len else hunk.source_start
        center = declared + running_offset
        block = hunk.source_lines()

        if not block:
            pos = max(consumed, min(center, len(src)))
            out.extend(src[consumed:pos])
            out.extend(text for tag, text in hunk.lines if tag == ADD)
            consumed = pos
            running_offset = pos - declared
            report.hunks.append(HunkOutcome(True, pos - declared))
            continue

        anchor = None
        ceiling = len(src) - len(block)
        passes = [(False, False)]
        if policy.whitespace_normalize:
            passes.append((True, False))
        if policy.max_mismatched_context_per_hunk > 0:
            passes.append((policy.whitespace_normalize, True))
        for allow_norm, allow_sim in passes:
            for pos in _candidate_positions(center, consumed, ceiling, policy.max_offset):
                result = _match_block(src, pos, block, allow_norm, allow_sim, policy)
                if result is not None:
                    anchor = (pos, result[0], result[1])
                    break
            if anchor:
                break

        if anchor is None:
            report.hunks.append(HunkOutcome(False))
            report.failed_hunk_indices.append(index)
            best = _best_effort_position(src, block, center, consumed, policy)
            raise HunkApplicationFailure(index, best, report)

        pos, normalized, mismatched = anchor
        out.extend(src[consumed:pos])
        cursor = pos
        for tag, text in hunk.lines:
            if tag == CONTEXT:
                out.append(src[cursor])  # keep the document's own context lines
                cursor += 1
            elif tag == REMOVE:
                cursor += 1
            else:
                out.append(text)
        consumed = cursor
        running_offset = pos - declared
        report.hunks.append(HunkOutcome(True, pos - declared, normalized, mismatched))

    out.extend(src[consumed:])
    return out, report


def _check_hunk_layout(hunks: list[Hunk]) -> None:
    # prev_end is the exclusive 0-based end of the previous hunk's source range;
    # zero-length hunks occupy an empty range at their insertion index.
    prev_end = 0
    for hunk in hunks:
        start = hunk.source_start - 1 if hunk.source_len else hunk.source_start
        if start < prev_end:
            raise OverlappingHunks(
                f"hunk at source line {hunk.source_start} overlaps or precedes an earlier hunk"
            )
        prev_end = start + hunk.source_len


def compression_ratio(diff: DiffDocument, full_modified: str) -> float:
    """Serialized diff size relative to the full modified document."""
    if not full_modified:
        raise ValueError("full_modified must be non-empty")
    return len(serialize_diff(diff)) / len(full_modified)
