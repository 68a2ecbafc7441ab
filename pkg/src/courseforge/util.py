"""Small shared helpers."""

from __future__ import annotations

import hashlib


def strip_code_fences(text: str) -> str:
    """Drop a wrapping ``` fence pair if present; models add them anyway."""
    stripped = text.strip()
    if not stripped.startswith("```"):
        return stripped
    lines = stripped.splitlines()
    closing = None
    for i in range(len(lines) - 1, 0, -1):
        if lines[i].strip() == "```":
            closing = i
            break
    body = lines[1:closing] if closing is not None else lines[1:]
    return "\n".join(body).strip()


def content_hash(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()
