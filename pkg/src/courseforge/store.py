"""Embedded SQLite persistence: documents, coursewares, and version history.

Versions are append-only; stored HTML never changes after creation and
rollback only moves the current-version pointer.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import uuid
from dataclasses import dataclass, field

from .gateway import PageImage
from .knowledge import StructuredKnowledge, Theme, knowledge_from_dict, theme_from_dict

ORIGIN_GENERATED = "Generated"
ORIGIN_EDITED = "Edited"
ORIGIN_REGENERATED = "Regenerated"


class NotFound(Exception):
    pass


class StorageFailure(Exception):
    pass


@dataclass
class Version:
    version: int
    html: str
    created_at: float
    origin: str
    level: str | None = None

    def to_dict(self, include_html: bool = True) -> dict:
        payload = {
            "version": self.version,
            "created_at": self.created_at,
            "origin": self.origin,
            "level": self.level,
        }
        if include_html:
            payload["html"] = self.html
        return payload


@dataclass
class Courseware:
    id: str
    knowledge: StructuredKnowledge
    theme: Theme
    versions: list[Version] = field(default_factory=list)
    current_version: int = 1

    def current(self) -> Version:
        for version in self.versions:
            if version.version == self.current_version:
                return version
        raise StorageFailure(f"current version {self.current_version} missing for {self.id}")

    def to_dict(self, include_html: bool = True) -> dict:
        return {
            "id": self.id,
            "knowledge": self.knowledge.to_dict(),
            "theme": self.theme.to_dict(),
            "versions": [v.to_dict(include_html=include_html) for v in self.versions],
            "current_version": self.current_version,
        }


_SCHEMA = """
CREATE TABLE IF NOT EXISTS documents (
    id TEXT PRIMARY KEY,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS document_pages (
    document_id TEXT NOT NULL REFERENCES documents(id),
    page_index INTEGER NOT NULL,
    media_type TEXT NOT NULL,
    data BLOB NOT NULL,
    PRIMARY KEY (document_id, page_index)
);
CREATE TABLE IF NOT EXISTS coursewares (
    id TEXT PRIMARY KEY,
    knowledge_json TEXT NOT NULL,
    theme_json TEXT NOT NULL,
    current_version INTEGER NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS versions (
    courseware_id TEXT NOT NULL REFERENCES coursewares(id),
    version INTEGER NOT NULL,
    html TEXT NOT NULL,
    origin TEXT NOT NULL,
    level TEXT,
    created_at REAL NOT NULL,
    PRIMARY KEY (courseware_id, version)
);
"""


class Repository:
    """Thread-safe wrapper over a single SQLite connection."""

    def __init__(self, path: str = ":memory:"):
        self.path = path
        self._lock = threading.RLock()
        try:
            self._conn = sqlite3.connect(path, check_same_thread=False)
            self._conn.execute("PRAGMA foreign_keys = ON")
            if path != ":memory:":
                self._conn.execute("PRAGMA journal_mode = WAL")
                self._conn.execute("PRAGMA synchronous = NORMAL")
            self._conn.executescript(_SCHEMA)
            self._conn.commit()
        except sqlite3.Error as exc:
            raise StorageFailure(f"cannot open store at {path}: {exc}") from exc

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # ------------------------------------------------------- documents

    def save_document(self, pages: list[PageImage], created_at: float) -> str:
        document_id = uuid.uuid4().hex
        try:
            with self._lock, self._conn:
                self._conn.execute(
                    "INSERT INTO documents (id, created_at) VALUES (?, ?)",
                    (document_id, created_at),
                )
                self._conn.executemany(
                    "INSERT INTO document_pages (document_id, page_index, media_type, data) "
                    "VALUES (?, ?, ?, ?)",
                    [(document_id, i, p.media_type, p.data) for i, p in enumerate(pages)],
                )
        except sqlite3.Error as exc:
            raise StorageFailure(f"could not persist document pages: {exc}") from exc
        return document_id

    def get_document(self, document_id: str) -> list[PageImage]:
        with self._lock:
            exists = self._conn.execute(
                "SELECT 1 FROM documents WHERE id = ?", (document_id,)
            ).fetchone()
            if not exists:
                raise NotFound(f"document {document_id} not found")
            rows = self._conn.execute(
                "SELECT media_type, data FROM document_pages WHERE document_id = ? "
                "ORDER BY page_index",
                (document_id,),
            ).fetchall()
        return [PageImage(data=row[1], media_type=row[0]) for row in rows]

    # ------------------------------------------------------ coursewares

    def create_courseware(
        self,
        knowledge: StructuredKnowledge,
        theme: Theme,
        html: str,
        origin: str,
        level: str | None,
        created_at: float,
    ) -> Courseware:
        courseware_id = uuid.uuid4().hex
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO coursewares (id, knowledge_json, theme_json, current_version, created_at) "
                "VALUES (?, ?, ?, 1, ?)",
                (courseware_id, knowledge.to_json(), json.dumps(theme.to_dict()), created_at),
            )
            self._conn.execute(
                "INSERT INTO versions (courseware_id, version, html, origin, level, created_at) "
                "VALUES (?, 1, ?, ?, ?, ?)",
                (courseware_id, html, origin, level, created_at),
            )
        return self.get_courseware(courseware_id)

    def get_courseware(self, courseware_id: str) -> Courseware:
        with self._lock:
            row = self._conn.execute(
                "SELECT knowledge_json, theme_json, current_version FROM coursewares WHERE id = ?",
                (courseware_id,),
            ).fetchone()
            if not row:
                raise NotFound(f"courseware {courseware_id} not found")
            version_rows = self._conn.execute(
                "SELECT version, html, origin, level, created_at FROM versions "
                "WHERE courseware_id = ? ORDER BY version",
                (courseware_id,),
            ).fetchall()
        return Courseware(
            id=courseware_id,
            knowledge=knowledge_from_dict(json.loads(row[0])),
            theme=theme_from_dict(json.loads(row[1])),
            versions=[
                Version(version=v, html=h, origin=o, level=l, created_at=c)
                for v, h, o, l, c in version_rows
            ],
            current_version=row[2],
        )

    def append_version(
        self,
        courseware_id: str,
        html: str,
        origin: str,
        created_at: float,
        level: str | None = None,
    ) -> int:
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT MAX(version) FROM versions WHERE courseware_id = ?",
                (courseware_id,),
            ).fetchone()
            if row[0] is None:
                raise NotFound(f"courseware {courseware_id} not found")
            next_version = row[0] + 1
            self._conn.execute(
                "INSERT INTO versions (courseware_id, version, html, origin, level, created_at) "
                "VALUES (?, ?, ?, ?, ?, ?)",
                (courseware_id, next_version, html, origin, level, created_at),
            )
            self._conn.execute(
                "UPDATE coursewares SET current_version = ? WHERE id = ?",
                (next_version, courseware_id),
            )
        return next_version

    def set_current_version(self, courseware_id: str, version: int) -> None:
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT 1 FROM versions WHERE courseware_id = ? AND version = ?",
                (courseware_id, version),
            ).fetchone()
            if not row:
                raise NotFound(f"version {version} of courseware {courseware_id} not found")
            self._conn.execute(
                "UPDATE coursewares SET current_version = ? WHERE id = ?",
                (version, courseware_id),
            )
