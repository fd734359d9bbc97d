"""Flat key-value config files shared by all subcommands.

Format: one ``key = value`` pair per line, ``#`` starts a full-line
comment, blank lines ignored. Values are kept as strings; each consumer
coerces what it needs. Comma-separated values express lists.
"""

from __future__ import annotations

from pathlib import Path


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ValueError(f"{source}:{lineno}: empty key")
        if key in entries:
            raise ValueError(f"{source}:{lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def load_config(path: str | Path) -> dict[str, str]:
    path = Path(path)
    return parse_config_text(path.read_text("utf-8"), source=str(path))


def dump_config(entries: dict[str, str]) -> str:
    """Canonical serialization (sorted keys), used for config hashing."""
    return "".join(f"{key} = {entries[key]}\n" for key in sorted(entries))


def split_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]
