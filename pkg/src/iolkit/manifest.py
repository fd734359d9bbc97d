"""Run manifests: enough provenance to certify byte-reproducibility.

A manifest records the tool version, the seed, a hash of the effective
configuration, and digests of every input and output file. Two runs are
interchangeable exactly when their manifests are byte-identical; nothing
time- or host-dependent is recorded.
"""

from __future__ import annotations

import hashlib
from pathlib import Path


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def build_manifest(
    command: str,
    version: str,
    config_text: str,
    seed: int | None,
    inputs: dict[str, str | Path],
    outputs: dict[str, str | Path],
) -> dict[str, str]:
    entries = {
        "command": command,
        "tool": f"iolkit {version}",
        "config_sha256": sha256_text(config_text),
    }
    if seed is not None:
        entries["seed"] = str(seed)
    for name, path in inputs.items():
        entries[f"input.{name}"] = f"sha256:{sha256_file(path)}"
    for name, path in outputs.items():
        entries[f"output.{name}"] = f"sha256:{sha256_file(path)}"
    return entries


def write_manifest(entries: dict[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for key in sorted(entries):
            handle.write(f"{key} = {entries[key]}\n")


def read_manifest(path: str | Path) -> dict[str, str]:
    from .config import parse_config_text

    return parse_config_text(Path(path).read_text("utf-8"), source=str(path))
