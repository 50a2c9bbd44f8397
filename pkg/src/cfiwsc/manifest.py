"""Instance manifests: how an output file was made and how to check it again."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

MANIFEST_SUFFIX = ".manifest.json"


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest_path(out) -> Path:
    return Path(str(out) + MANIFEST_SUFFIX)


@dataclass
class InstanceManifest:
    construction: str
    parameters: dict
    seed: int | None
    command: list[str]
    output_sha256: str
    parent_hashes: dict = field(default_factory=dict)
    cwd: str | None = None

    def dumps(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    def write(self, out) -> Path:
        p = manifest_path(out)
        p.write_text(self.dumps())
        return p

    @classmethod
    def load_doc(cls, doc: dict) -> "InstanceManifest":
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "InstanceManifest":
        return cls.load_doc(json.loads(Path(path).read_text()))


def record(out, construction: str, parameters: dict, seed: int | None,
           command: list[str], parents: dict[str, str] | None = None,
           cwd: str | None = None) -> InstanceManifest:
    """Hash ``out`` and its input files and write the manifest next to it."""
    hashes = {name: sha256_file(p) for name, p in sorted((parents or {}).items())}
    m = InstanceManifest(construction, parameters, seed, list(command), sha256_file(out), hashes,
                         cwd)
    m.write(out)
    return m
