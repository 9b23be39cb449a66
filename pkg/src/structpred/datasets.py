"""Dataset manifest and a caching downloader for the public benchmark archives."""
from __future__ import annotations

import hashlib
import os
import shutil
import tarfile
import urllib.request
import zipfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .formats import FORMATS

CACHE_ENV = "STRUCTPRED_CACHE"
_DONE = ".complete"
_ARCHIVE = ".download"


class DatasetError(RuntimeError):
    pass


class UnknownDataset(DatasetError, KeyError):
    def __str__(self):
        return self.args[0]


class ChecksumMismatch(DatasetError):
    pass


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    url: str
    sha256: str | None
    format: str
    notes: str = ""


@dataclass
class DatasetManifest:
    entries: list
    cache_dir: Path = field(default_factory=lambda: default_cache_dir())

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.name in seen:
                raise ValueError(f"duplicate dataset name {e.name!r}")
            if e.format not in FORMATS:
                raise ValueError(f"dataset {e.name!r} has unknown format {e.format!r}")
            seen.add(e.name)
        self.cache_dir = Path(self.cache_dir)

    @property
    def names(self) -> list:
        return [e.name for e in self.entries]

    def get(self, name: str) -> DatasetEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise UnknownDataset(f"unknown dataset {name!r}; available: {', '.join(self.names)}")


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "structpred"


def parse_manifest(text: str, cache_dir=None) -> DatasetManifest:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 4)
        if len(parts) < 4:
            raise ValueError(f"manifest line {lineno}: expected 'name url sha256 format'")
        name, url, digest, fmt = parts[:4]
        entries.append(DatasetEntry(name, url, None if digest == "-" else digest.lower(), fmt,
                                    parts[4] if len(parts) > 4 else ""))
    return DatasetManifest(entries, cache_dir if cache_dir is not None else default_cache_dir())


def load_manifest(path=None, cache_dir=None) -> DatasetManifest:
    """Read a manifest file; without ``path`` the bundled one is used."""
    if path is None:
        text = resources.files("structpred").joinpath("data/datasets.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return parse_manifest(text, cache_dir)


def _instance_files(root: Path) -> list:
    return sorted(p for p in root.rglob("*")
                  if p.is_file() and not any(part.startswith(".") for part in p.relative_to(root).parts))


def _download(url: str, target: Path, opener) -> str:
    digest = hashlib.sha256()
    with opener(url) as response, open(target, "wb") as out:
        while True:
            chunk = response.read(1 << 20)
            if not chunk:
                break
            digest.update(chunk)
            out.write(chunk)
    return digest.hexdigest()


def _unpack(archive: Path, dest: Path, filename: str) -> None:
    if zipfile.is_zipfile(archive):
        with zipfile.ZipFile(archive) as zf:
            zf.extractall(dest)
    elif tarfile.is_tarfile(archive):
        with tarfile.open(archive) as tf:
            if hasattr(tarfile, "data_filter"):
                tf.extractall(dest, filter="data")
            else:
                tf.extractall(dest)
    else:
        shutil.copyfile(archive, dest / filename)


def fetch_dataset(manifest: DatasetManifest, name: str, destination=None,
                  opener=urllib.request.urlopen) -> list:
    """Download, verify and unpack dataset ``name``; return its instance files.

    Files land in ``destination`` (default: the manifest's cache dir joined
    with the dataset name).  A completed fetch leaves a marker holding the
    observed sha256, so later calls return the cached paths without network
    access.  When the manifest lists no checksum the observed one is recorded
    in the marker.
    """
    entry = manifest.get(name)
    dest = Path(destination) if destination is not None else manifest.cache_dir / name
    marker = dest / _DONE
    if marker.is_file():
        return _instance_files(dest)
    dest.mkdir(parents=True, exist_ok=True)
    archive = dest / _ARCHIVE
    try:
        observed = _download(entry.url, archive, opener)
    except OSError as exc:
        archive.unlink(missing_ok=True)
        raise DatasetError(f"download of {name} failed: {exc}") from exc
    if entry.sha256 is not None and observed != entry.sha256:
        archive.unlink(missing_ok=True)
        raise ChecksumMismatch(f"{name}: expected sha256 {entry.sha256}, got {observed}")
    try:
        _unpack(archive, dest, f"{name}.txt")
    finally:
        archive.unlink(missing_ok=True)
    marker.write_text(f"{observed}\n", "utf-8")
    return _instance_files(dest)
