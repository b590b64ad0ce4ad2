"""On-disk cache of enumerated copy sets.

Records are the text serialization from the lattice module with a
content checksum in the header.  Writes are atomic (temp file then
rename); a checksum or parameter mismatch forces re-enumeration instead
of silent reuse.  The cache directory resolves, in order: explicit
argument, the SIMPLEXVAR_CACHE environment variable, a `.simplexvar-cache`
directory under the working directory.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .lattice import (
    CopySet,
    SimplexConfig,
    copyset_from_text,
    copyset_to_text,
    enumerate_simplex_copies,
)

__all__ = ["CopySetCache", "resolve_cache_dir", "rows_checksum"]

log = logging.getLogger("simplexvar.cache")

ENV_VAR = "SIMPLEXVAR_CACHE"
DEFAULT_DIRNAME = ".simplexvar-cache"


def resolve_cache_dir(explicit: str | os.PathLike | None = None) -> Path:
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.cwd() / DEFAULT_DIRNAME


def rows_checksum(cs: CopySet) -> str:
    """Checksum over the serialized coordinate rows."""
    h = hashlib.sha256()
    for row in cs.points:
        h.update(" ".join(str(int(c)) for c in row).encode("ascii"))
        h.update(b"\n")
    return h.hexdigest()


class CopySetCache:
    """Keyed store of copy sets with hit/miss accounting."""

    def __init__(self, directory: str | os.PathLike | None = None) -> None:
        self.directory = resolve_cache_dir(directory)
        self.hits = 0
        self.misses = 0
        self.rejected = 0

    def _path(self, config: SimplexConfig, lambda_sq: int) -> Path:
        tag = hashlib.sha256(
            json.dumps(
                {"n": config.n, "vertices": [list(v) for v in config.vertices]},
                sort_keys=True,
            ).encode("ascii")
        ).hexdigest()[:12]
        name = f"simplex_n{config.n}_k{config.k}_{tag}_ls{lambda_sq}.txt"
        return self.directory / name

    def get_or_enumerate(self, config: SimplexConfig, lambda_sq: int) -> CopySet:
        path = self._path(config, lambda_sq)
        if path.exists():
            try:
                cs, stored = copyset_from_text(path.read_text())
            except (ValueError, json.JSONDecodeError) as exc:
                self.rejected += 1
                log.warning("copy-set cache record %s unreadable (%s); re-enumerating", path.name, exc)
            else:
                if (
                    cs.n == config.n
                    and cs.k == config.k
                    and cs.lambda_sq == lambda_sq
                    and cs.dist_sq == config.dist_sq
                    and stored == rows_checksum(cs)
                ):
                    self.hits += 1
                    log.info("copy-set cache hit: %s (%d points)", path.name, cs.count)
                    return cs
                self.rejected += 1
                log.warning(
                    "copy-set cache record %s failed verification; re-enumerating",
                    path.name,
                )
        self.misses += 1
        cs = enumerate_simplex_copies(config, lambda_sq)
        self._write(path, cs)
        log.info("copy-set cache store: %s (%d points)", path.name, cs.count)
        return cs

    def _write(self, path: Path, cs: CopySet) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        text = copyset_to_text(cs, checksum=rows_checksum(cs))
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def provider(self, config: SimplexConfig, lambda_sq: int) -> CopySet:
        """Bound method usable wherever a copy provider is accepted."""
        return self.get_or_enumerate(config, lambda_sq)
