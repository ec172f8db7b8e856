"""
Cache of projected feasibility polytopes, keyed by the sorted active set.

Reads are lock-free dict lookups; inserts take a lock. Values are deterministic
per key, so a concurrent double insert just overwrites with the same data.
"""

import logging
import threading
from pathlib import Path
from typing import Dict, Iterator, Optional

import numpy as np
from models import RegionCacheEntry, RegionCacheFile
from regions.laws import AffineLaw
from synthesis.polytope import Polytope

logger = logging.getLogger(__name__)


class RegionCache:
    def __init__(self, entries: Optional[Dict[str, tuple[tuple[int, ...], Polytope]]] = None):
        self._entries: Dict[str, tuple[tuple[int, ...], Polytope]] = dict(entries or {})
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._entries))

    def get(self, law: AffineLaw) -> Optional[Polytope]:
        entry = self._entries.get(law.key)
        return None if entry is None else entry[1]

    def put(self, law: AffineLaw, region: Polytope) -> None:
        with self._lock:
            self._entries[law.key] = (tuple(sorted(law.active)), region)
        logger.debug("Cached projected region for [%s] (%d rows)", law.key, region.rows)

    def polytope(self, key: str) -> Polytope:
        return self._entries[key][1]

    # ── structured-text export / import ──────────────────────────────────────

    def to_model(self) -> RegionCacheFile:
        return RegionCacheFile(
            entries={
                key: RegionCacheEntry(
                    active=list(active), n=region.dim, T=region.T.tolist(), d=region.d.tolist()
                )
                for key, (active, region) in sorted(self._entries.items())
            }
        )

    @classmethod
    def from_model(cls, model: RegionCacheFile) -> "RegionCache":
        entries = {}
        for key, entry in model.entries.items():
            T = np.array(entry.T, dtype=float).reshape(-1, entry.n)
            region = Polytope(T, np.array(entry.d, dtype=float))
            entries[key] = (tuple(entry.active), region)
        return cls(entries)

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_model().model_dump_json(indent=2))
        logger.info("Wrote region cache with %d entries to %s", len(self), path)

    @classmethod
    def load(cls, path: Path) -> "RegionCache":
        model = RegionCacheFile.model_validate_json(Path(path).read_text())
        cache = cls.from_model(model)
        logger.info("Loaded region cache with %d entries from %s", len(cache), path)
        return cache
