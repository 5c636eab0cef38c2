"""On-disk workspace: network documents, overlays, parameter files, runs.

Layout (version 1):

    <root>/workspace.json            marker + layout version
    <root>/networks/<id>.json        canonical network documents
    <root>/overlays/<id>.json        overlay documents
    <root>/params/<id>.json          parameter files
    <root>/runs/<run id>.json        immutable run records
    <root>/runs/<run id>.samples.csv sample exports

Concurrency: many readers, one writer -- all writes funnel through a file
lock.  Run records are write-once; stored networks are never mutated (a PUT
of different content to an existing id is refused).
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from filelock import FileLock

from ..errors import BeliefcastError
from ..network import Network, build_network, network_to_json
from ..sampling import ForecastResult, run_monte_carlo, samples_csv

LAYOUT_VERSION = 1

_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,127}$")

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"

_ulid_lock = threading.Lock()
_ulid_last: tuple[int, int] | None = None


class WorkspaceError(BeliefcastError):
    pass


class DuplicateDocument(WorkspaceError):
    """A PUT tried to change an existing immutable document."""


class UnknownDocument(WorkspaceError):
    pass


def new_run_id(now_ms: int | None = None) -> str:
    """ULID-style id: 48-bit millisecond timestamp + 80 random bits in
    Crockford base32; lexicographic order is creation order."""
    global _ulid_last
    with _ulid_lock:
        ts = int(dt.datetime.now(dt.timezone.utc).timestamp() * 1000) \
            if now_ms is None else now_ms
        rand = int.from_bytes(os.urandom(10), "big")
        if _ulid_last is not None and ts <= _ulid_last[0]:
            ts = _ulid_last[0]
            rand = (_ulid_last[1] + 1) % (1 << 80)
        _ulid_last = (ts, rand)
    value = (ts << 80) | rand
    chars = []
    for _ in range(26):
        chars.append(_CROCKFORD[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


def network_hash(net: Network) -> str:
    digest = hashlib.sha256(network_to_json(net).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"


def _check_id(doc_id: str) -> str:
    if not _ID_RE.match(doc_id):
        raise WorkspaceError(f"invalid document id {doc_id!r}")
    return doc_id


@dataclass
class RunRecord:
    run_id: str
    network: str | None
    network_hash: str
    overlay: str | None
    targets: list[str]
    n: int
    seed: int
    created_at: str
    results: dict[str, ForecastResult]

    def to_doc(self) -> dict:
        return {
            "format": "beliefcast-run/1",
            "run_id": self.run_id,
            "status": "complete",
            "network": self.network,
            "network_hash": self.network_hash,
            "overlay": self.overlay,
            "targets": list(self.targets),
            "n": self.n,
            "seed": self.seed,
            "created_at": self.created_at,
            "results": [
                {
                    "target": fr.target,
                    "n": fr.n,
                    "seed": self.seed,
                    "mean": fr.mean,
                    "stddev": fr.stddev,
                    "histogram": {str(k): fr.histogram[k] for k in sorted(fr.histogram)},
                    "samples": [float(v) for v in fr.samples],
                }
                for fr in self.results.values()
            ],
        }


def execute_run(net: Network, targets: list[str], n: int, seed: int,
                network_id: str | None = None, overlay_id: str | None = None,
                run_id: str | None = None) -> RunRecord:
    results = run_monte_carlo(net, targets, n, seed)
    return RunRecord(
        run_id=run_id or new_run_id(),
        network=network_id,
        network_hash=network_hash(net),
        overlay=overlay_id,
        targets=list(targets),
        n=n,
        seed=seed,
        created_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="milliseconds"),
        results=results,
    )


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = FileLock(str(self.root / ".lock"))

    # --- lifecycle ---------------------------------------------------------

    def initialize(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        for sub in ("networks", "overlays", "params", "runs"):
            (self.root / sub).mkdir(exist_ok=True)
        marker = self.root / "workspace.json"
        if not marker.exists():
            marker.write_text(json.dumps(
                {"format": "beliefcast-workspace/1",
                 "layout_version": LAYOUT_VERSION}, indent=2) + "\n")

    def _ensure(self) -> None:
        if not (self.root / "workspace.json").exists():
            self.initialize()

    # --- documents -----------------------------------------------------------

    def _read(self, sub: str, doc_id: str, suffix: str = ".json") -> str:
        path = self.root / sub / f"{_check_id(doc_id)}{suffix}"
        if not path.exists():
            raise UnknownDocument(f"no {sub[:-1]} named {doc_id!r}")
        return path.read_text()

    def _write_once(self, sub: str, doc_id: str, text: str,
                    suffix: str = ".json") -> None:
        self._ensure()
        path = self.root / sub / f"{_check_id(doc_id)}{suffix}"
        with self._lock:
            if path.exists():
                if path.read_text() == text:
                    return  # idempotent
                raise DuplicateDocument(
                    f"{sub[:-1]} {doc_id!r} already exists with different content")
            path.write_text(text)

    def put_network(self, doc_id: str, document: dict) -> Network:
        """Validate, canonicalize, and store a network document."""
        net = build_network(document)
        self._write_once("networks", doc_id, network_to_json(net))
        return net

    def get_network_text(self, doc_id: str) -> str:
        return self._read("networks", doc_id)

    def load_network(self, doc_id: str) -> Network:
        return build_network(self.get_network_text(doc_id))

    def put_overlay(self, doc_id: str, document: dict) -> None:
        from ..scenario import overlay_from_doc, overlay_to_doc
        canonical = overlay_to_doc(overlay_from_doc(document))
        self._write_once("overlays", doc_id, json.dumps(canonical, indent=2) + "\n")

    def get_overlay_text(self, doc_id: str) -> str:
        return self._read("overlays", doc_id)

    def put_params(self, doc_id: str, document: dict) -> None:
        self._write_once("params", doc_id, json.dumps(document, indent=2) + "\n")

    def list_ids(self, sub: str) -> list[str]:
        folder = self.root / sub
        if not folder.exists():
            return []
        return sorted(p.name[:-len(".json")] for p in folder.glob("*.json")
                      if not p.name.endswith(".samples.csv"))

    # --- runs ----------------------------------------------------------------

    def write_run(self, record: RunRecord) -> None:
        self._ensure()
        record_path = self.root / "runs" / f"{record.run_id}.json"
        csv_path = self.root / "runs" / f"{record.run_id}.samples.csv"
        with self._lock:
            if record_path.exists():
                raise DuplicateDocument(f"run {record.run_id!r} already recorded")
            record_path.write_text(json.dumps(record.to_doc(), indent=2) + "\n")
            csv_path.write_text(samples_csv(record.results))

    def get_run_text(self, run_id: str) -> str:
        return self._read("runs", run_id)

    def get_run_csv(self, run_id: str) -> str:
        return self._read("runs", run_id, suffix=".samples.csv")

    def run_exists(self, run_id: str) -> bool:
        return (self.root / "runs" / f"{_check_id(run_id)}.json").exists()
