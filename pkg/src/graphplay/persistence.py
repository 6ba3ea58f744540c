"""Durability: append-only JSONL event log plus periodic state snapshots.

Every accepted mutation is appended (flush + fsync) before the caller gets
its response, so an acknowledged write survives a hard kill.  Restore loads
the latest snapshot, then replays log entries with a higher sequence number.
A torn or corrupt trailing log line marks the truncation point and replay
stops at the last valid entry.  Both files are one-JSON-document-per-line /
single-document JSON and stay human-inspectable.
"""

import json
import logging
import os
from pathlib import Path

log = logging.getLogger(__name__)

LOG_NAME = "log.jsonl"
SNAPSHOT_NAME = "snapshot.json"


class StorageError(RuntimeError):
    pass


class EventLog:
    """Append-only sequence of {"seq": n, ...event} lines."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "a", encoding="utf-8")
        self.last_seq = 0

    def append(self, seq, event):
        record = dict(event)
        record["seq"] = seq
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self.last_seq = seq

    def close(self):
        self._fh.close()

    @staticmethod
    def read_all(path):
        """Return (entries, truncated_at) where truncated_at is a byte offset
        of the first unreadable line, or None when the whole log parsed."""
        entries = []
        truncated_at = None
        path = Path(path)
        if not path.exists():
            return entries, truncated_at
        offset = 0
        with open(path, "rb") as fh:
            for raw in fh:
                try:
                    entries.append(json.loads(raw.decode("utf-8")))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    truncated_at = offset
                    break
                offset += len(raw)
        return entries, truncated_at


def write_snapshot(data_dir, state, last_seq):
    """Atomic snapshot write: temp file then rename."""
    path = Path(data_dir) / SNAPSHOT_NAME
    tmp = path.with_suffix(".json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump({"last_seq": last_seq, "state": state}, fh, sort_keys=True)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_snapshot(data_dir):
    path = Path(data_dir) / SNAPSHOT_NAME
    if not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class Persister:
    """Binds a GameStore to a data directory.

    `attach` replays whatever is on disk into the store and then installs
    itself as the store's journal, so every later mutation hits the log
    before it is applied.  A snapshot is cut every `snapshot_every` events.
    """

    def __init__(self, data_dir, snapshot_every=100):
        self.data_dir = Path(data_dir)
        self.snapshot_every = snapshot_every
        self._store = None
        self._log = None
        self._seq = 0
        self._since_snapshot = 0
        self.truncated_at = None

    def attach(self, store):
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            probe = self.data_dir / ".write-probe"
            probe.write_text("ok")
            probe.unlink()
        except OSError as exc:
            raise StorageError(f"data dir {self.data_dir} is not writable: {exc}")

        snapshot = read_snapshot(self.data_dir)
        base_seq = 0
        if snapshot is not None:
            store.load_state(snapshot["state"])
            base_seq = snapshot["last_seq"]

        entries, truncated_at = EventLog.read_all(self.data_dir / LOG_NAME)
        self.truncated_at = truncated_at
        if truncated_at is not None:
            log.warning(
                "event log truncated: unreadable entry at byte %d; replaying the "
                "valid prefix only",
                truncated_at,
            )
        replayed = 0
        last_seq = base_seq
        for entry in entries:
            seq = entry.get("seq", 0)
            if seq <= base_seq:
                last_seq = max(last_seq, seq)
                continue
            event = {k: v for k, v in entry.items() if k != "seq"}
            store.apply_event(event)
            last_seq = seq
            replayed += 1

        self._seq = last_seq
        self._log = EventLog(self.data_dir / LOG_NAME)
        self._log.last_seq = last_seq
        self._store = store
        store.journal = self._journal
        return {"snapshot_seq": base_seq, "replayed": replayed, "last_seq": last_seq}

    def _journal(self, event):
        # the store journals before it applies, so the snapshot must be cut
        # before this event is appended: state and last_seq then agree
        if self._since_snapshot >= self.snapshot_every:
            self.snapshot()
        self._seq += 1
        self._log.append(self._seq, event)
        self._since_snapshot += 1

    def snapshot(self):
        if self._store is None:
            return
        write_snapshot(self.data_dir, self._store.state_dump(), self._seq)
        self._since_snapshot = 0

    def close(self):
        if self._log is not None:
            self._log.close()
