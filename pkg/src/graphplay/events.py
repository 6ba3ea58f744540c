"""In-process fan-out of live events to stream subscribers.

Publishing never blocks game mutations: each subscriber owns a bounded
buffer, and a subscriber that falls too far behind is marked overflowed and
dropped so the client falls back to the resync endpoint.  Sequence numbers
are per subscriber and strictly increasing; a client deduplicates by keeping
the highest sequence it has processed.
"""

import threading
from collections import deque

PHASE_ADVANCED = "phase_advanced"
GAME_OPENED = "game_opened"
GAME_CLOSED = "game_closed"
MONITOR_UPDATE = "monitor_update"

STUDENT_TYPES = {PHASE_ADVANCED, GAME_CLOSED}

MAX_BUFFERED = 256


class Subscriber:
    def __init__(self, audience, game_id):
        self.audience = audience  # "student" | "professor"
        self.game_id = game_id  # None = all games (professor only)
        self.seq = 0
        self.overflowed = False
        self.closed = False
        self._buffer = deque()
        self._lock = threading.Lock()

    def push(self, event_type, game_id, payload):
        with self._lock:
            if self.closed:
                return
            if len(self._buffer) >= MAX_BUFFERED:
                self.overflowed = True
                self.closed = True
                self._buffer.clear()
                return
            self.seq += 1
            self._buffer.append(
                {
                    "sequence_number": self.seq,
                    "type": event_type,
                    "game_id": game_id,
                    "payload": payload,
                }
            )

    def drain(self):
        with self._lock:
            items = list(self._buffer)
            self._buffer.clear()
            return items

    def close(self):
        with self._lock:
            self.closed = True
            self._buffer.clear()


class EventHub:
    def __init__(self):
        self._lock = threading.Lock()
        self._subscribers = []

    def subscribe(self, audience, game_id=None):
        sub = Subscriber(audience, game_id)
        with self._lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub):
        sub.close()
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def publish(self, event_type, game_id, payload):
        with self._lock:
            targets = list(self._subscribers)
        for sub in targets:
            if sub.closed:
                continue
            if sub.audience == "student":
                if event_type not in STUDENT_TYPES:
                    continue
                if sub.game_id != game_id:
                    continue
            elif sub.game_id is not None and sub.game_id != game_id:
                continue
            sub.push(event_type, game_id, payload)

    def prune(self):
        with self._lock:
            self._subscribers = [s for s in self._subscribers if not s.closed]
