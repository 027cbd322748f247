"""Sliding FIFO window of the last <= w processed documents.

Exactly one driver commits; any number of search workers may read
snapshots concurrently.  A snapshot is an immutable copy, unaffected by
later commits.  Eviction happens before insertion, so the window holds at
most w entries at all times (never w + 1).
"""

from __future__ import annotations

from collections import deque

from .core import FsdError


class ClusterIdGapError(FsdError):
    """A commit skipped ahead of the next unissued cluster id (driver bug)."""

    def __init__(self, cluster_id: int, next_cluster: int):
        super().__init__(
            f"cluster id {cluster_id} commits past next unissued id {next_cluster}"
        )


class WindowState:
    """FIFO buffer of (doc_row, cluster_id) pairs, capacity w.

    ``next_cluster`` is the lowest cluster id never issued; committing it
    counts as opening a new cluster and advances the counter.  Cluster ids
    of evicted documents stay valid in the output; eviction only removes
    them from the candidate set.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"window capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._entries: deque[tuple[int, int]] = deque()
        self._next_cluster = 0

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def next_cluster(self) -> int:
        return self._next_cluster

    def snapshot(self) -> tuple[tuple[int, int], ...]:
        """Immutable copy of current (doc_row, cluster_id) entries, oldest first."""
        return tuple(self._entries)

    def commit(self, doc_row: int, cluster_id: int) -> None:
        """Append a processed document, evicting the oldest entry if full."""
        if cluster_id > self._next_cluster:
            raise ClusterIdGapError(cluster_id, self._next_cluster)
        if len(self._entries) >= self.capacity:
            self._entries.popleft()
        self._entries.append((doc_row, cluster_id))
        if cluster_id == self._next_cluster:
            self._next_cluster += 1
