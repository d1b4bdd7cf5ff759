"""Trajectories of event-driven simulations and the random streams behind them."""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Sequence

import numpy as np

DEFAULT_MAX_EVENTS = 10**8

__all__ = ["Trajectory", "UniformStream", "make_rng", "child_seeds", "DEFAULT_MAX_EVENTS"]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def child_seeds(seed: int, n: int) -> list[int]:
    """Stable per-task seeds derived from a root seed (index ``i`` always gets the same seed)."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


class UniformStream:
    """Uniform draws on [0, 1) pulled from a generator in blocks."""

    def __init__(self, rng: np.random.Generator, block: int = 4096):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block)
        self._pos = 0

    def next(self) -> float:
        if self._pos == self._block:
            self._buf = self._rng.random(self._block)
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return float(x)

    def exponential(self, rate: float) -> float:
        # inverse CDF; 1 - U lies in (0, 1]
        return -np.log1p(-self.next()) / rate


@dataclass
class Trajectory:
    """Jump times and visited states of one run.

    ``times[0]`` is 0 and ``states[0]`` the initial state; the run covers
    ``[0, t_max]``, and no recorded event lies beyond ``t_max``.  ``truncated``
    is set when the event cap stopped the run early.
    """

    times: list[float]
    states: list[Hashable]
    seed: int
    t_max: float
    truncated: bool = False
    labels: Sequence[str] = field(default=("state",))

    @property
    def events(self) -> list[tuple[float, Hashable]]:
        return list(zip(self.times, self.states))

    @property
    def event_count(self) -> int:
        return len(self.times) - 1

    @property
    def final_state(self) -> Hashable:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[tuple[float, Hashable]]:
        return iter(zip(self.times, self.states))

    def occupation(self) -> dict:
        """Total time spent in each state during ``[0, t_max]`` (or until truncation)."""
        end = self.times[-1] if self.truncated else self.t_max
        spent: dict = defaultdict(float)
        for k, state in enumerate(self.states):
            stop = self.times[k + 1] if k + 1 < len(self.times) else end
            spent[state] += stop - self.times[k]
        return dict(spent)

    def occupation_frequencies(self) -> dict:
        occ = self.occupation()
        total = sum(occ.values())
        if total <= 0:
            return {self.states[0]: 1.0}
        return {s: t / total for s, t in occ.items()}

    def rows(self) -> Iterator[list]:
        for t, s in self:
            coords = list(s) if isinstance(s, tuple) else [s]
            yield [repr(float(t))] + [str(int(c)) for c in coords]

    def write_csv(self, fh, trajectory_index: int | None = None) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        prefix = [] if trajectory_index is None else [str(trajectory_index)]
        for row in self.rows():
            writer.writerow(prefix + row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(["time", *self.labels])
        self.write_csv(buf)
        return buf.getvalue()
