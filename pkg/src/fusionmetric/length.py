"""Proper length functions on the irreducible classes of a fusion ring."""

from __future__ import annotations

import threading
from collections.abc import Callable, Iterable, Mapping

from .exceptions import MaterializationError, NotGeneratedError, UnknownLabelError
from .fusion_ring import FusionRing, Label
from .reports import Report

DEFAULT_LABEL_BUDGET = 200_000
DEFAULT_DEPTH_BUDGET = 2_000
DEFAULT_SCAN = 2_000


class LengthFunction:
    """A map ``l: Irred -> N_0``.

    Build with :func:`word_length`, :meth:`explicit`, :meth:`from_callable`
    or :meth:`modified`. Word lengths are computed by breadth-first search
    and memoized; the other kinds enumerate the ring's labels up to ``scan``
    when a ball is requested on an infinite ring.
    """

    def __init__(self, ring: FusionRing, *, generators=None, table=None, func=None,
                 scan: int = DEFAULT_SCAN, budget: int = DEFAULT_LABEL_BUDGET,
                 max_depth: int = DEFAULT_DEPTH_BUDGET, name: str | None = None):
        self.ring = ring
        self.generators = tuple(generators) if generators is not None else None
        self.table = dict(table) if table is not None else None
        self.func = func
        self.scan = scan
        self.budget = budget
        self.max_depth = max_depth
        self.name = name or ("word" if generators is not None else "explicit" if table is not None else "custom")
        self.proper: bool | None = None
        self._layers: list[list[Label]] = []
        self._depth: dict[Label, int] = {}
        self._lock = threading.RLock()
        if self.generators is not None:
            self._layers.append([ring.unit])
            self._depth[ring.unit] = 0

    def __repr__(self):
        return f"LengthFunction({self.ring.name_}, {self.name})"

    # -- constructors -----------------------------------------------------
    @classmethod
    def explicit(cls, ring: FusionRing, table: Mapping, **kw) -> LengthFunction:
        """Length given by a finite table ``{label or name: value}``.

        Labels missing from the table have no length; on infinite rings the
        table therefore acts as the whole (finite) materialized domain.
        """
        values = {}
        for k, v in table.items():
            v = int(v)
            if v < 0:
                raise ValueError(f"length values must be nonnegative, got {v} for {k}")
            values[ring.label(k)] = v
        return cls(ring, table=values, **kw)

    @classmethod
    def from_callable(cls, ring: FusionRing, func: Callable[[Label], int], **kw) -> LengthFunction:
        return cls(ring, func=func, **kw)

    @classmethod
    def modified(cls, base: LengthFunction, overrides: Mapping, **kw) -> LengthFunction:
        """``base`` with some values replaced (useful for negative tests)."""
        ring = base.ring
        over = {ring.label(k): int(v) for k, v in overrides.items()}
        kw.setdefault("name", f"{base.name} (modified)")
        return cls(ring, func=lambda a: over.get(a, base(a)), scan=base.scan, **kw)

    # -- evaluation -------------------------------------------------------
    @property
    def is_word_length(self) -> bool:
        return self.generators is not None

    def __call__(self, label: Label) -> int:
        label = self.ring.check_label(label) if label not in self._depth else label
        if self.generators is not None:
            return self._word_value(label)
        if self.table is not None:
            try:
                return self.table[label]
            except KeyError:
                raise UnknownLabelError(f"no length recorded for {self.ring.name(label)}") from None
        return int(self.func(label))

    def _word_value(self, label):
        d = self._depth.get(label)
        if d is not None:
            return d
        with self._lock:
            while label not in self._depth:
                if not self._layers[-1] or not self._extend():
                    raise NotGeneratedError(
                        f"{self.ring.name(label)} not reached from generators "
                        f"{[self.ring.name(s) for s in self.generators]} within budget "
                        f"(depth {len(self._layers) - 1}, {len(self._depth)} labels); generation "
                        f"is undecidable in general, so this only bounds the search",
                        frontier=self._layers[-1],
                    )
            return self._depth[label]

    def _extend(self) -> bool:
        """Compute the next BFS layer; False when the budget is spent."""
        depth = len(self._layers)
        if depth > self.max_depth or len(self._depth) >= self.budget:
            return False
        prev = self._layers[-1]
        new = {}
        for a in prev:
            for s in self.generators:
                for c in self.ring.fuse(a, s):
                    if c not in self._depth:
                        new[c] = None
        layer = self.ring.sorted(new)
        for c in layer:
            self._depth[c] = depth
        self._layers.append(layer)
        return True

    def _grow_to(self, R: int):
        with self._lock:
            while len(self._layers) <= R:
                if not self._layers[-1]:
                    self._layers.append([])
                    continue
                if not self._extend():
                    raise MaterializationError(
                        f"ball of radius {R} exceeds the length budget "
                        f"({self.budget} labels, depth {self.max_depth})")

    def _scanned_labels(self) -> list[Label]:
        if self.table is not None:
            return list(self.table)
        if self.ring.is_finite:
            return list(self.ring.basis)
        return self.ring.enumerate_labels(self.scan)

    def ball(self, R: int) -> list[Label]:
        """All labels with ``l <= R`` sorted by (length, basis order)."""
        if R < 0:
            return []
        if self.generators is not None:
            self._grow_to(R)
            return [a for layer in self._layers[: R + 1] for a in layer]
        labels = [a for a in self._scanned_labels() if self(a) <= R]
        return sorted(labels, key=lambda a: (self(a), self.ring.order_key(a)))

    def sphere(self, m: int) -> list[Label]:
        if self.generators is not None:
            self._grow_to(m)
            return list(self._layers[m]) if m >= 0 else []
        return [a for a in self.ball(m) if self(a) == m]

    # -- serialization ----------------------------------------------------
    def to_dict(self, R: int | None = None) -> dict:
        if self.generators is not None:
            return {"generators": [self.ring.name(s) for s in self.generators]}
        labels = self.ball(R) if R is not None else self._scanned_labels()
        return {"explicit": {self.ring.name(a): self(a) for a in labels}}

    @classmethod
    def from_dict(cls, ring: FusionRing, data: Mapping) -> LengthFunction:
        if "generators" in data:
            return word_length(ring, data["generators"])
        if "explicit" in data:
            return cls.explicit(ring, data["explicit"])
        raise ValueError("length data needs a 'generators' or 'explicit' field")


def word_length(ring: FusionRing, S: Iterable, **kw) -> LengthFunction:
    """Word length with respect to a finite symmetric generating set ``S``."""
    gens = [ring.label(s) for s in S]
    if not gens:
        raise ValueError("generating set is empty")
    if ring.unit in gens:
        raise ValueError("generating set must not contain the unit")
    missing = [ring.name(s) for s in gens if ring.conj(s) not in gens]
    if missing:
        raise ValueError(f"generating set is not closed under conjugation: conjugates of {missing} missing")
    gens = ring.sorted(dict.fromkeys(gens))
    kw.setdefault("name", "word length {" + ", ".join(ring.name(s) for s in gens) + "}")
    return LengthFunction(ring, generators=gens, **kw)


def verify_length_axioms(length: LengthFunction, R: int) -> Report:
    """Check the length axioms and properness on ``ball(R)``."""
    ring, name = length.ring, length.ring.name
    rep = Report(f"length axioms ({ring.name_}, {length.name}, R={R})")
    window = length.ball(R)
    e = ring.unit
    rep.add("unit has length 0", length(e) == 0, value=length(e))

    bad = [name(a) for a in window if length(ring.conj(a)) != length(a)]
    rep.add("conjugation invariance", not bad, witnesses=bad[:10])

    bad = []
    for a in window:
        for b in window:
            bound = length(a) + length(b)
            for c in ring.fuse(a, b):
                if length(c) > bound:
                    bad.append([name(a), name(b), name(c)])
    rep.add("subadditivity", not bad, witnesses=bad[:10])

    zero = [name(a) for a in window if length(a) == 0 and a != e]
    rep.add("properness", not zero, witnesses=zero[:10], ball_size=len(window),
            scanned=None if length.is_word_length else len(length._scanned_labels()))
    rep.data["sphere_sizes"] = [sum(1 for a in window if length(a) == m) for m in range(R + 1)]
    length.proper = rep.passed
    return rep
