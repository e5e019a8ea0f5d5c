"""Fusion rings F(G): basis of irreducible classes, integer structure constants,
conjugation, dimensions, and the *-algebra of finitely supported elements.

Labels are arbitrary hashable keys chosen by the ring family (integers ``n``
for the SU(2)-type rings, reduced words for free groups, names for finite
rings). Display names are produced by :meth:`FusionRing.name` and parsed by
:meth:`FusionRing.label`.
"""

from __future__ import annotations

import itertools
import json
import threading
from collections.abc import Callable, Hashable, Iterable, Mapping
from pathlib import Path
from types import MappingProxyType

from .exceptions import (
    FusionAxiomError,
    MaterializationError,
    RingMismatchError,
    UnknownLabelError,
)
from .reports import Report, dumps

Label = Hashable

INT64_MAX = 2**63 - 1
DEFAULT_BUDGET = 2_000_000


class FusionRing:
    """A based ring with involution, materialized lazily through callbacks.

    Parameters
    ----------
    name:
        Human readable ring name (``"su2"``, ``"group_ring(S3)"``, ...).
    unit:
        Label of the trivial class ``e``.
    fuse:
        ``fuse(a, b) -> {c: N_ab^c}`` with positive integer multiplicities.
    conj, dim:
        Conjugation ``a -> a_bar`` and the integer dimension ``d_a``.
    contains:
        Predicate deciding whether a key is a label of this ring.
    basis:
        Ordered label tuple for finite rings, ``None`` for infinite ones.
    enumerate_labels:
        For infinite rings, ``enumerate_labels(n)`` yields the first ``n``
        labels in canonical order. Finite rings enumerate their basis.
    memoize:
        Cache ``fuse`` results. Cheap families (group rings) can skip it.
    budget:
        Maximum number of memoized pairs before :class:`MaterializationError`.
    """

    def __init__(
        self,
        name: str,
        unit: Label,
        fuse: Callable[[Label, Label], Mapping[Label, int]],
        conj: Callable[[Label], Label],
        dim: Callable[[Label], int],
        *,
        contains: Callable[[Label], bool],
        label_name: Callable[[Label], str] = str,
        parse_name: Callable[[str], Label] | None = None,
        order_key: Callable[[Label], object] | None = None,
        basis: Iterable[Label] | None = None,
        enumerate_labels: Callable[[int], Iterable[Label]] | None = None,
        memoize: bool = True,
        budget: int = DEFAULT_BUDGET,
        commutative: bool | None = None,
    ):
        self.name_ = name
        self.unit = unit
        self._fuse = fuse
        self._conj = conj
        self._dim = dim
        self._contains = contains
        self._label_name = label_name
        self._parse_name = parse_name
        self.basis = tuple(basis) if basis is not None else None
        if self.basis is not None:
            self._index = {a: i for i, a in enumerate(self.basis)}
            self._order_key = order_key or self._index.__getitem__
            self._names = {label_name(a): a for a in self.basis}
        else:
            self._index = None
            self._order_key = order_key or (lambda a: a)
            self._names = None
        self._enumerate = enumerate_labels
        self.memoize = memoize
        self.budget = budget
        self.commutative = commutative
        self._memo: dict[tuple[Label, Label], Mapping[Label, int]] = {}
        self._lock = threading.Lock()
        self._valid: set = set()
        # labels whose pairwise products are recorded, for rings loaded from truncated files
        self.window: list | None = None

    def __repr__(self):
        size = len(self.basis) if self.basis is not None else "inf"
        return f"FusionRing({self.name_!r}, size={size})"

    # -- labels -----------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self.basis is not None

    def __contains__(self, label) -> bool:
        try:
            return bool(self._contains(label))
        except TypeError:
            return False

    def check_label(self, label: Label) -> Label:
        if label in self._valid:
            return label
        if label not in self:
            raise UnknownLabelError(f"{label!r} is not a label of {self.name_}")
        self._valid.add(label)
        return label

    def name(self, label: Label) -> str:
        return self._label_name(label)

    def label(self, name) -> Label:
        """Parse a display name (or pass through an existing label)."""
        if self._names is not None and name in self._names:
            return self._names[name]
        if self._parse_name is not None and isinstance(name, str):
            try:
                label = self._parse_name(name)
            except (ValueError, KeyError) as exc:
                raise UnknownLabelError(f"cannot parse {name!r} as a label of {self.name_}") from exc
            return self.check_label(label)
        return self.check_label(name)

    def order_key(self, label: Label):
        return self._order_key(label)

    def sorted(self, labels: Iterable[Label]) -> list[Label]:
        return sorted(labels, key=self._order_key)

    def enumerate_labels(self, n: int) -> list[Label]:
        if self.basis is not None:
            return list(self.basis[:n])
        if self._enumerate is None:
            raise MaterializationError(f"{self.name_} cannot enumerate its labels")
        return list(itertools.islice(self._enumerate(n), n))

    # -- structure --------------------------------------------------------
    def conj(self, label: Label) -> Label:
        return self._conj(label)

    def dim(self, label: Label) -> int:
        return self._dim(label)

    def fuse(self, a: Label, b: Label) -> Mapping[Label, int]:
        """Decomposition ``a . b = sum_c N_ab^c c`` as a read-only mapping."""
        if not self.memoize:
            return self._checked_fuse(a, b)
        key = (a, b)
        out = self._memo.get(key)
        if out is not None:
            return out
        if len(self._memo) >= self.budget:
            raise MaterializationError(
                f"{self.name_}: materialization budget {self.budget} exhausted at pair "
                f"({self.name(a)}, {self.name(b)})"
            )
        out = self._checked_fuse(a, b)
        # racing writers store identical results; last write wins
        with self._lock:
            self._memo[key] = out
        return out

    def _checked_fuse(self, a, b):
        self.check_label(a)
        self.check_label(b)
        raw = self._fuse(a, b)
        out = {}
        for c, n in raw.items():
            n = int(n)
            if n < 0 or n > INT64_MAX:
                raise OverflowError(f"structure constant N_{a},{b}^{c} = {n} outside int64 range")
            if n:
                out[c] = n
        return MappingProxyType(out)

    def N(self, a: Label, b: Label, c: Label) -> int:
        return self.fuse(a, b).get(c, 0)

    # -- elements ---------------------------------------------------------
    def element(self, coeffs: Mapping | None = None) -> FusionElement:
        """Build an element from ``{label or name: coefficient}``."""
        return FusionElement(self, {self.label(k): v for k, v in (coeffs or {}).items()})

    def basis_element(self, label) -> FusionElement:
        return FusionElement(self, {self.label(label): 1})

    __getitem__ = basis_element

    def one(self) -> FusionElement:
        return FusionElement(self, {self.unit: 1})

    def zero(self) -> FusionElement:
        return FusionElement(self, {})

    # -- serialization ----------------------------------------------------
    def to_dict(self, window: Iterable[Label] | None = None) -> dict:
        """Ring file contents; infinite rings require a window of labels.

        When the window is not closed under fusion the result is marked
        ``truncated`` and only products of window pairs are recorded.
        """
        if window is None:
            if self.basis is None:
                raise MaterializationError(f"{self.name_} is infinite; export needs a window")
            window = self.basis
        window = list(window)
        fusion, seen = [], dict.fromkeys(window)
        for a in window:
            for b in window:
                prod = self.fuse(a, b)
                fusion.append({"a": self.name(a), "b": self.name(b),
                               "out": {self.name(c): n for c, n in prod.items()}})
                for c in prod:
                    seen.setdefault(c)
        for a in list(seen):
            seen.setdefault(self.conj(a))
        labels = self.sorted(seen)
        truncated = len(labels) != len(window) or self.basis is None
        data = {
            "name": self.name_,
            "basis": [self.name(a) for a in labels],
            "unit": self.name(self.unit),
            "dims": {self.name(a): self.dim(a) for a in labels},
            "conj": {self.name(a): self.name(self.conj(a)) for a in labels},
            "fusion": fusion,
        }
        if truncated:
            data["truncated"] = True
            data["window"] = [self.name(a) for a in window]
        return data

    def to_json(self, window=None) -> str:
        return dumps(self.to_dict(window))


class FusionElement:
    """Finitely supported complex combination of basis labels.

    ``x * y`` is the fusion product, ``x.star()`` the involution. Zero
    coefficients are dropped.
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: FusionRing, coeffs: Mapping[Label, complex]):
        self.ring = ring
        self.coeffs = {a: complex(c) for a, c in coeffs.items() if c != 0}
        for a in self.coeffs:
            ring.check_label(a)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = [f"({c:g})*{self.ring.name(a)}" for a, c in self.items()]
        return " + ".join(terms)

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: self.ring.order_key(kv[0]))

    @property
    def support(self) -> list[Label]:
        return self.ring.sorted(self.coeffs)

    def coeff(self, label) -> complex:
        return self.coeffs.get(self.ring.label(label), 0j)

    def _same_ring(self, other: FusionElement):
        if other.ring is not self.ring:
            raise RingMismatchError(f"elements of {self.ring.name_} and {other.ring.name_} cannot be combined")

    def __eq__(self, other):
        if not isinstance(other, FusionElement):
            return NotImplemented
        return self.ring is other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.coeffs.items())))

    def __add__(self, other):
        if not isinstance(other, FusionElement):
            return NotImplemented
        self._same_ring(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, 0) + c
        return FusionElement(self.ring, out)

    def __neg__(self):
        return FusionElement(self.ring, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, FusionElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FusionElement):
            return multiply(self, other)
        if isinstance(other, (int, float, complex)):
            return FusionElement(self.ring, {a: c * other for a, c in self.coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def star(self) -> FusionElement:
        return involute(self)

    def trace(self) -> complex:
        return trace(self)

    def inner(self, other: FusionElement) -> complex:
        return inner_product(self, other)

    def norm2(self) -> float:
        return sum(abs(c) ** 2 for c in self.coeffs.values()) ** 0.5

    def max_length(self, length) -> int:
        return max((length(a) for a in self.coeffs), default=0)


def multiply(x: FusionElement, y: FusionElement) -> FusionElement:
    x._same_ring(y)
    ring = x.ring
    out: dict = {}
    for a, ca in x.coeffs.items():
        for b, cb in y.coeffs.items():
            for c, n in ring.fuse(a, b).items():
                out[c] = out.get(c, 0) + ca * cb * n
    return FusionElement(ring, out)


def involute(x: FusionElement) -> FusionElement:
    ring = x.ring
    return FusionElement(ring, {ring.conj(a): c.conjugate() for a, c in x.coeffs.items()})


def trace(x: FusionElement) -> complex:
    """The Haar trace: coefficient of the unit."""
    return x.coeffs.get(x.ring.unit, 0j)


def inner_product(x: FusionElement, y: FusionElement) -> complex:
    """Conjugate-linear in the first argument; the basis is orthonormal."""
    x._same_ring(y)
    return sum((c.conjugate() * y.coeffs[a] for a, c in x.coeffs.items() if a in y.coeffs), 0j)


def verify_axioms(ring: FusionRing, window: Iterable[Label]) -> Report:
    """Check the based-ring axioms on all window pairs/triples.

    Every failure is an entry in the returned report; nothing is raised.
    """
    window = [ring.label(a) for a in window]
    name = ring.name
    rep = Report(f"fusion axioms ({ring.name_})")
    e = ring.unit

    bad = [name(a) for a in window
           if dict(ring.fuse(a, e)) != {a: 1} or dict(ring.fuse(e, a)) != {a: 1}]
    rep.add("unit law", not bad, witnesses=bad[:10])

    bad = []
    for a, b, c in itertools.product(window, repeat=3):
        left = _mul_basis(ring, _mul_basis(ring, {a: 1}, {b: 1}), {c: 1})
        right = _mul_basis(ring, {a: 1}, _mul_basis(ring, {b: 1}, {c: 1}))
        if left != right:
            bad.append([name(a), name(b), name(c)])
    rep.add("associativity", not bad, witnesses=bad[:10], triples=len(window) ** 3)

    bad = [name(a) for a in window if ring.conj(ring.conj(a)) != a]
    rep.add("conjugation involutive", not bad, witnesses=bad[:10])
    rep.add("unit self-conjugate", ring.conj(e) == e)
    bad = [name(a) for a in window if ring.dim(ring.conj(a)) != ring.dim(a)]
    rep.add("conjugate dimension", not bad, witnesses=bad[:10])

    bad = []
    for a, b in itertools.product(window, repeat=2):
        lhs = {ring.conj(c): n for c, n in ring.fuse(a, b).items()}
        if lhs != dict(ring.fuse(ring.conj(b), ring.conj(a))):
            bad.append([name(a), name(b)])
    rep.add("involution anti-multiplicative", not bad, witnesses=bad[:10])

    bad = []
    for a, b in itertools.product(window, repeat=2):
        n = ring.N(a, ring.conj(b), e)
        if n != (1 if a == b else 0):
            bad.append([name(a), name(b), n])
    rep.add("conjugate orthogonality", not bad, witnesses=bad[:10])

    bad = []
    for a, b in itertools.product(window, repeat=2):
        if ring.dim(a) * ring.dim(b) != sum(n * ring.dim(c) for c, n in ring.fuse(a, b).items()):
            bad.append([name(a), name(b)])
    rep.add("dimension multiplicative", not bad, witnesses=bad[:10])

    bad = [[name(a), name(b)] for a, b in itertools.product(window, repeat=2)
           if ring.N(a, b, e) != ring.N(b, a, e)]
    rep.add("trace property", not bad, witnesses=bad[:10])
    rep.data["window"] = [name(a) for a in window]
    return rep


def _mul_basis(ring, x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            for c, n in ring.fuse(a, b).items():
                out[c] = out.get(c, 0) + ca * cb * n
    return out


def explicit_ring(data: Mapping, *, validate: bool = True, name: str | None = None) -> FusionRing:
    """Ring from the JSON file format.

    ``{basis, unit, dims, conj, fusion: [{a, b, out}]}``. A ``truncated`` file
    only answers products of recorded pairs; other pairs raise
    :class:`MaterializationError`.
    """
    try:
        basis = list(data["basis"])
        unit = data["unit"]
        dims = {a: int(d) for a, d in data["dims"].items()}
        conj = dict(data["conj"])
        entries = data["fusion"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed ring data: missing field {exc}") from exc
    basis_set = set(basis)
    if len(basis_set) != len(basis):
        raise ValueError("duplicate basis names")
    if unit not in basis_set:
        raise ValueError(f"unit {unit!r} not in basis")
    for field_name, mapping in (("dims", dims), ("conj", conj)):
        missing = basis_set - set(mapping)
        if missing:
            raise ValueError(f"{field_name} missing entries for {sorted(missing)}")
    table: dict[tuple[str, str], dict[str, int]] = {}
    for entry in entries:
        a, b, out = entry["a"], entry["b"], entry["out"]
        for lab in (a, b, *out):
            if lab not in basis_set:
                raise ValueError(f"unknown label {lab!r} in fusion entry")
        for c, n in out.items():
            if not isinstance(n, int) or n < 0 or n > INT64_MAX:
                raise ValueError(f"multiplicity N_{a},{b}^{c} = {n!r} is not a nonnegative int64")
        table[(a, b)] = {c: n for c, n in out.items() if n}
    truncated = bool(data.get("truncated", False))
    if not truncated:
        missing = [(a, b) for a in basis for b in basis if (a, b) not in table]
        if missing:
            raise ValueError(f"fusion table incomplete, e.g. pair {missing[0]}")
    ring_name = name or data.get("name", "explicit")

    def fuse(a, b):
        try:
            return table[(a, b)]
        except KeyError:
            raise MaterializationError(f"{ring_name}: no fusion data for pair ({a}, {b})") from None

    ring = FusionRing(
        ring_name, unit, fuse, conj.__getitem__, dims.__getitem__,
        contains=basis_set.__contains__, basis=basis, memoize=False,
    )
    if truncated:
        ring.window = list(data.get("window", basis))
    if validate:
        _raise_on_failure(verify_truncated(ring) if truncated else verify_axioms(ring, basis))
    return ring


def verify_truncated(ring: FusionRing, window=None) -> Report:
    """Axioms checkable from a truncated table: conjugate orthogonality and
    dimension multiplicativity on pairs from the recorded window."""
    window = list(ring.window if window is None else window)
    rep = Report(f"fusion axioms ({ring.name_}, truncated)")
    e = ring.unit
    bad = [[a, b] for a in window for b in window
           if ring.conj(b) in window and ring.N(a, ring.conj(b), e) != (1 if a == b else 0)]
    rep.add("conjugate orthogonality", not bad, witnesses=bad[:10])
    bad = [[a, b] for a in window for b in window
           if ring.dim(a) * ring.dim(b) != sum(n * ring.dim(c) for c, n in ring.fuse(a, b).items())]
    rep.add("dimension multiplicative", not bad, witnesses=bad[:10])
    return rep


def _raise_on_failure(report: Report):
    for check in report.checks:
        if not check.passed:
            raise FusionAxiomError(check.name, check.detail.get("witnesses", []))


def load_ring(path: str | Path, *, validate: bool = True) -> FusionRing:
    return explicit_ring(json.loads(Path(path).read_text()), validate=validate)


def save_ring(ring: FusionRing, path: str | Path, window=None) -> Path:
    path = Path(path)
    path.write_text(ring.to_json(window))
    return path
