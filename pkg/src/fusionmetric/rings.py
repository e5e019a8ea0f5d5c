"""Builders for the concrete fusion rings used throughout the package."""

from __future__ import annotations

import itertools
import re
import string
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import FusionAxiomError
from .fusion_ring import FusionRing, load_ring

__all__ = [
    "su2", "so3", "o2plus", "s4plus", "cyclic_group_ring", "group_ring",
    "free_group_ring", "free_abelian_ring", "rep_ring", "build_ring", "PRESETS",
]

_U_NAME = re.compile(r"^u\^?(\d+)$")


def _parse_u(name: str) -> int:
    m = _U_NAME.match(name.strip())
    if not m:
        raise ValueError(name)
    return int(m.group(1))


def _is_nat(a) -> bool:
    return isinstance(a, (int, np.integer)) and not isinstance(a, bool) and a >= 0


def _clebsch_gordan(step: int, dim_of, name: str) -> FusionRing:
    def fuse(k, n):
        return {j: 1 for j in range(abs(k - n), k + n + 1, step)}

    return FusionRing(
        name, 0, fuse, conj=lambda a: a, dim=dim_of,
        contains=_is_nat, label_name=lambda n: f"u{n}", parse_name=_parse_u,
        order_key=int, enumerate_labels=lambda n: range(n), commutative=True,
    )


def su2(name: str = "su2") -> FusionRing:
    """u^k u^n = u^|k-n| + u^(|k-n|+2) + ... + u^(k+n), d(u^n) = n + 1."""
    return _clebsch_gordan(2, lambda n: n + 1, name)


def so3(name: str = "so3") -> FusionRing:
    """u^k u^n = u^|k-n| + u^(|k-n|+1) + ... + u^(k+n), d(u^n) = 2n + 1."""
    return _clebsch_gordan(1, lambda n: 2 * n + 1, name)


def o2plus() -> FusionRing:
    # same fusion rules as SU(2)
    return su2("o2plus")


def s4plus() -> FusionRing:
    # same fusion rules as SO(3)
    return so3("s4plus")


# -- group rings --------------------------------------------------------------

def group_ring(table, names=None, name: str = "group_ring") -> FusionRing:
    """Group ring of a finite group given by its multiplication table.

    ``table[i][j]`` is the index of ``g_i g_j``. Labels are element indices;
    the identity is located from the table.
    """
    table = np.asarray(table, dtype=int)
    n = table.shape[0]
    if table.shape != (n, n):
        raise ValueError("multiplication table must be square")
    ident = [i for i in range(n) if list(table[i]) == list(range(n))]
    if len(ident) != 1:
        raise ValueError("multiplication table has no unique identity")
    e = ident[0]
    inv = {}
    for i in range(n):
        js = [j for j in range(n) if table[i, j] == e]
        if len(js) != 1:
            raise ValueError(f"element {i} has no unique inverse")
        inv[i] = js[0]
    if names is None:
        names = [f"g{i}" for i in range(n)]
        names[e] = "e"
    names = list(names)
    prods = {(a, b): {int(table[a, b]): 1} for a in range(n) for b in range(n)}
    return FusionRing(
        name, e, lambda a, b: prods[(a, b)], inv.__getitem__, lambda a: 1,
        contains=lambda a: _is_nat(a) and a < n, label_name=names.__getitem__,
        basis=range(n), memoize=False,
        commutative=bool((table == table.T).all()),
    )


def cyclic_group_ring(n: int) -> FusionRing:
    """Group ring of Z_n with basis e, g, g2, ..., g^(n-1)."""
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    names = ["e", "g"] + [f"g{k}" for k in range(2, n)]
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return group_ring(table, names[:n], name=f"z{n}")


def _letters(k):
    if not 1 <= k <= 26:
        raise ValueError("free group rank must be between 1 and 26")
    return string.ascii_lowercase[:k]


def free_group_ring(k: int = 2) -> FusionRing:
    """Group ring of the free group F_k.

    Labels are reduced words as tuples of nonzero ints: ``i`` is the i-th
    generator, ``-i`` its inverse. Names use lowercase letters for
    generators and uppercase for inverses (``"aB"`` is a b^-1).
    """
    letters = _letters(k)

    def reduce(word):
        out = []
        for x in word:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def fuse(a, b):
        return {reduce(a + b): 1}

    def conj(a):
        return tuple(-x for x in reversed(a))

    def name_of(a):
        if not a:
            return "e"
        return "".join(letters[x - 1] if x > 0 else letters[-x - 1].upper() for x in a)

    def parse(s):
        s = s.strip()
        if s == "e":
            return ()
        word = []
        for ch in s:
            i = letters.find(ch.lower())
            if i < 0:
                raise ValueError(s)
            word.append(i + 1 if ch.islower() else -(i + 1))
        if reduce(word) != tuple(word):
            raise ValueError(f"{s} is not reduced")
        return tuple(word)

    def contains(a):
        return (isinstance(a, tuple) and all(isinstance(x, int) and 1 <= abs(x) <= k for x in a)
                and reduce(a) == a)

    gens = sorted(list(range(1, k + 1)) + [-i for i in range(1, k + 1)], key=_letter_order)

    def enumerate_words(n):
        layer, count = [()], 0
        while True:
            for w in layer:
                yield w
                count += 1
                if count >= n:
                    return
            layer = [w + (x,) for w in layer for x in gens if not w or w[-1] != -x]

    return FusionRing(
        f"free{k}", (), fuse, conj, lambda a: 1, contains=contains,
        label_name=name_of, parse_name=parse,
        order_key=lambda a: (len(a), tuple(_letter_order(x) for x in a)),
        enumerate_labels=enumerate_words, memoize=False, commutative=k == 1,
    )


def _letter_order(x):
    return (abs(x), x < 0)


def free_abelian_ring(k: int = 2) -> FusionRing:
    """Group ring of Z^k; labels are integer k-tuples.

    Names are ``"(2,1)"``; ``"e1"`` and ``"-e1"`` denote the standard
    generators and their inverses.
    """
    if k < 1:
        raise ValueError("rank must be positive")
    zero = (0,) * k

    def parse(s):
        s = s.strip().replace(" ", "")
        if s in ("e", "0"):
            return zero
        m = re.fullmatch(r"(-?)e(\d+)", s)
        if m:
            i = int(m.group(2)) - 1
            if not 0 <= i < k:
                raise ValueError(s)
            v = [0] * k
            v[i] = -1 if m.group(1) else 1
            return tuple(v)
        parts = s.strip("()").split(",")
        if len(parts) != k:
            raise ValueError(s)
        return tuple(int(p) for p in parts)

    def name_of(a):
        return "(" + ",".join(str(x) for x in a) + ")"

    def contains(a):
        return isinstance(a, tuple) and len(a) == k and all(isinstance(x, int) for x in a)

    def enumerate_vectors(n):
        count, r = 0, 0
        while True:
            shell = [v for v in itertools.product(range(-r, r + 1), repeat=k)
                     if sum(map(abs, v)) == r]
            for v in sorted(shell, key=_vec_order):
                yield v
                count += 1
                if count >= n:
                    return
            r += 1

    return FusionRing(
        f"zk{k}", zero, lambda a, b: {tuple(x + y for x, y in zip(a, b)): 1},
        lambda a: tuple(-x for x in a), lambda a: 1, contains=contains,
        label_name=name_of, parse_name=parse,
        order_key=lambda a: (sum(map(abs, a)), _vec_order(a)),
        enumerate_labels=enumerate_vectors, memoize=False, commutative=True,
    )


def _vec_order(v):
    return tuple((abs(x), x < 0) for x in v)


# -- representation rings -----------------------------------------------------

class _GaussRational:
    """Exact a + bi with rational a, b (enough for rational character tables)."""

    __slots__ = ("re", "im")

    def __init__(self, re_, im=0):
        self.re = Fraction(re_)
        self.im = Fraction(im)

    def __mul__(self, o):
        return _GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __add__(self, o):
        return _GaussRational(self.re + o.re, self.im + o.im)

    def conj(self):
        return _GaussRational(self.re, -self.im)

    def __eq__(self, o):
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))


def _exact(v):
    """Exact Gaussian rational for int/Fraction/(re, im) input, else None."""
    if isinstance(v, bool):
        return None
    if isinstance(v, (int, Fraction, np.integer)):
        return _GaussRational(int(v) if isinstance(v, np.integer) else v)
    if isinstance(v, str):
        try:
            return _GaussRational(Fraction(v))
        except ValueError:
            return None
    if isinstance(v, (tuple, list)) and len(v) == 2 and all(_exact(x) is not None and not isinstance(x, (tuple, list)) for x in v):
        return _GaussRational(Fraction(v[0]), Fraction(v[1]))
    return None


def _as_complex(v) -> complex:
    if isinstance(v, (tuple, list)):
        return complex(float(Fraction(v[0]) if isinstance(v[0], str) else v[0]),
                       float(Fraction(v[1]) if isinstance(v[1], str) else v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return complex(v)


def rep_ring(characters, class_sizes, names=None, name: str = "rep_ring",
             round_tol: float = 1e-6) -> FusionRing:
    """Representation ring of a finite group from its character table.

    ``characters[a][c]`` is the value of irrep ``a`` on conjugacy class
    ``c``; class 0 must be the identity class. Entries that are ints,
    fractions, decimal strings or ``(re, im)`` pairs of those are handled in
    exact arithmetic; anything else (e.g. floats) is rounded to the nearest
    integer multiplicity, which must lie within ``round_tol``.
    """
    class_sizes = [int(s) for s in class_sizes]
    order = sum(class_sizes)
    if class_sizes[0] != 1:
        raise ValueError("class 0 must be the identity class")
    r = len(characters)
    if any(len(row) != len(class_sizes) for row in characters):
        raise ValueError("character rows must have one value per class")
    names = list(names) if names is not None else [f"rho{i}" for i in range(r)]
    exact = [[_exact(v) for v in row] for row in characters]
    is_exact = all(v is not None for row in exact for v in row)
    numeric = np.array([[_as_complex(v) for v in row] for row in characters])

    dims = []
    for a in range(r):
        d = numeric[a, 0]
        if abs(d.imag) > 1e-9 or abs(d.real - round(d.real)) > 1e-9 or round(d.real) < 1:
            raise ValueError(f"character {names[a]} has non-integral degree {d}")
        dims.append(int(round(d.real)))

    if is_exact:
        def mult(a, b, c):
            total = _GaussRational(0)
            for k, size in enumerate(class_sizes):
                total = total + _GaussRational(size) * exact[a][k] * exact[b][k] * exact[c][k].conj()
            m = total.re / order
            if total.im != 0 or m.denominator != 1:
                raise FusionAxiomError("integral multiplicities", [names[a], names[b], names[c]])
            return int(m)
    else:
        sizes = np.array(class_sizes, dtype=float)

        def mult(a, b, c):
            val = np.sum(sizes * numeric[a] * numeric[b] * numeric[c].conj()) / order
            nearest = round(val.real)
            if abs(val - nearest) > round_tol:
                raise FusionAxiomError("integral multiplicities", [names[a], names[b], names[c]],
                                       f"multiplicity {val} is not within {round_tol} of an integer")
            return int(nearest)

    table = {(a, b): {c: m for c in range(r) if (m := mult(a, b, c))} for a in range(r) for b in range(r)}
    conj = {}
    for a in range(r):
        partners = [b for b in range(r) if np.allclose(numeric[b], numeric[a].conj(), atol=1e-9)]
        if len(partners) != 1:
            raise FusionAxiomError("conjugate character", [names[a]])
        conj[a] = partners[0]
    units = [a for a in range(r) if np.allclose(numeric[a], 1, atol=1e-9)]
    if len(units) != 1:
        raise FusionAxiomError("unique trivial character", names)
    return FusionRing(
        name, units[0], lambda a, b: table[(a, b)], conj.__getitem__, dims.__getitem__,
        contains=lambda a: _is_nat(a) and a < r, label_name=names.__getitem__,
        basis=range(r), memoize=False,
    )


# -- spec resolution ----------------------------------------------------------

PRESETS = ("su2", "so3", "o2plus", "s4plus", "z2", "z3", "s3", "d4", "q8", "f2")


def build_ring(spec: str) -> FusionRing:
    """Resolve a ring spec string.

    Accepted forms: the presets ``su2 so3 o2plus s4plus z2 z3 s3 d4 q8 f2``,
    ``z<n>`` / ``cyclic:<n>`` (group ring of Z_n), ``group:<name>`` (group
    ring of a bundled finite group), ``rep:<name>`` (its representation
    ring), ``free:<k>``, ``zk:<k>`` (Z^k) and ``file:<path>``. The presets
    ``s3 d4 q8`` denote representation rings, matching the classical model.
    """
    spec = spec.strip()
    low = spec.lower()
    simple = {"su2": su2, "so3": so3, "o2plus": o2plus, "s4plus": s4plus}
    if low in simple:
        return simple[low]()
    if low == "f2":
        return free_group_ring(2)
    m = re.fullmatch(r"(?:z|cyclic:)(\d+)", low)
    if m:
        return cyclic_group_ring(int(m.group(1)))
    m = re.fullmatch(r"free:(\d+)", low)
    if m:
        return free_group_ring(int(m.group(1)))
    m = re.fullmatch(r"zk:(\d+)", low)
    if m:
        return free_abelian_ring(int(m.group(1)))
    if low.startswith("file:") or low.endswith(".json"):
        path = spec[5:] if low.startswith("file:") else spec
        return load_ring(Path(path))
    from .classical.groups import load_group

    if low in ("s3", "d4", "q8") or low.startswith("rep:"):
        group = load_group(low.removeprefix("rep:"))
        return group.rep_ring()
    if low.startswith("group:"):
        group = load_group(low.removeprefix("group:"))
        return group_ring(group.table, group.names, name=f"group_ring({group.name})")
    raise ValueError(f"unknown ring spec {spec!r}; presets are {', '.join(PRESETS)}")
