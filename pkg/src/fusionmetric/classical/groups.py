"""Finite groups with unitary irreducible representations.

Bundled groups: cyclic ``z<n>`` (generated on the fly, n <= 12), and
``s3``, ``d4``, ``q8`` loaded from JSON files whose matrix entries are
decimal strings (``"0.5"``, ``"-1j"``, ...).
"""

from __future__ import annotations

import cmath
import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..exceptions import ModelValidationError

DATA_ENV = "FUSIONMETRIC_DATA"
BUNDLED = ("z2", "z3", "s3", "d4", "q8")
TOL_IDENTITY = 1e-10
TOL_IRREDUCIBLE = 1e-8


class FiniteGroup:
    """Group given by its multiplication table ``table[a][b] = index of ab``.

    The group axioms are checked exhaustively at construction.
    """

    def __init__(self, table, names=None, name: str = "G", irreps=None):
        table = np.asarray(table, dtype=int)
        n = table.shape[0]
        if table.shape != (n, n) or table.min() < 0 or table.max() >= n:
            raise ModelValidationError("multiplication table must be an n x n array of element indices")
        self.name = name
        self.table = table
        self.order = n
        self.names = list(names) if names is not None else [f"g{i}" for i in range(n)]
        ids = [i for i in range(n) if (table[i] == np.arange(n)).all() and (table[:, i] == np.arange(n)).all()]
        if len(ids) != 1:
            raise ModelValidationError("group axiom 'identity' fails: no two-sided identity")
        self.identity = ids[0]
        inv = np.full(n, -1)
        for a in range(n):
            hits = np.flatnonzero(table[a] == self.identity)
            if len(hits) != 1 or table[hits[0], a] != self.identity:
                raise ModelValidationError(f"group axiom 'inverse' fails at {self.names[a]}")
            inv[a] = hits[0]
        self.inverse = inv
        # (ab)c == a(bc) for all triples
        left = table[table, :]                    # left[a, b, c] = (ab)c
        right = table[:, table]                   # right[a, b, c] = a(bc)
        bad = np.argwhere(left != right)
        if len(bad):
            a, b, c = bad[0]
            raise ModelValidationError(
                f"group axiom 'associativity' fails at ({self.names[a]}, {self.names[b]}, {self.names[c]})")
        self.irreps: list[Irrep] = list(irreps or [])

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def index(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not an element of {self.name}") from None

    def conjugacy_classes(self) -> list[list[int]]:
        seen, classes = set(), []
        for a in range(self.order):
            if a in seen:
                continue
            cls = sorted({self.mul(self.mul(g, a), int(self.inverse[g])) for g in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes

    def character_table(self):
        """Characters on conjugacy classes, with near-integer values made exact."""
        classes = self.conjugacy_classes()
        rows = [[_rationalize(rho.character()[cls[0]]) for cls in classes] for rho in self.irreps]
        return rows, [len(c) for c in classes]

    def rep_ring(self):
        """Representation ring built from the character table of the irreps."""
        from ..rings import rep_ring

        rows, sizes = self.character_table()
        return rep_ring(rows, sizes, names=[r.label for r in self.irreps], name=f"rep_ring({self.name})")


def _rationalize(z: complex, tol: float = 1e-12):
    re_, im = round(z.real), round(z.imag)
    if abs(z.real - re_) < tol and abs(z.imag - im) < tol:
        return int(re_) if im == 0 else (int(re_), int(im))
    return complex(z)


@dataclass
class Irrep:
    """Unitary representation ``g -> matrices[g]``; validated by :meth:`validate`."""

    label: str
    matrices: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        self.matrices = np.asarray(self.matrices, dtype=complex)
        self.dim = self.matrices.shape[1]

    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)

    def validate(self, group: FiniteGroup, tol: float = TOL_IDENTITY):
        U = self.matrices
        if U.shape != (group.order, self.dim, self.dim):
            raise ModelValidationError(f"irrep {self.label}: expected {group.order} matrices of size {self.dim}")
        eye = np.eye(self.dim)
        for g in range(group.order):
            if np.abs(U[g].conj().T @ U[g] - eye).max() > tol:
                raise ModelValidationError(f"irrep {self.label}: 'unitarity' fails at {group.names[g]}")
        for a in range(group.order):
            prod = np.einsum("ij,bjk->bik", U[a], U)
            resid = np.abs(prod - U[group.table[a]]).max(axis=(1, 2))
            if resid.max() > tol:
                b = int(resid.argmax())
                raise ModelValidationError(
                    f"irrep {self.label}: 'homomorphism' fails at ({group.names[a]}, {group.names[b]})")
        chi = self.character()
        norm = float(np.sum(np.abs(chi) ** 2) / group.order)
        if abs(norm - 1) > TOL_IRREDUCIBLE:
            raise ModelValidationError(f"irrep {self.label}: 'irreducibility' fails, <chi, chi> = {norm:.6g}")


def cyclic_group(n: int) -> FiniteGroup:
    """Z_n with its n characters ``g^k -> exp(2 pi i jk / n)``."""
    if not 1 <= n <= 12:
        raise ValueError("bundled cyclic groups have order 1..12")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    names = ["e", "g"] + [f"g{k}" for k in range(2, n)]
    irreps = []
    for j in range(n):
        vals = [cmath.exp(2j * cmath.pi * j * k / n) for k in range(n)]
        vals = [complex(round(v.real, 15), round(v.imag, 15)) for v in vals]
        irreps.append(Irrep("triv" if j == 0 else f"chi{j}", np.array(vals).reshape(n, 1, 1)))
    return FiniteGroup(table, names[:n], name=f"z{n}", irreps=irreps)


def parse_entry(s) -> complex:
    if isinstance(s, (int, float)):
        return complex(s)
    return complex(str(s).replace(" ", ""))


def group_from_dict(data: dict) -> FiniteGroup:
    try:
        names, table = data["elements"], data["table"]
        irreps = [Irrep(r["label"], [[[parse_entry(x) for x in row] for row in M] for M in r["matrices"]])
                  for r in data.get("irreps", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelValidationError(f"malformed group data: {exc}") from exc
    if int(data.get("order", len(names))) != len(names):
        raise ModelValidationError("order does not match the element list")
    return FiniteGroup(table, names, name=data.get("name", "G"), irreps=irreps)


def _data_path(name: str, data_dir=None):
    for base in (data_dir, os.environ.get(DATA_ENV)):
        if base:
            p = Path(base) / f"{name}.json"
            if p.exists():
                return p
    res = resources.files("fusionmetric.classical") / "data" / f"{name}.json"
    return res if res.is_file() else None


def load_group(name: str, data_dir=None) -> FiniteGroup:
    """Bundled group by name; ``data_dir`` or ``$FUSIONMETRIC_DATA`` take precedence."""
    key = name.lower().strip()
    path = _data_path(key, data_dir)
    if path is not None:
        return group_from_dict(json.loads(path.read_text()))
    m = re.fullmatch(r"z(\d+)", key)
    if m:
        return cyclic_group(int(m.group(1)))
    raise KeyError(f"no bundled group {name!r}; available: {', '.join(BUNDLED)}")
