"""Truncated left-regular representation of a fusion ring on l2(Irred),
the length Dirac operator, commutator Lip-norms and block-norm checks.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .fusion_ring import FusionElement, FusionRing
from .length import LengthFunction
from .linalg import SparseOp, op_norm
from .reports import Report


def as_element(ring: FusionRing, x) -> FusionElement:
    if isinstance(x, FusionElement):
        return x
    if isinstance(x, dict):
        return ring.element(x)
    return ring.basis_element(x)


class TruncatedRep:
    """The window ``ball(l, R)`` of l2(Irred) with ``D e_a = l(a) e_a``.

    ``pi_matrix(x)[g, b] = sum_a c_a N_{a,b}^g`` for window labels ``b, g``.
    An entry is a genuine matrix entry of the untruncated operator, so any
    compression to a sub-window is exact; the truncation only discards
    rows and columns.
    """

    def __init__(self, ring: FusionRing, length: LengthFunction, R: int):
        if R < 0:
            raise ValueError("window radius must be nonnegative")
        if length.ring is not ring:
            raise ValueError("length function belongs to a different ring")
        self.ring = ring
        self.length = length
        self.R = R
        self.basis = length.ball(R)
        self.index = {a: i for i, a in enumerate(self.basis)}
        self.dirac_diag = np.array([length(a) for a in self.basis], dtype=float)
        self._lengths = self.dirac_diag.astype(int)
        self._cache: dict = {}

    def __repr__(self):
        return f"TruncatedRep({self.ring.name_}, R={self.R}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return len(self.basis)

    def indices_upto(self, r: int) -> np.ndarray:
        """Indices of ``ball(r)``; a prefix because the basis is length-sorted."""
        return np.flatnonzero(self._lengths <= r)

    def sphere_indices(self, m: int) -> np.ndarray:
        return np.flatnonzero(self._lengths == m)

    def support_length(self, x: FusionElement) -> int:
        return x.max_length(self.length)

    def dirac(self) -> SparseOp:
        return SparseOp(sp.diags(self.dirac_diag.astype(complex)).tocsr(), 0)

    def _basis_csr(self, a) -> sp.csr_matrix:
        m = self._cache.get(a)
        if m is None:
            rows, cols, vals = [], [], []
            for b, j in self.index.items():
                for g, n in self.ring.fuse(a, b).items():
                    i = self.index.get(g)
                    if i is not None:
                        rows.append(i)
                        cols.append(j)
                        vals.append(n)
            m = sp.csr_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=(self.dim, self.dim))
            self._cache[a] = m
        return m

    def pi_csr(self, x) -> sp.csr_matrix:
        x = as_element(self.ring, x)
        parts = [(c, self._basis_csr(a).tocoo()) for a, c in x.coeffs.items()]
        if not parts:
            return sp.csr_matrix((self.dim, self.dim), dtype=complex)
        rows = np.concatenate([m.row for _, m in parts])
        cols = np.concatenate([m.col for _, m in parts])
        vals = np.concatenate([c * m.data for c, m in parts]).astype(complex)
        out = sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))
        out.eliminate_zeros()
        return out

    def pi_entries(self, x) -> dict:
        coo = self.pi_csr(x).tocoo()
        return {(int(i), int(j)): complex(v) for i, j, v in zip(coo.row, coo.col, coo.data)}

    def pi_matrix(self, x) -> SparseOp:
        entries = self.pi_entries(x)
        lens = self._lengths
        band = max((abs(int(lens[i]) - int(lens[j])) for i, j in entries), default=0)
        return SparseOp.from_entries((self.dim, self.dim), entries, band)

    def commutator(self, x) -> SparseOp:
        """``[D, pi(x)]`` on the window: entries ``(l(g) - l(b)) pi(x)[g, b]``."""
        entries = self.pi_entries(x)
        lens = self._lengths
        out = {(i, j): (lens[i] - lens[j]) * v for (i, j), v in entries.items() if lens[i] != lens[j]}
        band = max((abs(int(lens[i]) - int(lens[j])) for i, j in out), default=0)
        return SparseOp.from_entries((self.dim, self.dim), out, band)


def pi_matrix(rep: TruncatedRep, x) -> SparseOp:
    return rep.pi_matrix(x)


def commutator(rep: TruncatedRep, x) -> SparseOp:
    return rep.commutator(x)


@dataclass
class LipBounds:
    """Two-sided estimate of ``||[D, pi(x)]||``.

    ``lower`` is the norm of the commutator compressed to ``ball(R - k)``
    (``certified_size`` labels). ``upper`` is the band-sum bound
    ``sum_j |j| sup_m ||P_{m+j} pi(x) P_m||`` with sups taken over the
    window; ``stabilized`` says whether those sups stopped growing over the
    last quarter of the window.
    """

    lower: float
    upper: float
    stabilized: bool
    R: int
    k: int
    certified_size: int
    band_sups: dict = field(default_factory=dict)

    def __iter__(self):
        yield self.lower
        yield self.upper

    def to_dict(self) -> dict:
        d = asdict(self)
        d["band_sups"] = {str(j): v for j, v in sorted(self.band_sups.items())}
        return d


def _block_norm(block_entries: dict) -> float:
    if len(block_entries) == 1:
        return abs(next(iter(block_entries.values())))
    rows = sorted({i for i, _ in block_entries})
    cols = sorted({j for _, j in block_entries})
    ri = {r: k for k, r in enumerate(rows)}
    ci = {c: k for k, c in enumerate(cols)}
    B = np.zeros((len(rows), len(cols)), dtype=complex)
    for (i, j), v in block_entries.items():
        B[ri[i], ci[j]] = v
    return op_norm(B)


def _blocks(rep: TruncatedRep, entries: dict) -> dict:
    """Group matrix entries by (row sphere, column sphere)."""
    lens = rep._lengths
    blocks: dict = defaultdict(dict)
    for (i, j), v in entries.items():
        blocks[(int(lens[i]), int(lens[j]))][(i, j)] = v
    return blocks


def lip_norm_bounds(rep: TruncatedRep, x, margin: int | None = None,
                    tol: float = 1e-10) -> LipBounds:
    """Lower and upper bounds for the commutator Lip-norm of ``x``."""
    x = as_element(rep.ring, x)
    k = rep.support_length(x)
    if margin is None:
        margin = 2 * k
    if rep.R < k + margin:
        raise ValueError(f"window radius {rep.R} is below k + margin = {k + margin}")
    comm = rep.commutator(x)
    sub = rep.indices_upto(rep.R - k)
    lower = op_norm(comm.compress(sub), tol) if len(sub) else 0.0

    blocks = _blocks(rep, rep.pi_entries(x))
    # running sup of block norms per band j, indexed by column sphere m
    per_band: dict[int, list[tuple[int, float]]] = defaultdict(list)
    for (mr, mc), ents in blocks.items():
        j = mr - mc
        if j != 0:
            per_band[j].append((mc, _block_norm(ents)))
    band_sups, stable = {}, True
    quarter = rep.R - max(1, rep.R // 4)
    for j, vals in per_band.items():
        sup = max(v for _, v in vals)
        band_sups[j] = sup
        early = max((v for m, v in vals if max(m, m + j) <= quarter), default=0.0)
        if sup > early * (1 + 1e-12) + 1e-15:
            stable = False
    upper = float(sum(abs(j) * s for j, s in band_sups.items()))
    return LipBounds(float(lower), upper, stable, rep.R, k, len(sub), band_sups)


def haagerup_check(rep: TruncatedRep, C: float = 1.0, window: int | None = None,
                   n_random: int = 1000, seed: int = 0, tol: float = 1e-9) -> Report:
    """Check ``||P_m a P_n|| <= C ||a||_2`` for basis elements and random
    unit-norm elements supported on one sphere, over ``m, n <= window``.

    Rows of the report hold one entry per nonzero block of a basis element.
    """
    window = rep.R if window is None else window
    if window > rep.R:
        raise ValueError(f"window {window} exceeds the representation radius {rep.R}")
    ring, name = rep.ring, rep.ring.name
    labels = [a for a in rep.basis if rep.length(a) <= window]

    lens = rep._lengths
    pos = np.zeros(rep.dim, dtype=int)
    for m in range(window + 1):
        ids = rep.sphere_indices(m)
        pos[ids] = np.arange(len(ids))
    sizes = [len(rep.sphere_indices(m)) for m in range(window + 1)]

    def block_norms(x):
        coo = rep.pi_csr(x).tocoo()
        keep = (lens[coo.row] <= window) & (lens[coo.col] <= window)
        rows, cols, vals = coo.row[keep], coo.col[keep], coo.data[keep]
        keys = lens[rows] * (window + 1) + lens[cols]
        order = np.argsort(keys, kind="stable")
        keys, rows, cols, vals = keys[order], rows[order], cols[order], vals[order]
        uniq, starts = np.unique(keys, return_index=True)
        ends = np.append(starts[1:], len(keys))
        out = {}
        for key, s0, s1 in zip(uniq.tolist(), starts, ends):
            m, n = divmod(key, window + 1)
            if s1 - s0 == 1:
                out[(m, n)] = float(abs(vals[s0]))
                continue
            r_, c_ = rows[s0:s1], cols[s0:s1]
            if len(np.unique(r_)) == s1 - s0 and len(np.unique(c_)) == s1 - s0:
                # at most one entry per row and column: a weighted partial permutation
                out[(m, n)] = float(np.abs(vals[s0:s1]).max())
                continue
            B = np.zeros((sizes[m], sizes[n]), dtype=complex)
            B[pos[rows[s0:s1]], pos[cols[s0:s1]]] = vals[s0:s1]
            out[(m, n)] = float(np.linalg.norm(B, 2))
        return out

    report = Report(f"block norm bound ({ring.name_}, C={C}, window={window})")
    worst, witness = 0.0, None
    for a in labels:
        for (m, n), v in sorted(block_norms(a).items()):
            report.rows.append({"k": name(a), "m": m, "n": n, "norm": v})
            if v / C > worst:
                worst, witness = v / C, [name(a), m, n]
    report.add("basis elements", worst <= 1 + tol, max_ratio=worst, witness=witness,
               elements=len(labels))

    rng = np.random.default_rng(seed)
    spheres = [s for s in range(1, window + 1) if len(rep.sphere_indices(s))]
    worst_r, witness_r = 0.0, None
    for t in range(n_random if spheres else 0):
        s = spheres[rng.integers(len(spheres))]
        sup = [rep.basis[i] for i in rep.sphere_indices(s)]
        c = rng.standard_normal(len(sup)) + 1j * rng.standard_normal(len(sup))
        c /= np.linalg.norm(c)
        norms = block_norms(ring.element(dict(zip(sup, c))))
        r = max(norms.values(), default=0.0) / C
        if r > worst_r:
            worst_r, witness_r = r, {"sample": t, "sphere": s}
    report.add("random sphere elements", worst_r <= 1 + tol, max_ratio=worst_r,
               witness=witness_r, samples=n_random if spheres else 0)
    report.data.update(C=C, window=window, max_ratio=max(worst, worst_r), seed=seed)
    return report
