"""Dense model of C(G) acting on L2(G) for a finite group G.

Conventions: L2(G) carries the Haar inner product ``<f1, f2> = h(conj(f1) f2)``
and the orthonormal basis ``e_g = sqrt(n) delta_g``; a function ``f`` has
coordinates ``f(g) / sqrt(n)``. In this basis

    W (e_a x e_b) = e_a x e_ab          V (e_a x e_b) = e_{ab^-1} x e_b
    Z = W Sigma V Sigma,                Z (e_a x e_b) = e_a x e_{a b a^-1}

``delta(T) = Z*(1 x T)Z`` is the conjugation coaction and
``E = (h x id) delta`` slices the first leg with the unit vector ``Lambda(1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ModelValidationError, NotGeneratedError
from ..gns import TruncatedRep
from ..length import LengthFunction
from ..linalg import op_norm
from ..reports import Report
from .groups import FiniteGroup, Irrep, load_group

TOL_IDENTITY = 1e-10
TOL_INEQUALITY = 1e-9
MAX_ORDER = 24


def _perm_matrix(images: np.ndarray) -> np.ndarray:
    """Matrix sending basis vector ``k`` to basis vector ``images[k]``."""
    n = len(images)
    P = np.zeros((n, n))
    P[images, np.arange(n)] = 1
    return P


class FiniteGroupModel:
    """All operators of the finite model as dense matrices (see module docs)."""

    def __init__(self, group: FiniteGroup, irreps: list[Irrep]):
        self.group = group
        self.irreps = irreps
        n = self.n = group.order
        T, inv = group.table, group.inverse
        a, b = np.divmod(np.arange(n * n), n)      # pair index k = a*n + b
        self.W = _perm_matrix(a * n + T[a, b])
        self.V = _perm_matrix(T[a, inv[b]] * n + b)
        self.Sigma = _perm_matrix(b * n + a)
        self.Z = self.W @ self.Sigma @ self.V @ self.Sigma
        self.unit_vector = np.full(n, 1 / np.sqrt(n))
        # orthonormal matrix-coefficient basis sqrt(d) u_ij, as coordinate columns
        cols, self.coeff_labels = [], []
        for k, rho in enumerate(irreps):
            for i in range(rho.dim):
                for j in range(rho.dim):
                    cols.append(np.sqrt(rho.dim) * rho.matrices[:, i, j] / np.sqrt(n))
                    self.coeff_labels.append((k, i, j))
        self.Q = np.array(cols).T
        self._rep_ring = None

    def __repr__(self):
        return f"FiniteGroupModel({self.group.name}, order={self.n})"

    # -- functions and operators ------------------------------------------
    def function(self, f) -> np.ndarray:
        """Coerce a function on G (vector, mapping name -> value) to a vector."""
        if isinstance(f, dict):
            out = np.zeros(self.n, dtype=complex)
            for k, v in f.items():
                out[self.group.index(k)] = v
            return out
        f = np.asarray(f, dtype=complex)
        if f.shape != (self.n,):
            raise ValueError(f"expected a function on {self.n} points, got shape {f.shape}")
        return f

    def coefficient(self, k: int, i: int, j: int) -> np.ndarray:
        """Matrix coefficient ``u_ij`` of irrep ``k`` as a function on G."""
        return self.irreps[k].matrices[:, i, j].copy()

    def character(self, k: int) -> np.ndarray:
        return self.irreps[k].character()

    def mult(self, f) -> np.ndarray:
        return np.diag(self.function(f))

    def haar(self, f) -> complex:
        return complex(np.mean(self.function(f)))

    def coproduct(self, f) -> np.ndarray:
        """``Delta(f)`` as the function ``(s, t) -> f(st)`` on G x G (flattened)."""
        return self.function(f)[self.group.table.reshape(-1)]

    def coproduct_op(self, f) -> np.ndarray:
        return np.diag(self.coproduct(f))

    def is_central(self, f, tol: float = TOL_IDENTITY) -> bool:
        f = self.function(f)
        T = self.group.table
        return bool(np.abs(f[T] - f[T.T]).max() <= tol)

    # -- coaction and conditional expectation ------------------------------
    def conjugation_coaction(self, T) -> np.ndarray:
        T = np.asarray(T)
        if T.shape != (self.n, self.n):
            raise ValueError(f"operator must be {self.n} x {self.n}, got {T.shape}")
        return self.Z.conj().T @ np.kron(np.eye(self.n), T) @ self.Z

    def slice_first(self, X) -> np.ndarray:
        """``(h x id)(X)`` for X on L2 x L2, via the vector state of Lambda(1)."""
        n = self.n
        X4 = np.asarray(X).reshape(n, n, n, n)
        v = self.unit_vector
        return np.einsum("a,aibj,b->ij", v.conj(), X4, v)

    def cond_expectation(self, a) -> np.ndarray:
        """``E(a) = (h x id) delta(a)`` for a function ``a``; returns a function.

        A non-diagonal operator is rejected since E is only defined on C(G).
        """
        if isinstance(a, np.ndarray) and a.ndim == 2:
            off = a - np.diag(np.diag(a))
            if np.abs(off).max() > TOL_IDENTITY:
                raise ValueError("cond_expectation expects an element of C(G) (a diagonal operator)")
            a = np.diag(a)
        E = self.slice_first(self.conjugation_coaction(self.mult(a)))
        return np.diag(E).copy()

    def conjugation_average(self, a) -> np.ndarray:
        """``x -> (1/n) sum_g a(g^-1 x g)``."""
        a = self.function(a)
        T, inv = self.group.table, self.group.inverse
        out = np.zeros(self.n, dtype=complex)
        for g in range(self.n):
            out += a[T[inv[g], T[:, g]]]
        return out / self.n

    def delta_tilde(self) -> np.ndarray:
        """Isometry ``e_c -> n^-1/2 sum_a e_a x e_{a^-1 c}``."""
        n, T, inv = self.n, self.group.table, self.group.inverse
        D = np.zeros((n * n, n))
        for c in range(n):
            for a in range(n):
                D[a * n + T[inv[a], c], c] = 1 / np.sqrt(n)
        return D

    def sandwich_expectation(self, a) -> np.ndarray:
        """``Delta~* Delta^op(a) Delta~`` with ``Delta^op(a)(s, t) = a(ts)``."""
        a = self.function(a)
        Dt = self.delta_tilde()
        op = np.diag(a[self.group.table.T.reshape(-1)])
        return np.diag(Dt.T @ op @ Dt).copy()

    # -- representation ring and Dirac operator ----------------------------
    def rep_ring(self):
        if self._rep_ring is None:
            self._rep_ring = self.group.rep_ring()
        return self._rep_ring

    def irrep_lengths(self, length: LengthFunction) -> list[int]:
        ring = length.ring
        names = [r.label for r in self.irreps]
        if [ring.name(a) for a in ring.basis] != names:
            raise ModelValidationError(
                f"length is defined on a ring with labels {[ring.name(a) for a in ring.basis]}, "
                f"model irreps are {names}")
        try:
            vals = [length(ring.basis[k]) for k in range(len(names))]
        except NotGeneratedError as exc:
            raise ModelValidationError(f"length is not proper on the dual: {exc}") from exc
        zeros = [names[k] for k, v in enumerate(vals) if v == 0 and ring.basis[k] != ring.unit]
        if zeros:
            raise ModelValidationError(f"length is not proper on the dual: zero at {zeros}")
        return vals

    def dirac_L2(self, length: LengthFunction) -> np.ndarray:
        """``D`` in the delta basis; diagonal ``l(alpha)`` on ``sqrt(d) u_ij``."""
        ell = self.irrep_lengths(length)
        spec = np.array([ell[k] for k, _, _ in self.coeff_labels], dtype=float)
        return (self.Q * spec) @ self.Q.conj().T

    def dirac_spectrum(self, length: LengthFunction) -> np.ndarray:
        ell = self.irrep_lengths(length)
        return np.array([ell[k] for k, _, _ in self.coeff_labels], dtype=float)

    def lip_norm_L2(self, D, a) -> float:
        M = self.mult(a)
        return op_norm(D @ M - M @ D)


def build_model(group: FiniteGroup, irreps: list[Irrep] | None = None) -> FiniteGroupModel:
    """Validate the irreps (unitary, homomorphic, irreducible, pairwise
    inequivalent, complete) and materialize all operators."""
    irreps = list(group.irreps if irreps is None else irreps)
    if group.order > MAX_ORDER:
        raise ModelValidationError(f"group order {group.order} exceeds the model cap {MAX_ORDER}")
    for rho in irreps:
        rho.validate(group)
    chars = [rho.character() for rho in irreps]
    for i in range(len(irreps)):
        for j in range(i):
            ip = np.vdot(chars[i], chars[j]) / group.order
            if abs(ip) > 1e-8:
                raise ModelValidationError(
                    f"'inequivalence' fails: {irreps[i].label} and {irreps[j].label} share characters")
    total = sum(r.dim ** 2 for r in irreps)
    if total != group.order:
        raise ModelValidationError(
            f"'completeness' fails: sum of squared dimensions {total} != |G| = {group.order}")
    return FiniteGroupModel(group, irreps)


def bundled_model(name: str, data_dir=None) -> FiniteGroupModel:
    return build_model(load_group(name, data_dir))


# -- structural identities --------------------------------------------------

def fundamental_unitaries(model: FiniteGroupModel, tol: float = TOL_IDENTITY):
    """``(W, V, Z)`` after checking unitarity, the pentagon identity and the
    implementation identities on every matrix coefficient."""
    res = identity_residuals(model)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise ModelValidationError(f"fundamental unitary identities violated: {bad}")
    return model.W, model.V, model.Z


def identity_residuals(model: FiniteGroupModel) -> dict:
    n = model.n
    I_n, I_nn = np.eye(n), np.eye(n * n)
    out = {}
    for name, U in (("W", model.W), ("V", model.V), ("Z", model.Z)):
        out[f"unitary {name}"] = max(np.abs(U.conj().T @ U - I_nn).max(), np.abs(U @ U.conj().T - I_nn).max())
    W = model.W
    W12 = np.kron(W, I_n)
    W23 = np.kron(I_n, W)
    # W13 = Sigma_23 W12 Sigma_23
    S23 = np.kron(I_n, model.Sigma)
    W13 = S23 @ W12 @ S23
    out["pentagon"] = np.abs(W12 @ W13 @ W23 - W23 @ W12).max()
    impl_w, impl_v = 0.0, 0.0
    for k, i, j in model.coeff_labels:
        u = model.coefficient(k, i, j)
        target = model.coproduct_op(u)
        Mu = model.mult(u)
        impl_w = max(impl_w, np.abs(W.conj().T @ np.kron(I_n, Mu) @ W - target).max())
        impl_v = max(impl_v, np.abs(model.V @ np.kron(Mu, I_n) @ model.V.conj().T - target).max())
    out["implementation W"] = impl_w
    out["implementation V"] = impl_v
    return {k: float(v) for k, v in out.items()}


def coassociativity_residual(model: FiniteGroupModel) -> float:
    """``(Delta x id)Delta = (id x Delta)Delta`` on all delta functions (exact)."""
    T = model.group.table
    return float(np.abs(T[T, :] - T[:, T]).max())


def schur_residual(model: FiniteGroupModel) -> float:
    """``h(u_ij^a* u_pq^b) = delta delta delta / d_a``: the basis change is unitary."""
    Q = model.Q
    return float(np.abs(Q.conj().T @ Q - np.eye(model.n)).max())


def expectation_report(model: FiniteGroupModel, tol: float = TOL_IDENTITY) -> Report:
    """E against the conjugation average, the sandwich formula and the
    matrix-unit formula ``E(u_ij) = delta_ij chi / d`` on every coefficient."""
    rep = Report(f"conditional expectation ({model.group.name})")
    avg = sandwich = units = 0.0
    for k, i, j in model.coeff_labels:
        u = model.coefficient(k, i, j)
        E = model.cond_expectation(u)
        avg = max(avg, np.abs(E - model.conjugation_average(u)).max())
        sandwich = max(sandwich, np.abs(E - model.sandwich_expectation(u)).max())
        expected = model.character(k) / model.irreps[k].dim if i == j else np.zeros(model.n)
        units = max(units, np.abs(E - expected).max())
    rep.add("conjugation average", avg < tol, residual=float(avg))
    rep.add("sandwich formula", sandwich < tol, residual=float(sandwich))
    rep.add("matrix units", units < tol, residual=float(units))
    # idempotence and Haar invariance on delta functions
    idem = haar = 0.0
    for g in range(model.n):
        f = np.zeros(model.n)
        f[g] = 1
        E = model.cond_expectation(f)
        idem = max(idem, np.abs(model.cond_expectation(E) - E).max())
        haar = max(haar, abs(model.haar(E) - model.haar(f)))
    rep.add("idempotent", idem < tol, residual=float(idem))
    rep.add("haar invariant", haar < tol, residual=float(haar))
    # fixed points of delta on C(G) are the class functions
    n = model.n
    fixed = []
    for g in range(n):
        f = np.zeros(n)
        f[g] = 1
        fixed.append(np.diag(model.conjugation_coaction(np.diag(f))) - np.kron(np.ones(n), f))
    A = np.array(fixed).T
    dim_fixed = n - np.linalg.matrix_rank(A, tol=1e-9)
    rep.add("fixed points are class functions", dim_fixed == len(model.group.conjugacy_classes()),
            fixed_dimension=int(dim_fixed), classes=len(model.group.conjugacy_classes()))
    return rep


def random_functions(model: FiniteGroupModel, samples: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        yield rng.standard_normal(model.n) + 1j * rng.standard_normal(model.n)


def contraction_check(model: FiniteGroupModel, D, samples: int = 200, seed: int = 0,
                      tol: float = TOL_INEQUALITY) -> Report:
    """``L(E(a)) <= L(a)`` and ``[D, E(a)] = (h x id) delta([D, a])`` on random a."""
    rep = Report(f"conditional expectation contraction ({model.group.name})")
    worst_gap, worst_inter = -np.inf, 0.0
    for a in random_functions(model, samples, seed):
        Ea = model.cond_expectation(a)
        gap = model.lip_norm_L2(D, Ea) - model.lip_norm_L2(D, a)
        worst_gap = max(worst_gap, gap)
        Ma, ME = model.mult(a), model.mult(Ea)
        lhs = D @ ME - ME @ D
        rhs = model.slice_first(model.conjugation_coaction(D @ Ma - Ma @ D))
        worst_inter = max(worst_inter, np.abs(lhs - rhs).max())
    rep.add("contraction", worst_gap <= tol, samples=samples, worst_excess=float(worst_gap))
    rep.add("intertwining", worst_inter <= tol, samples=samples, residual=float(worst_inter))
    return rep


def left_invariance_check(model: FiniteGroupModel, D, phi, a, tol: float = TOL_INEQUALITY) -> Report:
    """``L((phi x id)Delta(a)) <= ||phi|| L(a)`` for ``phi = sum_s phi_s ev_s``.

    The test family is combinations of point evaluations, whose norm on
    C(G) is the total variation ``sum |phi_s|``.
    """
    phi = model.function(phi)
    a = model.function(a)
    T = model.group.table
    conv = phi @ a[T]                               # t -> sum_s phi_s a(st)
    norm_phi = float(np.abs(phi).sum())
    lhs, la = model.lip_norm_L2(D, conv), model.lip_norm_L2(D, a)
    rep = Report(f"left invariance ({model.group.name})")
    rep.add("left invariance", lhs <= norm_phi * la + tol, lhs=lhs, phi_norm=norm_phi, lip=la,
            family="point evaluations")
    return rep


@dataclass
class CentralityResult:
    by_coproduct: bool
    by_expectation: bool

    @property
    def agree(self) -> bool:
        return self.by_coproduct == self.by_expectation

    @property
    def central(self) -> bool:
        return self.by_coproduct and self.by_expectation

    def __bool__(self):
        return self.central


def centrality_check(model: FiniteGroupModel, phi, tol: float = TOL_IDENTITY) -> CentralityResult:
    """Compare ``(phi x id)Delta = (id x phi)Delta`` with ``phi o E = phi``.

    ``phi`` is a weight vector: ``phi(f) = sum_s phi_s f(s)``.
    """
    phi = model.function(phi)
    T = model.group.table
    # on delta_g: (phi x id)Delta(delta_g)(t) = sum_s phi_s [st = g], similarly on the right
    left = np.einsum("s,stg->gt", phi, np.eye(model.n)[T])
    right = np.einsum("s,tsg->gt", phi, np.eye(model.n)[T])
    by_cop = bool(np.abs(left - right).max() <= tol)
    by_E = True
    for g in range(model.n):
        f = np.zeros(model.n)
        f[g] = 1
        if abs(phi @ model.cond_expectation(f) - phi[g]) > tol:
            by_E = False
            break
    return CentralityResult(by_cop, by_E)


COMMUTING_OPERATORS = ("W", "W*", "Sigma V Sigma", "Sigma V* Sigma", "Z", "Z*")


def commutation_check(model: FiniteGroupModel, D, tol: float = TOL_INEQUALITY) -> Report:
    """``1 x D`` commutes with W, W*, Sigma V Sigma, Sigma V* Sigma, Z, Z*.

    Sigma itself is deliberately absent: swapping the legs does not commute
    with ``1 x D`` for nonabelian groups.
    """
    n = model.n
    S, V, W, Z = model.Sigma, model.V, model.W, model.Z
    ops = {"W": W, "W*": W.conj().T, "Sigma V Sigma": S @ V @ S,
           "Sigma V* Sigma": S @ V.conj().T @ S, "Z": Z, "Z*": Z.conj().T}
    oneD = np.kron(np.eye(n), D)
    rep = Report(f"commutation with 1 x D ({model.group.name})")
    for name in COMMUTING_OPERATORS:
        X = ops[name]
        r = float(np.linalg.norm(oneD @ X - X @ oneD, 2))
        rep.add(name, r < tol, residual=r)
    return rep


def cross_validate_central(model: FiniteGroupModel, length: LengthFunction, samples: int = 100,
                           seed: int = 0, tol_equal: float = 1e-9,
                           tol_ineq: float = TOL_INEQUALITY) -> Report:
    """Compare the L2 model with the fusion (representation ring) model on
    central functions.

    Checks that the characters are orthonormal in L2(G), that the compressed
    L2 commutator equals the fusion commutator for every sample, and that
    the fusion norm is bounded by the L2 norm.
    """
    ring = length.ring
    ell = model.irrep_lengths(length)
    rep = Report(f"central cross-validation ({model.group.name})")
    n, r = model.n, len(model.irreps)
    X = np.array([model.character(k) for k in range(r)]).T / np.sqrt(n)   # chi~ as columns
    gram = float(np.abs(X.conj().T @ X - np.eye(r)).max())
    rep.add("character isometry", gram < 1e-10, residual=gram)

    D = model.dirac_L2(length)
    fus = TruncatedRep(ring, length, max(ell))
    order = [ring.basis.index(a) for a in fus.basis]      # fusion window order -> irrep index
    Xw = X[:, order]
    rng = np.random.default_rng(seed)
    worst_diff = worst_norm_diff = 0.0
    worst_excess = -np.inf
    # first sample: the character of the largest irrep
    top = max(range(r), key=lambda k: (model.irreps[k].dim, k))
    for t in range(samples + 1):
        c = np.eye(r)[top] if t == 0 else rng.standard_normal(r) + 1j * rng.standard_normal(r)
        a = X @ c * np.sqrt(n)                       # sum_k c_k chi_k as a function
        x = ring.element({ring.basis[k]: c[k] for k in range(r)})
        L2c = D @ model.mult(a) - model.mult(a) @ D
        compressed = Xw.conj().T @ L2c @ Xw
        fusion_c = fus.commutator(x).toarray()
        worst_diff = max(worst_diff, float(np.abs(compressed - fusion_c).max()))
        nz, nl2 = op_norm(fusion_c), op_norm(L2c)
        worst_norm_diff = max(worst_norm_diff, abs(op_norm(compressed) - nz))
        worst_excess = max(worst_excess, nz - nl2)
        if t == 0:
            rep.data["character_sample"] = {"label": model.irreps[top].label,
                                            "fusion_norm": nz, "L2_norm": nl2}
    # samples counts the random elements; the character sample comes on top
    rep.add("commutators agree", worst_diff < tol_equal, residual=worst_diff,
            norm_residual=worst_norm_diff, samples=samples, character_sample=True)
    rep.add("fusion norm bounded by L2 norm", worst_excess <= tol_ineq,
            worst_excess=float(worst_excess), samples=samples, character_sample=True)
    return rep


def identity_report(model: FiniteGroupModel, length: LengthFunction | None = None,
                    samples: int = 200, seed: int = 0) -> Report:
    """Full identity suite for one group, as used by the CLI and acceptance tests."""
    rep = Report(f"classical model ({model.group.name})")
    for name, r in identity_residuals(model).items():
        rep.add(name, r < TOL_IDENTITY, residual=r)
    rep.add("coassociativity", coassociativity_residual(model) == 0)
    s = schur_residual(model)
    rep.add("schur orthogonality", s < TOL_IDENTITY, residual=s)
    sub = expectation_report(model)
    rep.checks.extend(sub.checks)
    if length is None:
        length = default_length(model)
    D = model.dirac_L2(length)
    rep.checks.extend(commutation_check(model, D).checks)
    rep.checks.extend(contraction_check(model, D, samples, seed).checks)
    agree = all(centrality_check(model, np.eye(model.n)[g]).agree for g in range(model.n))
    agree &= centrality_check(model, np.full(model.n, 1 / model.n)).agree
    rep.add("centrality criteria agree", agree, states=model.n + 1)
    return rep


def default_length(model: FiniteGroupModel) -> LengthFunction:
    """Word length generated by all nontrivial irreps of maximal dimension and
    their conjugates (enough to generate the dual of every bundled group)."""
    from ..length import word_length

    ring = model.rep_ring()
    nontrivial = [a for a in ring.basis if a != ring.unit]
    dmax = max(ring.dim(a) for a in nontrivial) if nontrivial else 1
    gens = [a for a in nontrivial if ring.dim(a) == dmax]
    gens = sorted(set(gens) | {ring.conj(a) for a in gens})
    return word_length(ring, gens)
