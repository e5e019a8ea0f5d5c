"""Monge–Kantorovich distances between central states on truncated windows,
and the Berezin-defect and finite-diameter diagnostics built on them.

The truncated distance at radius ``R`` is

    d_R(phi, psi) = sup { |phi(a) - psi(a)| : a = a* supported in ball(R),
                          ||P_R [D, pi(a)] P_R|| <= 1 }

where ``P_R`` projects onto ``ball(R)``. Enlarging ``R`` enlarges the
constraint norm faster than the chart, and in practice ``d_R`` decreases
with ``R``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError
from .fusion_ring import FusionElement
from .gns import TruncatedRep, as_element, lip_norm_bounds
from .length import LengthFunction
from .linalg import op_norm
from .reports import Report
from .states import CentralState, berezin_apply, counit_state, haar_state

NORM_VARIANT = "compression to ball(R)"


class MKProblem:
    """Dual-norm problem ``max <g, c> s.t. ||M(c)|| <= 1`` on a real chart.

    Chart coordinates: one real coefficient per self-conjugate label
    ``a`` (element ``a``) and two per conjugate pair ``(a, conj a)``
    (elements ``a + conj a`` and ``i(a - conj a)``). The unit is excluded.
    """

    def __init__(self, phi: CentralState, psi: CentralState, length: LengthFunction, R: int,
                 rep: TruncatedRep | None = None):
        if phi.ring is not psi.ring or length.ring is not phi.ring:
            raise ValueError("states and length must share one ring")
        self.phi, self.psi, self.length, self.R = phi, psi, length, R
        ring = self.ring = phi.ring
        self.rep = rep if rep is not None and rep.R == R else TruncatedRep(ring, length, R)
        self.chart: list[FusionElement] = []
        self.chart_labels: list[tuple] = []
        done = set()
        for a in self.rep.basis:
            if a == ring.unit or a in done:
                continue
            b = ring.conj(a)
            if b == a:
                self.chart.append(ring.element({a: 1}))
                self.chart_labels.append((ring.name(a), "re"))
            else:
                self.chart.append(ring.element({a: 1, b: 1}))
                self.chart.append(ring.element({a: 1j, b: -1j}))
                self.chart_labels += [(ring.name(a), "re"), (ring.name(a), "im")]
                done.add(b)
            done.add(a)
        self.g = np.array([(phi(x) - psi(x)).real for x in self.chart])
        self.K = np.array([self.rep.commutator(x).toarray() for x in self.chart]) \
            if self.chart else np.zeros((0, self.rep.dim, self.rep.dim), dtype=complex)

    @property
    def dim(self) -> int:
        return len(self.chart)

    def M(self, c) -> np.ndarray:
        return np.tensordot(np.asarray(c, dtype=float), self.K, axes=1)

    def constraint_norm(self, c) -> float:
        return op_norm(self.M(c))

    def element(self, c) -> FusionElement:
        out = self.ring.zero()
        for cj, x in zip(c, self.chart):
            if cj:
                out = out + x * float(cj)
        return out

    def kernel(self, tol: float = 1e-10) -> np.ndarray:
        """Chart directions with ``M(c) = 0`` (columns of the returned array)."""
        if not self.dim:
            return np.zeros((0, 0))
        A = self.K.reshape(self.dim, -1).T
        A = np.vstack([A.real, A.imag])
        _, s, vt = np.linalg.svd(A, full_matrices=True)
        rank = int((s > tol * max(s.max(), 1.0)).sum())
        return vt[rank:].T


@dataclass
class MKResult:
    value: float
    optimizer: FusionElement | None
    status: str
    method: str
    bound: float | None = None
    R: int = 0
    chart_dim: int = 0
    norm_variant: str = NORM_VARIANT
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        opt = None
        if self.optimizer is not None:
            ring = self.optimizer.ring
            opt = {ring.name(a): c for a, c in self.optimizer.items()}
        return {"value": self.value, "bound": self.bound, "status": self.status,
                "method": self.method, "R": self.R, "chart_dim": self.chart_dim,
                "norm_variant": self.norm_variant, "optimizer": opt, **self.detail}


def _canonical_sign(g: np.ndarray) -> float:
    # d(phi, psi) and d(psi, phi) solve the same problem up to c -> -c
    nz = np.flatnonzero(np.abs(g) > 0)
    return -1.0 if len(nz) and g[nz[0]] < 0 else 1.0


def mk_distance(problem: MKProblem, tol: float = 1e-9, method: str = "sdp",
                gap_tol: float = 1e-6, **kw) -> MKResult:
    """Truncated Monge–Kantorovich distance.

    ``method="sdp"`` solves the semidefinite program with cvxpy/Clarabel and
    reports the solver's dual bound next to the rescaled primal value; the
    status is ``"optimal"`` when the two agree within ``gap_tol``.
    ``method="supergradient"`` runs multi-start projected supergradient
    ascent on ``<g, c> / ||M(c)||``.
    """
    p = problem
    base = dict(R=p.R, chart_dim=p.dim)
    if p.dim == 0 or not np.any(np.abs(p.g) > 0):
        return MKResult(0.0, p.ring.zero(), "optimal", method, 0.0, **base)
    ker = p.kernel()
    if ker.size and np.abs(p.g @ ker).max() > 1e-12:
        j = int(np.argmax(np.abs(p.g @ ker)))
        return MKResult(float("inf"), p.element(ker[:, j]), "unbounded_direction", method, None, **base)
    sign = _canonical_sign(p.g)
    g = sign * p.g
    if method == "sdp":
        c, bound, status = _solve_sdp(p, g, tol, **kw)
    elif method == "supergradient":
        c, bound, status = _solve_supergradient(p, g, tol, **kw)
    else:
        raise ValueError(f"unknown method {method!r}")
    nrm = p.constraint_norm(c)
    if nrm <= 0:
        return MKResult(0.0, p.ring.zero(), status, method, bound, **base)
    c = c / nrm
    value = float(g @ c)
    if value < 0:
        value, c = -value, -c
    detail = {"solver_status": status}
    if bound is not None:
        gap = abs(bound - value)
        detail["gap"] = gap
        ok = status in ("optimal", "optimal_inaccurate") and gap <= gap_tol * max(1.0, value)
        status = "optimal" if ok else f"inaccurate ({status})"
    return MKResult(value, p.element(sign * c), status, method, bound, detail=detail, **base)


def _embed(H):
    """Real symmetric embedding of a complex Hermitian matrix expression."""
    import cvxpy as cp

    return cp.bmat([[cp.real(H), -cp.imag(H)], [cp.imag(H), cp.real(H)]])


def _solve_sdp(p: MKProblem, g, tol, solver: str = "CLARABEL"):
    import cvxpy as cp

    n = p.rep.dim
    c = cp.Variable(p.dim)
    # M(c) is skew-adjoint, so H = iM(c) is Hermitian and ||M|| <= 1 iff -I <= H <= I
    H_re = [(-p.K[j].imag) for j in range(p.dim)]
    H_im = [p.K[j].real for j in range(p.dim)]
    A = sum(c[j] * H_re[j] for j in range(p.dim))
    B = sum(c[j] * H_im[j] for j in range(p.dim))
    E = cp.bmat([[A, -B], [B, A]])
    E = (E + E.T) / 2
    I = np.eye(2 * n)
    prob = cp.Problem(cp.Maximize(g @ c), [I - E >> 0, I + E >> 0])
    try:
        with warnings.catch_warnings():
            # accuracy is judged below from the primal/dual gap instead
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver=solver)
    except cp.error.SolverError as exc:
        raise ConvergenceError(f"SDP solver failed: {exc}") from exc
    if c.value is None:
        raise ConvergenceError(f"SDP solver returned status {prob.status}")
    return np.asarray(c.value, dtype=float), float(prob.value), prob.status


def _top_singular(M):
    u, s, vh = np.linalg.svd(M)
    return s[0], u[:, 0], vh[0].conj()


def _solve_supergradient(p: MKProblem, g, tol, starts: int = 16, patience: int = 500,
                         maxiter: int = 20_000, step0: float = 0.5):
    """Multi-start ascent of the homogeneous ratio on the constraint sphere."""
    best_c, best = None, -np.inf
    gn = np.linalg.norm(g)
    for s in range(starts):
        rng = np.random.default_rng(s)
        c = g / gn if s == 0 else rng.standard_normal(p.dim)
        c = c / p.constraint_norm(c)
        local_best, local_c, stale = g @ c, c, 0
        for t in range(1, maxiter + 1):
            nrm, u, v = _top_singular(p.M(c))
            grad_norm = np.array([np.real(u.conj() @ K @ v) for K in p.K])
            val = g @ c / nrm
            grad = g / nrm - val * grad_norm / nrm
            c = c + step0 / np.sqrt(t) * grad / max(np.linalg.norm(grad), 1e-300)
            c = c / p.constraint_norm(c)
            cur = g @ c
            if cur > local_best + tol:
                local_best, local_c, stale = cur, c, 0
            else:
                stale += 1
                if cur > local_best:
                    local_best, local_c = cur, c
            if stale >= patience:
                break
        if local_best > best:
            best, best_c = local_best, local_c
    return best_c, None, "optimal" if best_c is not None else "not_converged"


def mk_distance_states(phi: CentralState, psi: CentralState, length: LengthFunction, R: int,
                       **kw) -> MKResult:
    return mk_distance(MKProblem(phi, psi, length, R), **kw)


# -- diagnostics ------------------------------------------------------------

def norm_bounds(rep: TruncatedRep, x, k: int | None = None) -> tuple[float, float]:
    """Lower (compression to ball(R - k)) and band-sum upper bound for ||pi(x)||."""
    x = as_element(rep.ring, x)
    if not x.coeffs:
        return 0.0, 0.0
    k = rep.support_length(x) if k is None else k
    sub = rep.indices_upto(rep.R - k)
    lower = op_norm(rep.pi_matrix(x).compress(sub)) if len(sub) else 0.0
    # ||pi(x)|| <= sum_a |c_a| ||pi(a)|| and ||pi(a)|| <= d_a
    upper = float(sum(abs(c) * rep.ring.dim(a) for a, c in x.coeffs.items()))
    return float(lower), upper


def berezin_defect_check(rep: TruncatedRep, state: CentralState, x, tol: float = 1e-6,
                         distance: float | None = None, lip_rep: TruncatedRep | None = None) -> Report:
    """``||pi(x - beta(x))|| <= d_R(counit, state) * Lip(x)`` with the left side
    bounded below by a compression and Lip bounded above by the band sum."""
    x = as_element(rep.ring, x)
    if distance is None:
        distance = mk_distance(MKProblem(counit_state(rep.ring), state, rep.length, rep.R)).value
    y = x - berezin_apply(state, x)
    lhs_lower, lhs_upper = norm_bounds(rep, y, rep.support_length(x))
    lip = lip_norm_bounds(lip_rep or rep, x) if x.coeffs else None
    lip_upper = lip.upper if lip else 0.0
    rhs = distance * lip_upper
    report = Report(f"berezin defect ({state.name})")
    report.add("defect bound", lhs_lower <= rhs + tol, lhs_lower=lhs_lower, lhs_upper=lhs_upper,
               distance=distance, lip_upper=lip_upper, rhs=rhs)
    return report


def diameter_estimate(rep: TruncatedRep, samples: int = 100, seed: int = 0, tol: float = 1e-8,
                      report: Report | None = None) -> float:
    """``d_R(counit, haar)``, spot-checked against ``||pi(x - tau(x))|| <= d Lip(x)``
    on random elements of the window. Lip bounds and the left-hand norm use an
    auxiliary window of radius ``3R``."""
    ring = rep.ring
    d = mk_distance(MKProblem(counit_state(ring), haar_state(ring), rep.length, rep.R)).value
    aux = TruncatedRep(ring, rep.length, 3 * rep.R)
    rng = np.random.default_rng(seed)
    worst, ok = -np.inf, True
    for _ in range(samples):
        c = rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)
        x = ring.element(dict(zip(rep.basis, c)))
        y = x - x.trace() * ring.one()
        lhs, _ = norm_bounds(aux, y, rep.R)
        rhs = d * lip_norm_bounds(aux, x, margin=2 * rep.R).upper
        worst = max(worst, lhs - rhs)
        ok &= lhs <= rhs + tol
    if report is not None:
        report.add("finite diameter spot check", ok, diameter=d, samples=samples,
                   worst_excess=worst if samples else None)
        report.data["diameter"] = d
    return d
