"""Central states on the fusion side, Følner multipliers and Berezin maps.

A central state is stored by its values ``s(a) = phi(chi(a))`` on characters.
States built from a multiplier ``w`` (counit, Haar, Følner) satisfy
``s(a) = d_a w(a)`` and act on characters as ``chi(a) -> w(a) chi(a)``.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from fractions import Fraction

import numpy as np

from .fusion_ring import FusionElement, FusionRing, Label
from .length import LengthFunction
from .reports import Report


class CentralState:
    """Central functional given by its weights on basis labels.

    ``weights`` is a callable or a finite mapping (labels absent from the
    mapping get weight 0). ``multiplier`` is the optional coefficientwise
    Berezin multiplier with ``weights(a) == dim(a) * multiplier(a)``.
    """

    def __init__(self, ring: FusionRing, weights, name: str = "state",
                 multiplier: Callable[[Label], float] | Mapping | None = None):
        self.ring = ring
        self.name = name
        if isinstance(weights, Mapping):
            table = {ring.label(k): v for k, v in weights.items()}
            self._weight = lambda a: table.get(a, 0)
            self.support = ring.sorted(table)
        else:
            self._weight = weights
            self.support = None
        if isinstance(multiplier, Mapping):
            mtable = dict(multiplier)
            self._multiplier = lambda a: mtable.get(a, 0)
        else:
            self._multiplier = multiplier

    def __repr__(self):
        return f"CentralState({self.name!r}, ring={self.ring.name_})"

    def weight(self, label) -> complex:
        return complex(self._weight(label))

    def exact_weight(self, label):
        return self._weight(label)

    def __call__(self, x: FusionElement) -> complex:
        """Value ``phi(chi(x)) = sum_a c_a s(a)``."""
        return sum((c * self.weight(a) for a, c in x.coeffs.items()), 0j)

    @property
    def has_multiplier(self) -> bool:
        return self._multiplier is not None

    def multiplier(self, label):
        if self._multiplier is None:
            raise ValueError(f"state {self.name!r} carries no Berezin multiplier")
        return self._multiplier(label)

    def check(self, window: Iterable, tol: float = 1e-12) -> Report:
        """Unitality, self-adjointness and ``|s(a)| <= d_a`` on a window."""
        ring = self.ring
        rep = Report(f"state invariants ({self.name})")
        rep.add("unital", abs(self.weight(ring.unit) - 1) <= tol, value=self.weight(ring.unit))
        window = list(window)
        bad = [ring.name(a) for a in window
               if abs(self.weight(ring.conj(a)) - self.weight(a).conjugate()) > tol]
        rep.add("self-adjoint", not bad, witnesses=bad[:10])
        bad = [ring.name(a) for a in window if abs(self.weight(a)) > ring.dim(a) + tol]
        rep.add("bounded by dimension", not bad, witnesses=bad[:10])
        return rep

    def to_dict(self, window: Iterable) -> dict:
        return {"name": self.name,
                "weights": {self.ring.name(a): self.weight(a) for a in window}}


def counit_state(ring: FusionRing) -> CentralState:
    return CentralState(ring, ring.dim, name="counit", multiplier=lambda a: 1)


def haar_state(ring: FusionRing) -> CentralState:
    e = ring.unit
    delta = (lambda a: 1 if a == e else 0)
    return CentralState(ring, delta, name="haar", multiplier=delta)


def foelner_multiplier(ring: FusionRing, length: LengthFunction, n: int) -> dict:
    """Exact ``w_n(g) = sum_{a,b in F_n} N_{a,conj b}^g d_a d_b / (d_g sum_{x in F_n} d_x^2)``
    with ``F_n = ball(l, n)``. Labels outside the returned mapping have weight 0."""
    F = length.ball(n)
    dims = {a: ring.dim(a) for a in F}
    total = sum(d * d for d in dims.values())
    num: dict = {}
    for a in F:
        for b in F:
            w = dims[a] * dims[b]
            for g, N in ring.fuse(a, ring.conj(b)).items():
                num[g] = num.get(g, 0) + N * w
    return {g: Fraction(v, ring.dim(g) * total) for g, v in
            sorted(num.items(), key=lambda kv: ring.order_key(kv[0]))}


def foelner_weights(ring: FusionRing, length: LengthFunction, n: int):
    """Følner multiplier as floats plus the associated central state."""
    omega = foelner_multiplier(ring, length, n)
    state = CentralState(
        ring, {a: ring.dim(a) * w for a, w in omega.items()}, name=f"foelner{n}",
        multiplier=omega,
    )
    state.foelner_set = [ring.name(a) for a in length.ball(n)]
    return {a: float(w) for a, w in omega.items()}, state


def gram_matrix(state: CentralState, window: Iterable) -> np.ndarray:
    """``G[a, b] = phi(chi(a)* chi(b)) = sum_g N_{conj a, b}^g s(g)``."""
    ring = state.ring
    window = list(window)
    G = np.zeros((len(window), len(window)), dtype=complex)
    for i, a in enumerate(window):
        ac = ring.conj(a)
        for j, b in enumerate(window):
            G[i, j] = sum(N * state.weight(g) for g, N in ring.fuse(ac, b).items())
    return G


def positivity_check(state: CentralState, window, length: LengthFunction | None = None,
                     tol: float = 1e-9) -> Report:
    """Positive semidefiniteness of the character Gram matrix on a window.

    ``window`` is a list of labels or a radius (then ``length`` is required).
    """
    if isinstance(window, int):
        if length is None:
            raise ValueError("a radius window needs a length function")
        labels = length.ball(window)
    else:
        labels = [state.ring.label(a) for a in window]
    G = gram_matrix(state, labels)
    herm = float(np.abs(G - G.conj().T).max()) if G.size else 0.0
    lam = float(np.linalg.eigvalsh((G + G.conj().T) / 2).min()) if G.size else 0.0
    rep = Report(f"positivity ({state.name})")
    rep.add("gram positive semidefinite", lam >= -tol, min_eigenvalue=lam,
            hermitian_residual=herm, size=len(labels))
    return rep


def berezin_apply(state: CentralState, x: FusionElement) -> FusionElement:
    """Coefficientwise multiplier ``c_a -> w(a) c_a``."""
    return FusionElement(x.ring, {a: c * float(state.multiplier(a)) for a, c in x.coeffs.items()})
