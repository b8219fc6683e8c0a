"""Stochastic stability certification for the buffered anytime schemes.

The certification matrix is ``T = Phi @ Pi`` where ``Phi`` is the diagonal
of per-state Lyapunov gain bounds and ``Pi`` the buffer-chain transition
matrix.  ``T`` Schur stable (Perron root < 1) certifies a geometric bound
``E{V(x_k)} <= C1 * xi**k * E{V(x_0)} + C2`` on the expected Lyapunov value.

Alongside the spectral-radius test, two closed-form scalar indices are
provided: ``psi_a2`` for the two-law buffered scheme (eta >= 2) and
``omega_a1`` for the one-law scheme (eta = 1).  Each index is < 1 exactly
when the corresponding certification matrix is Schur stable (given
contractions < 1), and both are linear in the open-loop bound alpha, which
yields the critical alpha in closed form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chain import BufferChain, transition_matrix

#: Margin used by Schur verdicts: certified iff spectral radius < 1 - SCHUR_TOL.
SCHUR_TOL = 1e-9

#: Convergence tolerance and iteration cap of the power iteration.
POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000

CERTIFIED = "CertifiedStable"
NOT_CERTIFIED = "NotCertified"


@dataclass(frozen=True)
class ContractionSpec:
    """Per-mode Lyapunov growth/contraction bounds of a scheme.

    ``alpha`` bounds open-loop growth (empty buffer), ``rho1`` the coarse
    law, ``rho2`` the fine law.  ``sigma_open`` bounds growth in the
    deterministic (untriggered) mode and defaults to ``alpha`` since that
    mode applies zero input.  ``d_bound`` is the Lyapunov ceiling inside the
    trigger region.  The lower Lyapunov envelope plays no computational role
    and is not carried here.
    """

    alpha: float
    rho1: float
    rho2: float
    eta: int
    sigma_open: float | None = None
    d_bound: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "rho1", "rho2", "d_bound"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.eta < 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if self.rho2 > self.rho1:
            raise ValueError(
                f"fine law must contract at least as fast as coarse: "
                f"rho2={self.rho2} > rho1={self.rho1}"
            )
        if self.rho2 == self.rho1 and self.eta > 1:
            warnings.warn("rho2 == rho1: fine law is no better than coarse", stacklevel=2)
        if self.sigma_open is None:
            object.__setattr__(self, "sigma_open", self.alpha)


@dataclass(frozen=True, eq=False)
class CertificationReport:
    """Outcome of certifying one scheme configuration.

    ``closed_form`` is the scalar index (psi or omega) and is only present
    when both contractions are < 1.  ``zeta``, ``xi``, ``c1``, ``c2`` are
    present only when the certification matrix is Schur stable.
    """

    phi: np.ndarray
    t_matrix: np.ndarray
    spectral_radius: float
    closed_form: float | None
    zeta: np.ndarray | None
    xi: float | None
    c1: float | None
    c2: float | None
    verdict: str

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED


def gain_diagonal(spec: ContractionSpec, n_max: int) -> np.ndarray:
    """Diagonal of Phi: alpha for the empty buffer, rho1 for the coarse-only
    states 2..eta, rho2 for every state holding a fine entry."""
    if spec.eta > n_max:
        raise ValueError(f"eta={spec.eta} exceeds n_max={n_max}")
    phi = np.empty(n_max + 1)
    phi[0] = spec.alpha
    phi[1:spec.eta] = spec.rho1
    phi[spec.eta:] = spec.rho2
    return phi


def certification_matrix(phi, chain: BufferChain | np.ndarray) -> np.ndarray:
    """Row-scale the transition matrix by the gain diagonal: T = diag(phi) Pi."""
    phi = np.asarray(phi, dtype=float)
    pi = chain.pi if isinstance(chain, BufferChain) else np.asarray(chain, dtype=float)
    if phi.ndim != 1 or pi.shape != (phi.size, phi.size):
        raise ValueError(f"dimension mismatch: phi {phi.shape}, pi {pi.shape}")
    return phi[:, None] * pi


def _gelfand_radius(m: np.ndarray, tol: float) -> float:
    # ||A^(2^j)||^(1/2^j) with norm scaling; nonincreasing in j for the
    # inf-norm, used when plain power iteration fails to settle.
    b = np.array(m, dtype=float)
    log_scale = 0.0
    k = 1
    prev = math.inf
    for _ in range(60):
        nb = np.linalg.norm(b, ord=np.inf)
        if nb == 0.0:
            return 0.0
        est = math.exp((log_scale + math.log(nb)) / k)
        if abs(est - prev) < tol:
            return est
        prev = est
        b = (b / nb) @ (b / nb)
        log_scale = 2.0 * (log_scale + math.log(nb))
        k *= 2
    return prev


def spectral_radius(m, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER) -> float:
    """Perron root of a nonnegative square matrix.

    Power iteration from the all-ones vector; the estimate is the inf-norm
    growth factor per step.  If successive estimates fail to settle within
    ``tol`` after ``max_iter`` iterations (reducible or periodic matrices),
    falls back to the Gelfand limit ``||m**k||**(1/k)`` along doublings of k.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if np.any(m < 0.0):
        raise ValueError("matrix must be entry-wise nonnegative")
    n = m.shape[0]
    v = np.ones(n)
    prev = math.inf
    for _ in range(max_iter):
        w = m @ v
        est = w.max()
        if est == 0.0:
            return 0.0
        if abs(est - prev) < tol:
            return est
        prev = est
        v = w / est
    return _gelfand_radius(m, tol)


def is_schur(m, tol: float = SCHUR_TOL) -> bool:
    """True when the Perron root is strictly below ``1 - tol``."""
    return spectral_radius(m) < 1.0 - tol


def solve_certificate(t, nu) -> np.ndarray:
    """Solve ``(I - T) zeta = nu`` for the positive certificate vector.

    ``T`` must be Schur stable and ``nu`` strictly positive; the solution is
    then strictly positive, which is asserted.
    """
    t = np.asarray(t, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0.0):
        raise ValueError("nu must be strictly positive")
    radius = spectral_radius(t)
    if not radius < 1.0 - SCHUR_TOL:
        raise ValueError(f"certification matrix is not Schur stable: spectral radius {radius}")
    zeta = np.linalg.solve(np.eye(t.shape[0]) - t, nu)
    if np.any(zeta <= 0.0):  # cannot happen for nonnegative Schur T
        raise ArithmeticError("certificate solve produced a non-positive entry")
    return zeta


def theorem1_bounds(zeta, nu, sigma_open: float, d_bound: float) -> tuple[float, float, float]:
    """Geometric decay rate and offsets of the expected-Lyapunov bound.

    Returns ``(xi, c1, c2)`` with ``xi = 1 - min(nu)/max(zeta)``,
    ``c1 = max(zeta)/min(zeta)`` and the matching additive offset ``c2``.
    """
    zeta = np.asarray(zeta, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if np.any(zeta <= 0.0) or np.any(nu <= 0.0):
        raise ValueError("zeta and nu must be strictly positive")
    z_min, z_max = zeta.min(), zeta.max()
    xi = 1.0 - nu.min() / z_max
    if not (0.0 <= xi < 1.0):
        raise ValueError(f"inconsistent certificate: xi={xi} outside [0, 1)")
    c1 = z_max / z_min
    d_bar = max(z_min * d_bound, abs(z_max * sigma_open - xi * z_min) * d_bound)
    c2 = d_bar / (z_min * (1.0 - xi))
    return xi, c1, c2


def block_schur_g1(h, tol: float = SCHUR_TOL) -> tuple[float, bool]:
    """Schur test via the scalar Schur complement at the (1,1) entry.

    Splits ``h`` into a 1x1 top-left block ``X``, row ``Y``, column ``Z``
    and trailing block ``M``; requires ``M`` nonnegative with inf-norm < 1
    and ``trace(M @ M) < 1``.  Returns ``(g1, verdict)`` where
    ``g1 = (1 - X) - Y (I - M)^{-1} Z`` and the verdict ``g1 > tol`` holds
    exactly when ``h`` is Schur stable.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
        raise ValueError(f"h must be square of size >= 2, got shape {h.shape}")
    x = h[0, 0]
    y = h[0, 1:]
    z = h[1:, 0]
    m = h[1:, 1:]
    if np.any(m < 0.0):
        raise ValueError("trailing block must be nonnegative")
    if not np.linalg.norm(m, ord=np.inf) < 1.0:
        raise ValueError("trailing block must have inf-norm < 1")
    if not np.trace(m @ m) < 1.0:
        raise ValueError("trailing block must satisfy trace(M @ M) < 1")
    g1 = (1.0 - x) - y @ np.linalg.solve(np.eye(m.shape[0]) - m, z)
    return g1, g1 > tol


def _closed_form_index(t: np.ndarray) -> float:
    # Schur complement of T at its first row/column; < 1 iff T is Schur
    # stable whenever the trailing block is a strict contraction.
    x = t[0, 0]
    y = t[0, 1:]
    z = t[1:, 0]
    m = t[1:, 1:]
    return x + y @ np.linalg.solve(np.eye(m.shape[0]) - m, z)


def psi_a2(spec: ContractionSpec, l, n_max: int) -> float:
    """Closed-form stability index of the two-law buffered scheme.

    Requires ``2 <= eta <= n_max`` and both contractions < 1.  Linear in
    ``spec.alpha``; < 1 exactly when the certification matrix is Schur
    stable.
    """
    if spec.eta < 2:
        raise ValueError("psi_a2 requires eta >= 2; use omega_a1 for the one-law scheme")
    if spec.eta > n_max:
        raise ValueError(f"eta={spec.eta} exceeds n_max={n_max}")
    if not (spec.rho1 < 1.0 and spec.rho2 < 1.0):
        raise ValueError("closed form requires rho1 < 1 and rho2 < 1; use spectral_radius instead")
    chain = transition_matrix(l, spec.eta)
    if chain.n_max != n_max:
        raise ValueError(f"l has length {chain.n_max + 1}, expected n_max + 1 = {n_max + 1}")
    t = certification_matrix(gain_diagonal(spec, n_max), chain)
    return _closed_form_index(t)


def omega_a1(alpha: float, rho1: float, l, n_max: int) -> float:
    """Closed-form stability index of the one-law buffered scheme.

    Requires ``rho1 < 1``.  Linear in ``alpha``; < 1 exactly when the
    one-law certification matrix is Schur stable.
    """
    if not rho1 < 1.0:
        raise ValueError("closed form requires rho1 < 1; use spectral_radius instead")
    chain = transition_matrix(l, eta=1)
    if chain.n_max != n_max:
        raise ValueError(f"l has length {chain.n_max + 1}, expected n_max + 1 = {n_max + 1}")
    phi = np.full(n_max + 1, rho1)
    phi[0] = alpha
    t = certification_matrix(phi, chain)
    return _closed_form_index(t)


class CriticalAlpha(NamedTuple):
    """Boundary open-loop bound computed by both exposed methods."""

    closed: float
    bisection: float

    @property
    def discrepancy(self) -> float:
        return abs(self.closed - self.bisection)


def _t_of_alpha(scheme, eta, rho1, rho2, l, n_max, alpha):
    spec = ContractionSpec(alpha=alpha, rho1=rho1, rho2=rho2, eta=eta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phi = gain_diagonal(spec, n_max)
    return certification_matrix(phi, transition_matrix(l, eta))


def critical_alpha(
    scheme: str,
    eta: int,
    rho1: float,
    rho2: float,
    l,
    n_max: int,
    bisect_tol: float = 1e-9,
) -> CriticalAlpha:
    """Open-loop bound at which the stability certificate crosses 1.

    Closed-form method: the index is linear in alpha, so the boundary is
    ``1 / index(alpha=1)``.  Bisection method: the Perron root of T(alpha)
    is nondecreasing in alpha; bisect the root-equals-one crossing over a
    bracket grown by doubling from alpha = 1.
    """
    if scheme == "A1":
        eta, rho2 = 1, rho1
    elif scheme != "A2":
        raise ValueError(f"unknown buffered scheme {scheme!r}")
    if not (rho1 < 1.0 and rho2 < 1.0):
        raise ValueError("critical_alpha requires rho1 < 1 and rho2 < 1")

    if eta == 1:
        index_at_one = omega_a1(1.0, rho2, l, n_max)
    else:
        spec = ContractionSpec(alpha=1.0, rho1=rho1, rho2=rho2, eta=eta)
        index_at_one = psi_a2(spec, l, n_max)
    closed = 1.0 / index_at_one

    lo, hi = 0.0, 1.0
    for _ in range(64):
        if spectral_radius(_t_of_alpha(scheme, eta, rho1, rho2, l, n_max, hi)) >= 1.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ArithmeticError("bisection bracket failure: spectral radius stayed below 1")
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if spectral_radius(_t_of_alpha(scheme, eta, rho1, rho2, l, n_max, mid)) < 1.0:
            lo = mid
        else:
            hi = mid
    return CriticalAlpha(closed=closed, bisection=0.5 * (lo + hi))


def certify(spec: ContractionSpec, l, nu=None) -> CertificationReport:
    """Run the full certification pipeline for one configuration.

    Builds the buffer chain from ``l`` and the gain diagonal from ``spec``,
    computes the Perron root of ``T`` and, where defined, the closed-form
    index and the geometric-bound constants for ``nu`` (default all-ones).
    """
    chain = transition_matrix(l, spec.eta)
    n_max = chain.n_max
    phi = gain_diagonal(spec, n_max)
    t = certification_matrix(phi, chain)
    radius = spectral_radius(t)

    closed_form = None
    if spec.rho1 < 1.0 and spec.rho2 < 1.0:
        if spec.eta == 1:
            closed_form = omega_a1(spec.alpha, spec.rho2, l, n_max)
        else:
            closed_form = psi_a2(spec, l, n_max)

    zeta = xi = c1 = c2 = None
    verdict = NOT_CERTIFIED
    if radius < 1.0 - SCHUR_TOL:
        verdict = CERTIFIED
        if nu is None:
            nu = np.ones(n_max + 1)
        nu = np.asarray(nu, dtype=float)
        zeta = solve_certificate(t, nu)
        xi, c1, c2 = theorem1_bounds(zeta, nu, spec.sigma_open, spec.d_bound)
    return CertificationReport(
        phi=phi,
        t_matrix=t,
        spectral_radius=radius,
        closed_form=closed_form,
        zeta=zeta,
        xi=xi,
        c1=c1,
        c2=c2,
        verdict=verdict,
    )
