"""Channel and processor-availability statistics.

The sensor transmits only on trigger; a transmission succeeds with
probability ``q``.  Given a successful transmission, the processor grants
``j`` processing units with probability ``p[j]``.  Folding the dropout into
the no-computation event gives the effective availability pmf ``l``:

    l[0] = p[0]*q + (1 - q)        (no new computation this step)
    l[j] = p[j]*q,  j >= 1         (j units granted)

``l`` drives the buffer-content Markov chain.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: Tolerance for validating that a probability vector sums to one.  Vectors
#: outside this tolerance are rejected, never silently renormalised.
PMF_SUM_TOL = 1e-9


def _as_prob_vector(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains non-finite entries")
    return p


def effective_availability(q: float, p) -> np.ndarray:
    """Fold dropout probability into the processor pmf.

    Parameters
    ----------
    q : float
        Probability of successful transmission given a trigger, in [0, 1].
    p : array_like
        Processor-availability pmf ``p[0..n_max]``; must sum to one.

    Returns
    -------
    numpy.ndarray
        Effective pmf ``l`` of the same length, summing to one.
    """
    if not (0.0 <= q <= 1.0):
        raise ValueError(f"q must be in [0, 1], got {q}")
    p = _as_prob_vector(p, "p")
    if np.any(p < 0.0) or np.any(p >= 1.0):
        raise ValueError("p entries must lie in [0, 1)")
    total = p.sum()
    if abs(total - 1.0) > PMF_SUM_TOL:
        raise ValueError(f"p must sum to 1 within {PMF_SUM_TOL}, got sum {total!r}")
    l = q * p
    l[0] += 1.0 - q
    return l


@dataclass(frozen=True)
class ChannelModel:
    """Dropout probability, processor pmf and derived effective pmf.

    ``l`` is computed from ``q`` and ``p`` on construction and should not be
    supplied by the caller.
    """

    q: float
    p: np.ndarray
    l: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = _as_prob_vector(self.p, "p")
        l = effective_availability(self.q, p)
        p.flags.writeable = False
        l.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "l", l)

    @property
    def n_max(self) -> int:
        """Largest number of processing units the processor can grant."""
        return self.p.size - 1
