"""Golden-section controller that self-adapts the cone angle online.

The controller watches the per-generation knee front. While the angle is
still 90 degrees it waits for a trigger (front outgrowing the elite count, or
the hypervolume stalling), then starts a golden-section search over
[90, 180]: two probe angles are each run for one generation, scored with the
online hypervolume-distribution product, and the bracket is narrowed by 1/phi
per completed probe pair. Once the bracket is narrower than the tolerance the
angle freezes at the bracket midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

PHI = (math.sqrt(5.0) + 1.0) / 2.0

#: Hypervolume improvement below which the search is triggered at theta = 90.
HV_IMPROVEMENT_EPS = 1e-5

#: Default bracket-width tolerance, in degrees, at which the angle freezes.
DEFAULT_TOLERANCE_DEG = 1.0


@dataclass(frozen=True)
class GoldenSectionState:
    """Bracket, probes, phase flags, and running score extremes of the search."""

    theta: float = 90.0
    theta_a: float = 90.0
    theta_b: float = 180.0
    theta_c: float = 90.0
    theta_d: float = 180.0
    hdist_c: Optional[float] = None
    hdist_d: Optional[float] = None
    testing_c: bool = False
    active: bool = False
    frozen: bool = False
    min_hyp: float = math.inf
    max_hyp: float = -math.inf
    min_pof: int = 2**31
    max_pof: int = 0

    @property
    def bracket_width(self) -> float:
        return self.theta_b - self.theta_a


def record_extremes(st: GoldenSectionState, hyp: float, front_size: int) -> GoldenSectionState:
    """Fold the current generation's hypervolume and front size into the extremes."""
    return replace(
        st,
        min_hyp=min(st.min_hyp, hyp),
        max_hyp=max(st.max_hyp, hyp),
        min_pof=min(st.min_pof, front_size),
        max_pof=max(st.max_pof, front_size),
    )


def online_hdist(hyp: float, front_size: int, st: GoldenSectionState) -> float:
    """Product of normalized hypervolume and normalized front-size complement.

    Each factor is clamped to [0, 1]; a degenerate factor (max == min) counts
    as 1 so early generations with flat extremes still compare meaningfully.
    """
    if st.max_hyp > st.min_hyp:
        hv_factor = (hyp - st.min_hyp) / (st.max_hyp - st.min_hyp)
    else:
        hv_factor = 1.0
    if st.max_pof > st.min_pof:
        pof_factor = (st.max_pof - front_size) / (st.max_pof - st.min_pof)
    else:
        pof_factor = 1.0
    hv_factor = min(max(hv_factor, 0.0), 1.0)
    pof_factor = min(max(pof_factor, 0.0), 1.0)
    return hv_factor * pof_factor


def _probes(theta_a: float, theta_b: float):
    width = theta_b - theta_a
    return theta_b - width / PHI, theta_a + width / PHI


def golden_trigger(
    front_size: int,
    hv_now: float,
    hv_prev: Optional[float],
    mu: int,
    st: GoldenSectionState,
) -> GoldenSectionState:
    """While still at 90 degrees, start the search if the front is large or HV stalls."""
    if st.active:
        raise ValueError("golden-section search already active")
    stalled = hv_now - (hv_prev if hv_prev is not None else 0.0) < HV_IMPROVEMENT_EPS
    if front_size > mu or stalled:
        theta_c, theta_d = _probes(st.theta_a, st.theta_b)
        return replace(
            st,
            theta_c=theta_c,
            theta_d=theta_d,
            theta=theta_c,
            testing_c=True,
            active=True,
        )
    return st


def golden_step(score: float, st: GoldenSectionState) -> GoldenSectionState:
    """Consume the score of the probe angle just tested and advance the search.

    First call of a pair records the lower probe's score and switches the
    engine to the upper probe; the second records it, narrows the bracket
    toward the better probe, and recomputes both probes.
    """
    if not st.active or st.frozen:
        raise ValueError("golden-section search is not running")
    if st.testing_c:
        return replace(st, hdist_c=score, theta=st.theta_d, testing_c=False)
    hdist_d = score
    if st.hdist_c is not None and st.hdist_c > hdist_d:
        theta_a, theta_b = st.theta_a, st.theta_d
    else:
        theta_a, theta_b = st.theta_c, st.theta_b
    theta_c, theta_d = _probes(theta_a, theta_b)
    return replace(
        st,
        hdist_d=hdist_d,
        theta_a=theta_a,
        theta_b=theta_b,
        theta_c=theta_c,
        theta_d=theta_d,
        theta=theta_c,
        testing_c=True,
    )


def golden_converged(st: GoldenSectionState, tol: float = DEFAULT_TOLERANCE_DEG) -> bool:
    """True once the search is active and the bracket is narrower than ``tol`` degrees."""
    return st.active and st.bracket_width < tol


def freeze(st: GoldenSectionState) -> GoldenSectionState:
    """Pin the angle at the bracket midpoint; no further steps are accepted."""
    mid = (st.theta_a + st.theta_b) / 2.0
    return replace(st, theta=mid, frozen=True)
