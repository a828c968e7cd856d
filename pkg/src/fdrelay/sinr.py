"""Exact end-to-end SINR evaluation for full-duplex and half-duplex relaying.

The full-duplex expression is evaluated in its general form for every scheme;
the scheme-specific algebraic reductions live only in the analytic outage
module, so Monte Carlo results double as an independent check of those
reductions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemParams
from .precoding import BeamformingPair

__all__ = ["SinrBreakdown", "e2e_sinr", "hd_snr"]


@dataclass(frozen=True)
class SinrBreakdown:
    """End-to-end SINR together with its two hop terms.

    ``first_hop`` is the relay decoding SINR, ``second_hop`` the destination
    SNR, ``e2e`` their minimum (decode-and-forward), and ``li_power`` the
    loop-interference term sitting in the first hop's denominator.
    """

    first_hop: float
    second_hop: float
    e2e: float
    li_power: float


def e2e_sinr(
    ch: ChannelRealization, params: SystemParams, pair: BeamformingPair
) -> SinrBreakdown:
    """Full-duplex end-to-end SINR for one realization and beamforming pair.

    First hop: p_s |w_r h_sr|^2 / (kappa p_s ||h_sr||^2 |w_r H_rr w_t|^2 + d1^tau),
    i.e. numerator and denominator both scaled by d1^tau relative to the
    physical signal/interference/noise powers.  Second hop:
    (kappa p_s / (d1^tau d2^tau)) ||h_sr||^2 |h_rd w_t|^2.
    """
    if ch.h_sr.shape != (params.m_r,) or pair.w_r.shape != (params.m_r,):
        raise ValueError("receive-side dimensions do not match params.m_r")
    if ch.h_rd.shape != (params.m_t,) or pair.w_t.shape != (params.m_t,):
        raise ValueError("transmit-side dimensions do not match params.m_t")
    if ch.h_rr.shape != (params.m_r, params.m_t):
        raise ValueError("loop-channel shape does not match antenna counts")

    d1t = params.d1**params.tau
    d2t = params.d2**params.tau
    gain_sr = float(np.sum(np.abs(ch.h_sr) ** 2))

    signal = params.p_s * abs(np.dot(pair.w_r, ch.h_sr)) ** 2
    li_amp = np.dot(pair.w_r, ch.h_rr @ pair.w_t)
    li_power = params.kappa * params.p_s * gain_sr * abs(li_amp) ** 2
    first_hop = signal / (li_power + d1t)
    second_hop = (
        params.kappa
        * params.p_s
        / (d1t * d2t)
        * gain_sr
        * abs(np.dot(ch.h_rd, pair.w_t)) ** 2
    )
    return SinrBreakdown(
        first_hop=float(first_hop),
        second_hop=float(second_hop),
        e2e=float(min(first_hop, second_hop)),
        li_power=float(li_power),
    )


def hd_snr(ch: ChannelRealization, params: SystemParams) -> float:
    """End-to-end SNR of the half-duplex baseline.

    Harvesting is unchanged, but the active time is split evenly between the
    two hops, so the relay spends its harvested energy over half the window
    (the factor 2) and there is no loop interference:

        gamma = ||h_sr||^2 * min(c1, 2 c3 ||h_rd||^2),

    with c1 = p_s / d1^tau and c3 = p_s kappa / (d1^tau d2^tau).
    """
    d1t = params.d1**params.tau
    d2t = params.d2**params.tau
    c1 = params.p_s / d1t
    c3 = params.p_s * params.kappa / (d1t * d2t)
    gain_sr = float(np.sum(np.abs(ch.h_sr) ** 2))
    gain_rd = float(np.sum(np.abs(ch.h_rd) ** 2))
    return gain_sr * min(c1, 2.0 * c3 * gain_rd)
