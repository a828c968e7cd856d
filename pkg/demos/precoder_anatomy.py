#!/usr/bin/env python3
"""Anatomy of one channel draw: what each precoding scheme actually does.

For a single realization, prints the per-hop SINRs, the residual loop power,
and the achieved end-to-end SINR of all four full-duplex designs plus the
half-duplex baseline.  Transmit-ZF nulls the loop on the transmit side and
pays with second-hop gain; receive-ZF pays on the first hop; the matched
pair pays nothing but eats the interference; the optimal design splits the
difference by balancing the two hops.
"""

import numpy as np

from fdrelay import (
    SystemParams,
    e2e_sinr,
    hd_snr,
    mrc_mrt,
    optimal,
    relay_power,
    rzf,
    sample_channel,
    tzf,
)

PARAMS = SystemParams(
    m_r=3, m_t=3, p_s=10.0, d1=1.0, d2=1.0, tau=3.0, eta=1.0,
    alpha=0.5, sigma2_li=0.3, gamma_th=1.0, r_c=1.0,
)


def main() -> None:
    ch = sample_channel(PARAMS, np.random.default_rng(12))
    print(f"||h_sr||^2 = {np.sum(np.abs(ch.h_sr)**2):.3f}   "
          f"||h_rd||^2 = {np.sum(np.abs(ch.h_rd)**2):.3f}   "
          f"||H_rr||_F^2 = {np.sum(np.abs(ch.h_rr)**2):.3f}")
    print(f"harvested relay power: {relay_power(PARAMS, ch):.3f}\n")

    print(f"{'scheme':>10} {'first hop':>10} {'second':>10} {'loop pwr':>10} {'e2e':>8}")
    for name, maker in (
        ("mrc/mrt", mrc_mrt),
        ("tzf", tzf),
        ("rzf", rzf),
        ("optimal", lambda c: optimal(c, PARAMS)),
    ):
        pair = maker(ch)
        out = e2e_sinr(ch, PARAMS, pair)
        print(
            f"{name:>10} {out.first_hop:10.3f} {out.second_hop:10.3f} "
            f"{out.li_power:10.2e} {out.e2e:8.3f}"
        )
    print(f"{'hd':>10} {'':>10} {'':>10} {'':>10} {hd_snr(ch, PARAMS):8.3f}")

    pair = optimal(ch, PARAMS)
    print("\noptimal transmit beamformer (unit norm):")
    print("  w_t =", np.round(pair.w_t, 4))
    print("  w_r =", np.round(pair.w_r, 4))


if __name__ == "__main__":
    main()
