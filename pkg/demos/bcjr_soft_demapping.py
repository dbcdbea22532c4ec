"""Soft demapping of the RLL parity leg with the BCJR algorithm.

The FullBliss receiver cannot read LDPC parity bits directly off the
channel: they were RLL-encoded and precoded before transmission.  This
demo runs the log-MAP BCJR over the joint RLL+precoder trellis and shows
how code structure recovers bits the channel erased.

Run:  python3 demos/bcjr_soft_demapping.py
"""

import numpy as np

from blissdec import (
    RllCode,
    bcjr,
    bit_llrs,
    build_rll_unipolar_trellis,
    precode,
    rll_encode,
    walk,
)


def main():
    code = RllCode.default()
    trellis = build_rll_unipolar_trellis(code)
    print(f"joint RLL + precoder trellis: {trellis.n_states} states, "
          f"{trellis.n_in} input bits and {trellis.n_out} channel bits "
          f"per step\n")

    rng = np.random.default_rng(3)
    parity = rng.integers(0, 2, 12).astype(np.uint8)
    channel_bits = precode(rll_encode(parity, code))
    assert np.array_equal(walk(trellis, parity), channel_bits)
    symbols = 1.0 - 2.0 * channel_bits.astype(np.float64)

    sigma = 0.6
    samples = symbols + sigma * rng.standard_normal(symbols.shape)
    chan_llrs = bit_llrs(samples, sigma)
    post_in, post_out = bcjr(trellis, np.zeros(parity.size), chan_llrs)

    hard_chan = (chan_llrs < 0).astype(np.uint8)
    hard_post = (post_in < 0).astype(np.uint8)
    print(f"raw channel bit errors: "
          f"{int(np.count_nonzero(hard_chan != channel_bits))} of "
          f"{channel_bits.size}  (the parity bits themselves were never "
          "transmitted)\n")
    print("parity bit | BCJR posterior LLR | decision")
    for i, p in enumerate(parity):
        mark = "" if hard_post[i] == p else "   <- wrong"
        print(f"    {p}      | {post_in[i]:+12.2f}      | {hard_post[i]}{mark}")
    print(f"\nparity bit errors after BCJR: "
          f"{int(np.count_nonzero(hard_post != parity))} of {parity.size}")

    print("\nerasing three channel LLRs entirely (set to 0):")
    erased = chan_llrs.copy()
    erased[4:7] = 0.0
    post_in2, post_out2 = bcjr(trellis, np.zeros(parity.size), erased)
    hard2 = (post_in2 < 0).astype(np.uint8)
    print(f"parity bit errors with erasures: "
          f"{int(np.count_nonzero(hard2 != parity))} of {parity.size}")
    print(f"posterior LLRs of the erased channel block: "
          f"{np.round(post_out2[4:7], 2).tolist()}")
    print("the trellis walks through every run-length-legal path, so the "
          "erased\nblock is partially reconstructed from its neighbors")


if __name__ == "__main__":
    main()
