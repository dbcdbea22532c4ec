"""Tour of the rate-2/3 (d=1, k=7) RLL codec and the 1T precoder.

Shows the basic pair->block table, the look-ahead substitutions, the run
lengths of encoded streams, the worst-case zero run, and how little damage
a single flipped channel bit can do to the decoded user bits.

Run:  python3 demos/rll_codec_tour.py
"""

import numpy as np

from blissdec import (
    RllCode,
    count_violations,
    inverse_precode,
    precode,
    rll_decode,
    rll_encode,
)


def bits(arr):
    return "".join(str(int(b)) for b in arr)


def blocks(arr):
    text = bits(arr)
    return " ".join(text[i:i + 3] for i in range(0, len(text), 3))


def main():
    code = RllCode.default()

    print("basic blocks (single pair -> 3 channel bits):")
    for pair in ("00", "01", "10", "11"):
        user = np.array([int(c) for c in pair], dtype=np.uint8)
        print(f"  {pair} -> {bits(rll_encode(user, code))}")

    print("\nlook-ahead substitutions (second block forced to 000 so no")
    print("two 1s become adjacent):")
    for pairs in ("0000", "0001", "1000", "1001"):
        user = np.array([int(c) for c in pairs], dtype=np.uint8)
        print(f"  {pairs[:2]},{pairs[2:]} -> {blocks(rll_encode(user, code))}")

    print("\nworst-case zero run (k = 7), pairs 00,01,10,11:")
    user = np.array([0, 0, 0, 1, 1, 0, 1, 1], dtype=np.uint8)
    enc = rll_encode(user, code)
    print(f"  {blocks(enc)}   <- seven zeros between the outer 1s")

    rng = np.random.default_rng(2)
    user = rng.integers(0, 2, 32).astype(np.uint8)
    enc = rll_encode(user, code)
    uni = precode(enc)
    print(f"\nrandom frame of {user.size} user bits:")
    print(f"  user         {bits(user)}")
    print(f"  differential {blocks(enc)}")
    print(f"  unipolar     {blocks(uni)}")
    print(f"  RLL roundtrip ok: {np.array_equal(rll_decode(enc, code), user)}")
    print(f"  precoder roundtrip ok: "
          f"{np.array_equal(inverse_precode(uni), enc)}")
    print(f"  isolated-symbol (010/101) count in unipolar stream: "
          f"{count_violations(uni)}")

    print("\nsingle flipped channel bit -> at most 3 consecutive user pairs:")
    for j in (7, 20, 40):
        bad = enc.copy()
        bad[j] ^= 1
        dec = rll_decode(bad, code)
        changed = np.flatnonzero((dec[0::2] != user[0::2])
                                 | (dec[1::2] != user[1::2]))
        print(f"  flip channel bit {j:2d} (block {j // 3:2d}) -> "
              f"changed user pairs {changed.tolist()}")


if __name__ == "__main__":
    main()
