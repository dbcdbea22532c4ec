"""RLL codec and 1T precoder tests.

Roundtrip coverage is exhaustive over all user strings up to 16 bits; the
run-length properties (d=1, k=7) are checked directly on the encoded
streams rather than trusting the code tables.
"""

import itertools

import numpy as np
import pytest

from blissdec import (
    DECODER_WINDOW,
    PrecoderState,
    RllCode,
    inverse_precode,
    precode,
    rll_decode,
    rll_encode,
)


def max_zero_run(bits):
    run = best = 0
    for b in bits:
        run = run + 1 if b == 0 else 0
        best = max(best, run)
    return best


def has_isolated_symbol(bits):
    """True when some interior symbol differs from both neighbors."""
    return any(bits[i - 1] != bits[i] != bits[i + 1]
               for i in range(1, len(bits) - 1))


@pytest.fixture(scope="module")
def code():
    return RllCode.default()


def test_basic_blocks(code):
    """A lone pair flushes straight to its basic 3-bit block."""
    table = {(0, 0): [1, 0, 1], (0, 1): [1, 0, 0],
             (1, 0): [0, 0, 1], (1, 1): [0, 1, 0]}
    for (b0, b1), block in table.items():
        enc = rll_encode(np.array([b0, b1], dtype=np.uint8), code)
        assert enc.tolist() == block


def test_substitution_groups(code):
    """The four look-ahead substitutions produce their 6-bit groups."""
    groups = {(0, 0, 0, 0): [1, 0, 1, 0, 0, 0],
              (0, 0, 0, 1): [1, 0, 0, 0, 0, 0],
              (1, 0, 0, 0): [0, 0, 1, 0, 0, 0],
              (1, 0, 0, 1): [0, 1, 0, 0, 0, 0]}
    for user, group in groups.items():
        enc = rll_encode(np.array(user, dtype=np.uint8), code)
        assert enc.tolist() == group
    # a non-substituting pair sequence keeps both basic blocks
    enc = rll_encode(np.array([0, 0, 1, 0], dtype=np.uint8), code)
    assert enc.tolist() == [1, 0, 1, 0, 0, 1]


def test_roundtrip_exhaustive_to_16_bits(code):
    count = 0
    for length in range(0, 17, 2):
        for bits in itertools.product((0, 1), repeat=length):
            arr = np.array(bits, dtype=np.uint8)
            enc = rll_encode(arr, code)
            assert enc.shape[0] * 2 == arr.shape[0] * 3  # exact rate 2/3
            dec = rll_decode(enc, code)
            assert np.array_equal(dec, arr), bits
            count += 1
    assert count == (4 ** 9 - 1) // 3  # 87381 strings checked


def test_roundtrip_long_random_frames(code):
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = 2 * int(rng.integers(1, 600))
        user = rng.integers(0, 2, n).astype(np.uint8)
        assert np.array_equal(rll_decode(rll_encode(user, code), code), user)


def test_d1_no_adjacent_ones(code):
    """Differential output never contains 11 — within and across blocks."""
    rng = np.random.default_rng(8)
    for _ in range(20):
        user = rng.integers(0, 2, 2000).astype(np.uint8)
        enc = rll_encode(user, code)
        assert not np.any(enc[:-1] & enc[1:])


def test_k7_zero_run_bound_and_attained(code):
    # bound: exhaustive over all 5-pair frames plus long random frames
    worst = 0
    for bits in itertools.product((0, 1), repeat=10):
        enc = rll_encode(np.array(bits, dtype=np.uint8), code)
        worst = max(worst, max_zero_run(enc.tolist()))
    assert worst == 7
    rng = np.random.default_rng(9)
    for _ in range(20):
        user = rng.integers(0, 2, 2000).astype(np.uint8)
        assert max_zero_run(rll_encode(user, code).tolist()) <= 7
    # the attaining frame: pairs 00,01,10,11 -> 100 000 001 010
    enc = rll_encode(np.array([0, 0, 0, 1, 1, 0, 1, 1], dtype=np.uint8), code)
    assert enc.tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0]
    assert max_zero_run(enc.tolist()) == 7


def test_precoded_stream_has_min_run_2(code):
    """After 1T precoding the unipolar stream has no isolated symbols (no
    010/101 triples), because the differential stream is d=1.  The check
    includes the precoder's implicit leading 0 as left context."""
    rng = np.random.default_rng(10)
    for _ in range(10):
        user = rng.integers(0, 2, 2000).astype(np.uint8)
        y = precode(rll_encode(user, code))
        assert not has_isolated_symbol([0] + y.tolist())


def test_single_flip_confined_to_decoder_window(code):
    """One flipped differential channel bit corrupts at most
    DECODER_WINDOW consecutive user pairs around its block."""
    assert DECODER_WINDOW == 3
    rng = np.random.default_rng(11)
    user = rng.integers(0, 2, 400).astype(np.uint8)
    enc = rll_encode(user, code)
    for j in range(enc.shape[0]):
        bad = enc.copy()
        bad[j] ^= 1
        dec = rll_decode(bad, code)
        changed_pairs = np.nonzero(
            (dec[0::2] != user[0::2]) | (dec[1::2] != user[1::2]))[0]
        if changed_pairs.size:
            blk = j // 3
            assert changed_pairs.min() >= blk - 1
            assert changed_pairs.max() <= blk + 1
            assert changed_pairs.max() - changed_pairs.min() \
                < DECODER_WINDOW


def test_encode_input_validation(code):
    with pytest.raises(ValueError, match="odd"):
        rll_encode(np.array([1, 0, 1], dtype=np.uint8), code)
    with pytest.raises(ValueError, match="1-D"):
        rll_encode(np.zeros((2, 2), dtype=np.uint8), code)
    assert rll_encode(np.zeros(0, dtype=np.uint8), code).shape == (0,)


def test_decode_input_validation(code):
    with pytest.raises(ValueError, match="divisible by 3"):
        rll_decode(np.array([1, 0], dtype=np.uint8), code)
    assert rll_decode(np.zeros(0, dtype=np.uint8), code).shape == (0,)


# ---------------------------------------------------------------------------
# 1T precoder
# ---------------------------------------------------------------------------

def test_precode_examples():
    x = np.array([1, 0, 0, 1, 0], dtype=np.uint8)
    assert precode(x).tolist() == [1, 1, 1, 0, 0]
    z = np.zeros(6, dtype=np.uint8)
    assert precode(z).tolist() == [0] * 6


def test_precode_inverse_roundtrip():
    rng = np.random.default_rng(12)
    for _ in range(30):
        x = rng.integers(0, 2, int(rng.integers(0, 200))).astype(np.uint8)
        assert np.array_equal(inverse_precode(precode(x)), x)
        y = rng.integers(0, 2, int(rng.integers(1, 200))).astype(np.uint8)
        assert np.array_equal(precode(inverse_precode(y)), y)


def test_precode_flip_propagates_forever():
    """Flipping differential bit n flips every unipolar bit from n on."""
    rng = np.random.default_rng(13)
    x = rng.integers(0, 2, 40).astype(np.uint8)
    y = precode(x)
    for n in range(40):
        x2 = x.copy()
        x2[n] ^= 1
        y2 = precode(x2)
        assert np.array_equal(y2[:n], y[:n])
        assert np.array_equal(y2[n:], y[n:] ^ 1)


def test_precode_state_chaining():
    rng = np.random.default_rng(14)
    x = rng.integers(0, 2, 100).astype(np.uint8)
    whole = precode(x)
    state = PrecoderState()
    parts = np.concatenate([precode(x[:37], state), precode(x[37:], state)])
    assert np.array_equal(parts, whole)
    assert state.last_bit == int(whole[-1])
    # empty chunk leaves the state untouched
    precode(np.zeros(0, dtype=np.uint8), state)
    assert state.last_bit == int(whole[-1])


def test_inverse_precode_initial_bit():
    y = np.array([1, 1, 0], dtype=np.uint8)
    assert inverse_precode(y, initial=0).tolist() == [1, 0, 1]
    assert inverse_precode(y, initial=1).tolist() == [0, 0, 1]


# ---------------------------------------------------------------------------
# code tables
# ---------------------------------------------------------------------------

def test_table_text_roundtrip(code):
    text = code.to_table_text()
    other = RllCode.from_table_text(text)
    assert np.array_equal(other.next_state, code.next_state)
    assert np.array_equal(other.out_block, code.out_block)


def test_table_file_roundtrip(code, tmp_path):
    path = tmp_path / "rll.table"
    path.write_text(code.to_table_text())
    other = RllCode.from_table_file(path)
    assert np.array_equal(other.next_state, code.next_state)


def test_table_text_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="line 2"):
        RllCode.from_table_text("0 00 4 101\n0 01 4\n")
    with pytest.raises(ValueError, match="line 1.*input pair"):
        RllCode.from_table_text("0 0x 4 101\n")
    with pytest.raises(ValueError, match="line 1.*output block"):
        RllCode.from_table_text("0 00 4 10\n")
    with pytest.raises(ValueError, match="misses transition"):
        RllCode.from_table_text("0 00 4 101\n4 00 0 000\n")


def test_fsm_validation():
    ns = np.zeros((5, 4), dtype=np.int64)
    ob = np.zeros((5, 4, 3), dtype=np.uint8)
    with pytest.raises(ValueError, match="shapes"):
        RllCode(next_state=ns[:, :3], out_block=ob)
    bad = ns.copy()
    bad[0, 0] = 9
    with pytest.raises(ValueError, match="out of range"):
        RllCode(next_state=bad, out_block=ob)
    with pytest.raises(ValueError, match="pending states"):
        RllCode(next_state=np.zeros((4, 4), dtype=np.int64),
                out_block=np.zeros((4, 4, 3), dtype=np.uint8))
