"""Decoder tests against independent straight-line reference implementations.

The reference decoder below re-implements the full message-passing
semantics (both schedules, with and without constraint nodes) directly
from the message equations, using plain Python floats and the same
summation order as the library documents (channel term first, check
messages in ascending check order, constraint messages in ascending node
order, one clamp after each sum).  Because min-sum arithmetic is
selection-plus-one-multiply, the reference and the production kernels
must agree *bit-exactly*, which is what the trajectory tests assert.
"""

import itertools

import numpy as np
import pytest

from blissdec import (
    ConstraintBank,
    DecoderParams,
    SparseParityCheckMatrix,
    chk_update,
    decode,
    decode_traced,
    sign_bit,
    syndrome,
    var_update,
)

from conftest import HAMMING_H

MAX_LLR = 64.0


# ---------------------------------------------------------------------------
# Reference implementation (independent oracle)
# ---------------------------------------------------------------------------

def ref_clamp(x):
    return max(-MAX_LLR, min(MAX_LLR, x))


def ref_var(inputs):
    total = 0.0
    for x in inputs:
        total += x
    return ref_clamp(total)


def ref_chk(inputs, alpha):
    mag = min(abs(x) for x in inputs)
    if mag == 0.0:
        return 0.0
    parity = 0
    for x in inputs:
        parity ^= (0 if x >= 0 else 1)
    out = alpha * mag
    return -out if parity else out


def ref_co(arm, x, y, beta):
    # Sign tables restated from the arm definitions: each arm fires when
    # its two observed neighbors could complete a 010/101 with its target.
    if x == 0.0 or y == 0.0:
        return 0.0
    sx = 0 if x >= 0 else 1  # 0 means "bit 0 more likely"
    sy = 0 if y >= 0 else 1
    mag = beta * min(abs(x), abs(y))
    if arm == 1:  # center arm, inputs (left, right)
        if sx != sy:
            return 0.0
        return mag if sx == 0 else -mag
    if arm == 2:  # right arm, inputs (left, center)
        if sx == sy:
            return 0.0
        return -mag if sx == 0 else mag
    # left arm, inputs (center, right)
    if sx == sy:
        return 0.0
    return mag if sx == 0 else -mag


class RefDecoder:
    """Step-by-step reference of the augmented min-sum decoder."""

    def __init__(self, hdense, span, alpha, beta):
        self.hd = np.asarray(hdense, dtype=np.uint8)
        self.m, self.n = self.hd.shape
        self.rows = [sorted(np.flatnonzero(self.hd[mm]).tolist())
                     for mm in range(self.m)]
        self.cols = [sorted(np.flatnonzero(self.hd[:, nn]).tolist())
                     for nn in range(self.n)]
        self.alpha = alpha
        self.beta = beta
        # constraint node centered on q for q in [span0+1, span1-2]
        self.centers = list(range(span[0] + 1, max(span[1] - 1, span[0] + 1)))
        self.first = self.centers[0] if self.centers else 0
        self.v = {}
        for mm in range(self.m):
            for nn in self.rows[mm]:
                self.v[(mm, nn)] = 0.0
        self.b = {p: [0.0, 0.0, 0.0] for p in self.centers}
        self.a = {p: [0.0, 0.0, 0.0] for p in self.centers}

    def b_sum(self, q, exclude=None):
        total = 0.0
        for p in (q - 1, q, q + 1):  # ascending node order
            if p in self.b and p != exclude:
                total += self.b[p][q - p + 1]
        return total

    def u_msg(self, mm, nn, t):
        total = t[nn]
        for m2 in self.cols[nn]:
            if m2 != mm:
                total += self.v[(m2, nn)]
        total += self.b_sum(nn)
        return ref_clamp(total)

    def a_msg(self, p, arm, t):
        q = p - 1 + arm
        total = t[q]
        for m2 in self.cols[q]:
            total += self.v[(m2, q)]  # all incident checks, none excluded
        total += self.b_sum(q, exclude=p)
        return ref_clamp(total)

    def node_update(self, p, t):
        a3 = [self.a_msg(p, arm, t) for arm in range(3)]
        self.a[p] = a3
        self.b[p] = [ref_co(0, a3[1], a3[2], self.beta),
                     ref_co(1, a3[0], a3[2], self.beta),
                     ref_co(2, a3[0], a3[1], self.beta)]

    def iterate_serial(self, t):
        s = len(self.centers)
        for mm in range(self.m):
            row = self.rows[mm]
            u_row = [self.u_msg(mm, nn, t) for nn in row]
            for k, nn in enumerate(row):
                others = u_row[:k] + u_row[k + 1:]
                self.v[(mm, nn)] = ref_chk(others, self.alpha)
            for p_idx in range(s * mm // self.m, s * (mm + 1) // self.m):
                self.node_update(self.centers[p_idx], t)

    def iterate_flooding(self, t):
        u_all = {(mm, nn): self.u_msg(mm, nn, t)
                 for mm in range(self.m) for nn in self.rows[mm]}
        a_new = {p: [self.a_msg(p, arm, t) for arm in range(3)]
                 for p in self.centers}
        for mm in range(self.m):
            row = self.rows[mm]
            u_row = [u_all[(mm, nn)] for nn in row]
            for k, nn in enumerate(row):
                others = u_row[:k] + u_row[k + 1:]
                self.v[(mm, nn)] = ref_chk(others, self.alpha)
        for p, a3 in a_new.items():
            self.a[p] = a3
            self.b[p] = [ref_co(0, a3[1], a3[2], self.beta),
                         ref_co(1, a3[0], a3[2], self.beta),
                         ref_co(2, a3[0], a3[1], self.beta)]

    def outputs(self, t):
        w = np.empty(self.n)
        for nn in range(self.n):
            total = t[nn]
            for m2 in self.cols[nn]:
                total += self.v[(m2, nn)]
            w[nn] = ref_clamp(total)  # outputs take no b terms
        hard = (w < 0).astype(np.uint8)
        return w, hard

    def run(self, t, iterations, schedule, early_exit=False):
        t = [ref_clamp(float(x)) for x in t]
        iters = 0
        snapshots = []
        for _ in range(iterations):
            if schedule == "serial":
                self.iterate_serial(t)
            else:
                self.iterate_flooding(t)
            iters += 1
            w, hard = self.outputs(t)
            weight = int(((self.hd.astype(np.int64) @ hard) % 2).sum())
            snapshots.append((self.flat_v(), self.flat_b(), w.copy(),
                              hard.copy(), weight))
            if early_exit and weight == 0:
                break
        return snapshots

    def flat_v(self):
        out = []
        for mm in range(self.m):
            for nn in self.rows[mm]:
                out.append(self.v[(mm, nn)])
        return np.array(out)

    def flat_b(self):
        if not self.centers:
            return np.zeros((0, 3))
        return np.array([self.b[p] for p in self.centers])


# ---------------------------------------------------------------------------
# Operator contracts
# ---------------------------------------------------------------------------

def test_var_update_examples():
    """Sum operator with saturation; singleton is identity."""
    assert var_update([1.0, -0.5, 2.0]) == 2.5
    assert var_update([0.0, 0.0, 0.0]) == 0.0
    assert var_update([-7.25]) == -7.25
    assert var_update([50.0, 50.0]) == 64.0
    assert var_update([-50.0, -50.0]) == -64.0
    assert var_update([50.0, 50.0], max_llr=128.0) == 100.0


def test_chk_update_examples():
    """Scaled-min magnitude with XOR sign; zero input is absorbing."""
    assert chk_update([2.0, -3.0, 5.0], alpha=1.0) == -2.0
    assert chk_update([4.0, 4.0], alpha=0.75) == 3.0
    assert chk_update([0.0, -9.0], alpha=1.0) == 0.0
    assert chk_update([-1.0, -2.0, -4.0], alpha=1.0) == -1.0
    assert chk_update([-1.0, -2.0, 4.0], alpha=1.0) == 1.0
    assert chk_update([-6.0], alpha=0.5) == -3.0


def test_chk_update_rejects_bad_alpha():
    for alpha in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            chk_update([1.0, 2.0], alpha=alpha)


def test_sign_bit_convention():
    """signBit(x) = 0 iff x >= 0; zero counts as bit 0."""
    assert sign_bit(3.5) == 0
    assert sign_bit(0.0) == 0
    assert sign_bit(-0.001) == 1


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_operators_match_bruteforce(seed):
    """Random-degree operator calls agree with the reference bit-exactly."""
    rng = np.random.default_rng(seed)
    for _ in range(2000):
        deg = int(rng.integers(1, 8))
        x = rng.choice([-8.0, -2.5, -1.0, 0.0, 0.5, 3.0, 9.0], deg)
        alpha = float(rng.choice([0.25, 0.5, 0.75, 1.0]))
        assert var_update(x) == ref_var([float(v) for v in x])
        assert chk_update(x, alpha) == ref_chk([float(v) for v in x], alpha)


def test_chk_update_sign_parity_law():
    """Negating all (nonzero) inputs flips the sign iff the count is odd."""
    rng = np.random.default_rng(3)
    for _ in range(200):
        deg = int(rng.integers(2, 6))
        x = rng.uniform(0.5, 9, deg) * rng.choice([-1.0, 1.0], deg)
        flip = -1.0 if deg % 2 else 1.0
        assert chk_update(-x, alpha=0.75) == flip * chk_update(x, alpha=0.75)


# ---------------------------------------------------------------------------
# Sparse matrix container
# ---------------------------------------------------------------------------

def test_sparse_matrix_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m, n = int(rng.integers(2, 6)), int(rng.integers(4, 10))
        dense = (rng.random((m, n)) < 0.4).astype(np.uint8)
        dense[0] |= (dense.sum(axis=0) == 0)  # no empty columns
        for mm in range(m):
            if dense[mm].sum() == 0:
                dense[mm, int(rng.integers(n))] = 1
        h = SparseParityCheckMatrix.from_dense(dense)
        assert np.array_equal(h.to_dense(), dense)
        assert h.n_vars == n and h.n_checks == m
        assert np.array_equal(h.row_degrees(), dense.sum(axis=1))
        assert np.array_equal(h.col_degrees(), dense.sum(axis=0))


def test_sparse_matrix_rejects_bad_rows():
    with pytest.raises(ValueError):
        SparseParityCheckMatrix(4, [[0, 0, 1], [2, 3]])  # duplicate index
    with pytest.raises(ValueError):
        SparseParityCheckMatrix(4, [[0, 4], [1, 2]])  # out of range
    with pytest.raises(ValueError):
        SparseParityCheckMatrix(4, [[0, 1], [1, 2]])  # empty column 3


def test_syndrome_matches_dense_arithmetic(hamming):
    rng = np.random.default_rng(1)
    dense = hamming.to_dense().astype(np.int64)
    for _ in range(50):
        bits = rng.integers(0, 2, 7).astype(np.uint8)
        assert np.array_equal(syndrome(hamming, bits), (dense @ bits) % 2)


# ---------------------------------------------------------------------------
# Full-decoder trajectory equality against the reference
# ---------------------------------------------------------------------------

def random_h(rng, m, n):
    while True:
        dense = np.zeros((m, n), dtype=np.uint8)
        for c in range(n):
            k = int(rng.integers(2, min(4, m + 1)))
            dense[rng.choice(m, size=k, replace=False), c] = 1
        if (dense.sum(axis=1) >= 2).all():
            return dense


def random_t(rng, n):
    # Grid values exercise erasures, ties, and the clamp; all dyadic so
    # reference Python floats reproduce the kernel arithmetic exactly.
    return rng.choice([-60.0, -8.0, -2.5, -1.0, 0.0, 0.5, 1.0, 4.0, 60.0], n)


@pytest.mark.parametrize("schedule", ["serial", "flooding"])
@pytest.mark.parametrize("constrained", [False, True])
def test_decode_matches_reference_trajectory(schedule, constrained):
    """Per-iteration v/b/w/hard-state equality, kernels vs reference."""
    rng = np.random.default_rng(42 if constrained else 24)
    for case in range(25):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(5, 11))
        dense = random_h(rng, m, n)
        h = SparseParityCheckMatrix.from_dense(dense)
        t = random_t(rng, n)
        alpha = float(rng.choice([0.75, 1.0]))
        beta = float(rng.choice([0.5, 1.0]))
        iters = int(rng.integers(1, 6))
        span = (0, n) if constrained else (0, 0)
        params = DecoderParams(
            max_iterations=iters, alpha=alpha, schedule=schedule,
            constraint_nodes_enabled=constrained, constraint_range=span,
            early_exit=False)
        bank = ConstraintBank.for_span(0, n, beta=beta) if constrained else None
        result, trace = decode_traced(h, params, t, bank)
        ref = RefDecoder(dense, span, alpha, beta)
        snapshots = ref.run(t, iters, schedule)
        assert len(trace) == len(snapshots)
        for rec, (rv, rb, rw, rhard, rweight) in zip(trace, snapshots):
            assert np.array_equal(rec.store.v, rv), f"v diverged, case {case}"
            assert np.array_equal(rec.b, rb), f"b diverged, case {case}"
            assert np.array_equal(rec.store.w, rw), f"w diverged, case {case}"
            assert rec.syndrome_weight == rweight
        assert np.array_equal(result.hard_bits, snapshots[-1][3])
        assert np.array_equal(result.soft_out, snapshots[-1][2])
        # the one-shot entry point must agree with the traced run
        direct = decode(h, params, t,
                        ConstraintBank.for_span(0, n, beta=beta)
                        if constrained else None)
        assert np.array_equal(direct.hard_bits, result.hard_bits)
        assert np.array_equal(direct.soft_out, result.soft_out)


@pytest.mark.parametrize("schedule", ["serial", "flooding"])
def test_plain_decode_codeword_translation_symmetry(hamming, schedule):
    """Plain min-sum commutes with sign translation by any codeword: every
    check sees an even number of sign flips, so magnitudes are untouched."""
    rng = np.random.default_rng(7)
    codebook = hamming_codebook()
    params = DecoderParams(max_iterations=4, alpha=0.75, schedule=schedule,
                           early_exit=False)
    for _ in range(20):
        t = rng.uniform(-6, 6, 7)
        c = codebook[int(rng.integers(16))]
        signs = 1.0 - 2.0 * c.astype(np.float64)
        r_base = decode(hamming, params, t)
        r_moved = decode(hamming, params, t * signs)
        assert np.array_equal(r_moved.soft_out, r_base.soft_out * signs)


def test_decode_scaling_covariance():
    """Doubling all inputs doubles all outputs while nothing clamps."""
    rng = np.random.default_rng(8)
    dense = random_h(rng, 3, 9)
    h = SparseParityCheckMatrix.from_dense(dense)
    t = rng.uniform(-2, 2, 9)
    params = DecoderParams(max_iterations=3, alpha=0.75, schedule="serial",
                           early_exit=False, constraint_nodes_enabled=True,
                           constraint_range=(0, 9))
    r1 = decode(h, params, t)
    r2 = decode(h, params, 2.0 * t)
    assert np.array_equal(r2.soft_out, 2.0 * r1.soft_out)


# ---------------------------------------------------------------------------
# Spec decode examples
# ---------------------------------------------------------------------------

def test_hamming_noiseless_converges_first_iteration(hamming):
    params = DecoderParams(max_iterations=20, alpha=1.0, schedule="flooding",
                           early_exit=True)
    result = decode(hamming, params, np.full(7, 10.0))
    assert np.array_equal(result.hard_bits, np.zeros(7, dtype=np.uint8))
    assert result.converged and result.iterations_run == 1


@pytest.mark.parametrize("flip", range(7))
@pytest.mark.parametrize("schedule", ["serial", "flooding"])
def test_hamming_single_flip_recovers(hamming, flip, schedule):
    """One weak wrong position out of seven is always corrected."""
    t = np.full(7, 4.0)
    t[flip] = -1.0
    params = DecoderParams(max_iterations=20, alpha=1.0, schedule=schedule,
                           early_exit=True)
    result = decode(hamming, params, t)
    assert np.array_equal(result.hard_bits, np.zeros(7, dtype=np.uint8))
    assert result.converged


def hamming_codebook():
    dense = HAMMING_H.astype(np.int64)
    return [np.array(bits, dtype=np.uint8)
            for bits in itertools.product((0, 1), repeat=7)
            if not ((dense @ np.array(bits)) % 2).any()]


def test_hamming_matches_ml_on_single_flips(hamming):
    """Exhaustive-ML oracle agreement over random single-flip frames."""
    codebook = hamming_codebook()
    assert len(codebook) == 16
    params = DecoderParams(max_iterations=20, alpha=1.0, schedule="flooding",
                           early_exit=True)
    rng = np.random.default_rng(5)
    for _ in range(200):
        cw = codebook[int(rng.integers(16))]
        t = 4.0 * (1.0 - 2.0 * cw.astype(np.float64))
        t[int(rng.integers(7))] *= -0.25
        got = decode(hamming, params, t)
        scores = [float(np.sum((1.0 - 2.0 * c) * t)) for c in codebook]
        assert np.array_equal(got.hard_bits, codebook[int(np.argmax(scores))])


TOY_H = np.array([
    [1, 0, 0, 1, 0, 1],
    [0, 1, 0, 1, 1, 0],
    [1, 0, 1, 0, 1, 1]], dtype=np.uint8)
TOY_T = np.array([1.5, -2.0, 2.0, 6.0, -6.0, -4.0])
COMPLIANT_TRIPLES = {(0, 0, 0), (0, 0, 1), (0, 1, 1),
                     (1, 1, 1), (1, 1, 0), (1, 0, 0)}


def test_toy_constrained_decode_vs_exhaustive_oracle():
    """Weak 010-leaning triple: plain emits the violation, constrained
    output equals the exhaustive search over valid constrained codewords."""
    h = SparseParityCheckMatrix.from_dense(TOY_H)
    plain = DecoderParams(max_iterations=20, alpha=1.0, schedule="flooding",
                          early_exit=True)
    r_plain = decode(h, plain, TOY_T)
    assert tuple(r_plain.hard_bits[:3]) == (0, 1, 0)

    con = DecoderParams(max_iterations=20, alpha=1.0, schedule="flooding",
                        early_exit=True, constraint_nodes_enabled=True,
                        constraint_range=(0, 3))
    r_con = decode(h, con, TOY_T, ConstraintBank.for_span(0, 3, beta=1.0))
    assert tuple(r_con.hard_bits[:3]) in COMPLIANT_TRIPLES
    assert r_con.converged

    dense = TOY_H.astype(np.int64)
    best, best_score = None, -np.inf
    for bits in itertools.product((0, 1), repeat=6):
        w = np.array(bits, dtype=np.uint8)
        if ((dense @ w) % 2).any() or bits[:3] not in COMPLIANT_TRIPLES:
            continue
        score = float(np.sum((1.0 - 2.0 * w) * TOY_T))
        if score > best_score:
            best, best_score = w, score
    assert np.array_equal(r_con.hard_bits, best)


# ---------------------------------------------------------------------------
# Parameter and input validation
# ---------------------------------------------------------------------------

def test_decoder_params_validation():
    with pytest.raises(ValueError):
        DecoderParams(max_iterations=0)
    with pytest.raises(ValueError):
        DecoderParams(alpha=0.0)
    with pytest.raises(ValueError):
        DecoderParams(schedule="layered")
    with pytest.raises(ValueError):
        DecoderParams(constraint_nodes_enabled=True, constraint_range=(4, 2))


def test_decode_rejects_length_mismatch(hamming):
    with pytest.raises(ValueError):
        decode(hamming, DecoderParams(), np.zeros(6))


def test_decode_clamps_channel_input(hamming):
    """Out-of-range channel LLRs behave exactly like pre-clamped ones."""
    params = DecoderParams(max_iterations=2, early_exit=False)
    big = np.array([500.0, -3.0, 1e9, 2.0, -2.0, 1.0, -1.0])
    r1 = decode(hamming, params, big)
    r2 = decode(hamming, params, np.clip(big, -64.0, 64.0))
    assert np.array_equal(r1.soft_out, r2.soft_out)


def test_early_exit_vs_full_run_same_answer(hamming):
    """With a decodable frame, early exit changes iterations_run only."""
    t = np.full(7, 4.0)
    t[3] = -1.0
    fast = decode(hamming, DecoderParams(max_iterations=16, alpha=1.0,
                                         early_exit=True), t)
    slow = decode(hamming, DecoderParams(max_iterations=16, alpha=1.0,
                                         early_exit=False), t)
    assert fast.converged and slow.converged
    assert fast.iterations_run < slow.iterations_run == 16
    assert np.array_equal(fast.hard_bits, slow.hard_bits)
