"""Built-in correctness checks runnable in any installed environment.

Every check here re-derives its expected values with a local brute-force
oracle (exhaustive codebook search, direct definition sums, exhaustive
trellis path enumeration) rather than trusting the library's own fast
paths, so a passing run certifies the optimized code against first
principles.  ``run_all`` returns (name, ok, detail) triples; the CLI
``selftest`` subcommand prints one line per check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .codes import CodeSpec, build_systematic_code, ldpc_encode
from .constraints import Arm, ConstraintBank, co, count_violations
from .ldpc import DecoderParams, SparseParityCheckMatrix, chk_update, decode, \
    var_update
from .pipeline import FrameLayout, bit_llrs, bliss_encode, receive_front_end, \
    user_bits_per_frame
from .rll import RllCode, inverse_precode, precode, rll_decode, rll_encode
from .trellis import Trellis, bcjr, build_precoder_trellis, walk


def _check_operators() -> tuple[str, bool, str]:
    rng = np.random.default_rng(11)
    for _ in range(200):
        deg = int(rng.integers(1, 6))
        x = np.round(rng.uniform(-9, 9, deg), 2)
        # direct definition: clamped plain sum
        total = 0.0
        for xi in x:
            total += xi
        want = max(-64.0, min(64.0, total))
        got = var_update(x)
        if got != want:
            return "operators", False, f"var_update({x}) = {got}, want {want}"
        mags = np.abs(x)
        signs = 1.0
        for xi in x:
            signs *= (1.0 if xi >= 0 else -1.0)
        if np.any(mags == 0.0):
            want_chk = 0.0
        else:
            want_chk = signs * 0.75 * mags.min()
        got_chk = chk_update(x, alpha=0.75)
        if got_chk != want_chk:
            return "operators", False, f"chk_update({x}) = {got_chk}"
    return "operators", True, "200 random degrees vs direct definitions"


def _co_oracle(arm: int, x: float, y: float, beta: float) -> float:
    # Truth-table restatement: which (input-sign pair -> output sign)
    # pattern each arm uses, with erasure on any zero input.
    if x == 0.0 or y == 0.0:
        return 0.0
    sx, sy = (x >= 0), (y >= 0)
    if arm == Arm.CENTER:
        sign = 0 if sx != sy else (1 if sx else -1)
    elif arm == Arm.RIGHT:
        sign = 0 if sx == sy else (-1 if sx else 1)
    else:
        sign = 0 if sx == sy else (1 if sx else -1)
    return sign * beta * min(abs(x), abs(y))


def _check_constraint_operator() -> tuple[str, bool, str]:
    vals = (-3.0, -1.0, 0.0, 2.0, 5.0)
    n = 0
    for arm in (Arm.LEFT, Arm.CENTER, Arm.RIGHT):
        for x, y in itertools.product(vals, vals):
            for beta in (1.0, 0.75):
                want = _co_oracle(arm, x, y, beta)
                got = co(arm, x, y, beta)
                if got != want:
                    return ("constraint-operator", False,
                            f"co({arm}, {x}, {y}, beta={beta}) = {got}, "
                            f"want {want}")
                n += 1
    return "constraint-operator", True, f"{n} exhaustive input pairs"


def _check_hamming_decode() -> tuple[str, bool, str]:
    h = SparseParityCheckMatrix.from_dense(np.array([
        [1, 1, 0, 1, 1, 0, 0],
        [1, 0, 1, 1, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1]], dtype=np.uint8))
    dense = h.to_dense().astype(np.int64)
    codebook = [np.array(bits, dtype=np.uint8)
                for bits in itertools.product((0, 1), repeat=7)
                if not ((dense @ np.array(bits)) % 2).any()]
    params = DecoderParams(max_iterations=30, alpha=1.0, schedule="flooding")
    rng = np.random.default_rng(7)
    agree = 0
    for _ in range(100):
        cw = codebook[int(rng.integers(len(codebook)))]
        t = 4.0 * (1.0 - 2.0 * cw.astype(np.float64))
        flip = int(rng.integers(7))
        t[flip] = -1.0 * np.sign(t[flip])
        result = decode(h, params, t)
        # ML oracle: codeword maximizing sum of matched LLRs
        scores = [float(np.sum((1.0 - 2.0 * c) * t)) for c in codebook]
        best = codebook[int(np.argmax(scores))]
        if not np.array_equal(result.hard_bits, best):
            return ("hamming-ml", False,
                    f"decoder {result.hard_bits.tolist()} vs ML "
                    f"{best.tolist()}")
        agree += 1
    return "hamming-ml", True, f"{agree} single-flip frames match ML search"


def _check_rll_roundtrip() -> tuple[str, bool, str]:
    code = RllCode.default()
    rng = np.random.default_rng(5)
    for trial in range(200):
        n_pairs = int(rng.integers(1, 40))
        user = rng.integers(0, 2, 2 * n_pairs).astype(np.uint8)
        enc = rll_encode(user, code)
        if enc.shape[0] != 3 * n_pairs:
            return "rll-roundtrip", False, f"rate violated at trial {trial}"
        uni = precode(enc)
        # d=1 oracle: scan for isolated runs in the unipolar stream
        if count_violations(uni):
            return "rll-roundtrip", False, f"run-length violation, trial {trial}"
        if not np.array_equal(rll_decode(inverse_precode(uni), code), user):
            return "rll-roundtrip", False, f"decode mismatch, trial {trial}"
    return "rll-roundtrip", True, "200 random frames, d=1 verified"


def _brute_force_bcjr(trellis: Trellis, prior_in: np.ndarray,
                      chan_out: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Enumerate every path; exact posterior via log-sum-exp over path scores.
    has_entry = trellis.entry_to is not None
    has_exit = trellis.exit_from is not None
    in_steps = prior_in.shape[0] // trellis.n_in
    n_body = in_steps - (1 if has_entry else 0)

    def bit_score(bits, llrs):
        return sum((0.5 if b == 0 else -0.5) * l for b, l in zip(bits, llrs))

    paths = []  # (score, in_bits, out_bits)

    def extend(step, state, score, ins, outs):
        if step == n_body:
            if has_exit:
                done = False
                for e in range(trellis.exit_from.shape[0]):
                    if trellis.exit_from[e] == state:
                        oo = trellis.exit_out[e]
                        s2 = score + bit_score(
                            oo, chan_out[n_body * trellis.n_out:])
                        paths.append((s2, list(ins), outs + list(oo)))
                        done = True
                if not done:
                    return
            else:
                paths.append((score, list(ins), list(outs)))
            return
        base = (step + (1 if has_entry else 0)) * trellis.n_in
        for e in range(trellis.from_state.shape[0]):
            if trellis.from_state[e] != state:
                continue
            ib = trellis.in_bits[e]
            ob = trellis.out_bits[e]
            s2 = score + bit_score(ib, prior_in[base:base + trellis.n_in]) \
                + bit_score(ob, chan_out[step * trellis.n_out:
                                         (step + 1) * trellis.n_out])
            extend(step + 1, int(trellis.to_state[e]), s2,
                   ins + list(ib), outs + list(ob))

    if has_entry:
        for e in range(trellis.entry_to.shape[0]):
            ib = trellis.entry_in[e]
            s0 = bit_score(ib, prior_in[:trellis.n_in])
            extend(0, int(trellis.entry_to[e]), s0, list(ib), [])
    else:
        extend(0, trellis.init_state, 0.0, [], [])

    def posterior(values, idx):
        num0, num1 = [], []
        for score, ins, outs in paths:
            (num0 if values(ins, outs)[idx] == 0 else num1).append(score)

        def lse(xs):
            m = max(xs)
            return m + math.log(sum(math.exp(x - m) for x in xs))
        return lse(num0) - lse(num1)

    llr_in = np.array([posterior(lambda i, o: i, k)
                       for k in range(len(paths[0][1]))])
    llr_out = np.array([posterior(lambda i, o: o, k)
                        for k in range(len(paths[0][2]))])
    return llr_in, llr_out


def _check_bcjr() -> tuple[str, bool, str]:
    rng = np.random.default_rng(3)
    trellis = build_precoder_trellis()
    for trial in range(20):
        steps = int(rng.integers(2, 7))
        prior = rng.uniform(-3, 3, steps)
        chan = rng.uniform(-3, 3, steps)
        got_in, got_out = bcjr(trellis, prior, chan)
        want_in, want_out = _brute_force_bcjr(trellis, prior, chan)
        if (np.max(np.abs(got_in - want_in)) > 1e-9 or
                np.max(np.abs(got_out - want_out)) > 1e-9):
            return "bcjr", False, f"posterior mismatch, trial {trial}"
    return "bcjr", True, "20 random precoder-trellis frames vs path enumeration"


def _check_pipeline_noiseless() -> tuple[str, bool, str]:
    enc = build_systematic_code(CodeSpec(n=60, m=24, col_weight=3, seed=3))
    rll = RllCode.default()
    layout = FrameLayout(n_sys=enc.n_sys, n_parity=enc.m, rll=rll)
    rng = np.random.default_rng(9)
    user = rng.integers(0, 2, user_bits_per_frame(enc.n_sys)).astype(np.uint8)
    frame = bliss_encode(user, enc.h, rll, enc)
    if count_violations(frame.systematic_channel_bits):
        return "pipeline", False, "systematic channel bits violate d=1"
    syndrome = (enc.h.to_dense().astype(np.int64) @ frame.codeword) % 2
    if syndrome.any():
        return "pipeline", False, "codeword fails parity checks"
    t = receive_front_end(frame.transmitted_symbols, layout, "fullbliss", 0.0)
    hard = (t < 0).astype(np.uint8)
    if not np.array_equal(hard, frame.codeword):
        return "pipeline", False, "noiseless front end disagrees with codeword"
    return "pipeline", True, "noiseless FullBliss frame reproduces the codeword"


def _check_systematic_code() -> tuple[str, bool, str]:
    enc = build_systematic_code(CodeSpec(n=96, m=32, col_weight=3, seed=2))
    rng = np.random.default_rng(13)
    dense = enc.h.to_dense().astype(np.int64)
    for _ in range(50):
        s = rng.integers(0, 2, enc.n_sys).astype(np.uint8)
        cw = ldpc_encode(enc, s)
        if not np.array_equal(cw[:enc.n_sys], s):
            return "systematic-code", False, "systematic prefix altered"
        if ((dense @ cw) % 2).any():
            return "systematic-code", False, "encoder output fails checks"
    return "systematic-code", True, "50 random payloads satisfy all checks"


def _check_constraint_bank() -> tuple[str, bool, str]:
    bank = ConstraintBank.for_span(0, 6)
    if bank.center_indices.tolist() != [1, 2, 3, 4]:
        return "constraint-bank", False, "span centers wrong"
    if count_violations(np.array([0, 1, 0], dtype=np.uint8)) != 1:
        return "constraint-bank", False, "count_violations misses 010"
    if count_violations(np.array([0, 0, 1, 1, 0, 0], dtype=np.uint8)) != 0:
        return "constraint-bank", False, "count_violations false positive"
    return "constraint-bank", True, "span construction and violation scan"


def run_all() -> list[tuple[str, bool, str]]:
    """Run every self-check; returns (name, ok, detail) per check."""
    return [
        _check_operators(),
        _check_constraint_operator(),
        _check_constraint_bank(),
        _check_hamming_decode(),
        _check_rll_roundtrip(),
        _check_bcjr(),
        _check_systematic_code(),
        _check_pipeline_noiseless(),
    ]
