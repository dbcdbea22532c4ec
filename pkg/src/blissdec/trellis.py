"""Generic log-domain BCJR over small trellises.

A :class:`Trellis` has a homogeneous *body* section (``n_in`` input bits
consumed, ``n_out`` output bits emitted per step) plus optional *entry* and
*exit* boundary sections for codes whose frames start/end irregularly: the
RLL encoder primes on its first pair (consuming input, emitting nothing)
and flushes a final block (emitting output, consuming nothing).  A frame is
then ``entry? + body* + exit?``; plain codes (like the 1T precoder) use
body sections only, starting from ``init_state``.

Branch metrics use the correlation rule: each bit contributes
``+llr/2`` if the branch labels it 0 and ``-llr/2`` if 1, summed over the
section's input-prior and output-channel LLRs.  LogMap accumulates with
log-sum-exp (max-plus-log1p-exp form); MaxLog replaces every log-sum-exp
with max, so its posterior signs are Viterbi hard decisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

MODES = ("logmap", "maxlog")

_NO_BRANCHES = np.zeros(0, dtype=np.int32)
_NO_BITS = np.zeros((0, 0), dtype=np.uint8)


@dataclass
class Trellis:
    """Branch-table trellis; see the module docstring for the frame model.

    ``in_bits[b]`` / ``out_bits[b]`` label body branch ``b`` (first bit =
    most significant / earliest).  ``entry_*`` branches leave the virtual
    start (consuming ``n_in`` bits), ``exit_*`` branches reach the virtual
    end (emitting ``n_out`` bits).
    """

    n_states: int
    n_in: int
    n_out: int
    from_state: np.ndarray
    to_state: np.ndarray
    in_bits: np.ndarray
    out_bits: np.ndarray
    init_state: int = 0
    entry_to: np.ndarray | None = None
    entry_in: np.ndarray | None = None
    exit_from: np.ndarray | None = None
    exit_out: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.from_state = np.asarray(self.from_state, dtype=np.int32)
        self.to_state = np.asarray(self.to_state, dtype=np.int32)
        self.in_bits = np.ascontiguousarray(self.in_bits, dtype=np.uint8)
        self.out_bits = np.ascontiguousarray(self.out_bits, dtype=np.uint8)
        nb = self.from_state.shape[0]
        if self.to_state.shape != (nb,):
            raise ValueError("from_state/to_state length mismatch")
        if self.in_bits.shape != (nb, self.n_in):
            raise ValueError("in_bits must be (n_branches, n_in)")
        if self.out_bits.shape != (nb, self.n_out):
            raise ValueError("out_bits must be (n_branches, n_out)")
        if (self.entry_to is None) != (self.entry_in is None):
            raise ValueError("entry_to and entry_in go together")
        if (self.exit_from is None) != (self.exit_out is None):
            raise ValueError("exit_from and exit_out go together")
        if self.entry_to is not None:
            self.entry_to = np.asarray(self.entry_to, dtype=np.int32)
            self.entry_in = np.ascontiguousarray(self.entry_in, dtype=np.uint8)
            if self.entry_in.shape != (self.entry_to.shape[0], self.n_in):
                raise ValueError("entry_in must be (n_entry, n_in)")
        if self.exit_from is not None:
            self.exit_from = np.asarray(self.exit_from, dtype=np.int32)
            self.exit_out = np.ascontiguousarray(self.exit_out, dtype=np.uint8)
            if self.exit_out.shape != (self.exit_from.shape[0], self.n_out):
                raise ValueError("exit_out must be (n_exit, n_out)")
        self.validate()

    @property
    def has_entry(self) -> bool:
        return self.entry_to is not None

    @property
    def has_exit(self) -> bool:
        return self.exit_from is not None

    def validate(self) -> None:
        """Check determinism ((state, input) unique) and the trim property."""
        keys = set()
        for b in range(self.from_state.shape[0]):
            key = (int(self.from_state[b]), tuple(self.in_bits[b]))
            if key in keys:
                raise ValueError(f"nondeterministic branch at {key}")
            keys.add(key)
        if self.has_entry:
            entry_keys = {tuple(r) for r in self.entry_in}
            if len(entry_keys) != self.entry_in.shape[0]:
                raise ValueError("nondeterministic entry section")
        reachable = set(self.to_state.tolist())
        reachable |= (set(self.entry_to.tolist()) if self.has_entry
                      else {self.init_state})
        coreach = set(self.from_state.tolist())
        if self.has_exit:
            coreach |= set(self.exit_from.tolist())
        for s in range(self.n_states):
            if s not in reachable or s not in coreach:
                raise ValueError(f"state {s} violates the trim property")


def walk(trellis: Trellis, input_bits: Sequence[int]) -> np.ndarray:
    """Encode ``input_bits`` along the trellis (deterministic branch walk)."""
    bits = np.asarray(input_bits, dtype=np.uint8)
    if bits.shape[0] % trellis.n_in:
        raise ValueError("input length not a multiple of n_in")
    steps = [tuple(bits[i:i + trellis.n_in])
             for i in range(0, bits.shape[0], trellis.n_in)]
    body = {(int(trellis.from_state[b]), tuple(trellis.in_bits[b])): b
            for b in range(trellis.from_state.shape[0])}
    out: list[int] = []
    if trellis.has_entry:
        entry = {tuple(trellis.entry_in[b]): b
                 for b in range(trellis.entry_to.shape[0])}
        state = int(trellis.entry_to[entry[steps[0]]])
        steps = steps[1:]
    else:
        state = trellis.init_state
    for step in steps:
        b = body[(state, step)]
        out.extend(int(x) for x in trellis.out_bits[b])
        state = int(trellis.to_state[b])
    if trellis.has_exit:
        rows = np.flatnonzero(trellis.exit_from == state)
        out.extend(int(x) for x in trellis.exit_out[rows[0]])
    return np.asarray(out, dtype=np.uint8)


@njit(cache=True, inline="always")
def _lse(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@njit(cache=True, inline="always")
def _acc(a, b, maxlog):
    if maxlog:
        return a if a > b else b
    return _lse(a, b)


@njit(cache=True, inline="always")
def _metric(bits, row, llrs, base, width):
    g = 0.0
    for j in range(width):
        x = llrs[base + j]
        g += 0.5 * x if bits[row, j] == 0 else -0.5 * x
    return g


@njit(cache=True)
def _bcjr_kernel(n_states, init_state, has_entry, has_exit,
                 body_from, body_to, body_in, body_out,
                 entry_to, entry_in, exit_from, exit_out,
                 priors, chans, n_in, n_out, maxlog,
                 llr_in, llr_out):
    n_body = (priors.shape[0] // n_in) - has_entry if n_in else 0
    if n_in == 0:
        n_body = (chans.shape[0] // n_out) - has_exit
    nb = body_from.shape[0]
    neg = -np.inf

    alpha = np.full((n_body + 1, n_states), neg)
    if has_entry:
        for e in range(entry_to.shape[0]):
            g = _metric(entry_in, e, priors, 0, n_in)
            s = entry_to[e]
            alpha[0, s] = _acc(alpha[0, s], g, maxlog)
    else:
        alpha[0, init_state] = 0.0
    for t in range(n_body):
        in_base = (t + has_entry) * n_in
        out_base = t * n_out
        for b in range(nb):
            fa = alpha[t, body_from[b]]
            if fa == neg:
                continue
            g = fa + _metric(body_in, b, priors, in_base, n_in) \
                + _metric(body_out, b, chans, out_base, n_out)
            s = body_to[b]
            alpha[t + 1, s] = _acc(alpha[t + 1, s], g, maxlog)

    beta = np.full((n_body + 1, n_states), neg)
    if has_exit:
        out_base = n_body * n_out
        for e in range(exit_from.shape[0]):
            g = _metric(exit_out, e, chans, out_base, n_out)
            s = exit_from[e]
            beta[n_body, s] = _acc(beta[n_body, s], g, maxlog)
    else:
        for s in range(n_states):
            beta[n_body, s] = 0.0
    for t in range(n_body - 1, -1, -1):
        in_base = (t + has_entry) * n_in
        out_base = t * n_out
        for b in range(nb):
            bb = beta[t + 1, body_to[b]]
            if bb == neg:
                continue
            g = bb + _metric(body_in, b, priors, in_base, n_in) \
                + _metric(body_out, b, chans, out_base, n_out)
            s = body_from[b]
            beta[t, s] = _acc(beta[t, s], g, maxlog)

    num0_in = np.full(priors.shape[0], neg)
    num1_in = np.full(priors.shape[0], neg)
    num0_out = np.full(chans.shape[0], neg)
    num1_out = np.full(chans.shape[0], neg)

    if has_entry:
        for e in range(entry_to.shape[0]):
            g = _metric(entry_in, e, priors, 0, n_in) + beta[0, entry_to[e]]
            for j in range(n_in):
                if entry_in[e, j] == 0:
                    num0_in[j] = _acc(num0_in[j], g, maxlog)
                else:
                    num1_in[j] = _acc(num1_in[j], g, maxlog)
    for t in range(n_body):
        in_base = (t + has_entry) * n_in
        out_base = t * n_out
        for b in range(nb):
            fa = alpha[t, body_from[b]]
            bb = beta[t + 1, body_to[b]]
            if fa == neg or bb == neg:
                continue
            g = fa + bb + _metric(body_in, b, priors, in_base, n_in) \
                + _metric(body_out, b, chans, out_base, n_out)
            for j in range(n_in):
                if body_in[b, j] == 0:
                    num0_in[in_base + j] = _acc(num0_in[in_base + j], g, maxlog)
                else:
                    num1_in[in_base + j] = _acc(num1_in[in_base + j], g, maxlog)
            for j in range(n_out):
                if body_out[b, j] == 0:
                    num0_out[out_base + j] = _acc(num0_out[out_base + j], g, maxlog)
                else:
                    num1_out[out_base + j] = _acc(num1_out[out_base + j], g, maxlog)
    if has_exit:
        out_base = n_body * n_out
        for e in range(exit_from.shape[0]):
            fa = alpha[n_body, exit_from[e]]
            if fa == neg:
                continue
            g = fa + _metric(exit_out, e, chans, out_base, n_out)
            for j in range(n_out):
                if exit_out[e, j] == 0:
                    num0_out[out_base + j] = _acc(num0_out[out_base + j], g, maxlog)
                else:
                    num1_out[out_base + j] = _acc(num1_out[out_base + j], g, maxlog)

    for i in range(priors.shape[0]):
        llr_in[i] = num0_in[i] - num1_in[i]
    for i in range(chans.shape[0]):
        llr_out[i] = num0_out[i] - num1_out[i]


def bcjr(trellis: Trellis, prior_llrs_in: np.ndarray,
         channel_llrs_out: np.ndarray, mode: str = "logmap",
         ) -> tuple[np.ndarray, np.ndarray]:
    """Soft-in/soft-out decode of one frame.

    Parameters
    ----------
    trellis : Trellis
    prior_llrs_in : array
        One LLR per input bit of the frame (entry + body sections).
    channel_llrs_out : array
        One LLR per output bit of the frame (body + exit sections).
    mode : {"logmap", "maxlog"}

    Returns
    -------
    (llr_in, llr_out)
        Posterior LLRs for every input bit and every output bit
        (positive ⇒ bit 0).  Frames start in the virtual entry (or
        ``init_state``); the final state is free unless the trellis has an
        exit section.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    priors = np.ascontiguousarray(prior_llrs_in, dtype=np.float64)
    chans = np.ascontiguousarray(channel_llrs_out, dtype=np.float64)
    if priors.shape[0] % trellis.n_in:
        raise ValueError("prior length not a multiple of n_in")
    if chans.shape[0] % trellis.n_out:
        raise ValueError("channel length not a multiple of n_out")
    in_steps = priors.shape[0] // trellis.n_in
    out_steps = chans.shape[0] // trellis.n_out
    n_body_in = in_steps - int(trellis.has_entry)
    n_body_out = out_steps - int(trellis.has_exit)
    if n_body_in != n_body_out or n_body_in < 0:
        raise ValueError(
            f"inconsistent frame: {in_steps} input steps and {out_steps} "
            f"output steps do not fit entry={trellis.has_entry}, "
            f"exit={trellis.has_exit}")
    llr_in = np.empty(priors.shape[0])
    llr_out = np.empty(chans.shape[0])
    _bcjr_kernel(
        trellis.n_states, trellis.init_state,
        int(trellis.has_entry), int(trellis.has_exit),
        trellis.from_state, trellis.to_state, trellis.in_bits, trellis.out_bits,
        trellis.entry_to if trellis.has_entry else _NO_BRANCHES,
        trellis.entry_in if trellis.has_entry else
        np.zeros((0, trellis.n_in), dtype=np.uint8),
        trellis.exit_from if trellis.has_exit else _NO_BRANCHES,
        trellis.exit_out if trellis.has_exit else
        np.zeros((0, trellis.n_out), dtype=np.uint8),
        priors, chans, trellis.n_in, trellis.n_out,
        1 if mode == "maxlog" else 0, llr_in, llr_out)
    return llr_in, llr_out


def build_precoder_trellis() -> Trellis:
    """2-state trellis of the 1T precoder: state = last unipolar bit."""
    from_state = []
    to_state = []
    in_bits = []
    out_bits = []
    for y in (0, 1):
        for x in (0, 1):
            from_state.append(y)
            to_state.append(y ^ x)
            in_bits.append([x])
            out_bits.append([y ^ x])
    return Trellis(n_states=2, n_in=1, n_out=1,
                   from_state=np.array(from_state), to_state=np.array(to_state),
                   in_bits=np.array(in_bits), out_bits=np.array(out_bits))


def build_rll_unipolar_trellis(code) -> Trellis:
    """Trellis of RLL encoder + precoder over unipolar output bits.

    Composite state = 2 × encoder state + polarity (the running precoder
    bit), so the state count is twice the encoder FSM's.  Entry section:
    priming on the first user pair from polarity 0.  Exit section: the
    flush block of each state.  2 input bits, 3 unipolar output bits per
    body step.
    """
    s_fsm = code.n_states

    def unipolar(block, y):
        out = []
        for bit in block:
            y ^= int(bit)
            out.append(y)
        return out, y

    from_state = []
    to_state = []
    in_bits = []
    out_bits = []
    for s in range(s_fsm):
        for y in (0, 1):
            for q in range(4):
                blk, y_end = unipolar(code.out_block[s, q], y)
                from_state.append(2 * s + y)
                to_state.append(2 * int(code.next_state[s, q]) + y_end)
                in_bits.append([q >> 1, q & 1])
                out_bits.append(blk)
    entry_to = [2 * p + 0 for p in range(4)]  # prime pair p, polarity 0
    entry_in = [[p >> 1, p & 1] for p in range(4)]
    exit_from = []
    exit_out = []
    for s in range(s_fsm):
        for y in (0, 1):
            blk, _ = unipolar(code.flush_block(s), y)
            exit_from.append(2 * s + y)
            exit_out.append(blk)
    return Trellis(n_states=2 * s_fsm, n_in=2, n_out=3,
                   from_state=np.array(from_state), to_state=np.array(to_state),
                   in_bits=np.array(in_bits), out_bits=np.array(out_bits),
                   entry_to=np.array(entry_to), entry_in=np.array(entry_in),
                   exit_from=np.array(exit_from), exit_out=np.array(exit_out))
