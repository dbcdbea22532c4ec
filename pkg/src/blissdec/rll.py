"""Rate-2/3 (d=1, k=7) RLL codec and the 1T precoder.

The encoder is a look-ahead sliding-block code over user-bit pairs: each
pair normally maps to a 3-bit *basic* block (00→101, 01→100, 10→001,
11→010), but when the current pair's block ends in 1 and the next pair's
block starts with 1 (which would put two 1s adjacent, violating d=1), the
two blocks are *substituted* by a 6-bit group whose second half is 000:

    (00,00)→101 000   (00,01)→100 000   (10,00)→001 000   (10,01)→010 000

Operationally this is a Mealy machine over *pending* pairs: states 0..3
hold the pair whose block is not yet emitted, state 4 means the pending
block is the predetermined 000 of a substitution.  Priming maps the first
pair p straight to pending state p with no output; a frame ends by flushing
the pending state.  The flush block of a state equals its output on input
10 (whose basic block starts with 0, so input 10 never substitutes) — this
keeps the table file to exactly the 20 (state, input) lines.

The decoder is sliding-block with a 3-block window (previous, current,
next): a 000 block decodes by looking at the previous block; a block
followed by 000 decodes through the substitution table; anything else
decodes through the basic table.  One flipped channel bit therefore
corrupts at most 3 consecutive user pairs.

The 1T precoder integrates modulo 2 (y_n = y_{n-1} XOR x_n, y_{-1} = 0),
turning the differential d=1 stream into a unipolar stream with minimum
run length 2 — i.e. free of the 010/101 patterns the constraint nodes
penalize.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from numba import njit

DECODER_WINDOW = 3  # blocks (= user pairs) a single channel-bit error can reach

DEFAULT_TABLE = """\
# rate-2/3 (d=1, k=7) look-ahead RLL code, pending-pair Mealy form
# states 0..3: pending pair 00/01/10/11; state 4: pending substitution 000
# line format: state input_pair next_state output_block
0 00 4 101
0 01 4 100
0 10 2 101
0 11 3 101
1 00 0 100
1 01 1 100
1 10 2 100
1 11 3 100
2 00 4 001
2 01 4 010
2 10 2 001
2 11 3 001
3 00 0 010
3 01 1 010
3 10 2 010
3 11 3 010
4 00 0 000
4 01 1 000
4 10 2 000
4 11 3 000
"""


@njit(cache=True)
def _encode_kernel(pairs, next_state, out_block, out):
    n_pairs = pairs.shape[0]
    s = pairs[0]  # priming: first pair becomes the pending state
    for i in range(1, n_pairs):
        q = pairs[i]
        base = 3 * (i - 1)
        out[base] = out_block[s, q, 0]
        out[base + 1] = out_block[s, q, 1]
        out[base + 2] = out_block[s, q, 2]
        s = next_state[s, q]
    base = 3 * (n_pairs - 1)  # flush = output on input 10 (index 2)
    out[base] = out_block[s, 2, 0]
    out[base + 1] = out_block[s, 2, 1]
    out[base + 2] = out_block[s, 2, 2]


@njit(cache=True)
def _decode_kernel(blocks, basic_inv, q_after, p_sub, out_pairs):
    n = blocks.shape[0]
    for i in range(n):
        d = blocks[i]
        if d == 0:  # substitution tail: pair identified by the previous block
            p = q_after[blocks[i - 1]] if i > 0 else 0
        elif i + 1 < n and blocks[i + 1] == 0:  # substitution head
            p = p_sub[d]
        else:
            p = basic_inv[d]
        out_pairs[i] = p


@dataclass
class RllCode:
    """A table-driven rate-2/3 RLL code (see module docstring).

    ``next_state[s, q]`` / ``out_block[s, q]`` define the Mealy machine over
    pair values q (first user bit is the high bit).  States 0..3 must be the
    pending-pair states in pair-value order (the priming convention); any
    further states are substitution states.
    """

    d: int = 1
    k: int = 7
    rate: Fraction = Fraction(2, 3)
    next_state: np.ndarray = None  # type: ignore[assignment]
    out_block: np.ndarray = None   # type: ignore[assignment]
    decoder_window: int = DECODER_WINDOW
    # decoder tables, derived from the FSM in __post_init__
    _basic_inv: np.ndarray = field(init=False, repr=False)
    _q_after: np.ndarray = field(init=False, repr=False)
    _p_sub: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.next_state is None:
            other = RllCode.from_table_text(DEFAULT_TABLE)
            self.next_state = other.next_state
            self.out_block = other.out_block
        self.next_state = np.asarray(self.next_state, dtype=np.int64)
        self.out_block = np.asarray(self.out_block, dtype=np.uint8)
        s = self.n_states
        if self.next_state.shape != (s, 4) or self.out_block.shape != (s, 4, 3):
            raise ValueError("FSM tables must have shapes (S,4) and (S,4,3)")
        if s < 5:
            raise ValueError("need the 4 pending states plus a substitution state")
        if self.next_state.min() < 0 or self.next_state.max() >= s:
            raise ValueError("next_state entries out of range")
        self._derive_decoder_tables()

    def _derive_decoder_tables(self) -> None:
        # A transition substitutes iff its successor state flushes 000.
        def packed(block) -> int:
            return int(block[0]) * 4 + int(block[1]) * 2 + int(block[2])

        self._basic_inv = np.zeros(8, dtype=np.int64)
        self._q_after = np.zeros(8, dtype=np.int64)
        self._p_sub = np.zeros(8, dtype=np.int64)
        for p in range(4):
            self._basic_inv[packed(self.flush_block(p))] = p
        for p in range(4):
            for q in range(4):
                nxt = int(self.next_state[p, q])
                if packed(self.flush_block(nxt)) == 0:
                    head = packed(self.out_block[p, q])
                    self._q_after[head] = q
                    self._p_sub[head] = p

    @property
    def n_states(self) -> int:
        return int(self.next_state.shape[0])

    def flush_block(self, state: int) -> np.ndarray:
        """Terminating output of a state (= its block on input pair 10)."""
        return self.out_block[state, 2]

    @classmethod
    def default(cls) -> "RllCode":
        return cls.from_table_text(DEFAULT_TABLE)

    @classmethod
    def from_table_text(cls, text: str, d: int = 1, k: int = 7) -> "RllCode":
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 4:
                raise ValueError(f"table line {lineno}: expected "
                                 f"'state input next output', got {raw!r}")
            s = int(tok[0])
            if len(tok[1]) != 2 or set(tok[1]) - {"0", "1"}:
                raise ValueError(f"table line {lineno}: bad input pair {tok[1]!r}")
            q = int(tok[1], 2)
            nxt = int(tok[2])
            if len(tok[3]) != 3 or set(tok[3]) - {"0", "1"}:
                raise ValueError(f"table line {lineno}: bad output block {tok[3]!r}")
            entries[(s, q)] = (nxt, [int(b) for b in tok[3]])
        n_states = 1 + max(max(s for s, _ in entries),
                           max(nxt for nxt, _ in entries.values()))
        next_state = np.zeros((n_states, 4), dtype=np.int64)
        out_block = np.zeros((n_states, 4, 3), dtype=np.uint8)
        for s in range(n_states):
            for q in range(4):
                if (s, q) not in entries:
                    raise ValueError(f"table misses transition for state {s}, "
                                     f"input {q:02b}")
                next_state[s, q], out_block[s, q] = entries[(s, q)]
        return cls(d=d, k=k, next_state=next_state, out_block=out_block)

    @classmethod
    def from_table_file(cls, path: str | Path) -> "RllCode":
        return cls.from_table_text(Path(path).read_text())

    def to_table_text(self) -> str:
        lines = ["# RLL code table: state input_pair next_state output_block"]
        for s in range(self.n_states):
            for q in range(4):
                blk = "".join(str(int(b)) for b in self.out_block[s, q])
                lines.append(f"{s} {q:02b} {int(self.next_state[s, q])} {blk}")
        return "\n".join(lines) + "\n"


def rll_encode(user_bits: np.ndarray, code: RllCode) -> np.ndarray:
    """Encode user bits (even count) into 3/2 as many differential bits."""
    user_bits = np.asarray(user_bits, dtype=np.uint8)
    if user_bits.ndim != 1:
        raise ValueError("user_bits must be 1-D")
    if user_bits.shape[0] % 2:
        raise ValueError(f"user_bits length {user_bits.shape[0]} is odd; "
                         "the encoder consumes pairs")
    if user_bits.shape[0] == 0:
        return np.zeros(0, dtype=np.uint8)
    pairs = (user_bits[0::2].astype(np.int64) * 2 + user_bits[1::2])
    out = np.empty(3 * pairs.shape[0], dtype=np.uint8)
    _encode_kernel(pairs, code.next_state, code.out_block, out)
    return out


def rll_decode(channel_bits: np.ndarray, code: RllCode) -> np.ndarray:
    """Sliding-block decode; exact inverse of :func:`rll_encode` on valid input."""
    channel_bits = np.asarray(channel_bits, dtype=np.uint8)
    if channel_bits.ndim != 1:
        raise ValueError("channel_bits must be 1-D")
    if channel_bits.shape[0] % 3:
        raise ValueError(f"channel_bits length {channel_bits.shape[0]} not "
                         "divisible by 3")
    n_blocks = channel_bits.shape[0] // 3
    if n_blocks == 0:
        return np.zeros(0, dtype=np.uint8)
    b = channel_bits.reshape(n_blocks, 3).astype(np.int64)
    blocks = b[:, 0] * 4 + b[:, 1] * 2 + b[:, 2]
    pairs = np.empty(n_blocks, dtype=np.int64)
    _decode_kernel(blocks, code._basic_inv, code._q_after, code._p_sub, pairs)
    out = np.empty(2 * n_blocks, dtype=np.uint8)
    out[0::2] = pairs >> 1
    out[1::2] = pairs & 1
    return out


@dataclass
class PrecoderState:
    """Carried precoder memory: the last emitted unipolar bit."""

    last_bit: int = 0


def precode(diff_bits: np.ndarray, state: PrecoderState | None = None) -> np.ndarray:
    """1T precoder: y_n = y_{n-1} XOR x_n (modulo-2 integration).

    ``state`` (default: fresh y=0) is advanced in place so frames can be
    chained.
    """
    diff_bits = np.asarray(diff_bits, dtype=np.uint8)
    if state is None:
        state = PrecoderState()
    out = (np.cumsum(diff_bits, dtype=np.int64) + state.last_bit) & 1
    out = out.astype(np.uint8)
    if out.shape[0]:
        state.last_bit = int(out[-1])
    return out


def inverse_precode(unipolar_bits: np.ndarray, initial: int = 0) -> np.ndarray:
    """Differentiate modulo 2: x_n = y_n XOR y_{n-1}; inverse of :func:`precode`."""
    y = np.asarray(unipolar_bits, dtype=np.uint8)
    if y.shape[0] == 0:
        return y.copy()
    prev = np.concatenate(([np.uint8(initial & 1)], y[:-1]))
    return y ^ prev
