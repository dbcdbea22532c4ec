"""Sparse parity-check codes and the normalized min-sum decoder.

LLR convention used everywhere in this package: ``llr = log(p0 / p1)``.
Positive values favor bit 0, zero is an erasure, and the hard decision of
``x`` is ``0 if x >= 0`` (``sign_bit``).  Variable nodes add LLRs (``VAR``),
check nodes emit the sign-XOR with alpha-scaled minimum magnitude (``CHK``).

The decoder supports two schedules:

* ``"flooding"`` — every variable-to-check message (and every
  variable-to-constraint message when constraint nodes are enabled) is
  computed from the previous iteration's state, then every check and
  constraint node fires.
* ``"serial"`` — checks are processed one at a time with immediate effect;
  constraint nodes are interleaved in ascending order, node ``p`` firing
  after check ``m`` when ``p`` lies in ``[S*m/M, S*(m+1)/M)`` over the ``S``
  constraint nodes.  Roughly halves the iterations needed to converge.

Messages, following the factor-graph notation:

* ``t_n`` — channel input at variable ``n`` (clamped on entry).
* ``u_mn`` — variable ``n`` to check ``m``; sum of ``t_n``, the other checks'
  ``v``, and *all* incident constraint arms ``b``.
* ``v_mn`` — check ``m`` to variable ``n``; CHK over the other ``u`` of the
  row.  Initialized to 0 before iteration 1.
* ``w_n`` — output message: ``t_n`` plus all ``v`` (no ``b`` terms).

All sums saturate at ``±max_llr``; CHK (and the constraint arms' CO) never
exceed their inputs' magnitudes, so the clamp on sums bounds every message.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, TYPE_CHECKING

import numpy as np

from . import _kernels

if TYPE_CHECKING:  # pragma: no cover
    from .constraints import ConstraintBank

DEFAULT_MAX_LLR = 64.0
SCHEDULES = ("flooding", "serial")


def sign_bit(x: float) -> int:
    """Hard decision of an LLR: 0 if ``x >= 0`` else 1."""
    return 0 if x >= 0.0 else 1


def var_update(inputs: Sequence[float], max_llr: float = DEFAULT_MAX_LLR) -> float:
    """Variable-node operator: sum of the inputs, saturated to ``±max_llr``.

    Parameters
    ----------
    inputs : sequence of float
        Incoming LLRs (non-empty, finite).
    max_llr : float
        Saturation bound.

    Returns
    -------
    float
        ``clamp(sum(inputs))``, summed left to right.
    """
    if len(inputs) == 0:
        raise ValueError("var_update needs at least one input")
    acc = 0.0
    for x in inputs:
        acc += x
    return min(max(acc, -max_llr), max_llr)


def chk_update(inputs: Sequence[float], alpha: float) -> float:
    """Check-node operator: sign-XOR with alpha-scaled minimum magnitude.

    ``|result| = alpha * min(|inputs|)`` and ``sign_bit(result)`` is the XOR
    of the input sign bits.  A zero magnitude is emitted as ``0.0`` (an
    erasure input forces an erasure output).
    """
    if len(inputs) == 0:
        raise ValueError("chk_update needs at least one input")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    min_mag = abs(inputs[0])
    parity = 0
    for x in inputs:
        m = abs(x)
        if m < min_mag:
            min_mag = m
        if x < 0.0:
            parity ^= 1
    out = alpha * min_mag
    if out == 0.0:
        return 0.0
    return -out if parity else out


class SparseParityCheckMatrix:
    """Sparse binary parity-check matrix in CSR-like form.

    Edges are numbered row-major: edge ``row_ptr[m] + i`` connects check
    ``m`` to its i-th variable ``row_idx[row_ptr[m] + i]``.  Per-variable
    views of the same edges are kept in ``col_eid`` (edge ids sorted by
    check index) with the owning check in ``col_chk``.

    Attributes
    ----------
    n_vars, n_checks : int
        Matrix dimensions N and M.
    row_ptr, row_idx : int32 arrays
        Per-check adjacency (sorted variable indices).
    col_ptr, col_eid, col_chk : int32 arrays
        Per-variable adjacency.
    """

    def __init__(self, n_vars: int, rows: Iterable[Iterable[int]]):
        rows = [sorted(int(n) for n in r) for r in rows]
        n_checks = len(rows)
        if n_vars <= 0 or n_checks <= 0:
            raise ValueError("matrix must have at least one row and column")
        for m, r in enumerate(rows):
            if len(r) == 0:
                raise ValueError(f"check {m} has no variables")
            if len(set(r)) != len(r):
                raise ValueError(f"duplicate variable index in check {m}")
            if r[0] < 0 or r[-1] >= n_vars:
                raise ValueError(f"variable index out of range in check {m}")
        self.n_vars = int(n_vars)
        self.n_checks = n_checks
        self.row_ptr = np.zeros(n_checks + 1, dtype=np.int32)
        for m, r in enumerate(rows):
            self.row_ptr[m + 1] = self.row_ptr[m] + len(r)
        self.row_idx = np.concatenate([np.asarray(r, dtype=np.int32) for r in rows])
        cols: list[list[int]] = [[] for _ in range(n_vars)]
        for m, r in enumerate(rows):
            base = int(self.row_ptr[m])
            for i, n in enumerate(r):
                cols[n].append(base + i)  # ascending m => sorted by check
        self.col_ptr = np.zeros(n_vars + 1, dtype=np.int32)
        for n in range(n_vars):
            self.col_ptr[n + 1] = self.col_ptr[n] + len(cols[n])
        for n, c in enumerate(cols):
            if not c:
                raise ValueError(f"variable {n} has no incident check")
        self.col_eid = np.concatenate(
            [np.asarray(c, dtype=np.int32) for c in cols])
        row_of_edge = np.repeat(
            np.arange(n_checks, dtype=np.int32), np.diff(self.row_ptr)
        )
        self.col_chk = row_of_edge[self.col_eid]

    @property
    def n_edges(self) -> int:
        return int(self.row_idx.shape[0])

    def rows(self, m: int) -> np.ndarray:
        """Sorted variable indices of check ``m`` (the set N(m))."""
        return self.row_idx[self.row_ptr[m]:self.row_ptr[m + 1]]

    def cols(self, n: int) -> np.ndarray:
        """Sorted check indices incident to variable ``n`` (the set M(n))."""
        return self.col_chk[self.col_ptr[n]:self.col_ptr[n + 1]]

    def col_edges(self, n: int) -> np.ndarray:
        """Row-major edge ids incident to variable ``n``, sorted by check."""
        return self.col_eid[self.col_ptr[n]:self.col_ptr[n + 1]]

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def col_degrees(self) -> np.ndarray:
        return np.diff(self.col_ptr)

    @classmethod
    def from_dense(cls, h: np.ndarray) -> "SparseParityCheckMatrix":
        h = np.asarray(h)
        if h.ndim != 2:
            raise ValueError("dense H must be 2-D")
        rows = [list(np.flatnonzero(h[m] % 2)) for m in range(h.shape[0])]
        return cls(h.shape[1], rows)

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.n_checks, self.n_vars), dtype=np.uint8)
        for m in range(self.n_checks):
            h[m, self.rows(m)] = 1
        return h

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseParityCheckMatrix)
            and self.n_vars == other.n_vars
            and self.n_checks == other.n_checks
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.row_idx, other.row_idx)
        )

    def __repr__(self) -> str:
        return (f"SparseParityCheckMatrix(N={self.n_vars}, M={self.n_checks}, "
                f"edges={self.n_edges})")


@dataclass
class DecoderParams:
    """Knobs of one decode call.

    ``constraint_range`` is the half-open interval of systematic positions
    guarded by constraint nodes (a node is centered on every interior
    position of the interval); it must be empty when
    ``constraint_nodes_enabled`` is false.  ``early_exit`` stops on a zero
    syndrome; disable it to replicate fixed-iteration runs.
    """

    max_iterations: int = 16
    alpha: float = 0.75
    schedule: str = "serial"
    constraint_nodes_enabled: bool = False
    constraint_range: tuple[int, int] = (0, 0)
    max_llr: float = DEFAULT_MAX_LLR
    early_exit: bool = True

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        start, stop = self.constraint_range
        if start > stop:
            raise ValueError("constraint_range start exceeds stop")
        if not self.constraint_nodes_enabled and stop > start:
            raise ValueError("constraint_range must be empty when constraint "
                             "nodes are disabled")
        if self.max_llr <= 0.0:
            raise ValueError("max_llr must be positive")


@dataclass
class MessageStore:
    """All messages of one decoder state: t (input), u, v (edges), w (output)."""

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def zeros(cls, h: SparseParityCheckMatrix, t: np.ndarray) -> "MessageStore":
        e = h.n_edges
        return cls(t=np.asarray(t, dtype=np.float64),
                   u=np.zeros(e), v=np.zeros(e), w=np.zeros(h.n_vars))


class DecodeResult(NamedTuple):
    hard_bits: np.ndarray
    soft_out: np.ndarray
    iterations_run: int
    converged: bool


@dataclass
class TraceRecord:
    """Snapshot taken after one full iteration (for --trace and tests)."""

    iteration: int
    store: MessageStore
    a: np.ndarray
    b: np.ndarray
    syndrome_weight: int


def syndrome(h: SparseParityCheckMatrix, bits: np.ndarray) -> np.ndarray:
    """Per-check parity of a hard-bit vector; all-zero iff a codeword."""
    bits = np.asarray(bits)
    if bits.shape != (h.n_vars,):
        raise ValueError(f"bits length {bits.shape} does not match N={h.n_vars}")
    acc = np.bitwise_xor.reduceat(bits[h.row_idx].astype(np.uint8),
                                  h.row_ptr[:-1])
    return acc.astype(np.uint8)


def _bank_arrays(params: DecoderParams, constraints: "ConstraintBank | None",
                 n_vars: int):
    """Resolve (bank, S, first_center, a, b) for a decode call."""
    if not params.constraint_nodes_enabled:
        empty = np.zeros((0, 3))
        return None, 0, 0, empty.copy(), empty.copy()
    from .constraints import ConstraintBank

    bank = constraints
    if bank is None:
        bank = ConstraintBank.for_span(*params.constraint_range)
    bank.validate(n_vars)
    s = bank.n_nodes
    first = int(bank.center_indices[0]) if s else 0
    bank.a[:] = 0.0
    bank.b[:] = 0.0
    return bank, s, first, bank.a, bank.b


def decode(h: SparseParityCheckMatrix, params: DecoderParams,
           channel_llrs: np.ndarray,
           constraints: "ConstraintBank | None" = None) -> DecodeResult:
    """Min-sum decode, optionally with d=1 constraint nodes.

    Parameters
    ----------
    h : SparseParityCheckMatrix
    params : DecoderParams
    channel_llrs : array of length N
        Channel LLRs ``t_n``; clamped to ``±params.max_llr`` on entry.
    constraints : ConstraintBank, optional
        Constraint nodes to use when ``params.constraint_nodes_enabled``;
        built from ``params.constraint_range`` when omitted.  Its a/b
        messages are reset to zero before iteration 1 and hold the final
        messages afterwards.  Ignored when constraint nodes are disabled.

    Returns
    -------
    DecodeResult
        ``(hard_bits, soft_out, iterations_run, converged)`` where
        ``hard_bits[n] = sign_bit(w_n)`` and ``converged`` reports a zero
        syndrome at exit.
    """
    t = np.asarray(channel_llrs, dtype=np.float64)
    if t.shape != (h.n_vars,):
        raise ValueError(f"channel_llrs length {t.shape} does not match "
                         f"N={h.n_vars}")
    t = np.clip(t, -params.max_llr, params.max_llr)
    _, s, first, a, b = _bank_arrays(params, constraints, h.n_vars)
    e = h.n_edges
    v = np.zeros(e)
    w = np.empty(h.n_vars)
    hard = np.empty(h.n_vars, dtype=np.uint8)
    scratch = np.empty(int(h.row_degrees().max()))
    serial = params.schedule == "serial"
    u_all = np.empty(0 if serial else e)
    iters, weight = _kernels.decode_run(
        t, h.row_ptr, h.row_idx, h.col_ptr, h.col_eid, s, first,
        serial, params.alpha, _bank_beta(constraints, params), params.max_llr,
        params.max_iterations, params.early_exit,
        v, b, a, w, hard, scratch, u_all)
    return DecodeResult(hard, w, int(iters), weight == 0)


def _bank_beta(constraints: "ConstraintBank | None", params: DecoderParams) -> float:
    if not params.constraint_nodes_enabled:
        return 1.0  # never used: no constraint node fires
    if constraints is not None:
        return constraints.beta
    from .constraints import DEFAULT_BETA

    return DEFAULT_BETA


def decode_traced(h: SparseParityCheckMatrix, params: DecoderParams,
                  channel_llrs: np.ndarray,
                  constraints: "ConstraintBank | None" = None,
                  ) -> tuple[DecodeResult, list[TraceRecord]]:
    """Like :func:`decode` but returns per-iteration message snapshots.

    Runs the same kernels one iteration at a time, so the trajectory is
    bit-identical to :func:`decode`.  The u messages in each snapshot are
    the ones the *next* iteration's checks would see (recomputed from the
    snapshot's v/b state with the reference path).
    """
    t = np.asarray(channel_llrs, dtype=np.float64)
    if t.shape != (h.n_vars,):
        raise ValueError(f"channel_llrs length {t.shape} does not match "
                         f"N={h.n_vars}")
    t = np.clip(t, -params.max_llr, params.max_llr)
    bank, s, first, a, b = _bank_arrays(params, constraints, h.n_vars)
    beta = _bank_beta(bank, params)
    e = h.n_edges
    v = np.zeros(e)
    w = np.empty(h.n_vars)
    hard = np.empty(h.n_vars, dtype=np.uint8)
    scratch = np.empty(int(h.row_degrees().max()))
    serial = params.schedule == "serial"
    u_all = np.empty(0 if serial else e)
    trace: list[TraceRecord] = []
    iters = 0
    weight = -1
    for it in range(params.max_iterations):
        if serial:
            _kernels.iterate_serial(t, v, b, a, h.row_ptr, h.row_idx,
                                    h.col_ptr, h.col_eid, s, first,
                                    params.alpha, beta, params.max_llr, scratch)
        else:
            _kernels.iterate_flooding(t, v, b, a, h.row_ptr, h.row_idx,
                                      h.col_ptr, h.col_eid, s, first,
                                      params.alpha, beta, params.max_llr, u_all)
        weight = int(_kernels.outputs_and_syndrome(
            t, v, h.row_ptr, h.row_idx, h.col_ptr, h.col_eid,
            params.max_llr, w, hard))
        iters = it + 1
        u = variable_to_check_messages(h, t, v, bank, params.max_llr)
        trace.append(TraceRecord(
            iteration=iters,
            store=MessageStore(t=t.copy(), u=u, v=v.copy(), w=w.copy()),
            a=a.copy(), b=b.copy(), syndrome_weight=weight))
        if params.early_exit and weight == 0:
            break
    result = DecodeResult(hard, w, iters, weight == 0)
    return result, trace


# ---------------------------------------------------------------------------
# Straight-line reference paths (slow, used by trace and the test oracles).

def _b_sum_py(bank: "ConstraintBank | None", q: int, exclude: int = -1) -> float:
    if bank is None or bank.n_nodes == 0:
        return 0.0
    first = int(bank.center_indices[0])
    s = bank.n_nodes
    acc = 0.0
    for p, arm in ((q - 1 - first, 2), (q - first, 1), (q + 1 - first, 0)):
        if 0 <= p < s and p != exclude:
            acc += bank.b[p, arm]
    return acc


def variable_to_check_messages(h: SparseParityCheckMatrix, t: np.ndarray,
                               v: np.ndarray,
                               bank: "ConstraintBank | None" = None,
                               max_llr: float = DEFAULT_MAX_LLR) -> np.ndarray:
    """Reference computation of every u message from the (t, v, b) state."""
    u = np.empty(h.n_edges)
    for n in range(h.n_vars):
        edges = h.col_edges(n)
        for e in edges:
            acc = t[n]
            for e2 in edges:
                if e2 != e:
                    acc += v[e2]
            acc += _b_sum_py(bank, n)
            u[e] = min(max(acc, -max_llr), max_llr)
    return u


def check_to_variable_messages(h: SparseParityCheckMatrix, u: np.ndarray,
                               alpha: float) -> np.ndarray:
    """Reference computation of every v message from the u messages."""
    v = np.empty(h.n_edges)
    for m in range(h.n_checks):
        lo, hi = int(h.row_ptr[m]), int(h.row_ptr[m + 1])
        for e in range(lo, hi):
            others = [u[e2] for e2 in range(lo, hi) if e2 != e]
            v[e] = chk_update(others, alpha)
    return v


def output_messages(h: SparseParityCheckMatrix, t: np.ndarray, v: np.ndarray,
                    max_llr: float = DEFAULT_MAX_LLR) -> np.ndarray:
    """Reference computation of the output messages w."""
    w = np.empty(h.n_vars)
    for n in range(h.n_vars):
        acc = t[n]
        for e in h.col_edges(n):
            acc += v[e]
        w[n] = min(max(acc, -max_llr), max_llr)
    return w
