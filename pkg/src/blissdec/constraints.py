"""d=1 run-length constraint nodes for the LDPC factor graph.

A constraint node guards three consecutive systematic positions
``(n-1, n, n+1)`` and penalizes the forbidden unipolar patterns 010 and 101.
Each node has degree 3: it receives one message ``a`` per arm and emits one
message ``b`` per arm through the output functions CO0/CO1/CO2.  Every arm's
output depends only on the *other two* arms' inputs (extrinsic rule), its
magnitude is ``beta * min`` of their magnitudes or zero, and any erasure
(zero) input forces a zero output.

Sign logic (LLR > 0 means bit 0), chosen so each arm pushes its variable
away from completing a forbidden pattern:

===== ==================== ==========================================
arm   inputs               output sign
===== ==================== ==========================================
CO0   center, right        (+,-) -> + (blocks ?01 -> 101); (-,+) -> -
CO1   left, right          (+,+) -> + (blocks 0?0 -> 010); (-,-) -> -
CO2   left, center         (+,-) -> - (blocks 01? -> 010); (-,+) -> +
===== ==================== ==========================================

All other sign combinations yield 0: the neighbors cannot complete a
forbidden pattern, so there is nothing to push against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .ldpc import DecoderParams, MessageStore, SparseParityCheckMatrix

DEFAULT_BETA = 0.75


class Arm(IntEnum):
    """Output arm of a constraint node: which variable the b-message targets."""

    LEFT = 0    # CO0, toward position n-1; inputs (a_center, a_right)
    CENTER = 1  # CO1, toward position n;   inputs (a_left, a_right)
    RIGHT = 2   # CO2, toward position n+1; inputs (a_left, a_center)


def co(arm: Arm | int, x: float, y: float, beta: float = 1.0) -> float:
    """Constraint-node output function for one arm.

    Parameters
    ----------
    arm : Arm
        Which output arm; fixes which sign table applies.
    x, y : float
        The other two arms' incoming LLRs, in ascending position order
        (see :class:`Arm`).
    beta : float
        Scaling factor in (0, 1].

    Returns
    -------
    float
        0, or ``±beta * min(|x|, |y|)`` per the sign table.
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    if x == 0.0 or y == 0.0:
        return 0.0
    mag = beta * min(abs(x), abs(y))
    xp = x > 0.0
    yp = y > 0.0
    if arm == Arm.CENTER:
        if xp and yp:
            return mag
        if not xp and not yp:
            return -mag
        return 0.0
    if arm == Arm.RIGHT:
        if xp and not yp:
            return -mag
        if not xp and yp:
            return mag
        return 0.0
    if arm == Arm.LEFT:
        if xp and not yp:
            return mag
        if not xp and yp:
            return -mag
        return 0.0
    raise ValueError(f"unknown arm {arm!r}")


@dataclass
class ConstraintBank:
    """The constraint nodes of one decode: centers, messages, scaling.

    ``center_indices`` holds the guarded center positions (consecutive,
    ascending); node ``p`` is centered on ``center_indices[p]`` and its arms
    0/1/2 target positions center-1 / center / center+1.  ``a`` and ``b``
    are (S, 3) message arrays living across iterations; :func:`~blissdec.ldpc.decode`
    zeroes them before iteration 1 and leaves the final messages behind.
    """

    center_indices: np.ndarray
    beta: float = DEFAULT_BETA
    a: np.ndarray = field(default=None)  # type: ignore[assignment]
    b: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.center_indices = np.asarray(self.center_indices, dtype=np.int64)
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        s = self.n_nodes
        if s and np.any(np.diff(self.center_indices) != 1):
            raise ValueError("center_indices must be consecutive ascending")
        if self.a is None:
            self.a = np.zeros((s, 3))
        if self.b is None:
            self.b = np.zeros((s, 3))
        if self.a.shape != (s, 3) or self.b.shape != (s, 3):
            raise ValueError("a/b must have shape (n_nodes, 3)")

    @property
    def n_nodes(self) -> int:
        return int(self.center_indices.shape[0])

    @classmethod
    def for_span(cls, start: int, stop: int,
                 beta: float = DEFAULT_BETA) -> "ConstraintBank":
        """Bank guarding the systematic interval ``[start, stop)``.

        A node is centered on every position whose full triple lies inside
        the interval, i.e. centers ``start+1 .. stop-2``; intervals shorter
        than 3 yield an empty bank.
        """
        centers = np.arange(start + 1, max(stop - 1, start + 1), dtype=np.int64)
        return cls(center_indices=centers, beta=beta)

    def validate(self, n_vars: int) -> None:
        if self.n_nodes == 0:
            return
        first, last = int(self.center_indices[0]), int(self.center_indices[-1])
        if first < 1 or last > n_vars - 2:
            raise ValueError("constraint node triple extends outside the code")


def constraint_pass(bank: ConstraintBank, store: "MessageStore",
                    h: "SparseParityCheckMatrix",
                    params: "DecoderParams") -> np.ndarray:
    """One sequential pass over all constraint nodes (reference path).

    For each node in ascending order: compute the three incoming a-messages
    (channel term, all check messages v, and the other nodes' b arms — never
    the node's own b), then overwrite the node's b arms via :func:`co`.
    Later nodes see earlier nodes' fresh b values, matching the serial
    decoder's semantics.  Returns ``bank.b``.
    """
    from .ldpc import _b_sum_py

    t, v = store.t, store.v
    bound = params.max_llr
    for p in range(bank.n_nodes):
        c = int(bank.center_indices[p])
        arms = np.empty(3)
        for k, q in enumerate((c - 1, c, c + 1)):
            acc = t[q]
            for e in h.col_edges(q):
                acc += v[e]
            acc += _b_sum_py(bank, q, exclude=p)
            arms[k] = min(max(acc, -bound), bound)
        bank.a[p, :] = arms
        bank.b[p, 0] = co(Arm.LEFT, arms[1], arms[2], bank.beta)
        bank.b[p, 1] = co(Arm.CENTER, arms[0], arms[2], bank.beta)
        bank.b[p, 2] = co(Arm.RIGHT, arms[0], arms[1], bank.beta)
    return bank.b


def count_violations(bits: np.ndarray, span: tuple[int, int] | None = None) -> int:
    """Number of d=1 violations (010/101 centers) in ``bits``.

    Counts positions ``n`` inside ``span`` (default: the whole vector) with
    ``bits[n-1] != bits[n]`` and ``bits[n] != bits[n+1]``; positions without
    both neighbors are never counted.
    """
    bits = np.asarray(bits)
    if bits.ndim != 1:
        raise ValueError("bits must be 1-D")
    start, stop = (0, bits.shape[0]) if span is None else span
    if not 0 <= start <= stop <= bits.shape[0]:
        raise ValueError(f"span {span} outside bits of length {bits.shape[0]}")
    lo = max(start, 1)
    hi = min(stop, bits.shape[0] - 1)
    if hi <= lo:
        return 0
    mid = bits[lo:hi]
    return int(np.count_nonzero((bits[lo - 1:hi - 1] != mid)
                                & (mid != bits[lo + 1:hi + 1])))
