"""Pseudo-random regular LDPC code construction and systematic encoding.

Codes are built by progressive edge growth (PEG): variables are processed
in order, and each new edge attaches to a check that is currently
unreachable from the variable — or, failing that, as far away as possible
but never closer than distance 5 (which would close a 4-cycle).  Among the
eligible checks the one with the lowest current degree wins, ties broken by
a seeded generator, which keeps row weights within ±1 of the mean (exactly
regular when J·N/M is integral).  Construction is deterministic given the
seed.

The systematic encoder comes from GF(2) Gaussian elimination with pivots
chosen right-to-left, so the parity columns sit at the end of the permuted
layout and the systematic span is the prefix — the span the d=1 constraint
nodes guard.  ``SystematicEncoder.h`` is the column-permuted matrix the
decoder should use; codewords are produced in that layout.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .ldpc import SparseParityCheckMatrix


class CodeConstructionError(Exception):
    """PEG could not place all edges within the retry budget."""


class RankDeficientError(Exception):
    """H has dependent rows; no systematic encoder exists for it."""


@dataclass(frozen=True)
class CodeSpec:
    """Construction request: (n, m) dimensions, column weight, seed."""

    n: int
    m: int
    col_weight: int = 3
    seed: int = 0
    target_girth: int = 6

    def __post_init__(self) -> None:
        if not 0 < self.m < self.n:
            raise ValueError(f"need 0 < m < n, got n={self.n}, m={self.m}")
        if self.col_weight < 2:
            raise ValueError("col_weight must be >= 2")
        if self.col_weight > self.m:
            raise ValueError("col_weight exceeds the number of checks")
        if self.target_girth not in (4, 6):
            raise ValueError("target_girth must be 4 (no constraint) or 6")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")

    @property
    def rate(self) -> float:
        return 1.0 - self.m / self.n

    @property
    def mean_row_weight(self) -> float:
        return self.col_weight * self.n / self.m


@njit(cache=True, inline="always")
def _lcg(state):
    return (state * np.uint64(6364136223846793005)
            + np.uint64(1442695040888963407))


@njit(cache=True)
def _peg_build(n, m, j, cap, min_dist, seed,
               var_adj, var_deg, chk_adj, chk_deg,
               dist_chk, seen_var, fv, fc, cand):
    state = np.uint64(seed * 2 + 1)
    for _ in range(8):
        state = _lcg(state)
    for v in range(n):
        for _slot in range(j):
            # BFS from v over the current graph; checks live at odd depths.
            for c in range(m):
                dist_chk[c] = -1
            for u in range(n):
                seen_var[u] = 0
            seen_var[v] = 1
            fv[0] = v
            nv = 1
            depth = 0
            max_d = -1
            while nv > 0:
                nc = 0
                for i in range(nv):
                    u = fv[i]
                    for e in range(var_deg[u]):
                        c = var_adj[u, e]
                        if dist_chk[c] < 0:
                            dist_chk[c] = depth + 1
                            max_d = depth + 1
                            fc[nc] = c
                            nc += 1
                if nc == 0:
                    break
                nv = 0
                for i in range(nc):
                    c = fc[i]
                    for e in range(chk_deg[c]):
                        u = chk_adj[c, e]
                        if seen_var[u] == 0:
                            seen_var[u] = 1
                            fv[nv] = u
                            nv += 1
                depth += 2
            # Candidate pool: unreachable checks first, else the farthest
            # ring not below min_dist; always under the degree cap.
            ncand = 0
            for c in range(m):
                if dist_chk[c] < 0 and chk_deg[c] < cap:
                    cand[ncand] = c
                    ncand += 1
            if ncand == 0:
                d = max_d
                while d >= min_dist and ncand == 0:
                    for c in range(m):
                        if dist_chk[c] == d and chk_deg[c] < cap:
                            cand[ncand] = c
                            ncand += 1
                    d -= 2
            if ncand == 0:
                return 0  # placement would close a short cycle; retry
            best = cap + 1
            for i in range(ncand):
                if chk_deg[cand[i]] < best:
                    best = chk_deg[cand[i]]
            nties = 0
            for i in range(ncand):
                if chk_deg[cand[i]] == best:
                    cand[nties] = cand[i]
                    nties += 1
            state = _lcg(state)
            c = cand[int((state >> np.uint64(33)) % np.uint64(nties))]
            var_adj[v, var_deg[v]] = c
            var_deg[v] += 1
            chk_adj[c, chk_deg[c]] = v
            chk_deg[c] += 1
    return 1


def has_4cycles(h: SparseParityCheckMatrix) -> bool:
    """True iff two checks share two variables (girth 4)."""
    a = h.to_dense().astype(np.float32)
    overlap = a @ a.T
    np.fill_diagonal(overlap, 0.0)
    return bool(overlap.max() >= 2.0)


def generate_code(spec: CodeSpec, max_attempts: int = 20) -> SparseParityCheckMatrix:
    """PEG construction per ``spec``; deterministic given ``spec.seed``.

    Raises
    ------
    CodeConstructionError
        If no attempt yields column weight J, row weights within ±1 of the
        mean, and girth ≥ ``target_girth``.
    """
    n, m, j = spec.n, spec.m, spec.col_weight
    cap = -(-j * n // m)  # ceil of the mean row weight
    min_dist = 5 if spec.target_girth >= 6 else 3
    for attempt in range(max_attempts):
        seed = spec.seed * 1000003 + attempt
        var_adj = np.zeros((n, j), dtype=np.int32)
        var_deg = np.zeros(n, dtype=np.int32)
        chk_adj = np.zeros((m, cap), dtype=np.int32)
        chk_deg = np.zeros(m, dtype=np.int32)
        ok = _peg_build(n, m, j, cap, min_dist, seed,
                        var_adj, var_deg, chk_adj, chk_deg,
                        np.empty(m, dtype=np.int32), np.empty(n, dtype=np.uint8),
                        np.empty(n, dtype=np.int32), np.empty(m, dtype=np.int32),
                        np.empty(m, dtype=np.int32))
        if not ok:
            continue
        rows = [sorted(chk_adj[c, :chk_deg[c]].tolist()) for c in range(m)]
        h = SparseParityCheckMatrix(n, rows)
        degs = h.row_degrees()
        balanced = (degs.max() - degs.min() <= 1
                    and abs(degs.mean() - spec.mean_row_weight) < 1e-9)
        if balanced and not (spec.target_girth >= 6 and has_4cycles(h)):
            return h
    raise CodeConstructionError(
        f"no girth-{spec.target_girth} placement for n={n}, m={m}, J={j} "
        f"after {max_attempts} attempts (seed {spec.seed})")


@dataclass
class SystematicEncoder:
    """Parity solver over a column-permuted H with parity columns last.

    ``h`` is the permuted matrix (use it for decoding);
    ``column_permutation[i]`` is the original column now at layout position
    ``i``; ``parity_solver`` maps systematic bits to parity bits.
    """

    h: SparseParityCheckMatrix
    parity_solver: np.ndarray
    column_permutation: np.ndarray

    def __post_init__(self) -> None:
        self._solver_f32 = None

    @property
    def n(self) -> int:
        return self.h.n_vars

    @property
    def m(self) -> int:
        return self.h.n_checks

    @property
    def n_sys(self) -> int:
        return self.h.n_vars - self.h.n_checks

    def parity_batch(self, systematic: np.ndarray) -> np.ndarray:
        """Parity bits for a (frames, n_sys) batch of systematic bits."""
        if self._solver_f32 is None:
            self._solver_f32 = self.parity_solver.astype(np.float32).T
        acc = systematic.astype(np.float32) @ self._solver_f32
        return (acc.astype(np.int64) & 1).astype(np.uint8)


def _gf2_row_reduce(work: np.ndarray) -> list[int]:
    """In-place RREF with right-to-left pivot preference; returns pivot cols."""
    m, n = work.shape
    pivots: list[int] = []
    r = 0
    for c in range(n - 1, -1, -1):
        hot = np.flatnonzero(work[r:, c])
        if hot.size == 0:
            continue
        rr = r + int(hot[0])
        if rr != r:
            work[[r, rr]] = work[[rr, r]]
        others = np.flatnonzero(work[:, c])
        others = others[others != r]
        work[others] ^= work[r]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return pivots


def derive_systematic_encoder(h: SparseParityCheckMatrix) -> SystematicEncoder:
    """Gaussian elimination over GF(2) → systematic encoder.

    Pivot columns become the parity positions (placed last in the layout);
    the reduced rows read off the parity equations directly.  Raises
    :class:`RankDeficientError` when H has dependent rows, in which case the
    caller should regenerate the code with the next seed.
    """
    work = h.to_dense()
    m, n = work.shape
    pivots = _gf2_row_reduce(work)
    if len(pivots) < m:
        raise RankDeficientError(
            f"rank {len(pivots)} < M={m}; regenerate with another seed")
    parity_cols = np.sort(np.asarray(pivots, dtype=np.int64))
    sys_cols = np.setdiff1d(np.arange(n, dtype=np.int64), parity_cols)
    layout = np.concatenate([sys_cols, parity_cols])
    solver = np.zeros((m, n - m), dtype=np.uint8)
    sys_block = work[:, sys_cols]
    for r, c in enumerate(pivots):
        solver[np.searchsorted(parity_cols, c)] = sys_block[r]
    h_layout = SparseParityCheckMatrix.from_dense(h.to_dense()[:, layout])
    return SystematicEncoder(h=h_layout, parity_solver=solver,
                             column_permutation=layout)


def ldpc_encode(encoder: SystematicEncoder, systematic_bits: np.ndarray) -> np.ndarray:
    """Assemble the codeword [systematic | parity] in the encoder's layout."""
    s = np.asarray(systematic_bits, dtype=np.uint8)
    if s.shape != (encoder.n_sys,):
        raise ValueError(f"systematic_bits length {s.shape} != "
                         f"N-M={encoder.n_sys}")
    parity = (encoder.parity_solver.astype(np.int64) @ s.astype(np.int64)) & 1
    return np.concatenate([s, parity.astype(np.uint8)])


def build_systematic_code(spec: CodeSpec, max_attempts: int = 10) -> SystematicEncoder:
    """Generate + derive, regenerating on rank deficiency."""
    last: Exception | None = None
    for k in range(max_attempts):
        h = generate_code(replace(spec, seed=spec.seed + k))
        try:
            return derive_systematic_encoder(h)
        except RankDeficientError as exc:  # pragma: no cover - rare
            last = exc
    raise CodeConstructionError(
        f"every candidate H was rank deficient: {last}")  # pragma: no cover


def save_encoder_sidecar(encoder: SystematicEncoder, path,
                         spec: CodeSpec | None = None) -> None:
    """Write the encoder's solver + layout next to an alist file.

    The alist holds the layout-permuted H; this ``.npz`` holds everything
    else needed to *encode*: the parity equations (bit-packed) and the
    column permutation back to the as-generated matrix, plus the spec
    numbers for provenance.
    """
    meta = np.array([encoder.n, encoder.m,
                     spec.col_weight if spec else 0,
                     spec.seed if spec else -1,
                     spec.target_girth if spec else 0], dtype=np.int64)
    np.savez(path,
             solver_packed=np.packbits(encoder.parity_solver, axis=1),
             n_sys=np.int64(encoder.n_sys),
             column_permutation=encoder.column_permutation,
             meta=meta)


def load_encoder_sidecar(h_layout: SparseParityCheckMatrix,
                         path) -> SystematicEncoder:
    """Rebuild a :class:`SystematicEncoder` from its alist + sidecar pair."""
    with np.load(path) as data:
        n_sys = int(data["n_sys"])
        solver = np.unpackbits(data["solver_packed"], axis=1,
                               count=n_sys).astype(np.uint8)
        perm = data["column_permutation"].astype(np.int64)
    if solver.shape != (h_layout.n_checks, n_sys) or \
            n_sys != h_layout.n_vars - h_layout.n_checks:
        raise ValueError(f"sidecar {path} does not match the code's "
                         f"(N, M) = ({h_layout.n_vars}, {h_layout.n_checks})")
    return SystematicEncoder(h=h_layout, parity_solver=solver,
                             column_permutation=perm)
