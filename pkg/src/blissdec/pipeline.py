"""End-to-end Bliss-scheme simulation.

Encode chain (modified concatenation): user bits → rate-2/3 RLL encode →
1T precode → unipolar *systematic channel bits* (free of 010/101 by
construction) → systematic LDPC parity over those bits → parity bits RLL
encoded + precoded → *parity channel bits*.  The LDPC codeword is
``[systematic channel bits | parity bits]`` (length N); the transmitted
unipolar stream is ``[systematic channel bits | parity channel bits]``.

Two receiver front ends build the decoder's channel LLRs:

* ``"genie"`` — the parity bits are transmitted raw (no RLL leg), and every
  LDPC bit position gets the AWGN LLR ``2·r/σ²`` directly.  Isolates the
  constraint-node gain from RLL-SISO effects.
* ``"fullbliss"`` — the full chain: systematic positions get per-bit LLRs,
  parity positions get BCJR posteriors over the RLL+precoder trellis
  applied to the received parity channel segment.

``run_sweep`` runs paired plain/constrained decodes on identical noise
(common random numbers) per SNR point and reports per-point
:class:`BerRecord` rows.  ``ci_halfwidth`` is the 95% normal half-width of
the *paired per-frame BER difference* (plain − constrained), the quantity
that certifies the constraint-node gain.  BERs are counted over LDPC
codeword bits; raw BER is counted over transmitted channel bits before
decoding.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np

from . import _kernels
from .alist import read_alist
from .codes import CodeSpec, SystematicEncoder, build_systematic_code, \
    derive_systematic_encoder, ldpc_encode
from .constraints import count_violations
from .ldpc import DEFAULT_MAX_LLR, SCHEDULES, SparseParityCheckMatrix
from .rll import RllCode, precode, rll_encode
from .trellis import bcjr, build_rll_unipolar_trellis

FRONT_ENDS = ("genie", "fullbliss")
SNR_UNITS = ("ebn0", "raw")
NOISELESS_LLR = 1000.0  # stand-in for 2r/sigma^2 when sigma = 0

# Operating points of the reference experiments (column weight 3; the
# second point uses M=312 so the systematic span stays pair- and
# triple-divisible for the RLL front end, rate 0.9549).
PRESET_1728 = CodeSpec(n=1728, m=162, col_weight=3, seed=1)
PRESET_6912 = CodeSpec(n=6912, m=312, col_weight=3, seed=1)


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def user_bits_per_frame(n_sys: int) -> int:
    """User payload filling a systematic span of ``n_sys`` channel bits."""
    if n_sys % 3:
        raise ValueError(f"systematic span {n_sys} not divisible by 3; "
                         "the rate-2/3 RLL output cannot fill it")
    return 2 * n_sys // 3


@dataclass
class FrameLayout:
    """Geometry of one frame: systematic span, parity span, RLL code."""

    n_sys: int
    n_parity: int
    rll: RllCode
    _trellis: object = dataclass_field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.n_sys % 3:
            raise ValueError("n_sys must be divisible by 3 (RLL rate 2/3)")
        if self.n_parity % 2:
            raise ValueError("n_parity must be even (parity is RLL-encoded "
                             "in pairs)")

    @property
    def n(self) -> int:
        return self.n_sys + self.n_parity

    @property
    def n_parity_channel(self) -> int:
        return 3 * self.n_parity // 2

    def n_tx(self, mode: str) -> int:
        _check_mode(mode)
        if mode == "genie":
            return self.n
        return self.n_sys + self.n_parity_channel

    @property
    def trellis(self):
        if self._trellis is None:
            self._trellis = build_rll_unipolar_trellis(self.rll)
        return self._trellis


@dataclass
class BlissFrame:
    """One encoded frame; channel fields are filled as the frame travels."""

    user_bits: np.ndarray
    systematic_channel_bits: np.ndarray
    ldpc_parity_bits: np.ndarray
    parity_channel_bits: np.ndarray
    transmitted_symbols: np.ndarray  # FullBliss stream, ±1
    noise_sigma: float | None = None
    received_llrs: np.ndarray | None = None

    @property
    def codeword(self) -> np.ndarray:
        """The LDPC codeword [systematic channel bits | parity bits]."""
        return np.concatenate([self.systematic_channel_bits,
                               self.ldpc_parity_bits])

    def genie_symbols(self) -> np.ndarray:
        """±1 symbols of the genie-mode transmission (raw codeword)."""
        return 1.0 - 2.0 * self.codeword.astype(np.float64)


def _check_mode(mode: str) -> None:
    if mode not in FRONT_ENDS:
        raise ValueError(f"front end must be one of {FRONT_ENDS}, got {mode!r}")


def bliss_encode(user_bits: np.ndarray, code: SparseParityCheckMatrix,
                 rll: RllCode, encoder: SystematicEncoder) -> BlissFrame:
    """Encode one frame through the full Bliss chain (see module docstring).

    ``code`` must be the encoder's layout matrix (systematic prefix);
    ``user_bits`` must fill the systematic span exactly — the error message
    states the required length.
    """
    if code.n_vars != encoder.n or code.n_checks != encoder.m:
        raise ValueError("code and encoder disagree on (N, M)")
    n_sys = encoder.n_sys
    required = user_bits_per_frame(n_sys)
    user_bits = np.asarray(user_bits, dtype=np.uint8)
    if user_bits.shape != (required,):
        raise ValueError(f"user_bits must have length {required} to fill the "
                         f"systematic span of {n_sys} channel bits, got "
                         f"{user_bits.shape[0]}")
    if encoder.m % 2:
        raise ValueError(f"parity count M={encoder.m} must be even for the "
                         "pairwise RLL parity leg")
    sys_uni = precode(rll_encode(user_bits, rll))
    codeword = ldpc_encode(encoder, sys_uni)
    parity = codeword[n_sys:]
    parity_channel = precode(rll_encode(parity, rll))
    tx_bits = np.concatenate([sys_uni, parity_channel])
    return BlissFrame(
        user_bits=user_bits,
        systematic_channel_bits=sys_uni,
        ldpc_parity_bits=parity,
        parity_channel_bits=parity_channel,
        transmitted_symbols=1.0 - 2.0 * tx_bits.astype(np.float64))


def transmit_awgn(frame: BlissFrame, sigma: float,
                  rng: np.random.Generator) -> np.ndarray:
    """AWGN samples of the frame's FullBliss stream; ``sigma=0`` is exact."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    frame.noise_sigma = sigma
    if sigma == 0.0:
        return frame.transmitted_symbols.copy()
    return frame.transmitted_symbols + rng.normal(0.0, sigma,
                                                  frame.transmitted_symbols.shape)


def bit_llrs(samples: np.ndarray, sigma: float) -> np.ndarray:
    """Per-bit AWGN LLRs 2·r/σ² (saturated ±NOISELESS_LLR when σ=0)."""
    samples = np.asarray(samples, dtype=np.float64)
    if sigma == 0.0:
        return np.where(samples >= 0.0, NOISELESS_LLR, -NOISELESS_LLR)
    return (2.0 / (sigma * sigma)) * samples


def receive_front_end(samples: np.ndarray, layout: FrameLayout, mode: str,
                      sigma: float) -> np.ndarray:
    """Turn channel samples into one LLR per LDPC codeword bit."""
    _check_mode(mode)
    samples = np.asarray(samples, dtype=np.float64)
    expected = layout.n_tx(mode)
    if samples.shape != (expected,):
        raise ValueError(f"{mode} front end expects {expected} samples, got "
                         f"{samples.shape[0]}")
    if mode == "genie":
        return bit_llrs(samples, sigma)
    sys_llrs = bit_llrs(samples[:layout.n_sys], sigma)
    parity_chan_llrs = bit_llrs(samples[layout.n_sys:], sigma)
    parity_llrs, _ = bcjr(layout.trellis, np.zeros(layout.n_parity),
                          parity_chan_llrs, mode="logmap")
    return np.concatenate([sys_llrs, parity_llrs])


@dataclass
class SimConfig:
    """One sweep request; see ``run_sweep``.

    Exactly one of ``code_spec`` / ``code_path`` selects the code (an alist
    file is re-derived into a systematic layout deterministically).
    ``snr_db`` values are Eb/N0 (rate = user bits / transmitted bits) or,
    with ``snr_unit="raw"``, the raw channel SNR 1/σ² in dB.  The stopping
    rule per point is: stop after ``frames_per_point`` frames, or earlier
    once the weaker (lower-error) arm has at least ``max_errors`` bit
    errors; ``max_errors=None`` always runs the full frame count.
    ``constraints=False`` makes the constrained arm literally the plain
    decoder (columns then coincide).  ``early_exit`` defaults to off so
    every frame runs all ``iterations`` like the reference experiments.
    """

    code_spec: CodeSpec | None = None
    code_path: str | None = None
    snr_db: tuple[float, ...] = ()
    snr_unit: str = "ebn0"
    frames_per_point: int = 1000
    max_errors: int | None = 100
    alpha: float = 0.75
    beta: float = 0.75
    iterations: int = 16
    schedule: str = "serial"
    constraints: bool = True
    early_exit: bool = False
    frontend: str = "genie"
    seed: int = 0
    batch_frames: int = 256

    def __post_init__(self) -> None:
        if (self.code_spec is None) == (self.code_path is None):
            raise ValueError("set exactly one of code_spec / code_path")
        self.snr_db = tuple(float(x) for x in self.snr_db)
        if self.snr_unit not in SNR_UNITS:
            raise ValueError(f"snr_unit must be one of {SNR_UNITS}")
        if self.frames_per_point < 0:
            raise ValueError("frames_per_point must be >= 0")
        if self.max_errors is not None and self.max_errors <= 0:
            raise ValueError("max_errors must be positive or None")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        _check_mode(self.frontend)
        if self.batch_frames < 1:
            raise ValueError("batch_frames must be >= 1")


@dataclass
class BerRecord:
    """Per-SNR-point tallies of one paired sweep."""

    snr_db: float
    sigma: float
    frames: int
    n_raw_bits: int
    n_codeword_bits: int
    bit_errors_raw: int
    bit_errors_plain: int
    bit_errors_constrained: int
    violations_plain: int
    violations_constrained: int
    ci_halfwidth: float  # 95% half-width of the paired per-frame BER difference

    @property
    def ber_raw(self) -> float:
        return self.bit_errors_raw / self.n_raw_bits if self.n_raw_bits else 0.0

    @property
    def ber_plain(self) -> float:
        return (self.bit_errors_plain / self.n_codeword_bits
                if self.n_codeword_bits else 0.0)

    @property
    def ber_constrained(self) -> float:
        return (self.bit_errors_constrained / self.n_codeword_bits
                if self.n_codeword_bits else 0.0)


def resolve_encoder(config: SimConfig) -> SystematicEncoder:
    """Build or load the systematic code a config names."""
    if config.code_path is not None:
        return derive_systematic_encoder(read_alist(config.code_path))
    return build_systematic_code(config.code_spec)


def sigma_for_snr(snr_db: float, unit: str, rate: float) -> float:
    """Noise level for one sweep point (BPSK, unit symbol energy)."""
    if unit == "raw":
        return 10.0 ** (-snr_db / 20.0)
    ebn0 = 10.0 ** (snr_db / 10.0)
    return 1.0 / math.sqrt(2.0 * rate * ebn0)


def _paired_ci_halfwidth(diff_bits: np.ndarray, n: int) -> float:
    """95% half-width of mean(per-frame BER difference), normal approx."""
    if diff_bits.shape[0] < 2:
        return 0.0
    sd = float(np.std(diff_bits, ddof=1))
    return 1.96 * sd / math.sqrt(diff_bits.shape[0]) / n


def run_sweep(config: SimConfig, rll: RllCode | None = None) -> list[BerRecord]:
    """Paired plain/constrained Monte Carlo over the config's SNR grid.

    Both decoder arms see identical channel LLRs frame by frame (common
    random numbers).  Fully deterministic given ``config.seed``; the
    per-point RNG streams are independent, so records do not depend on grid
    order.
    """
    rll = rll or RllCode.default()
    encoder = resolve_encoder(config)
    layout = FrameLayout(n_sys=encoder.n_sys, n_parity=encoder.m, rll=rll)
    n_user = user_bits_per_frame(encoder.n_sys)
    rate = n_user / layout.n_tx(config.frontend)
    records = []
    for snr in config.snr_db:
        sigma = sigma_for_snr(snr, config.snr_unit, rate)
        # key the point's RNG stream by the SNR value itself, so a point's
        # record is independent of its position in the grid
        point_key = int(np.float64(snr).view(np.uint64))
        records.append(_run_point(config, encoder, layout, rll, snr, sigma,
                                  n_user, point_key))
    return records


def _decode_workspace(h: SparseParityCheckMatrix, n_nodes: int, serial: bool):
    return {
        "v": np.zeros(h.n_edges),
        "b": np.zeros((n_nodes, 3)),
        "a": np.zeros((n_nodes, 3)),
        "w": np.empty(h.n_vars),
        "hard": np.empty(h.n_vars, dtype=np.uint8),
        "scratch": np.empty(int(h.row_degrees().max())),
        "u_all": np.empty(0 if serial else h.n_edges),
    }


def _run_point(config: SimConfig, encoder: SystematicEncoder,
               layout: FrameLayout, rll: RllCode, snr_db: float, sigma: float,
               n_user: int, point_key: int) -> BerRecord:
    h = encoder.h
    n_sys = encoder.n_sys
    n = h.n_vars
    n_tx = layout.n_tx(config.frontend)
    genie = config.frontend == "genie"
    serial = config.schedule == "serial"
    n_nodes = max(n_sys - 2, 0)
    first_center = 1
    ws_plain = _decode_workspace(h, 0, serial)
    ws_con = _decode_workspace(h, n_nodes, serial)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(point_key,)))

    frames = 0
    err_plain_frames: list[np.ndarray] = []
    err_con_frames: list[np.ndarray] = []
    raw_errors = 0
    violations_plain = 0
    violations_con = 0

    while frames < config.frames_per_point:
        bsz = min(config.batch_frames, config.frames_per_point - frames)
        users = rng.integers(0, 2, size=(bsz, n_user), dtype=np.uint8)
        diff = np.empty((bsz, n_sys), dtype=np.uint8)
        for f in range(bsz):
            diff[f] = rll_encode(users[f], rll)
        sys_uni = (np.cumsum(diff, axis=1, dtype=np.int64) & 1).astype(np.uint8)
        parity = encoder.parity_batch(sys_uni)
        codewords = np.concatenate([sys_uni, parity], axis=1)
        if genie:
            tx_bits = codewords
        else:
            pchan = np.empty((bsz, layout.n_parity_channel), dtype=np.uint8)
            for f in range(bsz):
                pdiff = rll_encode(parity[f], rll)
                pchan[f] = (np.cumsum(pdiff, dtype=np.int64) & 1).astype(np.uint8)
            tx_bits = np.concatenate([sys_uni, pchan], axis=1)
        symbols = 1.0 - 2.0 * tx_bits.astype(np.float64)
        if sigma > 0.0:
            samples = symbols + sigma * rng.standard_normal(symbols.shape)
        else:
            samples = symbols
        raw_errors += int(np.count_nonzero((samples < 0.0) != tx_bits))

        chan_llrs = bit_llrs(samples.ravel(), sigma).reshape(bsz, n_tx)
        if genie:
            t_batch = chan_llrs
        else:
            t_batch = np.empty((bsz, n))
            t_batch[:, :n_sys] = chan_llrs[:, :n_sys]
            zero_priors = np.zeros(layout.n_parity)
            for f in range(bsz):
                parity_llrs, _ = bcjr(layout.trellis, zero_priors,
                                      chan_llrs[f, n_sys:], mode="logmap")
                t_batch[f, n_sys:] = parity_llrs
        np.clip(t_batch, -DEFAULT_MAX_LLR, DEFAULT_MAX_LLR, out=t_batch)

        batch_ep = np.empty(bsz, dtype=np.int64)
        batch_ec = np.empty(bsz, dtype=np.int64)
        for f in range(bsz):
            t = t_batch[f]
            cw = codewords[f]
            ws = ws_plain
            ws["v"][:] = 0.0
            _kernels.decode_run(
                t, h.row_ptr, h.row_idx, h.col_ptr, h.col_eid, 0, 0,
                serial, config.alpha, config.beta, DEFAULT_MAX_LLR,
                config.iterations, config.early_exit,
                ws["v"], ws["b"], ws["a"], ws["w"], ws["hard"],
                ws["scratch"], ws["u_all"])
            batch_ep[f] = int(np.count_nonzero(ws["hard"] != cw))
            violations_plain += count_violations(ws["hard"][:n_sys])
            if config.constraints:
                ws = ws_con
                ws["v"][:] = 0.0
                ws["b"][:] = 0.0
                ws["a"][:] = 0.0
                _kernels.decode_run(
                    t, h.row_ptr, h.row_idx, h.col_ptr, h.col_eid,
                    n_nodes, first_center,
                    serial, config.alpha, config.beta, DEFAULT_MAX_LLR,
                    config.iterations, config.early_exit,
                    ws["v"], ws["b"], ws["a"], ws["w"], ws["hard"],
                    ws["scratch"], ws["u_all"])
            batch_ec[f] = int(np.count_nonzero(ws["hard"] != cw))
            violations_con += count_violations(ws["hard"][:n_sys])
        err_plain_frames.append(batch_ep)
        err_con_frames.append(batch_ec)
        frames += bsz
        if config.max_errors is not None:
            total_p = int(sum(arr.sum() for arr in err_plain_frames))
            total_c = int(sum(arr.sum() for arr in err_con_frames))
            if min(total_p, total_c) >= config.max_errors:
                break

    ep = (np.concatenate(err_plain_frames) if err_plain_frames
          else np.zeros(0, dtype=np.int64))
    ec = (np.concatenate(err_con_frames) if err_con_frames
          else np.zeros(0, dtype=np.int64))
    return BerRecord(
        snr_db=snr_db, sigma=sigma, frames=frames,
        n_raw_bits=frames * n_tx, n_codeword_bits=frames * n,
        bit_errors_raw=raw_errors,
        bit_errors_plain=int(ep.sum()), bit_errors_constrained=int(ec.sum()),
        violations_plain=violations_plain,
        violations_constrained=violations_con,
        ci_halfwidth=_paired_ci_halfwidth(ep - ec, n))


CSV_COLUMNS = ("snr_db", "ber_raw", "ber_plain", "ber_constrained", "frames",
               "bit_errors_plain", "bit_errors_constrained", "ci_halfwidth")


def write_csv(records: list[BerRecord], path: str | Path) -> None:
    """Write sweep records in the standard CSV layout."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([f"{r.snr_db:g}", f"{r.ber_raw:.6e}",
                             f"{r.ber_plain:.6e}", f"{r.ber_constrained:.6e}",
                             r.frames, r.bit_errors_plain,
                             r.bit_errors_constrained,
                             f"{r.ci_halfwidth:.6e}"])


def write_gnuplot(records: list[BerRecord], path: str | Path) -> None:
    """Write a gnuplot-ready whitespace table (three BER curves + extras)."""
    cols = ("snr_db", "ber_raw", "ber_plain", "ber_constrained", "frames",
            "violations_plain", "violations_constrained", "ci_halfwidth")
    lines = ["# " + "  ".join(cols)]
    for r in records:
        lines.append("  ".join([
            f"{r.snr_db:g}", f"{r.ber_raw:.6e}", f"{r.ber_plain:.6e}",
            f"{r.ber_constrained:.6e}", str(r.frames),
            str(r.violations_plain), str(r.violations_constrained),
            f"{r.ci_halfwidth:.6e}"]))
    Path(path).write_text("\n".join(lines) + "\n")
