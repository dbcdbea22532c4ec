"""Min-sum LDPC decoding with d=1 run-length constraint nodes.

The package covers the full modified-concatenation ("Bliss scheme")
storage-channel pipeline: rate-2/3 run-length-limited coding with a 1T
precoder, systematic LDPC codes over the constrained channel stream, a
BCJR soft demapper for the RLL parity leg, and a message-passing decoder
whose factor graph can be augmented with degree-3 constraint nodes that
exploit the d=1 property of the systematic bits.  ``pipeline.run_sweep``
measures the BER gain of constraint-aware decoding with paired-noise Monte
Carlo; the ``blissdec`` CLI drives code generation, single-frame tracing,
and sweeps.
"""

from .alist import read_alist, write_alist
from .codes import CodeConstructionError, CodeSpec, RankDeficientError, \
    SystematicEncoder, build_systematic_code, derive_systematic_encoder, \
    generate_code, has_4cycles, ldpc_encode, load_encoder_sidecar, \
    save_encoder_sidecar
from .constraints import Arm, ConstraintBank, co, constraint_pass, \
    count_violations
from .ldpc import DEFAULT_MAX_LLR, DecodeResult, DecoderParams, MessageStore, \
    SparseParityCheckMatrix, TraceRecord, check_to_variable_messages, \
    chk_update, decode, decode_traced, output_messages, sign_bit, syndrome, \
    var_update, variable_to_check_messages
from .pipeline import PRESET_1728, PRESET_6912, BerRecord, BlissFrame, \
    FrameLayout, SimConfig, bit_llrs, bliss_encode, q_function, \
    receive_front_end, resolve_encoder, run_sweep, sigma_for_snr, \
    transmit_awgn, user_bits_per_frame, write_csv, write_gnuplot
from .rll import DECODER_WINDOW, PrecoderState, RllCode, inverse_precode, \
    precode, rll_decode, rll_encode
from .trellis import Trellis, bcjr, build_precoder_trellis, \
    build_rll_unipolar_trellis, walk

__version__ = "0.1.0"

__all__ = [
    "Arm", "BerRecord", "BlissFrame", "CodeConstructionError", "CodeSpec",
    "ConstraintBank", "DECODER_WINDOW", "DEFAULT_MAX_LLR", "DecodeResult",
    "DecoderParams",
    "FrameLayout", "MessageStore", "PRESET_1728", "PRESET_6912",
    "PrecoderState", "RankDeficientError", "RllCode",
    "SparseParityCheckMatrix", "SimConfig", "SystematicEncoder",
    "TraceRecord", "Trellis", "bcjr", "bit_llrs", "bliss_encode",
    "build_precoder_trellis", "build_rll_unipolar_trellis",
    "build_systematic_code", "check_to_variable_messages", "chk_update",
    "co", "constraint_pass", "count_violations", "decode", "decode_traced",
    "derive_systematic_encoder", "generate_code", "has_4cycles",
    "inverse_precode", "ldpc_encode", "load_encoder_sidecar",
    "output_messages", "precode", "q_function", "read_alist",
    "receive_front_end", "resolve_encoder", "rll_decode", "rll_encode",
    "run_sweep", "save_encoder_sidecar", "sigma_for_snr", "sign_bit",
    "syndrome", "transmit_awgn", "user_bits_per_frame", "var_update",
    "variable_to_check_messages", "walk", "write_alist", "write_csv",
    "write_gnuplot",
]
