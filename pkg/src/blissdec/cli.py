"""Command-line driver: ``blissdec <subcommand>``.

Subcommands
-----------
``gencode``
    Build a column-regular LDPC code with a systematic layout; writes the
    parity-check matrix as an alist file plus an ``.npz`` encoder sidecar
    (packed parity equations + the layout column permutation).
``decode-one``
    Decode a single frame from a text file of channel LLRs (one float per
    line) against an alist code, printing per-iteration syndrome weights
    and, with ``--trace``, full u/v/a/b message dumps.
``sweep``
    Run a paired plain/constrained BER sweep from a flat ``key=value``
    config file (flags override file values) and write the CSV plus a
    gnuplot-ready ``.dat`` table.
``selftest``
    Run the built-in brute-force oracle suites.

All randomness flows from the single ``seed`` value; reruns are
bit-identical.  Exit status is 0 iff the requested artifact was fully
produced.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .alist import read_alist, write_alist
from .codes import CodeConstructionError, CodeSpec, build_systematic_code, \
    has_4cycles, save_encoder_sidecar
from .constraints import ConstraintBank
from .ldpc import DecoderParams, decode_traced, syndrome
from .pipeline import FRONT_ENDS, SNR_UNITS, SimConfig, run_sweep, write_csv, \
    write_gnuplot
from .selftest import run_all


class CliError(Exception):
    """User-facing failure; message printed to stderr, exit status 1."""


def _parse_bool_flag(value: str, what: str) -> bool:
    if value == "on":
        return True
    if value == "off":
        return False
    raise CliError(f"{what} must be 'on' or 'off', got {value!r}")


def _parse_snr_list(value: str) -> tuple[float, ...]:
    value = value.strip()
    if not value:
        return ()
    try:
        return tuple(float(x) for x in value.split(","))
    except ValueError as exc:
        raise CliError(f"bad SNR list {value!r}: {exc}") from None


def _frontend_name(value: str) -> str:
    # The flag accepts the scheme's everyday name as an alias.
    if value == "bliss":
        return "fullbliss"
    if value in FRONT_ENDS:
        return value
    raise CliError(f"frontend must be genie or bliss, got {value!r}")


# key -> (converter, help text); converters raise ValueError on bad input.
CONFIG_KEYS = {
    "code": (str, "alist file path (alternative to n/m/...)"),
    "n": (int, "code length (with m, builds a code instead of loading one)"),
    "m": (int, "number of parity checks"),
    "col_weight": (int, "LDPC column weight J (default 3)"),
    "code_seed": (int, "construction seed (default 1)"),
    "girth": (int, "4 or 6; 6 forbids 4-cycles (default 6)"),
    "snr": (_parse_snr_list, "comma-separated SNR grid in dB"),
    "snr_unit": (str, "'ebn0' (default) or 'raw' (1/sigma^2 in dB)"),
    "frames": (int, "max frames per SNR point"),
    "max_errors": (str, "early-stop error target or 'none' (default 100)"),
    "alpha": (float, "check-node scaling factor (default 0.75)"),
    "beta": (float, "constraint-node scaling factor (default 0.75)"),
    "iters": (int, "decoder iterations (default 16)"),
    "schedule": (str, "'flooding' or 'serial' (default serial)"),
    "constraints": (str, "'on' (default) or 'off'"),
    "frontend": (str, "'genie' (default) or 'bliss'"),
    "early_exit": (str, "'on' or 'off' (default off: run all iterations)"),
    "seed": (int, "simulation seed (default 0)"),
    "batch_frames": (int, "frames generated per batch (default 256)"),
    "out": (str, "output CSV path (default sweep.csv)"),
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key=value`` config text; errors carry line numbers."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{source}:{lineno}: expected key=value, "
                           f"got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in CONFIG_KEYS:
            raise CliError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise CliError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key][0](val)
        except ValueError as exc:
            raise CliError(f"{source}:{lineno}: bad value for "
                           f"{key!r}: {exc}") from None
    return values


def _config_help() -> str:
    lines = ["config file keys (flat key=value, one per line, # comments):"]
    for key, (_, doc) in CONFIG_KEYS.items():
        lines.append(f"  {key:<13} {doc}")
    return "\n".join(lines)


def _build_sim_config(values: dict) -> SimConfig:
    has_path = "code" in values
    has_spec = any(k in values for k in ("n", "m"))
    if has_path and has_spec:
        raise CliError("give either code= or n=/m=, not both")
    if not has_path and not has_spec:
        raise CliError("no code selected: set code=<alist> or n=/m=")
    code_path = values.get("code")
    code_spec = None
    if has_spec:
        if "n" not in values or "m" not in values:
            raise CliError("building a code needs both n= and m=")
        try:
            code_spec = CodeSpec(
                n=values["n"], m=values["m"],
                col_weight=values.get("col_weight", 3),
                seed=values.get("code_seed", 1),
                target_girth=values.get("girth", 6))
        except ValueError as exc:
            raise CliError(str(exc)) from None
    max_errors: int | None = 100
    if "max_errors" in values:
        raw = str(values["max_errors"]).strip().lower()
        if raw == "none":
            max_errors = None
        else:
            try:
                max_errors = int(raw)
            except ValueError:
                raise CliError(f"max_errors must be an integer or 'none', "
                               f"got {raw!r}") from None
    try:
        return SimConfig(
            code_spec=code_spec, code_path=code_path,
            snr_db=values.get("snr", ()),
            snr_unit=values.get("snr_unit", "ebn0"),
            frames_per_point=values.get("frames", 1000),
            max_errors=max_errors,
            alpha=values.get("alpha", 0.75), beta=values.get("beta", 0.75),
            iterations=values.get("iters", 16),
            schedule=values.get("schedule", "serial"),
            constraints=_parse_bool_flag(values.get("constraints", "on"),
                                         "constraints"),
            early_exit=_parse_bool_flag(values.get("early_exit", "off"),
                                        "early_exit"),
            frontend=_frontend_name(values.get("frontend", "genie")),
            seed=values.get("seed", 0),
            batch_frames=values.get("batch_frames", 256))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_gencode(args: argparse.Namespace) -> int:
    try:
        spec = CodeSpec(n=args.n, m=args.m, col_weight=args.col_weight,
                        seed=args.seed, target_girth=args.girth)
        encoder = build_systematic_code(spec)
    except (ValueError, CodeConstructionError) as exc:
        raise CliError(f"infeasible code spec: {exc}") from None
    alist_path = Path(args.out)
    sidecar_path = alist_path.with_suffix(".npz")
    write_alist(alist_path, encoder.h)
    save_encoder_sidecar(encoder, sidecar_path, spec)
    four = has_4cycles(encoder.h)
    girth_note = ("4-cycles present (allowed at girth 4)" if four
                  else "no 4-cycles (girth >= 6)")
    print(f"N={encoder.n} M={encoder.m} rate={spec.rate:.6f} "
          f"J={spec.col_weight} seed={spec.seed}")
    print(f"girth check: {girth_note}")
    print(f"wrote {alist_path} and {sidecar_path}")
    return 0


def _load_llrs(path: str, n_vars: int) -> np.ndarray:
    try:
        llrs = np.loadtxt(path, dtype=np.float64, ndmin=1)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read LLR file {path}: {exc}") from None
    if llrs.ndim != 1 or llrs.shape[0] != n_vars:
        raise CliError(f"LLR file {path} has {llrs.size} values; the code "
                       f"needs exactly {n_vars}")
    return llrs


def _format_bits(bits: np.ndarray) -> str:
    text = "".join(str(int(b)) for b in bits)
    return "\n".join(text[i:i + 64] for i in range(0, len(text), 64))


def cmd_decode_one(args: argparse.Namespace) -> int:
    try:
        h = read_alist(args.code)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot load code {args.code}: {exc}") from None
    t = _load_llrs(args.llr_file, h.n_vars)
    constraints_on = _parse_bool_flag(args.constraints, "--constraints")
    span = h.n_vars - h.n_checks if args.constraint_span is None \
        else args.constraint_span
    try:
        params = DecoderParams(
            max_iterations=args.iters, alpha=args.alpha,
            schedule=args.schedule,
            constraint_nodes_enabled=constraints_on,
            constraint_range=(0, span) if constraints_on else (0, 0))
        bank = ConstraintBank.for_span(0, span, beta=args.beta) \
            if constraints_on else None
        result, trace = decode_traced(h, params, t, bank)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    print(f"N={h.n_vars} M={h.n_checks} schedule={params.schedule} "
          f"alpha={params.alpha:g} beta={args.beta:g} "
          f"constraints={'on' if constraints_on else 'off'}"
          + (f" span=[0,{span})" if constraints_on else ""))
    fmt = dict(precision=3, suppress_small=False, threshold=256,
               max_line_width=100)
    for rec in trace:
        print(f"iter {rec.iteration:3d}: syndrome weight {rec.syndrome_weight}")
        if args.trace:
            print(f"  u: {np.array2string(rec.store.u, **fmt)}")
            print(f"  v: {np.array2string(rec.store.v, **fmt)}")
            if constraints_on:
                print(f"  a: {np.array2string(rec.a, **fmt)}")
                print(f"  b: {np.array2string(rec.b, **fmt)}")
    status = "converged" if result.converged else "not converged"
    print(f"{status} after {result.iterations_run} iteration(s); final "
          f"syndrome weight "
          f"{int(syndrome(h, result.hard_bits).sum())}")
    print("hard decisions:")
    print(_format_bits(result.hard_bits))
    if args.out:
        Path(args.out).write_text(
            "".join(f"{int(b)}\n" for b in result.hard_bits))
        print(f"wrote {args.out}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    values: dict = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise CliError(f"cannot read config: {exc}") from None
        values = parse_config_text(text, source=args.config)
    overrides = {
        "code": args.code, "snr": args.snr, "frames": args.frames,
        "alpha": args.alpha, "beta": args.beta, "iters": args.iters,
        "schedule": args.schedule, "constraints": args.constraints,
        "frontend": args.frontend, "seed": args.seed, "out": args.out,
    }
    for key, val in overrides.items():
        if val is not None:
            values[key] = CONFIG_KEYS[key][0](val) if isinstance(val, str) \
                else val
    config = _build_sim_config(values)
    out_path = Path(values.get("out", "sweep.csv"))
    try:
        records = run_sweep(config)
    except (OSError, ValueError, CodeConstructionError) as exc:
        raise CliError(str(exc)) from None
    write_csv(records, out_path)
    write_gnuplot(records, out_path.with_suffix(".dat"))
    for r in records:
        print(f"snr={r.snr_db:g} dB  sigma={r.sigma:.4f}  frames={r.frames}  "
              f"ber_raw={r.ber_raw:.3e}  ber_plain={r.ber_plain:.3e}  "
              f"ber_constrained={r.ber_constrained:.3e}  "
              f"ci={r.ci_halfwidth:.2e}")
    print(f"wrote {out_path} and {out_path.with_suffix('.dat')}")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    del args
    results = run_all()
    failures = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blissdec",
        description="LDPC decoding with run-length-constraint nodes: code "
                    "generation, single-frame tracing, and BER sweeps.",
        epilog=_config_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gencode", help="construct a code; write alist + "
                                       "encoder sidecar")
    p.add_argument("--n", type=int, required=True, help="code length N")
    p.add_argument("--m", type=int, required=True, help="parity checks M")
    p.add_argument("--col-weight", type=int, default=3, help="column weight J")
    p.add_argument("--girth", type=int, default=6, choices=(4, 6),
                   help="6 forbids 4-cycles (default); 4 allows them")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="code.alist", help="alist output path "
                   "(sidecar gets the same name with .npz)")
    p.set_defaults(func=cmd_gencode)

    p = sub.add_parser("decode-one", help="decode one LLR frame with "
                                          "per-iteration tracing")
    p.add_argument("llr_file", help="text file, one channel LLR per line")
    p.add_argument("--code", required=True, help="alist file")
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--beta", type=float, default=0.75)
    p.add_argument("--iters", type=int, default=16)
    p.add_argument("--schedule", choices=("flooding", "serial"),
                   default="serial")
    p.add_argument("--constraints", choices=("on", "off"), default="off")
    p.add_argument("--constraint-span", type=int, default=None,
                   help="leading run-length-constrained span (default N-M)")
    p.add_argument("--trace", action="store_true",
                   help="dump u/v/a/b messages every iteration")
    p.add_argument("--out", default=None, help="write hard decisions here")
    p.set_defaults(func=cmd_decode_one)

    p = sub.add_parser("sweep", help="run a BER sweep; write CSV + .dat")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--code", default=None, help="alist file (overrides config)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--snr", default=None, help="comma-separated dB grid")
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--schedule", choices=("flooding", "serial"), default=None)
    p.add_argument("--constraints", choices=("on", "off"), default=None)
    p.add_argument("--frontend", choices=("genie", "bliss"), default=None)
    p.add_argument("--out", default=None, help="CSV path (default sweep.csv)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="run built-in brute-force oracles")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
