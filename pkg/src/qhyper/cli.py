"""Command line interface.

One subcommand per operation; ``--output json`` switches every command
from human-readable lines to JSON with floats printed at 17 significant
digits.  Exit codes: 0 success (verdicts and failed verifications are
data, not errors), 1 usage, 2 input that does not parse, 3 validation
or numeric-domain failure, 4 size cap exceeded.  The default tolerance
is 1e-10, overridable by the QHYPER_TOL environment variable and the
``--tol`` flag (flag wins).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import hyperdet, states, tensor
from .hosvd import DEFAULT_TOL, hosvd, lu_equivalence, lu_fingerprint, mode_svals
from .errors import KetSyntaxError, QhyperError, SizeCapError, ValidationError

__all__ = ["RunConfig", "main", "entry", "run_bench"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_SIZE_CAP = 4


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all subcommands."""

    tolerance: float
    seed: int
    output: str  # "text" | "json"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _dumps(obj, indent=0) -> str:
    """JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{inner}{json.dumps(k)}: {_dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{_dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    return json.dumps(obj)


def _emit(cfg, payload, lines, out_path=None):
    text = _dumps(payload) if cfg.output == "json" else "\n".join(lines)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_state(path: str) -> states.QubitState:
    with open(path) as fh:
        raw = fh.read()
    stripped = raw.lstrip()
    if stripped.startswith("{"):
        return states.state_from_json(json.loads(raw))
    return states.parse_ket(raw)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _common_flags(p):
    p.add_argument("--tol", type=float, default=None, help="absolute tolerance")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument(
        "--output", choices=("text", "json"), default="text", help="output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qhyper", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a ket expression or state JSON file")
    p.add_argument("--in", dest="infile", required=True, help="input file")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--renormalize", action="store_true", help="rescale to unit norm")
    p.add_argument(
        "--no-normalize",
        action="store_true",
        help="skip normalization check entirely (diagnostics)",
    )
    _common_flags(p)

    p = sub.add_parser("svals", help="per-mode singular values of a state")
    p.add_argument("--state", required=True, help="state file")
    p.add_argument("--mode", type=int, default=None, help="one mode only (1-based)")
    _common_flags(p)

    p = sub.add_parser("hosvd", help="full decomposition report")
    p.add_argument("--state", required=True, help="state file")
    p.add_argument("--out", help="output file (default stdout)")
    _common_flags(p)

    p = sub.add_parser("lu-equiv", help="three-valued local-unitary equivalence")
    p.add_argument("--a", required=True, help="first state file")
    p.add_argument("--b", required=True, help="second state file")
    _common_flags(p)

    p = sub.add_parser("permute", help="permute the qubit slots of a state")
    p.add_argument("--state", required=True, help="state file")
    p.add_argument("--perm", required=True, help="comma list, e.g. 3,2,1")
    p.add_argument("--out", help="output file (default stdout)")
    _common_flags(p)

    p = sub.add_parser("hdet", help="combinatorial hyperdeterminant of a state")
    p.add_argument("--state", required=True, help="state file")
    p.add_argument(
        "--method", choices=("fast", "reduced", "general"), default="fast"
    )
    _common_flags(p)

    p = sub.add_parser("tangle", help="n-tangle of a 2n-qubit state")
    p.add_argument("--state", required=True, help="state file")
    p.add_argument("--via", choices=("spinflip", "hdet"), default="spinflip")
    _common_flags(p)

    p = sub.add_parser("signs", help="print a sign string")
    p.add_argument("--what", choices=("ent", "sigma"), required=True)
    p.add_argument("--n", type=int, required=True, help="half the qubit count")
    p.add_argument("--blocks", action="store_true", help="print P/N blocks")
    _common_flags(p)

    p = sub.add_parser("verify", help="check the antidiagonal sign identity")
    p.add_argument("--n", type=int, required=True, help="half the qubit count")
    p.add_argument(
        "--dense",
        choices=("auto", "on", "off"),
        default="auto",
        help="also compare dense sign matrices (auto: n <= 5)",
    )
    _common_flags(p)

    p = sub.add_parser("bench", help="time the fast vs. reduced hyperdeterminant")
    p.add_argument("--n", type=int, required=True, help="half the qubit count")
    p.add_argument("--reps", type=int, default=5, help="repetitions per method")
    _common_flags(p)

    return parser


def _config(args) -> RunConfig:
    tol = args.tol
    if tol is None:
        tol = float(os.environ.get("QHYPER_TOL", DEFAULT_TOL))
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    return RunConfig(tolerance=tol, seed=args.seed, output=args.output)


def _cmd_parse(args, cfg):
    with open(args.infile) as fh:
        raw = fh.read()
    stripped = raw.lstrip()
    if stripped.startswith("{"):
        state = states.state_from_json(
            json.loads(raw), check_norm=not (args.renormalize or args.no_normalize)
        )
        if args.renormalize:
            amp = state.amplitudes
            norm = np.linalg.norm(amp)
            if norm == 0.0:
                raise ValidationError("cannot renormalize the zero vector")
            state = states.QubitState(amp / norm)
    else:
        state = states.parse_ket(
            raw,
            renormalize=args.renormalize,
            check_norm=not args.no_normalize,
        )
    payload = states.state_to_json(state)
    text = _dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_svals(args, cfg):
    H = states.state_to_hypermatrix(_load_state(args.state))
    if args.mode is not None:
        sv = mode_svals(H, args.mode)
        payload = {"mode": args.mode, "svals": [float(s) for s in sv]}
        lines = [f"mode {args.mode}: {_fmt(sv[0])} {_fmt(sv[1])}"]
    else:
        fp = lu_fingerprint(H)
        payload = {"mode_svals": [[float(s) for s in sv] for sv in fp]}
        lines = [
            f"mode {k}: {_fmt(sv[0])} {_fmt(sv[1])}" for k, sv in enumerate(fp, 1)
        ]
    _emit(cfg, payload, lines)
    return EXIT_OK


def _cmd_hosvd(args, cfg):
    H = states.state_to_hypermatrix(_load_state(args.state))
    res = hosvd(H)
    payload = {
        "mode_svals": [[float(s) for s in sv] for sv in res.mode_svals],
        "factors": [tensor.matrix_to_json(V) for V in res.factors],
        "core": tensor.tensor_to_json(res.core),
    }
    lines = [
        f"mode {k}: {_fmt(sv[0])} {_fmt(sv[1])}"
        for k, sv in enumerate(res.mode_svals, 1)
    ]
    lines += [
        f"core[{','.join(str(i) for i in idx)}] = {_fmt(z.real)} {_fmt(z.imag)}i"
        for idx, z in np.ndenumerate(res.core.data)
    ]
    _emit(cfg, payload, lines, args.out)
    return EXIT_OK


def _cmd_lu_equiv(args, cfg):
    A = states.state_to_hypermatrix(_load_state(args.a))
    B = states.state_to_hypermatrix(_load_state(args.b))
    verdict = lu_equivalence(A, B, tol=cfg.tolerance)
    cert = None
    if verdict.certificate is not None:
        cert = {
            "mode": verdict.certificate.mode,
            "svals_a": [float(s) for s in verdict.certificate.svals_a],
            "svals_b": [float(s) for s in verdict.certificate.svals_b],
        }
    payload = {"verdict": verdict.tag.value, "certificate": cert, "detail": verdict.detail}
    line = verdict.tag.value
    if cert is not None:
        line += (
            f": mode {cert['mode']} svals "
            f"({_fmt(cert['svals_a'][0])}, {_fmt(cert['svals_a'][1])}) vs "
            f"({_fmt(cert['svals_b'][0])}, {_fmt(cert['svals_b'][1])})"
        )
    elif verdict.detail:
        line += f": {verdict.detail}"
    _emit(cfg, payload, [line])
    return EXIT_OK


def _cmd_permute(args, cfg):
    state = _load_state(args.state)
    try:
        mapping = tuple(int(x) for x in args.perm.split(","))
    except ValueError:
        raise ValidationError(f"--perm must be a comma list of integers, got {args.perm!r}")
    H = states.state_to_hypermatrix(state)
    out = states.hypermatrix_to_state(tensor.mode_permute(H, mapping))
    payload = states.state_to_json(out)
    text = _dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_hdet(args, cfg):
    state = _load_state(args.state)
    if args.method == "fast":
        value = hyperdet.hdet_fast(state)
    else:
        H = states.state_to_hypermatrix(state)
        fn = hyperdet.hdet_reduced if args.method == "reduced" else hyperdet.hdet_general
        value = fn(H)
    payload = {"re": value.real, "im": value.imag, "method": args.method}
    _emit(cfg, payload, [f"hdet ({args.method}) = {_fmt(value.real)} {_fmt(value.imag)}i"])
    return EXIT_OK


def _cmd_tangle(args, cfg):
    state = _load_state(args.state)
    value = states.n_tangle(state, via=args.via)
    payload = {"tangle": value, "via": args.via}
    _emit(cfg, payload, [f"tangle ({args.via}) = {_fmt(value)}"])
    return EXIT_OK


def _cmd_signs(args, cfg):
    builder = (
        hyperdet.sign_string_ent if args.what == "ent" else hyperdet.sign_string_sigma
    )
    ss = builder(args.n)
    rendered = ss.block_string() if args.blocks else ss.as_string()
    key = "blocks" if args.blocks else "signs"
    payload = {"what": args.what, "n": args.n, key: rendered}
    _emit(cfg, payload, [rendered])
    return EXIT_OK


def _cmd_verify(args, cfg):
    dense = {"auto": None, "on": True, "off": False}[args.dense]
    report = hyperdet.verify_antidiagonal_identity(args.n, dense=dense)
    payload = {
        "n": report.n,
        "factor": report.factor,
        "string_ok": report.string_ok,
        "chi_ok": report.chi_ok,
        "dense_ok": report.dense_ok,
        "first_mismatch": report.first_mismatch,
        "passed": report.passed,
    }
    if report.passed:
        line = f"PASS (n={report.n}, factor={report.factor:+d})"
    else:
        line = f"FAIL (n={report.n}, first mismatch at {report.first_mismatch})"
    _emit(cfg, payload, [line])
    return EXIT_OK


def run_bench(n: int, reps: int, seed) -> dict:
    """Time hdet_fast against hdet_reduced on random 2n-qubit states.

    Returns mean seconds per call for each method and the largest
    absolute disagreement.
    """
    if reps < 1:
        raise ValidationError(f"reps must be >= 1, got {reps}")
    qubits = 2 * int(n)
    rng = np.random.default_rng(seed)
    trials = []
    for _ in range(reps):
        trials.append(states.random_state(qubits, rng.integers(2**63)))
    fast_vals, reduced_vals = [], []
    t0 = time.perf_counter()
    for st in trials:
        fast_vals.append(hyperdet.hdet_fast(st))
    t_fast = (time.perf_counter() - t0) / reps
    t0 = time.perf_counter()
    for st in trials:
        reduced_vals.append(hyperdet.hdet_reduced(states.state_to_hypermatrix(st)))
    t_reduced = (time.perf_counter() - t0) / reps
    delta = max(abs(f - r) for f, r in zip(fast_vals, reduced_vals))
    return {
        "n": int(n),
        "qubits": qubits,
        "reps": int(reps),
        "mean_fast_s": t_fast,
        "mean_reduced_s": t_reduced,
        "max_abs_delta": float(delta),
    }


def _cmd_bench(args, cfg):
    payload = run_bench(args.n, args.reps, cfg.seed)
    lines = [
        f"qubits: {payload['qubits']}  reps: {payload['reps']}",
        f"fast:    {_fmt(payload['mean_fast_s'])} s/call",
        f"reduced: {_fmt(payload['mean_reduced_s'])} s/call",
        f"max |delta|: {_fmt(payload['max_abs_delta'])}",
    ]
    _emit(cfg, payload, lines)
    return EXIT_OK


_COMMANDS = {
    "parse": _cmd_parse,
    "svals": _cmd_svals,
    "hosvd": _cmd_hosvd,
    "lu-equiv": _cmd_lu_equiv,
    "permute": _cmd_permute,
    "hdet": _cmd_hdet,
    "tangle": _cmd_tangle,
    "signs": _cmd_signs,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        return _COMMANDS[args.command](args, cfg)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KetSyntaxError, json.JSONDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeCapError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except QhyperError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry():  # console script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
