"""Command-line front end.

Every subcommand builds a plain result dict; ``--json`` prints it through a
deterministic serializer, otherwise the same dict is shown as ``key: value``
lines. Exit codes: 0 success, 1 protocol abort or repeat, 2 usage or input
error.
"""
from __future__ import annotations

import argparse
import math
import secrets
import sys
from typing import Optional, Sequence

import numpy as np

from qipkit import protocols, qecc, qinfo
from qipkit.errors import CircuitParseError, QipkitError
from qipkit.qcircuit import apply_circuit, parse_circuit
from qipkit.qmeasure import (
    PRESETS,
    Povm,
    povm_measure,
    preset_measurement,
    psi01_states,
    sample,
    trine_vectors,
    von_neumann,
)
from qipkit.qstate import KET0, KET1, KET_MINUS, KET_PLUS, Ensemble, PureState, density_from_ensemble

SCHEMA = "qipkit/1"
ENSEMBLES = ("psi01", "computational", "hadamard", "trine", "bb84")


class UsageError(Exception):
    pass


def preset_ensemble(name: str) -> Ensemble:
    if name == "psi01":
        return Ensemble.uniform(psi01_states())
    if name == "computational":
        return Ensemble.uniform([KET0, KET1])
    if name == "hadamard":
        return Ensemble.uniform([KET_PLUS, KET_MINUS])
    if name == "trine":
        return Ensemble.uniform(trine_vectors())
    if name == "bb84":
        return Ensemble.uniform([KET0, KET1, KET_PLUS, KET_MINUS])
    raise UsageError(f"unknown ensemble {name!r}; choose from {', '.join(ENSEMBLES)}")


# -- serialization -------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    s = np.format_float_positional(x, unique=True, trim="0")
    return "0.0" if s in ("-0", "-0.0") else s


def _dump(obj, out: list, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        for i, (k, v) in enumerate(items):
            out.append(f'{pad}"{_escape(str(k))}": ')
            _dump(v, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
        elif all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            parts = []
            for v in seq:
                sub = []
                _dump(v, sub, indent, level + 1)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
        else:
            out.append("[\n")
            for i, v in enumerate(seq):
                out.append(pad)
                _dump(v, out, indent, level + 1)
                out.append(",\n" if i < len(seq) - 1 else "\n")
            out.append(end + "]")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(f'"{_escape(obj)}"')
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def to_json(obj) -> str:
    """Key-sorted JSON with floats written as shortest plain decimals."""
    out: list = []
    _dump(obj, out, 2, 0)
    return "".join(out) + "\n"


def to_text(obj, prefix: str = "") -> str:
    lines = []
    for k in sorted(obj):
        v = obj[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            lines.append(to_text(v, key + ".").rstrip("\n"))
        else:
            buf: list = []
            _dump(v, buf, 0, 0)
            lines.append(f"{key}: {''.join(buf).replace(chr(10), ' ')}")
    return "\n".join(line for line in lines if line) + "\n"


def _complex_pairs(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


# -- subcommands ---------------------------------------------------------------

def cmd_circuit(args, rng):
    try:
        with open(args.path, encoding="ascii") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise UsageError(f"{args.path}: circuit files must be ASCII ({exc.reason})") from None
    except OSError as exc:
        raise UsageError(f"{args.path}: {exc.strerror}") from None
    try:
        c = parse_circuit(text)
    except CircuitParseError as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    psi = apply_circuit(c, PureState.basis(0, 2 ** c.n_qubits))
    m = preset_measurement(args.measure, c.n_qubits)
    dist = povm_measure(psi, m) if isinstance(m, Povm) else von_neumann(psi, m)
    shots = args.trials if args.trials is not None else 1000
    hist = {}
    if shots > 0:
        counts = np.bincount(np.atleast_1d(sample(dist, rng, size=shots)), minlength=len(dist.probs))
        width = c.n_qubits if args.measure in ("computational", "hadamard") else 0
        for i, n in enumerate(counts):
            key = format(i, f"0{width}b") if width else str(i)
            hist[key] = int(n)
    return {
        "n_qubits": c.n_qubits,
        "gates": len(c.gates),
        "amplitudes": _complex_pairs(psi.amplitudes),
        "measurement": args.measure,
        "probabilities": [float(p) for p in dist.probs],
        "shots": shots,
        "histogram": hist,
    }, 0


_BB84_EVE = {"none": "none", "intercept": "intercept_resend", "premeasure": "fixed_basis"}


def cmd_bb84(args, seed):
    n = args.n if args.n is not None else 256
    cfg = protocols.BB84Config(
        n=n,
        delta=args.delta,
        eve=_BB84_EVE[args.eve],
        channel_flip_prob=args.noise,
        abort_threshold=args.threshold,
        seed=seed,
    )
    t = protocols.bb84_run(cfg)
    res = {
        "n": n,
        "block_length": cfg.block_length,
        "eve": args.eve,
        "noise": args.noise,
        "abort_threshold": args.threshold,
        "sifted": int(t.sifted_indices.size),
        "sifted_fraction": t.sifted_fraction,
        "check_bits": int(t.check_indices.size),
        "mismatch_count": t.mismatch_count,
        "error_rate": t.check_error_rate,
        "result": t.result,
        "aborted": t.result == "aborted",
    }
    if t.result == "key":
        res["key"] = "".join(map(str, t.alice_key))
        res["keys_match"] = bool(np.array_equal(t.alice_key, t.bob_key))
    return res, 0 if t.result == "key" else 1


def cmd_e91(args, rng):
    pairs = args.n if args.n is not None else 2000
    if args.eve == "intercept":
        raise UsageError("e91 supports --eve none or premeasure")
    eve = "measure_both" if args.eve == "premeasure" else "none"
    r = protocols.e91_run(pairs, args.test_fraction, eve, rng)
    return {
        "pairs": pairs,
        "eve": args.eve,
        "key_length": int(r.alice_key.size),
        "key_agreement": r.key_agreement,
        "ones_fraction": r.ones_fraction,
        "test_rounds": r.test_rounds,
        "test_wins": r.test_wins,
        "chsh_win_rate": r.chsh_win_rate,
    }, 0


def cmd_densecode(args, rng):
    messages = [args.message] if args.message else ["00", "01", "10", "11"]
    rows = {}
    for m in messages:
        s = protocols.dense_code(m)
        rows[m] = {"state": _complex_pairs(s.amplitudes), "decoded": protocols.dense_decode(s)}
    ok = all(rows[m]["decoded"] == m for m in messages)
    return {"messages": rows, "all_decoded": ok}, 0


def _parse_state(text: Optional[str]) -> PureState:
    if text is None:
        return PureState([0.6, 0.8])
    try:
        parts = [complex(p.replace("i", "j")) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --state {text!r}; expected two comma-separated amplitudes") from None
    if len(parts) != 2:
        raise UsageError("--state needs exactly two amplitudes")
    return PureState.normalized(parts)


def cmd_teleport(args, rng):
    psi = _parse_state(args.state)
    trials = args.trials if args.trials is not None else 1000
    counts = {k: 0 for k in ("00", "01", "10", "11")}
    worst = 1.0
    for _ in range(trials):
        r = protocols.teleport(psi, rng)
        counts[f"{r.bits[0]}{r.bits[1]}"] += 1
        worst = min(worst, psi.overlap(r.bob_state))
    return {
        "state": _complex_pairs(psi.amplitudes),
        "trials": trials,
        "outcome_counts": counts,
        "min_fidelity": worst,
    }, 0


def cmd_chsh(args, rng):
    trials = args.trials if args.trials is not None else 100000
    if args.strategy == "quantum":
        s = protocols.ChshStrategy.quantum()
    else:
        s = protocols.ChshStrategy.classical()
    g = protocols.chsh_monte_carlo(s, trials, rng)
    exact = protocols.chsh_exact_win_probability(s)
    return {
        "strategy": args.strategy,
        "trials": trials,
        "wins": g.wins,
        "win_rate": g.win_rate,
        "exact": exact,
        "classical_best": protocols.chsh_enumerate_classical()["best"],
    }, 0


_ECC_ALIASES = {"xx01": "XXI", "xxx": "XXX", "z0": "ZII"}


def _ecc_error(text: str):
    text = _ECC_ALIASES.get(text.lower(), text)
    if text == "none":
        return None
    if text in ("0", "1", "2"):
        return int(text)
    if len(text) == 3 and set(text.upper()) <= set("IXYZ"):
        return text.upper()
    raise UsageError(f"bad --error {text!r}; use none, 0, 1, 2, xx01, xxx, z0 or a 3-letter Pauli word")


def cmd_ecc(args, rng):
    norm = math.hypot(args.alpha, args.beta)
    if norm == 0:
        raise UsageError("alpha and beta cannot both be zero")
    a, b = args.alpha / norm, args.beta / norm
    errors = args.error or ["none", "0", "1", "2", "xx01", "xxx", "z0"]
    rows = []
    for e in errors:
        r = qecc.run_pipeline(a, b, _ecc_error(e))
        rows.append({"error": e, "syndrome": list(r.syndrome), "recovered": r.recovered, "fidelity": r.fidelity})
    return {"alpha": a, "beta": b, "runs": rows}, 0


def cmd_entropy(args, rng):
    e = preset_ensemble(args.ensemble)
    rho = density_from_ensemble(e)
    return {
        "ensemble": args.ensemble,
        "value_bits": qinfo.von_neumann_entropy(rho),
        "eigenvalues": [float(x) for x in rho.eigenvalues()],
    }, 0


def cmd_holevo(args, rng):
    e = preset_ensemble(args.ensemble)
    m = preset_measurement(args.measure, 1 if e.dim == 2 else int(round(math.log2(e.dim))))
    ch = qinfo.induced_channel(e, m)
    return {
        "ensemble": args.ensemble,
        "measurement": args.measure,
        "value_bits": qinfo.holevo_chi(e),
        "mutual_information": qinfo.mutual_information(e.probs, ch),
        "channel": [[float(x) for x in row] for row in ch.transition],
    }, 0


def cmd_compress(args, rng):
    e = preset_ensemble(args.ensemble)
    n = args.n if args.n is not None else 8
    kw = {"mode": args.mode}
    if args.mode == "monte_carlo":
        kw.update(rng=rng, trials=args.trials if args.trials is not None else 20000)
    r = qinfo.average_projection_fidelity(e, n, args.epsilon, **kw)
    return {
        "ensemble": args.ensemble,
        "n": n,
        "epsilon": args.epsilon,
        "mode": args.mode,
        "dim": r.dim,
        "bound_dim": r.bound_dim,
        "avg_fidelity": r.avg_fidelity,
        "bound_fidelity": r.bound_fidelity,
        "typical_prob": r.typical_prob,
        "stderr": r.stderr,
    }, 0


# -- argument parsing ------------------------------------------------------------

def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _prob(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, help="RNG seed (generated and reported when omitted)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    p = argparse.ArgumentParser(prog="qipkit", description="Quantum information toolkit")
    p.add_argument("--version", action="version", version="qipkit 0.1.0")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("circuit", parents=[common], help="run a circuit file and sample measurements")
    c.add_argument("path")
    c.add_argument("--trials", "--shots", dest="trials", type=_nonneg_int)
    c.add_argument("--measure", default="computational", choices=PRESETS)

    b = sub.add_parser("bb84", parents=[common], help="BB84 key distribution")
    b.add_argument("--n", type=_pos_int)
    b.add_argument("--eve", default="none", choices=("none", "intercept", "premeasure"))
    b.add_argument("--noise", type=_prob, default=0.0)
    b.add_argument("--delta", type=float, default=1.0)
    b.add_argument("--threshold", type=_prob, default=0.11)

    e = sub.add_parser("e91", parents=[common], help="entanglement-based key distribution")
    e.add_argument("--n", type=_pos_int, help="number of pairs")
    e.add_argument("--eve", default="none", choices=("none", "intercept", "premeasure"))
    e.add_argument("--test-fraction", type=_prob, default=0.25)

    d = sub.add_parser("densecode", parents=[common], help="superdense coding")
    d.add_argument("--message", choices=("00", "01", "10", "11"))

    t = sub.add_parser("teleport", parents=[common], help="teleport a qubit")
    t.add_argument("--state", help="two comma-separated amplitudes, e.g. 0.6,0.8 or 1,1i")
    t.add_argument("--trials", type=_nonneg_int)

    h = sub.add_parser("chsh", parents=[common], help="CHSH game")
    h.add_argument("--strategy", default="quantum", choices=("quantum", "classical"))
    h.add_argument("--trials", type=_pos_int)

    q = sub.add_parser("ecc", parents=[common], help="three-qubit bit-flip code")
    q.add_argument("--alpha", type=float, default=0.6)
    q.add_argument("--beta", type=float, default=0.8)
    q.add_argument("--error", action="append", help="none, 0, 1, 2, xx01, xxx, z0 or a Pauli word (repeatable)")

    s = sub.add_parser("entropy", parents=[common], help="von Neumann entropy of an ensemble")
    s.add_argument("--ensemble", default="psi01", choices=ENSEMBLES)

    v = sub.add_parser("holevo", parents=[common], help="Holevo quantity and mutual information")
    v.add_argument("--ensemble", default="psi01", choices=ENSEMBLES)
    v.add_argument("--measure", default="computational", choices=PRESETS)

    m = sub.add_parser("compress", parents=[common], help="typical-subspace compression fidelity")
    m.add_argument("--ensemble", default="psi01", choices=ENSEMBLES)
    m.add_argument("--n", type=_pos_int)
    m.add_argument("--epsilon", type=float, default=0.15)
    m.add_argument("--mode", default="exact", choices=("exact", "monte_carlo"))
    m.add_argument("--trials", type=_pos_int)
    return p


_COMMANDS = {
    "circuit": cmd_circuit,
    "e91": cmd_e91,
    "densecode": cmd_densecode,
    "teleport": cmd_teleport,
    "chsh": cmd_chsh,
    "ecc": cmd_ecc,
    "entropy": cmd_entropy,
    "holevo": cmd_holevo,
    "compress": cmd_compress,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    try:
        if args.command == "bb84":
            result, code = cmd_bb84(args, seed)
        else:
            result, code = _COMMANDS[args.command](args, np.random.default_rng(seed))
    except (UsageError, QipkitError, ValueError) as exc:
        print(f"qipkit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    result = {"schema": SCHEMA, "command": args.command, "seed": seed, **result}
    text = to_json(result) if args.json else to_text(result)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qipkit: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
