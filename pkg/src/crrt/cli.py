"""Command line: keygen | simulate | estimate | audit | quantum-report.

Exit codes: 0 success, 1 verification or bound failure, 2 usage error, 3 IO error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

from .group import generate_params, profile_params
from .harness import ADVERSARY_NAMES, DEFAULT_P_GRID, HarnessConfig, run_poll, run_quantum_report
from .protocols import VARIANTS, AuditRecord, ConfigError, p2_audit, read_transcripts
from .stats import EstimationError, PollOutcome, estimate_outcome, report_from_counts

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc


# Commands -----------------------------------------------------------------------------

def cmd_keygen(args) -> int:
    if args.q_bits or args.p_bits:
        if not (args.q_bits and args.p_bits):
            raise UsageError("--q-bits and --p-bits go together")
        params = generate_params(args.q_bits, args.p_bits, args.seed)
    else:
        params = profile_params(args.profile)
    _emit(params.dumps() + "\n", args.out)
    return EXIT_OK


SIMULATE_KEYS = {"variant": str, "n": int, "l": int, "D": int, "ls": _ints, "profile": str, "sessions": int,
                 "adversary": str, "seed": int, "pi": _floats, "transcripts": str, "audits": str,
                 "workers": int, "lor_m": int}


def read_config_file(path: str) -> dict:
    """key = value lines (comments with #); unknown keys are a usage error."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[poll]\n" + Path(path).read_text(encoding="utf-8"))
    out = {}
    for key, raw in parser["poll"].items():
        key = key.replace("-", "_")
        if key not in SIMULATE_KEYS:
            raise UsageError(f"{path}: unknown key {key!r}")
        try:
            out[key] = SIMULATE_KEYS[key](raw.strip().strip('"'))
        except ValueError as exc:
            raise UsageError(f"{path}: bad value for {key}: {raw!r}") from exc
    return out


def cmd_simulate(args) -> int:
    settings = read_config_file(args.config) if args.config else {}
    for key in SIMULATE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    missing = [k for k in ("variant", "n", "l") if k not in settings]
    if missing:
        raise UsageError(f"missing {', '.join('--' + k for k in missing)}")
    try:
        hc = HarnessConfig(**settings)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = run_poll(hc)
    _emit(report.dumps(), args.report)
    if report.reverified is not None and report.reverified != hc.sessions:
        print(f"{hc.sessions - report.reverified} transcripts failed offline re-verification", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_estimate(args) -> int:
    obj = _read_json(args.file)
    try:
        if "L" in obj:
            # Tally form: {"variant": "W", "p": 0.75, "L": 250, "N": 1000}
            L, N = int(obj["L"]), int(obj["N"])
            if not 0 <= L <= N:
                raise UsageError("need 0 <= L <= N")
            report = report_from_counts(obj.get("variant", "W"), [N - L, L], float(obj["p"]))
        else:
            report = estimate_outcome(PollOutcome.from_json(obj))
    except KeyError as exc:
        raise UsageError(f"{args.file}: missing field {exc}") from exc
    _emit(json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


def _read_records(path: str) -> list[AuditRecord]:
    """A single JSON record, or JSONL with one record per line."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        try:
            objs = [json.loads(text)]
        except json.JSONDecodeError:
            objs = [json.loads(line) for line in text.splitlines() if line.strip()]
        return [AuditRecord.from_json(o) for o in objs]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: not an audit record ({exc})") from exc


def cmd_audit(args) -> int:
    records = _read_records(args.record)
    text = Path(args.transcript).read_text(encoding="utf-8")
    try:
        transcripts = {t.session_id: t for t in read_transcripts(text)}
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.transcript}: {exc}") from exc
    all_ok = bool(records)
    for record in records:
        tr = transcripts.get(record.session_id)
        ok = tr is not None and p2_audit(record, tr)
        all_ok = all_ok and ok
        print(json.dumps({"session": record.session_id, "valid": ok}, sort_keys=True))
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_quantum_report(args) -> int:
    try:
        rep = run_quantum_report(args.p or DEFAULT_P_GRID, args.points, args.diagonal)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(rep.csv(), args.out)
    if args.bounds:
        Path(args.bounds).write_text(json.dumps(rep.bounds, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    if not rep.ok:
        bad = sorted({r["family"] for r in rep.rows if r["slack"] < -1e-9})
        print(f"bound violated (worst slack {rep.worst_slack:.3g}) in: {', '.join(bad)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# Parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crrt", description="Cryptographic randomized response toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", help="write group parameters as JSON")
    k.add_argument("--profile", choices=("test", "secure"), default="test")
    k.add_argument("--q-bits", type=int)
    k.add_argument("--p-bits", type=int)
    k.add_argument("--seed", default="crrt")
    k.add_argument("--out")
    k.set_defaults(func=cmd_keygen)

    s = sub.add_parser("simulate", help="run a poll end to end")
    s.add_argument("--config", help="key = value file; flags override it")
    s.add_argument("--variant", type=str.strip, help=f"one of {', '.join(VARIANTS)} (case-insensitive)")
    s.add_argument("--n", type=int)
    s.add_argument("--l", type=int)
    s.add_argument("--D", type=int)
    s.add_argument("--ls", type=_ints, help="comma-separated l_1..l_m for BD")
    s.add_argument("--profile", choices=("test", "secure"))
    s.add_argument("--sessions", type=int)
    s.add_argument("--adversary", choices=sorted(ADVERSARY_NAMES))
    s.add_argument("--seed", type=int)
    s.add_argument("--pi", type=_floats, help="Pr[t=1], or the comma-separated type law for BD")
    s.add_argument("--transcripts", help="write JSONL transcripts here")
    s.add_argument("--audits", help="write Protocol 2 audit records (JSONL) here")
    s.add_argument("--workers", type=int)
    s.add_argument("--lor-m", dest="lor_m", type=int)
    s.add_argument("--report", help="write the JSON report here instead of stdout")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="estimate prevalence from a responses file")
    e.add_argument("file")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    a = sub.add_parser("audit", help="check a Protocol 2 audit record against its transcript")
    a.add_argument("record")
    a.add_argument("transcript")
    a.set_defaults(func=cmd_audit)

    q = sub.add_parser("quantum-report", help="achieved-versus-bound table for the quantum protocol")
    q.add_argument("--p", type=_floats, help="comma-separated p values in (1/2, 0.933)")
    q.add_argument("--points", type=int, default=100)
    q.add_argument("--diagonal", choices=("optimal", "honest"), default="optimal")
    q.add_argument("--out")
    q.add_argument("--bounds", help="write the closed-form bounds per p as JSON")
    q.set_defaults(func=cmd_quantum_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, EstimationError, configparser.Error) as exc:
        print(f"crrt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"crrt: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
