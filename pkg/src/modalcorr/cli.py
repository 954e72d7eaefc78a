"""Command-line front end: parse, classify, run, translate, verify, demo.

Exit codes: 0 = accepted / success / equivalent, 1 = rejected / engine
failure / counterexample, 2 = usage, parse, or budget error.

The environment variable ``ALBA_SEED`` is reserved for future use and is
ignored: every command is deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import __version__
from .alba import Failure, Success, check_topological_correctness
from .alba_pi2 import run_alba_pi2
from .classify import (
    ClassificationReport,
    VariableBoundError,
    check_inductive_pi2,
    check_inductive_quasi,
    find_certificate,
)
from .fol import (
    fo_and_all,
    render_fo,
    simplify_fo,
    standard_translation_statement,
)
from .semantics import (
    BudgetExceededError,
    Counterexample,
    Equivalent,
    equivalence_oracle,
)
from .semantics import statement_symbols
from .syntax import (
    ExistsStatement,
    Inequality,
    ParseError,
    Pi2Statement,
    QuasiInequality,
    TRIVIAL_INEQ,
    parse_statement,
    render,
)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2

#: The statements exercised by the ``demo`` subcommand.
DEMO_STATEMENTS = (
    "p prec q => p <= q",
    "p prec q => ~q prec ~p",
    "p prec q => dia p prec dia q",
    "p prec q => E c. p prec c & c prec q",
)


@dataclass
class RunConfig:
    """Resolved options shared by the subcommands."""

    sources: tuple[tuple[str, str], ...]  # (label, statement text)
    fmt: str = "text"
    max_frame: int = 3
    max_vars: int = 2
    trace_path: str | None = None
    check_topo: bool = False
    translate: bool = False

    def __post_init__(self):
        if self.max_frame < 1 or self.max_vars < 1:
            raise ValueError("budgets must be positive")


class _CliError(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def _configure(args: argparse.Namespace) -> RunConfig:
    inline = getattr(args, "statement", None)
    files = list(getattr(args, "files", []) or [])
    if inline is not None and files:
        raise _CliError("give either --statement or input files, not both")
    if inline is not None:
        sources = (("<statement>", inline),)
    elif files:
        loaded = []
        for path in files:
            try:
                with open(path, encoding="utf-8") as fh:
                    loaded.append((path, fh.read().strip()))
            except OSError as exc:
                raise _CliError(f"cannot read {path}: {exc}") from exc
        sources = tuple(loaded)
    else:
        raise _CliError("no input: give --statement TEXT or at least one file")
    try:
        return RunConfig(
            sources=sources,
            fmt=args.format,
            max_frame=args.max_frame,
            max_vars=args.max_vars,
            trace_path=getattr(args, "trace", None),
            check_topo=getattr(args, "check_topo", False),
            translate=getattr(args, "translate", False),
        )
    except ValueError as exc:
        raise _CliError(str(exc)) from exc


def _emit(cfg: RunConfig, payload: dict, text_lines: list[str]) -> None:
    if cfg.fmt == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _eps_text(value: str) -> str:
    return "∂" if value == "d" else value


def _certificate_lines(report: ClassificationReport) -> list[str]:
    cert = report.certificate
    if cert is None:
        return []
    eps = " ".join(f"{k}={_eps_text(v)}" for k, v in cert.eps.to_dict().items())
    names = cert.eps.names
    chain = sorted(names, key=lambda n: sum(cert.omega.less(m, n) for m in names))
    lines = [f"eps: {eps}", f"omega: {' < '.join(chain) if chain else '(empty)'}"]
    for ineq_text, tag in report.tags:
        lines.append(f"  {tag}: {ineq_text}")
    return lines


def _classify_statement(stmt, max_vars: int) -> ClassificationReport:
    if isinstance(stmt, Inequality):
        stmt = QuasiInequality((TRIVIAL_INEQ,), (stmt,))
    if isinstance(stmt, ExistsStatement):
        stmt = Pi2Statement((TRIVIAL_INEQ,), stmt.bound_vars, stmt.inequalities)
    if isinstance(stmt, Pi2Statement):
        return check_inductive_pi2(stmt, max_vars=max_vars)
    cert = find_certificate(stmt, max_vars=max_vars)
    if cert is None:
        return ClassificationReport("rejected", None, (), "no certificate found")
    return check_inductive_quasi(stmt, cert)


def _translated(pure_quasis) -> str:
    fo = simplify_fo(
        fo_and_all([standard_translation_statement(p) for p in pure_quasis])
    )
    return render_fo(fo)


def cmd_classify(cfg: RunConfig) -> int:
    worst = EXIT_OK
    for label, text in cfg.sources:
        stmt = parse_statement(text)
        report = _classify_statement(stmt, cfg.max_vars)
        payload = {"command": "classify", "input": render(stmt)}
        payload.update(report.to_dict())
        lines = [f"{label}: {report.verdict}"]
        lines += _certificate_lines(report)
        if report.diagnostics:
            lines.append(f"  {report.diagnostics}")
        _emit(cfg, payload, lines)
        if not report.accepted:
            worst = max(worst, EXIT_REJECTED)
    return worst


def _run_one(cfg: RunConfig, label: str, text: str) -> tuple[int, dict, list[str]]:
    stmt = parse_statement(text)
    outcome = run_alba_pi2(stmt)
    payload: dict = {
        "command": "run",
        "input": render(stmt),
        "success": outcome.success,
    }
    lines: list[str] = []
    if len(cfg.sources) > 1:
        lines.append(f"== {label}")
    if isinstance(outcome, Success):
        pure = [render(p) for p in outcome.pure_quasis]
        payload["pure"] = pure
        lines += pure
        if cfg.translate:
            payload["fo"] = _translated(outcome.pure_quasis)
            lines.append(f"FO: {payload['fo']}")
        code = EXIT_OK
    else:
        payload["reason"] = outcome.reason
        payload["unresolved"] = list(outcome.unresolved_vars)
        payload["stuck"] = [render(i) for i in outcome.stuck_system.inequalities]
        lines.append(f"{label}: failure: {outcome.reason}")
        lines.append("stuck system:")
        lines += [f"  {i}" for i in payload["stuck"]]
        lines.append(f"  goal: {render(outcome.stuck_system.goal)}")
        if outcome.unresolved_vars:
            lines.append(f"unresolved: {', '.join(outcome.unresolved_vars)}")
        code = EXIT_REJECTED
    if cfg.check_topo:
        report = check_topological_correctness(outcome.trace)
        payload["topo"] = {
            "ok": report.ok,
            "ackermann_steps": len(report.ackermann_steps),
            "errors": list(report.errors),
        }
        status = "ok" if report.ok else "VIOLATED"
        lines.append(
            f"topological correctness: {status} "
            f"({len(report.ackermann_steps)} Ackermann steps)"
        )
        lines += [f"  {e}" for e in report.errors]
        if not report.ok:
            code = max(code, EXIT_REJECTED)
    if cfg.trace_path:
        with open(cfg.trace_path, "w", encoding="utf-8") as fh:
            fh.write(outcome.trace.to_json_lines() + "\n")
        lines.append(f"trace written to {cfg.trace_path}")
    return code, payload, lines


def cmd_run(cfg: RunConfig) -> int:
    worst = EXIT_OK
    for label, text in cfg.sources:
        code, payload, lines = _run_one(cfg, label, text)
        _emit(cfg, payload, lines)
        worst = max(worst, code)
    return worst


def cmd_translate(cfg: RunConfig) -> int:
    for label, text in cfg.sources:
        stmt = parse_statement(text)
        try:
            fo = simplify_fo(standard_translation_statement(stmt))
        except TypeError as exc:
            raise _CliError(str(exc)) from exc
        rendered = render_fo(fo)
        payload = {"command": "translate", "input": render(stmt), "fo": rendered}
        _emit(cfg, payload, [rendered])
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    worst = EXIT_OK
    for label, text in cfg.sources:
        stmt = parse_statement(text)
        prop_vars, _ = statement_symbols(stmt)
        if len(prop_vars) > cfg.max_vars:
            raise BudgetExceededError(
                f"{label}: {len(prop_vars)} free variables exceed "
                f"--max-vars {cfg.max_vars}"
            )
        outcome = run_alba_pi2(stmt)
        payload: dict = {"command": "verify", "input": render(stmt)}
        if isinstance(outcome, Failure):
            payload["verdict"] = "engine-failure"
            payload["reason"] = outcome.reason
            _emit(cfg, payload, [f"{label}: engine failure: {outcome.reason}"])
            worst = max(worst, EXIT_REJECTED)
            continue
        fo_text = _translated(outcome.pure_quasis)
        payload["fo"] = fo_text
        sample4 = 256 if cfg.max_frame >= 4 else 0
        verdict = equivalence_oracle(
            stmt,
            simplify_fo(
                fo_and_all(
                    [standard_translation_statement(p) for p in outcome.pure_quasis]
                )
            ),
            max_size=cfg.max_frame,
            sample_size4=sample4,
        )
        if isinstance(verdict, Equivalent):
            payload["verdict"] = "equivalent"
            payload["frames_checked"] = verdict.frames_checked
            _emit(
                cfg,
                payload,
                [
                    f"{label}: equivalent to {fo_text} "
                    f"({verdict.frames_checked} frames)"
                ],
            )
        else:
            assert isinstance(verdict, Counterexample)
            payload["verdict"] = "counterexample"
            payload["frame"] = verdict.frame.to_dict()
            payload["statement_holds"] = verdict.statement_holds
            payload["fo_holds"] = verdict.fo_holds
            _emit(
                cfg,
                payload,
                [
                    f"{label}: counterexample "
                    f"(statement={verdict.statement_holds}, fo={verdict.fo_holds})",
                    json.dumps(verdict.frame.to_dict(), sort_keys=True),
                ],
            )
            worst = max(worst, EXIT_REJECTED)
    return worst


def cmd_demo(cfg: RunConfig) -> int:
    demo_cfg = RunConfig(
        sources=(),
        fmt=cfg.fmt,
        max_frame=cfg.max_frame,
        max_vars=cfg.max_vars,
        translate=True,
    )
    for text in DEMO_STATEMENTS:
        code, payload, lines = _run_one(demo_cfg, text, text)
        if code != EXIT_OK:
            _emit(cfg, payload, lines)
            return code
        _emit(cfg, payload, [f"=== {text}"] + lines)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, with_run_flags: bool = False):
    parser.add_argument("files", nargs="*", help="statement files (one per file)")
    parser.add_argument(
        "-s", "--statement", help="inline statement instead of input files"
    )
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    parser.add_argument(
        "--max-frame", type=int, default=3, metavar="N",
        help="largest frame size for verification (default 3)",
    )
    parser.add_argument(
        "--max-vars", type=int, default=2, metavar="N",
        help="certificate-search variable budget (default 2)",
    )
    if with_run_flags:
        parser.add_argument(
            "--trace", metavar="PATH", help="write the derivation trace to PATH"
        )
        parser.add_argument(
            "--check-topo", action="store_true",
            help="replay the trace through the topological-correctness monitor",
        )
        parser.add_argument(
            "--translate", action="store_true",
            help="also print the simplified first-order correspondent",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalcorr",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("classify", help="certificate search and verdict"))
    _add_common(
        sub.add_parser("run", help="reduce to pure quasi-inequalities"),
        with_run_flags=True,
    )
    _add_common(sub.add_parser("translate", help="standard translation of the input"))
    _add_common(sub.add_parser("verify", help="oracle-check input against output"))
    demo = sub.add_parser("demo", help="run the built-in example statements")
    demo.add_argument(
        "--format", choices=("text", "json"), default="text", help="output format"
    )
    demo.add_argument("--max-frame", type=int, default=3, metavar="N")
    demo.add_argument("--max-vars", type=int, default=2, metavar="N")
    return parser


_COMMANDS = {
    "classify": cmd_classify,
    "run": cmd_run,
    "translate": cmd_translate,
    "verify": cmd_verify,
    "demo": cmd_demo,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "demo":
            cfg = RunConfig(
                sources=(),
                fmt=args.format,
                max_frame=args.max_frame,
                max_vars=args.max_vars,
            )
        else:
            cfg = _configure(args)
        return _COMMANDS[args.command](cfg)
    except _CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_ERROR
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (BudgetExceededError, VariableBoundError) as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
