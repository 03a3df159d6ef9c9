"""fpbraces 命令行入口。

退出码：0 成功，2 检查发现违反，64 参数/前置条件错误，70 内部错误。
标准输出只放命令的结果，日志走标准错误（``-v`` INFO，``-vv`` DEBUG）。

    fpbraces check ex31.alg
    fpbraces chains ex31.alg --kind strong --max 10
    fpbraces roundtrip ex31.alg
    fpbraces ybe dim2.alg --mode exhaustive
    fpbraces enumerate --case G4 --p 3 --out g4.census
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Callable, Optional, Sequence

from fpbraces.algebra_io import (
    BRACE_FORMAT,
    RunReport,
    algebra_from_document,
    atomic_write_text,
    brace_from_document,
    census_text,
    dumps_algebra,
    file_digest,
    format_fingerprint,
    load_algebra,
    load_brace,
    save_algebra,
    save_brace,
    write_census,
)
from fpbraces.brace import (
    CHECK_MODES,
    Brace,
    brace_to_prelie,
    check_brace_axioms,
    flow_brace,
)
from fpbraces.cases import cases_for
from fpbraces.config import DEFAULTS, Limits
from fpbraces.enumeration import enumerate_case, fingerprint_to_json
from fpbraces.errors import EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS, FpBracesError, UsageError
from fpbraces.filtration import CHAIN_KINDS, algebra_chain, check_index_bounds
from fpbraces.fixtures import FIXTURES, fixture
from fpbraces.prelie import check_prelie_axiom
from fpbraces.relations import PRINTED_SYSTEMS, compare_with_printed, derived_relations
from fpbraces.sweep_task import SweepTask, ensure_core_application
from fpbraces.ybe import build_solution, check_involutive_report, check_nondegenerate, verify_ybe

logger = logging.getLogger(__name__)

MAX_PRINTED = 20


class _Parser(argparse.ArgumentParser):
    """参数错误以 64 退出。"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _run_long(func: Callable, *args, **kwargs):
    """长扫描放到 SweepTask 的 QThread 上执行，主线程等待结果。"""
    ensure_core_application()
    task = SweepTask(func, *args, thread_name="fpbraces-sweep", **kwargs)
    task.start()
    try:
        return task.result()
    except KeyboardInterrupt:
        # 扫描在当前块结束后停下
        task.cancel()
        task.wait()
        raise


def _vec(values) -> str:
    return "[" + " ".join(str(int(v)) for v in values) + "]"


def _load_brace_input(path: str, limits: Limits) -> Brace:
    """brace 文件直接读取；代数文件走 flows 构造。"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        # 交给 load_algebra 报告带位置的解析错误
        return flow_brace(load_algebra(path).verified_copy())
    if isinstance(doc, dict) and doc.get("format") == BRACE_FORMAT:
        return brace_from_document(doc, limits=limits)
    return flow_brace(algebra_from_document(doc).verified_copy())


# ---------------------------------------------------------------------------
# 命令
# ---------------------------------------------------------------------------


def cmd_check(args, limits: Limits, report: RunReport) -> int:
    algebra = load_algebra(args.file)
    violations = check_prelie_axiom(algebra)
    report.counts = {"triples": algebra.dim**3, "violations": len(violations)}
    report.violations = [
        {"triple": list(v.triple), "lhs": list(v.lhs), "rhs": list(v.rhs)} for v in violations[:MAX_PRINTED * 5]
    ]
    for v in violations[:MAX_PRINTED]:
        i, j, k = v.triple
        print(f"{i} {j} {k} : {_vec(v.lhs)} != {_vec(v.rhs)}")
    if violations:
        print(f"{len(violations)} of {algebra.dim**3} basis triples violate the pre-Lie identity")
        return EXIT_VIOLATIONS
    print(f"ok: pre-Lie identity holds on all {algebra.dim**3} basis triples (p={algebra.p}, dim={algebra.dim})")
    return EXIT_OK


def cmd_chains(args, limits: Limits, report: RunReport) -> int:
    algebra = load_algebra(args.file).verified_copy()
    max_n = args.max if args.max is not None else limits.max_n
    chain = algebra_chain(algebra, args.kind, max_n)
    for n, dim in enumerate(chain.dims, start=1):
        print(f"A^[{n}] dim {dim}" if args.kind == "strong" else f"{args.kind} {n}: dim {dim}")
    if chain.nilpotency_index is None:
        print(f"not nilpotent within {len(chain.terms)} terms (stable from term {chain.stabilized_at})")
    else:
        print(f"nilpotency index: {chain.nilpotency_index}")
    report.chain_dims = {args.kind: list(chain.dims)}
    report.details = {"nilpotency_index": chain.nilpotency_index, "stabilized_at": chain.stabilized_at}
    return EXIT_OK


def cmd_bounds(args, limits: Limits, report: RunReport) -> int:
    algebra = load_algebra(args.file).verified_copy()
    bounds = check_index_bounds(algebra, limits.max_n)
    for check in bounds.checks:
        state = "skipped" if check.skipped else "holds" if check.holds else "FAILS"
        detail = f" ({check.detail})" if check.detail else ""
        print(f"{check.name}: {state}{detail}")
    print(f"generators: {bounds.generators}")
    report.counts = {"checks": len(bounds.checks), "failed": sum(1 for c in bounds.checks if not (c.holds or c.skipped))}
    report.details = {
        "generators": bounds.generators,
        "checks": [{"name": c.name, "holds": c.holds, "skipped": c.skipped, "detail": c.detail} for c in bounds.checks],
    }
    return EXIT_OK if bounds.ok else EXIT_VIOLATIONS


def cmd_to_brace(args, limits: Limits, report: RunReport) -> int:
    algebra = load_algebra(args.file)
    brace = flow_brace(algebra)
    save_brace(brace, args.output)
    print(f"wrote flows brace (p={brace.p}, dim={brace.dim}, index={brace.flows.index}) to {args.output}")
    report.details = {"index": brace.flows.index, "output": str(args.output)}
    return EXIT_OK


def _print_brace_report(title: str, rep) -> None:
    for law in rep.tested:
        print(f"{title} {law}: {rep.tested[law]} checked, {rep.violation_counts[law]} violations")
    for v in rep.violations[:MAX_PRINTED]:
        print(f"  {v.law}: " + " ".join(_vec(e) for e in v.elements))


def _brace_report_dict(rep) -> dict:
    return {
        "mode": rep.mode,
        "tested": dict(rep.tested),
        "violations": dict(rep.violation_counts),
    }


def cmd_brace_check(args, limits: Limits, report: RunReport) -> int:
    brace = _load_brace_input(args.file, limits)
    samples = args.samples if args.samples is not None else limits.samples
    rep = _run_long(
        check_brace_axioms, brace, args.mode, samples=samples, seed=args.seed, max_workers=args.workers, limits=limits
    )
    _print_brace_report("brace", rep)
    report.seed = rep.seed
    report.counts = {"tested": rep.total_tested, "violations": rep.total_violations}
    report.violations = [{"law": v.law, "elements": [list(e) for e in v.elements]} for v in rep.violations]
    report.details = _brace_report_dict(rep)
    return EXIT_OK if rep.ok else EXIT_VIOLATIONS


def cmd_to_prelie(args, limits: Limits, report: RunReport) -> int:
    brace = load_brace(args.file, limits=limits)
    algebra = _run_long(brace_to_prelie, brace, seed=args.seed, limits=limits)
    save_algebra(algebra, args.output)
    print(f"wrote pre-Lie algebra (p={algebra.p}, dim={algebra.dim}) to {args.output}")
    report.details = {"output": str(args.output)}
    return EXIT_OK


def cmd_roundtrip(args, limits: Limits, report: RunReport) -> int:
    algebra = load_algebra(args.file)
    brace = flow_brace(algebra)
    recovered = _run_long(brace_to_prelie, brace, seed=args.seed, limits=limits)
    diff = int((recovered.table != algebra.table).sum())
    print(f"tensor diff: {diff} entries")
    report.counts = {"tensor_diff": diff}
    report.details = {"index": brace.flows.index}
    return EXIT_OK if diff == 0 else EXIT_VIOLATIONS


def cmd_ybe(args, limits: Limits, report: RunReport) -> int:
    brace = _load_brace_input(args.file, limits)
    samples = args.samples if args.samples is not None else limits.samples
    common = dict(samples=samples, seed=args.seed, max_workers=args.workers, limits=limits)
    axiom_mode = "exhaustive" if brace.size <= limits.exhaustive_brace_size else "sample"

    def run():
        axioms = check_brace_axioms(brace, axiom_mode, **common)
        if not axioms.ok:
            return axioms, None, None, None
        r = build_solution(brace.with_verification(axioms), seed=args.seed, limits=limits)
        ybe = verify_ybe(r, args.mode, **common)
        inv = check_involutive_report(r, args.mode, **common)
        nondeg = check_nondegenerate(r, args.mode, samples=samples, seed=args.seed, limits=limits)
        return axioms, ybe, inv, nondeg

    axioms, ybe, inv, nondeg = _run_long(run)
    report.seed = None if args.mode == "exhaustive" else args.seed
    report.details = {"brace_axioms": _brace_report_dict(axioms)}
    if ybe is None:
        _print_brace_report("brace", axioms)
        print("brace axioms fail; no solution built")
        report.counts = {"brace_violations": axioms.total_violations}
        return EXIT_VIOLATIONS
    print(f"ybe: {ybe.checked} triples checked, {ybe.violation_count} violations ({ybe.convention})")
    print(f"involutive: {inv.checked} pairs checked, {inv.violation_count} violations")
    print(f"nondegenerate: left {'ok' if nondeg.left_ok else 'FAILS'}, right {'ok' if nondeg.right_ok else 'FAILS'}")
    for triple in ybe.violations[:MAX_PRINTED]:
        print("  " + " ".join(_vec(e) for e in triple))
    report.counts = {
        "ybe_checked": ybe.checked,
        "ybe_violations": ybe.violation_count,
        "involutive_checked": inv.checked,
        "involutive_violations": inv.violation_count,
    }
    report.violations = [[list(e) for e in t] for t in ybe.violations]
    report.details.update(
        convention=ybe.convention,
        nondegenerate={"left": nondeg.left_ok, "right": nondeg.right_ok, "checked": nondeg.checked},
    )
    ok = ybe.ok and inv.ok and nondeg.ok
    return EXIT_OK if ok else EXIT_VIOLATIONS


def cmd_enumerate(args, limits: Limits, report: RunReport) -> int:
    specs = cases_for(args.case)
    results = []
    for spec in specs:
        result = _run_long(
            enumerate_case,
            spec,
            args.p,
            args.budget,
            sample=args.sample,
            seed=args.seed,
            max_workers=args.workers,
            limits=limits,
        )
        c = result.census
        print(
            f"{c.case_id} p={c.p} {c.mode}: {c.examined} examined, {c.accepted} accepted, "
            f"{len(c.fingerprints)} fingerprints"
        )
        for fp, count in sorted(c.fingerprints.items()):
            print(f"  {format_fingerprint(fp)}: {count}")
        results.append(result)
    if args.out:
        if len(results) == 1:
            write_census(results[0], args.out)
        else:
            atomic_write_text(args.out, "".join(census_text(r) for r in results))
    report.seed = args.seed if args.sample is not None else None
    report.counts = {
        "examined": sum(r.census.examined for r in results),
        "accepted": sum(r.census.accepted for r in results),
    }
    report.details = {"cases": [r.census.as_dict() for r in results]}
    report.chain_dims = {
        r.census.case_id: [fingerprint_to_json(fp)[0] for fp in sorted(r.census.fingerprints)] for r in results
    }
    return EXIT_OK if all(r.ok for r in results) else EXIT_VIOLATIONS


def cmd_relations(args, limits: Limits, report: RunReport) -> int:
    details = []
    for spec in cases_for(args.case):
        rels = derived_relations(spec)
        print(f"{spec.case_id}: {len(rels)} derived relations")
        for rel in rels:
            print(f"  {rel}")
        entry = {"case": spec.case_id, "derived": [str(r) for r in rels]}
        if spec.family in PRINTED_SYSTEMS:
            cmp = compare_with_printed(spec, args.p, args.samples, seed=args.seed)
            print(f"  printed equations nonzero at derived solutions: {list(cmp.nonzero_counts)} of {cmp.checked}")
            entry["printed_nonzero"] = list(cmp.nonzero_counts)
        details.append(entry)
    report.seed = args.seed
    report.details = {"cases": details}
    return EXIT_OK


def cmd_example(args, limits: Limits, report: RunReport) -> int:
    algebra = fixture(args.name, args.p)
    text = dumps_algebra(algebra)
    if args.output:
        atomic_write_text(args.output, text)
        print(f"wrote {args.name} (p={algebra.p}) to {args.output}")
    else:
        sys.stdout.write(text)
    report.chain_dims = {"strong": list(algebra_chain(algebra, "strong", limits.max_n).dims)}
    return EXIT_OK


# ---------------------------------------------------------------------------
# 参数解析
# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonnegative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    common.add_argument("--report", metavar="PATH", help="write a JSON run report")
    common.add_argument("--timing", action="store_true", help="include timing in the run report")
    common.add_argument("--workers", type=_positive, metavar="N", help="sweep thread pool size")

    parser = _Parser(prog="fpbraces", description="pre-Lie algebras, braces and Yang-Baxter solutions over F_p")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name: str, func: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def sampling(p: argparse.ArgumentParser) -> None:
        p.add_argument("--mode", choices=CHECK_MODES, default="exhaustive")
        p.add_argument("--samples", type=_positive, metavar="N")
        p.add_argument("--seed", type=_nonnegative, default=DEFAULTS.seed, metavar="S")

    p = add("check", cmd_check, "check the pre-Lie identity")
    p.add_argument("file")

    p = add("chains", cmd_chains, "dimensions of a chain of ideals")
    p.add_argument("file")
    p.add_argument("--kind", choices=CHAIN_KINDS, default="strong")
    p.add_argument("--max", type=_positive, metavar="N")

    p = add("bounds", cmd_bounds, "nilpotency bounds for dim-5 algebras")
    p.add_argument("file")

    p = add("to-brace", cmd_to_brace, "build the flows brace")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)

    p = add("brace-check", cmd_brace_check, "check the brace axioms")
    p.add_argument("file")
    sampling(p)

    p = add("to-prelie", cmd_to_prelie, "recover the pre-Lie product from a brace")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=_nonnegative, default=DEFAULTS.seed, metavar="S")

    p = add("roundtrip", cmd_roundtrip, "algebra -> brace -> algebra")
    p.add_argument("file")
    p.add_argument("--seed", type=_nonnegative, default=DEFAULTS.seed, metavar="S")

    p = add("ybe", cmd_ybe, "verify the set-theoretic Yang-Baxter equation")
    p.add_argument("file")
    sampling(p)

    p = add("enumerate", cmd_enumerate, "sweep a classification case")
    p.add_argument("--case", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--budget", type=_positive)
    p.add_argument("--out")
    p.add_argument("--sample", type=_positive, metavar="N")
    p.add_argument("--seed", type=_nonnegative, default=DEFAULTS.seed, metavar="S")

    p = add("relations", cmd_relations, "derived relations of a case and the printed-system cross-check")
    p.add_argument("--case", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--samples", type=_positive, default=100, metavar="N")
    p.add_argument("--seed", type=_nonnegative, default=DEFAULTS.seed, metavar="S")

    p = add("example", cmd_example, "emit a bundled example algebra")
    p.add_argument("name", choices=sorted(FIXTURES))
    p.add_argument("--p", type=int)
    p.add_argument("-o", "--output")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    limits = DEFAULTS
    report = RunReport(command=args.command)
    path = getattr(args, "file", None)
    started = time.monotonic()
    try:
        if path is not None:
            report.input_digest = file_digest(path) if Path(path).is_file() else None
        code = args.func(args, limits, report)
    except FpBracesError as exc:
        print(f"fpbraces: error: {exc}", file=sys.stderr)
        logger.debug("command failed", exc_info=True)
        return exc.exit_code
    except KeyboardInterrupt:
        print("fpbraces: interrupted", file=sys.stderr)
        return EXIT_USAGE
    except Exception:  # noqa: BLE001
        logger.exception("internal error")
        return EXIT_INTERNAL
    report.timing = {"seconds": time.monotonic() - started}
    if args.report:
        report.write(args.report, include_timing=args.timing)
    return code


if __name__ == "__main__":
    sys.exit(main())
