"""Command-line front end.

Every report starts with a verdict line (YES, NO, a number or INFINITY);
exchange traces follow as ``t: (i,j) g<->h`` lines.  Exit status: 0 answered,
2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import re
import sys
import time

from .core import (
    DEFAULT_BUDGET,
    INFINITY,
    BudgetExceeded,
    ExchangeStep,
    GoodNotHeld,
    ReformError,
    UtilityClass,
    is_ef1,
    is_weak_ef1,
    replay,
    size_vector,
)
from .fileformat import FormatError, InstanceFile, dumps, from_reduced, load
from .generators import REDUCTIONS, ReducedInstance, decide, random_allocation, random_instance, reduce
from .oracle import beneficial_reachable_ef1, exists_ef1_bruteforce, shortest_ef1_path
from .optimal import exchange_sequence, optimal_exchanges_with_method
from .reformability import reformable_with_method
from .weak_ef1 import algorithm_A, verify_trace
from .worst_case import construct_ef1_within_bound, general_bounds, idenbin_bounds

TRACE_LINE = re.compile(r"^\s*(\d+):\s*\((\d+),(\d+)\)\s+(\d+)<->(\d+)\s*$")


class InputError(Exception):
    pass


def _yes(b: bool) -> str:
    return "YES" if b else "NO"


def _num(x) -> str:
    if x == INFINITY:
        return "INFINITY"
    if hasattr(x, "denominator") and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))


def _csv(sv) -> str:
    return ",".join(map(str, sv))


def _trace_lines(trace) -> list[str]:
    return [f"{t}: {step}" for t, step in enumerate(trace, 1)]


def parse_trace(text: str) -> list[ExchangeStep]:
    """Exchange lines of a report, in order; other lines are ignored."""
    steps = []
    for line in text.splitlines():
        mt = TRACE_LINE.match(line)
        if mt:
            t, a, b, g, h = map(int, mt.groups())
            if t != len(steps) + 1:
                raise InputError(f"trace line numbered {t}, expected {len(steps) + 1}")
            steps.append(ExchangeStep(a, b, g, h))
    return steps


def _parse_sv(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"--size-vector: expected comma-separated integers, got {text!r}") from None


def _load(args, need_instance=True, need_alloc=False) -> InstanceFile:
    if not args.instance:
        raise InputError("--instance is required")
    f = load(args.instance)
    if need_instance and f.instance is None:
        raise InputError(f"{args.instance}: no utilities")
    if need_alloc and f.allocation is None:
        raise InputError(f"{args.instance}: no allocation")
    return f


def _size_vector(args, f: InstanceFile) -> tuple[int, ...]:
    if args.size_vector:
        return _parse_sv(args.size_vector)
    if f.size_vector is not None:
        return f.size_vector
    if f.allocation is not None:
        return size_vector(f.allocation)
    raise InputError("no size vector: pass --size-vector or put one in the file")


# --- subcommands ---------------------------------------------------------------


def cmd_check(args) -> list[str]:
    f = _load(args, need_alloc=True)
    alloc = f.allocation
    out = []
    if args.replay:
        with open(args.replay, encoding="utf-8") as fh:
            steps = parse_trace(fh.read())
        try:
            alloc = replay(alloc, steps)
        except (GoodNotHeld, ValueError, IndexError) as e:
            raise InputError(f"replay failed: {e}") from None
        out.append(f"replayed: {len(steps)}")
    ef1 = is_ef1(f.instance, alloc)
    return [_yes(ef1), f"ef1: {_yes(ef1).lower()}", f"weak-ef1: {_yes(is_weak_ef1(f.instance, alloc)).lower()}",
            f"size-vector: {_csv(size_vector(alloc))}", f"allocation: {alloc}"] + out


def cmd_reformable(args) -> list[str]:
    f = _load(args)
    sv = _size_vector(args, f)
    ok, method = reformable_with_method(f.instance, sv, args.budget, args.oracle)
    return [_yes(ok), f"method: {method}", f"size-vector: {_csv(sv)}"]


def cmd_optimal(args) -> list[str]:
    f = _load(args, need_alloc=True)
    count, trace, method = optimal_exchanges_with_method(f.instance, f.allocation, args.budget, args.oracle)
    return [_num(count), f"method: {method}"] + _trace_lines(trace or [])


def cmd_bound(args) -> list[str]:
    if args.n is None or args.s is None:
        raise InputError("bound needs --n and --s")
    if args.n < 2 or args.s < 1:
        raise InputError("bound needs --n >= 2 and --s >= 1")
    if args.cls == UtilityClass.IDENTICAL_BINARY.value:
        rep = idenbin_bounds(args.n, args.s)
        return [_num(rep.upper), f"lower: {_num(rep.lower)}", f"upper: {_num(rep.upper)}",
                f"achieved: {rep.achieved}", f"formula: {rep.formula}"]
    rep = general_bounds(args.n, args.s)
    return [_num(rep.upper), f"lower: {_num(rep.lower)}", f"upper: {_num(rep.upper)}", f"formula: {rep.formula}"]


def cmd_construct(args) -> list[str]:
    f = _load(args, need_alloc=True)
    try:
        target, count = construct_ef1_within_bound(f.instance, f.allocation)
    except ValueError as e:
        raise InputError(str(e)) from None
    n, s = f.instance.num_agents, len(f.allocation.bundles[0])
    rep = general_bounds(n, s, count)
    return [_num(count), f"bound: {_num(rep.upper)}", f"target: {target}"] + _trace_lines(
        exchange_sequence(f.allocation, target))


def cmd_weakef1(args) -> list[str]:
    f = _load(args, need_alloc=True)
    final, trace = algorithm_A(f.instance, f.allocation)
    bad = verify_trace(trace)
    return [str(len(trace)), f"final: {final}", f"violations: {','.join(bad) or 'none'}"] + _trace_lines(
        st.exchange() for st in trace)


def cmd_beneficial(args) -> list[str]:
    f = _load(args, need_alloc=True)
    ok, trace = beneficial_reachable_ef1(f.instance, f.allocation, args.budget)
    return [_yes(ok)] + _trace_lines(trace or [])


def cmd_reduce(args) -> list[str]:
    f = _load(args, need_instance=False)
    if f.source is None:
        raise InputError(f"{args.instance}: no source envelope")
    if not args.target:
        raise InputError(f"reduce needs --target (one of {', '.join(REDUCTIONS)})")
    red = reduce(f.source, args.target, n=args.n or 3)
    return dumps(from_reduced(red, f.source)).splitlines()


def cmd_generate(args) -> list[str]:
    if args.n is None or args.m is None:
        raise InputError("generate needs --n and --m")
    inst = random_instance(args.seed, args.n, args.m, args.cls or "general", args.max_u)
    alloc = None
    if args.size_vector:
        sv = _parse_sv(args.size_vector)
        if len(sv) != args.n or sum(sv) != args.m:
            raise InputError("--size-vector does not fit --n and --m")
        alloc = random_allocation(args.seed, args.n, args.m, sv)
    return dumps(InstanceFile(inst, alloc)).splitlines()


def cmd_oracle(args) -> list[str]:
    f = _load(args)
    if f.question is not None:
        sv = _size_vector(args, f)
        red = ReducedInstance(f.instance, sv, f.allocation, f.budget_k, f.question)
        return [_yes(decide(red, args.budget)), f"question: {f.question}"]
    if f.allocation is not None:
        count, trace = shortest_ef1_path(f.instance, f.allocation, args.budget)
        return [_num(count)] + _trace_lines(trace or [])
    return [_yes(exists_ef1_bruteforce(f.instance, _size_vector(args, f), args.budget))]


COMMANDS = {
    "check": cmd_check,
    "reformable": cmd_reformable,
    "optimal": cmd_optimal,
    "bound": cmd_bound,
    "construct": cmd_construct,
    "weakef1": cmd_weakef1,
    "beneficial": cmd_beneficial,
    "reduce": cmd_reduce,
    "generate": cmd_generate,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ef1reform", description="Reform allocations into EF1 ones by exchanges.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--instance", help="instance file (JSON, format ef1reform/1)")
    ap.add_argument("--size-vector", help="bundle sizes, comma-separated")
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="state budget for searches")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--oracle", action="store_true", help="force brute-force paths")
    ap.add_argument("--replay", help="report file whose trace lines are applied first (check)")
    ap.add_argument("--target", help="reduction to apply (reduce)")
    ap.add_argument("--n", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--s", type=int)
    ap.add_argument("--class", dest="cls", choices=[c.value for c in UtilityClass])
    ap.add_argument("--max-u", type=int, default=3)
    ap.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        lines = COMMANDS[args.command](args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=err)
        return 3
    except (InputError, FormatError, ReformError, OSError) as e:
        print(f"error: {e}", file=err)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=err)
        return 2
    out.write("".join(line + "\n" for line in lines))
    if args.timing:
        print(f"time: {time.perf_counter() - t0:.3f}s", file=err)
    return 0


def main() -> None:
    sys.exit(run())
