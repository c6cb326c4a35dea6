"""Command-line entry point.

Exit codes: 0 success / provable / valid, 1 unprovable / invalid /
disagreement, 2 resource limit or unsupported input region, 64 usage
error, 70 internal error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from typing import Any, Sequence

from . import encode
from .kernel import (
    FocusProof, Proof, ProofError, Unsupported, additive_units_proof, check_focus_proof,
    check_proof, dump, eta_expand_identity, has_cut, load, monotonicity_proof, same_multiset,
)
from .ordinal import OMEGA, Ordinal, OrdinalError, format_ordinal, nat, parse_ordinal
from .rank import ExactModeUnsupported, Valuation, rank, rank_sequent, rank_upper_bound, rank_val, rho_formula
from .search import (
    SearchLimits, Status, closure_fixpoint, decide, focused_decide, premise_closure,
)
from .syntax import (
    MU, NU, Fix, Formula, ParseError, Sequent, format_formula, format_sequent, instantiate, is_closed,
    parse, parse_formula, parse_sequent_list, polarity, size, var,
)
from .transform import CutStats, RankMeasureViolation, eliminate_cuts, focus

EX_OK, EX_NO, EX_RESOURCE, EX_USAGE, EX_SOFTWARE = 0, 1, 2, 64, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _Out:
    def __init__(self, fmt: str):
        self.json = fmt == "json"

    def emit(self, human: str, data: Any) -> None:
        print(json.dumps(data, ensure_ascii=False) if self.json else human)


def _text(arg: str) -> str:
    return sys.stdin.read() if arg == "-" else arg


def _read_file(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _ordinal(text: str) -> Ordinal:
    try:
        return parse_ordinal(text)
    except OrdinalError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _ordinals(text: str) -> tuple[Ordinal, ...]:
    return tuple(_ordinal(t) for t in text.split(",") if t.strip())


def _counts(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated naturals, got {text!r}") from None
    if any(n < 0 for n in out):
        raise argparse.ArgumentTypeError("counter values must be non-negative")
    return out


def _limits(a) -> SearchLimits:
    return SearchLimits(max_nodes=a.max_nodes, max_rank=a.max_rank, gamma_probe=a.gamma_probe)


def _sequent(a) -> list[Formula]:
    return parse_sequent_list(_text(a.sequent), a.alpha)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _verify(p: Proof | FocusProof, **kw):
    if isinstance(p, FocusProof):
        return check_focus_proof(p, **{k: v for k, v in kw.items() if k == "strict_release"})
    return check_proof(p, **{k: v for k, v in kw.items() if k != "strict_release"})


# -- commands -----------------------------------------------------------------------------


def cmd_parse(a, out: _Out) -> int:
    x = parse(_text(a.text), a.alpha)
    if isinstance(x, Sequent):
        out.emit(format_sequent(x), {"kind": "sequent", "sequent": [format_formula(f) for f in x]})
    else:
        out.emit(format_formula(x), {"kind": "formula", "formula": format_formula(x), "size": size(x),
                                     "polarity": polarity(x).value, "closed": is_closed(x)})
    return EX_OK


def _rank_of(text: str, alpha, upper: bool) -> Ordinal:
    x = parse(text, alpha)
    fs = list(x) if isinstance(x, Sequent) else [x]
    if upper:
        from .ordinal import natural_sum_all
        return natural_sum_all(rank_upper_bound(f) for f in fs)
    return rank_sequent(fs) if isinstance(x, Sequent) else rank(x)


def cmd_rank(a, out: _Out, upper: bool = False) -> int:
    upper = upper or a.upper
    try:
        r = _rank_of(_text(a.text), a.alpha, upper)
    except ExactModeUnsupported as e:
        raise UsageError(f"{e}; use --upper or rank-ub for an upper bound") from None
    out.emit(format_ordinal(r), {"rank": format_ordinal(r), "exact": not upper})
    return EX_OK


def _search(a, out: _Out, engine) -> int:
    seq = _sequent(a)
    t = time.perf_counter()
    res = engine(seq, _limits(a))
    elapsed = time.perf_counter() - t
    status = res.status
    if status is Status.UNPROVABLE and not res.definitive:
        status = Status.RESOURCE
    data = {"sequent": [format_formula(f) for f in seq], "status": status.value, "nodes": res.nodes,
            "definitive": res.definitive, "seconds": round(elapsed, 4)}
    if a.proof is not None and res.proof is not None:
        if a.proof == "-":
            data["proof"] = json.loads(dump(res.proof))
        else:
            _write(a.proof, dump(res.proof, indent=1))
    human = f"{status.value} ({res.nodes} nodes, {elapsed:.3f}s)"
    if "proof" in data and not out.json:
        human += "\n" + dump(res.proof, indent=1)
    out.emit(human, data)
    return {Status.PROVABLE: EX_OK, Status.UNPROVABLE: EX_NO, Status.RESOURCE: EX_RESOURCE}[status]


def cmd_check(a, out: _Out) -> int:
    try:
        p = load(_read_file(a.file))
    except (json.JSONDecodeError, ParseError, OrdinalError, ProofError) as e:
        raise UsageError(f"cannot load proof: {e}") from None
    v = _verify(p, cut_free=a.cut_free, cut_bound=a.cut_bound, strict_release=a.strict_release)
    data = {"valid": v.valid, "reason": v.reason, "path": list(v.path), "detail": v.detail}
    out.emit("valid" if v.valid else f"invalid at {list(v.path)}: {v.reason} {v.detail}".rstrip(), data)
    return EX_OK if v.valid else EX_NO


def _load_plain(path: str) -> Proof:
    try:
        p = load(_read_file(path))
    except (json.JSONDecodeError, ParseError, OrdinalError, ProofError) as e:
        raise UsageError(f"cannot load proof: {e}") from None
    if isinstance(p, FocusProof):
        raise UsageError("expected a plain (unfocussed) proof")
    v = check_proof(p)
    if not v.valid:
        raise UsageError(f"input proof is invalid at {list(v.path)}: {v.reason}")
    return p


def _unsupported(out: _Out, e: Exception) -> int:
    data = {"error": "unsupported", "detail": str(e)}
    if out.json:
        print(json.dumps(data))
    print(f"unsupported: {e}", file=sys.stderr)
    return EX_RESOURCE


def cmd_elim(a, out: _Out) -> int:
    p = _load_plain(a.file)
    stats = CutStats()
    try:
        q = eliminate_cuts(p, stats)
    except Unsupported as e:
        return _unsupported(out, e)
    v = check_proof(q, cut_free=True)
    if not v.valid or not same_multiset(q.conclusion, p.conclusion):
        raise AssertionError(f"cut elimination produced an invalid proof: {v.reason}")
    _write(a.output, dump(q, indent=None if out.json else 1))
    print(f"eliminated {stats.reductions} cut reductions, size {p.size()} -> {q.size()}", file=sys.stderr)
    return EX_OK


def cmd_focusize(a, out: _Out) -> int:
    p = _load_plain(a.file)
    try:
        if has_cut(p):
            p = eliminate_cuts(p)
        q = focus(p)
    except Unsupported as e:
        return _unsupported(out, e)
    v = check_focus_proof(q)
    if not v.valid:
        raise AssertionError(f"focussing produced an invalid proof: {v.reason}")
    _write(a.output, dump(q, indent=None if out.json else 1))
    return EX_OK


def _machines(a) -> list[encode.MinskyMachine]:
    if a.suite:
        return encode.machine_suite()
    if not a.machine:
        raise UsageError("give a machine file or --suite")
    try:
        return [encode.MinskyMachine.from_json(_read_file(a.machine))]
    except encode.MachineError as e:
        raise UsageError(str(e)) from None


def _goal(name: str) -> Formula:
    return encode.goal_zero_output() if name == "zero" else encode.goal_any_output()


def cmd_minsky_compile(a, out: _Out) -> int:
    m = _machines(a)[0]
    inputs = a.input if a.input is not None else (0,) * m.counters
    try:
        seq = encode.encoded_sequent(m, inputs, a.beta, _goal(a.goal), a.z_bound or OMEGA)
    except encode.MachineError as e:
        raise UsageError(str(e)) from None
    out.emit(", ".join(format_formula(f) for f in seq), {"sequent": [format_formula(f) for f in seq]})
    return EX_OK


def cmd_minsky_diff(a, out: _Out) -> int:
    limits = SearchLimits(max_nodes=a.max_nodes)
    worst = EX_OK
    for m in _machines(a):
        rng = range(a.max_counter + 1)
        for k in range(a.min_k, a.max_k + 1):
            for v in itertools.product(rng, repeat=m.counters):
                r = encode.comp_provability_matches_reachability(m, v, k, _goal(a.goal), limits=limits)
                if r.status is Status.RESOURCE:
                    worst = max(worst, EX_RESOURCE)
                elif not r.agrees:
                    worst = max(worst, EX_NO) if worst != EX_RESOURCE else worst
                if out.json:
                    print(json.dumps(r.as_dict()))
                elif a.verbose or not r.agrees:
                    flag = "ok " if r.agrees else "BAD"
                    print(f"{flag} {m.name or 'machine'} {v} k={k}: provable={r.provable} "
                          f"predicted={r.predicted} ({r.nodes} nodes)")
    if not out.json:
        print("all cases agree" if worst == EX_OK else "disagreements or resource limits found")
    return worst


def cmd_closure(a, out: _Out) -> int:
    seeds = [parse_sequent_list(_text(s), a.alpha) for s in a.sequent]
    try:
        universe = premise_closure(seeds, a.limit)
    except ValueError as e:
        raise UsageError(str(e)) from None
    fixed, rounds = closure_fixpoint(universe)
    provable = {g for g in universe if decide(g).provable}
    agree = fixed == provable
    data = {"universe": len(universe), "fixpoint": len(fixed), "rounds": rounds, "decide_provable": len(provable),
            "agree": agree,
            "seeds": [{"sequent": format_sequent(Sequent(s)), "in_fixpoint": Sequent(s) in fixed} for s in seeds]}
    lines = [f"universe {len(universe)}, fixed point {len(fixed)} after {rounds} rounds, "
             f"decide-provable {len(provable)}, {'agree' if agree else 'DISAGREE'}"]
    lines += [f"  {d['sequent']}: {'in' if d['in_fixpoint'] else 'not in'} fixed point" for d in data["seeds"]]
    out.emit("\n".join(lines), data)
    return EX_OK if agree else EX_NO


# -- demos --------------------------------------------------------------------------------


def _show_proof(out: _Out, title: str, p: Proof | FocusProof, extra: dict | None = None) -> int:
    v = _verify(p)
    data = {"demo": title, "conclusion": [format_formula(f) for f in _conclusion(p)], "valid": v.valid,
            "proof": json.loads(dump(p)), **(extra or {})}
    human = f"{title}: {format_sequent(_conclusion(p))}\n{dump(p, indent=1)}\nchecker: {'valid' if v.valid else v.reason}"
    out.emit(human, data)
    return EX_OK if v.valid else EX_SOFTWARE


def _conclusion(p):
    return p.sequent() if isinstance(p, FocusProof) else p.conclusion


def demo_additive_units(a, out: _Out) -> int:
    b = a.beta
    ctx = (parse_formula("0"),) if b.nat is not None else (parse_formula("T"),)
    try:
        p = additive_units_proof(b, ctx)
    except Unsupported as e:
        return _unsupported(out, e)
    return _show_proof(out, f"additive units at {format_ordinal(b)}", p)


def _body(text: str, x: str, alpha) -> Formula:
    f = parse_formula(f"mu^0 {x}. ({text})", alpha)
    assert isinstance(f, Fix)
    return instantiate(f.body, var(x))


def demo_monotonicity(a, out: _Out) -> int:
    kind = MU if a.kind == "mu" else NU
    try:
        body = _body(a.body, a.var, a.alpha)
    except ParseError as e:
        raise UsageError(f"bad body: {e}") from None
    try:
        p = monotonicity_proof(kind, body, a.var, getattr(a, "from"), a.to)
    except ProofError as e:
        raise UsageError(str(e)) from None
    except Unsupported as e:
        return _unsupported(out, e)
    return _show_proof(out, "monotonicity", p)


def demo_eta(a, out: _Out) -> int:
    f = parse_formula(a.formula, a.alpha)
    try:
        p = eta_expand_identity(f)
    except ProofError as e:
        raise UsageError(str(e)) from None
    except Unsupported as e:
        return _unsupported(out, e)
    code = _show_proof(out, f"eta expansion of {format_formula(f)}", p, {"proof_size": p.size()})
    if a.focus and code == EX_OK:
        code = _show_proof(out, "focussed", focus(p))
    return code


def demo_rho(a, out: _Out) -> int:
    rows = []
    ok = True
    for k in range(a.max_k + 1):
        for g in range(a.max_gamma + 1):
            r = rank_val(rho_formula(1, k), Valuation({"x1": g}, default=1))
            good = r >= nat(g * k)
            ok &= good
            rows.append({"k": k, "gamma": g, "rank": format_ordinal(r), "ok": good})
    bounds = []
    limit = parse_ordinal("w^w^w")
    for n in range(a.n + 1):
        ub = rank_upper_bound(rho_formula(n, OMEGA))
        good = ub < limit
        ok &= good
        bounds.append({"n": n, "upper_bound": format_ordinal(ub), "ok": good})
    if out.json:
        print(json.dumps({"lower": rows, "upper": bounds, "ok": ok}))
    else:
        for r in rows:
            print(f"k={r['k']} gamma={r['gamma']}: rank {r['rank']} >= {r['gamma'] * r['k']}"
                  f"{'' if r['ok'] else '  VIOLATED'}")
        for b in bounds:
            print(f"n={b['n']}: upper bound {b['upper_bound']} < w^w^w{'' if b['ok'] else '  VIOLATED'}")
    return EX_OK if ok else EX_NO


def demo_sigma01(a, out: _Out) -> int:
    ms = encode.machine_suite() if not a.machine else [encode.MinskyMachine.from_json(_read_file(a.machine))]
    if not a.machine:
        ms = [m for m in ms if m.name == a.name]
        if not ms:
            raise UsageError(f"no suite machine named {a.name!r}")
    m = ms[0]
    inputs = a.input if a.input is not None else (0,) * m.counters
    r = encode.comp_provability_matches_reachability(m, inputs, a.beta, encode.goal_zero_output(),
                                                     limits=SearchLimits(max_nodes=a.max_nodes))
    seq = encode.encoded_sequent(m, inputs, nat(a.beta), encode.goal_zero_output())
    res = focused_decide(seq, SearchLimits(max_nodes=a.max_nodes))
    data = {"machine": m.name, "sequent": [format_formula(f) for f in seq], **r.as_dict()}
    human = [", ".join(format_formula(f) for f in seq),
             f"provable={r.provable} halts-with-zero-output={r.predicted} agrees={r.agrees}"]
    if res.proof is not None:
        v = check_focus_proof(res.proof)
        data["proof_valid"] = v.valid
        human.append(f"focussed proof: {'valid' if v.valid else v.reason}")
        if not v.valid:
            out.emit("\n".join(human), data)
            return EX_SOFTWARE
    out.emit("\n".join(human), data)
    if r.status is Status.RESOURCE:
        return EX_RESOURCE
    return EX_OK if r.agrees else EX_NO


# -- argument parsing ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--alpha", type=_ordinal, default=OMEGA, help="annotation of unannotated binders (default w)")
    common.add_argument("--format", choices=("human", "json"), default="human")

    search = _Parser(add_help=False)
    search.add_argument("--max-nodes", type=int, default=2_000_000)
    search.add_argument("--max-rank", type=_ordinal, default=None)
    search.add_argument("--gamma-probe", type=_ordinals, default=(), help="ordinals tried below limit annotations")

    p = _Parser(prog="mumall", description="Linear logic with ordinal-indexed fixed points.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", parents=[common], help="parse and normalise a formula or sequent")
    s.add_argument("text")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("rank", parents=[common], help="rank of a formula or sequent")
    s.add_argument("text")
    s.add_argument("--upper", action="store_true", help="print the upper bound instead")
    s.set_defaults(fn=cmd_rank)

    s = sub.add_parser("rank-ub", parents=[common], help="rank upper bound (works for limit annotations)")
    s.add_argument("text")
    s.set_defaults(fn=lambda a, o: cmd_rank(a, o, upper=True), upper=True)

    for name, engine in (("decide", decide), ("fdecide", focused_decide)):
        s = sub.add_parser(name, parents=[common, search], help=f"{'focussed ' if name[0] == 'f' else ''}proof search")
        s.add_argument("sequent", help="'A, B' or 'A => B'; '-' reads stdin")
        s.add_argument("--proof", nargs="?", const="-", default=None, metavar="FILE",
                       help="emit the proof (to FILE, or inline when no file is given)")
        s.set_defaults(fn=lambda a, o, e=engine: _search(a, o, e))

    s = sub.add_parser("check", parents=[common], help="check a JSON proof")
    s.add_argument("file")
    s.add_argument("--cut-free", action="store_true")
    s.add_argument("--cut-bound", type=_ordinal, default=None)
    s.add_argument("--strict-release", action="store_true")
    s.set_defaults(fn=cmd_check)

    for name, fn in (("elim", cmd_elim), ("focusize", cmd_focusize)):
        s = sub.add_parser(name, parents=[common], help="eliminate cuts" if name == "elim" else "focus a proof")
        s.add_argument("file")
        s.add_argument("-o", "--output", default=None)
        s.set_defaults(fn=fn)

    mk = sub.add_parser("minsky", help="counter machine encoding")
    msub = mk.add_subparsers(dest="minsky_cmd", required=True, parser_class=_Parser)
    machine = _Parser(add_help=False)
    machine.add_argument("machine", nargs="?", help="machine JSON file")
    machine.add_argument("--suite", action="store_true", help="use the built-in machine suite")
    machine.add_argument("--goal", choices=("any", "zero"), default="any",
                         help="accept any final counters, or only empty ones")
    s = msub.add_parser("compile", parents=[common, machine])
    s.add_argument("--beta", type=_ordinal, required=True)
    s.add_argument("--input", type=_counts, default=None)
    s.add_argument("--z-bound", type=_ordinal, default=None)
    s.set_defaults(fn=cmd_minsky_compile)
    s = msub.add_parser("diff", parents=[common, machine])
    s.add_argument("--min-k", type=int, default=0)
    s.add_argument("--max-k", type=int, default=8)
    s.add_argument("--max-counter", type=int, default=3)
    s.add_argument("--max-nodes", type=int, default=2_000_000)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(fn=cmd_minsky_diff)

    s = sub.add_parser("closure", parents=[common], help="closure operator versus search")
    s.add_argument("sequent", nargs="+")
    s.add_argument("--limit", type=int, default=100_000)
    s.set_defaults(fn=cmd_closure)

    dm = sub.add_parser("demo", help="example derivations")
    dsub = dm.add_subparsers(dest="demo", required=True, parser_class=_Parser)
    s = dsub.add_parser("additive-units", parents=[common])
    s.add_argument("--beta", type=_ordinal, default=nat(3))
    s.set_defaults(fn=demo_additive_units)
    s = dsub.add_parser("monotonicity", parents=[common])
    s.add_argument("--from", type=_ordinal, default=nat(1))
    s.add_argument("--to", type=_ordinal, default=nat(2))
    s.add_argument("--body", default="x + 1")
    s.add_argument("--var", default="x")
    s.add_argument("--kind", choices=("mu", "nu"), default="mu")
    s.set_defaults(fn=demo_monotonicity)
    s = dsub.add_parser("eta-functor", parents=[common])
    s.add_argument("--formula", default="mu^2 x. (p * x) + 1")
    s.add_argument("--focus", action="store_true", help="also print the focussed form")
    s.set_defaults(fn=demo_eta)
    s = dsub.add_parser("rho-growth", parents=[common])
    s.add_argument("--max-k", type=int, default=8)
    s.add_argument("--max-gamma", type=int, default=5)
    s.add_argument("--n", type=int, default=4)
    s.set_defaults(fn=demo_rho)
    s = dsub.add_parser("sigma01", parents=[common])
    s.add_argument("machine", nargs="?")
    s.add_argument("--name", default="successor", help="suite machine when no file is given")
    s.add_argument("--input", type=_counts, default=None)
    s.add_argument("--beta", type=int, default=3)
    s.add_argument("--max-nodes", type=int, default=2_000_000)
    s.set_defaults(fn=demo_sigma01)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        out = _Out(getattr(a, "format", "human"))
        if not hasattr(a, "alpha"):
            a.alpha = OMEGA
        return a.fn(a, out)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EX_USAGE
    except (ParseError, OrdinalError, encode.MachineError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (RankMeasureViolation, AssertionError, RecursionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EX_SOFTWARE
    except Exception as e:  # noqa: BLE001
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EX_SOFTWARE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
