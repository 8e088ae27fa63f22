"""Command-line entry point: ``sftpij <command> ...``.

Exit codes: 0 pass / verified / consistent, 3 fail / excluded / refuted,
2 input error.  ``--json`` switches every command to deterministic JSON
(sorted keys, rationals as "num/den").
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import battery, core, gallery, indconfig, joining, parry
from .errors import SFTError
from .exact import frac_str

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 2, 3


class InputError(Exception):
    pass


def _default(obj):
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(data) -> str:
    return json.dumps(data, default=_default, sort_keys=True, indent=2)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _matrix(path) -> core.AdjacencyMatrix:
    return core.parse_matrix(_read_json(path))


def _measure(args, M=None) -> parry.MarkovMeasure:
    if getattr(args, "measure", None):
        return parry.MarkovMeasure.from_json(_read_json(args.measure))
    if M is None:
        M = _matrix(args.matrix)
    if getattr(args, "uniform", False):
        return parry.uniform_measure(M)
    return parry.parry_measure(M)


def _rule(path, fallback_matrix=None) -> joining.LocalRule:
    data = _read_json(path)
    if "matrix" not in data:
        if fallback_matrix is None:
            raise InputError(f"{path}: rule has no matrix; pass --matrix or --measure")
        data = {**data, "matrix": fallback_matrix.to_json()}
    return joining.LocalRule.from_json(data)


def _emit(args, data, text: str) -> None:
    print(dumps(data) if args.json else text)


# --- commands ------------------------------------------------------------------

def cmd_analyze(args) -> int:
    M = _matrix(args.matrix)
    irreducible = core.is_irreducible(M)
    info = {"matrix": M.to_json(), "irreducible": irreducible,
            "uniform": core.is_uniform(M), "char_poly": str(core.char_poly(M))}
    lines = [f"alphabet: {' '.join(M.alphabet.symbols)}",
             f"irreducible: {irreducible}"]
    if irreducible:
        per = core.period(M)
        mu = parry.parry_measure(M)
        pd = mu.perron
        ent = parry.entropy(mu, range(1, args.entropy_lengths + 1))
        info.update(period=per, perron=pd.to_json(), entropy={
            "log_perron": ent.log_beta,
            "estimates": [{"length": l, "words": c, "estimate": e} for l, c, e in ent.estimates]})
        lines.append(f"period: {per}")
        if pd.exact:
            lines.append(f"perron: {pd.value} (exact)")
        else:
            b = pd.value
            lines.append(f"perron: {b.midpoint!r} (irrational, bracket width {float(b.hi - b.lo):.1e}), "
                         f"root of {b.factor}")
        lines.append(f"entropy: log(perron) = {ent.log_beta:.12g}")
    lines.append(f"char poly: {info['char_poly']}")
    lines.append(f"uniform: {'n=' + str(info['uniform']) if info['uniform'] else 'no'}")
    report = battery.run_battery(M, args.k_max)
    info["report"] = report.to_json()
    lines.append("battery:")
    lines.append(battery.format_report(report))
    _emit(args, info, "\n".join(lines))
    return EXIT_FAIL if report.verdict == battery.EXCLUDED else EXIT_OK


def cmd_measure(args) -> int:
    mu = _measure(args)
    data = mu.to_json()
    text = [f"perron: {data['perron'].get('value', data['perron'].get('approx'))}",
            "stationary: " + " ".join(map(str, data["stationary"])),
            "transition:"] + ["  " + " ".join(map(str, row)) for row in data["transition"]]
    _emit(args, data, "\n".join(text))
    return EXIT_OK


def cmd_verify(args) -> int:
    if not args.measure and not args.matrix:
        rule = _rule(args.rule)
        mu = parry.uniform_measure(rule.matrix) if args.uniform else parry.parry_measure(rule.matrix)
    else:
        mu = _measure(args)
        rule = _rule(args.rule, mu.matrix)
    verdict = joining.verify_pij(mu, rule, args.depth, stop_early=args.stop_early)
    lines = []
    for lv in verdict.levels:
        lines.append(f"  k={lv.k}: marginal {frac_str(lv.marginal_deviation)}, "
                     f"indep x {frac_str(lv.indep_x_deviation)}, "
                     f"indep x' {frac_str(lv.indep_xprime_deviation)}, "
                     f"{'pass' if lv.passed else 'FAIL'}")
    lines.append(f"overall: {verdict.overall}")
    if verdict.witness:
        lines.append(f"witness: {dumps(verdict.witness)}")
    _emit(args, verdict.to_json(), "\n".join(lines))
    return EXIT_OK if verdict.verified else EXIT_FAIL


def cmd_search(args) -> int:
    M = _matrix(args.matrix)
    mu = parry.uniform_measure(M) if args.uniform else None
    rules = joining.search_rules(M, args.p, args.depth, measure=mu, prune=not args.no_prune)
    data = {"p": args.p, "depth": args.depth, "count": len(rules),
            "rules": [r.to_json() for r in rules]}
    lines = [f"{len(rules)} rule(s) verified up to depth {args.depth}"]
    for i, r in enumerate(rules):
        cells = " ".join(f"{e['x']},{e['xp']}->{e['out']}" for e in r.to_json()["table"])
        lines.append(f"  #{i}: {cells}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_pij_star(args) -> int:
    if not args.measure and not args.matrix:
        rule = _rule(args.rule)
        mu = parry.uniform_measure(rule.matrix) if args.uniform else parry.parry_measure(rule.matrix)
    else:
        mu = _measure(args)
        rule = _rule(args.rule, mu.matrix)
    q = joining.check_pij_star(mu, rule, args.q_max)
    text = f"PIJ* width: {q}" if q is not None else f"no PIJ* width up to q={args.q_max}"
    _emit(args, {"q": q, "q_max": args.q_max}, text)
    return EXIT_OK if q is not None else EXIT_FAIL


def _config(args) -> indconfig.IndependenceConfig:
    try:
        return indconfig.IndependenceConfig.from_json(_read_json(args.config))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.config}: malformed configuration ({exc})") from exc


def cmd_ind(args) -> int:
    cfg = _config(args)
    if args.ind_command == "solve":
        sol = indconfig.solve_config(cfg)
        data = {"feasible": sol is not None, "solution": sol}
        text = "infeasible" if sol is None else (
            "m:  " + " ".join(map(frac_str, sol.m)) + "\nm': " + " ".join(map(frac_str, sol.mp))
            + f"\nvalue: {frac_str(sol.value)}")
    elif args.ind_command == "value":
        value = indconfig.config_value(cfg)
        data = {"feasible": value is not None, "value": value}
        text = "infeasible" if value is None else frac_str(value)
    else:
        rep = indconfig.verify_value_uniqueness(cfg, args.trials, args.seed)
        data = rep.to_json()
        text = ("infeasible" if not rep.feasible else
                f"{rep.distinct_solutions} distinct vertex solution(s); values "
                + ("all equal to " + frac_str(rep.value) if rep.all_equal else
                   "DIFFER: " + " ".join(map(frac_str, rep.values))))
        _emit(args, data, text)
        return EXIT_OK if rep.feasible and rep.all_equal else EXIT_FAIL
    _emit(args, data, text)
    return EXIT_OK if data["feasible"] else EXIT_FAIL


def cmd_gallery(args) -> int:
    if args.all == bool(args.name):
        raise InputError("give exactly one of NAME or --all")
    if args.all:
        results = gallery.run_all()
    else:
        extra = _matrix(args.matrix) if args.matrix else None
        try:
            results = [gallery.run_entry(args.name, extra)]
        except KeyError as exc:
            raise InputError(exc.args[0]) from exc
    lines = []
    for r in results:
        lines.append(f"{r.name}: {r.status}" + (f" ({r.reason})" if r.reason else ""))
        for check, exp, obs in r.comparisons:
            lines.append(f"    {check}: expected {exp}, observed {obs}")
    _emit(args, {"results": [r.to_json() for r in results]}, "\n".join(lines))
    return EXIT_FAIL if any(r.status == gallery.MISMATCH for r in results) else EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--budget", type=int, help=f"enumeration cap (overrides {core.BUDGET_ENV})")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")

    parser = argparse.ArgumentParser(prog="sftpij", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="structure, Perron data and battery")
    p.add_argument("matrix")
    p.add_argument("--k-max", type=int, help="largest power tried for constant M^k")
    p.add_argument("--entropy-lengths", type=int, default=8)
    p.set_defaults(func=cmd_analyze)

    def measure_args(p, required_rule=True):
        p.add_argument("--measure", help="measure JSON (exported by 'measure')")
        p.add_argument("--matrix", help="matrix JSON; the Parry measure is used")
        p.add_argument("--uniform", action="store_true",
                       help="use the uniform measure (constant-degree, possibly reducible matrices)")
        if required_rule:
            p.add_argument("--rule", required=True)

    p = sub.add_parser("measure", parents=[common], help="export a measure as JSON")
    measure_args(p, required_rule=False)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", parents=[common], help="exact pairwise-independence check")
    measure_args(p)
    p.add_argument("--depth", type=int, default=joining.DEFAULT_DEPTH)
    p.add_argument("--stop-early", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="enumerate joining rules")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--uniform", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("pij-star", parents=[common], help="smallest symmetric width q")
    measure_args(p)
    p.add_argument("--q-max", type=int, default=2)
    p.set_defaults(func=cmd_pij_star)

    p = sub.add_parser("ind", help="finite independence configurations")
    isub = p.add_subparsers(dest="ind_command", required=True)
    for name in ("solve", "value", "check-lemma"):
        q = isub.add_parser(name, parents=[common])
        q.add_argument("--config", required=True)
        if name == "check-lemma":
            q.add_argument("--trials", type=int, default=10)
        q.set_defaults(func=cmd_ind)

    p = sub.add_parser("gallery", parents=[common], help="run bundled examples")
    p.add_argument("name", nargs="?")
    p.add_argument("--all", action="store_true")
    p.add_argument("--matrix", help="matrix for an entry whose matrix is not bundled")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    saved = os.environ.get(core.BUDGET_ENV)
    if args.budget is not None:
        os.environ[core.BUDGET_ENV] = str(args.budget)
    random.seed(args.seed)
    try:
        return args.func(args)
    except (InputError, SFTError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if saved is None:
            os.environ.pop(core.BUDGET_ENV, None)
        else:
            os.environ[core.BUDGET_ENV] = saved


if __name__ == "__main__":
    sys.exit(main())
