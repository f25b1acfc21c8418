import os
import sys
import argparse
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from bounds import (
    UNSUPPORTED_FOLD_MESSAGE,
    VARIANT_DISCREPANCY_NOTE,
    BoundResult,
    EquationVariant,
    Setting,
    bounds_table,
    constant_for,
    equation_variant_applies,
    sign_change_sequence,
    first_nonpositive_index,
    stripe_volume,
    sweep_optimal_a,
    upper_bound_available,
)
from constructions import StripeSpec, best_stripe, stripe_count
from errors import InvalidParameterError, SumfreeError
from exact_search import SearchInstance, max_sumfree_exact
from reporting import build_report, format_decimal, render_report
from settings import (
    DEFAULT_CONFIG_FILE,
    DEFAULT_DECIMALS,
    DEFAULT_NODE_BUDGET,
    OutputFormat,
    SolverConfig,
    load_solver_config,
)

# -------------------------------------------------
# REFERENCE VALUES (checked by `verify`)
# -------------------------------------------------
REFERENCE_TABLES = {
    "discrete_l2": {
        "setting": Setting.DISCRETE,
        "l": 2,
        "lower": ["0.555556", "0.666667", "0.740741", "0.796639", "0.838889"],
        "upper": ["0.913875", "0.942361", "0.961192", "0.973763", "0.982208"],
    },
    "continuous_l2": {
        "setting": Setting.CONTINUOUS,
        "l": 2,
        "lower": ["0.555556", "0.666667", "0.740741", "0.796639", "0.838889"],
        "upper": ["0.727309", "0.840690", "0.899940", "0.935089", "0.957139"],
    },
    "continuous_l3": {
        "setting": Setting.CONTINUOUS,
        "l": 3,
        "lower": ["0.750000", "0.859375", "0.916667", "0.949219", "0.968620"],
        "upper": ["0.828427", "0.913360", "0.956464", "0.978167", "0.989061"],
    },
}
REFERENCE_K_RANGE = (2, 6)
REFERENCE_DECIMALS = 6
SEQUENCE_SIGN_CHANGE_INDEX = 7

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2


class Console:
    """Status lines go to stderr so stdout carries only the rendered report."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def status(self, message: str) -> None:
        if not self.quiet:
            print(message, file=sys.stderr)

    def warning(self, message: str) -> None:
        if not self.quiet:
            print(f"⚠️ Warning: {message}", file=sys.stderr)

    def error(self, message: str) -> None:
        print(f"❌ Error: {message}", file=sys.stderr)


def _bound_value(b: Optional[BoundResult]):
    if b is None:
        return None
    return b.exact_value if b.exact_value is not None else b.value


def _format_point(p: Tuple[int, ...]) -> str:
    return "(" + ",".join(str(c) for c in p) + ")"


# -------------------------------------------------
# PART 1: COMMANDS
# -------------------------------------------------
def cmd_bounds_table(args, cfg: SolverConfig, console: Console) -> Tuple[List[Dict[str, Any]], Dict[str, Any], int]:
    setting = Setting(args.setting)
    variant = EquationVariant(args.equation_variant)
    console.status(f"🚀 Bounds for k={args.k_min}..{args.k_max} (l={args.l}, {setting.value})")
    if not upper_bound_available(args.l):
        console.warning(f"{UNSUPPORTED_FOLD_MESSAGE} (got l={args.l})")
    variant_applies = equation_variant_applies(args.l, setting)
    if not variant_applies and variant != EquationVariant.STATED_FORM:
        console.warning(
            f"--equation-variant {variant.value} only applies to the discrete l=2 upper bound; ignored"
        )

    rows = bounds_table(args.k_min, args.k_max, args.l, setting, variant, cfg, progress=not console.quiet)
    records = [
        {
            "k": row.k,
            "lower": _bound_value(row.lower),
            "upper": _bound_value(row.upper),
            "upper_method": row.upper.method.value if row.upper else None,
        }
        for row in rows
    ]

    constant = constant_for(setting, args.l).value
    notes: List[str] = []
    extra: Dict[str, Any] = {
        "setting": setting.value,
        "lower_constant": constant,
        "upper_constant": constant if upper_bound_available(args.l) else None,
        "equation_variant": variant.value if variant_applies else None,
    }
    if variant_applies:
        extra["variant_discrepancy"] = VARIANT_DISCREPANCY_NOTE
        notes.append(f"equation variant: {variant.value}; {VARIANT_DISCREPANCY_NOTE}")
    if not upper_bound_available(args.l):
        extra["upper_bound"] = UNSUPPORTED_FOLD_MESSAGE
        notes.append(UNSUPPORTED_FOLD_MESSAGE)
    extra["notes"] = notes
    return records, extra, EXIT_OK


def cmd_sweep(args, cfg: SolverConfig, console: Console) -> Tuple[List[Dict[str, Any]], Dict[str, Any], int]:
    k_max = args.k_max if args.k_max is not None else args.k
    if k_max < args.k:
        raise InvalidParameterError(f"--k-max ({k_max}) must be >= --k ({args.k})")
    console.status(f"🚀 Sweeping the stripe offset for k={args.k}..{k_max} (l={args.l})")
    records = []
    for k in range(args.k, k_max + 1):
        result = sweep_optimal_a(k, args.l, cfg, progress=not console.quiet)
        records.append(
            {
                "k": k,
                "l": args.l,
                "a_opt": result.a_opt,
                "volume": result.volume,
                "reference_a": result.reference_a,
                "reference_volume": result.reference_volume,
                "offset": result.offset,
            }
        )
    return records, {"notes": []}, EXIT_OK


def cmd_sequence(args, cfg: SolverConfig, console: Console) -> Tuple[List[Dict[str, Any]], Dict[str, Any], int]:
    console.status(f"🚀 Sequence a_0..a_{args.terms - 1}")
    seq = sign_change_sequence(args.terms)
    flag = first_nonpositive_index(seq)
    records = [{"i": i, "a_i": value, "nonpositive": value <= 0} for i, value in enumerate(seq)]
    notes = [] if flag is None else [f"first nonpositive term at index {flag}"]
    return records, {"first_nonpositive_index": flag, "notes": notes}, EXIT_OK


def cmd_exact(args, cfg: SolverConfig, console: Console) -> Tuple[List[Dict[str, Any]], Dict[str, Any], int]:
    inst = SearchInstance(n=args.n, k=args.k, l=args.l, node_budget=args.node_budget)
    inst.check_caps()
    console.status(f"🚀 Exact search on {{1..{args.n}}}^{args.k} (l={args.l}, workers={cfg.workers})")
    result = max_sumfree_exact(inst, workers=cfg.workers)
    stripe_a, stripe_size = best_stripe(args.n, args.k, args.l)
    if not result.exhaustive:
        console.warning(f"node budget {args.node_budget} exhausted; max_size is a lower bound")
    records = [
        {
            "n": args.n,
            "k": args.k,
            "l": args.l,
            "max_size": result.max_size,
            "density": Fraction(result.max_size, args.n**args.k),
            "witness": " ".join(_format_point(p) for p in result.witness.sorted_points()),
            "nodes_explored": result.nodes_explored,
            "exhaustive": result.exhaustive,
            "best_stripe_a": stripe_a,
            "best_stripe_count": stripe_size,
        }
    ]
    return records, {"notes": []}, EXIT_OK


def cmd_stripe_count(args, cfg: SolverConfig, console: Console) -> Tuple[List[Dict[str, Any]], Dict[str, Any], int]:
    if args.a_denom <= 0:
        raise InvalidParameterError(f"--a-denom must be positive, got {args.a_denom}")
    a = Fraction(args.a_numer, args.a_denom)
    spec = StripeSpec(n=args.n, k=args.k, a=a, l=args.l)
    console.status(f"🚀 Counting the stripe {a} <= sum < {spec.upper} in {{1..{args.n}}}^{args.k}")
    count = stripe_count(spec)
    cells = args.n**args.k
    volume = stripe_volume(args.k, min(a / args.n, Fraction(args.k)), args.l)
    density = Fraction(count, cells)
    records = [
        {
            "n": args.n,
            "k": args.k,
            "a": str(a),
            "l": args.l,
            "count": count,
            "density": density,
            "volume": volume,
            "scaled_volume": volume * cells,
            "normalized_error": args.n * abs(density - volume),
        }
    ]
    return records, {"notes": []}, EXIT_OK


def cmd_verify(args, cfg: SolverConfig, console: Console) -> Tuple[List[Dict[str, Any]], Dict[str, Any], int]:
    k_min, k_max = REFERENCE_K_RANGE
    records = []
    for name, table in REFERENCE_TABLES.items():
        console.status(f"🔍 Checking {name}")
        rows = bounds_table(k_min, k_max, table["l"], table["setting"], cfg=cfg, progress=not console.quiet)
        for row in rows:
            for side, bound in (("lower", row.lower), ("upper", row.upper)):
                expected = table[side][row.k - k_min]
                computed = format_decimal(_bound_value(bound), REFERENCE_DECIMALS)
                records.append(
                    {
                        "check": name,
                        "k": row.k,
                        "side": side,
                        "expected": expected,
                        "computed": computed,
                        "status": "PASS" if computed == expected else "FAIL",
                    }
                )

    seq = sign_change_sequence(SEQUENCE_SIGN_CHANGE_INDEX + 1)
    sign_ok = (
        len(seq) == SEQUENCE_SIGN_CHANGE_INDEX + 1
        and all(value > 0 for value in seq[1:SEQUENCE_SIGN_CHANGE_INDEX])
        and seq[SEQUENCE_SIGN_CHANGE_INDEX] < 0
    )
    records.append(
        {
            "check": "sequence_sign",
            "k": None,
            "side": None,
            "expected": f"first nonpositive index {SEQUENCE_SIGN_CHANGE_INDEX}",
            "computed": f"first nonpositive index {first_nonpositive_index(seq)}",
            "status": "PASS" if sign_ok else "FAIL",
        }
    )

    failures = sum(1 for rec in records if rec["status"] == "FAIL")
    if failures:
        console.status(f"❌ {failures} of {len(records)} checks failed")
    else:
        console.status(f"✅ All {len(records)} checks passed")
    return records, {"failures": failures, "notes": []}, EXIT_MISMATCH if failures else EXIT_OK


COMMANDS = {
    "bounds": cmd_bounds_table,
    "sweep": cmd_sweep,
    "sequence": cmd_sequence,
    "exact": cmd_exact,
    "stripe-count": cmd_stripe_count,
    "verify": cmd_verify,
}


# -------------------------------------------------
# PART 2: ARGUMENT PARSING
# -------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv", "json"], default="text", help="Output format")
    common.add_argument("--decimals", type=int, default=DEFAULT_DECIMALS, help="Digits after the decimal point")
    common.add_argument("--tolerance", type=float, default=None, help="Bisection tolerance (default 1e-12)")
    common.add_argument("--config", type=str, default=None, help="SolverConfig JSON file")
    common.add_argument("--workers", type=int, default=None, help="Worker threads")
    common.add_argument("--quiet", action="store_true", help="Silence status lines and progress bars")

    parser = argparse.ArgumentParser(
        description="Density bounds for sumfree and l-fold-sumfree subsets of hypercubes"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="Lower/upper bound table")
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--setting", choices=[s.value for s in Setting], default=Setting.DISCRETE.value)
    p.add_argument(
        "--equation-variant",
        choices=[v.value for v in EquationVariant],
        default=EquationVariant.STATED_FORM.value,
    )

    p = sub.add_parser("sweep", parents=[common], help="Optimal stripe offset")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--k-max", type=int, default=None, help="Tabulate k..k-max")
    p.add_argument("--l", type=int, default=2)

    p = sub.add_parser("sequence", parents=[common], help="The a_i sequence and its sign change")
    p.add_argument("--terms", type=int, required=True)

    p = sub.add_parser("exact", parents=[common], help="Exact maximum on a tiny box")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)

    p = sub.add_parser("stripe-count", parents=[common], help="Exact stripe cardinality vs. volume")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a-numer", type=int, required=True)
    p.add_argument("--a-denom", type=int, default=1)
    p.add_argument("--l", type=int, default=2)

    sub.add_parser("verify", parents=[common], help="Recompute the reference tables")
    return parser


def _command_params(args) -> Dict[str, Any]:
    skip = {"command", "format", "decimals", "tolerance", "config", "workers", "quiet"}
    return {key: value for key, value in vars(args).items() if key not in skip}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    console = Console(quiet=args.quiet)
    try:
        fmt = OutputFormat(kind=args.format, decimals=args.decimals)
        config_path = args.config
        if config_path is None and os.path.exists(DEFAULT_CONFIG_FILE):
            config_path = DEFAULT_CONFIG_FILE
        cfg = load_solver_config(config_path, bisection_tolerance=args.tolerance, workers=args.workers)
        if args.config:
            console.status(f"⚙️ Config: {args.config}")

        records, extra, code = COMMANDS[args.command](args, cfg, console)
        report = build_report(args.command, _command_params(args), records, cfg, fmt, extra)
        output = render_report(report, fmt)
    except (SumfreeError, ValueError) as e:
        console.error(str(e))
        return EXIT_ERROR

    sys.stdout.write(output)
    return code


if __name__ == "__main__":
    sys.exit(main())
