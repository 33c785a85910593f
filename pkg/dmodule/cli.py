import argparse
import json
import logging
from pathlib import Path
import sys
from typing import Any, Callable, Dict, Optional

if __package__ is None or __package__ == "":
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from pydantic import ValidationError

from dmodule import commands, config
from dmodule.command_catalog import command_summary
from dmodule.opdsl import parse_bindings
from dmodule.tools.common.results import USAGE_CODES, AlgebraError, from_exception

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _operator_text(value: str) -> str:
    """Operator given inline or as @path to a UTF-8 DSL file."""
    if value.startswith("@"):
        path = Path(value[1:])
        try:
            return path.read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise AlgebraError("invalid_input", f"cannot read operator file {path}: {exc}") from exc
    return value


def _params(text: Optional[str]) -> Dict[str, str]:
    return {name: str(value) for name, value in parse_bindings(text).items()}


def _add_operator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--operator", required=True, help="operator text, or @file")
    parser.add_argument("--params", help="bindings such as a=1/2,b=-3")


def _add_heun_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variant", choices=["heun", "heun-hat", "confluent"], default="heun")
    parser.add_argument("--a", default="0", help="fourth singular point (heun variants)")
    parser.add_argument("--alpha", required=True)
    parser.add_argument("--beta", default="0")
    parser.add_argument("--gamma", required=True)
    parser.add_argument("--delta", help="derived from the exponent constraint when omitted (heun variants)")
    parser.add_argument("--epsilon", help="derived from the exponent constraint when omitted (heun variants)")
    parser.add_argument("--n", type=int, help="subspace degree; defaults to -epsilon (or -delta for confluent)")
    parser.add_argument("--basis", choices=["A", "X"], default="A")
    parser.add_argument("--digits", type=int, default=config.DEFAULT_DIGITS)


def _heun_fields(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "variant": args.variant,
        "a": args.a,
        "alpha": args.alpha,
        "beta": args.beta,
        "gamma": args.gamma,
        "delta": args.delta,
        "epsilon": args.epsilon,
        "n": args.n,
        "basis": args.basis,
        "digits": args.digits,
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmodule", description="Series solutions of linear differential operators by Newton iteration on remainder maps")
    parser.add_argument("--json", action="store_true", help="print the JSON envelope")
    parser.add_argument("--verbose", action="store_true", help="log iteration progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help=command_summary("solve"))
    _add_operator_flags(p)
    p.add_argument("--divisor", default="d", help="d | x | xd:LAMBDA | special-dc | special-bc")
    p.add_argument("--order", choices=["standard", "dual", "graded"])
    p.add_argument("--seed", default="1")
    p.add_argument("--precision", type=int, default=config.DEFAULT_PRECISION)

    p = sub.add_parser("indicial", help=command_summary("indicial"))
    _add_operator_flags(p)
    p.add_argument("--order", choices=["standard", "dual"], default="standard")
    p.add_argument("--digits", type=int, default=config.DEFAULT_DIGITS)

    p = sub.add_parser("divide", help=command_summary("divide"))
    _add_operator_flags(p)
    p.add_argument("--by", required=True, help="divisor text, or @file")
    p.add_argument("--order", choices=["standard", "dual", "graded"], default="standard")
    p.add_argument("--ore", action="store_true", help="divide in the rational-coefficient Ore ring")
    p.add_argument("--nonmonic", action="store_true")

    p = sub.add_parser("heun-eigen", help=command_summary("heun-eigen"))
    _add_heun_flags(p)

    p = sub.add_parser("factor-check", help=command_summary("factor-check"))
    _add_heun_flags(p)
    p.add_argument("--qstar")

    p = sub.add_parser("identity-check", help=command_summary("identity-check"))
    _add_heun_flags(p)
    p.add_argument("--qstar")
    p.add_argument("--terms", type=int, default=30)
    p.add_argument("--local", action="store_true", help="also compare the Newton-solved local series")

    p = sub.add_parser("difference", help=command_summary("difference"))
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--bessel", type=int, help="integer order of the difference Bessel function")
    p.add_argument("--check", action="store_true", help="apply the difference Bessel operator on 0..x")
    p.add_argument("--operator", help="operator text, or @file, solved with divisor d")
    p.add_argument("--params")
    p.add_argument("--seed", default="1")
    p.add_argument("--precision", type=int)

    p = sub.add_parser("fixtures", help=command_summary("fixtures"))
    p.add_argument("--name")
    p.add_argument("--directory")

    sub.add_parser("commands", help=command_summary("commands"))
    return parser


def _dispatch(args: argparse.Namespace) -> Dict[str, Any]:
    name = args.command
    if name == "solve":
        return commands.solve(
            commands.SolveRequest(
                operator=_operator_text(args.operator),
                divisor=args.divisor,
                order=args.order,
                seed=args.seed,
                precision=args.precision,
                params=_params(args.params),
            )
        )
    if name == "indicial":
        return commands.indicial(
            commands.IndicialRequest(
                operator=_operator_text(args.operator),
                params=_params(args.params),
                order=args.order,
                digits=args.digits,
            )
        )
    if name == "divide":
        return commands.divide(
            commands.DivideRequest(
                operator=_operator_text(args.operator),
                by=_operator_text(args.by),
                order=args.order,
                params=_params(args.params),
                ore=args.ore,
                nonmonic=args.nonmonic,
            )
        )
    if name == "heun-eigen":
        return commands.heun_eigen_command(commands.HeunRequest(**_heun_fields(args)))
    if name == "factor-check":
        return commands.factor_check(commands.FactorCheckRequest(qstar=args.qstar, **_heun_fields(args)))
    if name == "identity-check":
        return commands.identity_check(
            commands.IdentityCheckRequest(qstar=args.qstar, terms=args.terms, local=args.local, **_heun_fields(args))
        )
    if name == "difference":
        return commands.difference(
            commands.DifferenceRequest(
                x=args.x,
                bessel=args.bessel,
                check=args.check,
                operator=_operator_text(args.operator) if args.operator else None,
                seed=args.seed,
                precision=args.precision,
                params=_params(args.params),
            )
        )
    if name == "fixtures":
        return commands.fixtures(commands.FixturesRequest(name=args.name, directory=args.directory))
    return commands.commands()


def exit_code(result: Dict[str, Any]) -> int:
    if not result.get("ok", False):
        code = (result.get("error") or {}).get("code")
        return EXIT_USAGE if code in USAGE_CODES else EXIT_FAILED
    return EXIT_OK if result.get("verified", True) else EXIT_FAILED


def _scalar_text(payload: Any) -> str:
    if isinstance(payload, dict) and "num" in payload:
        return payload["num"] if payload["den"] == "1" else f"{payload['num']}/{payload['den']}"
    if isinstance(payload, dict) and "re" in payload:
        return payload["re"] if payload.get("im", "0") in ("0", "0.0") else f"{payload['re']} + {payload['im']}*i"
    return str(payload)


def _render(result: Dict[str, Any], write: Callable[[str], None]) -> None:
    if not result.get("ok", False):
        error = result.get("error") or {}
        write(f"error [{error.get('code')}]: {error.get('message')}")
        return
    series = result.get("series")
    if series:
        prefactor = f"{series['prefactor']} * " if series.get("prefactor") else ""
        write(f"series {prefactor}sum c_k {series['generator']}^k, known below {series['precision']}")
        for item in series["coefficients"]:
            write(f"  {item['power']:>4}  {_scalar_text(item)}")
    for key in ("operator", "point", "indicial_polynomial", "radius_bound", "quotient", "remainder", "charpoly", "dimension"):
        if key in result and result[key] is not None:
            write(f"{key}: {result[key]}")
    if "residual_valuations" in result:
        write("residual valuations: " + " ".join(str(v) for v in result["residual_valuations"]))
    for root in result.get("roots", []):
        write(f"root {_scalar_text(root['root'])}  resonances {root['resonances'] or '-'}")
    if "matrix" in result:
        for row in result["matrix"]:
            write("  [" + ", ".join(_scalar_text(v) for v in row) + "]")
    for item in result.get("eigen", []):
        e_list = ", ".join(_scalar_text(e) for e in item["e_list"])
        write(f"q* = {_scalar_text(item['qstar'])}  e = [{e_list}]  residual {item['residual']}")
    for item in result.get("check", []):
        write(f"  x = {item['x']:>3}  {_scalar_text(item)}")
    for item in result.get("checks", []):
        label = item.get("kind", "factorization")
        write(f"{label} at q* = {_scalar_text(item['qstar'])}: {'ok' if item['verified'] else 'FAILED'}")
    if "value" in result:
        write(f"value: {_scalar_text(result['value'])}")
    for report in result.get("reports", []):
        status = "ok" if report["passed"] else "FAILED"
        write(f"{report['name']:<20} {status}  checked {report['checked']}")
        for mismatch in report["mismatches"][:5]:
            write(f"    {mismatch}")
        if report.get("error"):
            write(f"    error [{report['error']['code']}]: {report['error']['message']}")
    for item in result.get("commands", []):
        write(f"{item['name']:<16} {item['summary']}")
    if "verified" in result and result.get("command") != "commands":
        write(f"verified: {str(result['verified']).lower()}")


def run(argv: Optional[list[str]] = None, out: Callable[[str], None] = print) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        result = _dispatch(args)
    except (AlgebraError, ValidationError) as exc:
        result = from_exception(exc, command=args.command)

    if args.json:
        out(json.dumps(result, indent=2))
    else:
        _render(result, out)
    return exit_code(result)


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
