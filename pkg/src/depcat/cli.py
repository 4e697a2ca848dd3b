"""Command-line surface: validate, graph, covariance, sample, verify.

Configuration comes from an optional JSON file plus flag overrides (flags
win).  All outputs are deterministic functions of the configuration and
seed; JSON floats use shortest round-trip formatting and human-readable
tables use 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    AxiomViolationError,
    DepcatError,
    DomainError,
    EnumerationTooLargeError,
)
from .exact import (
    BASIS_TREE_CONJECTURE,
    DEFAULT_ENUMERATION_CAP,
    TREE_CONJECTURE_NOTE,
    cross_covariance_closed_form,
    cross_covariance_enumerated,
    exponent_basis_for,
    verification_suite,
)
from .generators import GeneratorSpec, validate
from .graph import build_tree, export_dot
from .kernel import DependencyCoefficient, Marginal
from .sampler import sample_batch

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_VERIFICATION = 4
EXIT_CAP = 5


class UsageError(DepcatError):
    """Malformed configuration or missing required settings."""


@dataclass
class RunConfig:
    """Resolved run settings shared by every subcommand."""

    spec: GeneratorSpec
    length: int
    marginal: Marginal | None = None
    delta: float | None = None
    seed: int | None = None
    count: int | None = None
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def require_marginal(self) -> Marginal:
        if self.marginal is None:
            raise UsageError("this command needs a marginal: set \"p\" or --p")
        return self.marginal

    def require_delta(self) -> float:
        if self.delta is None:
            raise UsageError("this command needs a coefficient: set \"delta\" or --delta")
        return self.delta


def _parse_generator(value) -> GeneratorSpec:
    if isinstance(value, dict):
        return GeneratorSpec.from_dict(value)
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("{"):
            return GeneratorSpec.from_json(text)
        return GeneratorSpec.builtin(text)
    raise UsageError(f"cannot interpret generator setting {value!r}")


def _parse_probs(value) -> list[float]:
    if isinstance(value, str):
        parts = [part for part in value.split(",") if part.strip()]
        return [float(part) for part in parts]
    return [float(v) for v in value]


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the JSON config file (if any) with flag overrides."""
    data: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")

    def pick(flag_value, key):
        return flag_value if flag_value is not None else data.get(key)

    raw_generator = pick(args.generator, "generator")
    raw_length = pick(args.n, "N")
    raw_k = pick(args.k, "K")
    raw_probs = pick(args.p, "p")
    raw_delta = pick(args.delta, "delta")
    raw_seed = pick(args.seed, "seed")
    raw_count = pick(args.count, "count")
    raw_cap = pick(args.cap, "enumeration_cap")

    if raw_generator is None:
        raise UsageError("a generator is required: set \"generator\" or --generator")
    if raw_length is None:
        raise UsageError("a sequence length is required: set \"N\" or --n")

    try:
        spec = _parse_generator(raw_generator)
        length = int(raw_length)
        if length < 1:
            raise UsageError(f"N must be >= 1, got {length}")
        marginal = None
        if raw_probs is not None:
            marginal = Marginal(np.asarray(_parse_probs(raw_probs)))
            if raw_k is not None and int(raw_k) != marginal.num_categories:
                raise UsageError(
                    f"K={int(raw_k)} conflicts with a {marginal.num_categories}-entry p"
                )
        elif raw_k is not None:
            raise UsageError("K was given without p; set the marginal explicitly")
        delta = None if raw_delta is None else DependencyCoefficient(float(raw_delta)).value
        seed = None if raw_seed is None else int(raw_seed)
        count = None if raw_count is None else int(raw_count)
        cap = DEFAULT_ENUMERATION_CAP if raw_cap is None else int(raw_cap)
        if cap < 1:
            raise UsageError(f"enumeration cap must be >= 1, got {cap}")
    except (DomainError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc

    return RunConfig(spec, length, marginal, delta, seed, count, cap)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def cmd_validate(config: RunConfig, args: argparse.Namespace) -> int:
    if config.length < 2:
        _emit("generator domain is empty below n = 2; nothing to check\n", args.out)
        return EXIT_OK
    report = validate(config.spec, config.length)
    if report.ok:
        _emit(
            f"generator {config.spec.kind!r} valid for n in 2..{report.max_index}\n",
            args.out,
        )
        return EXIT_OK
    lines = [violation.reason for violation in report.violations]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_VALIDATION


def cmd_graph(config: RunConfig, args: argparse.Namespace) -> int:
    tree = build_tree(config.spec, config.length)
    if args.format == "dot":
        _emit(export_dot(tree), args.out)
    else:
        _emit(tree.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_covariance(config: RunConfig, args: argparse.Namespace) -> int:
    marginal = config.require_marginal()
    delta = config.require_delta()
    m, n = args.m, args.n_pos
    if not 1 <= m < n:
        raise UsageError(f"positions must satisfy 1 <= m < n, got m={m}, n={n}")
    if n > config.length:
        raise UsageError(f"position n={n} exceeds configured N={config.length}")

    if args.method == "both":
        if args.format == "csv":
            raise UsageError("method 'both' reports two matrices; use --format json")
        enumerated = cross_covariance_enumerated(
            marginal, delta, config.spec, m, n, config.enumeration_cap
        )
        closed = cross_covariance_closed_form(marginal, delta, config.spec, m, n)
        discrepancy = float(np.max(np.abs(enumerated.matrix - closed.matrix)))
        payload = {
            "m": m,
            "n": n,
            "exponent_basis": exponent_basis_for(config.spec),
            "method": "both",
            "enumerated": [[float(v) for v in row] for row in enumerated.matrix],
            "closed_form": [[float(v) for v in row] for row in closed.matrix],
            "max_abs_discrepancy": discrepancy,
        }
        if payload["exponent_basis"] == BASIS_TREE_CONJECTURE:
            payload["note"] = TREE_CONJECTURE_NOTE
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return EXIT_OK

    if args.method == "enumerate":
        cov = cross_covariance_enumerated(
            marginal, delta, config.spec, m, n, config.enumeration_cap
        )
    else:
        cov = cross_covariance_closed_form(marginal, delta, config.spec, m, n)
    if args.format == "csv":
        _emit(cov.to_csv(), args.out)
    else:
        _emit(json.dumps(cov.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sample(config: RunConfig, args: argparse.Namespace) -> int:
    marginal = config.require_marginal()
    delta = config.require_delta()
    if config.seed is None:
        raise UsageError("sampling needs a seed: set \"seed\" or --seed")
    if config.count is None:
        raise UsageError("sampling needs a count: set \"count\" or --count")
    batch = sample_batch(
        marginal,
        delta,
        config.spec,
        config.length,
        config.count,
        config.seed,
        workers=args.workers,
    )
    suffix = "csv" if args.format == "csv" else "jsonl"
    data_path = f"{args.out_prefix}.{suffix}"
    meta_path = f"{args.out_prefix}.meta.json"
    payload = batch.to_csv() if args.format == "csv" else batch.to_jsonl()
    with open(data_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(payload)
    with open(meta_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(batch.metadata_json())
    sys.stdout.write(f"wrote {data_path}\nwrote {meta_path}\n")
    return EXIT_OK


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    marginal = config.require_marginal()
    delta = config.require_delta()
    if config.length < 2:
        raise UsageError("verification needs N >= 2")
    checks = verification_suite(
        marginal, delta, config.spec, config.length, config.enumeration_cap
    )
    lines = []
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(
            f"{check.name}: max error {check.max_error:.12g} "
            f"(tolerance {check.tolerance:.12g}) {status}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(check.passed for check in checks) else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags override its fields")
    shared.add_argument("--generator", help="builtin kind or generator JSON object")
    shared.add_argument("--n", type=int, help="sequence length N")
    shared.add_argument("--k", type=int, help="category count K (must match p)")
    shared.add_argument("--p", help="comma-separated marginal probabilities")
    shared.add_argument("--delta", type=float, help="dependency coefficient in [0,1]")
    shared.add_argument("--seed", type=int, help="64-bit sampling seed")
    shared.add_argument("--count", type=int, help="number of sequences to sample")
    shared.add_argument("--cap", type=int, help="enumeration cap on K**N")
    shared.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="depcat",
        description="Dependent categorical sequences: validation, exact analysis, sampling.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(
        "validate", parents=[shared], help="check the generator axioms up to N"
    )

    graph = commands.add_parser(
        "graph", parents=[shared], help="emit the dependency tree"
    )
    graph.add_argument("--format", choices=("dot", "json"), default="dot")

    covariance = commands.add_parser(
        "covariance", parents=[shared], help="cross-covariance matrix of two positions"
    )
    covariance.add_argument("m", type=int, help="earlier position")
    covariance.add_argument(
        "n_pos", metavar="n", type=int, help="later position (m < n <= N)"
    )
    covariance.add_argument(
        "--method", choices=("enumerate", "closed", "both"), default="both"
    )
    covariance.add_argument("--format", choices=("json", "csv"), default="json")

    sample = commands.add_parser(
        "sample", parents=[shared], help="draw a seeded batch and write it to files"
    )
    sample.add_argument(
        "--out-prefix", required=True, help="output path prefix for batch + sidecar"
    )
    sample.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sample.add_argument("--workers", type=int, default=1)

    commands.add_parser(
        "verify", parents=[shared], help="run the exact-route agreement checks"
    )

    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "graph": cmd_graph,
    "covariance": cmd_covariance,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
        return _COMMANDS[args.command](config, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationTooLargeError as exc:
        print(f"error: {exc}; reduce N or raise the cap", file=sys.stderr)
        return EXIT_CAP
    except AxiomViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DepcatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
