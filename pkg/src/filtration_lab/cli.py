"""Config-driven batch runner: `flab run <config.json>`, `flab suites`, `flab describe`.

Runs the configured check suites in declared order and writes a consolidated
JSON report (optionally a flat CSV).  Exit code 0 iff every check passed,
1 when a check failed (report still written), 2 for an invalid config.
Reports are byte-identical across reruns and thread counts for a fixed seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .errors import ConfigInvalid, UnknownSuite
from .fixtures import bundle_by_name
from .serialize import BUNDLE_SCHEMA, CONFIG_SCHEMA, REPORT_SCHEMA, SPACE_SCHEMA, bundle_from_doc
from .suites import (
    McParams,
    REGISTRY,
    SuiteContext,
    Tolerances,
    describe_suite,
    get_suite,
    list_suites,
)

_EXACT_ONLY_KEYS = {"fixture"}
_MC_ONLY_KEYS = {"mc"}


def _normalise_suites(raw) -> list[dict]:
    if not isinstance(raw, list) or not raw:
        raise ConfigInvalid("config needs a non-empty 'suites' list")
    entries = []
    for item in raw:
        if isinstance(item, str):
            entries.append({"name": item, "expected_outcome": "holds"})
        elif isinstance(item, dict) and "name" in item:
            expected = item.get("expected_outcome", "holds")
            if expected not in ("holds", "fails"):
                raise ConfigInvalid(f"expected_outcome must be holds|fails, got {expected!r}")
            entries.append({"name": item["name"], "expected_outcome": expected})
        else:
            raise ConfigInvalid(f"bad suite entry: {item!r}")
    return entries


def validate_config(config: dict, parallel: int = 1) -> list[dict]:
    if not isinstance(config, dict):
        raise ConfigInvalid("config must be a JSON object")
    if "schema" in config and config["schema"] != CONFIG_SCHEMA:
        raise ConfigInvalid(f"unsupported config schema {config['schema']!r}")
    engine = config.get("engine")
    if engine not in ("exact", "mc"):
        raise ConfigInvalid("engine must be 'exact' or 'mc'")
    entries = _normalise_suites(config.get("suites"))
    for entry in entries:
        try:
            spec = get_suite(entry["name"])
        except UnknownSuite as exc:
            raise ConfigInvalid(str(exc)) from exc
        if spec.engine != engine:
            raise ConfigInvalid(
                f"suite {entry['name']!r} belongs to the {spec.engine} engine, config says {engine}"
            )
    if engine == "exact":
        bad = _MC_ONLY_KEYS & set(config)
        if bad:
            raise ConfigInvalid(f"exact-engine config rejects mc-only keys: {sorted(bad)}")
        if parallel > 1:
            raise ConfigInvalid("--parallel applies to mc suites only")
    else:
        bad = _EXACT_ONLY_KEYS & set(config)
        if bad:
            raise ConfigInvalid(f"mc-engine config rejects exact-only keys: {sorted(bad)}")
    seed = config.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigInvalid("seed must be a non-negative integer")
    return entries


def _resolve_bundle(config: dict):
    fixture = config.get("fixture", "space_a")
    if isinstance(fixture, str):
        try:
            return bundle_by_name(fixture)
        except KeyError as exc:
            raise ConfigInvalid(str(exc)) from exc
    if isinstance(fixture, dict):
        schema = fixture.get("schema")
        if schema == BUNDLE_SCHEMA:
            return bundle_from_doc(fixture)
        if schema == SPACE_SCHEMA:
            from .enlargement import build_bundle
            from .serialize import space_from_doc

            space, _, processes = space_from_doc(fixture)
            if "X" not in processes or "H" not in processes:
                raise ConfigInvalid("inline space fixture needs processes X and H")
            return build_bundle(space, processes["X"], processes["H"], name="inline")
        raise ConfigInvalid(f"inline fixture schema must be {BUNDLE_SCHEMA} or {SPACE_SCHEMA}")
    raise ConfigInvalid("fixture must be a name or an inline document")


def _mc_params(config: dict) -> McParams:
    raw = config.get("mc", {})
    known = {"lambda", "mu", "t_real", "n_paths", "z_max", "epsilons"}
    extra = set(raw) - known
    if extra:
        raise ConfigInvalid(f"unknown mc keys: {sorted(extra)}")
    return McParams(
        lam=float(raw.get("lambda", 1.0)),
        mu=float(raw.get("mu", 1.0)),
        t_real=float(raw.get("t_real", 10.0)),
        n_paths=int(raw.get("n_paths", 100000)),
        z_max=float(raw.get("z_max", 4.0)),
        epsilons=tuple(float(e) for e in raw.get("epsilons", (0.1, 0.01))),
    )


def run_config(config: dict, parallel: int = 1, seed_override: int | None = None) -> dict:
    """Execute the configured suites and return the report document."""
    entries = validate_config(config, parallel)
    engine = config["engine"]
    seed = seed_override if seed_override is not None else config.get("seed", 0)

    tol_raw = config.get("tolerances", {})
    tol = Tolerances(
        exact=float(tol_raw.get("exact", 1e-9)),
        atomwise=float(tol_raw.get("atomwise", 1e-12)),
    )
    ctx = SuiteContext(
        seed=int(seed),
        bundle=_resolve_bundle(config) if engine == "exact" else None,
        tol=tol,
        mc=_mc_params(config) if engine == "mc" else None,
        n_threads=max(1, int(parallel)),
    )

    checks = []
    for entry in entries:
        spec = get_suite(entry["name"])
        # polarity-sensitive suites read this and mark their own rows
        ctx.expected_outcome = entry["expected_outcome"]
        for result in spec.fn(ctx):
            checks.append(
                {
                    "suite": spec.name,
                    "name": result.name,
                    "anchor": result.anchor,
                    "outcome": result.outcome,
                    "expected": result.expected,
                    "passed": result.passed,
                    "evidence": result.evidence,
                }
            )

    echo = {k: v for k, v in config.items()}
    echo["seed"] = int(seed)
    passed = sum(1 for c in checks if c["passed"])
    report = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "config": echo,
        "checks": checks,
        "summary": {"checks": len(checks), "passed": passed, "failed": len(checks) - passed},
    }
    return report


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["suite", "check", "anchor", "outcome", "expected", "passed", "evidence"])
    for c in report["checks"]:
        writer.writerow(
            [
                c["suite"],
                c["name"],
                c["anchor"],
                c["outcome"],
                c["expected"],
                "true" if c["passed"] else "false",
                json.dumps(c["evidence"], sort_keys=True),
            ]
        )
    return buf.getvalue()


def _cmd_run(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return 2

    seed_override = args.seed
    if seed_override is None and os.environ.get("FLAB_SEED"):
        try:
            seed_override = int(os.environ["FLAB_SEED"])
        except ValueError:
            print("error: FLAB_SEED must be an integer", file=sys.stderr)
            return 2

    try:
        report = run_config(config, parallel=args.parallel, seed_override=seed_override)
    except ConfigInvalid as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2

    text = report_to_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(report_to_csv(report))

    failed = report["summary"]["failed"]
    for c in report["checks"]:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"[{mark}] {c['suite']}::{c['name']} ({c['anchor']})", file=sys.stderr)
    return 0 if failed == 0 else 1


def _cmd_suites(_args) -> int:
    print(list_suites())
    return 0


def _cmd_describe(args) -> int:
    try:
        print(describe_suite(args.name))
    except UnknownSuite as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the suites of a scenario config")
    p_run.add_argument("config", help="path to a config JSON file")
    p_run.add_argument("--out", help="write the JSON report here instead of stdout")
    p_run.add_argument("--csv", help="also write a flat CSV table")
    p_run.add_argument("--parallel", type=int, default=1, metavar="N", help="mc worker threads")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.set_defaults(fn=_cmd_run)

    p_suites = sub.add_parser("suites", help="list registered check suites")
    p_suites.set_defaults(fn=_cmd_suites)

    p_desc = sub.add_parser("describe", help="describe one suite")
    p_desc.add_argument("name")
    p_desc.set_defaults(fn=_cmd_describe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
