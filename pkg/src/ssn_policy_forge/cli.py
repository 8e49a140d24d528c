"""Command line entry points: an HTTP service and a headless scenario runner."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ssn-policy-forge",
        description="Sensor-network policy engine with a simulated mine to test policies against.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="run the HTTP service (editor backend + simulator)")
    serve_p.add_argument("--config", help="service config file (JSON); defaults to the packaged one")
    serve_p.add_argument("--port", type=int, help="override the configured port")
    serve_p.add_argument("--seed", type=int, help="override the configured seed")
    serve_p.add_argument("--schema", help="declared schema file overriding extraction")

    run_p = sub.add_parser("run", help="run a scenario headless and print the trigger log")
    run_p.add_argument("--scenario", help="scenario file (JSON); defaults to the packaged gas-leak demo")
    run_p.add_argument("--ticks", type=int, help="number of ticks (default from the scenario)")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.add_argument("--schema", help="declared schema file overriding extraction")

    args = parser.parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    return _run(args)


def _serve(args: argparse.Namespace) -> int:
    from .api import load_config, serve

    config = load_config(args.config)
    if args.port is not None:
        config = replace(config, port=args.port)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.schema is not None:
        config = replace(config, schema=args.schema)
    serve(config)
    return 0


def _run(args: argparse.Namespace) -> int:
    import tempfile
    from pathlib import Path

    from .monitor import packaged_text, run_scenario

    if args.scenario is None:
        # Materialize the packaged demo so relative references resolve.
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "scenario.json"
            path.write_text(packaged_text("scenario_gasleak.json"), encoding="utf-8")
            _, lines = run_scenario(path, args.ticks, args.seed, args.schema)
    else:
        _, lines = run_scenario(args.scenario, args.ticks, args.seed, args.schema)
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
