"""Command-line client for the pipeline.

Each subcommand drives one service operation (the full chain, for
``demo``) and writes its outputs plus a run manifest into ``--out``.
The service runs in-process unless ``--server`` points at a remote
instance.

Exit codes: 0 success, 2 invalid input or configuration, 3 environment
problems (missing files, unreachable server, unwritable output).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .client import ServiceClient
from .errors import HoneytrapError
from .service import schemas


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_input(path: str) -> tuple[str, str]:
    """Read an input file; returns (text, sha256-of-bytes)."""
    data = Path(path).read_bytes()
    return data.decode("utf-8"), _sha256(data)


def _emit(
    out_dir: str,
    command: str,
    seed: int | None,
    config: dict,
    inputs: dict[str, str],
    files: dict[str, str],
) -> None:
    """Write output files and a manifest that makes the run reproducible.

    The manifest records the tool version, the effective configuration
    and the digest of every input and output, and never contains
    timestamps or absolute paths — re-running the same command on the
    same inputs rewrites every byte identically.
    """
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    outputs = {}
    for name, content in files.items():
        data = content.encode("utf-8")
        (directory / name).write_bytes(data)
        outputs[name] = _sha256(data)
    manifest = {
        "tool": "honeytrap",
        "tool_version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
    }
    (directory / "manifest.json").write_bytes(
        (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8")
    )


def _params_model(args: argparse.Namespace, seed: int) -> schemas.DecorateParamsModel:
    return schemas.DecorateParamsModel(
        c_size=args.c_size,
        i_max=args.i_max,
        r_size=args.r_size,
        seed=seed,
        min_leaf=args.min_leaf,
    )


def _params_config(args: argparse.Namespace, seed: int) -> dict:
    return {
        "c_size": args.c_size,
        "i_max": args.i_max,
        "r_size": args.r_size,
        "min_leaf": args.min_leaf,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    inputs = {}
    config_text = ""
    if args.config:
        config_text, digest = _read_input(args.config)
        inputs["config"] = digest
    response = client.simulate(
        schemas.SimulateRequest(config_text=config_text, seed=args.seed)
    )
    s = response.summary
    _emit(
        args.out,
        "simulate",
        int(response.config["seed"]),
        response.config,
        inputs,
        {
            "profiles.jsonl": response.profiles_jsonl,
            "harvested.jsonl": response.harvested_jsonl,
            "events.csv": response.events_csv,
        },
    )
    mean_rate = (
        sum(s.honeypot_follow_rates.values()) / len(s.honeypot_follow_rates)
        if s.honeypot_follow_rates
        else 0.0
    )
    print(
        f"simulated {s.n_profiles} profiles "
        f"({s.n_legitimate} legitimate, {s.n_malicious} malicious) "
        f"over {int(response.config['n_days'])} days"
    )
    print(
        f"honeypots logged {s.n_events} events from {s.n_trapped} distinct accounts; "
        f"mean follow requests per honeypot per day: {mean_rate:.2f}"
    )
    print(
        f"harvested {s.n_harvested} profiles "
        f"({s.harvested_malicious} malicious, {s.harvested_legitimate} legitimate control) "
        f"-> {args.out}"
    )
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    profiles_text, digest = _read_input(args.profiles)
    response = client.extract(
        schemas.ExtractRequest(profiles_jsonl=profiles_text, group=args.group)
    )
    _emit(
        args.out,
        "extract",
        None,
        {"group": args.group},
        {"profiles": digest},
        {"features.arff": response.arff_text, "features.csv": response.csv_text},
    )
    print(
        f"extracted {response.n_instances} instances x {response.n_attributes} attributes "
        f"({args.group}) -> {args.out}"
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    arff_text, digest = _read_input(args.data)
    response = client.train(
        schemas.TrainRequest(
            arff_text=arff_text,
            class_attribute=args.class_attr,
            params=_params_model(args, args.seed),
        )
    )
    config = _params_config(args, args.seed)
    config["class_attribute"] = args.class_attr
    _emit(
        args.out,
        "train",
        args.seed,
        config,
        {"data": digest},
        {"model.txt": response.model_text},
    )
    print(
        f"trained an ensemble of {response.n_members} trees; "
        f"training error {response.training_error:.4f} -> {args.out}"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    arff_text, digest = _read_input(args.data)
    response = client.evaluate(
        schemas.EvaluateRequest(
            arff_text=arff_text,
            class_attribute=args.class_attr,
            positive_class=args.positive_class,
            folds=args.folds,
            seed=args.seed,
            jobs=args.jobs,
            params=_params_model(args, args.seed),
            cost_fp=args.cost_fp,
            cost_fn=args.cost_fn,
        )
    )
    config = _params_config(args, args.seed)
    config.update(
        {
            "class_attribute": args.class_attr,
            "positive_class": args.positive_class,
            "folds": args.folds,
        }
    )
    files = {
        "report.txt": response.report_text,
        "report.json": json.dumps(response.report, indent=2, sort_keys=True) + "\n",
        "threshold_curve.csv": response.threshold_curve_csv,
        "margin_curve.csv": response.margin_curve_csv,
    }
    if response.cost is not None:
        config.update({"cost_fp": args.cost_fp, "cost_fn": args.cost_fn})
        files["cost_benefit.json"] = (
            json.dumps(response.cost.model_dump(), indent=2, sort_keys=True) + "\n"
        )
    _emit(args.out, "evaluate", args.seed, config, {"data": digest}, files)
    print(response.report_text, end="")
    if response.cost is not None:
        print(
            f"\ncheapest decision threshold {response.cost.threshold:.4f} "
            f"(total cost {response.cost.total_cost:.1f}, "
            f"accuracy {response.cost.accuracy:.4f})"
        )
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    arff_text, digest = _read_input(args.data)
    response = client.ablate(
        schemas.AblateRequest(
            arff_text=arff_text,
            class_attribute=args.class_attr,
            positive_class=args.positive_class,
            folds=args.folds,
            seed=args.seed,
            jobs=args.jobs,
            params=_params_model(args, args.seed),
        )
    )
    config = _params_config(args, args.seed)
    config.update(
        {
            "class_attribute": args.class_attr,
            "positive_class": args.positive_class,
            "folds": args.folds,
        }
    )
    _emit(
        args.out,
        "ablate",
        args.seed,
        config,
        {"data": digest},
        {"ablation.csv": response.csv_text},
    )
    print(response.table_text, end="")
    return 0


def cmd_demo(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    inputs = {}
    config_text = ""
    if args.config:
        config_text, digest = _read_input(args.config)
        inputs["config"] = digest

    print(f"[1/5] simulating the trap deployment (seed {args.seed})")
    sim = client.simulate(schemas.SimulateRequest(config_text=config_text, seed=args.seed))
    s = sim.summary
    print(
        f"      {s.n_profiles} profiles, {s.n_events} honeypot events, "
        f"{s.n_harvested} harvested ({s.harvested_malicious} malicious / "
        f"{s.harvested_legitimate} control)"
    )

    print("[2/5] extracting features from the harvested profiles")
    ext = client.extract(
        schemas.ExtractRequest(profiles_jsonl=sim.harvested_jsonl, group="combined")
    )
    print(f"      {ext.n_instances} instances x {ext.n_attributes} attributes")

    params = _params_model(args, args.seed)
    print("[3/5] training the ensemble on the full dataset")
    trained = client.train(schemas.TrainRequest(arff_text=ext.arff_text, params=params))
    print(
        f"      {trained.n_members} trees, training error {trained.training_error:.4f}"
    )

    print(f"[4/5] cross-validating ({args.folds} folds)")
    ev = client.evaluate(
        schemas.EvaluateRequest(
            arff_text=ext.arff_text,
            folds=args.folds,
            seed=args.seed,
            jobs=args.jobs,
            params=params,
        )
    )

    print("[5/5] comparing feature groups")
    ab = client.ablate(
        schemas.AblateRequest(
            arff_text=ext.arff_text,
            folds=args.folds,
            seed=args.seed,
            jobs=args.jobs,
            params=params,
        )
    )

    config = dict(sim.config)
    config.update(_params_config(args, args.seed))
    config["folds"] = args.folds
    _emit(
        args.out,
        "demo",
        args.seed,
        config,
        inputs,
        {
            "profiles.jsonl": sim.profiles_jsonl,
            "harvested.jsonl": sim.harvested_jsonl,
            "events.csv": sim.events_csv,
            "features.arff": ext.arff_text,
            "features.csv": ext.csv_text,
            "model.txt": trained.model_text,
            "report.txt": ev.report_text,
            "report.json": json.dumps(ev.report, indent=2, sort_keys=True) + "\n",
            "threshold_curve.csv": ev.threshold_curve_csv,
            "margin_curve.csv": ev.margin_curve_csv,
            "ablation.csv": ab.csv_text,
        },
    )
    print()
    print(ev.report_text, end="")
    print()
    print(ab.table_text, end="")
    print()
    combined = next(r for r in ab.rows if r.group == "combined")
    print(
        f"demo complete: combined accuracy {combined.accuracy:.4f}, "
        f"false-positive rate {combined.fp_rate:.4f} -> {args.out}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("honeytrap.service:app", host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="honeytrap",
        description="Honeypot-driven spam-profile detection pipeline",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    server = argparse.ArgumentParser(add_help=False)
    server.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="send work to a running service instead of computing in-process",
    )

    learner = argparse.ArgumentParser(add_help=False)
    learner.add_argument("--c-size", type=int, default=15, help="ensemble size budget")
    learner.add_argument("--i-max", type=int, default=50, help="candidate trial budget")
    learner.add_argument(
        "--r-size", type=float, default=1.0, help="artificial rows per real row"
    )
    learner.add_argument(
        "--min-leaf", type=int, default=2, help="minimum instances per tree leaf"
    )

    cv = argparse.ArgumentParser(add_help=False)
    cv.add_argument("--folds", type=int, default=10, help="cross-validation folds")
    cv.add_argument("--jobs", type=int, default=1, help="parallel fold workers")
    cv.add_argument("--class-attr", default="class", help="name of the class attribute")
    cv.add_argument("--positive-class", default="mal", help="label treated as positive")

    p = sub.add_parser("simulate", parents=[server], help="run the simulated deployment")
    p.add_argument("--config", help="configuration file (omit for the packaged default)")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("extract", parents=[server], help="profiles -> feature dataset")
    p.add_argument("--profiles", required=True, help="profile records (JSON lines)")
    p.add_argument(
        "--group",
        default="combined",
        choices=["traditional", "honeypot", "combined"],
        help="feature group to keep",
    )
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", parents=[server, learner], help="train one ensemble")
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--class-attr", default="class", help="name of the class attribute")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser(
        "evaluate", parents=[server, learner, cv], help="cross-validate and report"
    )
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cost-fp", type=float, default=None, help="cost of a false alarm")
    p.add_argument("--cost-fn", type=float, default=None, help="cost of a missed positive")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "ablate", parents=[server, learner, cv], help="compare feature groups"
    )
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser(
        "demo", parents=[server, learner], help="run the whole pipeline end to end"
    )
    p.add_argument("--config", help="configuration file (omit for the packaged default)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("serve", help="run the service in the foreground")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HoneytrapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
