"""
Grounding audit toolkit: command-line entry point.

    python main.py train    --config train.json [--seed N] [--out DIR]
    python main.py audit    --config audit.json [--seed N] [--out DIR] [--format report|csv-tables]
    python main.py verify   SUITE [--seed N]
    python main.py classify --report profile_report.json [--ling-report other.json]

Exit codes: 0 success, 1 configuration or input error, 2 diverged training,
3 failed verification, 4 training finished above the convergence loss
(weights and log are still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from audit_pipeline import CONVERGED_LOSS, SUITES, converged, get_audit_pipeline, load_audit_config, load_train_config
from semantics.errors import DivergedTraining, GroundingError
from utils.logger import logger

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_VERIFY_FAILED = 3
EXIT_NOT_CONVERGED = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grounding", description="Audit how well an architecture grounds its symbols.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help=f"Train the grid-world agent with REINFORCE (exit 4 if final loss >= {CONVERGED_LOSS})")
    p_train.add_argument("--config", required=True, help="TrainRunConfig JSON document")
    p_train.add_argument("--seed", type=int, default=None, help="Overrides agent and training seeds")
    p_train.add_argument("--out", default=None, help="Output directory for weights.json and train_log.csv")

    p_audit = sub.add_parser("audit", help="Measure a grounding profile and classify it")
    p_audit.add_argument("--config", required=True, help="AuditConfig JSON document")
    p_audit.add_argument("--seed", type=int, default=None)
    p_audit.add_argument("--out", default=None, help="Output directory for the report")
    p_audit.add_argument("--format", choices=["report", "csv-tables"], default=None)

    p_verify = sub.add_parser("verify", help="Run a property suite")
    p_verify.add_argument("suite", choices=SUITES)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--trials", type=int, default=None, help="Random instances (default from settings)")

    p_classify = sub.add_parser("classify", help="Classify a saved profile report")
    p_classify.add_argument("--report", required=True)
    p_classify.add_argument("--ling-report", default=None, help="Profile measured under a linguistic meaning type")
    return parser


def cmd_train(args: argparse.Namespace) -> int:
    config = load_train_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    _, log = get_audit_pipeline().train(config, out_dir=args.out)
    if log.rows:
        print(f"final loss {log.final_loss:.6f} after {config.train.episodes} episodes")
    return EXIT_OK if converged(log) else EXIT_NOT_CONVERGED


def cmd_audit(args: argparse.Namespace) -> int:
    config = load_audit_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.format is not None:
        overrides["format"] = args.format
    if overrides:
        config = config.model_copy(update=overrides)
    pipeline = get_audit_pipeline()
    report = pipeline.audit(config)
    for path in pipeline.write_audit(report):
        print(path)
    p, v = report.profile, report.verdict
    print(
        f"eps_pres={p.eps_pres:.4f} eps_faith={p.eps_faith:.4f} ace={p.ace:.3f} "
        f"omega({p.omega_curve[-1][0]:g})={p.omega_curve[-1][1]:.4f} delta_comp={p.delta_comp:.4f} beta={p.beta:.3f} "
        f"-> {v.cell_g2a_g4} / {v.cell_g2a_g2b} / {v.archetype}"
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    result = get_audit_pipeline().verify(args.suite, seed=args.seed, trials=args.trials)
    print(f"{result.suite}: {'ok' if result.passed else 'FAILED'} - {result.summary}")
    return EXIT_OK if result.passed else EXIT_VERIFY_FAILED


def cmd_classify(args: argparse.Namespace) -> int:
    verdict = get_audit_pipeline().classify(args.report, args.ling_report)
    print(json.dumps(verdict.model_dump(mode="json"), sort_keys=True, indent=2))
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "audit": cmd_audit,
    "verify": cmd_verify,
    "classify": cmd_classify,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DivergedTraining as e:
        logger.error(f"[CLI] {e}")
        return EXIT_DIVERGED
    except GroundingError as e:
        logger.error(f"[CLI] {args.command}: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
