"""Command line: serve, simulate, train, report, demo."""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date, timedelta
from pathlib import Path

from .. import clock
from ..ml import evaluate, split_chronological, train_family
from ..ml.dataset import LabeledExample
from ..monitor import compare, rank_participants, summarize
from ..sim import CohortConfig, analyze_run, default_plan_doc, generate_cohort, run_experiment
from ..stores import LtmStore, StmStore
from .config import ApiConfig

FAMILY_CHOICES = ["decision_tree", "random_forest", "logistic_regression", "gaussian_nb", "neural_net"]

DEFAULT_TRAIN_PARAMS: dict[str, dict] = {
    "decision_tree": {"max_depth": 12, "min_samples_leaf": 5},
    "random_forest": {"n_trees": 20, "max_depth": 12, "min_samples_leaf": 5},
    "logistic_regression": {"learning_rate": 0.5, "epochs": 300},
    "gaussian_nb": {},
    "neural_net": {"hidden_units": 16, "learning_rate": 0.5, "epochs": 300},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esmkit", description="Experience-sampling experiment toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP API over a data directory")
    serve.add_argument("--data-dir", required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--researcher-token", default="researcher-token")
    serve.add_argument("--participant-secret", default="participant-secret")
    serve.add_argument("--ui", default=None, help="static dashboard directory to mount at /ui")

    simulate = sub.add_parser("simulate", help="run a synthetic cohort through the system")
    simulate.add_argument("--cohort", default=None, help="cohort config JSON (size/term_start/seed)")
    simulate.add_argument("--plan", default=None, help="plan document JSON")
    simulate.add_argument("--policy", choices=["fixed", "adaptive"], default="fixed")
    simulate.add_argument("--days", type=int, default=28)
    simulate.add_argument("--seed", type=int, default=20260105)
    simulate.add_argument("--size", type=int, default=40)
    simulate.add_argument("--train-after-days", type=int, default=14)
    simulate.add_argument("--out", required=True)

    train = sub.add_parser("train", help="train classifiers on a data directory and report metrics")
    train.add_argument("--data-dir", required=True)
    train.add_argument("--family", choices=FAMILY_CHOICES + ["all"], default="all")
    train.add_argument("--seed", type=int, default=1)
    train.add_argument("--train-fraction", type=float, default=0.7)
    train.add_argument("--out", default=None, help="write the metrics table here as well")

    report = sub.add_parser("report", help="export participant summaries and comparison series")
    report.add_argument("--data-dir", required=True)
    report.add_argument("--start", default=None)
    report.add_argument("--end", default=None)
    report.add_argument("--out", required=True)

    demo = sub.add_parser("demo", help="produce a dashboard-ready demo data directory")
    demo.add_argument("--out", required=True)
    demo.add_argument("--seed", type=int, default=4)
    demo.add_argument("--size", type=int, default=4)
    # adaptive scheduling needs a full week of history before its routine
    # features can see every weekday, so the demo runs two weeks
    demo.add_argument("--days", type=int, default=14)
    return parser


def _cmd_serve(args) -> int:
    import uvicorn

    from .core import ExperimentService
    from .http import create_app

    config = ApiConfig(
        data_dir=Path(args.data_dir),
        host=args.host,
        port=args.port,
        researcher_token=args.researcher_token,
        participant_secret=args.participant_secret,
        static_ui_dir=Path(args.ui) if args.ui else None,
    )
    service = ExperimentService(config)
    app = create_app(service)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        service.close()
    return 0


def _cmd_simulate(args) -> int:
    if args.cohort:
        cohort_config = CohortConfig.from_doc(json.loads(Path(args.cohort).read_text()))
    else:
        cohort_config = CohortConfig(size=args.size, term_start=date(2026, 1, 5), seed=args.seed)
    profiles = generate_cohort(cohort_config)
    if args.plan:
        plan_doc = json.loads(Path(args.plan).read_text())
    else:
        plan_doc = default_plan_doc(cohort_config.term_start, args.days)
    result = run_experiment(
        profiles,
        plan_doc,
        policy=args.policy,
        days=args.days,
        seed=args.seed,
        data_dir=args.out,
        train_after_days=args.train_after_days,
        campus=cohort_config.campus,
    )
    if args.policy == "adaptive" and args.train_after_days < args.days:
        eval_start = args.train_after_days
    else:
        eval_start = 0
    metrics = analyze_run(result, eval_start)
    print(json.dumps(metrics, indent=1, sort_keys=True))
    return 0


def _load_dataset(data_dir: Path) -> list[LabeledExample]:
    import numpy as np

    path = data_dir / "dataset.jsonl"
    if not path.exists():
        print(f"no dataset.jsonl in {data_dir}; run simulate first", file=sys.stderr)
        raise SystemExit(2)
    examples = []
    with open(path) as fh:
        for line in fh:
            doc = json.loads(line)
            examples.append(
                LabeledExample(
                    features=np.array(doc["features"], dtype=float),
                    label=int(doc["label"]),
                    participant=doc["participant"],
                    at=clock.parse_iso(doc["at"]),
                )
            )
    return examples


def _cmd_train(args) -> int:
    examples = _load_dataset(Path(args.data_dir))
    train_set, test_set = split_chronological(examples, args.train_fraction)
    families = FAMILY_CHOICES if args.family == "all" else [args.family]
    header = f"{'classifier':22s} {'accuracy':>8s} {'kappa':>8s} {'precision':>9s} {'recall':>8s} {'f1':>8s} {'auc':>8s}"
    lines = [header]
    for family in families:
        model = train_family(family, train_set, seed=args.seed, **DEFAULT_TRAIN_PARAMS[family])
        m = evaluate(model, test_set)
        lines.append(
            f"{family:22s} {m.accuracy:8.4f} {m.kappa:8.4f} {m.precision:9.4f} "
            f"{m.recall:8.4f} {m.f1:8.4f} {m.auc:8.4f}"
        )
    table = "\n".join(lines)
    print(table)
    if args.out:
        Path(args.out).write_text(table + "\n")
    return 0


def _store_date_bounds(stm: StmStore) -> tuple[date, date]:
    times = [ev.recorded_at for ev in stm.scan()]
    if not times:
        today = date(2026, 1, 5)
        return today, today + timedelta(days=1)
    return min(times).date(), max(times).date() + timedelta(days=1)


def _cmd_report(args) -> int:
    data_dir = Path(args.data_dir)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with StmStore(data_dir / "stm.log", fsync=False) as stm, LtmStore(
        data_dir / "ltm.log", fsync=False
    ) as ltm:
        start = clock.parse_iso_date(args.start) if args.start else None
        end = clock.parse_iso_date(args.end) if args.end else None
        if start is None or end is None:
            lo, hi = _store_date_bounds(stm)
            start, end = start or lo, end or hi

        participants = sorted(ev.payload["participant"] for ev in stm.scan(kind="ParticipantEnrolled"))
        with open(out / "summaries.tsv", "w") as fh:
            fh.write("participant\tday\tsent\tanswered\texpired\tskipped\tsensors\n")
            for participant in participants:
                summary = summarize(participant, stm, ltm, start, end)
                for day in summary.days:
                    sensor_total = sum(n for _, n in day.sensors)
                    fh.write(
                        f"{participant}\t{clock.iso_date(day.day)}\t{day.sent}\t{day.answered}"
                        f"\t{day.expired}\t{day.skipped}\t{sensor_total}\n"
                    )

        series = compare(participants, stm, ltm, start, end)
        with open(out / "compare_answered.tsv", "w") as fh:
            fh.write("participant\t" + "\t".join(f"day{i}" for i in range(len(next(iter(series.values()), [])))) + "\n")
            for participant in participants:
                fh.write(participant + "\t" + "\t".join(str(v) for v in series[participant]) + "\n")

        with open(out / "ranking.tsv", "w") as fh:
            fh.write("participant\tcontribution\n")
            for participant, value in rank_participants(stm, ltm, start, end, order="most"):
                fh.write(f"{participant}\t{value:.2f}\n")
    print(f"wrote {out}/summaries.tsv, compare_answered.tsv, ranking.tsv")
    return 0


def _cmd_demo(args) -> int:
    term_start = date(2026, 1, 5)
    profiles = generate_cohort(CohortConfig(size=args.size, term_start=term_start, seed=args.seed))
    plan_doc = default_plan_doc(term_start, args.days)
    result = run_experiment(
        profiles,
        plan_doc,
        policy="adaptive",
        days=args.days,
        seed=args.seed,
        data_dir=args.out,
        train_after_days=min(7, max(1, args.days - 1)),
    )
    metrics = analyze_run(result, result.train_after_days)
    print(json.dumps(metrics, indent=1, sort_keys=True))
    print(f"demo data directory ready: {args.out}")
    print(f"serve it with: esmkit serve --data-dir {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": _cmd_serve,
        "simulate": _cmd_simulate,
        "train": _cmd_train,
        "report": _cmd_report,
        "demo": _cmd_demo,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
