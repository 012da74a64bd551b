"""Command-line entry point.

Subcommands cover the whole pipeline: corpus ingestion and curation
(``ingest``, ``filter``, ``stats``, ``split``), prompt inspection
(``prompt``), sampling (``generate``), layout checks (``validate``,
``render``, ``eval-nav``), preference-pair synthesis (``pairs-stage1``,
``pairs-stage2``, ``dpo-loss``), batch evaluation (``eval-success``,
``judge``), and the HTTP service (``serve``).

Exit codes: 0 success, 1 domain failure (bad data, unusable layout,
backend fault), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dataset, forge
from .errors import LayoutForgeError
from .evalkit import (
    NavTask,
    ValidationThresholds,
    judge_scores,
    nav_eval,
    render_svg,
    success_rate,
    validate,
)
from .gateway import (
    HTTP_CHAT,
    MOCK_SCRIPTED,
    MOCK_TEMPLATE,
    BackendConfig,
    GenerationParams,
    Gateway,
    config_from_env,
    make_backend,
)
from .prompts import (
    build_edit_prompt,
    build_generation_prompt,
    build_judge_prompt,
    build_summary_prompt,
    parse_completion,
)
from .scene import (
    layout_to_dict,
    load_task,
    parse_layout,
    read_corpus,
    task_from_dict,
    write_corpus,
)


def _read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _print_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _read_layout(path):
    with open(path, "rb") as fh:
        return parse_layout(fh.read())


# --- shared flag groups ----------------------------------------------------


def _add_backend_flags(sub) -> None:
    group = sub.add_argument_group("backend")
    group.add_argument(
        "--backend",
        choices=["template", "scripted", "http"],
        default="template",
        help="completion backend (default: template mock)",
    )
    group.add_argument("--script", help="JSONL script for the scripted backend")
    group.add_argument("--endpoint", help="chat endpoint URL (default: $LAYOUTFORGE_LLM_URL)")
    group.add_argument("--api-key", help="bearer token (default: $LAYOUTFORGE_API_KEY)")
    group.add_argument("--model", default="default", help="model name for HTTP requests")
    group.add_argument("--temperature", type=float, default=0.7)
    group.add_argument("--max-tokens", type=int, default=2048)
    group.add_argument("--max-in-flight", type=int, default=4)


def _add_threshold_flags(sub) -> None:
    group = sub.add_argument_group("validation thresholds")
    group.add_argument("--max-pair-overlap", type=float, default=0.01, metavar="M2")
    group.add_argument("--max-boundary-violation", type=float, default=0.01, metavar="M2")
    group.add_argument("--require-counts-match", action="store_true")


def _make_gateway(args) -> Gateway:
    kind = {"template": MOCK_TEMPLATE, "scripted": MOCK_SCRIPTED, "http": HTTP_CHAT}[
        args.backend
    ]
    if kind == HTTP_CHAT:
        config = config_from_env(
            HTTP_CHAT,
            endpoint=args.endpoint,
            api_key=args.api_key,
            max_in_flight=args.max_in_flight,
        )
    else:
        config = BackendConfig(
            kind=kind, script_path=args.script, max_in_flight=args.max_in_flight
        )
    return Gateway(
        make_backend(config),
        max_in_flight=args.max_in_flight,
        default_params=_make_params(args),
    )


def _make_params(args) -> GenerationParams:
    return GenerationParams(
        temperature=args.temperature,
        max_tokens=args.max_tokens,
        seed=getattr(args, "seed", None),
        model_name=args.model,
    )


def _make_thresholds(args) -> ValidationThresholds:
    return ValidationThresholds(
        max_pair_overlap=args.max_pair_overlap,
        max_boundary_violation=args.max_boundary_violation,
        require_counts_match=args.require_counts_match,
    )


# --- subcommand bodies -----------------------------------------------------


def _cmd_ingest(args) -> int:
    if args.config:
        conventions = dataset.conventions_from_config(dataset.load_config(args.config))
    else:
        conventions = dataset.DEFAULT_CONVENTIONS
    if args.source not in conventions:
        known = ", ".join(sorted(conventions))
        print(f"error: unknown source {args.source!r} (known: {known})", file=sys.stderr)
        return 1
    raw = dataset.load_raw_scenes(args.input)
    records = dataset.ingest_records(
        raw, conventions[args.source], do_recenter=not args.no_recenter
    )
    count = write_corpus(records, args.output)
    print(f"ingested {count} scenes -> {args.output}")
    return 0


def _cmd_filter(args) -> int:
    rules = (
        dataset.FilterRules.from_dict(_read_json(args.rules))
        if args.rules
        else dataset.FilterRules()
    )
    records = read_corpus(args.input)
    kept, dropped = [], []
    advisory_counts: dict[str, int] = {}
    for record in records:
        verdict = dataset.filter_scene(record, rules)
        for reason in verdict.reasons:
            advisory_counts[reason.value] = advisory_counts.get(reason.value, 0) + 1
        (kept if verdict.accepted else dropped).append(record)
    write_corpus(kept, args.output)
    if args.rejected:
        write_corpus(dropped, args.rejected)
    _print_json(
        {
            "input": len(records),
            "accepted": len(kept),
            "rejected": len(dropped),
            "flag_counts": advisory_counts,
        }
    )
    return 0


def _cmd_stats(args) -> int:
    records = read_corpus(args.input)
    _print_json(dataset.corpus_stats(records).to_dict(), args.output)
    return 0


def _cmd_split(args) -> int:
    plan = json.loads(args.plan) if args.plan.strip().startswith("{") else _read_json(args.plan)
    records = read_corpus(args.input)
    train, test = dataset.split_corpus(records, args.seed, plan)
    write_corpus(train, args.train)
    write_corpus(test, args.test)
    print(f"split {len(records)} -> {len(train)} train / {len(test)} test")
    return 0


def _cmd_prompt(args) -> int:
    if args.kind == "generate":
        if not args.task:
            print("error: generation prompts need --task", file=sys.stderr)
            return 1
        bundle = build_generation_prompt(load_task(args.task))
    elif args.kind == "edit":
        if not args.layout or not args.instruction:
            print("error: edit prompts need --layout and --instruction", file=sys.stderr)
            return 1
        bundle = build_edit_prompt(_read_layout(args.layout), args.instruction)
    elif args.kind == "judge":
        if not args.layout:
            print("error: judge prompts need --layout", file=sys.stderr)
            return 1
        bundle = build_judge_prompt(_read_layout(args.layout), args.preferences or "")
    else:  # summarize
        if not args.layout:
            print("error: summary prompts need --layout", file=sys.stderr)
            return 1
        bundle = build_summary_prompt(_read_layout(args.layout))
    _print_json(
        {
            "template": bundle.template_id,
            "fingerprint": bundle.fingerprint(),
            "system": bundle.system_text,
            "user": bundle.user_text,
        },
        args.output,
    )
    return 0


def _cmd_generate(args) -> int:
    task = load_task(args.task)
    gateway = _make_gateway(args)
    thresholds = _make_thresholds(args)
    bundle = build_generation_prompt(task)
    outputs = []
    for text in gateway.complete_batch([bundle] * args.n):
        if isinstance(text, Exception):
            raise text
        parsed = parse_completion(text, task=task)
        report = validate(parsed.layout, thresholds, task=task)
        outputs.append({"layout": layout_to_dict(parsed.layout), "report": report.to_dict()})
    if args.n == 1:
        _print_json(outputs[0], args.output)
    elif args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            for item in outputs:
                fh.write(json.dumps(item, ensure_ascii=False) + "\n")
    else:
        for item in outputs:
            print(json.dumps(item, ensure_ascii=False))
    return 0


def _cmd_validate(args) -> int:
    layout = _read_layout(args.layout)
    task = task_from_dict(_read_json(args.task)) if args.task else None
    report = validate(layout, _make_thresholds(args), task=task)
    _print_json(report.to_dict(), args.output)
    return 0 if report.usable else 1


def _cmd_render(args) -> int:
    layout = _read_layout(args.layout)
    svg = render_svg(layout, thresholds=_make_thresholds(args))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        print(svg, end="")
    return 0


def _cmd_pairs_stage1(args) -> int:
    records = read_corpus(args.corpus)
    pairs = forge.make_stage1_pairs(records, _make_gateway(args), k=args.k)
    forge.export_pairs(pairs, args.output)
    print(f"{len(pairs)} stage-1 pairs -> {args.output}")
    return 0


def _cmd_pairs_stage2(args) -> int:
    records = read_corpus(args.corpus)
    pairs = forge.synth_stage2_pairs(
        records, args.seed, args.mix, magnitude=args.magnitude
    )
    forge.export_pairs(pairs, args.output)
    skipped = len(records) - len(pairs)
    print(f"{len(pairs)} stage-2 pairs ({skipped} skipped) -> {args.output}")
    return 0


def _cmd_dpo_loss(args) -> int:
    loss = forge.dpo_loss(
        args.lp_pos_policy,
        args.lp_neg_policy,
        args.lp_pos_ref,
        args.lp_neg_ref,
        forge.DpoParams(beta=args.beta),
    )
    _print_json({"loss": loss})
    return 0


def _cmd_eval_success(args) -> int:
    tasks = []
    with open(args.tasks, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                tasks.append(task_from_dict(json.loads(line)))
    report = success_rate(
        tasks, _make_gateway(args), args.n, _make_thresholds(args)
    )
    _print_json(report.to_dict(), args.output)
    return 0


def _cmd_eval_nav(args) -> int:
    layout = _read_layout(args.layout)
    task = NavTask(
        start_pose=(args.start[0], args.start[1], args.start[2]),
        target_instance=args.target,
        fov_half_angle=args.fov_half_angle,
        success_radius=args.radius,
        grid_resolution=args.grid,
    )
    result = nav_eval(layout, task)
    _print_json(result.to_dict(), args.output)
    return 0


def _cmd_judge(args) -> int:
    layouts = [_read_layout(p) for p in args.layouts]
    outcomes = judge_scores(layouts, args.preferences, _make_gateway(args))
    _print_json([o.to_dict() for o in outcomes], args.output)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        _make_gateway(args),
        thresholds=_make_thresholds(args),
        persist_path=args.persist,
        cors_origins=tuple(args.cors_origin or ()),
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layoutforge",
        description="Indoor layout generation toolkit: corpus pipeline, "
        "prompts, preference pairs, evaluation, and studio service.",
    )
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub = subs.add_parser("ingest", help="normalize raw scene dumps into the corpus format")
    sub.add_argument("--input", required=True, help="raw scenes JSONL")
    sub.add_argument("--output", required=True, help="corpus JSONL to write")
    sub.add_argument("--source", required=True, help="source convention name")
    sub.add_argument("--config", help="JSON/TOML file with custom source conventions")
    sub.add_argument("--no-recenter", action="store_true")
    sub.set_defaults(fn=_cmd_ingest)

    sub = subs.add_parser("filter", help="apply population/density curation rules")
    sub.add_argument("--input", required=True)
    sub.add_argument("--output", required=True, help="accepted records JSONL")
    sub.add_argument("--rejected", help="optional JSONL for dropped records")
    sub.add_argument("--rules", help="JSON file overriding the default rules")
    sub.set_defaults(fn=_cmd_filter)

    sub = subs.add_parser("stats", help="corpus summary statistics")
    sub.add_argument("--input", required=True)
    sub.add_argument("--output")
    sub.set_defaults(fn=_cmd_stats)

    sub = subs.add_parser("split", help="seeded train/test split")
    sub.add_argument("--input", required=True)
    sub.add_argument("--train", required=True)
    sub.add_argument("--test", required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument(
        "--plan",
        required=True,
        help='JSON object or file: room type -> held-out count, e.g. \'{"bedroom": 2}\'',
    )
    sub.set_defaults(fn=_cmd_split)

    sub = subs.add_parser("prompt", help="build a prompt without sending it")
    sub.add_argument("--kind", choices=["generate", "edit", "judge", "summarize"], default="generate")
    sub.add_argument("--task", help="task JSON (generate)")
    sub.add_argument("--layout", help="layout JSON (edit/judge/summarize)")
    sub.add_argument("--instruction", help="edit instruction")
    sub.add_argument("--preferences", help="judge preference text")
    sub.add_argument("--output")
    sub.set_defaults(fn=_cmd_prompt)

    sub = subs.add_parser("generate", help="sample layouts for a task")
    sub.add_argument("--task", required=True)
    sub.add_argument("--n", type=int, default=1)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--output")
    _add_backend_flags(sub)
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_generate)

    sub = subs.add_parser("validate", help="check a layout; exit 1 when unusable")
    sub.add_argument("--layout", required=True)
    sub.add_argument("--task", help="optional task JSON for count checking")
    sub.add_argument("--output")
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_validate)

    sub = subs.add_parser("render", help="render a layout to SVG")
    sub.add_argument("--layout", required=True)
    sub.add_argument("--output", help="SVG path (default: stdout)")
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_render)

    sub = subs.add_parser("pairs-stage1", help="pair corpus positives against sampled generations")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--output", required=True)
    sub.add_argument("--k", type=int, default=2, help="samples per positive")
    sub.add_argument("--seed", type=int)
    _add_backend_flags(sub)
    sub.set_defaults(fn=_cmd_pairs_stage1)

    sub = subs.add_parser("pairs-stage2", help="pair corpus positives against injected violations")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--output", required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--mix", type=float, default=0.5, help="fraction pushed out of bounds")
    sub.add_argument("--magnitude", type=float, default=0.5, help="extra out-of-bounds travel (m)")
    sub.set_defaults(fn=_cmd_pairs_stage2)

    sub = subs.add_parser("dpo-loss", help="reference evaluation of the preference loss")
    sub.add_argument("--beta", type=float, required=True)
    sub.add_argument("--lp-pos-policy", type=float, required=True)
    sub.add_argument("--lp-neg-policy", type=float, required=True)
    sub.add_argument("--lp-pos-ref", type=float, required=True)
    sub.add_argument("--lp-neg-ref", type=float, required=True)
    sub.set_defaults(fn=_cmd_dpo_loss)

    sub = subs.add_parser("eval-success", help="usable fraction over sampled generations")
    sub.add_argument("--tasks", required=True, help="JSONL, one task per line")
    sub.add_argument("--n", type=int, default=50, help="samples per task")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--output")
    _add_backend_flags(sub)
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_eval_success)

    sub = subs.add_parser("eval-nav", help="object-reaching check on the occupancy grid")
    sub.add_argument("--layout", required=True)
    sub.add_argument("--target", required=True, help="target instance id")
    sub.add_argument(
        "--start", type=float, nargs=3, required=True, metavar=("X", "Y", "HEADING")
    )
    sub.add_argument("--fov-half-angle", type=float, default=NavTask.fov_half_angle)
    sub.add_argument("--radius", type=float, default=NavTask.success_radius)
    sub.add_argument("--grid", type=float, default=NavTask.grid_resolution)
    sub.add_argument("--output")
    sub.set_defaults(fn=_cmd_eval_nav)

    sub = subs.add_parser("judge", help="LLM rating of layouts against stated preferences")
    sub.add_argument("--layouts", nargs="+", required=True)
    sub.add_argument("--preferences", default="")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--output")
    _add_backend_flags(sub)
    sub.set_defaults(fn=_cmd_judge)

    sub = subs.add_parser("serve", help="run the studio HTTP service")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=8000)
    sub.add_argument("--persist", help="JSONL write-ahead log replayed on restart")
    sub.add_argument("--cors-origin", action="append", help="allowed origin (repeatable)")
    _add_backend_flags(sub)
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (LayoutForgeError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
