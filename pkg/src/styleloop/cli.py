"""Command-line entry points: an API server and a headless batch pipeline.

Provider selection is shared: ``mock`` (deterministic, offline), ``http``
(OpenAI-compatible endpoint; credentials via STYLELOOP_API_KEY), or ``replay``
(canned responses recorded from a real provider — the replay-fixtures mode).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import MalformedProviderOutput, ProviderError
from .gateway import (
    HttpProvider,
    LlmGateway,
    MockProvider,
    Provider,
    ProviderProfile,
    ReplayProvider,
    TemplateId,
    TemplateLibrary,
)
from .model import default_style, style_description_from_text
from .telemetry import load_snapshot, save_snapshot
from .workspace import Workspace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FILE_ERROR = 2
EXIT_PROVIDER_ERROR = 3
EXIT_MALFORMED_OUTPUT = 4


def _add_provider_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--provider",
        choices=("mock", "http", "replay"),
        default="mock",
        help="completion provider (replay serves recorded fixtures)",
    )
    parser.add_argument("--endpoint", default=os.environ.get("STYLELOOP_ENDPOINT", ""))
    parser.add_argument("--fixtures-dir", default="fixtures")
    parser.add_argument("--fast-model", default="fast-default")
    parser.add_argument("--strong-model", default="strong-default")
    parser.add_argument("--template-dir", default=None, help="override the packaged templates")


def _build_gateway(args: argparse.Namespace) -> LlmGateway:
    provider: Provider
    if args.provider == "mock":
        provider = MockProvider()
    elif args.provider == "replay":
        provider = ReplayProvider(args.fixtures_dir)
    else:
        if not args.endpoint:
            raise SystemExit("--endpoint (or STYLELOOP_ENDPOINT) is required for --provider http")
        provider = HttpProvider(args.endpoint, api_key=os.environ.get("STYLELOOP_API_KEY", ""))
    profile = ProviderProfile(
        name=args.provider, fast_model=args.fast_model, strong_model=args.strong_model
    )
    templates = TemplateLibrary(args.template_dir) if args.template_dir else None
    return LlmGateway(provider, profile=profile, templates=templates)


def serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    store_dir = Path(args.store) if args.store else None
    log_path = None
    if store_dir is not None:
        store_dir.mkdir(parents=True, exist_ok=True)
        log_path = str(store_dir / "events.jsonl")
    workspace = Workspace(gateway=_build_gateway(args), log_path=log_path)
    snapshot_path = store_dir / "snapshot.json" if store_dir else None
    if snapshot_path is not None and snapshot_path.exists():
        workspace.restore(load_snapshot(snapshot_path))
        logger.info("restored snapshot from %s", snapshot_path)

    app = create_app(workspace)

    if snapshot_path is not None:

        @app.on_event("shutdown")
        def _persist() -> None:
            save_snapshot(snapshot_path, workspace.snapshot())

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def batch(args: argparse.Namespace) -> int:
    """Headless pipeline: learn a style from a sample, rewrite the input
    under it, and write both the rewrite and the learned description."""
    try:
        sample = Path(args.sample).read_text(encoding="utf-8")
        source = Path(args.input).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: file: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR

    gateway = _build_gateway(args)
    try:
        raw = gateway.extract_style(
            document=sample,
            style=default_style().description.as_text(),
            like_summary="",
            dislike_summary="",
        )
        description = style_description_from_text(raw)
        rewritten = gateway.generate(
            TemplateId.REWRITE,
            {"style": description.as_text(), "selection": source},
        )
    except MalformedProviderOutput as exc:
        print(f"error: malformed provider output: {exc}", file=sys.stderr)
        return EXIT_MALFORMED_OUTPUT
    except ProviderError as exc:
        print(f"error: provider: {exc}", file=sys.stderr)
        return EXIT_PROVIDER_ERROR

    try:
        output_path = Path(args.output)
        output_path.write_text(rewritten, encoding="utf-8")
        style_path = output_path.with_name(output_path.name + ".style.json")
        style_path.write_text(
            json.dumps(description.to_dict(), indent=2, sort_keys=True, ensure_ascii=False),
            encoding="utf-8",
        )
    except OSError as exc:
        print(f"error: file: {exc}", file=sys.stderr)
        return EXIT_FILE_ERROR
    print(f"wrote {output_path} and {style_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="styleloop")
    sub = parser.add_subparsers(dest="command", required=True)

    serve_parser = sub.add_parser("serve", help="run the API server")
    serve_parser.add_argument("--host", default="127.0.0.1")
    serve_parser.add_argument("--port", type=int, default=8000)
    serve_parser.add_argument("--store", default=None, help="directory for the event log and snapshot")
    _add_provider_args(serve_parser)
    serve_parser.set_defaults(func=serve)

    batch_parser = sub.add_parser("batch", help="style-transfer one document headlessly")
    batch_parser.add_argument("input", help="document to rewrite")
    batch_parser.add_argument("sample", help="writing sample to learn the style from")
    batch_parser.add_argument("output", help="where to write the rewritten document")
    _add_provider_args(batch_parser)
    batch_parser.set_defaults(func=batch)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
