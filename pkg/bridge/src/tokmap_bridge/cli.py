"""Small command-line front for the bridge."""

from __future__ import annotations

import argparse
import json
import sys

from .checkpoint import CheckpointError, export_embeddings, import_embeddings
from .exchange import ExchangeFormatError
from .finetune_configs import emit_finetune_configs


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tokmap-bridge",
        description="Move token embeddings between transformer checkpoints "
                    "and the exchange format.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_export = sub.add_parser("export", help="checkpoint -> exchange files")
    p_export.add_argument("checkpoint")
    p_export.add_argument("--embeddings", required=True)
    p_export.add_argument("--vocab", required=True)

    p_import = sub.add_parser("import", help="exchange file -> new checkpoint")
    p_import.add_argument("checkpoint")
    p_import.add_argument("--embeddings", required=True)
    p_import.add_argument("--out", required=True)

    p_configs = sub.add_parser("emit-configs",
                               help="write the three finetuning-phase configs")
    p_configs.add_argument("out_dir")

    args = parser.parse_args(argv)
    try:
        if args.command == "export":
            summary = export_embeddings(args.checkpoint, args.embeddings, args.vocab)
        elif args.command == "import":
            summary = import_embeddings(args.checkpoint, args.embeddings, args.out)
        else:
            summary = {"written": [str(p) for p in emit_finetune_configs(args.out_dir)]}
    except (CheckpointError, ExchangeFormatError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc)}), file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
