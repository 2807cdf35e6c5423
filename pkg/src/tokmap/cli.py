"""Command-line pipeline: symmetrize, train-subword, map, convert, report.

Every run is driven by a JSON config file (flags override a few fields);
the seed is mandatory so runs stay reproducible.  ``pipeline`` chains all
five steps and writes a manifest of input and artifact hashes that pins
the run.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .converter import convert, verify
from .dictionary import BigramCorpus, TagScheme, generate_bigram_corpus, load_dictionary
from .errors import TokmapError, ValidationError
from .mapper import (
    MapperConfig,
    build_mapping,
    load_mapping,
    load_sidecar,
    save_mapping,
)
from .report import render_examples, stats_tsv, summarize
from .subword import SubwordConfig, SubwordModel, train
from .vocab_io import load_vocab, read_embeddings, write_embeddings

ARTIFACTS = {
    "corpus": "corpus.txt",
    "model": "subword.bin",
    "mapping": "mapping.jsonl",
    "embeddings": "target_embeddings.emb",
    "report_json": "report.json",
    "report_md": "report.md",
    "report_tsv": "report.tsv",
}
MANIFEST = "manifest.json"

_INPUT_FIELDS = ("dictionary", "source_vocab", "target_vocab", "source_embeddings")


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValidationError("config must be a JSON object")
    if "seed" not in config:
        raise ValidationError("config field 'seed' is required (no wall-clock default)")
    config["_dir"] = str(Path(path).parent)
    return config


def _require(config: dict, field: str) -> str:
    value = config.get(field)
    if value is None:
        raise ValidationError(f"config field {field!r} is missing")
    return value


def _path(config: dict, field: str, must_exist: bool = True) -> Path:
    p = Path(config["_dir"]) / _require(config, field)
    if must_exist and not p.exists():
        raise ValidationError(f"config field {field!r}: path does not exist: {p}")
    return p


def _out_dir(config: dict) -> Path:
    out = Path(config["_dir"]) / _require(config, "output_dir")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _tags(config: dict) -> TagScheme:
    spec = config.get("tags")
    return TagScheme(**spec) if spec else TagScheme()


def _subword_config(config: dict) -> SubwordConfig:
    options = dict(config.get("subword", {}))
    options["seed"] = config["seed"]
    try:
        return SubwordConfig(**options)
    except TypeError as exc:
        raise ValidationError(f"config field 'subword': {exc}") from None


def _mapper_config(config: dict, threads: int) -> MapperConfig:
    options = dict(config.get("mapper", {}))
    options.pop("sidecar", None)
    try:
        return MapperConfig(tags=_tags(config), threads=threads, **options)
    except TypeError as exc:
        raise ValidationError(f"config field 'mapper': {exc}") from None


def _load_vocabs(config: dict):
    source = load_vocab(_path(config, "source_vocab"),
                        _require(config, "source_convention"))
    target = load_vocab(_path(config, "target_vocab"),
                        _require(config, "target_convention"))
    return source, target


def cmd_symmetrize(config: dict, threads: int = 1) -> list[Path]:
    entries = load_dictionary(_path(config, "dictionary"), tags=_tags(config))
    corpus_cfg = config.get("corpus", {})
    corpus = generate_bigram_corpus(
        entries,
        augment_compounds=corpus_cfg.get("augment_compounds", False),
        frequency_weighted=corpus_cfg.get("frequency_weighted", False),
        seed=config["seed"],
        tags=_tags(config),
    )
    out = _out_dir(config) / ARTIFACTS["corpus"]
    corpus.save(out)
    return [out]


def cmd_train_subword(config: dict, threads: int = 1) -> list[Path]:
    corpus_path = _out_dir(config) / ARTIFACTS["corpus"]
    if not corpus_path.exists():
        raise ValidationError(f"corpus artifact missing, run symmetrize first: {corpus_path}")
    corpus = BigramCorpus.load(corpus_path)
    model = train(corpus, _subword_config(config), threads=threads)
    out = _out_dir(config) / ARTIFACTS["model"]
    model.save(out)
    return [out]


def cmd_map(config: dict, threads: int = 1) -> list[Path]:
    model_path = _out_dir(config) / ARTIFACTS["model"]
    if not model_path.exists():
        raise ValidationError(f"model artifact missing, run train-subword first: {model_path}")
    model = SubwordModel.load(model_path)
    source_vocab, target_vocab = _load_vocabs(config)
    entries = load_dictionary(_path(config, "dictionary"), tags=_tags(config))
    sidecar_spec = config.get("mapper", {}).get("sidecar")
    sidecar = None
    if sidecar_spec:
        sidecar = load_sidecar(Path(config["_dir"]) / sidecar_spec)
    mapping = build_mapping(target_vocab, source_vocab, entries, model,
                            _mapper_config(config, threads), sidecar=sidecar)
    out = _out_dir(config) / ARTIFACTS["mapping"]
    save_mapping(mapping, target_vocab, source_vocab, out)
    return [out]


def cmd_convert(config: dict, threads: int = 1) -> list[Path]:
    mapping_path = _out_dir(config) / ARTIFACTS["mapping"]
    if not mapping_path.exists():
        raise ValidationError(f"mapping artifact missing, run map first: {mapping_path}")
    mapping = load_mapping(mapping_path)
    source_table = read_embeddings(_path(config, "source_embeddings"),
                                   _require(config, "source_convention"))
    _, target_vocab = _load_vocabs(config)
    table = convert(source_table, mapping, target_vocab)
    out = _out_dir(config) / ARTIFACTS["embeddings"]
    write_embeddings(table, out)
    return [out]


def cmd_report(config: dict, threads: int = 1) -> list[Path]:
    mapping_path = _out_dir(config) / ARTIFACTS["mapping"]
    if not mapping_path.exists():
        raise ValidationError(f"mapping artifact missing, run map first: {mapping_path}")
    mapping = load_mapping(mapping_path)
    source_vocab, target_vocab = _load_vocabs(config)
    stats = summarize(mapping, target_vocab, source_vocab)
    examples = render_examples(
        mapping, target_vocab, source_vocab,
        n_per_case=config.get("report", {}).get("examples_per_case", 4),
        seed=config["seed"],
    )
    out_dir = _out_dir(config)
    outputs = []
    payload = stats.to_json_dict()
    table_path = out_dir / ARTIFACTS["embeddings"]
    if table_path.exists():
        payload["table_check"] = verify(
            read_embeddings(table_path, _require(config, "target_convention")))
    for name, text in (
        ("report_json", json.dumps(payload, indent=2, sort_keys=True) + "\n"),
        ("report_md", examples),
        ("report_tsv", stats_tsv(stats)),
    ):
        path = out_dir / ARTIFACTS[name]
        path.write_text(text, encoding="utf-8")
        outputs.append(path)
    return outputs


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def cmd_pipeline(config: dict, threads: int = 1) -> list[Path]:
    artifacts: list[Path] = []
    for step in (cmd_symmetrize, cmd_train_subword, cmd_map, cmd_convert, cmd_report):
        artifacts.extend(step(config, threads))
    inputs = {}
    for f in _INPUT_FIELDS:
        inputs[f] = _sha256(_path(config, f))
    sidecar_spec = config.get("mapper", {}).get("sidecar")
    if sidecar_spec:
        inputs["sidecar"] = _sha256(Path(config["_dir"]) / sidecar_spec)
    manifest = {
        "version": __version__,
        "config": {k: v for k, v in config.items() if not k.startswith("_")},
        "inputs": inputs,
        "artifacts": {p.name: _sha256(p) for p in artifacts},
    }
    manifest_path = _out_dir(config) / MANIFEST
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return artifacts + [manifest_path]


_COMMANDS = {
    "symmetrize": cmd_symmetrize,
    "train-subword": cmd_train_subword,
    "map": cmd_map,
    "convert": cmd_convert,
    "report": cmd_report,
    "pipeline": cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tokmap",
        description="Convert a model's token embedding table to a new tokenizer.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        outputs = _COMMANDS[args.command](config, threads=args.threads)
    except TokmapError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc)}), file=sys.stderr)
        return 2
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
