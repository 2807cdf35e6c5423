"""Acceptance criteria for the bridge: identity round-trip on a real
checkpoint (tied head included) and golden finetuning configs."""

import json
from pathlib import Path

import numpy as np
import pytest
import torch

from tokmap_bridge.checkpoint import export_embeddings, import_embeddings
from tokmap_bridge.exchange import read_exchange
from tokmap_bridge.finetune_configs import emit_finetune_configs

GOLDEN = Path(__file__).parent / "golden"


def _pass(name):
    print(f"ACCEPTANCE PASS: {name}")


def test_bridge_identity_on_f32_checkpoint(tiny_transformers_checkpoint, tmp_path):
    transformers = pytest.importorskip("transformers")
    ckpt, tokens = tiny_transformers_checkpoint

    emb_file = tmp_path / "exported.emb"
    summary = export_embeddings(ckpt, emb_file, tmp_path / "vocab.txt")
    assert summary["vocab_size"] == len(tokens) == 64

    out_dir = tmp_path / "imported"
    result = import_embeddings(ckpt, emb_file, out_dir)
    assert result["tied"]

    original = transformers.AutoModelForMaskedLM.from_pretrained(ckpt)
    reloaded = transformers.AutoModelForMaskedLM.from_pretrained(out_dir)
    for (name_a, param_a), (name_b, param_b) in zip(
            original.named_parameters(), reloaded.named_parameters()):
        assert name_a == name_b
        assert torch.equal(param_a, param_b), name_a

    # tied LM-head rows must equal the imported embedding rows
    _, matrix = read_exchange(emb_file)
    head = reloaded.get_output_embeddings().weight.detach().numpy()
    assert np.array_equal(head, matrix)
    emb = reloaded.get_input_embeddings().weight.detach().numpy()
    assert np.array_equal(emb, matrix)
    _pass("export-import is the identity; tied head rows equal embeddings")


def test_fresh_embeddings_flow_through_tied_head(tiny_transformers_checkpoint, tmp_path):
    transformers = pytest.importorskip("transformers")
    ckpt, tokens = tiny_transformers_checkpoint
    from tokmap_bridge.exchange import write_exchange

    rng = np.random.default_rng(3)
    fresh = rng.normal(size=(len(tokens), 16)).astype(np.float32)
    emb_file = tmp_path / "fresh.emb"
    write_exchange(tokens, fresh, emb_file)
    out_dir = tmp_path / "fresh_ckpt"
    import_embeddings(ckpt, emb_file, out_dir)

    reloaded = transformers.AutoModelForMaskedLM.from_pretrained(out_dir)
    assert np.array_equal(reloaded.get_input_embeddings().weight.detach().numpy(), fresh)
    assert np.array_equal(reloaded.get_output_embeddings().weight.detach().numpy(), fresh)
    _pass("replaced embeddings propagate to the tied LM head")


def test_appendix_golden_configs(tmp_path):
    paths = emit_finetune_configs(tmp_path)
    for path in paths:
        assert path.read_bytes() == (GOLDEN / path.name).read_bytes()
    by_phase = {json.loads(p.read_text())["phase"]: json.loads(p.read_text())
                for p in paths}
    assert [by_phase[p]["learning_rate"] for p in ("embedding", "grammatical", "knowledge")] \
        == [5e-5, 5e-5, 2e-5]
    assert [by_phase[p]["warmup_steps"] for p in ("embedding", "grammatical", "knowledge")] \
        == [5000, 1000, 2000]
    assert [by_phase[p]["training_steps"] for p in ("embedding", "grammatical", "knowledge")] \
        == [150000, 25000, 25000]
    assert [by_phase[p]["total_batch_size"] for p in ("embedding", "grammatical", "knowledge")] \
        == [32, 256, 256]
    _pass("three-phase finetuning configs match the golden files field-for-field")


def test_exported_file_readable_by_primary_toolkit(tiny_transformers_checkpoint, tmp_path):
    tokmap = pytest.importorskip("tokmap")
    ckpt, tokens = tiny_transformers_checkpoint
    emb_file = tmp_path / "exported.emb"
    export_embeddings(ckpt, emb_file, tmp_path / "vocab.txt")
    table = tokmap.read_embeddings(emb_file, "wordpiece")
    assert table.vocab.tokens == tokens
    assert table.matrix.shape == (64, 16)
    assert table.vocab.special_tokens["unk"] == "[UNK]"
    _pass("exported exchange file reads back through the primary toolkit")
