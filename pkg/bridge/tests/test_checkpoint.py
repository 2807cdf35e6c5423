import json

import numpy as np
import pytest
import torch

from conftest import handcrafted_checkpoint
from tokmap_bridge.checkpoint import (
    CheckpointError,
    export_embeddings,
    find_embedding_key,
    import_embeddings,
    load_checkpoint_vocab,
    load_state_dict,
)
from tokmap_bridge.exchange import read_exchange, write_exchange


class TestExport:
    def test_export_matches_state_dict(self, bert_like, tmp_path):
        ckpt, state, tokens = bert_like
        summary = export_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "v.txt")
        assert summary["embedding_key"] == "bert.embeddings.word_embeddings.weight"
        back_tokens, matrix = read_exchange(tmp_path / "e.emb")
        assert back_tokens == tokens
        expected = state["bert.embeddings.word_embeddings.weight"].numpy()
        assert np.array_equal(matrix, expected)

    def test_vocab_matrix_mismatch(self, tmp_path):
        ckpt = tmp_path / "bad"
        handcrafted_checkpoint(ckpt, vocab_size=32)
        (ckpt / "vocab.txt").write_text("\n".join(f"t{i}" for i in range(31)) + "\n")
        with pytest.raises(CheckpointError, match="mismatch"):
            export_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "v.txt")

    def test_missing_embedding_tensor(self, tmp_path):
        ckpt = tmp_path / "noemb"
        ckpt.mkdir()
        torch.save({"some.layer.weight": torch.zeros(3, 3)},
                   ckpt / "pytorch_model.bin")
        (ckpt / "vocab.txt").write_text("a\nb\nc\n")
        with pytest.raises(CheckpointError, match="missing embedding tensor"):
            export_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "v.txt")

    def test_safetensors_checkpoint(self, tmp_path):
        ckpt = tmp_path / "st"
        state, tokens = handcrafted_checkpoint(ckpt, as_safetensors=True)
        summary = export_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "v.txt")
        assert summary["vocab_size"] == len(tokens)


class TestVocabSources:
    def test_vocab_json(self, tmp_path):
        ckpt = tmp_path / "vj"
        handcrafted_checkpoint(ckpt, vocab_size=4)
        (ckpt / "vocab.txt").unlink()
        (ckpt / "vocab.json").write_text(json.dumps({"d": 3, "a": 0, "c": 2, "b": 1}))
        assert load_checkpoint_vocab(ckpt) == ["a", "b", "c", "d"]

    def test_tokenizer_json(self, tmp_path):
        ckpt = tmp_path / "tj"
        handcrafted_checkpoint(ckpt, vocab_size=3)
        (ckpt / "vocab.txt").unlink()
        (ckpt / "tokenizer.json").write_text(json.dumps(
            {"model": {"vocab": {"x": 0, "y": 1, "z": 2}}}))
        assert load_checkpoint_vocab(ckpt) == ["x", "y", "z"]

    def test_no_vocab(self, tmp_path):
        ckpt = tmp_path / "nv"
        handcrafted_checkpoint(ckpt)
        (ckpt / "vocab.txt").unlink()
        with pytest.raises(CheckpointError, match="vocabulary"):
            load_checkpoint_vocab(ckpt)


class TestImport:
    def test_identity_roundtrip(self, bert_like, tmp_path):
        ckpt, state, _ = bert_like
        export_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "v.txt")
        summary = import_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "back")
        assert summary["tied"]
        new_state = load_state_dict(tmp_path / "back")
        for key, tensor in state.items():
            assert torch.equal(new_state[key], tensor), key

    def test_dimension_mismatch(self, bert_like, tmp_path):
        ckpt, _, tokens = bert_like
        write_exchange(tokens, np.zeros((len(tokens), 64), np.float32),
                       tmp_path / "wide.emb")
        with pytest.raises(CheckpointError, match="dimension"):
            import_embeddings(ckpt, tmp_path / "wide.emb", tmp_path / "o")

    def test_untied_head_reported(self, tmp_path):
        ckpt = tmp_path / "untied"
        _, tokens = handcrafted_checkpoint(ckpt, tied_head=False, untied_head=True)
        write_exchange(tokens, np.zeros((len(tokens), 12), np.float32),
                       tmp_path / "e.emb")
        with pytest.raises(CheckpointError, match="untied"):
            import_embeddings(ckpt, tmp_path / "e.emb", tmp_path / "o")

    def test_vocab_resize_updates_config_and_bias(self, bert_like, tmp_path):
        ckpt, state, _ = bert_like
        new_tokens = [f"n{i}" for i in range(40)]
        rng = np.random.default_rng(1)
        write_exchange(new_tokens, rng.normal(size=(40, 12)).astype(np.float32),
                       tmp_path / "grown.emb")
        summary = import_embeddings(ckpt, tmp_path / "grown.emb", tmp_path / "o")
        assert summary["vocab_size"] == 40
        assert "cls.predictions.bias" in summary["resized_biases"]
        new_state = load_state_dict(tmp_path / "o")
        assert new_state["bert.embeddings.word_embeddings.weight"].shape == (40, 12)
        bias = new_state["cls.predictions.bias"]
        assert bias.shape == (40,)
        assert torch.equal(bias[:32], state["cls.predictions.bias"])
        assert torch.all(bias[32:] == 0)
        config = json.loads((tmp_path / "o" / "config.json").read_text())
        assert config["vocab_size"] == 40
        assert load_checkpoint_vocab(tmp_path / "o") == new_tokens

    def test_other_parameters_untouched(self, bert_like, tmp_path):
        ckpt, state, tokens = bert_like
        rng = np.random.default_rng(2)
        write_exchange(tokens, rng.normal(size=(len(tokens), 12)).astype(np.float32),
                       tmp_path / "new.emb")
        import_embeddings(ckpt, tmp_path / "new.emb", tmp_path / "o")
        new_state = load_state_dict(tmp_path / "o")
        for key in ("bert.embeddings.position_embeddings.weight",
                    "bert.encoder.layer.0.attention.self.query.weight",
                    "bert.encoder.layer.0.attention.self.query.bias"):
            assert torch.equal(new_state[key], state[key])
        assert not torch.equal(new_state["bert.embeddings.word_embeddings.weight"],
                               state["bert.embeddings.word_embeddings.weight"])


class TestFindEmbeddingKey:
    def test_equal_aliases_allowed(self):
        emb = torch.randn(4, 3)
        state = {"shared.weight": emb, "decoder.embed_tokens.weight": emb.clone()}
        assert find_embedding_key(state) in state

    def test_conflicting_aliases_rejected(self):
        state = {"shared.weight": torch.randn(4, 3),
                 "decoder.embed_tokens.weight": torch.randn(4, 3)}
        with pytest.raises(CheckpointError, match="ambiguous"):
            find_embedding_key(state)
