import json

import pytest
import torch


def handcrafted_checkpoint(out_dir, vocab_size=32, hidden=12,
                           as_safetensors=False, tied_head=True,
                           untied_head=False, seed=0):
    """A minimal BERT-shaped checkpoint directory built by hand."""
    out_dir.mkdir(parents=True, exist_ok=True)
    gen = torch.Generator().manual_seed(seed)
    emb = torch.randn(vocab_size, hidden, generator=gen)
    state = {
        "bert.embeddings.word_embeddings.weight": emb,
        "bert.embeddings.position_embeddings.weight": torch.randn(16, hidden, generator=gen),
        "bert.encoder.layer.0.attention.self.query.weight": torch.randn(hidden, hidden, generator=gen),
        "bert.encoder.layer.0.attention.self.query.bias": torch.randn(hidden, generator=gen),
        "cls.predictions.bias": torch.randn(vocab_size, generator=gen),
    }
    if tied_head:
        state["cls.predictions.decoder.weight"] = emb.clone()
    if untied_head:
        state["cls.predictions.decoder.weight"] = torch.randn(
            vocab_size, hidden, generator=gen)
    if as_safetensors:
        from safetensors.torch import save_file
        save_file({k: v.contiguous() for k, v in state.items()},
                  str(out_dir / "model.safetensors"))
    else:
        torch.save(state, out_dir / "pytorch_model.bin")
    (out_dir / "config.json").write_text(json.dumps({
        "model_type": "bert",
        "vocab_size": vocab_size,
        "hidden_size": hidden,
        "tie_word_embeddings": True,
    }, indent=2))
    tokens = ["[UNK]", "[PAD]", "[CLS]", "[SEP]", "[MASK]"]
    tokens += [f"tok{i}" for i in range(vocab_size - len(tokens))]
    (out_dir / "vocab.txt").write_text("\n".join(tokens) + "\n", encoding="utf-8")
    return state, tokens


@pytest.fixture
def bert_like(tmp_path):
    ckpt = tmp_path / "ckpt"
    state, tokens = handcrafted_checkpoint(ckpt)
    return ckpt, state, tokens


@pytest.fixture(scope="session")
def tiny_transformers_checkpoint(tmp_path_factory):
    """A genuine tiny BertForMaskedLM checkpoint written by transformers."""
    transformers = pytest.importorskip("transformers")
    out = tmp_path_factory.mktemp("hf") / "tiny-bert"
    config = transformers.BertConfig(
        vocab_size=64, hidden_size=16, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=32,
        max_position_embeddings=32)
    torch.manual_seed(0)
    model = transformers.BertForMaskedLM(config)
    model.save_pretrained(out)
    tokens = ["[UNK]", "[PAD]", "[CLS]", "[SEP]", "[MASK]"]
    tokens += [f"w{i}" for i in range(64 - len(tokens))]
    (out / "vocab.txt").write_text("\n".join(tokens) + "\n", encoding="utf-8")
    return out, tokens
