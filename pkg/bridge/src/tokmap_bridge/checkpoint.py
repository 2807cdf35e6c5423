"""Move token-embedding tables between transformer checkpoints and the
exchange format.

Works at the state-dict level (safetensors or legacy .bin), so no model
class has to be instantiated.  Only the token-embedding matrix (and the
tied LM head, where one is materialized) crosses the boundary; positional
embeddings, layer norms, and every other parameter stay untouched.
"""

from __future__ import annotations

import json
import shutil
from pathlib import Path

import numpy as np
import torch

from .exchange import read_exchange, read_vocab, write_exchange, write_vocab

SAFETENSORS_FILE = "model.safetensors"
PYTORCH_FILE = "pytorch_model.bin"

# common names of the token-embedding matrix across architectures
EMBEDDING_SUFFIXES = (
    "embeddings.word_embeddings.weight",   # BERT / RoBERTa / CamemBERT
    "wte.weight",                          # GPT-2
    "embed_tokens.weight",                 # OPT / LLaMA / mBART
    "shared.weight",                       # T5
    "word_embedding.weight",               # XLNet
)

# output-projection weights that may be tied to the embedding matrix
HEAD_SUFFIXES = (
    "cls.predictions.decoder.weight",
    "lm_head.decoder.weight",
    "lm_head.weight",
)

# vocab-sized bias vectors attached to prediction heads
BIAS_SUFFIXES = (
    "cls.predictions.bias",
    "cls.predictions.decoder.bias",
    "lm_head.bias",
    "lm_head.decoder.bias",
)


class CheckpointError(RuntimeError):
    pass


def _weights_file(checkpoint_dir: Path) -> Path:
    for name in (SAFETENSORS_FILE, PYTORCH_FILE):
        path = checkpoint_dir / name
        if path.exists():
            return path
    raise CheckpointError(f"no weights file in {checkpoint_dir} "
                          f"(expected {SAFETENSORS_FILE} or {PYTORCH_FILE})")


def load_state_dict(checkpoint_dir) -> dict[str, torch.Tensor]:
    path = _weights_file(Path(checkpoint_dir))
    if path.name == SAFETENSORS_FILE:
        from safetensors.torch import load_file
        return load_file(str(path))
    return torch.load(path, map_location="cpu", weights_only=True)


def save_state_dict(state: dict[str, torch.Tensor], checkpoint_dir,
                    as_safetensors: bool) -> Path:
    checkpoint_dir = Path(checkpoint_dir)
    if as_safetensors:
        from safetensors.torch import save_file
        path = checkpoint_dir / SAFETENSORS_FILE
        save_file({k: v.contiguous() for k, v in state.items()}, str(path))
    else:
        path = checkpoint_dir / PYTORCH_FILE
        torch.save(state, path)
    return path


def _find_by_suffix(state: dict, suffixes: tuple[str, ...]) -> list[str]:
    hits = []
    for suffix in suffixes:
        hits.extend(k for k in state if k.endswith(suffix) and k not in hits)
    return hits


def find_embedding_key(state: dict[str, torch.Tensor]) -> str:
    hits = _find_by_suffix(state, EMBEDDING_SUFFIXES)
    # tied architectures may expose the same matrix under several names
    hits = [k for k in hits if state[k].ndim == 2]
    if not hits:
        raise CheckpointError(
            "missing embedding tensor: no state-dict key matches "
            + ", ".join(EMBEDDING_SUFFIXES))
    first = state[hits[0]]
    for other in hits[1:]:
        if not torch.equal(state[other], first):
            raise CheckpointError(
                f"ambiguous embedding tensors with different values: {hits}")
    return hits[0]


def load_checkpoint_vocab(checkpoint_dir) -> list[str]:
    checkpoint_dir = Path(checkpoint_dir)
    txt = checkpoint_dir / "vocab.txt"
    if txt.exists():
        return read_vocab(txt)
    js = checkpoint_dir / "vocab.json"
    if js.exists():
        mapping = json.loads(js.read_text(encoding="utf-8"))
        return [tok for tok, _ in sorted(mapping.items(), key=lambda kv: kv[1])]
    tok = checkpoint_dir / "tokenizer.json"
    if tok.exists():
        payload = json.loads(tok.read_text(encoding="utf-8"))
        vocab = payload.get("model", {}).get("vocab")
        if isinstance(vocab, dict):
            return [t for t, _ in sorted(vocab.items(), key=lambda kv: kv[1])]
        if isinstance(vocab, list):  # sentencepiece-style [token, score] rows
            return [row[0] for row in vocab]
    raise CheckpointError(
        f"no tokenizer vocabulary found in {checkpoint_dir} "
        "(looked for vocab.txt, vocab.json, tokenizer.json)")


def export_embeddings(checkpoint_dir, embeddings_out, vocab_out) -> dict:
    """Write the checkpoint's token embeddings and vocab as exchange files."""
    state = load_state_dict(checkpoint_dir)
    key = find_embedding_key(state)
    matrix = state[key].detach().to(torch.float32).cpu().numpy()
    tokens = load_checkpoint_vocab(checkpoint_dir)
    if matrix.shape[0] != len(tokens):
        raise CheckpointError(
            f"vocab/matrix size mismatch: {len(tokens)} tokens vs "
            f"{matrix.shape[0]} embedding rows")
    write_exchange(tokens, matrix, embeddings_out)
    write_vocab(tokens, vocab_out)
    return {"embedding_key": key, "vocab_size": len(tokens),
            "dim": int(matrix.shape[1])}


def _head_state(state: dict, embedding_key: str):
    """Locate the LM-head weight and decide whether it is tied.

    Returns (head_key, tied).  A head with values different from the
    embedding matrix is untied; replacing it silently would change model
    behavior, so that case is reported as an error instead of guessed at.
    """
    old = state[embedding_key]
    candidates = [k for k in _find_by_suffix(state, HEAD_SUFFIXES)
                  if k != embedding_key and state[k].shape == old.shape]
    if not candidates:
        return None, True  # head not materialized; tied implicitly on load
    head_key = candidates[0]
    if torch.equal(state[head_key], old):
        return head_key, True
    raise CheckpointError(
        f"untied LM head {head_key!r}: its weights differ from the "
        "embedding matrix; refusing to guess which to replace")


def import_embeddings(checkpoint_dir, embeddings_path, out_dir) -> dict:
    """Write a copy of the checkpoint with its embedding table replaced.

    The new vocabulary is taken from the exchange file; tied LM-head
    weights follow the embedding matrix, vocab-sized head biases are
    resized (zero-filled for new tokens), and everything else is copied
    bit for bit.
    """
    checkpoint_dir = Path(checkpoint_dir)
    out_dir = Path(out_dir)
    tokens, matrix = read_exchange(embeddings_path)
    state = load_state_dict(checkpoint_dir)
    key = find_embedding_key(state)
    old = state[key]
    if matrix.shape[1] != old.shape[1]:
        raise CheckpointError(
            f"dimension mismatch: exchange table is {matrix.shape[1]}-d, "
            f"model hidden size is {old.shape[1]}")
    head_key, tied = _head_state(state, key)

    new_tensor = torch.from_numpy(np.ascontiguousarray(matrix)).to(old.dtype)
    old_vocab = old.shape[0]
    state[key] = new_tensor
    if head_key is not None:
        state[head_key] = new_tensor.clone()

    resized = []
    if len(tokens) != old_vocab:
        for bias_key in _find_by_suffix(state, BIAS_SUFFIXES):
            bias = state[bias_key]
            if bias.ndim == 1 and bias.shape[0] == old_vocab:
                fresh = torch.zeros(len(tokens), dtype=bias.dtype)
                fresh[: min(old_vocab, len(tokens))] = bias[: min(old_vocab, len(tokens))]
                state[bias_key] = fresh
                resized.append(bias_key)

    out_dir.mkdir(parents=True, exist_ok=True)
    weights_name = _weights_file(checkpoint_dir).name
    for item in checkpoint_dir.iterdir():
        if item.is_file() and item.name not in (weights_name, "config.json",
                                                "vocab.txt"):
            shutil.copy2(item, out_dir / item.name)
    config_path = checkpoint_dir / "config.json"
    if config_path.exists():
        config = json.loads(config_path.read_text(encoding="utf-8"))
        config["vocab_size"] = len(tokens)
        (out_dir / "config.json").write_text(
            json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    write_vocab(tokens, out_dir / "vocab.txt")
    save_state_dict(state, out_dir, as_safetensors=weights_name == SAFETENSORS_FILE)
    return {
        "embedding_key": key,
        "head_key": head_key,
        "tied": tied,
        "vocab_size": len(tokens),
        "dim": int(matrix.shape[1]),
        "resized_biases": resized,
    }
