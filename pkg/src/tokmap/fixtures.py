"""Synthetic fixtures: random dictionaries and a small end-to-end setup.

Used by the test suite and the demo scripts; everything is seeded so
fixtures are reproducible byte for byte.
"""

from __future__ import annotations

import json
import random
import string
from pathlib import Path

import numpy as np

from .dictionary import DictEntry
from .vocab_io import (
    EmbeddingTable,
    Vocabulary,
    detect_special_tokens,
    write_embeddings,
)

_LETTERS = string.ascii_lowercase


def _random_word(rng: random.Random, min_len: int = 5, max_len: int = 10) -> str:
    return "".join(rng.choice(_LETTERS) for _ in range(rng.randint(min_len, max_len)))


def make_random_dictionary(n_pairs: int, rng: random.Random,
                           min_len: int = 5, max_len: int = 10,
                           freq_range: tuple[int, int] = (20, 120),
                           ) -> list[DictEntry]:
    """Random word pairs with subtitle-style occurrence frequencies."""
    pairs: list[DictEntry] = []
    seen: set[str] = set()
    while len(pairs) < n_pairs:
        source = _random_word(rng, min_len, max_len)
        target = _random_word(rng, min_len, max_len)
        if source in seen or target in seen or source == target:
            continue
        seen.update((source, target))
        pairs.append(DictEntry(source, target, rng.randint(*freq_range)))
    return pairs


def make_morphological_dictionary(rng: random.Random, n_stems: int = 10,
                                  n_suffixes: int = 5, stem_len: int = 5,
                                  suffix_len: int = 4,
                                  freq_range: tuple[int, int] = (20, 120)):
    """Stem+suffix words, translated cell by cell.

    Returns (entries_by_cell, cells) where cell (i, j) pairs source stem i
    + suffix j with target stem i + suffix j.  Held-out cells still share
    stems and suffixes with the rest, which is what lets character n-grams
    generalize to them.
    """
    def pieces(count: int, length: int) -> list[str]:
        out: list[str] = []
        while len(out) < count:
            piece = "".join(rng.choice(_LETTERS) for _ in range(length))
            if piece not in out:
                out.append(piece)
        return out

    source_stems = pieces(n_stems, stem_len)
    source_sufs = pieces(n_suffixes, suffix_len)
    target_stems = pieces(n_stems, stem_len)
    target_sufs = pieces(n_suffixes, suffix_len)
    cells = [(i, j) for i in range(n_stems) for j in range(n_suffixes)]
    entries = {
        (i, j): DictEntry(source_stems[i] + source_sufs[j],
                          target_stems[i] + target_sufs[j],
                          rng.randint(*freq_range))
        for i, j in cells
    }
    return entries, cells


_PUNCTUATION = [".", ",", "!", "?", "-", "(", ")", ":", ";", "'", '"', "&", "%", "/"]
_DIGITS = [str(d) for d in range(10)]

SOURCE_SPECIALS = ["[UNK]", "[PAD]", "[CLS]", "[SEP]", "[MASK]"]
TARGET_SPECIALS = ["<unk>", "<pad>", "<s>", "</s>", "<mask>"]


def build_toy_vocabs(entries: list[DictEntry], rng: random.Random,
                     size: int = 200) -> tuple[Vocabulary, Vocabulary]:
    """A wordpiece source vocabulary and a sentencepiece target vocabulary.

    Both contain the dictionary words of their side, shared punctuation
    and digits, some continuation pieces, and random filler, padded to
    ``size`` tokens.
    """
    def fill(tokens: list[str], make_filler) -> list[str]:
        seen = set(tokens)
        while len(tokens) < size:
            tok = make_filler()
            if tok not in seen:
                seen.add(tok)
                tokens.append(tok)
        return tokens[:size]

    source = SOURCE_SPECIALS + _PUNCTUATION + _DIGITS
    source += [e.source_word for e in entries]
    source += ["##" + e.source_word[-3:] for e in entries[: size // 10]
               if "##" + e.source_word[-3:] not in source]

    def source_filler():
        if rng.random() < 0.4:
            return "##" + _random_word(rng, 2, 5)
        return _random_word(rng, 3, 9)

    source_tokens = fill(list(dict.fromkeys(source)), source_filler)

    target = TARGET_SPECIALS + _PUNCTUATION + _DIGITS
    target += ["▁" + e.target_word for e in entries]
    target += [e.target_word[-3:] for e in entries[: size // 10]]

    def target_filler():
        if rng.random() < 0.4:
            return _random_word(rng, 2, 5)
        return "▁" + _random_word(rng, 3, 9)

    target_tokens = fill(list(dict.fromkeys(target)), target_filler)

    source_vocab = Vocabulary(source_tokens, convention="wordpiece",
                              special_tokens=detect_special_tokens(source_tokens))
    target_vocab = Vocabulary(target_tokens, convention="sentencepiece",
                              special_tokens=detect_special_tokens(target_tokens))
    return source_vocab, target_vocab


def build_toy_fixture(out_dir, seed: int = 42, n_pairs: int = 50,
                      vocab_size: int = 200, dim: int = 16) -> dict[str, Path]:
    """Write a complete pipeline fixture into ``out_dir``.

    Contents: a 50-pair dictionary TSV, a wordpiece source vocab (text),
    a sentencepiece target vocab (JSON), a random source embedding table,
    and a ready-to-run pipeline config.  Returns the path of every file.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    entries = make_random_dictionary(n_pairs, rng)

    dict_path = out / "dictionary.tsv"
    with open(dict_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# toy bilingual dictionary\n")
        for e in entries:
            fh.write(f"{e.source_word}\t{e.target_word}\t{e.frequency}\n")

    source_vocab, target_vocab = build_toy_vocabs(entries, rng, size=vocab_size)

    source_vocab_path = out / "source_vocab.txt"
    source_vocab_path.write_text(
        "\n".join(source_vocab.tokens) + "\n", encoding="utf-8")

    target_vocab_path = out / "target_vocab.json"
    target_vocab_path.write_text(
        json.dumps({tok: i for i, tok in enumerate(target_vocab.tokens)},
                   ensure_ascii=False, indent=0) + "\n",
        encoding="utf-8")

    np_rng = np.random.default_rng(seed)
    matrix = np_rng.standard_normal((len(source_vocab), dim)).astype(np.float32)
    emb_path = out / "source_embeddings.emb"
    write_embeddings(EmbeddingTable(vocab=source_vocab, matrix=matrix), emb_path)

    config = {
        "seed": seed,
        "dictionary": "dictionary.tsv",
        "source_vocab": "source_vocab.txt",
        "source_convention": "wordpiece",
        "source_embeddings": "source_embeddings.emb",
        "target_vocab": "target_vocab.json",
        "target_convention": "sentencepiece",
        "output_dir": "out",
        "corpus": {"augment_compounds": True, "frequency_weighted": True},
        "subword": {"dim": 32, "bucket_count": 20000, "epochs": 5},
        "mapper": {"k_max": 5, "k": 3},
        "report": {"examples_per_case": 4},
    }
    config_path = out / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")

    return {
        "dictionary": dict_path,
        "source_vocab": source_vocab_path,
        "target_vocab": target_vocab_path,
        "source_embeddings": emb_path,
        "config": config_path,
    }
