"""Tokenizer vocabularies, token classification, and the embedding exchange format.

Different tokenizer families mark word boundaries differently (``##`` for
continuations, leading ``Ġ`` or ``▁`` for word starts).  Tokens are
normalized to a (core_text, position) pair so equality can be tested across
conventions.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParseError, ValidationError

_TABLE_MAGIC = b"T2TEMB01"

WORDPIECE = "wordpiece"
BPE_BYTE = "bpe_byte"
SENTENCEPIECE = "sentencepiece"
PLAIN = "plain"
CONVENTIONS = (WORDPIECE, BPE_BYTE, SENTENCEPIECE, PLAIN)

WORD_INITIAL = "word_initial"
CONTINUATION = "continuation"

ROLES = ("unk", "pad", "cls", "sep", "mask")

# role -> accepted surface strings, checked by exact match
DEFAULT_ROLE_TABLE: dict[str, tuple[str, ...]] = {
    "unk": ("[UNK]", "<unk>"),
    "pad": ("[PAD]", "<pad>"),
    "cls": ("[CLS]", "<s>"),
    "sep": ("[SEP]", "</s>"),
    "mask": ("[MASK]", "<mask>"),
}


@dataclass(frozen=True)
class TokenShape:
    token_id: int
    core_text: str
    position: str           # word_initial | continuation
    alphabetic: bool        # core contains at least one Unicode letter
    special: bool = False


def classify_token(token: str, convention: str, token_id: int = -1,
                   special: bool = False) -> TokenShape:
    """Strip the convention's subword marker and classify the token."""
    if convention == WORDPIECE:
        if token.startswith("##"):
            core, position = token[2:], CONTINUATION
        else:
            core, position = token, WORD_INITIAL
    elif convention == BPE_BYTE:
        if token.startswith("Ġ"):
            core, position = token[1:], WORD_INITIAL
        else:
            core, position = token, CONTINUATION
    elif convention == SENTENCEPIECE:
        if token.startswith("▁"):
            core, position = token[1:], WORD_INITIAL
        else:
            core, position = token, CONTINUATION
    elif convention == PLAIN:
        core, position = token, WORD_INITIAL
    else:
        raise ValidationError(f"unknown tokenizer convention: {convention!r}")
    alphabetic = any(ch.isalpha() for ch in core)
    return TokenShape(token_id=token_id, core_text=core, position=position,
                      alphabetic=alphabetic, special=special)


@dataclass
class Vocabulary:
    """Dense token list (index = token id) plus detected special roles."""

    tokens: list[str]
    convention: str = PLAIN
    special_tokens: dict[str, str] = field(default_factory=dict)
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValidationError(f"unknown tokenizer convention: {self.convention!r}")
        if not self.tokens:
            raise ValidationError("vocabulary is empty")
        if self._index is None:
            self._index = {}
            for i, tok in enumerate(self.tokens):
                if tok in self._index:
                    raise ValidationError(f"duplicate token: {tok!r}")
                self._index[tok] = i
        if "unk" not in self.special_tokens:
            raise ValidationError("vocabulary has no unk token")
        for role, tok in self.special_tokens.items():
            if tok not in self._index:
                raise ValidationError(f"special token for role {role!r} not in vocab: {tok!r}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def token_id(self, token: str) -> int:
        return self._index[token]

    @property
    def unk_id(self) -> int:
        return self._index[self.special_tokens["unk"]]

    def role_id(self, role: str) -> int | None:
        tok = self.special_tokens.get(role)
        return None if tok is None else self._index[tok]

    def shape(self, token_id: int) -> TokenShape:
        token = self.tokens[token_id]
        special = token in self.special_tokens.values()
        return classify_token(token, self.convention, token_id=token_id,
                              special=special)

    def shapes(self) -> list[TokenShape]:
        return [self.shape(i) for i in range(len(self.tokens))]


def detect_special_tokens(tokens: list[str],
                          role_table: dict[str, tuple[str, ...]] | None = None,
                          ) -> dict[str, str]:
    role_table = DEFAULT_ROLE_TABLE if role_table is None else role_table
    token_set = set(tokens)
    found = {}
    for role, surfaces in role_table.items():
        for surface in surfaces:
            if surface in token_set:
                found[role] = surface
                break
    return found


def load_vocab(path, convention: str,
               role_table: dict[str, tuple[str, ...]] | None = None) -> Vocabulary:
    """Load a vocabulary from one-token-per-line text or a JSON token->id object.

    JSON ids must be dense 0..n-1.  Special tokens are detected by exact
    match against the role table; a vocabulary without an unk token is
    rejected.
    """
    with open(path, encoding="utf-8") as fh:
        content = fh.read()
    stripped = content.lstrip()
    if stripped.startswith("{"):
        mapping = json.loads(content)
        if not isinstance(mapping, dict):
            raise ParseError("JSON vocabulary must be an object", path=str(path))
        ids = sorted(mapping.values())
        if ids != list(range(len(mapping))):
            raise ValidationError(f"{path}: token ids are not dense 0..{len(mapping) - 1}")
        tokens = [tok for tok, _ in sorted(mapping.items(), key=lambda kv: kv[1])]
    else:
        tokens = []
        for lineno, line in enumerate(content.splitlines(), start=1):
            if line == "":
                continue
            tokens.append(line)
    specials = detect_special_tokens(tokens, role_table)
    return Vocabulary(tokens=tokens, convention=convention, special_tokens=specials)


@dataclass
class EmbeddingTable:
    """A vocabulary with one f32 embedding row per token."""

    vocab: Vocabulary
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float32)
        if self.matrix.ndim != 2:
            raise ValidationError("embedding matrix must be 2-D")
        if self.matrix.shape[0] != len(self.vocab):
            raise ValidationError(
                f"matrix has {self.matrix.shape[0]} rows for {len(self.vocab)} tokens")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def write_embeddings(table: EmbeddingTable, path) -> None:
    """Write the self-describing exchange file (magic, sizes, vocab, f32 rows)."""
    bad = ~np.isfinite(table.matrix)
    if bad.any():
        row = int(np.where(bad.any(axis=1))[0][0])
        raise ValidationError(
            f"non-finite embedding for token {table.vocab.tokens[row]!r} (row {row})")
    with open(path, "wb") as fh:
        fh.write(_TABLE_MAGIC)
        fh.write(struct.pack("<II", len(table.vocab), table.dim))
        for token in table.vocab.tokens:
            encoded = token.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
        fh.write(np.ascontiguousarray(table.matrix, dtype="<f4").tobytes())


def read_embeddings(path, convention: str = PLAIN,
                    role_table: dict[str, tuple[str, ...]] | None = None,
                    ) -> EmbeddingTable:
    """Read an exchange file; special roles are re-detected from the role table."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _TABLE_MAGIC:
            raise FormatError(f"bad embedding-table magic: {magic!r}")
        vocab_size, dim = struct.unpack("<II", fh.read(8))
        if vocab_size == 0:
            raise FormatError("embedding table with empty vocabulary")
        if dim == 0:
            raise FormatError("embedding table with zero dimension")
        tokens = []
        for _ in range(vocab_size):
            (length,) = struct.unpack("<I", fh.read(4))
            tokens.append(fh.read(length).decode("utf-8"))
        data = fh.read(vocab_size * dim * 4)
        if len(data) != vocab_size * dim * 4:
            raise FormatError("truncated embedding matrix")
        if fh.read(1):
            raise FormatError("trailing bytes after embedding matrix")
    matrix = np.frombuffer(data, dtype="<f4").reshape(vocab_size, dim).copy()
    specials = detect_special_tokens(tokens, role_table)
    vocab = Vocabulary(tokens=tokens, convention=convention, special_tokens=specials)
    return EmbeddingTable(vocab=vocab, matrix=matrix)
