"""Map every target-tokenizer token onto weighted source-tokenizer tokens.

Resolution order per target token: special role, shared non-alphabetic
token, dictionary translation, character n-gram nearest neighbors.  Every
token receives at least one candidate; the unknown-token embedding is the
fallback of last resort, so no target token is ever left to random
initialization.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dictionary import SOURCE, TARGET, DictEntry, TagScheme, DEFAULT_TAGS
from .errors import ParseError, ValidationError
from .subword import CandidateIndex, SubwordModel, nearest_neighbors
from .vocab_io import CONTINUATION, ROLES, TokenShape, Vocabulary, WORD_INITIAL

SHARED_EXACT = "shared_exact"
DICTIONARY = "dictionary"
DICTIONARY_FIRST_TOKEN = "dictionary_first_token_fallback"
SUBWORD_FASTTEXT = "subword_fasttext"
SPECIAL_ROLE = "special_role"
UNK_FALLBACK = "unk_fallback"

CASES = (SPECIAL_ROLE, SHARED_EXACT, DICTIONARY, SUBWORD_FASTTEXT, UNK_FALLBACK)


@dataclass(frozen=True)
class MatchCandidate:
    source_token_id: int
    weight: float
    provenance: str
    cosine: float | None = None


@dataclass
class TokenMapping:
    """Per-target-token weighted source candidates plus the case taken."""

    candidates: list[list[MatchCandidate]]
    cases: list[str]

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class MapperConfig:
    k_max: int = 5              # dictionary translations kept per word
    k: int = 3                  # cosine neighbors retrieved
    lowercase_retry: bool = True
    tags: TagScheme = DEFAULT_TAGS
    threads: int = 1


def compute_weights(n: int) -> list[float]:
    """Candidate weights: 30% to rank 1, 10% to rank 2, the residual 60%
    split evenly over all n candidates; normalized to sum exactly 1.

    Computed in exact rational arithmetic so the canonical patterns
    ([0.5, 0.3, 0.2] for n=3) come out bit-exact as floats.
    """
    if n < 1:
        raise ValidationError("weight count must be >= 1")
    raw = [
        Fraction(6, 10) / n
        + (Fraction(3, 10) if i == 0 else 0)
        + (Fraction(1, 10) if i == 1 else 0)
        for i in range(n)
    ]
    total = sum(raw)
    return [float(w / total) for w in raw]


def _shared_key_index(source_vocab: Vocabulary) -> dict[tuple[str, str], int]:
    index: dict[tuple[str, str], int] = {}
    for shape in source_vocab.shapes():
        key = (shape.core_text, shape.position)
        index.setdefault(key, shape.token_id)
    return index


def match_shared(shape: TokenShape, source_vocab: Vocabulary,
                 key_index: dict | None = None) -> MatchCandidate:
    """Exact marker-normalized match for a non-alphabetic target token.

    Matching prefers the same (core_text, position) pair, then retries
    with the position flipped: conventions disagree about whether bare
    punctuation is word-initial (wordpiece) or attached (sentencepiece,
    byte BPE), and a shared "." is the same token either way.  Misses
    fall back to the source unk token.
    """
    if key_index is None:
        key_index = _shared_key_index(source_vocab)
    other = CONTINUATION if shape.position == WORD_INITIAL else WORD_INITIAL
    hit = key_index.get((shape.core_text, shape.position))
    if hit is None:
        hit = key_index.get((shape.core_text, other))
    if hit is not None:
        return MatchCandidate(hit, 1.0, SHARED_EXACT)
    return MatchCandidate(source_vocab.unk_id, 1.0, UNK_FALLBACK)


class DictionaryIndex:
    """Target word -> translations (source words with frequencies), plus a
    lowercase view for the case-insensitive retry."""

    def __init__(self, entries: list[DictEntry]):
        self.exact: dict[str, list[tuple[str, int]]] = {}
        self.lower: dict[str, list[tuple[str, int]]] = {}
        for e in entries:
            self.exact.setdefault(e.target_word, []).append((e.source_word, e.frequency))
            self.lower.setdefault(e.target_word.lower(), []).append((e.source_word, e.frequency))

    def translations(self, word: str, lowercase_retry: bool) -> list[tuple[str, int]] | None:
        hit = self.exact.get(word)
        if hit is None and lowercase_retry:
            hit = self.lower.get(word.lower())
        return hit


def _tokenize_tables(source_vocab: Vocabulary):
    initial: dict[str, int] = {}
    continuation: dict[str, int] = {}
    for shape in source_vocab.shapes():
        if shape.special or not shape.core_text:
            continue
        table = initial if shape.position == WORD_INITIAL else continuation
        table.setdefault(shape.core_text, shape.token_id)
    max_len = max((len(c) for c in (*initial, *continuation)), default=0)
    return initial, continuation, max_len


def greedy_tokenize(word: str, source_vocab: Vocabulary,
                    _tables=None) -> list[int]:
    """Longest-match-first split of a word into source token ids.

    The first piece must be word-initial, later pieces continuations; an
    unmatchable position emits unk and advances one code point.
    """
    if not word:
        raise ValidationError("cannot tokenize an empty word")
    initial, continuation, max_len = _tables if _tables else _tokenize_tables(source_vocab)
    unk = source_vocab.unk_id
    ids: list[int] = []
    i = 0
    while i < len(word):
        table = initial if i == 0 else continuation
        match_id = None
        for length in range(min(max_len, len(word) - i), 0, -1):
            match_id = table.get(word[i : i + length])
            if match_id is not None:
                i += length
                break
        if match_id is None:
            ids.append(unk)
            i += 1
        else:
            ids.append(match_id)
    return ids


def match_dictionary(shape: TokenShape, dictionary, source_vocab: Vocabulary,
                     k_max: int = 5, lowercase_retry: bool = True,
                     key_index: dict | None = None, tokenize_tables=None,
                     sidecar: dict[str, list[str]] | None = None,
                     ) -> list[MatchCandidate] | None:
    """Resolve a word-initial alphabetic token through the dictionary.

    Returns None when the core text is not a dictionary target word.
    Translations are sorted by descending frequency and capped at k_max;
    ones with no word-initial source token are resolved to the first token
    of their tokenization by the source tokenizer.
    """
    if not shape.alphabetic or shape.position != WORD_INITIAL:
        return None
    index = dictionary if isinstance(dictionary, DictionaryIndex) else DictionaryIndex(dictionary)
    translations = index.translations(shape.core_text, lowercase_retry)
    if not translations:
        return None
    ranked = sorted(translations, key=lambda st: -st[1])[:k_max]
    if key_index is None:
        key_index = _shared_key_index(source_vocab)
    resolved: list[tuple[int, str]] = []
    for word, _freq in ranked:
        hit = key_index.get((word, WORD_INITIAL))
        if hit is not None:
            resolved.append((hit, DICTIONARY))
            continue
        if sidecar and word in sidecar:
            pieces = sidecar[word]
            first = source_vocab.token_id(pieces[0]) if pieces else source_vocab.unk_id
        else:
            first = greedy_tokenize(word, source_vocab, tokenize_tables)[0]
        resolved.append((first, DICTIONARY_FIRST_TOKEN))
    weights = compute_weights(len(resolved))
    return [MatchCandidate(sid, w, prov)
            for (sid, prov), w in zip(resolved, weights)]


def build_source_index(source_vocab: Vocabulary, model: SubwordModel,
                       tags: TagScheme = DEFAULT_TAGS,
                       ) -> list[tuple[int, np.ndarray]]:
    """Embed every alphabetic, non-special source token for retrieval.

    Word-initial tokens get the source start tag; continuations stay bare
    (a token's word-finality is unknowable, so end tags are never applied
    at query time).  Tokens whose embedding is the zero vector are left
    out, since they cannot be cosine-ranked.
    """
    index = []
    for shape in source_vocab.shapes():
        if shape.special or not shape.alphabetic:
            continue
        text = shape.core_text
        if shape.position == WORD_INITIAL:
            text = tags.start(SOURCE) + text
        vec = model.embed(text)
        if vec.any():
            index.append((shape.token_id, vec))
    return index


def match_subword(shape: TokenShape, model: SubwordModel,
                  source_index: list[tuple[int, np.ndarray]],
                  source_vocab: Vocabulary, k: int = 3,
                  tags: TagScheme = DEFAULT_TAGS) -> list[MatchCandidate]:
    """Top-k cosine neighbors of the token's tagged n-gram embedding."""
    text = shape.core_text
    if shape.position == WORD_INITIAL:
        text = tags.start(TARGET) + text
    query = model.embed(text)
    if not query.any() or not source_index:
        return [MatchCandidate(source_vocab.unk_id, 1.0, UNK_FALLBACK)]
    top = nearest_neighbors(query, source_index, k)
    weights = compute_weights(len(top))
    return [MatchCandidate(sid, w, SUBWORD_FASTTEXT, cosine=cos)
            for (sid, cos), w in zip(top, weights)]


def build_mapping(target_vocab: Vocabulary, source_vocab: Vocabulary,
                  dictionary: list[DictEntry], model: SubwordModel,
                  config: MapperConfig = MapperConfig(),
                  sidecar: dict[str, list[str]] | None = None) -> TokenMapping:
    """Compute candidates for every target token via the case cascade."""
    key_index = _shared_key_index(source_vocab)
    dict_index = DictionaryIndex(dictionary)
    tokenize_tables = _tokenize_tables(source_vocab)
    index_entries = build_source_index(source_vocab, model, config.tags)
    source_index = CandidateIndex(index_entries) if index_entries else []

    role_map: dict[str, int] = {}
    for role in ROLES:
        sid = source_vocab.role_id(role)
        role_map[role] = source_vocab.unk_id if sid is None else sid
    target_roles = {tok: role for role, tok in target_vocab.special_tokens.items()}

    def resolve(tid: int) -> tuple[str, list[MatchCandidate]]:
        token = target_vocab.tokens[tid]
        role = target_roles.get(token)
        if role is not None:
            return SPECIAL_ROLE, [MatchCandidate(role_map[role], 1.0, SPECIAL_ROLE)]
        shape = target_vocab.shape(tid)
        if not shape.alphabetic:
            cand = match_shared(shape, source_vocab, key_index)
            case = SHARED_EXACT if cand.provenance == SHARED_EXACT else UNK_FALLBACK
            return case, [cand]
        from_dict = match_dictionary(
            shape, dict_index, source_vocab, k_max=config.k_max,
            lowercase_retry=config.lowercase_retry, key_index=key_index,
            tokenize_tables=tokenize_tables, sidecar=sidecar)
        if from_dict is not None:
            return DICTIONARY, from_dict
        cands = match_subword(shape, model, source_index, source_vocab,
                              k=config.k, tags=config.tags)
        case = UNK_FALLBACK if cands[0].provenance == UNK_FALLBACK else SUBWORD_FASTTEXT
        return case, cands

    n = len(target_vocab)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(resolve, range(n)))
    else:
        results = [resolve(tid) for tid in range(n)]

    cases = [case for case, _ in results]
    candidates = [cands for _, cands in results]
    for tid, cands in enumerate(candidates):
        total = sum(c.weight for c in cands)
        if not cands or abs(total - 1.0) > 1e-9:
            raise ValidationError(
                f"candidate weights for target id {tid} sum to {total}")
    return TokenMapping(candidates=candidates, cases=cases)


def save_mapping(mapping: TokenMapping, target_vocab: Vocabulary,
                 source_vocab: Vocabulary, path) -> None:
    """Write one JSON record per target token (JSON-lines)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tid, (case, cands) in enumerate(zip(mapping.cases, mapping.candidates)):
            record = {
                "target_id": tid,
                "target_token": target_vocab.tokens[tid],
                "case": case,
                "candidates": [
                    {
                        "source_id": c.source_token_id,
                        "source_token": source_vocab.tokens[c.source_token_id],
                        "weight": c.weight,
                        "provenance": c.provenance,
                        **({"cosine": c.cosine} if c.cosine is not None else {}),
                    }
                    for c in cands
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_mapping(path) -> TokenMapping:
    cases: list[str] = []
    candidates: list[list[MatchCandidate]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON record: {exc}", path=str(path),
                                 line=lineno) from exc
            if record["target_id"] != len(candidates):
                raise ParseError("target ids out of order", path=str(path),
                                 line=lineno)
            cases.append(record["case"])
            candidates.append([
                MatchCandidate(c["source_id"], c["weight"], c["provenance"],
                               c.get("cosine"))
                for c in record["candidates"]
            ])
    return TokenMapping(candidates=candidates, cases=cases)


def load_sidecar(path) -> dict[str, list[str]]:
    """TSV sidecar overriding the greedy tokenizer: word<TAB>tokens."""
    table: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected word<TAB>tokens", path=str(path),
                                 line=lineno)
            table[parts[0]] = parts[1].split(" ")
    return table
