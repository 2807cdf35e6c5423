"""Materialize the target embedding table from the mapping."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .mapper import TokenMapping
from .vocab_io import EmbeddingTable, Vocabulary


def convert(source_table: EmbeddingTable, mapping: TokenMapping,
            target_vocab: Vocabulary) -> EmbeddingTable:
    """Each target row is the weighted average of its candidates' source rows.

    Accumulation runs in float64 and is stored as float32; candidate order
    is fixed, so results are bit-stable across runs.
    """
    if len(mapping) != len(target_vocab):
        raise ValidationError(
            f"mapping covers {len(mapping)} tokens, target vocab has {len(target_vocab)}")
    source = np.asarray(source_table.matrix, dtype=np.float64)
    rows = source.shape[0]
    out = np.empty((len(target_vocab), source.shape[1]), dtype=np.float32)
    for tid, cands in enumerate(mapping.candidates):
        if not cands:
            raise ValidationError(f"no candidates for target id {tid}")
        acc = np.zeros(source.shape[1], dtype=np.float64)
        for c in cands:
            if not (0 <= c.source_token_id < rows):
                raise ValidationError(
                    f"candidate source id {c.source_token_id} out of range for "
                    f"target token {target_vocab.tokens[tid]!r}")
            acc += c.weight * source[c.source_token_id]
        out[tid] = acc
    bad = ~np.isfinite(out)
    if bad.any():
        tid = int(np.where(bad.any(axis=1))[0][0])
        raise ValidationError(
            f"non-finite converted row for target token {target_vocab.tokens[tid]!r}")
    return EmbeddingTable(vocab=target_vocab, matrix=out)


def verify(table: EmbeddingTable) -> dict:
    """Report-only health check: finiteness, shape agreement, and how many
    rows are identical to the unk row (a coverage-quality signal)."""
    finite_violations = [
        table.vocab.tokens[i]
        for i in np.where(~np.isfinite(table.matrix).all(axis=1))[0]
    ]
    unk_id = table.vocab.unk_id
    unk_row = table.matrix[unk_id]
    same = np.all(table.matrix == unk_row, axis=1)
    same[unk_id] = False
    report = {
        "rows": int(table.matrix.shape[0]),
        "vocab_size": len(table.vocab),
        "dim": int(table.matrix.shape[1]),
        "finite_violations": finite_violations,
        "unk_rows": int(same.sum()),
    }
    report["ok"] = not finite_violations and report["rows"] == report["vocab_size"]
    return report
