"""Human-readable diagnostics for a finished token mapping."""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from .mapper import CASES, DICTIONARY, SUBWORD_FASTTEXT, UNK_FALLBACK, TokenMapping
from .vocab_io import Vocabulary


@dataclass
class MappingStats:
    vocab_size: int
    case_counts: dict[str, int]
    alphabetic_tokens: int
    dictionary_coverage: float     # dictionary-case count / alphabetic tokens
    unk_fallbacks: int
    subword_top1_cosine_mean: float | None
    subword_top1_cosine_p10: float | None
    subword_top1_cosine_p50: float | None
    subword_top1_cosine_p90: float | None

    def to_json_dict(self) -> dict:
        return asdict(self)


def _top1_cosines(mapping: TokenMapping) -> list[float]:
    values = []
    for case, cands in zip(mapping.cases, mapping.candidates):
        if case == SUBWORD_FASTTEXT and cands and cands[0].cosine is not None:
            values.append(cands[0].cosine)
    return values


def summarize(mapping: TokenMapping, target_vocab: Vocabulary,
              source_vocab: Vocabulary) -> MappingStats:
    case_counts = {case: 0 for case in CASES}
    for case in mapping.cases:
        case_counts[case] += 1
    alphabetic = sum(1 for s in target_vocab.shapes() if s.alphabetic and not s.special)
    coverage = case_counts[DICTIONARY] / alphabetic if alphabetic else 0.0
    cosines = _top1_cosines(mapping)
    if cosines:
        p10, p50, p90 = np.percentile(cosines, [10, 50, 90], method="inverted_cdf")
        mean = float(np.mean(cosines))
        p10, p50, p90 = float(p10), float(p50), float(p90)
    else:
        mean = p10 = p50 = p90 = None
    return MappingStats(
        vocab_size=len(target_vocab),
        case_counts=case_counts,
        alphabetic_tokens=alphabetic,
        dictionary_coverage=coverage,
        unk_fallbacks=case_counts[UNK_FALLBACK],
        subword_top1_cosine_mean=mean,
        subword_top1_cosine_p10=p10,
        subword_top1_cosine_p50=p50,
        subword_top1_cosine_p90=p90,
    )


def _weight_entropy(cands) -> float:
    return -sum(c.weight * math.log(c.weight) for c in cands if c.weight > 0)


def render_examples(mapping: TokenMapping, target_vocab: Vocabulary,
                    source_vocab: Vocabulary, n_per_case: int = 4,
                    seed: int = 0) -> str:
    """Markdown table of sample mappings per case, one section per case.

    Samples are ranked by weight entropy (seeded jitter breaks ties), so
    the multi-candidate mappings that actually show the weighting scheme
    surface first.  Empty cases are omitted.
    """
    rng = random.Random(seed)
    by_case: dict[str, list[int]] = {}
    for tid, case in enumerate(mapping.cases):
        by_case.setdefault(case, []).append(tid)
    lines = ["# Token mapping examples", ""]
    for case in CASES:
        members = by_case.get(case)
        if not members:
            continue
        lines.append(f"## {case} ({len(members)} tokens)")
        lines.append("")
        ranked = sorted(
            members,
            key=lambda tid: (-_weight_entropy(mapping.candidates[tid]), rng.random()),
        )
        for tid in ranked[: max(n_per_case, 0)]:
            terms = " + ".join(
                f"{c.weight:.2f}*E_s[{source_vocab.tokens[c.source_token_id]}]"
                for c in mapping.candidates[tid]
            )
            lines.append(f"- E_t[{target_vocab.tokens[tid]}] = {terms}")
        lines.append("")
    return "\n".join(lines)


def stats_tsv(stats: MappingStats) -> str:
    rows = [("vocab_size", stats.vocab_size)]
    rows += [(f"case.{case}", count) for case, count in stats.case_counts.items()]
    rows += [
        ("alphabetic_tokens", stats.alphabetic_tokens),
        ("dictionary_coverage", stats.dictionary_coverage),
        ("unk_fallbacks", stats.unk_fallbacks),
        ("subword_top1_cosine_mean", stats.subword_top1_cosine_mean),
        ("subword_top1_cosine_p10", stats.subword_top1_cosine_p10),
        ("subword_top1_cosine_p50", stats.subword_top1_cosine_p50),
        ("subword_top1_cosine_p90", stats.subword_top1_cosine_p90),
    ]
    return "\n".join(f"{key}\t{value}" for key, value in rows) + "\n"
