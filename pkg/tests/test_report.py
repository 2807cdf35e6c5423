import math
import random

from tokmap.mapper import (
    DICTIONARY,
    SHARED_EXACT,
    SPECIAL_ROLE,
    SUBWORD_FASTTEXT,
    UNK_FALLBACK,
    MatchCandidate,
    TokenMapping,
)
from tokmap.report import render_examples, stats_tsv, summarize
from tokmap.vocab_io import Vocabulary, detect_special_tokens


def vocab_of(tokens, convention="plain"):
    return Vocabulary(list(tokens), convention=convention,
                      special_tokens=detect_special_tokens(tokens) or {"unk": tokens[0]})


def cand(sid, weight, provenance=SUBWORD_FASTTEXT, cosine=None):
    return MatchCandidate(sid, weight, provenance, cosine)


def make_mapping(cases_and_cands):
    return TokenMapping(candidates=[c for _, c in cases_and_cands],
                        cases=[case for case, _ in cases_and_cands])


SOURCE = vocab_of(["<unk>", "s1", "s2", "s3"])


class TestSummarize:
    def test_all_punctuation_vocab(self):
        target = vocab_of(["<unk>", ".", ",", "!"])
        mapping = make_mapping(
            [(SPECIAL_ROLE, [cand(0, 1.0, SPECIAL_ROLE)])]
            + [(SHARED_EXACT, [cand(1, 1.0, SHARED_EXACT)])] * 3)
        stats = summarize(mapping, target, SOURCE)
        assert stats.case_counts[SHARED_EXACT] == 3
        assert sum(stats.case_counts.values()) == len(target)

    def test_coverage_ratio_definition(self):
        target = vocab_of(["<unk>", "woord", "huis", "kat", "."])
        mapping = make_mapping([
            (SPECIAL_ROLE, [cand(0, 1.0, SPECIAL_ROLE)]),
            (DICTIONARY, [cand(1, 1.0, DICTIONARY)]),
            (DICTIONARY, [cand(2, 1.0, DICTIONARY)]),
            (SUBWORD_FASTTEXT, [cand(1, 0.5, cosine=0.9), cand(2, 0.3, cosine=0.8),
                                cand(3, 0.2, cosine=0.7)]),
            (SHARED_EXACT, [cand(1, 1.0, SHARED_EXACT)]),
        ])
        stats = summarize(mapping, target, SOURCE)
        assert stats.alphabetic_tokens == 3
        assert stats.dictionary_coverage == 2 / 3
        assert stats.unk_fallbacks == 0
        assert stats.subword_top1_cosine_mean == 0.9

    def test_percentiles_match_sort_oracle(self):
        rng = random.Random(12)
        values = [rng.uniform(-1, 1) for _ in range(137)]
        target = vocab_of(["<unk>"] + [f"w{i}" for i in range(len(values))])
        rows = [(SPECIAL_ROLE, [cand(0, 1.0, SPECIAL_ROLE)])]
        rows += [(SUBWORD_FASTTEXT, [cand(1, 1.0, cosine=v)]) for v in values]
        stats = summarize(make_mapping(rows), target, SOURCE)
        ranked = sorted(values)
        for pct, got in ((10, stats.subword_top1_cosine_p10),
                         (50, stats.subword_top1_cosine_p50),
                         (90, stats.subword_top1_cosine_p90)):
            expected = ranked[math.ceil(pct / 100 * len(ranked)) - 1]
            assert got == expected

    def test_no_subword_cases(self):
        target = vocab_of(["<unk>", "."])
        mapping = make_mapping([
            (SPECIAL_ROLE, [cand(0, 1.0, SPECIAL_ROLE)]),
            (SHARED_EXACT, [cand(1, 1.0, SHARED_EXACT)]),
        ])
        stats = summarize(mapping, target, SOURCE)
        assert stats.subword_top1_cosine_mean is None
        assert stats.subword_top1_cosine_p50 is None


FULL_TARGET = vocab_of(["<unk>", "alpha", "beta", "."])
FULL_MAPPING = make_mapping([
    (SPECIAL_ROLE, [cand(0, 1.0, SPECIAL_ROLE)]),
    (SUBWORD_FASTTEXT, [cand(1, 0.5, cosine=0.91), cand(2, 0.3, cosine=0.85),
                        cand(3, 0.2, cosine=0.71)]),
    (DICTIONARY, [cand(2, 0.6, DICTIONARY), cand(3, 0.4, DICTIONARY)]),
    (SHARED_EXACT, [cand(1, 1.0, SHARED_EXACT)]),
])


class TestRenderExamples:
    def test_subword_sample_shows_three_weighted_terms(self):
        text = render_examples(FULL_MAPPING, FULL_TARGET, SOURCE, n_per_case=4)
        line = next(l for l in text.splitlines() if "E_t[alpha]" in l)
        assert "0.50*E_s[s1]" in line and "0.30*E_s[s2]" in line and "0.20*E_s[s3]" in line

    def test_empty_class_omitted(self):
        text = render_examples(FULL_MAPPING, FULL_TARGET, SOURCE, n_per_case=4)
        assert UNK_FALLBACK not in text

    def test_zero_samples_headers_only(self):
        text = render_examples(FULL_MAPPING, FULL_TARGET, SOURCE, n_per_case=0)
        assert "## dictionary" in text
        assert "E_t[" not in text

    def test_rendering_pure(self):
        first = render_examples(FULL_MAPPING, FULL_TARGET, SOURCE, n_per_case=3, seed=5)
        second = render_examples(FULL_MAPPING, FULL_TARGET, SOURCE, n_per_case=3, seed=5)
        assert first == second

    def test_high_entropy_samples_surface_first(self):
        # 60 single-candidate rows plus one 3-candidate row in the same case
        tokens = ["<unk>"] + [f"w{i}" for i in range(61)]
        target = vocab_of(tokens)
        rows = [(SPECIAL_ROLE, [cand(0, 1.0, SPECIAL_ROLE)])]
        rows += [(SUBWORD_FASTTEXT, [cand(1, 1.0, cosine=0.5)]) for _ in range(60)]
        rows.append((SUBWORD_FASTTEXT, [cand(1, 0.5, cosine=0.5),
                                        cand(2, 0.3, cosine=0.4),
                                        cand(3, 0.2, cosine=0.3)]))
        text = render_examples(make_mapping(rows), target, SOURCE, n_per_case=1)
        assert "E_t[w60]" in text


class TestStatsTsv:
    def test_keys_and_roundtrippable_floats(self):
        stats = summarize(FULL_MAPPING, FULL_TARGET, SOURCE)
        tsv = stats_tsv(stats)
        lines = dict(line.split("\t") for line in tsv.strip().splitlines())
        assert lines["vocab_size"] == "4"
        assert lines["case.dictionary"] == "1"
        assert float(lines["dictionary_coverage"]) == 0.5
