"""Full library walk-through: map a sentencepiece target vocabulary onto a
wordpiece source vocabulary and convert the embedding table.

Shows the four resolution cases (special role, shared punctuation,
dictionary word, subword nearest-neighbor) and the weighted averages that
build each new embedding row.
"""

import random

import numpy as np

from tokmap import EmbeddingTable, SubwordConfig, generate_bigram_corpus, train
from tokmap.converter import convert, verify
from tokmap.fixtures import build_toy_vocabs, make_random_dictionary
from tokmap.mapper import build_mapping
from tokmap.report import render_examples, summarize


def main():
    rng = random.Random(21)
    entries = make_random_dictionary(40, rng)
    source_vocab, target_vocab = build_toy_vocabs(entries, rng, size=160)
    print(f"dictionary: {len(entries)} pairs")
    print(f"source vocab: {len(source_vocab)} wordpiece tokens")
    print(f"target vocab: {len(target_vocab)} sentencepiece tokens\n")

    corpus = generate_bigram_corpus(entries, augment_compounds=True,
                                    frequency_weighted=True, seed=3)
    model = train(corpus, SubwordConfig(seed=3, dim=48, bucket_count=50_000))

    mapping = build_mapping(target_vocab, source_vocab, entries, model)
    stats = summarize(mapping, target_vocab, source_vocab)
    print("resolution cases:")
    for case, count in stats.case_counts.items():
        print(f"  {case:20s} {count}")
    print(f"dictionary coverage of alphabetic tokens: "
          f"{stats.dictionary_coverage:.0%}")
    print(f"median top-1 cosine (subword case): "
          f"{stats.subword_top1_cosine_p50:.2f}\n")

    source_table = EmbeddingTable(
        vocab=source_vocab,
        matrix=np.random.default_rng(0).normal(
            size=(len(source_vocab), 24)).astype(np.float32))
    target_table = convert(source_table, mapping, target_vocab)
    print(f"converted table: {target_table.matrix.shape[0]} rows x "
          f"{target_table.dim} dims")
    print(f"health check: {verify(target_table)}\n")

    print(render_examples(mapping, target_vocab, source_vocab, n_per_case=2))


if __name__ == "__main__":
    main()
