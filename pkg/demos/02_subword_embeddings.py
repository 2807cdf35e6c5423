"""Train character n-gram embeddings on a synthetic dictionary and watch
translations line up across languages.

The trainer never sees that 'source' and 'target' words are related except
through the symmetric bigram corpus, yet translation pairs end up as
nearest neighbors - including for words held out of the dictionary, which
are embedded purely from their character n-grams.
"""

import random

from tokmap import SubwordConfig, generate_bigram_corpus, nearest_neighbors, train
from tokmap.dictionary import SOURCE, TARGET, tag_word
from tokmap.fixtures import make_morphological_dictionary


def main():
    rng = random.Random(4)
    entries_by_cell, cells = make_morphological_dictionary(rng, n_stems=8,
                                                           n_suffixes=4)
    held_out = cells[-3:]
    training = [entries_by_cell[c] for c in cells if c not in held_out]
    corpus = generate_bigram_corpus(training, frequency_weighted=True, seed=1)
    print(f"{len(training)} training pairs -> {len(corpus)} corpus lines")

    config = SubwordConfig(seed=0, dim=48, bucket_count=50_000)
    model = train(corpus, config)
    print(f"trained: vocab={len(model.vocab)} dim={config.dim} "
          f"epochs={config.epochs}\n")

    source_words = [tag_word(e.source_word, SOURCE).text
                    for e in entries_by_cell.values()]
    candidates = [(w, model.embed(w)) for w in source_words]

    print("in-vocabulary target words -> nearest source words:")
    for e in training[:4]:
        query = model.embed(tag_word(e.target_word, TARGET).text)
        top = nearest_neighbors(query, candidates, 3)
        marks = [f"{tok} ({cos:.2f})" + ("  <== translation" if
                 tok == tag_word(e.source_word, SOURCE).text else "")
                 for tok, cos in top]
        print(f"  {e.target_word}:")
        for m in marks:
            print(f"      {m}")

    print("\nheld-out target words (never trained, n-gram embedding only):")
    for cell in held_out:
        e = entries_by_cell[cell]
        query = model.embed(tag_word(e.target_word, TARGET).text)
        top = nearest_neighbors(query, candidates, 3)
        hit = tag_word(e.source_word, SOURCE).text in [t for t, _ in top]
        print(f"  {e.target_word} -> top-3 contains translation: {hit}")


if __name__ == "__main__":
    main()
