"""Turn a tiny bilingual dictionary into a symmetric bigram corpus.

Every word must co-occur equally often with itself and with its
translation, so that a skipgram model later assigns the pair matching
representations.  Compound augmentation adds tag-dropped variants that
mimic partial words inside compounds.
"""

from collections import Counter

from tokmap import DictEntry, TagScheme, generate_bigram_corpus

# readable tags for the demo; the default scheme uses private-use
# characters that can never collide with real text
TAGS = TagScheme(source_start="«", source_end="»",
                 target_start="‹", target_end="›")

ENTRIES = [
    DictEntry("dog", "hond", 12),
    DictEntry("house", "huis", 30),
    DictEntry("university", "universiteit", 7),
]


def main():
    corpus = generate_bigram_corpus(ENTRIES, seed=1, tags=TAGS)
    print(f"{len(ENTRIES)} dictionary entries -> {len(corpus)} corpus lines\n")
    for left, right in corpus.lines[:8]:
        print(f"  {left} {right}")
    print("  ...")

    neighbors = Counter(r for l, r in corpus.lines if l == "«dog»")
    print(f"\nneighbors of «dog»: {dict(neighbors)}")
    print("(50% itself, 50% its translation, by construction)")

    swapped = Counter((r, l) for l, r in corpus.lines)
    print(f"swap-symmetric: {Counter(corpus.lines) == swapped}")

    augmented = generate_bigram_corpus(ENTRIES, augment_compounds=True,
                                       seed=1, tags=TAGS)
    print(f"\nwith compound augmentation: {len(augmented)} lines (3x)")
    partials = sorted({l for l, _ in augmented.lines if l.count("«")
                       + l.count("»") + l.count("‹") + l.count("›") == 1})
    print("partial-compound word shapes introduced:")
    for word in partials[:6]:
        print(f"  {word}")


if __name__ == "__main__":
    main()
