"""Cross-tokenizer embedding-table conversion toolkit.

Pipeline: a bilingual word dictionary is symmetrized into a bigram corpus,
a character n-gram skipgram model is trained on it, every target-tokenizer
token is mapped onto weighted source-tokenizer tokens, and the source
embedding table is averaged into a new target table.
"""

from .dictionary import (
    BigramCorpus,
    DictEntry,
    TagScheme,
    generate_bigram_corpus,
    load_dictionary,
    tag_word,
)
from .errors import (
    FormatError,
    ParseError,
    TokmapError,
    ValidationError,
    ZeroNormError,
)
from .subword import (
    SubwordConfig,
    SubwordModel,
    extract_ngrams,
    hash_ngram,
    nearest_neighbors,
    train,
)
from .vocab_io import (
    EmbeddingTable,
    TokenShape,
    Vocabulary,
    classify_token,
    load_vocab,
    read_embeddings,
    write_embeddings,
)

__version__ = "0.1.0"

__all__ = [
    "BigramCorpus",
    "DictEntry",
    "EmbeddingTable",
    "FormatError",
    "ParseError",
    "SubwordConfig",
    "SubwordModel",
    "TagScheme",
    "TokenShape",
    "TokmapError",
    "ValidationError",
    "Vocabulary",
    "ZeroNormError",
    "classify_token",
    "extract_ngrams",
    "generate_bigram_corpus",
    "hash_ngram",
    "load_dictionary",
    "load_vocab",
    "nearest_neighbors",
    "read_embeddings",
    "tag_word",
    "train",
    "write_embeddings",
]
