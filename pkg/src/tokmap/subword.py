"""Character n-gram embeddings trained with skipgram negative sampling.

Words are represented as the mean of a per-word vector and the vectors of
their hashed character n-grams, so arbitrary out-of-vocabulary strings
(e.g. partial subword tokens) can still be embedded.  Training runs over a
bigram corpus in which every line is a (word, context) pair, which turns
the skipgram objective into plain neighbor prediction: window size plays
no role.
"""

from __future__ import annotations

import struct
import threading
from dataclasses import dataclass, field, replace

import numpy as np

from .dictionary import BigramCorpus
from .errors import FormatError, ValidationError, ZeroNormError

_MODEL_MAGIC = b"T2TSUBW1"
_HEADER_FMT = "<5IdQqQ"  # dim, min_n, max_n, epochs, negatives, lr, buckets, seed, vocab


@dataclass(frozen=True)
class SubwordConfig:
    dim: int = 64
    min_n: int = 4
    max_n: int = 7
    epochs: int = 5
    negatives: int = 5
    learning_rate: float = 0.05
    bucket_count: int = 2_000_000
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if not (1 <= self.min_n <= self.max_n):
            raise ValidationError("need 1 <= min_n <= max_n")
        for name in ("epochs", "negatives", "bucket_count"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")


def extract_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Enumerate character n-grams of the '<'/'>'-wrapped word.

    Boundary characters are applied outside any language tags already in
    the string, so tags participate in n-grams and carry language
    identity.  N-grams are listed shorter lengths first, left to right,
    over Unicode code points; the full wrapped word itself appears exactly
    when its length falls within [min_n, max_n].
    """
    if not word:
        raise ValidationError("cannot extract n-grams of an empty word")
    wrapped = f"<{word}>"
    ngrams = []
    for n in range(min_n, min(max_n, len(wrapped)) + 1):
        for i in range(len(wrapped) - n + 1):
            ngrams.append(wrapped[i : i + n])
    return ngrams


def fnv1a_32(data: bytes) -> int:
    """32-bit FNV-1a over raw bytes."""
    h = 2166136261
    for byte in data:
        h ^= byte
        h = (h * 16777619) & 0xFFFFFFFF
    return h


def hash_ngram(ngram: str, bucket_count: int) -> int:
    """Bucket index of an n-gram: FNV-1a over its UTF-8 bytes, mod buckets."""
    if not ngram:
        raise ValidationError("cannot hash an empty n-gram")
    return fnv1a_32(ngram.encode("utf-8")) % bucket_count


def linear_lr(base_lr: float, step: int, total_steps: int) -> float:
    """Linearly decayed learning rate; reaches 0 once all steps are done."""
    return base_lr * max(0.0, 1.0 - step / total_steps)


def _forward(v: np.ndarray, u_rows: np.ndarray, labels: np.ndarray):
    """Binary-logistic forward pass shared by training and gradient checks.

    Returns the summed loss and the residual (label - sigmoid(u.v)) per
    output row; the loss gradients are -residual[c] * v w.r.t. each output
    row and -(residual @ u_rows) w.r.t. the hidden vector.
    """
    z = u_rows @ v
    # log sigmoid(z) = -logaddexp(0, -z), stable on both tails
    signs = 2.0 * labels - 1.0
    loss = float(np.logaddexp(0.0, -signs * z).sum())
    residual = labels - 1.0 / (1.0 + np.exp(-z))
    return loss, residual


def negative_sampling_loss(input_rows: np.ndarray, u_pos: np.ndarray,
                           u_negs: np.ndarray) -> float:
    """Loss of one update: -log s(u_pos.v) - sum(log s(-u_neg.v)),
    with v the mean of the input rows."""
    v = input_rows.mean(axis=0)
    u_rows = np.vstack([u_pos[None, :], u_negs])
    labels = np.zeros(len(u_rows))
    labels[0] = 1.0
    loss, _ = _forward(v, u_rows, labels)
    return loss


def negative_sampling_grads(input_rows: np.ndarray, u_pos: np.ndarray,
                            u_negs: np.ndarray):
    """Analytic gradients of the negative-sampling loss.

    Returns (loss, grad_input_rows, grad_u_pos, grad_u_negs).  Each input
    row receives grad_v / R because the hidden vector is the mean of the
    R input rows.
    """
    rows = np.asarray(input_rows, dtype=np.float64)
    v = rows.mean(axis=0)
    u_rows = np.vstack([np.asarray(u_pos, np.float64)[None, :],
                        np.asarray(u_negs, np.float64)])
    labels = np.zeros(len(u_rows))
    labels[0] = 1.0
    loss, residual = _forward(v, u_rows, labels)
    grad_v = -(residual @ u_rows)
    grad_rows = np.tile(grad_v / len(rows), (len(rows), 1))
    grad_u = -np.outer(residual, v)
    return loss, grad_rows, grad_u[0], grad_u[1:]


@dataclass
class SubwordModel:
    """Trained subword embedding model.

    Immutable after training; safe to share across threads.
    """

    config: SubwordConfig
    vocab: list[str]
    counts: np.ndarray          # u64 token counts, aligned with vocab
    word_input: np.ndarray      # |vocab| x dim, f32
    ngram_input: np.ndarray     # bucket_count x dim, f32
    output: np.ndarray          # |vocab| x dim, f32
    negative_table: np.ndarray = field(default=None)  # cumulative unigram^0.75
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self._index is None:
            self._index = {w: i for i, w in enumerate(self.vocab)}
        if self.negative_table is None:
            self.negative_table = _negative_cdf(self.counts)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def word_id(self, word: str) -> int:
        return self._index[word]

    def ngram_ids(self, word: str) -> np.ndarray:
        grams = extract_ngrams(word, self.config.min_n, self.config.max_n)
        ids = [hash_ngram(g, self.config.bucket_count) for g in grams]
        return np.asarray(ids, dtype=np.int64)

    def input_vector(self, word: str, in_vocab: bool) -> np.ndarray:
        """Mean of the word's own row (in-vocab only) and its n-gram rows.

        An out-of-vocabulary word with no qualifying n-grams yields the
        zero vector; callers decide how to handle it.
        """
        ids = self.ngram_ids(word)
        if in_vocab:
            try:
                wid = self._index[word]
            except KeyError:
                raise ValidationError(f"word not in model vocab: {word!r}") from None
            rows = np.vstack([self.word_input[wid][None, :], self.ngram_input[ids]])
            return rows.mean(axis=0)
        if len(ids) == 0:
            return np.zeros(self.config.dim, dtype=np.float32)
        return self.ngram_input[ids].mean(axis=0)

    def embed(self, word: str) -> np.ndarray:
        """Embed any string, using its vocab row when it has one."""
        return self.input_vector(word, word in self._index)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            cfg = self.config
            fh.write(_MODEL_MAGIC)
            fh.write(struct.pack(
                _HEADER_FMT, cfg.dim, cfg.min_n, cfg.max_n, cfg.epochs,
                cfg.negatives, cfg.learning_rate, cfg.bucket_count, cfg.seed,
                len(self.vocab),
            ))
            for word, count in zip(self.vocab, self.counts):
                encoded = word.encode("utf-8")
                fh.write(struct.pack("<I", len(encoded)))
                fh.write(encoded)
                fh.write(struct.pack("<Q", int(count)))
            for matrix in (self.word_input, self.ngram_input, self.output):
                fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path) -> "SubwordModel":
        with open(path, "rb") as fh:
            magic = fh.read(8)
            if magic != _MODEL_MAGIC:
                raise FormatError(f"bad model magic: {magic!r}")
            header = fh.read(struct.calcsize(_HEADER_FMT))
            (dim, min_n, max_n, epochs, negatives, lr, buckets, seed,
             vocab_size) = struct.unpack(_HEADER_FMT, header)
            config = SubwordConfig(dim=dim, min_n=min_n, max_n=max_n,
                                   epochs=epochs, negatives=negatives,
                                   learning_rate=lr, bucket_count=buckets,
                                   seed=seed)
            vocab, counts = [], np.zeros(vocab_size, dtype=np.uint64)
            for i in range(vocab_size):
                (length,) = struct.unpack("<I", fh.read(4))
                vocab.append(fh.read(length).decode("utf-8"))
                (counts[i],) = struct.unpack("<Q", fh.read(8))

            def read_matrix(rows):
                data = fh.read(rows * dim * 4)
                if len(data) != rows * dim * 4:
                    raise FormatError("truncated matrix data")
                return np.frombuffer(data, dtype="<f4").reshape(rows, dim).copy()

            word_input = read_matrix(vocab_size)
            ngram_input = read_matrix(buckets)
            output = read_matrix(vocab_size)
            if fh.read(1):
                raise FormatError("trailing bytes after model data")
        return cls(config=config, vocab=vocab, counts=counts,
                   word_input=word_input, ngram_input=ngram_input,
                   output=output)


def _negative_cdf(counts: np.ndarray) -> np.ndarray:
    probs = np.asarray(counts, dtype=np.float64) ** 0.75
    return np.cumsum(probs / probs.sum())


def train(corpus: BigramCorpus, config: SubwordConfig, threads: int = 1) -> SubwordModel:
    """Train the subword model on a bigram corpus.

    Every line (a, b) is one negative-sampling update predicting b from
    the input vector of a.  Input matrices start uniform in [-1/dim,
    1/dim] under the config seed, the output matrix at zero, and the
    learning rate decays linearly to zero over all updates.  With
    threads=1 the result is bit-deterministic for a fixed seed; more
    threads run racy lanes over disjoint corpus shards (final quality,
    not bit-equality, is the contract).
    """
    lines = corpus.lines if isinstance(corpus, BigramCorpus) else list(corpus)
    if not lines:
        raise ValidationError("training corpus is empty")
    if threads < 1:
        raise ValidationError("threads must be >= 1")

    vocab: list[str] = []
    index: dict[str, int] = {}
    counts_list: list[int] = []
    for left, right in lines:
        for word in (left, right):
            wid = index.get(word)
            if wid is None:
                index[word] = len(vocab)
                vocab.append(word)
                counts_list.append(1)
            else:
                counts_list[wid] += 1
    counts = np.asarray(counts_list, dtype=np.uint64)

    dim = config.dim
    seeds = np.random.SeedSequence(config.seed).spawn(threads + 1)
    init_rng = np.random.default_rng(seeds[0])

    def uniform_rows(rows):
        m = init_rng.random((rows, dim), dtype=np.float32)
        m -= 0.5
        m *= 2.0 / dim
        return m

    word_input = uniform_rows(len(vocab))
    ngram_input = uniform_rows(config.bucket_count)
    output = np.zeros((len(vocab), dim), dtype=np.float32)
    cdf = _negative_cdf(counts)

    # per-word n-gram bucket ids, computed once
    ngram_ids: list[np.ndarray] = []
    for word in vocab:
        grams = extract_ngrams(word, config.min_n, config.max_n)
        ngram_ids.append(np.asarray(
            [hash_ngram(g, config.bucket_count) for g in grams], dtype=np.int64))

    id_lines = np.asarray([(index[a], index[b]) for a, b in lines], dtype=np.int64)

    # deduplicated n-gram ids with multiplicities, for fast gather/scatter
    uniq_ids: list[np.ndarray] = []
    gram_mult: list[np.ndarray] = []
    row_counts = np.empty(len(vocab), dtype=np.float32)
    for wid, ids in enumerate(ngram_ids):
        uniq, mult = np.unique(ids, return_counts=True)
        uniq_ids.append(uniq)
        gram_mult.append(mult.astype(np.float32)[:, None])
        row_counts[wid] = 1.0 + len(ids)

    negatives = config.negatives

    def worker(shard: np.ndarray, rng) -> None:
        total = config.epochs * len(shard)
        step = 0
        base_lr = config.learning_rate
        for _ in range(config.epochs):
            order = rng.permutation(len(shard))
            neg_draws = np.searchsorted(cdf, rng.random((len(shard), negatives)))
            for pos, line_idx in enumerate(order):
                in_word, out_word = shard[line_idx]
                lr = linear_lr(base_lr, step, total)
                step += 1

                uniq = uniq_ids[in_word]
                mult = gram_mult[in_word]
                if len(uniq):
                    gram_rows = ngram_input[uniq]
                    v = (word_input[in_word] + (gram_rows * mult).sum(axis=0))
                    v /= row_counts[in_word]
                else:
                    v = word_input[in_word].copy()

                out_ids = np.empty(1 + negatives, dtype=np.int64)
                out_ids[0] = out_word
                out_ids[1:] = neg_draws[pos]
                for i in range(1, 1 + negatives):
                    tries = 0
                    while out_ids[i] == out_word and tries < 20:
                        out_ids[i] = np.searchsorted(cdf, rng.random())
                        tries += 1
                u_rows = output[out_ids]
                z = np.clip(u_rows @ v, -30.0, 30.0)
                residual = -1.0 / (1.0 + np.exp(-z))
                residual[0] += 1.0
                g = (lr * residual).astype(np.float32)

                # fastText skipgram convention: the full hidden-gradient is
                # added to every input row (no division by the row count)
                grad_v = g @ u_rows
                np.add.at(output, out_ids, np.outer(g, v))
                word_input[in_word] += grad_v
                if len(uniq):
                    ngram_input[uniq] = gram_rows + mult * grad_v

    if threads == 1:
        worker(id_lines, np.random.default_rng(seeds[1]))
    else:
        shards = [id_lines[t::threads] for t in range(threads)]
        workers = [
            threading.Thread(target=worker, args=(shard, np.random.default_rng(seeds[1 + t])))
            for t, shard in enumerate(shards) if len(shard)
        ]
        for w in workers:
            w.start()
        for w in workers:
            w.join()

    return SubwordModel(config=replace(config), vocab=vocab, counts=counts,
                        word_input=word_input, ngram_input=ngram_input,
                        output=output, negative_table=cdf)


class CandidateIndex:
    """Candidate vectors stacked once for repeated cosine queries.

    Wraps the same (token, vector) list nearest_neighbors accepts; at the
    vocabulary sizes brute force is meant for (up to ~100k tokens),
    restacking per query would dominate the search cost.
    """

    def __init__(self, candidates: list[tuple[object, np.ndarray]]):
        if not candidates:
            raise ValidationError("candidate list is empty")
        self.tokens = [token for token, _ in candidates]
        self.matrix = np.stack([vec for _, vec in candidates]).astype(np.float64)
        self.row_norms = np.sqrt((self.matrix * self.matrix).sum(axis=1))
        if np.any(self.row_norms == 0.0):
            raise ValidationError("candidate vectors must be nonzero")

    def __len__(self) -> int:
        return len(self.tokens)


def nearest_neighbors(query_vec: np.ndarray,
                      candidates: "list[tuple[str, np.ndarray]] | CandidateIndex",
                      k: int) -> list[tuple[str, float]]:
    """Exact top-k candidates by cosine similarity, descending.

    Ties are broken by candidate order.  A zero-norm query raises
    ZeroNormError; an empty candidate list raises ValidationError.
    Accepts a plain (token, vector) list or a prebuilt CandidateIndex.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    index = candidates if isinstance(candidates, CandidateIndex) \
        else CandidateIndex(candidates)
    q = np.asarray(query_vec, dtype=np.float64)
    q_norm = float(np.sqrt((q * q).sum()))
    if q_norm == 0.0:
        raise ZeroNormError("query vector has zero norm")
    # per-row pairwise reductions, not a BLAS matvec: BLAS can give
    # bit-identical rows position-dependent last-ulp results, breaking
    # exact tie-break stability against the brute-force oracle
    scores = (index.matrix * q).sum(axis=1) / (index.row_norms * q_norm)
    order = np.argsort(-scores, kind="stable")[:k]
    return [(index.tokens[i], float(scores[i])) for i in order]
