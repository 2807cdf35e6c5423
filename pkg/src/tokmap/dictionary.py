"""Bilingual dictionary loading and symmetric bigram corpus generation.

A word translation dictionary is turned into a synthetic skipgram corpus in
which every word co-occurs equally often with itself and with its
translation, so that translation pairs are pushed toward identical
subword-embedding representations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError

SOURCE = "source"
TARGET = "target"

FULL = "full"
NO_START_TAG = "no_start_tag"
NO_END_TAG = "no_end_tag"

_VARIANTS = (FULL, NO_START_TAG, NO_END_TAG)


@dataclass(frozen=True)
class TagScheme:
    """Sentinel characters wrapped around dictionary words to mark language.

    Defaults are private-use Unicode code points, which cannot occur in
    natural text.
    """

    source_start: str = ""
    source_end: str = ""
    target_start: str = ""
    target_end: str = ""

    def all_tags(self) -> tuple[str, str, str, str]:
        return (self.source_start, self.source_end, self.target_start, self.target_end)

    def start(self, language: str) -> str:
        return self.source_start if language == SOURCE else self.target_start

    def end(self, language: str) -> str:
        return self.source_end if language == SOURCE else self.target_end


DEFAULT_TAGS = TagScheme()


@dataclass(frozen=True)
class DictEntry:
    """One translation pair; frequency defaults to 1 when absent."""

    source_word: str
    target_word: str
    frequency: int = 1


@dataclass(frozen=True)
class TaggedWord:
    text: str
    language: str
    variant: str


def _validate_word(word: str, tags: TagScheme) -> str:
    word = word.strip()
    if not word:
        raise ValidationError("empty word")
    if any(ch.isspace() for ch in word):
        raise ValidationError(f"word contains whitespace: {word!r}")
    for tag in tags.all_tags():
        if tag in word:
            raise ValidationError(f"word contains tag sentinel {tag!r}: {word!r}")
    return word


def load_dictionary(path, tags: TagScheme = DEFAULT_TAGS) -> list[DictEntry]:
    """Load a UTF-8 TSV dictionary: ``source<TAB>target[<TAB>frequency]``.

    Lines starting with ``#`` are comments; blank lines are skipped.
    Duplicate (source, target) pairs are merged by summing frequencies,
    keeping the position of the first occurrence.
    """
    entries: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise ParseError(
                    f"expected 2 or 3 tab-separated fields, got {len(fields)}",
                    path=str(path), line=lineno,
                )
            try:
                source = _validate_word(fields[0], tags)
                target = _validate_word(fields[1], tags)
            except ValidationError as exc:
                raise ParseError(str(exc), path=str(path), line=lineno) from exc
            if len(fields) == 3:
                try:
                    freq = int(fields[2])
                except ValueError:
                    raise ParseError(
                        f"frequency is not an integer: {fields[2]!r}",
                        path=str(path), line=lineno,
                    ) from None
                if freq < 0:
                    raise ParseError(
                        f"negative frequency: {freq}", path=str(path), line=lineno
                    )
            else:
                freq = 1
            key = (source, target)
            entries[key] = entries.get(key, 0) + freq
    return [DictEntry(s, t, f) for (s, t), f in entries.items()]


def tag_word(
    word: str,
    language: str,
    variant: str = FULL,
    tags: TagScheme = DEFAULT_TAGS,
) -> TaggedWord:
    """Wrap a word with its language's sentinel tags.

    ``no_start_tag`` keeps only the end tag, ``no_end_tag`` only the start
    tag; these simulate partial words inside multiword compounds.
    """
    if language not in (SOURCE, TARGET):
        raise ValidationError(f"unknown language: {language!r}")
    if variant not in _VARIANTS:
        raise ValidationError(f"unknown variant: {variant!r}")
    word = _validate_word(word, tags)
    start = tags.start(language) if variant in (FULL, NO_END_TAG) else ""
    end = tags.end(language) if variant in (FULL, NO_START_TAG) else ""
    return TaggedWord(text=start + word + end, language=language, variant=variant)


@dataclass
class BigramCorpus:
    """Ordered word-pair lines; one skipgram training example per line."""

    lines: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.lines)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for left, right in self.lines:
                fh.write(f"{left} {right}\n")

    @classmethod
    def load(cls, path) -> "BigramCorpus":
        lines = []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                parts = raw.rstrip("\n").split(" ")
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise ParseError(
                        "corpus line is not two space-separated tokens",
                        path=str(path), line=lineno,
                    )
                lines.append((parts[0], parts[1]))
        return cls(lines)


def generate_bigram_corpus(
    entries: list[DictEntry],
    augment_compounds: bool = False,
    frequency_weighted: bool = False,
    seed: int = 0,
    tags: TagScheme = DEFAULT_TAGS,
) -> BigramCorpus:
    """Emit the symmetric bigram corpus for a dictionary.

    Each entry (s, t) yields four base lines over the fully tagged forms:
    (s s), (s t), (t s), (t t), so every word neighbors itself and its
    translation equally often.  With ``augment_compounds``, the two
    cross-language base lines additionally yield the four lines in which
    exactly one side is replaced by its no_start_tag and (separately) its
    no_end_tag form, pairing partial-compound shapes directly with the
    opposite language (8 extra lines per entry, 3x total).  With
    ``frequency_weighted``, every line of an entry is replicated
    ``frequency`` times.  Line order is a deterministic shuffle under
    ``seed``.
    """
    if not entries:
        raise ValidationError("dictionary is empty")
    lines: list[tuple[str, str]] = []
    for entry in entries:
        s = tag_word(entry.source_word, SOURCE, FULL, tags).text
        t = tag_word(entry.target_word, TARGET, FULL, tags).text
        entry_lines = [(s, s), (s, t), (t, s), (t, t)]
        if augment_compounds:
            s_ns = tag_word(entry.source_word, SOURCE, NO_START_TAG, tags).text
            s_ne = tag_word(entry.source_word, SOURCE, NO_END_TAG, tags).text
            t_ns = tag_word(entry.target_word, TARGET, NO_START_TAG, tags).text
            t_ne = tag_word(entry.target_word, TARGET, NO_END_TAG, tags).text
            entry_lines += [
                (s_ns, t), (s_ne, t), (s, t_ns), (s, t_ne),
                (t, s_ns), (t, s_ne), (t_ns, s), (t_ne, s),
            ]
        repeat = entry.frequency if frequency_weighted else 1
        lines.extend(line for line in entry_lines for _ in range(repeat))
    random.Random(seed).shuffle(lines)
    return BigramCorpus(lines)
