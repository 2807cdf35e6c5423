"""Reader/writer for the embedding exchange format and plain vocab files.

This is the wire format shared with the conversion toolkit: magic
``T2TEMB01``, u32 vocab size, u32 dim, length-prefixed UTF-8 tokens, then
the float32 matrix row-major little-endian.  Implemented here from the
format contract so the bridge stays decoupled from the toolkit's
internals.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"T2TEMB01"


class ExchangeFormatError(ValueError):
    pass


def write_exchange(tokens: list[str], matrix: np.ndarray, path) -> None:
    matrix = np.asarray(matrix, dtype=np.float32)
    if matrix.ndim != 2:
        raise ExchangeFormatError("matrix must be 2-D")
    if len(tokens) == 0:
        raise ExchangeFormatError("empty vocabulary")
    if matrix.shape[0] != len(tokens):
        raise ExchangeFormatError(
            f"vocab/matrix size mismatch: {len(tokens)} tokens, "
            f"{matrix.shape[0]} rows")
    if not np.isfinite(matrix).all():
        bad = int(np.where(~np.isfinite(matrix).all(axis=1))[0][0])
        raise ExchangeFormatError(f"non-finite row for token {tokens[bad]!r}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", len(tokens), matrix.shape[1]))
        for token in tokens:
            encoded = token.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def read_exchange(path) -> tuple[list[str], np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(8) != MAGIC:
            raise ExchangeFormatError(f"not an exchange file: {path}")
        vocab_size, dim = struct.unpack("<II", fh.read(8))
        if vocab_size == 0 or dim == 0:
            raise ExchangeFormatError("degenerate exchange header")
        tokens = []
        for _ in range(vocab_size):
            (length,) = struct.unpack("<I", fh.read(4))
            tokens.append(fh.read(length).decode("utf-8"))
        data = fh.read(vocab_size * dim * 4)
        if len(data) != vocab_size * dim * 4:
            raise ExchangeFormatError("truncated matrix")
    matrix = np.frombuffer(data, dtype="<f4").reshape(vocab_size, dim).copy()
    return tokens, matrix


def write_vocab(tokens: list[str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for token in tokens:
            fh.write(token + "\n")


def read_vocab(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line for line in fh.read().splitlines() if line != ""]
