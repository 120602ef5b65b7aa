"""Bit-exact binary model persistence.

Little-endian layout:

    magic "ADGM" | version u32 | V u64 | D u32 | T u32 | alpha f64 |
    total_tokens u64
    vocab block: per word in id order, word byte length u16 + UTF-8 bytes +
                 freq u64
    code block:  per word, path length u16 + node ids u32[] + branch signs
                 packed LSB-first (bit 1 = +1)
    counts f64 row-major V x T
    in_vecs f32 row-major V x T x D
    out_vecs f32 row-major (V-1) x D
    crc32 u32 over all preceding bytes

The Huffman codes travel inside the file, so loading never rebuilds the
tree.  Prototypes are stored as float32; a model held in float32 (the
default) round-trips bit-for-bit.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .corpus import Vocabulary
from .huffman import HuffmanCode
from .model import SenseModel

MAGIC = b"ADGM"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Corrupt, truncated, or incompatible model file."""


def _pack_signs(signs: np.ndarray) -> bytes:
    bits = np.zeros((len(signs) + 7) // 8 * 8, dtype=np.uint8)
    bits[: len(signs)] = signs > 0
    return np.packbits(bits, bitorder="little").tobytes()


def _unpack_signs(data: bytes, length: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return np.where(bits[:length] > 0, 1.0, -1.0)


def save_model(model: SenseModel, path) -> None:
    """Write the model; load_model(save_model(m)) is bit-identical for
    float32 models (float64 prototypes are narrowed to the file's f32)."""
    n_words = model.n_words
    parts = [
        MAGIC,
        struct.pack(
            "<IQIIdQ",
            FORMAT_VERSION,
            n_words,
            model.dim,
            model.n_senses,
            model.alpha,
            model.vocab.total_tokens,
        ),
    ]
    for word, freq in zip(model.vocab.words, model.vocab.freq):
        encoded = word.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<Q", int(freq)))
    for w in range(n_words):
        nodes = model.codes.nodes[w]
        parts.append(struct.pack("<H", len(nodes)))
        parts.append(nodes.astype("<u4").tobytes())
        parts.append(_pack_signs(model.codes.signs[w]))
    parts.append(np.ascontiguousarray(model.counts, dtype="<f8").tobytes())
    parts.append(np.ascontiguousarray(model.in_vecs, dtype="<f4").tobytes())
    parts.append(np.ascontiguousarray(model.out_vecs, dtype="<f4").tobytes())
    payload = b"".join(parts)
    with open(path, "wb") as fh:
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(payload)))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError("truncated model file")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_model(path) -> SenseModel:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) + 4:
        raise ModelFormatError("truncated model file")
    stored_crc = struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(data[:-4]) != stored_crc:
        raise ModelFormatError("checksum mismatch, file is corrupt")
    reader = _Reader(data[:-4])
    if reader.take(4) != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    version, n_words, dim, n_senses, alpha, total_tokens = reader.unpack("<IQIIdQ")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported format version {version} (expected {FORMAT_VERSION})"
        )
    words = []
    freqs = np.empty(n_words, dtype=np.int64)
    for w in range(n_words):
        (wlen,) = reader.unpack("<H")
        words.append(reader.take(wlen).decode("utf-8"))
        (freqs[w],) = reader.unpack("<Q")
    vocab = Vocabulary(words=words, freq=freqs, total_tokens=int(total_tokens))
    nodes = []
    signs = []
    for w in range(n_words):
        (plen,) = reader.unpack("<H")
        nodes.append(
            np.frombuffer(reader.take(4 * plen), dtype="<u4").astype(np.int32)
        )
        signs.append(_unpack_signs(reader.take((plen + 7) // 8), plen))
    codes = HuffmanCode(nodes=nodes, signs=signs)
    counts = (
        np.frombuffer(reader.take(8 * n_words * n_senses), dtype="<f8")
        .reshape(n_words, n_senses)
        .copy()
    )
    in_vecs = (
        np.frombuffer(reader.take(4 * n_words * n_senses * dim), dtype="<f4")
        .reshape(n_words, n_senses, dim)
        .copy()
    )
    out_vecs = (
        np.frombuffer(reader.take(4 * (n_words - 1) * dim), dtype="<f4")
        .reshape(n_words - 1, dim)
        .copy()
    )
    if reader.pos != len(reader.data):
        raise ModelFormatError("trailing bytes after model payload")
    return SenseModel(
        vocab=vocab,
        codes=codes,
        in_vecs=in_vecs,
        out_vecs=out_vecs,
        counts=counts,
        alpha=float(alpha),
    )
