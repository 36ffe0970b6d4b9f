"""Reading and writing symbol sequences in the supported file formats.

Three formats, all parameterized by ``bits_per_symbol`` (1..16, alphabet
size ``k = 2 ** bits_per_symbol``):

* ``raw_bitpacked`` -- the bit stream of all symbols, MSB-first within
  each byte, symbol boundary every ``bits_per_symbol`` bits, final
  partial byte zero-padded.  The file does not record the symbol count:
  readers take every whole symbol, so pass ``max_symbols`` when padding
  bits must not be read back as extra zero symbols.
* ``bytes_one_symbol`` -- one symbol per byte (``bits_per_symbol <= 8``).
* ``text_symbols`` -- ASCII decimal, one symbol per line; for tiny
  hand-written vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tuples import SymbolSequence

__all__ = [
    "RAW_BITPACKED",
    "BYTES_ONE_SYMBOL",
    "TEXT_SYMBOLS",
    "FORMATS",
    "SequenceFormat",
    "SequenceFormatError",
    "decode_sequence",
    "encode_sequence",
    "read_sequence",
    "write_sequence",
]

RAW_BITPACKED = "raw_bitpacked"
BYTES_ONE_SYMBOL = "bytes_one_symbol"
TEXT_SYMBOLS = "text_symbols"
FORMATS = (RAW_BITPACKED, BYTES_ONE_SYMBOL, TEXT_SYMBOLS)


class SequenceFormatError(ValueError):
    """The input cannot be parsed under the declared format."""


@dataclass(frozen=True)
class SequenceFormat:
    kind: str
    bits_per_symbol: int = 1
    max_symbols: int | None = None

    def __post_init__(self):
        if self.kind not in FORMATS:
            raise SequenceFormatError(f"unknown format {self.kind!r}")
        if not 1 <= self.bits_per_symbol <= 16:
            raise SequenceFormatError(
                f"bits_per_symbol={self.bits_per_symbol} outside [1, 16]"
            )
        if self.kind == BYTES_ONE_SYMBOL and self.bits_per_symbol > 8:
            raise SequenceFormatError(
                "bytes_one_symbol holds at most 8 bits per symbol"
            )
        if self.max_symbols is not None and self.max_symbols < 1:
            raise SequenceFormatError("max_symbols must be positive")

    @property
    def k(self) -> int:
        return 1 << self.bits_per_symbol


def decode_sequence(data: bytes, fmt: SequenceFormat) -> SymbolSequence:
    """Parse raw file bytes into a :class:`SymbolSequence`."""
    if fmt.kind == RAW_BITPACKED:
        symbols = _decode_bitpacked(data, fmt.bits_per_symbol)
    elif fmt.kind == BYTES_ONE_SYMBOL:
        symbols = np.frombuffer(data, dtype=np.uint8).astype(np.int32)
    else:
        symbols = _decode_text(data)
    if fmt.max_symbols is not None:
        symbols = symbols[: fmt.max_symbols]
    if symbols.size == 0:
        raise SequenceFormatError("input holds no symbols")
    if symbols.max(initial=0) >= fmt.k:
        raise SequenceFormatError(
            f"symbol value {int(symbols.max())} needs more than "
            f"{fmt.bits_per_symbol} bits"
        )
    return SymbolSequence(symbols, fmt.k)


def encode_sequence(seq: SymbolSequence, fmt: SequenceFormat) -> bytes:
    """Serialize a sequence; inverse of :func:`decode_sequence`.

    Exact round trips through ``raw_bitpacked`` require decoding with
    ``max_symbols=len(seq)`` whenever the packed bits do not fill the
    final byte.
    """
    if seq.symbols.max(initial=0) >= fmt.k:
        raise SequenceFormatError(
            f"sequence over alphabet {seq.k} does not fit "
            f"{fmt.bits_per_symbol} bits per symbol"
        )
    if fmt.kind == RAW_BITPACKED:
        return _encode_bitpacked(seq.symbols, fmt.bits_per_symbol)
    if fmt.kind == BYTES_ONE_SYMBOL:
        return seq.symbols.astype(np.uint8).tobytes()
    return "".join(f"{int(s)}\n" for s in seq.symbols).encode("ascii")


def read_sequence(path, fmt: SequenceFormat) -> SymbolSequence:
    with open(path, "rb") as fh:
        return decode_sequence(fh.read(), fmt)


def write_sequence(path, seq: SymbolSequence, fmt: SequenceFormat) -> bytes:
    data = encode_sequence(seq, fmt)
    with open(path, "wb") as fh:
        fh.write(data)
    return data


def _decode_bitpacked(data: bytes, bits_per_symbol: int) -> np.ndarray:
    if not data:
        raise SequenceFormatError("empty bit-packed input")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    n = bits.size // bits_per_symbol
    if n == 0:
        raise SequenceFormatError(
            f"{bits.size} bits cannot hold a {bits_per_symbol}-bit symbol"
        )
    blocks = bits[: n * bits_per_symbol].reshape(n, bits_per_symbol).astype(np.int32)
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int32)
    return blocks @ weights


def _encode_bitpacked(symbols: np.ndarray, bits_per_symbol: int) -> bytes:
    shifts = np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int32)
    bits = ((symbols[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits).tobytes()


def _decode_text(data: bytes) -> np.ndarray:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise SequenceFormatError(f"text input is not ASCII: {exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            continue
        try:
            value = int(token)
        except ValueError as exc:
            raise SequenceFormatError(
                f"line {lineno}: {token!r} is not a decimal symbol"
            ) from exc
        if value < 0:
            raise SequenceFormatError(f"line {lineno}: negative symbol {value}")
        values.append(value)
    return np.asarray(values, dtype=np.int32)
