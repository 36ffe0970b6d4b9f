import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from minent.seqio import (
    BYTES_ONE_SYMBOL,
    RAW_BITPACKED,
    TEXT_SYMBOLS,
    SequenceFormat,
    SequenceFormatError,
    decode_sequence,
    encode_sequence,
    read_sequence,
    write_sequence,
)
from minent.tuples import SymbolSequence


def make_seq(values, bits):
    return SymbolSequence(np.asarray(values), 1 << bits)


sequences = st.integers(min_value=1, max_value=10).flatmap(
    lambda bits: arrays(
        np.int64,
        st.integers(min_value=1, max_value=200),
        elements=st.integers(min_value=0, max_value=(1 << bits) - 1),
    ).map(lambda a: (a, bits))
)


class TestFormatSpec:
    def test_rejects_unknown_kind(self):
        with pytest.raises(SequenceFormatError):
            SequenceFormat("base85")

    def test_rejects_bits_out_of_range(self):
        with pytest.raises(SequenceFormatError):
            SequenceFormat(RAW_BITPACKED, 17)

    def test_bytes_format_limited_to_8_bits(self):
        with pytest.raises(SequenceFormatError):
            SequenceFormat(BYTES_ONE_SYMBOL, 9)

    def test_alphabet_size(self):
        assert SequenceFormat(RAW_BITPACKED, 6).k == 64


class TestBitpacked:
    def test_golden_layout(self):
        # 10 bits 1100101101 pack MSB-first into 0xCB, 0b01000000
        seq = make_seq([1, 1, 0, 0, 1, 0, 1, 1, 0, 1], 1)
        data = encode_sequence(seq, SequenceFormat(RAW_BITPACKED, 1))
        assert data == bytes([0b11001011, 0b01000000])

    def test_golden_multibit(self):
        # 3-bit symbols 5,0,7 -> bits 101 000 111 -> 0xA3, 0b10000000
        seq = make_seq([5, 0, 7], 3)
        data = encode_sequence(seq, SequenceFormat(RAW_BITPACKED, 3))
        assert data == bytes([0b10100011, 0b10000000])

    def test_decode_reads_whole_symbols_only(self):
        # 16 bits hold five whole 3-bit symbols; the last bit is ignored
        data = bytes([0b10100011, 0b10000000])
        seq = decode_sequence(data, SequenceFormat(RAW_BITPACKED, 3))
        assert seq.symbols.tolist() == [5, 0, 7, 0, 0]

    def test_max_symbols_recovers_exact_length(self):
        data = bytes([0b10100011, 0b10000000])
        seq = decode_sequence(data, SequenceFormat(RAW_BITPACKED, 3, max_symbols=3))
        assert seq.symbols.tolist() == [5, 0, 7]

    def test_rejects_empty(self):
        with pytest.raises(SequenceFormatError):
            decode_sequence(b"", SequenceFormat(RAW_BITPACKED, 1))

    def test_rejects_too_few_bits_for_one_symbol(self):
        with pytest.raises(SequenceFormatError):
            decode_sequence(bytes([0x00]), SequenceFormat(RAW_BITPACKED, 16))


class TestRoundTrips:
    @given(sequences, st.sampled_from([RAW_BITPACKED, TEXT_SYMBOLS]))
    def test_round_trip(self, seq_bits, kind):
        values, bits = seq_bits
        seq = make_seq(values, bits)
        fmt = SequenceFormat(kind, bits, max_symbols=len(values))
        back = decode_sequence(encode_sequence(seq, fmt), fmt)
        assert np.array_equal(back.symbols, seq.symbols)
        assert back.k == seq.k

    @given(sequences)
    def test_round_trip_bytes(self, seq_bits):
        values, bits = seq_bits
        if bits > 8:
            return
        seq = make_seq(values, bits)
        fmt = SequenceFormat(BYTES_ONE_SYMBOL, bits)
        back = decode_sequence(encode_sequence(seq, fmt), fmt)
        assert np.array_equal(back.symbols, seq.symbols)

    def test_file_round_trip(self, tmp_path):
        seq = make_seq([1, 0, 1, 1, 0, 0, 1], 1)
        fmt = SequenceFormat(RAW_BITPACKED, 1, max_symbols=7)
        path = tmp_path / "bits.bin"
        write_sequence(path, seq, fmt)
        back = read_sequence(path, fmt)
        assert np.array_equal(back.symbols, seq.symbols)


class TestTextFormat:
    def test_parses_lines(self):
        seq = decode_sequence(b"3\n0\n2\n", SequenceFormat(TEXT_SYMBOLS, 2))
        assert seq.symbols.tolist() == [3, 0, 2]

    def test_skips_blank_lines(self):
        seq = decode_sequence(b"1\n\n0\n", SequenceFormat(TEXT_SYMBOLS, 1))
        assert seq.symbols.tolist() == [1, 0]

    def test_rejects_junk(self):
        with pytest.raises(SequenceFormatError, match="line 2"):
            decode_sequence(b"1\nxyz\n", SequenceFormat(TEXT_SYMBOLS, 1))

    def test_rejects_negative(self):
        with pytest.raises(SequenceFormatError, match="negative"):
            decode_sequence(b"-3\n", SequenceFormat(TEXT_SYMBOLS, 2))

    def test_rejects_non_ascii(self):
        with pytest.raises(SequenceFormatError, match="ASCII"):
            decode_sequence("é\n".encode("utf-8"), SequenceFormat(TEXT_SYMBOLS, 1))


class TestValueRangeChecks:
    def test_decode_rejects_oversize_symbol(self):
        with pytest.raises(SequenceFormatError, match="bits"):
            decode_sequence(b"9\n", SequenceFormat(TEXT_SYMBOLS, 3))

    def test_encode_rejects_oversize_symbol(self):
        seq = SymbolSequence(np.array([0, 5]), 6)
        with pytest.raises(SequenceFormatError):
            encode_sequence(seq, SequenceFormat(RAW_BITPACKED, 2))

    def test_bytes_decode_respects_bits(self):
        with pytest.raises(SequenceFormatError):
            decode_sequence(bytes([0, 9]), SequenceFormat(BYTES_ONE_SYMBOL, 3))
