import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from isch.codes import BinaryCodeSet, words_per_code
from isch.search import (
    RetrievalResult,
    average_precision,
    hamming,
    mean_average_precision,
    precision_at_k,
    top_k,
)


def random_codes(n, m, seed):
    bits = np.random.default_rng(seed).integers(0, 2, size=(n, m))
    return BinaryCodeSet.from_bits(bits), bits


class TestPacking:
    @pytest.mark.parametrize("m", [1, 7, 63, 64, 65, 128, 130])
    def test_round_trip(self, m):
        codes, bits = random_codes(17, m, seed=m)
        np.testing.assert_array_equal(codes.to_bits(), bits)
        again = BinaryCodeSet.from_bits(codes.to_bits())
        np.testing.assert_array_equal(again.words, codes.words)

    def test_word_layout(self):
        bits = np.zeros((1, 70), dtype=np.uint8)
        bits[0, 0] = 1  # bit 0 of word 0
        bits[0, 65] = 1  # bit 1 of word 1
        codes = BinaryCodeSet.from_bits(bits)
        assert codes.words[0, 0] == 1
        assert codes.words[0, 1] == 2

    def test_pad_bits_zero(self):
        codes, _ = random_codes(10, 70, seed=1)
        mask = np.uint64(0xFFFFFFFFFFFFFFFF) << np.uint64(6)  # bits 70.. of word 1
        assert np.all(codes.words[:, 1] & mask == 0)

    def test_words_per_code(self):
        assert [words_per_code(m) for m in (1, 64, 65, 128, 129)] == [1, 1, 2, 2, 3]


class TestHamming:
    def test_identical(self):
        codes, _ = random_codes(1, 64, seed=2)
        assert hamming(codes.words[0], codes.words[0], 64) == 0

    def test_all_ones_vs_zeros(self):
        for m in (5, 64, 130):
            a = BinaryCodeSet.from_bits(np.zeros((1, m), dtype=np.uint8))
            b = BinaryCodeSet.from_bits(np.ones((1, m), dtype=np.uint8))
            assert hamming(a.words[0], b.words[0], m) == m

    def test_matches_bit_loop(self):
        ca, ba = random_codes(50, 130, seed=3)
        cb, bb = random_codes(50, 130, seed=4)
        for i in range(50):
            ref = int(sum(int(x != y) for x, y in zip(ba[i], bb[i])))
            assert hamming(ca.words[i], cb.words[i], 130) == ref

    def test_length_mismatch(self):
        a = np.zeros(1, dtype=np.uint64)
        b = np.zeros(2, dtype=np.uint64)
        with pytest.raises(ValueError, match="mismatch"):
            hamming(a, b, 64)

    @given(
        arrays(np.uint8, (3, 40), elements=st.integers(0, 1)),
    )
    @settings(max_examples=100, deadline=None)
    def test_metric_properties(self, bits):
        codes = BinaryCodeSet.from_bits(bits)
        a, b, c = codes.words
        dab = hamming(a, b, 40)
        dba = hamming(b, a, 40)
        dac = hamming(a, c, 40)
        dcb = hamming(c, b, 40)
        assert dab == dba
        assert hamming(a, a, 40) == 0
        if dab == 0:
            np.testing.assert_array_equal(bits[0], bits[1])
        assert dab <= dac + dcb


class TestTopK:
    def test_exact_match_first(self):
        codes, bits = random_codes(20, 64, seed=5)
        # make item 7 unique
        res = top_k(codes, codes.words[7], 3, query_id=7)
        assert res.ranked_ids[0] == 7
        assert res.distances[0] == 0

    def test_tie_break_by_index(self):
        bits = np.zeros((10, 32), dtype=np.uint8)
        codes = BinaryCodeSet.from_bits(bits)
        res = top_k(codes, codes.words[0], 4)
        np.testing.assert_array_equal(res.ranked_ids, [0, 1, 2, 3])

    def test_matches_full_sort_oracle(self):
        db, dbits = random_codes(1000, 64, seed=6)
        qcodes, _ = random_codes(20, 64, seed=7)
        for qi in range(20):
            res = top_k(db, qcodes.words[qi], 10, query_id=qi)
            dists = np.array(
                [hamming(db.words[i], qcodes.words[qi], 64) for i in range(1000)]
            )
            order = sorted(range(1000), key=lambda i: (dists[i], i))[:10]
            np.testing.assert_array_equal(res.ranked_ids, order)
            assert np.all(np.diff(res.distances) >= 0)

    def test_k_too_large(self):
        codes, _ = random_codes(5, 32, seed=8)
        with pytest.raises(ValueError, match="exceeds database size"):
            top_k(codes, codes.words[0], 6)


class TestMetrics:
    def _result(self, ranked):
        return RetrievalResult(
            query_id=0,
            ranked_ids=np.array(ranked),
            distances=np.arange(len(ranked)),
        )

    def test_precision_all_match(self):
        res = self._result(list(range(10)))
        labels = np.zeros(10, dtype=int)
        assert precision_at_k(res, labels, 0, 10) == 1.0

    def test_precision_none_match(self):
        res = self._result(list(range(10)))
        labels = np.zeros(10, dtype=int)
        assert precision_at_k(res, labels, 5, 10) == 0.0

    def test_precision_fraction(self):
        res = self._result(list(range(10)))
        labels = np.array([1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
        assert precision_at_k(res, labels, 1, 10) == pytest.approx(0.3)

    def test_ap_all_first(self):
        res = self._result([3, 4, 0, 1, 2])
        assert average_precision(res, {3, 4}) == 1.0

    def test_ap_single_at_rank_two(self):
        res = self._result([9, 3, 0, 1])
        assert average_precision(res, {3}) == pytest.approx(0.5)

    def test_ap_two_hits(self):
        res = self._result([5, 0, 1, 6, 2])
        assert average_precision(res, {5, 6}) == pytest.approx(0.75)

    def test_map_mean(self):
        r1 = self._result([5, 0, 1, 6, 2])
        r2 = self._result([9, 3, 0, 1, 2])
        assert mean_average_precision([r1, r2], [{5, 6}, {3}]) == pytest.approx(
            (0.75 + 0.5) / 2
        )

    def test_empty_relevant_errors(self):
        res = self._result([0, 1])
        with pytest.raises(ValueError, match="undefined AP"):
            average_precision(res, set())
