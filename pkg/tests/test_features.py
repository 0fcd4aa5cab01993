from pathlib import Path

import numpy as np
import pytest

from gazeread import features as ft
from gazeread import linguistics as ling
from gazeread.gaze import Fixation, IvtParams, detect_fixations
from gazeread.layout import resolve_fixations

from helpers import dwell_stream, make_layout

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fix_seq(word_indices, durations, start=0.0):
    """Back-to-back fixations landing on the given word indices."""
    out, t = [], start
    for wi, d in zip(word_indices, durations):
        out.append(Fixation(t, t + d, 0.0, 0.0, wi))
        t += d + 50.0
    return out


class TestGazeFeatures:
    def test_worked_example(self):
        fixes = fix_seq([0, 1, 2, 1, 3], [100, 120, 80, 90, 110])
        v = ft.gaze_features(fixes, word_count=5)
        assert v.tolist() == [120.0, 500.0, 5.0, 1.0, 1.0]

    def test_monotone_regressions(self):
        fixes = fix_seq([4, 3, 2], [100, 100, 100])
        assert ft.gaze_features(fixes, 5)[3] == 2.0

    def test_no_fixations(self):
        assert ft.gaze_features([], 4).tolist() == [0.0, 0.0, 0.0, 0.0, 0.0]

    def test_explicit_regressive_count_wins(self):
        fixes = fix_seq([0, 1], [100, 100])
        assert ft.gaze_features(fixes, 2, regressive_count=7)[3] == 7.0

    def test_repeat_is_not_regression(self):
        fixes = fix_seq([2, 2, 2], [100, 100, 100])
        assert ft.gaze_features(fixes, 5)[3] == 0.0

    def test_word_count_validated(self):
        with pytest.raises(ValueError):
            ft.gaze_features([], 0)

    def test_count_per_word(self):
        fixes = fix_seq([0, 1, 2], [60, 60, 60])
        assert ft.gaze_features(fixes, 12)[4] == pytest.approx(0.25)


class TestRegressiveCounts:
    def test_credited_to_landing_sentence(self, simple_layout):
        # jump back from sentence 1 (word 5) to sentence 0 (word 1):
        # the regression belongs to sentence 0, where the eye lands.
        fixes = fix_seq([0, 1, 5, 1, 6], [100] * 5)
        assert ft.regressive_counts(fixes, simple_layout) == [1, 0, 0]

    def test_unresolved_skipped(self, simple_layout):
        fixes = fix_seq([3, None, 1], [100, 100, 100])
        assert ft.regressive_counts(fixes, simple_layout) == [1, 0, 0]

    def test_forward_reading_has_none(self, simple_layout):
        order = list(range(len(simple_layout.words)))
        fixes = fix_seq(order, [80] * len(order))
        assert ft.regressive_counts(fixes, simple_layout) == [0, 0, 0]


class TestLinguisticFeatures:
    def test_worked_example(self, simple_layout):
        aoa = ling.Lexicon({"cat": 4.0, "sat": 5.0}, "aoa")
        zipf = ling.Lexicon({"the": 7.0, "cat": 4.0}, "zipf")
        v = ft.linguistic_features(simple_layout.sentences[0], simple_layout, aoa, zipf)
        # "The cat sat." -> 3 words, 1 stopword, 9 chars, 2 content words
        assert v[:4].tolist() == [3.0, 1.0, 9.0, 2.0]
        assert v[4] == 102.0  # 3 boxes of 27/27/36 px with 6 px gaps
        assert v[5] == 0.0 and v[6] == 0.0  # no named entities
        assert v[7] == pytest.approx(-5.80, abs=1e-9)  # ARI
        assert v[8] == pytest.approx(-2.62, abs=1e-9)  # FKGL
        assert v[9] == pytest.approx(4.5)  # mean of cat/sat ratings
        assert v[10] == pytest.approx(5.5)  # mean of the/cat frequencies

    def test_uncovered_falls_back_to_lexicon_mean(self, simple_layout):
        aoa = ling.Lexicon({"zzz": 8.0, "qqq": 2.0}, "aoa")
        zipf = ling.Lexicon({"zzz": 6.0, "qqq": 2.0}, "zipf")
        v = ft.linguistic_features(simple_layout.sentences[0], simple_layout, aoa, zipf)
        assert v[9] == pytest.approx(5.0)
        assert v[10] == pytest.approx(4.0)

    def test_entity_ratio(self, lexicons):
        aoa, zipf = lexicons
        doc = make_layout("d", ["We saw Paris and London today."])
        v = ft.linguistic_features(doc.sentences[0], doc, aoa, zipf)
        assert v[5] == 2.0
        assert v[6] == pytest.approx(2.0 / 6.0)


class TestBuildMatrix:
    def test_shape_and_names(self, simple_layout, lexicons):
        aoa, zipf = lexicons
        m = ft.build_matrix(simple_layout, [], aoa, zipf)
        assert m.shape == (3, 16)
        assert ft.N_FEATURES == 16 == len(ft.FEATURE_NAMES)

    def test_gaze_columns_follow_attribution(self, simple_layout, lexicons):
        aoa, zipf = lexicons
        fixes = fix_seq([0, 1, 2, 5, 4, 12], [100, 150, 90, 200, 120, 300])
        m = ft.build_matrix(simple_layout, fixes, aoa, zipf)
        # sentence 0 holds words 0-2, sentence 1 words 3-11, sentence 2 rest
        assert m[0, :5].tolist() == [150.0, 340.0, 3.0, 0.0, 1.0]
        assert m[1, :5].tolist() == [200.0, 320.0, 2.0, 1.0, 2.0 / 9.0]
        assert m[2, :5].tolist() == [300.0, 300.0, 1.0, 0.0, 1.0 / 3.0]

    def test_cross_sentence_regression_lands_correctly(self, simple_layout, lexicons):
        aoa, zipf = lexicons
        fixes = fix_seq([12, 0], [100, 100])
        m = ft.build_matrix(simple_layout, fixes, aoa, zipf)
        assert m[0, 3] == 1.0 and m[2, 3] == 0.0

    def test_linguistic_columns_ignore_gaze(self, simple_layout, lexicons):
        aoa, zipf = lexicons
        a = ft.build_matrix(simple_layout, [], aoa, zipf)
        b = ft.build_matrix(simple_layout, fix_seq([0, 5, 2], [100] * 3), aoa, zipf)
        assert np.array_equal(a[:, 5:], b[:, 5:])

    def test_golden_matrix(self, simple_layout, lexicons):
        """Full pipeline output against an audited fixture."""
        aoa, zipf = lexicons
        stream = dwell_stream(simple_layout,
                              [(0, 200), (1, 150), (2, 300), (3, 120), (5, 180),
                               (4, 140), (8, 220), (11, 90), (12, 250), (13, 110)],
                              jitter=1.5, seed=7)
        fixes = resolve_fixations(detect_fixations(stream, IvtParams()), simple_layout)
        matrix = ft.build_matrix(simple_layout, fixes, aoa, zipf)
        golden, labels = ft.read_matrix_csv(FIXTURE_DIR / "feature_matrix_golden.csv")
        assert labels is None
        assert matrix.shape == golden.shape
        assert np.array_equal(matrix, golden)


class TestMatrixCsv:
    def test_round_trip_bit_exact(self, tmp_path, rng):
        m = rng.normal(size=(8, 16)) * rng.choice([1e-7, 1.0, 1e6], size=(8, 16))
        p = tmp_path / "m.csv"
        ft.write_matrix_csv(p, m)
        back, labels = ft.read_matrix_csv(p)
        assert labels is None
        assert np.array_equal(m, back)

    def test_labels_round_trip(self, tmp_path, rng):
        m = rng.normal(size=(5, 16))
        labels = [True, False, True, True, False]
        p = tmp_path / "m.csv"
        ft.write_matrix_csv(p, m, labels)
        back, lab = ft.read_matrix_csv(p)
        assert np.array_equal(m, back)
        assert lab.tolist() == labels

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("sentence_index,f1,f2\n0,1.0,2.0\n")
        with pytest.raises(ValueError, match="header"):
            ft.read_matrix_csv(p)
