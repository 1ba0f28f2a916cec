import json

import numpy as np
import pandas as pd
import pytest

from metrics.core import (EmptyMask, DepthMetrics, ClassificationMetrics, depth_metrics, normal_metrics,
                          classification_accuracy, average_baseline, angular_error)
from metrics.report import MetricReport, to_frame, mean_rows, write_reports, write_summary, read_reports


def rotate_z(v, degrees):
    a = np.radians(degrees)
    r = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
    return v @ r.T


class TestDepth:
    def test_identity(self, rng):
        gt = rng.uniform(0.5, 8.0, size=(2, 8, 8))
        m = depth_metrics(gt, gt)
        assert m.rms == 0.0 and m.rel == 0.0 and m.log10 == 0.0
        assert (m.delta1, m.delta2, m.delta3) == (1.0, 1.0, 1.0)

    def test_scaled_prediction(self, rng):
        gt = rng.uniform(0.5, 8.0, size=(3, 4, 4))
        m = depth_metrics(1.3 * gt, gt)
        assert m.rel == pytest.approx(0.3)
        assert m.log10 == pytest.approx(np.log10(1.3))
        assert (m.delta1, m.delta2, m.delta3) == (0.0, 1.0, 1.0)
        assert m.rms == pytest.approx(0.3 * np.sqrt(np.mean(gt ** 2)))

    @pytest.mark.parametrize('scale', [0.5, 0.9, 1.1, 2.0])
    def test_scale_relation(self, rng, scale):
        gt = rng.uniform(1.0, 5.0, size=(10, 10))
        m = depth_metrics(scale * gt, gt)
        assert m.rel == pytest.approx(abs(scale - 1.0))
        assert m.log10 == pytest.approx(abs(np.log10(scale)))

    def test_invalid_pixels_ignored(self):
        gt = np.array([[2.0, 0.0], [2.0, 1e-4]])
        pred = np.array([[2.0, 50.0], [2.0, 50.0]])
        assert depth_metrics(pred, gt).rms == 0.0

    def test_pixels_pooled_across_images(self):
        gt = np.ones((2, 2, 2))
        pred = np.ones((2, 2, 2))
        pred[0] = 3.0
        assert depth_metrics(pred, gt).rms == pytest.approx(np.sqrt(2.0))

    def test_empty_mask(self):
        with pytest.raises(EmptyMask):
            depth_metrics(np.ones((2, 2)), np.zeros((2, 2)))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            depth_metrics(np.ones((2, 2)), np.ones((3, 3)))

    @pytest.mark.parametrize('scale, deltas', [(1.1, (1.0, 1.0, 1.0)), (1.3, (0.0, 1.0, 1.0)),
                                               (1.6, (0.0, 0.0, 1.0)), (2.0, (0.0, 0.0, 0.0))])
    def test_delta_thresholds(self, rng, scale, deltas):
        gt = rng.uniform(0.5, 8.0, size=(2, 6, 6))
        for pred in (scale * gt, gt / scale):
            m = depth_metrics(pred, gt)
            assert (m.delta1, m.delta2, m.delta3) == deltas

    def test_matches_pixel_loop(self, rng):
        gt = rng.uniform(0.2, 9.0, size=(3, 7, 5))
        gt[rng.uniform(size=gt.shape) < 0.2] = 0.0
        pred = rng.uniform(0.2, 9.0, size=gt.shape)

        sq = rel = log10 = 0.0
        hits = [0, 0, 0]
        count = 0
        for p, g in zip(pred.ravel(), gt.ravel()):
            if g <= 1e-3:
                continue
            count += 1
            sq += (p - g) ** 2
            rel += abs(p - g) / g
            log10 += abs(np.log10(p) - np.log10(g))
            ratio = max(p / g, g / p)
            for k in range(3):
                hits[k] += ratio < 1.25 ** (k + 1)

        m = depth_metrics(pred, gt)
        assert m.rms == pytest.approx(np.sqrt(sq / count))
        assert m.rel == pytest.approx(rel / count)
        assert m.log10 == pytest.approx(log10 / count)
        assert [m.delta1, m.delta2, m.delta3] == pytest.approx([h / count for h in hits])


class TestNormals:
    def test_rotation(self):
        gt = np.tile(np.array([1.0, 0.0, 0.0]), (4, 4, 1))
        pred = rotate_z(gt, 20.0)
        m = normal_metrics(pred, gt, np.ones((4, 4), dtype=bool))
        assert m.mean == pytest.approx(20.0) and m.median == pytest.approx(20.0)
        assert (m.pct_11_25, m.pct_22_5, m.pct_30) == (0.0, 1.0, 1.0)

    def test_masks_intersect(self):
        gt = np.tile(np.array([0.0, 0.0, 1.0]), (2, 2, 1))
        pred = gt.copy()
        pred[0, 0] = [1.0, 0.0, 0.0]
        gt_mask = np.ones((2, 2), dtype=bool)
        pred_mask = np.ones((2, 2), dtype=bool)
        pred_mask[0, 0] = False
        assert normal_metrics(pred, gt, gt_mask, pred_mask).mean == pytest.approx(0.0, abs=1e-6)
        assert normal_metrics(pred, gt, gt_mask).mean == pytest.approx(22.5)

    def test_angle_clipped(self):
        v = np.array([[0.0, 0.0, 1.0]])
        assert angular_error(v * (1 + 1e-12), v)[0] == pytest.approx(0.0, abs=1e-4)

    def test_empty(self):
        with pytest.raises(EmptyMask):
            normal_metrics(np.ones((2, 2, 3)), np.ones((2, 2, 3)), np.zeros((2, 2)))

    def test_matches_pixel_loop(self, rng):
        def unit(shape):
            v = rng.standard_normal(shape + (3,))
            return v / np.linalg.norm(v, axis=-1, keepdims=True)
        gt = unit((2, 6, 6))
        # small perturbations so every threshold bucket is populated
        pred = gt + rng.uniform(0.0, 0.8, size=(2, 6, 6, 1)) * unit((2, 6, 6))
        pred /= np.linalg.norm(pred, axis=-1, keepdims=True)
        gt_mask = rng.uniform(size=(2, 6, 6)) < 0.8
        pred_mask = rng.uniform(size=(2, 6, 6)) < 0.9

        angles = []
        for index in np.ndindex(gt_mask.shape):
            if gt_mask[index] and pred_mask[index]:
                cos = sum(float(pred[index][k] * gt[index][k]) for k in range(3))
                angles.append(np.degrees(np.arccos(min(1.0, max(-1.0, cos)))))
        angles.sort()
        middle = len(angles) // 2
        median = angles[middle] if len(angles) % 2 else (angles[middle - 1] + angles[middle]) / 2.0

        m = normal_metrics(pred, gt, gt_mask, pred_mask)
        assert m.mean == pytest.approx(sum(angles) / len(angles))
        assert m.median == pytest.approx(median)
        for value, threshold in zip((m.pct_11_25, m.pct_22_5, m.pct_30), (11.25, 22.5, 30.0)):
            assert value == pytest.approx(sum(a < threshold for a in angles) / len(angles))
        assert 0.0 < m.pct_11_25 < m.pct_30 < 1.0


class TestClassification:
    def test_accuracy(self):
        logits = np.array([[2.0, 1.0], [0.0, 3.0], [5.0, 1.0], [0.0, 0.1]])
        assert classification_accuracy(logits, [0, 1, 1, 1]) == 0.75

    def test_random_guessing_is_chance(self, rng):
        logits = rng.standard_normal((10000, 4))
        labels = rng.integers(0, 4, size=10000)
        assert classification_accuracy(logits, labels) == pytest.approx(0.25, abs=0.02)

    def test_ties_go_to_lowest_index(self):
        assert classification_accuracy(np.zeros((2, 4)), [0, 3]) == 0.5

    def test_empty(self):
        with pytest.raises(EmptyMask):
            classification_accuracy(np.zeros((0, 4)), [])


class TestBaseline:
    def test_mean_map(self):
        baseline = average_baseline(iter([np.ones((3, 3)), np.full((3, 3), 3.0)]))
        np.testing.assert_allclose(baseline, 2.0)

    def test_empty(self):
        with pytest.raises(EmptyMask):
            average_baseline([])


class TestReports:
    def reports(self):
        return [
            MetricReport('Scratch', 'rgb2depth', 'test', 0, 10, DepthMetrics(1.0, 0.2, 0.1, 0.5, 0.7, 0.9)),
            MetricReport('Scratch', 'rgb2depth', 'test', 1, 10, DepthMetrics(3.0, 0.4, 0.3, 0.7, 0.9, 1.0)),
            MetricReport('VisualEchoes', 'rgb2depth', 'test', 0, 10, DepthMetrics(0.5, 0.1, 0.05, 0.8, 0.9, 1.0)),
        ]

    def test_mean_rows(self):
        means = mean_rows(to_frame(self.reports()))
        assert means['label'].tolist() == ['Scratch', 'VisualEchoes']
        assert means['seed'].tolist() == ['mean', 'mean']
        assert means.loc[0, 'rms'] == pytest.approx(2.0)
        assert means.loc[0, 'count'] == 20

    def test_write_and_read(self, tmp_path):
        path = str(tmp_path / 'report.csv')
        write_reports(path, self.reports(), with_means=True)
        frame = read_reports(path)
        assert len(frame) == 5
        assert list(frame.columns[:5]) == ['label', 'task', 'split', 'seed', 'count']
        assert 'delta1' in frame.columns

    def test_summary(self, tmp_path):
        path = tmp_path / 'summary.json'
        write_summary(str(path), mean_rows(to_frame(self.reports())), {'experiment': 'transfer_depth'})
        summary = json.loads(path.read_text())
        assert summary['experiment'] == 'transfer_depth'
        assert summary['rows'][1]['label'] == 'VisualEchoes'

    def test_classification_row(self):
        row = MetricReport('VisualEchoes', 'pretext', 'test', 0, 4, ClassificationMetrics(0.5)).to_row()
        assert row['accuracy'] == 0.5

    def test_needs_samples(self):
        with pytest.raises(ValueError):
            MetricReport('Scratch', 'rgb2depth', 'test', 0, 0, DepthMetrics(0, 0, 0, 1, 1, 1))

    def test_frame_type(self):
        assert isinstance(to_frame(self.reports()), pd.DataFrame)
