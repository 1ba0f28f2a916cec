import json
from collections import namedtuple

import pandas as pd

from log import log_metrics


_columns = ['label', 'task', 'split', 'seed', 'count']


class MetricReport(namedtuple('MetricReport', ['label', 'task', 'split', 'seed', 'count', 'metrics'])):
    """One evaluation run: `metrics` is a DepthMetrics, NormalMetrics or ClassificationMetrics"""
    __slots__ = ()

    def __new__(cls, label, task, split, seed, count, metrics):
        if count <= 0:
            raise ValueError('a metric report needs at least one sample')
        return super().__new__(cls, label, task, split, seed, count, metrics)

    def to_row(self):
        row = {'label': self.label, 'task': self.task, 'split': self.split, 'seed': self.seed, 'count': self.count}
        row.update(self.metrics._asdict())
        return row


def to_frame(reports):
    return pd.DataFrame([r.to_row() for r in reports])


def mean_rows(frame):
    """One `seed = mean` row per label, labels in order of first appearance"""
    metrics = [c for c in frame.columns if c not in _columns]
    grouped = frame.groupby('label', sort=False)
    means = grouped[metrics].mean()
    means['count'] = grouped['count'].sum()
    means['task'] = grouped['task'].first()
    means['split'] = grouped['split'].first()
    means['seed'] = 'mean'
    return means.reset_index()[frame.columns.tolist()]


def write_reports(path, reports, with_means=False):
    frame = to_frame(reports)
    if with_means:
        frame = pd.concat([frame, mean_rows(frame)], ignore_index=True)
    frame.to_csv(path, index=False, float_format='%.6f')
    log_metrics.debug('wrote {0} report rows to {1}'.format(len(frame), path))
    return frame


def write_summary(path, frame, extra=None):
    summary = {'rows': json.loads(frame.to_json(orient='records'))}
    summary.update(extra or {})
    with open(path, 'w') as f:
        json.dump(summary, f, indent=2, sort_keys=True)


def read_reports(path):
    return pd.read_csv(path)
