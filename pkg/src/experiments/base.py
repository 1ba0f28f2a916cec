import os

import pandas as pd

from utils import LabError
from const import (C_CheckpointName, C_ReportName, C_ReportSeedsName, C_ReportSummaryName, T_MissingArtifact)
from metrics.report import MetricReport, to_frame, mean_rows, write_summary
from models.training import train, evaluate, evaluate_average


class MissingArtifact(LabError):
    def __init__(self, artifact, command):
        self.artifact = artifact
        self.command = command

    def __str__(self):
        return T_MissingArtifact.format(self.artifact, self.command)


class Experiment:
    """One rung of the experiment ladder

    Subclasses set `name` and implement `_run`, returning MetricReports.
    Artifacts go under <experiment.output>/<name>/.
    """
    name = None
    # report.csv carries per-seed rows as well as the means
    seeds_in_report = False

    def __init__(self, cfg, dataset):
        self._cfg = cfg
        self._dataset = dataset
        self._root = cfg['experiment']['output']
        self.output = os.path.join(self._root, self.name)
        self._on_init()

    def _on_init(self):
        pass

    @property
    def seeds(self):
        return list(self._cfg['experiment']['seeds'])

    def run_dir(self, kind, seed, group=None):
        parts = [self.output] + ([group] if group else []) + [kind, 'seed_{0}'.format(seed)]
        return os.path.join(*parts)

    def pretext_checkpoint(self, seed, kind='pretext'):
        """Checkpoint of the pretext experiment for `seed`; MissingArtifact if it was never trained"""
        path = os.path.join(self._root, 'pretext', kind, 'seed_{0}'.format(seed), C_CheckpointName)
        if not os.path.isfile(path):
            raise MissingArtifact(path, 'echolab experiment --name pretext --config <config>')
        return path

    def train(self, kind, seed, init=None, group=None):
        return train(kind, self._dataset, self._cfg, seed, self.run_dir(kind, seed, group), init=init)

    def test_report(self, label, network, seed):
        hyper = self._cfg['train']
        result = evaluate(network, self._dataset, self._dataset.scenes('test'), hyper['batch_size'], seed,
                          hyper['queue_size'])
        return MetricReport(label, network.kind, 'test', seed, result.count, result.metrics)

    def average_report(self):
        result = evaluate_average(self._dataset, self._dataset.scenes('test'))
        return MetricReport('Average', 'average', 'test', 'all', result.count, result.metrics)

    def run(self):
        os.makedirs(self.output, exist_ok=True)
        return self._finish(self._run())

    def _run(self):
        raise NotImplementedError()

    def _finish(self, reports):
        per_seed = to_frame(reports)
        means = mean_rows(per_seed)
        per_seed.to_csv(os.path.join(self.output, C_ReportSeedsName), index=False, float_format='%.6f')
        report = pd.concat([per_seed, means], ignore_index=True) if self.seeds_in_report else means
        report.to_csv(os.path.join(self.output, C_ReportName), index=False, float_format='%.6f')

        metrics = [c for c in per_seed.columns if c not in ('label', 'task', 'split', 'seed', 'count')]
        spread = per_seed.groupby('label', sort=False)[metrics].std(ddof=0).fillna(0.0)
        write_summary(os.path.join(self.output, C_ReportSummaryName), means,
                      {'experiment': self.name, 'seeds': self.seeds,
                       'std': {label: row.to_dict() for label, row in spread.iterrows()}})
        return report
