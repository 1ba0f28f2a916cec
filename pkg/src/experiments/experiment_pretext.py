from experiments.base import Experiment


class Experiment_Pretext(Experiment):
    """Orientation-consistency pretraining; its checkpoints seed the transfer experiments"""
    name = 'pretext'
    seeds_in_report = True

    def _run(self):
        reports = []
        for seed in self.seeds:
            result = self.train('pretext', seed)
            reports.append(self.test_report('VisualEchoes', result.network, seed))
        return reports
