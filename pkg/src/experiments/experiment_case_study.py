from experiments.base import Experiment


class Experiment_CaseStudy(Experiment):
    """Depth from echoes, from RGB and from both, against the Average baseline"""
    name = 'case_study'
    rows = (('Echo2Depth', 'echo2depth'), ('RGB2Depth', 'rgb2depth'), ('RGB+Echo2Depth', 'rgbecho2depth'))

    def _run(self):
        reports = [self.average_report()]
        for seed in self.seeds:
            for label, kind in self.rows:
                result = self.train(kind, seed)
                reports.append(self.test_report(label, result.network, seed))
        return reports
