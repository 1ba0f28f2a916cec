from experiments.base import Experiment


class Experiment_Ablations(Experiment):
    """Depth transfer from each pretext variant: none, two-way orientation, scene matching, four-way orientation"""
    name = 'ablations'
    variants = (('SimpleVisualEchoes', 'pretext_simple'), ('BinaryMatching', 'binary_match'))

    def _run(self):
        checkpoints = {seed: self.pretext_checkpoint(seed) for seed in self.seeds}
        reports = []
        for seed in self.seeds:
            scratch = self.train('rgb2depth', seed, group='scratch')
            reports.append(self.test_report('Scratch', scratch.network, seed))
            for label, kind in self.variants:
                pretrained = self.train(kind, seed, group='pretext')
                transfer = self.train('rgb2depth', seed, init=pretrained.checkpoint, group=kind)
                reports.append(self.test_report(label, transfer.network, seed))
            transfer = self.train('rgb2depth', seed, init=checkpoints[seed], group='visualechoes')
            reports.append(self.test_report('VisualEchoes', transfer.network, seed))
        return reports
