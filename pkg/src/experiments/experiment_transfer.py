from experiments.base import Experiment


class Experiment_Transfer(Experiment):
    """Downstream training from scratch and from the pretext encoder, per seed"""
    kind = None
    seeds_in_report = True

    def _run(self):
        # fail before any training if a pretext checkpoint is missing
        checkpoints = {seed: self.pretext_checkpoint(seed) for seed in self.seeds}
        reports = []
        for seed in self.seeds:
            scratch = self.train(self.kind, seed, group='scratch')
            reports.append(self.test_report('Scratch', scratch.network, seed))
            pretrained = self.train(self.kind, seed, init=checkpoints[seed], group='visualechoes')
            reports.append(self.test_report('VisualEchoes', pretrained.network, seed))
        return reports


class Experiment_TransferDepth(Experiment_Transfer):
    name = 'transfer_depth'
    kind = 'rgb2depth'


class Experiment_TransferNormals(Experiment_Transfer):
    name = 'transfer_normals'
    kind = 'normals'
