from utils import LabError
from const import T_UnknownExperiment, T_Log_ExperimentStart, T_Log_ExperimentDone
from dataset.core import open_dataset
from experiments.experiment_case_study import Experiment_CaseStudy
from experiments.experiment_pretext import Experiment_Pretext
from experiments.experiment_transfer import Experiment_TransferDepth, Experiment_TransferNormals
from experiments.experiment_ablations import Experiment_Ablations
from log import log_experiments
from profiling import Profiler, Scope


class UnknownExperiment(LabError):
    def __init__(self, name, options):
        self.name = name
        self.options = options

    def __str__(self):
        return T_UnknownExperiment.format(self.name, ', '.join(self.options))


class Experiments:
    _registry = {
        'case_study': Experiment_CaseStudy,
        'pretext': Experiment_Pretext,
        'transfer_depth': Experiment_TransferDepth,
        'transfer_normals': Experiment_TransferNormals,
        'ablations': Experiment_Ablations,
    }

    @property
    def names(self):
        return list(self._registry)

    def _create_new_experiment(self, name, cfg, dataset):
        if name not in self._registry:
            raise UnknownExperiment(name, self.names)
        return self._registry[name](cfg, dataset)

    def run(self, name, cfg, dataset=None):
        """Run one experiment on the dataset named by `experiment.dataset` (or the one given)"""
        if name not in self._registry:
            raise UnknownExperiment(name, self.names)
        dataset = dataset or open_dataset(cfg['experiment']['dataset'])
        experiment = self._create_new_experiment(name, cfg, dataset)
        log_experiments.info(T_Log_ExperimentStart.format(name, experiment.seeds, experiment.output))
        with Profiler(Scope.Experiment, name):
            report = experiment.run()
        log_experiments.info(T_Log_ExperimentDone.format(name, len(report), experiment.output))
        return report


experiments = Experiments()


def run_experiment(name, cfg, dataset=None):
    return experiments.run(name, cfg, dataset)
