import os

from commands.core import cmds, required_args, optional_args
from config import load_config
from const import C_CheckpointName
from dataset.core import open_dataset, DatasetError
from experiments.base import MissingArtifact
from experiments.core import run_experiment
from metrics.report import MetricReport, write_reports
from models.checkpoint import load_checkpoint, load_state
from models.core import build_model, MODEL_KINDS, UnknownModelKind
from models.training import train as train_model, evaluate, evaluate_average
from utils import ArrayFormater
from log import log_commands


def _config(dataset, config):
    return load_config(config) if config else dataset.config


@required_args('task', 'dataset', 'out')
@optional_args('init', 'seed', 'config', 'epochs', init='scratch', seed='0')
@cmds.register(existingPaths=('dataset', 'config'), producedBy={'dataset': 'echolab gen-dataset'})
def train(task, dataset, out, init='scratch', seed='0', config=None, epochs=None):
    """Train one model kind on the train split and save its checkpoint"""
    if task not in MODEL_KINDS:
        raise UnknownModelKind(task)
    data = open_dataset(dataset)
    cfg = _config(data, config)
    if init != 'scratch' and not os.path.isfile(init):
        raise MissingArtifact(init, 'echolab train --task pretext')
    result = train_model(task, data, cfg, int(seed), out, init=None if init == 'scratch' else init,
                         epochs=int(epochs) if epochs else None)
    log_commands.info('train: {0} -> {1}'.format(task, result.checkpoint))


@required_args('task', 'dataset')
@optional_args('checkpoint', 'split', 'config', 'out', split='test')
@cmds.register(existingPaths=('dataset', 'config', 'checkpoint'), producedBy={'checkpoint': 'echolab train'})
def eval(task, dataset, checkpoint=None, split='test', config=None, out=None):
    """Evaluate a checkpoint (or the `average` baseline) on one split"""
    data = open_dataset(dataset)
    cfg = _config(data, config)
    scenes = data.scenes(split)
    if task == 'average':
        result = evaluate_average(data, scenes)
    else:
        if checkpoint is None:
            raise MissingArtifact(os.path.join('<run>', C_CheckpointName), 'echolab train --task ' + task)
        network = build_model(task, cfg, 0)
        load_state(network, load_checkpoint(checkpoint))
        hyper = cfg['train']
        result = evaluate(network, data, scenes, hyper['batch_size'], 0, hyper['queue_size'])
    if result.count == 0:
        raise DatasetError('split `{0}` holds no views'.format(split))

    report = MetricReport(task, task, split, 'eval', result.count, result.metrics)
    a = ArrayFormater('eval {0} on {1} ({2} views)'.format(task, split, result.count), 2)
    for key, value in result.metrics._asdict().items():
        a.add(key, value)
    log_commands.info('\n' + a.get())
    if out is None:
        base = os.path.dirname(checkpoint) if checkpoint else dataset
        out = os.path.join(base, 'eval_{0}_{1}.csv'.format(task, split))
    write_reports(out, [report])


@required_args('name', 'config')
@cmds.register(existingPaths=('config',))
def experiment(name, config):
    """Run one experiment of the ladder: case_study, pretext, transfer_depth, transfer_normals, ablations"""
    report = run_experiment(name, load_config(config))
    log_commands.info('\n' + report.to_string(index=False))
