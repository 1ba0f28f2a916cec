import os

from commands.core import cmds, required_args, optional_args, aliases
from autodiff.gradcheck import check_layers, LAYER_NAMES
from models.checks import check_networks
from models.core import MODEL_KINDS
from plotting import plot as plot_csv
from utils import LabError, ArrayFormater
from const import C_Version, T_GradCheckFailed, T_UnknownCheck, T_Info
from log import log_commands


class GradCheckFailed(LabError):
    def __init__(self, names):
        self.names = names

    def __str__(self):
        return T_GradCheckFailed.format(', '.join(self.names))


class UnknownCheck(LabError):
    def __init__(self, what, name, options):
        self.what = what
        self.name = name
        self.options = options

    def __str__(self):
        return T_UnknownCheck.format(self.what, self.name, ', '.join(self.options))


def _split(value, known, what):
    if not value:
        return list(known)
    names = [v.strip() for v in value.split(',') if v.strip()]
    for name in names:
        if name not in known:
            raise UnknownCheck(what, name, known)
    return names


@optional_args('layers', 'kinds', 'seed', seed='0')
@cmds.register()
def gradcheck(layers=None, kinds=None, seed='0'):
    """Finite-difference check of every layer and every model kind (float64)"""
    results = check_layers(_split(layers, LAYER_NAMES, 'layer'), int(seed))
    results += check_networks(_split(kinds, MODEL_KINDS, 'model kind'), int(seed))
    a = ArrayFormater('gradcheck', 4)
    a.add('name', 'max rel err', 'entries', 'status')
    for r in results:
        a.add(r.name, '{0:.2e}'.format(r.max_error), r.entries, 'ok' if r.passed else 'FAILED')
    log_commands.info('\n' + a.get())
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise GradCheckFailed(failed)


@required_args('report')
@optional_args('out')
@cmds.register(existingPaths=('report',), producedBy={'report': 'echolab experiment'})
def plot(report, out=None):
    """Write .dat series and PNG charts for a report CSV or a training log.csv"""
    for path in plot_csv(report, out):
        log_commands.debug('plot: ' + os.path.abspath(path))


@aliases('about')
@cmds.register()
def info():
    """Version and description"""
    log_commands.info('\n' + T_Info.format(C_Version))


@aliases('commands')
@cmds.register()
def help():
    """List registered commands"""
    cmds.dump()
