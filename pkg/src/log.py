import logging

logging.basicConfig(format='[%(levelname)s] [%(name)s] %(message)s', level=logging.INFO)

__prefix = 'echolab.'
log_main = logging.getLogger(__prefix + 'main')
log_sim = logging.getLogger(__prefix + 'sim')
log_dsp = logging.getLogger(__prefix + 'dsp')
log_autodiff = logging.getLogger(__prefix + 'autodiff')
log_models = logging.getLogger(__prefix + 'models')
log_metrics = logging.getLogger(__prefix + 'metrics')
log_dataset = logging.getLogger(__prefix + 'dataset')
log_experiments = logging.getLogger(__prefix + 'experiments')
log_commands = logging.getLogger(__prefix + 'commands')

log_matplotlib = logging.getLogger('matplotlib')
log_matplotlib.setLevel(logging.ERROR)

__loggers = [log_main, log_sim, log_dsp, log_autodiff, log_models, log_metrics, log_dataset, log_experiments, log_commands]


def set_level(level, logger=None):
    if level == 'error':
        log_level = logging.ERROR
    elif level == 'warning':
        log_level = logging.WARNING
    elif level == 'debug':
        log_level = logging.DEBUG
    else:
        log_level = logging.INFO

    if not logger:
        for l in __loggers:
            l.setLevel(log_level)
    else:
        logging.getLogger(__prefix + logger).setLevel(log_level)
