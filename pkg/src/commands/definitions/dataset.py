from commands.core import cmds, required_args, optional_args, aliases
from config import load_config
from dataset.generation import gen_dataset as generate
from log import log_commands


@required_args('config', 'out')
@optional_args('workers', 'seed')
@aliases('gen')
@cmds.register(existingPaths=('config',))
def gen_dataset(config, out, workers=None, seed=None):
    """Generate scenes, views, echoes and spectrograms into a dataset directory"""
    cfg = load_config(config)
    if seed is not None:
        cfg = cfg.override(experiment={'seed': int(seed)})
    records = generate(cfg, out, int(workers) if workers else None)
    log_commands.info('gen-dataset: {0} positions written to {1}'.format(len(records), out))
