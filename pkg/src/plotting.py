"""Plot-ready data files and figures from report CSVs and training logs"""
import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd

from utils import LabError
from const import T_PlotInputError
from log import log_main


_id_columns = ('label', 'task', 'split', 'seed', 'count')


class PlotInputError(LabError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason

    def __str__(self):
        return T_PlotInputError.format(self.path, self.reason)


def savefig(fig, path):
    fig.savefig(path, dpi=120, bbox_inches='tight')
    plt.close(fig)


def _read(path):
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise PlotInputError(path, str(e))
    if frame.empty:
        raise PlotInputError(path, 'no rows')
    return frame


def _write_dat(path, rows):
    with open(path, 'w') as f:
        for key, value in rows:
            f.write('{0}\t{1:.6f}\n'.format(str(key).replace(' ', '_'), value))


def plot_report(frame, out_dir, stem):
    """One .dat and one bar chart per metric column; mean rows only when present"""
    if 'seed' in frame.columns and (frame['seed'].astype(str) == 'mean').any():
        frame = frame[frame['seed'].astype(str) == 'mean']
    metrics = [c for c in frame.columns if c not in _id_columns]
    written = []
    for metric in metrics:
        rows = list(zip(frame['label'], frame[metric].astype(float)))
        dat = os.path.join(out_dir, '{0}_{1}.dat'.format(stem, metric))
        _write_dat(dat, rows)
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.bar([str(r[0]) for r in rows], [r[1] for r in rows], color='#4c72b0')
        ax.set_ylabel(metric)
        ax.set_title('{0}: {1}'.format(stem, metric))
        ax.tick_params(axis='x', rotation=20)
        png = os.path.join(out_dir, '{0}_{1}.png'.format(stem, metric))
        savefig(fig, png)
        written += [dat, png]
    return written


def plot_training_log(frame, out_dir, stem):
    """Loss curve per split, plus the validation metric"""
    written = []
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for split, group in frame.groupby('split', sort=False):
        group = group.dropna(subset=['loss'])
        dat = os.path.join(out_dir, '{0}_{1}_loss.dat'.format(stem, split))
        _write_dat(dat, zip(group['epoch'], group['loss'].astype(float)))
        written.append(dat)
        ax.plot(group['epoch'], group['loss'], marker='o', label=split)
    ax.set_xlabel('epoch')
    ax.set_ylabel('loss')
    ax.legend()
    png = os.path.join(out_dir, '{0}_loss.png'.format(stem))
    savefig(fig, png)
    written.append(png)

    val = frame[frame['split'] == 'val']
    if not val.empty:
        metric = val['metric'].iloc[0]
        dat = os.path.join(out_dir, '{0}_val_{1}.dat'.format(stem, metric))
        _write_dat(dat, zip(val['epoch'], val['value'].astype(float)))
        written.append(dat)
    return written


def plot(path, out_dir=None):
    """Dispatch on the CSV layout: experiment report or training log"""
    frame = _read(path)
    out_dir = out_dir or os.path.dirname(os.path.abspath(path))
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(path))[0]
    if 'epoch' in frame.columns:
        written = plot_training_log(frame, out_dir, stem)
    elif 'label' in frame.columns:
        written = plot_report(frame, out_dir, stem)
    else:
        raise PlotInputError(path, 'neither a report nor a training log')
    log_main.info('plot: wrote {0} files to {1}'.format(len(written), out_dir))
    return written
