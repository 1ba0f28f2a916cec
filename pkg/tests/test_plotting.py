import os

import pandas as pd
import pytest

from models.training import train
from plotting import plot, PlotInputError


@pytest.fixture
def report_csv(tmp_path):
    frame = pd.DataFrame({
        'label': ['Scratch', 'VisualEchoes', 'Scratch', 'VisualEchoes'],
        'task': ['rgb2depth'] * 4,
        'split': ['test'] * 4,
        'seed': ['0', '0', 'mean', 'mean'],
        'count': [16, 16, 16, 16],
        'rms': [1.2, 0.9, 1.2, 0.9],
        'delta1': [0.5, 0.6, 0.5, 0.6],
    })
    path = tmp_path / 'report.csv'
    frame.to_csv(path, index=False)
    return path


def test_report(report_csv, tmp_path):
    out = tmp_path / 'plots'
    written = plot(str(report_csv), str(out))
    assert sorted(os.path.basename(p) for p in written) == [
        'report_delta1.dat', 'report_delta1.png', 'report_rms.dat', 'report_rms.png']
    # mean rows only
    assert (out / 'report_rms.dat').read_text() == 'Scratch\t1.200000\nVisualEchoes\t0.900000\n'


def test_report_defaults_next_to_input(report_csv):
    plot(str(report_csv))
    assert os.path.isfile(report_csv.parent / 'report_rms.png')


def test_training_log(tmp_path):
    path = tmp_path / 'log.csv'
    pd.DataFrame({'epoch': [0, 1, 1, 2, 2], 'split': ['val', 'train', 'val', 'train', 'val'],
                  'loss': [0.9, 0.7, 0.8, 0.5, 0.6], 'metric': ['rms', 'loss', 'rms', 'loss', 'rms'],
                  'value': [2.0, 0.7, 1.5, 0.5, 1.2]}).to_csv(path, index=False)
    written = [os.path.basename(p) for p in plot(str(path))]
    assert written == ['log_val_loss.dat', 'log_train_loss.dat', 'log_loss.png', 'log_val_rms.dat']
    assert (tmp_path / 'log_val_rms.dat').read_text().splitlines() == ['0\t2.000000', '1\t1.500000', '2\t1.200000']


def test_real_training_log(tiny_dataset, tiny_cfg, tmp_path):
    train('rgb2depth', tiny_dataset, tiny_cfg, 0, str(tmp_path))
    written = plot(str(tmp_path / 'log.csv'))
    assert any(p.endswith('log_loss.png') for p in written)


@pytest.mark.parametrize('content, reason', [
    ('', 'No columns'),
    ('label,rms\n', 'no rows'),
    ('a,b\n1,2\n', 'neither a report nor a training log'),
])
def test_bad_input(tmp_path, content, reason):
    path = tmp_path / 'x.csv'
    path.write_text(content)
    with pytest.raises(PlotInputError) as e:
        plot(str(path))
    assert reason in str(e.value)
