import copy
import json
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from utils import LabError
from const import (C_SampleRate, C_ClipSeconds, C_SpeedOfSound, C_HeadRadius, C_ShadowFloor, T_ConfigError,
                   T_ConfigFileError)


_template_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'templates')


class ConfigError(LabError):
    def __init__(self, location, reason):
        self.location = location
        self.reason = reason

    def __str__(self):
        return T_ConfigError.format(self.location, self.reason)


class ConfigFileError(LabError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason

    def __str__(self):
        return T_ConfigFileError.format(self.path, self.reason)


DEFAULTS = {
    'experiment': {
        'seed': 0,
        'seeds': [0, 1, 2],
        'output': 'runs/desk',
        'dataset': 'data/desk',
    },
    'scenes': {
        'count': 21,
        'room_x': [4.0, 7.0],
        'room_y': [4.0, 7.0],
        'room_z': [2.5, 3.2],
        'obstacles': [0, 3],
        'obstacle_size': [0.4, 1.4],
        'obstacle_height': [0.5, 2.2],
        'floor_gap': 0.02,
        'obstacle_gap': 0.3,
        'max_attempts': 200,
        'materials': [
            {'reflection': 0.85, 'albedo': [0.85, 0.82, 0.78]},
            {'reflection': 0.70, 'albedo': [0.55, 0.38, 0.22]},
            {'reflection': 0.30, 'albedo': [0.35, 0.30, 0.45]},
            {'reflection': 0.95, 'albedo': [0.60, 0.60, 0.62]},
            {'reflection': 0.20, 'albedo': [0.62, 0.20, 0.20]},
            {'reflection': 0.90, 'albedo': [0.80, 0.86, 0.90]},
            {'reflection': 0.50, 'albedo': [0.30, 0.55, 0.30]},
        ],
    },
    'grid': {
        'spacing': 1.0,
        'clearance': 0.5,
        'sensor_height': 1.5,
    },
    'camera': {
        'fov': 90.0,
        'width': 64,
        'height': 64,
        'max_depth': 10.0,
    },
    'acoustics': {
        'sample_rate': C_SampleRate,
        'chirp_f0': 20.0,
        'chirp_f1': 20000.0,
        'chirp_duration': 0.003,
        'clip': C_ClipSeconds,
        'max_order': 3,
        'speed_of_sound': C_SpeedOfSound,
        'head_radius': C_HeadRadius,
        'shadow_floor': C_ShadowFloor,
        'convolution': 'fft',
    },
    'stft': {
        'win': 64,
        'hop': 16,
        'nfft': 512,
    },
    'model': {
        'widths': [16, 32, 64, 128],
        'audio_widths': [16, 32, 64],
        'audio_dim': 128,
        'fusion_dim': 128,
    },
    'train': {
        'batch_size': 8,
        'lr': 1e-3,
        'beta1': 0.9,
        'beta2': 0.999,
        'eps': 1e-8,
        'pretext_epochs': 30,
        'downstream_epochs': 50,
        'queue_size': 4,
        'max_batches': 0,
    },
    'split': {
        'train': 16,
        'val': 2,
        'test': 3,
    },
    'dataset': {
        'workers': 1,
    },
}


def _is_required(value):
    return value.startswith('required')


def _get_type(value):
    split = value.split('_')
    datatype = split[1]
    name = '_'.join(split[2:])
    return datatype, name


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class Template:
    """Declarative schema read from src/templates/

    Every key is described as `required_<type>` or `optional_<type>`; struct,
    array and enum types name their element definition (`array_material`,
    `enum_convolution`, `struct_camera`).
    """
    def __init__(self, template):
        self.template = template
        self.structs = {}
        self.enums = {}
        with open(os.path.join(_template_dir, template)) as data_file:
            raw_template = json.load(data_file)
            if 'structs' in raw_template:
                self.structs = raw_template['structs']
            if 'enums' in raw_template:
                self.enums = raw_template['enums']
            self.structs['main'] = {data: raw_template[data] for data in raw_template if data not in ['structs', 'enums']}

    def _get_value(self, data, datatype, name, location):
        if datatype == 'string':
            if isinstance(data, str):
                return True, data
            return False, 'expected string'
        if datatype == 'float':
            if _is_number(data):
                return True, float(data)
            return False, 'expected float'
        if datatype == 'int':
            if isinstance(data, int) and not isinstance(data, bool):
                return True, data
            return False, 'expected int'
        if datatype == 'bool':
            if isinstance(data, bool):
                return True, data
            return False, 'expected bool'
        if datatype == 'range':
            return self._get_range(data)
        if datatype == 'array':
            return self._get_array(data, name, location)
        if datatype == 'enum':
            return self._get_enum(data, name)
        if datatype == 'struct':
            return self._get_struct(data, name, location)
        return False, 'unknown type ' + datatype

    def _get_range(self, data):
        if not isinstance(data, (list, tuple)) or len(data) != 2 or not all(_is_number(d) for d in data):
            return False, 'expected [min, max] pair'
        if data[0] > data[1]:
            return False, 'range is empty or inverted'
        return True, [data[0], data[1]]

    def _get_array(self, data, name, location):
        if not isinstance(data, (list, tuple)):
            return False, 'expected array'
        clean_data = []
        for i, d in enumerate(data):
            if name in self.structs:
                ok, s = self._get_struct(d, name, '{0}[{1}]'.format(location, i))
            else:
                ok, s = self._get_value(d, name, '', '{0}[{1}]'.format(location, i))
            if not ok:
                return False, s if name in self.structs else '[{0}]: {1}'.format(i, s)
            clean_data.append(s)
        return True, clean_data

    def _get_enum(self, data, enum):
        if enum not in self.enums:
            return False, enum + ' not declared as enum'
        if data in self.enums[enum]:
            return True, data
        return False, '{0} not in enum {1}'.format(data, enum)

    def _get_struct(self, data, struct, location):
        if struct not in self.structs:
            raise ConfigError(location, struct + ' not declared as struct')
        if not isinstance(data, dict):
            raise ConfigError(location, 'expected table')
        for key in data:
            if key not in self.structs[struct]:
                raise ConfigError(_join(location, key), 'unknown key')

        clean_data = {}
        for key, info in self.structs[struct].items():
            key_location = _join(location, key)
            if key not in data:
                if _is_required(info):
                    raise ConfigError(key_location, 'missing required key')
                continue
            datatype, name = _get_type(info)
            ok, value = self._get_value(data[key], datatype, name, key_location)
            if not ok:
                raise ConfigError(key_location, value)
            clean_data[key] = value
        return True, clean_data

    def validate(self, data):
        ok, clean_data = self._get_struct(data, 'main', '')
        return clean_data


def _join(location, key):
    return key if not location else location + '.' + key


def _merge(base, update):
    merged = copy.deepcopy(base)
    for k, v in update.items():
        if isinstance(v, dict) and isinstance(merged.get(k), dict):
            merged[k] = _merge(merged[k], v)
        else:
            merged[k] = copy.deepcopy(v)
    return merged


def _check(condition, location, reason):
    if not condition:
        raise ConfigError(location, reason)


def _check_semantics(data):
    scenes = data['scenes']
    for axis in ('room_x', 'room_y', 'room_z'):
        _check(scenes[axis][0] > 0, 'scenes.' + axis, 'room extents must be positive')
    _check(scenes['count'] > 0, 'scenes.count', 'must be positive')
    _check(scenes['obstacles'][0] >= 0, 'scenes.obstacles', 'counts must be non-negative')
    _check(scenes['obstacle_size'][0] > 0, 'scenes.obstacle_size', 'sizes must be positive')
    _check(scenes['obstacle_height'][0] > 0, 'scenes.obstacle_height', 'heights must be positive')
    _check(len(scenes['materials']) > 0, 'scenes.materials', 'palette is empty')
    for i, m in enumerate(scenes['materials']):
        location = 'scenes.materials[{0}]'.format(i)
        _check(0.0 <= m['reflection'] <= 1.0, location + '.reflection', 'must lie in [0, 1]')
        _check(len(m['albedo']) == 3, location + '.albedo', 'expected 3 channels')
        _check(all(0.0 <= c <= 1.0 for c in m['albedo']), location + '.albedo', 'channels must lie in [0, 1]')

    grid = data['grid']
    _check(grid['spacing'] > 0, 'grid.spacing', 'must be positive')
    _check(grid['clearance'] >= 0, 'grid.clearance', 'must be non-negative')

    camera = data['camera']
    _check(0 < camera['fov'] < 180, 'camera.fov', 'must lie in (0, 180)')
    _check(camera['width'] >= 8 and camera['height'] >= 8, 'camera', 'width and height must be at least 8')
    _check(camera['max_depth'] > 0, 'camera.max_depth', 'must be positive')

    acoustics = data['acoustics']
    _check(acoustics['sample_rate'] > 0, 'acoustics.sample_rate', 'must be positive')
    _check(acoustics['max_order'] >= 0, 'acoustics.max_order', 'must be non-negative')
    _check(acoustics['head_radius'] > 0, 'acoustics.head_radius', 'must be positive')
    _check(0 < acoustics['shadow_floor'] <= 1, 'acoustics.shadow_floor', 'must lie in (0, 1]')

    stft = data['stft']
    _check(stft['hop'] > 0, 'stft.hop', 'must be positive')
    _check(stft['nfft'] >= stft['win'], 'stft.nfft', 'must be at least the window length')

    model = data['model']
    _check(len(model['widths']) == 4, 'model.widths', 'expected 4 encoder widths')
    _check(camera['width'] % 16 == 0 and camera['height'] % 16 == 0, 'camera', 'width and height must be multiples of 16')

    train = data['train']
    _check(train['batch_size'] > 0, 'train.batch_size', 'must be positive')
    _check(train['lr'] > 0, 'train.lr', 'must be positive')

    split = data['split']
    _check(min(split.values()) >= 0 and split['train'] > 0, 'split', 'train must be positive and no split negative')


class Section:
    def __init__(self, data):
        self.__dict__['_data'] = data

    def __getattr__(self, key):
        if key.startswith('_'):
            raise AttributeError(key)
        try:
            value = self._data[key]
        except KeyError:
            raise AttributeError(key)
        return Section(value) if isinstance(value, dict) else value

    def __setattr__(self, key, value):
        raise AttributeError('configuration sections are read-only')

    def __getitem__(self, key):
        return self._data[key]

    def __contains__(self, key):
        return key in self._data

    def as_dict(self):
        return copy.deepcopy(self._data)


class ExperimentConfig(Section):
    """Validated experiment configuration with attribute access per section"""

    def override(self, **sections):
        """New configuration with some keys replaced, e.g. override(experiment={'seed': 3})"""
        return build_config(_merge(self._data, sections))


template = Template('experiment.template')


def build_config(raw):
    data = template.validate(_merge(DEFAULTS, raw))
    _check_semantics(data)
    return ExperimentConfig(data)


def default_config():
    return build_config({})


def load_config(path):
    try:
        with open(path, 'rb') as f:
            raw = tomllib.load(f)
    except OSError as e:
        raise ConfigFileError(path, e.strerror)
    except tomllib.TOMLDecodeError as e:
        raise ConfigFileError(path, str(e))
    return build_config(raw)
