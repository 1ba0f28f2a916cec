import json
import os
import struct
from collections import OrderedDict

from utils import LabError
from const import (C_CheckpointMagic, C_CheckpointMetaName, T_CheckpointMismatch,
                   T_Log_CheckpointSaved, T_Log_CheckpointLoaded)
from encoding import encoder, BlobFormatError
from log import log_models


_count = struct.Struct('<I')
_name_len = struct.Struct('<H')
_blob_len = struct.Struct('<Q')


class CheckpointMismatch(LabError):
    def __init__(self, names):
        self.names = sorted(names)

    def __str__(self):
        return T_CheckpointMismatch.format(', '.join(self.names))


def encode_state(state):
    """'VETC', uint32 count, then per parameter: uint16 name length, name, uint64 blob length, blob"""
    parts = [C_CheckpointMagic, _count.pack(len(state))]
    for name, array in state.items():
        raw = name.encode('utf-8')
        blob = encoder.encode(array)
        parts += [_name_len.pack(len(raw)), raw, _blob_len.pack(len(blob)), blob]
    return b''.join(parts)


def decode_state(buffer, source='<bytes>'):
    if buffer[:4] != C_CheckpointMagic:
        raise BlobFormatError(source, 'not a checkpoint container')
    offset = 4
    try:
        (count,) = _count.unpack_from(buffer, offset)
        offset += _count.size
        state = OrderedDict()
        for _ in range(count):
            (length,) = _name_len.unpack_from(buffer, offset)
            offset += _name_len.size
            name = bytes(buffer[offset:offset + length]).decode('utf-8')
            offset += length
            (size,) = _blob_len.unpack_from(buffer, offset)
            offset += _blob_len.size
            state[name] = encoder.decode(buffer[offset:offset + size], source='{0}:{1}'.format(source, name))
            offset += size
    except struct.error:
        raise BlobFormatError(source, 'truncated checkpoint')
    if offset != len(buffer):
        raise BlobFormatError(source, '{0} trailing bytes'.format(len(buffer) - offset))
    return state


def save_checkpoint(path, network, meta=None):
    state = network.state_dict()
    with open(path, 'wb') as f:
        f.write(encode_state(state))
    if meta is not None:
        with open(os.path.join(os.path.dirname(path), C_CheckpointMetaName), 'w') as f:
            json.dump(meta, f, indent=2, sort_keys=True)
    log_models.info(T_Log_CheckpointSaved.format(path, len(state)))


def load_checkpoint(path):
    with open(path, 'rb') as f:
        return decode_state(f.read(), source=str(path))


def load_state(network, state, prefix=''):
    """Copy `state` into the parameters of `network` whose names start with `prefix`

    Every selected parameter must be present with the same shape; with an
    empty prefix the checkpoint may not carry extra names either.
    """
    params = OrderedDict((n, p) for n, p in network.named_parameters() if n.startswith(prefix))
    offending = [n for n, p in params.items() if n not in state or state[n].shape != p.data.shape]
    if not prefix:
        offending += [n for n in state if n not in params]
    if offending or not params:
        raise CheckpointMismatch(offending or [prefix + '*'])
    for name, param in params.items():
        param.data = state[name].astype(param.data.dtype)
    return len(params)


def load_encoder(network, path):
    """Initialize the visual encoder of `network` from a checkpoint (any kind sharing `encoder.*`)"""
    count = load_state(network, load_checkpoint(path), prefix='encoder.')
    log_models.info(T_Log_CheckpointLoaded.format(path, count))
    return count
