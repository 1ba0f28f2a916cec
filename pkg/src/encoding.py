import struct

import numpy as np

from utils import LabError
from const import C_BlobMagic, C_BlobVersion, T_BlobFormatError
from profiling import profile, Scope


# dtype byte -> numpy little-endian dtype
_dtypes = {0: np.dtype('<f4')}
_header = struct.Struct('<4sBBB')
_dim = struct.Struct('<Q')


class BlobFormatError(LabError):
    def __init__(self, source, reason):
        self.source = source
        self.reason = reason

    def __str__(self):
        return T_BlobFormatError.format(self.source, self.reason)


class Encoder():
    """Tensor blob codec

    Layout: magic 'VETS', version byte, dtype byte (0 = float32), rank byte,
    one little-endian uint64 per dimension, then the row-major little-endian
    payload.
    """

    def encode(self, array):
        array = np.ascontiguousarray(array, dtype=_dtypes[0])
        header = _header.pack(C_BlobMagic, C_BlobVersion, 0, array.ndim)
        dims = b''.join(_dim.pack(d) for d in array.shape)
        return header + dims + array.tobytes(order='C')

    def decode_from(self, buffer, offset=0, source='<bytes>'):
        """Decode one blob starting at `offset`; returns (array, offset past the blob)"""
        if len(buffer) - offset < _header.size:
            raise BlobFormatError(source, 'truncated header')
        magic, version, dtype, rank = _header.unpack_from(buffer, offset)
        if magic != C_BlobMagic:
            raise BlobFormatError(source, 'bad magic {0!r}'.format(magic))
        if version != C_BlobVersion:
            raise BlobFormatError(source, 'unsupported version {0}'.format(version))
        if dtype not in _dtypes:
            raise BlobFormatError(source, 'unsupported dtype {0}'.format(dtype))
        offset += _header.size
        if len(buffer) - offset < rank * _dim.size:
            raise BlobFormatError(source, 'truncated dimensions')
        shape = tuple(_dim.unpack_from(buffer, offset + i * _dim.size)[0] for i in range(rank))
        offset += rank * _dim.size
        count = int(np.prod(shape, dtype=np.int64))
        nbytes = count * _dtypes[dtype].itemsize
        if len(buffer) - offset < nbytes:
            raise BlobFormatError(source, 'payload holds {0} bytes, expected {1}'.format(len(buffer) - offset, nbytes))
        array = np.frombuffer(buffer, dtype=_dtypes[dtype], count=count, offset=offset).reshape(shape)
        return array.astype(np.float32), offset + nbytes

    def decode(self, buffer, source='<bytes>'):
        array, end = self.decode_from(buffer, 0, source)
        if end != len(buffer):
            raise BlobFormatError(source, '{0} trailing bytes'.format(len(buffer) - end))
        return array

    @profile(Scope.Core)
    def write(self, path, array):
        with open(path, 'wb') as f:
            f.write(self.encode(array))

    def read(self, path):
        with open(path, 'rb') as f:
            return self.decode(f.read(), source=str(path))


encoder = Encoder()
