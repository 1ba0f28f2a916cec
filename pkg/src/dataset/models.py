from dataset.meta import RecordModel


# blob kinds stored per (position, orientation)
C_BlobKinds = ('rgb', 'depth', 'normals', 'echo', 'spec')


class DatasetRecord(metaclass=RecordModel,
                    file_name='manifest.jsonl',
                    metaattr=['scene_id', 'position_id', 'position', 'views']):
    """One navigable position: `views` maps '0'/'90'/'180'/'270' to {blob kind: relative path}"""
    pass


class SceneEntry(metaclass=RecordModel,
                 file_name='summary.json',
                 metaattr=['scene_id', 'seed', 'path', 'extents', 'obstacles', 'positions']):
    pass


class SplitEntry(metaclass=RecordModel,
                 file_name='split.json',
                 metaattr=['seed', 'train', 'val', 'test']):
    pass


class SpecStats(metaclass=RecordModel,
                file_name='spec_stats.json',
                metaattr=['mean', 'std', 'count']):
    """Per-channel spectrogram statistics over the train split"""
    pass
