metaattr = 'metaattr'
file_name = 'file_name'
columns = 'columns'


class RecordModel(type):
    """Metaclass for flat JSON records

    `metaattr` lists the fields: each becomes a class member holding its own
    name (so `DatasetRecord.scene_id == 'scene_id'` can key dicts) and an
    instance attribute filled positionally, from a tuple/list, or by keyword.
    """
    def __new__(cls, name, bases, namespace, **kwargs):
        namespace[file_name] = kwargs.get(file_name)
        for x in kwargs.get(metaattr):
            namespace[x] = x
        namespace[columns] = kwargs.get(metaattr)
        namespace[metaattr] = kwargs.get(metaattr)
        namespace['to_dict'] = _to_dict
        namespace['__eq__'] = _eq
        namespace['__repr__'] = _repr
        namespace['__hash__'] = None
        return super().__new__(cls, name, bases, namespace)

    def __init__(cls, name, bases, namespace, **kwargs):
        super().__init__(name, bases, namespace)

    def __call__(cls, *args, **kwargs):
        obj = type.__call__(cls)
        fields = cls.__dict__[metaattr]
        values = []
        if len(args) == 1 and isinstance(args[0], (tuple, list)):
            values = list(args[0])
        elif args:
            values = list(args)
        if values and len(values) != len(fields):
            raise TypeError('{0} expects {1} fields, got {2}'.format(cls.__name__, len(fields), len(values)))
        for i, f in enumerate(fields):
            setattr(obj, f, values[i] if values else kwargs.get(f))
        return obj

    def from_dict(cls, d):
        missing = [f for f in cls.columns if f not in d]
        if missing:
            raise KeyError(', '.join(missing))
        return cls(**{f: d[f] for f in cls.columns})

    def __str__(self):
        return self.file_name


def _to_dict(self):
    return {f: getattr(self, f) for f in type(self).columns}


def _eq(self, other):
    return type(self) is type(other) and self.to_dict() == other.to_dict()


def _repr(self):
    return '{0}({1})'.format(type(self).__name__, ', '.join('{0}={1!r}'.format(f, getattr(self, f)) for f in type(self).columns))
