import functools
import time

from utils import AutoEnum
from log import log_main
from const import T_Log_Profile


__enabled = [False]


class Scope(AutoEnum):
    Core = ()
    Dataset = ()
    Training = ()
    Experiment = ()
    Command = ()


def set_enabled(enabled):
    __enabled[0] = bool(enabled)


def is_enabled():
    return __enabled[0]


class Profiler():
    def __init__(self, scope, name, args=None):
        self._scope = scope
        self._name = name
        self._args = args
        self.elapsed = 0.0

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *args):
        self.elapsed = time.perf_counter() - self._start
        if is_enabled():
            name = self._name if self._args is None else '{0}({1})'.format(self._name, self._args)
            log_main.info(T_Log_Profile.format(self._scope.name, name, self.elapsed))


def profile(scope):
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            if is_enabled():
                with Profiler(scope, name=func.__qualname__):
                    return func(*args, **kwargs)
            return func(*args, **kwargs)
        return wrapper
    return decorator
