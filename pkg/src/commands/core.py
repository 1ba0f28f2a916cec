import argparse
import json
import os
import sys

from utils import LabError, print_array
from log import log_commands, set_level
from profiling import Profiler, Scope, set_enabled
from const import T_Log_ValidatedCommand, T_HelpGlobal
from experiments.base import MissingArtifact


commandFormat = '| {0:12} | {1:10} | {2:30} | {3:40} |'


class Attributes:
    def __init__(self, **kwargs):
        # names of arguments that must point at existing paths before the command runs
        self.existingPaths = kwargs.get('existingPaths', ())
        self.producedBy = kwargs.get('producedBy', {})


class Command:
    def __init__(self, name, cb, attributes=None):
        self.name = name
        self.cb = cb
        self.attributes = attributes
        self.aliases = []
        self.reqParams = []
        self.optParams = []
        self.defaults = {}

    def __repr__(self):
        return '[Command:%s]' % self.name

    def add_required_params(self, *args):
        self.reqParams = args
        return self

    def add_optional_params(self, *args, **defaults):
        self.optParams = args
        self.defaults = defaults
        return self

    def add_aliases(self, *args):
        self.aliases = args
        return self

    def validate_context(self, kwargs):
        for x in self.attributes.existingPaths:
            path = kwargs.get(x)
            if path is not None and not os.path.exists(path):
                return False, MissingArtifact(path, self.attributes.producedBy.get(x, 'echolab help'))
        return True, None

    def validate_name(self, name):
        if self.name == name:
            return True
        return name in self.aliases

    def add_to(self, subparsers):
        parser = subparsers.add_parser(self.name, aliases=list(self.aliases), help=self.simple_print(),
                                       description=self.cb.__doc__)
        for x in self.reqParams:
            parser.add_argument('--' + x, dest=x, required=True)
        for x in self.optParams:
            parser.add_argument('--' + x, dest=x, default=self.defaults.get(x))
        return parser

    def execute(self, kwargs):
        return self.cb(**kwargs)

    def simple_print(self):
        return 'No description available' if self.cb.__doc__ is None else self.cb.__doc__.splitlines()[0]


class CommandsHandler:
    def __init__(self):
        self._commands = []

    def _add(self, command):
        self._commands.append(command)
        return command

    def find(self, name):
        for command in self._commands:
            if command.validate_name(name):
                return command
        return None

    def register(self, **attributes):
        def decorator(func):
            name = func.__name__.replace('_', '-')

            def wrapper(**kwargs):
                args = ' '.join('{0}={1}'.format(k, v) for k, v in kwargs.items() if v is not None)
                with Profiler(Scope.Command, name=name, args=args):
                    return func(**kwargs)
            wrapper.__doc__ = func.__doc__
            return self._add(Command(name, wrapper, Attributes(**attributes)))
        return decorator

    def parser(self):
        parser = argparse.ArgumentParser(prog='echolab', description=T_HelpGlobal.format(
            '\n  '.join(c.name for c in self._commands)), formatter_class=argparse.RawDescriptionHelpFormatter)
        parser.add_argument('--log', default='info', choices=['debug', 'info', 'warning', 'error'])
        parser.add_argument('--profile', action='store_true')
        subparsers = parser.add_subparsers(dest='command', required=True)
        for command in self._commands:
            command.add_to(subparsers)
        return parser

    def try_execute(self, argv):
        """Parse and run one command line; returns the process exit code"""
        try:
            args = self.parser().parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else 2

        set_level(args.log)
        set_enabled(args.profile)
        command = self.find(args.command)
        kwargs = {k: v for k, v in vars(args).items() if k not in ('log', 'profile', 'command')}
        try:
            validated, exc = command.validate_context(kwargs)
            if exc:
                raise exc
            command.execute(kwargs)
        except LabError as e:
            sys.stderr.write(json.dumps({'error': type(e).__name__, 'message': str(e)}) + '\n')
            return 1
        log_commands.info(T_Log_ValidatedCommand.format(command.name, ' '.join(argv)))
        return 0

    def dump(self):
        return print_array('Commands Registered',
                           commandFormat.format('Name', 'Aliases', 'Required Args', 'Optional Args'),
                           self._commands,
                           lambda c: commandFormat.format(c.name,
                                                          '-' if len(c.aliases) == 0 else '/'.join(c.aliases),
                                                          '-' if len(c.reqParams) == 0 else '/'.join(c.reqParams),
                                                          '-' if len(c.optParams) == 0 else '/'.join(c.optParams)))


cmds = CommandsHandler()


def required_args(*args):
    def decorator(func):
        return func.add_required_params(*args)
    return decorator


def optional_args(*args, **defaults):
    def decorator(func):
        return func.add_optional_params(*args, **defaults)
    return decorator


def aliases(*args):
    def decorator(func):
        return func.add_aliases(*args)
    return decorator


import commands.definitions.dataset  # needed to preload commands
import commands.definitions.training  # needed to preload commands
import commands.definitions.tools  # needed to preload commands
