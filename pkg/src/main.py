import sys

from log import log_main
from commands.core import cmds


def main(argv=None):
    log_main.debug('app_start')
    code = cmds.try_execute(sys.argv[1:] if argv is None else argv)
    log_main.debug('app_stop [{0}]'.format(code))
    return code


if __name__ == '__main__':
    sys.exit(main())
