# -*- coding: utf-8 -*-

"""
echolab
=============================

Simulated binaural echoes, orientation-consistency pretraining and
depth / surface-normal transfer, on a numpy-only stack.

:license: MIT, see LICENSE for more details.

"""

__title__ = 'echolab'
__license__ = 'MIT'
__version__ = '1.0.0'
