# Copyright (c) 2021, geoqubit authors. All Rights Reserved.

from geoqubit import models
from geoqubit import data
from geoqubit import utils

try:
    from .version import __version__  # noqa: F401
except ImportError:
    pass
