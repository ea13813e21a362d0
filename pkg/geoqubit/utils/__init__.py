# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
from .logger import setup_logger, create_small_table, create_sweep_table
from .flash_utils import get_callable_name, get_callable_dict
