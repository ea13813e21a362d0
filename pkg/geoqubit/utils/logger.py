# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
import logging
from typing import Mapping, Sequence

from tabulate import tabulate

__all__ = ['setup_logger', 'create_small_table', 'create_sweep_table']


def setup_logger(verbosity: int = 0) -> None:
    """
    Configure the root logger for command-line runs: 1 and above for DEBUG,
    0 for INFO and negative values for WARNING.
    """
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity == 0:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s', force=True)


def create_small_table(small_dict: Mapping, floatfmt: str = '.6g') -> str:
    """
    Create a one-row table using the keys of small_dict as headers.

    Args:
        small_dict (dict): a result dictionary of only a few items.
        floatfmt (str): format of float cells. Default: '.6g'.

    Returns:
        str: the table as a string.
    """
    keys, values = tuple(zip(*small_dict.items()))
    table = tabulate(
        [values],
        headers=keys,
        tablefmt="pipe",
        floatfmt=floatfmt,
        stralign="center",
        numalign="center",
    )
    return table


def create_sweep_table(rows: Sequence[Mapping], floatfmt: str = '.6g') -> str:
    """
    One row per sweep point, headers from the first row's keys.
    """
    if not rows:
        return ''
    headers = list(rows[0].keys())
    return tabulate(
        [[row[key] for key in headers] for row in rows],
        headers=headers,
        tablefmt="pipe",
        floatfmt=floatfmt,
        numalign="right",
    )
