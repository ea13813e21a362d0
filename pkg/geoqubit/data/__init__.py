# Copyright (c) 2021, geoqubit authors. All Rights Reserved.
from .schedules import (
    PROCESS_I,
    PROCESS_II,
    TABULATED,
    ScheduleRangeError,
    ScheduleParseError,
    TooFewRowsError,
    NonMonotoneTimeError,
    NonNumericCellError,
    ProcessIParams,
    ProcessIIParams,
    Schedule,
    ProcessISchedule,
    ProcessIISchedule,
    TabulatedSchedule,
    process_i,
    process_ii,
    parse_tabulated,
    hold,
)
from ._helper import (
    write_trajectory_csv,
    read_trajectory_csv,
    write_two_qubit_csv,
    read_two_qubit_csv,
    format_report,
    read_report,
    format_gate_table,
    read_gate_table,
)
