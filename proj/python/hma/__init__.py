from ._core import (
    ConfigError,
    ConvergenceError,
    FieldFileError,
    GauduchonError,
    KernelDegeneracyError,
    PositivityError,
    Problem,
    check_names,
    load_scenario,
    parse_scenario,
    pointwise_sample,
    read_field,
    write_field,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "FieldFileError",
    "GauduchonError",
    "KernelDegeneracyError",
    "PositivityError",
    "Problem",
    "check_names",
    "load_scenario",
    "parse_scenario",
    "pointwise_sample",
    "read_field",
    "write_field",
]
