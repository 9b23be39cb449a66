"""Instances, file formats, ILP lowerings, evaluators and baseline solvers for
nine structured-prediction problem classes."""

from .model import *  # noqa: F401,F403
from .formats import (ParseError, ShapeFileMeta, decode_shape_variable, detect_format,  # noqa: F401
                      dump, parse, parse_amwc, parse_bottleneck_mrf, parse_cell_tracking,
                      parse_gm, parse_lp, parse_mgm, parse_multicut, parse_shape_filename,
                      parse_solution, parse_tomography, parse_uai_mrf, serialize,
                      serialize_solution)

__version__ = "0.1.0"
