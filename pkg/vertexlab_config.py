#!/usr/bin/env python3
"""
Shared configuration for the vertexlab modules.

Settings come from the environment (a .env file next to this module is
honoured via python-dotenv):

    VERTEXLAB_THREADS     worker cap for enumeration and quadrature (default: cpu count)
    VERTEXLAB_ENUM_CAP    largest 2*M*N accepted by partition_enumerate (default 26)
    VERTEXLAB_LOG_LEVEL   logging level name (default INFO)
    VERTEXLAB_REPORT_DIR  where run_acceptance.py writes its report (default ./reports)

Also home to the error types, the logging setup and the atomic JSON writer
used by the CLI and the acceptance runner.
"""

import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).parent


def _env_int(name, default, minimum=1):
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return max(minimum, int(raw))
    except ValueError:
        return default


THREADS = _env_int('VERTEXLAB_THREADS', os.cpu_count() or 1)
ENUM_CAP = _env_int('VERTEXLAB_ENUM_CAP', 26)
CENSUS_CAP = 20
LOG_LEVEL = os.getenv('VERTEXLAB_LOG_LEVEL', 'INFO').upper()
REPORT_DIR = Path(os.getenv('VERTEXLAB_REPORT_DIR', BASE_DIR / 'reports'))

DEFAULT_TOL = 1e-9
QUADRATURE_TOL = 1e-6
DEFAULT_GRID = 256
TRANSFER_MAX_WIDTH = 10


class VertexLabError(ValueError):
    """Base class for every error raised by the vertexlab modules."""

    kind = 'error'
    exit_code = 1


class SchemaError(VertexLabError):
    """Malformed model spec, bad parameters or violated preconditions."""

    kind = 'schema'
    exit_code = 2


class NumericDomainError(VertexLabError):
    """Zero denominators, nonpositive integrands, residuals above tolerance."""

    kind = 'numeric-domain'
    exit_code = 3


class SizeCapError(VertexLabError):
    """A lattice exceeds an enumeration or transfer-matrix cap."""

    kind = 'size-cap'
    exit_code = 4

    def __init__(self, message, required=None, cap=None):
        super().__init__(message)
        self.required = required
        self.cap = cap


def setup_logging(name='vertexlab', level=None, stream=None):
    """Configure root logging once and return a named logger."""
    logging.basicConfig(
        level=getattr(logging, level or LOG_LEVEL, logging.INFO),
        format='%(asctime)s [%(levelname)s] %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=stream or sys.stderr,
    )
    return logging.getLogger(name)


def atomic_write_json(filepath, data, indent=2):
    """
    Write JSON data to a file atomically.
    Writes to a temp file in the target directory, then renames it in place.
    """
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=filepath.parent, suffix='.tmp')
    try:
        with os.fdopen(fd, 'w') as f:
            json.dump(data, f, indent=indent)
        os.replace(tmp_path, filepath)
    except Exception:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
