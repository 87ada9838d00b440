# Copyright 2026 The FlashGate Authors
# SPDX-License-Identifier: Apache-2.0

"""Visual-token selection, action-reuse gating and FLOPs accounting."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    DegenerateVector,
    FlashGateError,
    FormatError,
    InvalidInput,
    ParseError,
)

__version__ = "0.1.0"
