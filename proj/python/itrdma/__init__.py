# SPDX-License-Identifier: Apache-2.0
"""Time-reversal / ITRDMA multi-user MISO precoding simulator."""

from itrdma._core import *  # noqa: F401,F403
from itrdma._core import __doc__  # noqa: F401
