# Copyright (c) 2022 Google LLC
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of
# this software and associated documentation files (the "Software"), to deal in
# the Software without restriction, including without limitation the rights to
# use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of
# the Software, and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY, FITNESS
# FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR
# COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER
# IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN
# CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

import os
from typing import Optional


_pairwise_cell_limit = 2**31
_subset_search_limit = 24


def get_pairwise_cell_limit() -> int:
    return _pairwise_cell_limit


def set_pairwise_cell_limit(value: int) -> None:
    global _pairwise_cell_limit
    if value < 0:
        raise ValueError(f"pairwise cell limit must be non-negative, got {value}")
    _pairwise_cell_limit = value


def get_subset_search_limit() -> int:
    return _subset_search_limit


def set_subset_search_limit(value: int) -> None:
    global _subset_search_limit
    if value < 0:
        raise ValueError(f"subset search limit must be non-negative, got {value}")
    _subset_search_limit = value


def get_thread_count(environ: Optional[dict] = None) -> int:
    """Number of worker threads to use for per-sensor and per-instance work.

    Read from the `FAULTCOVER_THREADS` environment variable; defaults to the number
    of CPUs.
    """
    if environ is None:
        environ = os.environ
    value = environ.get("FAULTCOVER_THREADS")
    if value is None or value.strip() == "":
        return os.cpu_count() or 1
    try:
        count = int(value)
    except ValueError:
        raise ValueError(
            f"FAULTCOVER_THREADS must be a positive integer, got {value!r}"
        ) from None
    if count < 1:
        raise ValueError(f"FAULTCOVER_THREADS must be a positive integer, got {count}")
    return count
