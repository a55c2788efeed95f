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

import random

import jax.random as jr
import numpy as np
import pytest

import faultcover
from faultcover import InfluenceMatrix


@pytest.fixture()
def getkey():
    def _getkey():
        # Not sure what the maximum actually is but this will do
        return jr.PRNGKey(random.randint(0, 2**31 - 1))

    return _getkey


@pytest.fixture()
def example_matrix():
    return faultcover.load_example_matrix()


@pytest.fixture()
def random_matrix():
    def _random_matrix(seed, n, m, density=0.5):
        cells = np.asarray(jr.bernoulli(jr.PRNGKey(seed), density, (n, m)), dtype=bool)
        return InfluenceMatrix(
            events=tuple(f"l{j + 1}" for j in range(n)),
            sensors=tuple(str(i + 1) for i in range(m)),
            cells=cells,
        )

    return _random_matrix


@pytest.fixture()
def restore_config():
    pairwise = faultcover.get_pairwise_cell_limit()
    subsets = faultcover.get_subset_search_limit()
    yield
    faultcover.set_pairwise_cell_limit(pairwise)
    faultcover.set_subset_search_limit(subsets)
