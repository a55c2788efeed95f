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

import pathlib

from .config import (
    get_pairwise_cell_limit,
    get_subset_search_limit,
    get_thread_count,
    set_pairwise_cell_limit,
    set_subset_search_limit,
)
from .coverage import (
    CoverTrace,
    detection_value,
    greedy_msc,
    lazy_greedy_msc,
    max_coverage,
)
from .errors import (
    InstanceTooLargeError,
    MatrixFormatError,
    NetworkFormatError,
    SimulationError,
)
from .influence import (
    build_influence_matrix,
    detection_sets,
    DetectionSets,
    from_cells,
    from_detection_sets,
    InfluenceMatrix,
    load_influence_matrix,
    read_influence_matrix,
    save_influence_matrix,
)
from .metrics import (
    localization_partition,
    LocalizationPartition,
    score_curve,
    score_report,
    ScoreReport,
    sensors_required,
)
from .network import (
    distances_from,
    dump_network,
    event_distances,
    event_locations,
    event_node_distance,
    EventPoint,
    Link,
    load_network,
    Network,
    Node,
    parse_network,
)
from .oracle import brute_identification_value, exact_msc, exact_mtc
from .placement import load_placement, PlacementResult, save_placement
from .testcover import (
    AGIterationRecord,
    AGState,
    alpha,
    augmented_greedy,
    beta,
    identification_value,
    PairwiseInstance,
    pairwise_work_bound,
    tlg_solve,
    transform_mtc_to_msc,
)


_data = pathlib.Path(__file__).resolve().parent / "data"


def load_example_matrix() -> InfluenceMatrix:
    """The 10-event, 8-sensor example influence matrix."""
    return read_influence_matrix(_data / "example_influence.csv")


def load_example_network() -> Network:
    """A small 8-junction, 10-pipe example network."""
    return load_network(_data / "example_network.json")


__version__ = "0.1.0"
