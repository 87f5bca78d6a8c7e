# Copyright 2026 The deltald Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Change detection, region mining and budgeted monitoring for RDF datasets.

Structured results are plain dicts in the same JSON schema the `deltald`
command-line tool writes.
"""

import json

from . import _core
from ._core import Dataset, Error, GoldStandardError, ParseError, load_ntriples, parse_ntriples

__version__ = _core.__version__

_ALL_WEIGHTS = "create=1,remove=1,update=1,move=1,renew=1"


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def diff(v1, v2, theta=0.8):
    return json.loads(_core.diff(v1, v2, theta))


def apply_changeset(v1, changeset):
    return _core.apply_changeset(v1, _text(changeset))


def aggregate(changesets, versions):
    return json.loads(_core.aggregate([_text(c) for c in changesets], list(versions)))


def bin_regions(profiles, reference, low=0.01, high=0.1):
    return json.loads(_core.bin_regions(_text(profiles), reference, low, high))


def plan_regions(regions, profiles, budget, weights=_ALL_WEIGHTS, epsilon=0.1,
                 history=None, cycle=0):
    return json.loads(_core.plan_regions(
        _text(regions), _text(profiles), weights, budget, epsilon,
        "" if history is None else _text(history), cycle))


def generate_corpus(config):
    versions, truth = _core.generate_corpus(_text(config))
    return versions, [json.loads(t) for t in truth]


def simulate(config, budget, strategy="region", epsilon=0.1, weights=_ALL_WEIGHTS,
             low=0.01, high=0.1, warmup=1, detection="diff", theta=0.8,
             listing=True, seed=0):
    return json.loads(_core.simulate(
        _text(config), strategy, budget, epsilon, weights, low, high, warmup,
        detection, theta, listing, seed))


def evaluate_moves(changeset, gold_tsv):
    return json.loads(_core.evaluate_moves(_text(changeset), gold_tsv))


__all__ = [
    "Dataset", "Error", "GoldStandardError", "ParseError", "aggregate",
    "apply_changeset", "bin_regions", "diff", "evaluate_moves", "generate_corpus",
    "load_ntriples", "parse_ntriples", "plan_regions", "simulate",
]
