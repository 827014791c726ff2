# Copyright 2026 The fdrpred Authors
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

"""Frame delivery ratio prediction from binary transmission outcomes.

Thin Python layer over the C++ core. Model configurations cross the boundary
as JSON text; the helpers here accept and return plain dicts.
"""

import json

from . import _fdrpred
from ._fdrpred import (  # noqa: F401
    Dataset,
    FdrError,
    FormatError,
    ParseError,
    RangeError,
    ShapeError,
    Trace,
    ValidationError,
    decode_packed,
    encode_packed,
    epoch_avg_loss,
    error_series,
    fdr_target,
    format_trace_text,
    load_model,
    load_trace,
    lr_at_epoch,
    metrics_report,
    parse_trace_text,
    percentile,
    preset_names,
    profile_inference,
    save_trace_packed,
    save_trace_text,
    simulate,
    stationary_fdr,
    trace_hash,
    trace_stats,
)

__version__ = _fdrpred.__version__


def _as_json(config):
    return config if isinstance(config, str) else json.dumps(config)


def full_preset(kind, condition="ch", with_pooling=False):
    """Full-scale hyperparameters for `kind` in {cnn, lstm, bilstm}."""
    return json.loads(_fdrpred.full_preset(kind, condition, with_pooling))


def desk_preset(kind, condition="ch"):
    """Reduced hyperparameters sized for a single-core run."""
    return json.loads(_fdrpred.desk_preset(kind, condition))


def build_model(config):
    """Untrained model from a config dict (or JSON string)."""
    return _fdrpred.Model(_as_json(config))


def model_config(model):
    return json.loads(model.config_json)


def fit(config, dataset):
    """Trains a fresh model; returns (model, history, best_epoch)."""
    return _fdrpred.fit(_as_json(config), dataset)


def dataset_manifest(dataset):
    return json.loads(dataset.manifest_json())
