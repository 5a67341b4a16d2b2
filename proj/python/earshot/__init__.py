# python/earshot/__init__.py

# Copyright 2026  The earshot Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Speech corpus analysis and augmentation (numpy front end to the C++ core)."""

from ._earshot import (
    Error,
    InvalidArgument,
    IoError,
    compute_features,
    fast_convolve,
    mix_at_snr,
    pearson,
    read_wav,
    render_at_listener,
    resample,
    run_cli,
    segment,
    tilt_boost,
    welch_t_test,
    write_wav,
)

__all__ = [
    "Error",
    "InvalidArgument",
    "IoError",
    "compute_features",
    "fast_convolve",
    "mix_at_snr",
    "pearson",
    "read_wav",
    "render_at_listener",
    "resample",
    "run_cli",
    "segment",
    "tilt_boost",
    "welch_t_test",
    "write_wav",
]
