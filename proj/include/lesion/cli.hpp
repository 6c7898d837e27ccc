// Copyright 2026 The Lesion Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lesion/augment.hpp"
#include "lesion/config.hpp"
#include "lesion/preprocess.hpp"

namespace lesion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. args[0] is the program name. Returns 0 on
/// success, 1 when the operation fails and 2 for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Augmentation bounds from config keys max_rotate, p_affine, do_flip,
/// flip_vert, max_zoom, max_lighting, max_shear, crop_pad_size, cutout_holes,
/// cutout_length and cutout_p. Missing keys keep their defaults.
AugmentationPolicy policy_from_config(const Config& cfg);

/// threshold, min_keep, target_short_side, workers and bottom_crop.<source>.
PreprocessOptions preprocess_options_from_config(const Config& cfg);

std::string version();

}  // namespace lesion::cli
