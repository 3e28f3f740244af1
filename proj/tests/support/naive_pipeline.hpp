/*
 * Copyright 2026 The qpu-time Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <span>

#include "qpt/preprocess.hpp"

namespace qpt::testing {

// Column-at-a-time reference for fit_pipeline + transform. Field values are
// read back through the JSON-lines serialization rather than the library's
// column accessors, categories are collected with sort + unique, and each
// output column is standardized with its own two-pass loop.
FeatureMatrix naive_fit_transform(std::span<const FeatureSpec> specs, std::span<const QuantumJob> train,
                                  std::span<const QuantumJob> apply, const ImputeConstants& impute = {});

}  // namespace qpt::testing
