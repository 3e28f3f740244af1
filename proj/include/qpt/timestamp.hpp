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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace qpt {

// A UTC instant at one-second resolution, stored as seconds since the Unix
// epoch. No time zones: the only accepted text form is "YYYY-MM-DDTHH:MM:SSZ".
struct Timestamp {
  std::int64_t seconds = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Throws DataError on malformed input.
Timestamp parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp t);

}  // namespace qpt
