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

#include "qpt/timestamp.hpp"

#include <gtest/gtest.h>

#include "qpt/errors.hpp"
#include "qpt/rng.hpp"

namespace qpt {
namespace {

TEST(Timestamp, ParsesEpochAndKnownInstants) {
  EXPECT_EQ(parse_rfc3339("1970-01-01T00:00:00Z").seconds, 0);
  EXPECT_EQ(parse_rfc3339("2025-03-05T00:00:00Z").seconds, 1741132800);
  EXPECT_EQ(parse_rfc3339("2024-02-29T12:34:56Z").seconds, 1709210096);
  EXPECT_EQ(parse_rfc3339("1969-12-31T23:59:59Z").seconds, -1);
}

TEST(Timestamp, FormatRoundTripsOverRandomInstants) {
  Rng rng(1);
  for (int i = 0; i < 5000; ++i) {
    const Timestamp t{rng.uniform_int(-2000000000LL, 4000000000LL)};
    const std::string text = format_rfc3339(t);
    ASSERT_EQ(text.size(), 20u);
    ASSERT_EQ(parse_rfc3339(text), t) << text;
  }
}

TEST(Timestamp, RejectsMalformedText) {
  for (const char* bad : {"", "2025-03-05", "2025-03-05T00:00:00", "2025-03-05T00:00:00+00:00",
                          "2025-03-05 00:00:00Z", "2025-13-01T00:00:00Z", "2025-02-30T00:00:00Z",
                          "2023-02-29T00:00:00Z", "2025-03-05T24:00:00Z", "2025-03-05T00:60:00Z",
                          "2025-03-05T00:00:60Z", "2025-3-05T00:00:00Z", "abcd-03-05T00:00:00Z",
                          "2025-03-05T00:00:00.5Z", "2025-03-05t00:00:00z"}) {
    EXPECT_THROW(parse_rfc3339(bad), DataError) << bad;
  }
}

TEST(Timestamp, OrdersBySeconds) {
  EXPECT_LT(parse_rfc3339("2025-03-05T00:00:00Z"), parse_rfc3339("2025-03-05T00:00:01Z"));
}

}  // namespace
}  // namespace qpt
