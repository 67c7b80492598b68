// Copyright 2026 The privconsensus Authors
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

#include "privconsensus/observation_log.h"

#include <cmath>

#include "gtest/gtest.h"

namespace privconsensus {
namespace {

ObservationLog SampleLog() {
  ObservationLog log;
  log.AddPlain(0, 1, 0, "state", {1.5, -0.1});
  log.AddPlain(0, 0, 1, "state", {1e-300, 12345.678901234567});
  log.AddCipher(1, 2, 0, "interaction", 0, {0x00, 0xab, 0xff, 0x10});
  return log;
}

TEST(ObservationLogTest, NdjsonRoundTripIsExact) {
  const ObservationLog log = SampleLog();
  const std::string text = log.ToNdjson();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const ObservationLog back = *ObservationLog::FromNdjson(text);
  EXPECT_EQ(back, log);
}

TEST(ObservationLogTest, RecordLayout) {
  const std::string text = SampleLog().ToNdjson();
  const std::string first = text.substr(0, text.find('\n'));
  EXPECT_EQ(first,
            R"({"k":0,"from":1,"to":0,"channel":"state",)"
            R"("kind":"plaintext-real","payload":[1.5,-0.1]})");
  EXPECT_NE(text.find(R"("payload":"00abff10")"), std::string::npos);
}

TEST(ObservationLogTest, MalformedInputIsRejected) {
  EXPECT_FALSE(ObservationLog::FromNdjson("{not json}\n").ok());
  EXPECT_FALSE(ObservationLog::FromNdjson(R"({"k":0})"
                                          "\n")
                   .ok());
  EXPECT_TRUE(ObservationLog::FromNdjson("")->empty());
}

TEST(ObservationLogTest, FiltersAndIteration) {
  const ObservationLog log = SampleLog();
  EXPECT_EQ(log.MaxIteration(), 1);
  EXPECT_EQ(ObservationLog().MaxIteration(), -1);
  EXPECT_EQ(log.IncidentTo(2).size(), 1u);
  EXPECT_EQ(log.IncidentTo(0).size(), 3u);
  EXPECT_EQ(log.Filter([](const Message& m) {
                 return m.kind == PayloadKind::kCiphertextBytes;
               }).size(),
            1u);
}

TEST(HexTest, RoundTripAndErrors) {
  const std::vector<uint8_t> bytes = {0, 1, 0x7f, 0x80, 0xff};
  EXPECT_EQ(ToHex(bytes), "00017f80ff");
  EXPECT_EQ(*FromHex("00017F80ff"), bytes);
  EXPECT_FALSE(FromHex("abc").ok());
  EXPECT_FALSE(FromHex("zz").ok());
}

}  // namespace
}  // namespace privconsensus
