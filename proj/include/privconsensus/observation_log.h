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

#ifndef PRIVCONSENSUS_OBSERVATION_LOG_H_
#define PRIVCONSENSUS_OBSERVATION_LOG_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace privconsensus {

enum class PayloadKind { kPlaintextReal, kCiphertextBytes };

// One message placed on the wire: exactly what an observer of the link
// (sender -> receiver) sees at iteration k.
struct Message {
  int64_t k = 0;
  int sender = 0;
  int receiver = 0;
  PayloadKind kind = PayloadKind::kPlaintextReal;
  // Protocol-level label of the payload ("state", "alpha", "neg_state",
  // "interaction", ...). Carried in the clear in every protocol here.
  std::string channel;
  std::vector<double> values;   // kPlaintextReal
  std::vector<uint8_t> bytes;   // kCiphertextBytes (serialized ciphertext)
  int key_owner = -1;           // agent whose public key encrypted `bytes`

  bool operator==(const Message&) const = default;
};

class ObservationLog {
 public:
  void Add(Message m) { messages_.push_back(std::move(m)); }
  void AddPlain(int64_t k, int sender, int receiver, std::string channel,
                std::vector<double> values);
  void AddCipher(int64_t k, int sender, int receiver, std::string channel,
                 int key_owner, std::vector<uint8_t> bytes);

  const std::vector<Message>& messages() const { return messages_; }
  size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }
  // Largest iteration index present, or -1 when empty.
  int64_t MaxIteration() const;

  ObservationLog Filter(const std::function<bool(const Message&)>& keep) const;
  // Messages sent or received by `agent`.
  ObservationLog IncidentTo(int agent) const;

  // Newline-delimited JSON, one message per line.
  void WriteNdjson(std::ostream& out) const;
  std::string ToNdjson() const;
  static absl::StatusOr<ObservationLog> FromNdjson(std::string_view text);

  bool operator==(const ObservationLog&) const = default;

 private:
  std::vector<Message> messages_;
};

std::string ToHex(const std::vector<uint8_t>& bytes);
absl::StatusOr<std::vector<uint8_t>> FromHex(std::string_view hex);

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_OBSERVATION_LOG_H_
