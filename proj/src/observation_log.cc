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

#include <algorithm>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace privconsensus {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string ToHex(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

absl::StatusOr<std::vector<uint8_t>> FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    return absl::InvalidArgumentError("hex payload has odd length");
  }
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    const int hi = HexValue(hex[2 * i]);
    const int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      return absl::InvalidArgumentError("hex payload has a non-hex digit");
    }
    out[i] = static_cast<uint8_t>(hi << 4 | lo);
  }
  return out;
}

void ObservationLog::AddPlain(int64_t k, int sender, int receiver,
                              std::string channel,
                              std::vector<double> values) {
  Message m;
  m.k = k;
  m.sender = sender;
  m.receiver = receiver;
  m.kind = PayloadKind::kPlaintextReal;
  m.channel = std::move(channel);
  m.values = std::move(values);
  messages_.push_back(std::move(m));
}

void ObservationLog::AddCipher(int64_t k, int sender, int receiver,
                               std::string channel, int key_owner,
                               std::vector<uint8_t> bytes) {
  Message m;
  m.k = k;
  m.sender = sender;
  m.receiver = receiver;
  m.kind = PayloadKind::kCiphertextBytes;
  m.channel = std::move(channel);
  m.key_owner = key_owner;
  m.bytes = std::move(bytes);
  messages_.push_back(std::move(m));
}

int64_t ObservationLog::MaxIteration() const {
  int64_t k = -1;
  for (const Message& m : messages_) k = std::max(k, m.k);
  return k;
}

ObservationLog ObservationLog::Filter(
    const std::function<bool(const Message&)>& keep) const {
  ObservationLog out;
  for (const Message& m : messages_) {
    if (keep(m)) out.messages_.push_back(m);
  }
  return out;
}

ObservationLog ObservationLog::IncidentTo(int agent) const {
  return Filter([agent](const Message& m) {
    return m.sender == agent || m.receiver == agent;
  });
}

void ObservationLog::WriteNdjson(std::ostream& out) const {
  for (const Message& m : messages_) {
    nlohmann::ordered_json j;
    j["k"] = m.k;
    j["from"] = m.sender;
    j["to"] = m.receiver;
    j["channel"] = m.channel;
    if (m.kind == PayloadKind::kPlaintextReal) {
      j["kind"] = "plaintext-real";
      j["payload"] = m.values;
    } else {
      j["kind"] = "ciphertext-bytes";
      j["key_owner"] = m.key_owner;
      j["payload"] = ToHex(m.bytes);
    }
    out << j.dump() << '\n';
  }
}

std::string ObservationLog::ToNdjson() const {
  std::ostringstream out;
  WriteNdjson(out);
  return out.str();
}

absl::StatusOr<ObservationLog> ObservationLog::FromNdjson(
    std::string_view text) {
  ObservationLog log;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("observation log line ", line_no, " is not JSON"));
    }
    try {
      Message m;
      m.k = j.at("k").get<int64_t>();
      m.sender = j.at("from").get<int>();
      m.receiver = j.at("to").get<int>();
      m.channel = j.value("channel", "");
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "plaintext-real") {
        m.kind = PayloadKind::kPlaintextReal;
        m.values = j.at("payload").get<std::vector<double>>();
      } else if (kind == "ciphertext-bytes") {
        m.kind = PayloadKind::kCiphertextBytes;
        m.key_owner = j.at("key_owner").get<int>();
        auto bytes = FromHex(j.at("payload").get<std::string>());
        if (!bytes.ok()) return bytes.status();
        m.bytes = *std::move(bytes);
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "observation log line ", line_no, ": unknown kind '", kind, "'"));
      }
      log.Add(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(absl::StrCat(
          "observation log line ", line_no, ": ", e.what()));
    }
  }
  return log;
}

}  // namespace privconsensus
