#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "dcosp/types.hpp"

namespace dcosp {

enum class Phase : std::size_t { kDecomposition = 0, kRepair = 1, kSearch = 2, kUplink = 3 };

inline constexpr std::array<const char*, 4> kPhaseNames = {"decomposition", "repair", "search",
                                                           "uplink"};

// Message header size and per-request payload (8-byte id + 1 flag byte).
inline constexpr Bytes kMessageHeaderBytes = 16;
inline constexpr Bytes kBytesPerRequest = 9;

inline Bytes message_bytes(std::size_t carried_requests) {
  return kMessageHeaderBytes + kBytesPerRequest * static_cast<Bytes>(carried_requests);
}

struct MessageLedger {
  std::array<Bytes, 4> bytes{};
  std::array<long long, 4> messages{};

  void record(Phase p, long long count, Bytes b) {
    messages[static_cast<std::size_t>(p)] += count;
    bytes[static_cast<std::size_t>(p)] += b;
  }
  Bytes total_bytes() const { return bytes[0] + bytes[1] + bytes[2] + bytes[3]; }
  long long total_messages() const {
    return messages[0] + messages[1] + messages[2] + messages[3];
  }
  friend bool operator==(const MessageLedger&, const MessageLedger&) = default;
};

}  // namespace dcosp
