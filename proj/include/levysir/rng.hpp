// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace levysir {

using Engine = std::mt19937_64;

/// Independent random channels consumed by one path.
enum class Channel : std::uint32_t { Brownian1 = 0, Brownian2 = 1, JumpTimes = 2, JumpMarks = 3 };

inline constexpr std::uint64_t kChannelCount = 4;

/// Stream id for (path, channel); paths never share a stream.
constexpr std::uint64_t stream_id(std::uint64_t path_id, Channel channel) {
  return path_id * kChannelCount + static_cast<std::uint64_t>(channel);
}

/// Deterministic engine for (seed, stream_id). The pair is expanded through
/// std::seed_seq over the full mt19937_64 state, so neighbouring ids give
/// unrelated sequences.
inline Engine rng_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return Engine(seq);
}

inline Engine rng_stream(std::uint64_t seed, std::uint64_t path_id, Channel channel) {
  return rng_stream(seed, stream_id(path_id, channel));
}

}  // namespace levysir
