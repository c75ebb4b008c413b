#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace eluder {

using StateId = std::int32_t;
using ActionId = std::int32_t;
using Epoch = std::int32_t;

// A (state, epoch) pair, the unit at which policies make decisions.
struct Site {
  StateId s = 0;
  Epoch h = 0;

  friend bool operator==(const Site& a, const Site& b) {
    return a.s == b.s && a.h == b.h;
  }
  friend bool operator<(const Site& a, const Site& b) {
    return a.h != b.h ? a.h < b.h : a.s < b.s;
  }
};

struct SiteHash {
  std::size_t operator()(const Site& x) const {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x.s)) << 20) ^
        static_cast<std::uint32_t>(x.h));
  }
};

// A (state, action, epoch) triple.
struct Sah {
  StateId s = 0;
  ActionId a = 0;
  Epoch h = 0;

  friend bool operator==(const Sah& x, const Sah& y) {
    return x.s == y.s && x.a == y.a && x.h == y.h;
  }
};

struct SahHash {
  std::size_t operator()(const Sah& x) const {
    std::uint64_t k =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x.s)) << 28) ^
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x.a)) << 14) ^
        static_cast<std::uint32_t>(x.h);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration or input file (exit code 2 in the CLI).
struct ConfigError : Error {
  using Error::Error;
};

// A runtime contract was broken: oracle emptied the class, replay diverged,
// an episode exceeded the declared reward bound, ... (exit code 3).
struct ContractError : Error {
  using Error::Error;
};

// A declared structural assumption fails on the given instance
// (e.g. the optimal action is not unique among realizable actions).
struct AssumptionError : Error {
  using Error::Error;
};

// Requested exact computation is not available for this input
// (class not enumerable, kernel hidden, search limit exceeded).
struct NotAvailableError : Error {
  using Error::Error;
};

}  // namespace eluder
