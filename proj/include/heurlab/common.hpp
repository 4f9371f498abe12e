#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace heurlab {

/// Bad caller input: malformed matrices, out-of-range parameters, missing files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text that does not match a domain grammar. Line and column are 1-based.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line, int column)
      : InputError(what + " (line " + std::to_string(line) + ", column " +
                   std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  [[nodiscard]] int line() const noexcept { return line_; }
  [[nodiscard]] int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class UnsupportedDomain : public InputError {
 public:
  using InputError::InputError;
};

/// A generator could not satisfy its filter within the configured cap.
class GenerationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
[[nodiscard]] constexpr std::uint64_t fnv1a(std::string_view bytes,
                                            std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// splitmix64 finalizer; used to derive independent child seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for work item `index` under `master`. Order-independent, so parallel
/// workers reproduce the serial stream item by item.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept {
  return derive_seed(master, fnv1a(label));
}

}  // namespace heurlab
