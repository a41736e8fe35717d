#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uqcd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameter (bad probability, empty support, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition (length mismatch, bad index).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// KL divergence is infinite: `outcome` has mass under the first law only.
class DivergenceInfinite : public Error {
 public:
  explicit DivergenceInfinite(int outcome)
      : Error("divergence is infinite: outcome " + std::to_string(outcome) +
              " has zero probability under the reference distribution"),
        outcome_(outcome) {}
  int outcome() const noexcept { return outcome_; }

 private:
  int outcome_;
};

/// Label enumeration would exceed the configured cap.
class EnumerationTooLarge : public Error {
 public:
  EnumerationTooLarge(std::uint64_t size, std::uint64_t cap)
      : Error("label space of size " + std::to_string(size) +
              " exceeds enumeration cap " + std::to_string(cap)),
        size_(size) {}
  std::uint64_t size() const noexcept { return size_; }

 private:
  std::uint64_t size_;
};

/// Exact summation over the joint support is too large; use Monte Carlo.
class SupportGuardExceeded : public Error {
 public:
  SupportGuardExceeded(std::uint64_t size, std::uint64_t guard)
      : Error("joint support of size " + std::to_string(size) +
              " exceeds exact-summation guard " + std::to_string(guard) +
              "; Monte Carlo fall-back required"),
        size_(size) {}
  std::uint64_t size() const noexcept { return size_; }

 private:
  std::uint64_t size_;
};

/// The network admits infinite log-likelihood ratios and is refused.
class RatioUnbounded : public Error {
 public:
  using Error::Error;
};

/// Configuration document rejected; `path` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace uqcd
