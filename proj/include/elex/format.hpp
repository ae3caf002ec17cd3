#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace elex {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

/// Strict full-token parse; `what` names the field in error messages.
inline double parse_double(std::string_view token, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::runtime_error("expected a number for " + std::string(what) + ", got '" +
                             std::string(token) + "'");
  return v;
}

inline std::uint64_t parse_uint(std::string_view token, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::runtime_error("expected a nonnegative integer for " + std::string(what) +
                             ", got '" + std::string(token) + "'");
  return v;
}

}  // namespace elex
