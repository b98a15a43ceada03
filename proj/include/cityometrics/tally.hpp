#pragma once

#include <cstdint>
#include <map>

namespace cityom {

// Exact accumulator for sums of unit fractions 1/k. Shares are kept as
// (denominator -> count) so merging partial tallies is associative,
// commutative, and free of float-order drift; the double value is
// produced once, in ascending-denominator order, at report time.
struct FractionalTally {
  std::map<uint32_t, int64_t> parts;

  void add(uint32_t denom, int64_t count = 1) {
    if (count != 0) parts[denom] += count;
  }

  void merge(const FractionalTally& other) {
    for (const auto& [d, c] : other.parts) parts[d] += c;
  }

  double value() const {
    double v = 0.0;
    for (const auto& [d, c] : parts) v += static_cast<double>(c) / static_cast<double>(d);
    return v;
  }

  bool empty() const { return parts.empty(); }
};

}  // namespace cityom
