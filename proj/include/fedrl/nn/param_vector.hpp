#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedrl/errors.hpp"

namespace fedrl::nn {

// Layer widths d0, d1, ..., dL of a dense network. Layer l maps d_l -> d_{l+1}
// and owns (d_l + 1) * d_{l+1} parameters: the weights stored input-major
// (entry [i * out + o] connects input i to output o), then the bias.
using Layout = std::vector<std::uint32_t>;

inline std::size_t param_count(const Layout& layout) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layout.size(); ++l)
    n += (static_cast<std::size_t>(layout[l]) + 1) * layout[l + 1];
  return n;
}

struct ParamVector {
  Layout layout;
  std::vector<double> values;

  ParamVector() = default;
  explicit ParamVector(Layout l) : layout(std::move(l)), values(param_count(layout), 0.0) {}
  ParamVector(Layout l, std::vector<double> v) : layout(std::move(l)), values(std::move(v)) {
    if (values.size() != param_count(layout))
      throw ContractError("ParamVector: value count does not match layout");
  }

  std::size_t size() const { return values.size(); }
  bool aggregable_with(const ParamVector& other) const { return layout == other.layout; }
  void fill(double v) { std::fill(values.begin(), values.end(), v); }

  bool operator==(const ParamVector&) const = default;
};

inline void require_same_layout(const ParamVector& a, const ParamVector& b, const char* what) {
  if (!a.aggregable_with(b)) throw ContractError(std::string(what) + ": layout mismatch");
}

// Correctly rounded sum of `xs` (Shewchuk's exact partials). The result does
// not depend on the order of the inputs.
inline double exact_sum(std::span<const double> xs) {
  std::vector<double> partials;
  for (double x : xs) {
    std::size_t k = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[k++] = lo;
      x = hi;
    }
    partials.resize(k);
    partials.push_back(x);
  }
  std::size_t n = partials.size();
  if (n == 0) return 0.0;
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // Round half-even across the remaining partials.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

// Elementwise arithmetic mean: exact sum, one division. Invariant under any
// permutation of the inputs and exact when all inputs agree.
inline ParamVector average_params(std::span<const ParamVector> inputs) {
  if (inputs.empty()) throw ContractError("average_params: empty input");
  ParamVector out(inputs.front().layout);
  for (const auto& p : inputs) require_same_layout(out, p, "average_params");
  const double n = static_cast<double>(inputs.size());
  std::vector<double> column(inputs.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    bool same = true;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      column[k] = inputs[k].values[i];
      same = same && column[k] == column[0];
    }
    out.values[i] = same ? column[0] : exact_sum(column) / n;
  }
  return out;
}

inline ParamVector average_params(const std::vector<ParamVector>& inputs) {
  return average_params(std::span<const ParamVector>(inputs));
}

namespace detail {

template <typename U>
void put_le(std::ostream& os, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& is) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U)))
    throw std::runtime_error("ParamVector: truncated stream");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace detail

// Wire format: u32 count of widths, the widths as u32, then every value as
// an IEEE-754 binary64. All little-endian.
inline void write_params(std::ostream& os, const ParamVector& p) {
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(p.layout.size()));
  for (auto d : p.layout) detail::put_le<std::uint32_t>(os, d);
  for (double v : p.values) detail::put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
}

inline ParamVector read_params(std::istream& is) {
  const auto count = detail::get_le<std::uint32_t>(is);
  if (count < 2 || count > 63) throw std::runtime_error("ParamVector: bad layout header");
  Layout layout(count);
  for (auto& d : layout) {
    d = detail::get_le<std::uint32_t>(is);
    if (d == 0) throw std::runtime_error("ParamVector: zero-width layer");
  }
  ParamVector p(std::move(layout));
  for (double& v : p.values) v = std::bit_cast<double>(detail::get_le<std::uint64_t>(is));
  return p;
}

}  // namespace fedrl::nn
