#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcg/errors.hpp"

namespace fcg {

/// Symbolic form of a loading profile: `word_length` segment means and the
/// letter index each one falls into.
struct SaxWord {
  std::vector<double> paa_values;
  std::vector<std::size_t> letters;
  std::size_t alphabet_size = 0;
  std::size_t word_length = 0;

  /// Letters rendered as 'a', 'b', ... (indices >= 26 fall back to '?').
  [[nodiscard]] std::string str() const {
    std::string s;
    for (auto l : letters) s.push_back(l < 26 ? static_cast<char>('a' + l) : '?');
    return s;
  }
};

/// Piecewise aggregate approximation: the mean of each of `word_length`
/// consecutive, equal segments. A series whose length is not a multiple of
/// `word_length` is right-padded by repeating its last value.
inline std::vector<double> paa(std::span<const double> series, std::size_t word_length) {
  if (series.empty()) throw DomainError("paa: empty series");
  if (word_length == 0) throw DomainError("paa: word_length must be positive");
  const std::size_t m = series.size();
  const std::size_t padded = (m + word_length - 1) / word_length * word_length;
  const std::size_t per = padded / word_length;
  std::vector<double> out(word_length, 0.0);
  for (std::size_t i = 0; i < word_length; ++i) {
    double sum = 0.0;
    for (std::size_t j = i * per; j < (i + 1) * per; ++j) sum += series[std::min(j, m - 1)];
    out[i] = sum / static_cast<double>(per);
  }
  return out;
}

/// Bins the PAA values into `alphabet_size` equal-width regions spanning
/// [min, max]. The maximum maps to the top letter; a constant input maps to
/// letter 0 throughout.
inline SaxWord sax_discretize(std::span<const double> paa_values, std::size_t alphabet_size) {
  if (alphabet_size < 2) throw DomainError("sax_discretize: alphabet_size must be at least 2");
  if (paa_values.empty()) throw DomainError("sax_discretize: empty input");
  SaxWord w;
  w.paa_values.assign(paa_values.begin(), paa_values.end());
  w.alphabet_size = alphabet_size;
  w.word_length = paa_values.size();
  const auto [lo_it, hi_it] = std::minmax_element(paa_values.begin(), paa_values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  w.letters.reserve(paa_values.size());
  for (double a : paa_values) {
    if (!(range > 0.0)) {
      w.letters.push_back(0);
      continue;
    }
    const double pos = (a - lo) / range * static_cast<double>(alphabet_size);
    const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
    w.letters.push_back(std::min(idx, alphabet_size - 1));
  }
  return w;
}

/// Number of distinct words, l^w. `count` is empty when it exceeds 64 bits;
/// `log10` is always populated.
struct Complexity {
  std::optional<std::uint64_t> count;
  double log10 = 0.0;
};

inline Complexity data_complexity(std::size_t word_length, std::size_t alphabet_size) {
  if (word_length < 1) throw DomainError("data_complexity: word_length must be at least 1");
  if (alphabet_size < 2) throw DomainError("data_complexity: alphabet_size must be at least 2");
  Complexity c;
  c.log10 = static_cast<double>(word_length) * std::log10(static_cast<double>(alphabet_size));
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < word_length; ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / alphabet_size) return c;
    n *= alphabet_size;
  }
  c.count = n;
  return c;
}

}  // namespace fcg
