#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsom/error.hpp"

namespace dsom {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Dense N x N dissimilarity matrix. Individuals are the anonymous indices
/// 0..N-1; the matrix is the only view of the data. Every constructed
/// instance is exactly symmetric, has a zero diagonal and no negative entry.
class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;

  /// Takes row-major values and checks the invariants exactly.
  static DissimilarityMatrix from_values(std::size_t n,
                                         std::vector<double> values) {
    if (values.size() != n * n) {
      throw MatrixError("expected " + std::to_string(n * n) +
                        " values, got " + std::to_string(values.size()));
    }
    DissimilarityMatrix m(n, std::move(values));
    m.validate(0.0);
    return m;
  }

  /// Like from_values, but accepts deviations up to `tolerance` and then
  /// repairs them: the lower triangle is mirrored onto the upper one, the
  /// diagonal is zeroed and tiny negatives are clamped to zero.
  static DissimilarityMatrix from_values_tolerant(std::size_t n,
                                                  std::vector<double> values,
                                                  double tolerance) {
    if (values.size() != n * n) {
      throw MatrixError("expected " + std::to_string(n * n) +
                        " values, got " + std::to_string(values.size()));
    }
    DissimilarityMatrix m(n, std::move(values));
    m.validate(tolerance);
    for (std::size_t i = 0; i < n; ++i) {
      m.values_[i * n + i] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        double& v = m.values_[i * n + j];
        if (v < 0.0) v = 0.0;
        m.values_[j * n + i] = v;
      }
    }
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[i * n_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * n_, n_};
  }

  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const DissimilarityMatrix&,
                         const DissimilarityMatrix&) = default;

 private:
  DissimilarityMatrix(std::size_t n, std::vector<double> values)
      : n_(n), values_(std::move(values)) {}

  void validate(double tolerance) const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = values_[i * n_ + j];
        if (!std::isfinite(v)) throw MatrixError("non-finite value", i, j);
        if (v < -tolerance) throw MatrixError("negative dissimilarity", i, j);
      }
      if (std::abs(values_[i * n_ + i]) > tolerance) {
        throw MatrixError("nonzero diagonal", i, i);
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(values_[i * n_ + j] - values_[j * n_ + i]) > tolerance) {
          throw MatrixError("symmetry violation", i, j);
        }
      }
    }
  }

  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Squared Euclidean distances between planar points.
inline DissimilarityMatrix sq_euclidean_matrix(std::span<const Point> points) {
  if (points.empty()) throw InvalidInput("point list is empty");
  const std::size_t n = points.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      const double d = dx * dx + dy * dy;
      values[i * n + j] = d;
      values[j * n + i] = d;
    }
  }
  return DissimilarityMatrix::from_values(n, std::move(values));
}

namespace detail {

// Decodes UTF-8 into code points. Invalid bytes are kept as single units so
// that arbitrary byte strings still compare deterministically.
inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xC0 && b0 < 0xE0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if (b0 >= 0xE0 && b0 < 0xF0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xF0 && b0 < 0xF8) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len == 1 || i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      len = 1;
      cp = b0;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace detail

/// Levenshtein distance over Unicode code points (no case or accent
/// folding). Normalized mode divides by the longer length; two empty strings
/// are at distance 0.
inline double levenshtein(std::string_view a, std::string_view b,
                          bool normalized) {
  const std::u32string ua = detail::decode_utf8(a);
  const std::u32string ub = detail::decode_utf8(b);
  const auto raw = static_cast<double>(detail::edit_distance(ua, ub));
  if (!normalized) return raw;
  const std::size_t longest = std::max(ua.size(), ub.size());
  return longest == 0 ? 0.0 : raw / static_cast<double>(longest);
}

inline DissimilarityMatrix levenshtein_matrix(
    std::span<const std::string> words) {
  if (words.empty()) throw InvalidInput("word list is empty");
  const std::size_t n = words.size();
  std::vector<std::u32string> decoded;
  decoded.reserve(n);
  for (const auto& w : words) decoded.push_back(detail::decode_utf8(w));
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const std::size_t longest = std::max(decoded[i].size(), decoded[j].size());
      const double d =
          longest == 0
              ? 0.0
              : static_cast<double>(detail::edit_distance(decoded[i], decoded[j])) /
                    static_cast<double>(longest);
      values[i * n + j] = d;
      values[j * n + i] = d;
    }
  }
  return DissimilarityMatrix::from_values(n, std::move(values));
}

// ---------------------------------------------------------------------------
// Text formats
//
// Matrix: first line N, then N lines of N whitespace-separated decimals.
// Values are written in the shortest form that parses back to the same
// double, so save/load is bit-exact.
// ---------------------------------------------------------------------------

inline constexpr double kLoadTolerance = 1e-12;

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_matrix(const DissimilarityMatrix& m, std::ostream& out) {
  const std::size_t n = m.size();
  out << n << '\n';
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j) line += ' ';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
}

namespace detail {

inline bool next_token(std::string_view line, std::size_t& pos,
                       std::string_view& token) {
  while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
    ++pos;
  if (pos >= line.size()) return false;
  const std::size_t start = pos;
  while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])))
    ++pos;
  token = line.substr(start, pos - start);
  return true;
}

inline bool parse_double(std::string_view token, double& out) {
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

inline bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

}  // namespace detail

/// Parses the matrix text format. Entries are checked against the matrix
/// invariants with tolerance kLoadTolerance and then symmetrized from the
/// lower triangle. Errors carry the (row, column) of the offending entry.
inline DissimilarityMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (detail::is_blank(line)) continue;
    std::size_t pos = 0;
    std::string_view tok;
    detail::next_token(line, pos, tok);
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    std::string_view extra;
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() ||
        detail::next_token(line, pos, extra)) {
      throw MatrixError("malformed header line '" + line + "'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw MatrixError("missing matrix header");
  if (n == 0) throw MatrixError("matrix size must be at least 1");

  std::vector<double> values(n * n);
  std::size_t row = 0;
  while (row < n && std::getline(in, line)) {
    if (detail::is_blank(line)) continue;
    std::size_t pos = 0;
    std::string_view tok;
    std::size_t col = 0;
    while (detail::next_token(line, pos, tok)) {
      if (col == n) throw MatrixError("too many values in row", row, col);
      double v = 0.0;
      if (!detail::parse_double(tok, v)) {
        throw MatrixError("cannot parse '" + std::string(tok) + "'", row, col);
      }
      values[row * n + col] = v;
      ++col;
    }
    if (col != n) throw MatrixError("too few values in row", row, col);
    ++row;
  }
  if (row != n) throw MatrixError("missing rows: expected " + std::to_string(n), row);
  while (std::getline(in, line)) {
    if (!detail::is_blank(line)) throw MatrixError("trailing data after matrix", n);
  }
  return DissimilarityMatrix::from_values_tolerant(n, std::move(values),
                                                   kLoadTolerance);
}

inline void save_matrix(const DissimilarityMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_matrix(m, out);
  if (!out) throw Error("write to '" + path + "' failed");
}

inline DissimilarityMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_matrix(in);
}

/// One word per line; surrounding whitespace is trimmed and blank lines are
/// skipped.
inline std::vector<std::string> read_words(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r\n");
    words.push_back(line.substr(first, last - first + 1));
  }
  return words;
}

inline std::vector<std::string> load_words(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_words(in);
}

/// One "x y" pair per line; blank lines are skipped.
inline std::vector<Point> read_points(std::istream& in) {
  std::vector<Point> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    std::size_t pos = 0;
    std::string_view tx, ty, extra;
    Point p;
    if (!detail::next_token(line, pos, tx) || !detail::next_token(line, pos, ty) ||
        detail::next_token(line, pos, extra) || !detail::parse_double(tx, p.x) ||
        !detail::parse_double(ty, p.y)) {
      throw InvalidInput("malformed point on line " + std::to_string(line_no));
    }
    points.push_back(p);
  }
  return points;
}

inline void write_points(std::span<const Point> points, std::ostream& out) {
  for (const auto& p : points) {
    out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
}

inline std::vector<Point> load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_points(in);
}

}  // namespace dsom
