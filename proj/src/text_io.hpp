#pragma once

#include "dlnlp/error.hpp"
#include "dlnlp/lp_core.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dlnlp::text_io {

// Pulls significant lines (non-blank, not starting with '#') and tracks the
// physical line number for error messages.
class LineSource {
 public:
  explicit LineSource(std::istream& in) : in_(in) {}

  // Returns the whitespace-separated tokens of the next significant line.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream tokens(line);
      std::vector<std::string> out;
      for (std::string tok; tokens >> tok;) out.push_back(std::move(tok));
      return out;
    }
    fail(std::string("unexpected end of input, expected ") + what);
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no_) + ": " + message);
  }

  int line_no() const { return line_no_; }

  double to_real(const std::string& tok) const {
    double value = 0.0;
    const char* first = tok.data();
    const char* last = first + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail("not a number: '" + tok + "'");
    return value;
  }

  Index to_index(const std::string& tok) const {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 1) {
      fail("expected a positive integer, got '" + tok + "'");
    }
    return static_cast<Index>(value);
  }

  // Header "<tag> <rows> <cols>".
  std::pair<Index, Index> header(const std::string& tag) {
    auto toks = next("header");
    if (toks.size() != 3 || toks[0] != tag) fail("expected header '" + tag + " <rows> <cols>'");
    return {to_index(toks[1]), to_index(toks[2])};
  }

  Vector row(Index expected, const char* what) {
    auto toks = next(what);
    if (static_cast<Index>(toks.size()) != expected) {
      fail(std::string(what) + ": expected " + std::to_string(expected) + " values, got " +
           std::to_string(toks.size()));
    }
    Vector out(expected);
    for (Index j = 0; j < expected; ++j) out(j) = to_real(toks[static_cast<std::size_t>(j)]);
    return out;
  }

  Matrix matrix(Index rows, Index cols, const char* what) {
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i) out.row(i) = row(cols, what).transpose();
    return out;
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

inline void write_row(std::ostream& out, const auto& values) {
  for (Index j = 0; j < values.size(); ++j) {
    if (j > 0) out << ' ';
    out << format_real(values(j));
  }
  out << '\n';
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

}  // namespace dlnlp::text_io
