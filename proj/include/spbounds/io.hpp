#ifndef SPBOUNDS_IO_HPP
#define SPBOUNDS_IO_HPP

// Matrix Market ingestion and output, plus assembly of a validated
// SaddleProblem from either an (A, B) pair of files or a pre-assembled K.
//
// Supported headers: "%%MatrixMarket matrix {coordinate|array}
// {real|double|integer} {general|symmetric}". Coordinate duplicates are
// summed; symmetric files may store either triangle.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spbounds/error.hpp"
#include "spbounds/linalg.hpp"
#include "spbounds/problem.hpp"

namespace spbounds {

enum class MmFormat { Coordinate, Array };
enum class MmSymmetry { General, Symmetric };

struct MarketMatrix {
  Matrix values;
  MmFormat format = MmFormat::Array;
  MmSymmetry symmetry = MmSymmetry::General;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line, std::size_t column,
                                    const std::string& what) {
  throw Error(ErrorCode::ParseError,
              path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

// Splits a line into tokens with their 1-based starting columns.
inline std::vector<std::pair<std::string, std::size_t>> tokenize(const std::string& line) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.emplace_back(line.substr(start, i - start), start + 1);
  }
  return out;
}

inline double parse_real(const std::string& path, std::size_t line, const std::pair<std::string, std::size_t>& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok.first, &used);
  } catch (const std::exception&) {
    parse_fail(path, line, tok.second, "expected a real number, got '" + tok.first + "'");
  }
  if (used != tok.first.size()) parse_fail(path, line, tok.second, "trailing characters in '" + tok.first + "'");
  if (!std::isfinite(v)) parse_fail(path, line, tok.second, "non-finite value '" + tok.first + "'");
  return v;
}

inline long long parse_int(const std::string& path, std::size_t line, const std::pair<std::string, std::size_t>& tok) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok.first, &used);
  } catch (const std::exception&) {
    parse_fail(path, line, tok.second, "expected an integer, got '" + tok.first + "'");
  }
  if (used != tok.first.size()) parse_fail(path, line, tok.second, "trailing characters in '" + tok.first + "'");
  return v;
}

}  // namespace detail

inline MarketMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  std::string line;
  std::size_t lineNo = 0;
  if (!std::getline(in, line)) detail::parse_fail(path, 1, 1, "empty file");
  ++lineNo;
  const auto header = detail::tokenize(line);
  if (header.size() != 5 || detail::lower(header[0].first) != "%%matrixmarket" ||
      detail::lower(header[1].first) != "matrix") {
    detail::parse_fail(path, lineNo, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  }
  MarketMatrix out;
  const std::string format = detail::lower(header[2].first);
  const std::string field = detail::lower(header[3].first);
  const std::string symmetry = detail::lower(header[4].first);
  if (format == "coordinate") {
    out.format = MmFormat::Coordinate;
  } else if (format == "array") {
    out.format = MmFormat::Array;
  } else {
    detail::parse_fail(path, lineNo, header[2].second, "unsupported format '" + header[2].first + "'");
  }
  if (field != "real" && field != "double" && field != "integer") {
    detail::parse_fail(path, lineNo, header[3].second, "unsupported field '" + header[3].first + "'");
  }
  if (symmetry == "general") {
    out.symmetry = MmSymmetry::General;
  } else if (symmetry == "symmetric") {
    out.symmetry = MmSymmetry::Symmetric;
  } else {
    detail::parse_fail(path, lineNo, header[4].second, "unsupported symmetry '" + header[4].first + "'");
  }

  // Data lines (comments and blank lines dropped), with their line numbers.
  std::vector<std::pair<std::vector<std::pair<std::string, std::size_t>>, std::size_t>> rows;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line[0] == '%') continue;
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    rows.emplace_back(std::move(toks), lineNo);
  }
  if (rows.empty()) detail::parse_fail(path, lineNo, 1, "missing size line");

  const auto& [sizeToks, sizeLine] = rows.front();
  const std::size_t wantSize = out.format == MmFormat::Coordinate ? 3 : 2;
  if (sizeToks.size() != wantSize) {
    detail::parse_fail(path, sizeLine, 1, "size line needs " + std::to_string(wantSize) + " integers");
  }
  const long long nr = detail::parse_int(path, sizeLine, sizeToks[0]);
  const long long nc = detail::parse_int(path, sizeLine, sizeToks[1]);
  if (nr < 0 || nc < 0) detail::parse_fail(path, sizeLine, 1, "negative dimension");
  if (out.symmetry == MmSymmetry::Symmetric && nr != nc) {
    detail::parse_fail(path, sizeLine, 1, "symmetric matrix must be square");
  }
  out.values = Matrix::Zero(nr, nc);

  if (out.format == MmFormat::Coordinate) {
    const long long nnz = detail::parse_int(path, sizeLine, sizeToks[2]);
    if (nnz < 0) detail::parse_fail(path, sizeLine, sizeToks[2].second, "negative entry count");
    if (static_cast<long long>(rows.size()) - 1 != nnz) {
      detail::parse_fail(path, lineNo, 1, "expected " + std::to_string(nnz) + " entries, found " +
                                              std::to_string(rows.size() - 1));
    }
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto& [toks, ln] = rows[k];
      if (toks.size() != 3) detail::parse_fail(path, ln, 1, "coordinate entry needs 'row col value'");
      const long long i = detail::parse_int(path, ln, toks[0]);
      const long long j = detail::parse_int(path, ln, toks[1]);
      if (i < 1 || i > nr) detail::parse_fail(path, ln, toks[0].second, "row index out of range");
      if (j < 1 || j > nc) detail::parse_fail(path, ln, toks[1].second, "column index out of range");
      const double v = detail::parse_real(path, ln, toks[2]);
      out.values(i - 1, j - 1) += v;
      if (out.symmetry == MmSymmetry::Symmetric && i != j) out.values(j - 1, i - 1) += v;
    }
  } else {
    std::vector<std::pair<double, std::size_t>> vals;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto& [toks, ln] = rows[k];
      for (const auto& t : toks) vals.emplace_back(detail::parse_real(path, ln, t), ln);
    }
    const long long want = out.symmetry == MmSymmetry::Symmetric ? nr * (nr + 1) / 2 : nr * nc;
    if (static_cast<long long>(vals.size()) != want) {
      detail::parse_fail(path, lineNo, 1, "expected " + std::to_string(want) + " array values, found " +
                                              std::to_string(vals.size()));
    }
    std::size_t k = 0;
    for (long long j = 0; j < nc; ++j) {
      const long long first = out.symmetry == MmSymmetry::Symmetric ? j : 0;
      for (long long i = first; i < nr; ++i) {
        out.values(i, j) = vals[k++].first;
        if (out.symmetry == MmSymmetry::Symmetric) out.values(j, i) = out.values(i, j);
      }
    }
  }
  return out;
}

/// 17 significant digits, so every double survives a write/read round trip.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes in array format; symmetric matrices store the lower triangle.
inline void write_matrix_market(const std::string& path, const Matrix& m, MmSymmetry symmetry,
                                const std::string& comment = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "%%MatrixMarket matrix array real "
      << (symmetry == MmSymmetry::Symmetric ? "symmetric" : "general") << "\n";
  if (!comment.empty()) out << "% " << comment << "\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (Index j = 0; j < m.cols(); ++j) {
    const Index first = symmetry == MmSymmetry::Symmetric ? j : 0;
    for (Index i = first; i < m.rows(); ++i) out << format_real(m(i, j)) << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

// ---------------------------------------------------------------------------

struct ProblemFileSet {
  std::string pathA;
  std::string pathB;
  std::string pathK;
  std::optional<Index> splitIndex;  // n, for K input

  bool uses_k() const { return !pathK.empty(); }
};

enum class OutputFormat { Json, Csv };

struct RunConfig {
  Tolerances tolerances;
  double certSlack = 1e-8;
  double gammaMin = 1e-4;
  double gammaMax = 1e4;
  std::size_t gammaPoints = 25;
  OutputFormat format = OutputFormat::Json;
  std::uint64_t seed = 0;
  Index oracleCap = 2000;

  void validate() const {
    if (tolerances.relTol < 0.0) throw Error(ErrorCode::InvalidConfig, "relTol must be positive");
    if (!(tolerances.angleTol > 0.0)) throw Error(ErrorCode::InvalidConfig, "angleTol must be positive");
    if (!(certSlack > 0.0)) throw Error(ErrorCode::InvalidConfig, "certSlack must be positive");
    if (!(gammaMin > 0.0) || !(gammaMin < gammaMax)) {
      throw Error(ErrorCode::InvalidConfig, "gamma grid needs 0 < min < max");
    }
    if (gammaPoints == 0) throw Error(ErrorCode::InvalidConfig, "gamma grid needs at least one point");
    if (oracleCap <= 0) throw Error(ErrorCode::InvalidConfig, "oracle cap must be positive");
  }
};

namespace detail {

// Re-raises problem validation failures as StructureError naming the broken invariant.
template <typename Fn>
SaddleProblem structured(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::string invariant;
    switch (e.code()) {
      case ErrorCode::RankDeficientConstraint: invariant = "rank"; break;
      case ErrorCode::NotPsd: invariant = "psd"; break;
      case ErrorCode::SingularK: invariant = "singular-K"; break;
      case ErrorCode::NotSymmetric: invariant = "symmetry"; break;
      case ErrorCode::DimensionMismatch: invariant = "dimensions"; break;
      default: throw;
    }
    throw Error(ErrorCode::StructureError, invariant + " (" + e.what() + ")");
  }
}

}  // namespace detail

inline SaddleProblem read_problem(const ProblemFileSet& fs, const RunConfig& cfg) {
  cfg.validate();
  if (fs.uses_k()) {
    if (!fs.splitIndex) throw Error(ErrorCode::InvalidConfig, "K input needs the split index n");
    const MarketMatrix k = read_matrix_market(fs.pathK);
    const Index total = k.values.rows();
    const Index n = *fs.splitIndex;
    if (k.values.cols() != total) throw Error(ErrorCode::StructureError, "dimensions (K is not square)");
    if (n <= 0 || n >= total) {
      throw Error(ErrorCode::StructureError, "dimensions (split index outside (0, n+m))");
    }
    const Index m = total - n;
    const double scale = k.values.norm();
    const double tol = (cfg.tolerances.relTol > 0.0 ? cfg.tolerances.relTol : default_rel_tol(total)) * scale;
    if (k.values.bottomRightCorner(m, m).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::StructureError, "zero-block (the (2,2) block of K is not numerically zero)");
    }
    if ((k.values.topRightCorner(n, m) - k.values.bottomLeftCorner(m, n).transpose()).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::StructureError, "transpose (off-diagonal blocks of K are not transposes)");
    }
    return detail::structured([&] {
      return SaddleProblem::create(SymmetricMatrix(k.values.topLeftCorner(n, n)),
                                   RectMatrix(k.values.bottomLeftCorner(m, n)), cfg.tolerances);
    });
  }
  if (fs.pathA.empty() || fs.pathB.empty()) {
    throw Error(ErrorCode::InvalidConfig, "need both A and B files, or K with a split index");
  }
  const MarketMatrix a = read_matrix_market(fs.pathA);
  const MarketMatrix b = read_matrix_market(fs.pathB);
  return detail::structured([&] {
    return SaddleProblem::create(SymmetricMatrix(a.values), RectMatrix(b.values), cfg.tolerances);
  });
}

/// Writes A.mtx (symmetric) and B.mtx (general) into dir.
inline void write_problem(const std::filesystem::path& dir, const SaddleProblem& p) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_matrix_market((dir / "A.mtx").string(), p.A().matrix(), MmSymmetry::Symmetric, "leading block A");
  write_matrix_market((dir / "B.mtx").string(), p.B().matrix(), MmSymmetry::General, "constraint block B");
}

}  // namespace spbounds

#endif  // SPBOUNDS_IO_HPP
