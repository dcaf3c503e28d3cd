#ifndef QACAT_RELATIONS_HPP
#define QACAT_RELATIONS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qacat/error.hpp"

namespace qacat {

/// n x m boolean matrix relating m source QAs (columns) to n target QAs
/// (rows). Rows are packed into 64-bit words.
class Relation {
 public:
  Relation() = default;

  Relation(std::vector<std::string> row_labels, std::vector<std::string> col_labels)
      : rows_(row_labels.size()),
        cols_(col_labels.size()),
        words_per_row_((cols_ + 63) / 64),
        bits_(rows_ * words_per_row_, 0),
        row_labels_(std::move(row_labels)),
        col_labels_(std::move(col_labels)) {}

  /// Unlabelled relation; labels default to "r<i>" and "c<j>".
  static Relation sized(std::size_t n, std::size_t m) {
    std::vector<std::string> rl;
    std::vector<std::string> cl;
    for (std::size_t i = 0; i < n; ++i) rl.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < m; ++j) cl.push_back("c" + std::to_string(j));
    return Relation(std::move(rl), std::move(cl));
  }

  static Relation identity(const std::vector<std::string>& labels) {
    Relation r(labels, labels);
    for (std::size_t i = 0; i < labels.size(); ++i) r.set(i, i);
    return r;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }

  bool get(std::size_t i, std::size_t j) const {
    check(i, j);
    return (bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1U;
  }

  void set(std::size_t i, std::size_t j, bool v = true) {
    check(i, j);
    std::uint64_t mask = std::uint64_t{1} << (j % 64);
    auto& w = bits_[i * words_per_row_ + j / 64];
    w = v ? (w | mask) : (w & ~mask);
  }

  bool row_nonzero(std::size_t i) const {
    for (std::size_t k = 0; k < words_per_row_; ++k) {
      if (bits_[i * words_per_row_ + k]) return true;
    }
    return false;
  }

  bool col_nonzero(std::size_t j) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (get(i, j)) return true;
    }
    return false;
  }

  /// g.compose(f) is g . f: row i of g OR-ed over the f rows it selects.
  friend Relation compose(const Relation& g, const Relation& f) {
    if (g.cols_ != f.rows_) {
      fail(ErrorCode::DimensionMismatch,
           "cannot compose " + g.shape() + " after " + f.shape());
    }
    if (g.col_labels_ != f.row_labels_) fail(ErrorCode::LabelMismatch, "intermediate QA labels differ");
    Relation out(g.row_labels_, f.col_labels_);
    for (std::size_t i = 0; i < g.rows_; ++i) {
      for (std::size_t k = 0; k < g.cols_; ++k) {
        if (!g.get(i, k)) continue;
        for (std::size_t w = 0; w < f.words_per_row_; ++w) {
          out.bits_[i * out.words_per_row_ + w] |= f.bits_[k * f.words_per_row_ + w];
        }
      }
    }
    return out;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  /// "n m" then n lines of 0/1.
  std::string dump() const {
    std::string out = std::to_string(rows_) + " " + std::to_string(cols_) + "\n";
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out += get(i, j) ? '1' : '0';
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  void check(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      fail(ErrorCode::InvalidArgument, "index (" + std::to_string(i) + "," + std::to_string(j) + ") outside " + shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
};

/// Maps every source to nothing and every target from nothing.
inline Relation naive(std::size_t n, std::size_t m) { return Relation::sized(n, m); }

inline Relation naive(std::vector<std::string> row_labels, std::vector<std::string> col_labels) {
  return Relation(std::move(row_labels), std::move(col_labels));
}

struct Coverage {
  std::size_t source_covered = 0;  // nonzero columns
  std::size_t target_covered = 0;  // nonzero rows

  friend bool operator==(const Coverage&, const Coverage&) = default;
};

inline Coverage coverage(const Relation& r) {
  Coverage c;
  for (std::size_t j = 0; j < r.cols(); ++j) c.source_covered += r.col_nonzero(j);
  for (std::size_t i = 0; i < r.rows(); ++i) c.target_covered += r.row_nonzero(i);
  return c;
}

/// Componentwise at least as much coverage, strictly more in one component.
inline bool dominates(const Relation& h2, const Relation& h1) {
  if (h2.rows() != h1.rows() || h2.cols() != h1.cols()) {
    fail(ErrorCode::DimensionMismatch, h2.shape() + " vs " + h1.shape());
  }
  Coverage a = coverage(h2);
  Coverage b = coverage(h1);
  return a.source_covered >= b.source_covered && a.target_covered >= b.target_covered &&
         (a.source_covered > b.source_covered || a.target_covered > b.target_covered);
}

struct Totality {
  bool total = false;       // every column nonzero
  bool surjective = false;  // every row nonzero
};

inline Totality totality_check(const Relation& r) {
  Coverage c = coverage(r);
  return {c.source_covered == r.cols(), c.target_covered == r.rows()};
}

inline std::ostream& operator<<(std::ostream& os, const Relation& r) { return os << r.dump(); }

}  // namespace qacat

#endif  // QACAT_RELATIONS_HPP
