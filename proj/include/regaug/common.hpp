#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace regaug {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration, schema or command-line input. The CLI maps this to its
/// own exit code so scripts can tell user mistakes apart from runtime failures.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dense row-major matrix of doubles.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Table(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw Error("Table: data size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  const std::vector<double>& data() const { return data_; }

  /// Rows picked by index, in the given order (duplicates allowed).
  Table select_rows(std::span<const std::size_t> idx) const;
  /// Horizontal concatenation; row counts must agree.
  static Table hconcat(const Table& left, const Table& right);

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> select(std::span<const double> v, std::span<const std::size_t> idx);

// ---------------------------------------------------------------------------
// Seeding and random streams.
//
// Every random decision in the library is drawn from a stream whose seed is a
// stable hash of (master seed, tag, index). Results therefore do not depend on
// thread scheduling, and the bounded draws below avoid the implementation-
// defined std:: distributions so byte output is portable across stdlibs.

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);
  /// Uniform real in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
/// independent; results are written by index so scheduling never matters.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator). Returns 0 for n < 2.
double sample_std(std::span<const double> v);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace regaug

#include "regaug/detail/parallel.hpp"
