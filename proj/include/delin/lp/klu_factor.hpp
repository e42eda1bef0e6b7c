#pragma once

#include <vector>

#include <suitesparse/klu.h>

namespace delin::lp {

/// Owning wrapper around a KLU factorization of a square sparse matrix in
/// compressed-column form.
class KluFactor {
 public:
  KluFactor() { klu_defaults(&common_); }
  ~KluFactor() { release(); }
  KluFactor(const KluFactor&) = delete;
  KluFactor& operator=(const KluFactor&) = delete;

  /// Returns false if the matrix is singular.
  bool factor(int n, std::vector<int>& col_start, std::vector<int>& row_index, std::vector<double>& value) {
    release();
    n_ = n;
    if (n == 0) return true;
    symbolic_ = klu_analyze(n, col_start.data(), row_index.data(), &common_);
    if (!symbolic_) return false;
    numeric_ = klu_factor(col_start.data(), row_index.data(), value.data(), symbolic_, &common_);
    return numeric_ != nullptr && common_.status == KLU_OK;
  }

  /// b <- B^-1 b
  void solve(std::vector<double>& b) const {
    if (n_ > 0) klu_solve(symbolic_, numeric_, n_, 1, b.data(), &common_);
  }

  /// b <- B^-T b
  void tsolve(std::vector<double>& b) const {
    if (n_ > 0) klu_tsolve(symbolic_, numeric_, n_, 1, b.data(), &common_);
  }

 private:
  void release() {
    if (numeric_) klu_free_numeric(&numeric_, &common_);
    if (symbolic_) klu_free_symbolic(&symbolic_, &common_);
    numeric_ = nullptr;
    symbolic_ = nullptr;
  }

  mutable klu_common common_{};
  klu_symbolic* symbolic_ = nullptr;
  klu_numeric* numeric_ = nullptr;
  int n_ = 0;
};

}  // namespace delin::lp
