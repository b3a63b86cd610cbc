#pragma once

#include <span>
#include <vector>

namespace prandtl {

/// Real banded matrix with an LU factorization (LAPACK dgbtrf/dgbtrs,
/// partial pivoting). Fill with set(), then factorize() once and solve
/// any number of right-hand sides.
class BandedLU {
 public:
  BandedLU(int n, int kl, int ku);

  int size() const { return n_; }
  void set(int i, int j, double value);
  double get(int i, int j) const;
  void factorize();
  /// Solves in place; rhs is column-major n x nrhs.
  void solve(std::span<double> rhs, int nrhs) const;

 private:
  int n_, kl_, ku_, ldab_;
  bool factored_ = false;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

}  // namespace prandtl
