#include "prandtl/banded.hpp"

#include <stdexcept>
#include <string>

#include "prandtl/errors.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab,
             const int* ldab, int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const double* ab, const int* ldab, const int* ipiv, double* b, const int* ldb,
             int* info, size_t trans_len);
}

namespace prandtl {

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<size_t>(ldab_) * n, 0.0), ipiv_(n, 0) {
  if (n < 1 || kl < 0 || ku < 0) throw ParameterError("banded: bad dimensions");
}

void BandedLU::set(int i, int j, double value) {
  if (factored_) throw std::logic_error("banded: matrix already factorized");
  if (j - i > ku_ || i - j > kl_)
    throw ParameterError("banded: entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") outside band");
  ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)] = value;
}

double BandedLU::get(int i, int j) const {
  if (j - i > ku_ || i - j > kl_) return 0.0;
  return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

void BandedLU::factorize() {
  int info = 0;
  dgbtrf_(&n_, &n_, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info != 0)
    throw std::runtime_error("banded: factorization failed, info = " + std::to_string(info));
  factored_ = true;
}

void BandedLU::solve(std::span<double> rhs, int nrhs) const {
  if (!factored_) throw std::logic_error("banded: solve before factorize");
  if (rhs.size() != static_cast<size_t>(n_) * nrhs)
    throw ParameterError("banded: rhs has wrong size");
  const char trans = 'N';
  int info = 0;
  dgbtrs_(&trans, &n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv_.data(), rhs.data(), &n_,
          &info, 1);
  if (info != 0) throw std::runtime_error("banded: solve failed");
}

}  // namespace prandtl
