#include "qls/banded.hpp"

#include <cmath>

#include "qls/errors.hpp"

namespace qls {

using cplx = std::complex<double>;

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1),
      ab_(static_cast<size_t>(rows_) * n, cplx(0.0)), piv_(n) {
    if (n < 1 || kl < 0 || ku < 0) throw validation_error("BandedLU: bad dimensions");
}

cplx& BandedLU::at(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
        throw validation_error("BandedLU: entry outside the band");
    if (factored_) throw validation_error("BandedLU: already factored");
    return band(i, j);
}

void BandedLU::factor() {
    const int kut = kl_ + ku_; // upper bandwidth after fill-in
    for (int k = 0; k < n_; ++k) {
        int last = std::min(n_ - 1, k + kl_);
        int p = k;
        double pmag = std::abs(band(k, k));
        for (int i = k + 1; i <= last; ++i) {
            double m = std::abs(band(i, k));
            if (m > pmag) {
                pmag = m;
                p = i;
            }
        }
        piv_[k] = p;
        if (!(pmag > 0.0)) throw numerical_error("BandedLU: singular matrix");
        if (p != k) {
            int jend = std::min(n_ - 1, k + kut);
            for (int j = k; j <= jend; ++j) std::swap(band(k, j), band(p, j));
        }
        cplx pivot = band(k, k);
        for (int i = k + 1; i <= last; ++i) {
            cplx m = band(i, k) / pivot;
            band(i, k) = m; // store the multiplier
            int jend = std::min(n_ - 1, k + kut);
            for (int j = k + 1; j <= jend; ++j) band(i, j) -= m * band(k, j);
        }
    }
    factored_ = true;
}

void BandedLU::solve(std::vector<cplx>& b) const {
    if (!factored_) throw validation_error("BandedLU: factor() before solve()");
    if (static_cast<int>(b.size()) != n_) throw validation_error("BandedLU: size mismatch");
    const int kut = kl_ + ku_;
    for (int k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        int last = std::min(n_ - 1, k + kl_);
        for (int i = k + 1; i <= last; ++i) b[i] -= band(i, k) * b[k];
    }
    for (int k = n_ - 1; k >= 0; --k) {
        int jend = std::min(n_ - 1, k + kut);
        for (int j = k + 1; j <= jend; ++j) b[k] -= band(k, j) * b[j];
        b[k] /= band(k, k);
    }
}

} // namespace qls
