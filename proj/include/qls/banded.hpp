#ifndef QLS_BANDED_HPP
#define QLS_BANDED_HPP

#include <complex>
#include <vector>

namespace qls {

// Complex banded LU with partial pivoting (LAPACK-style band storage with kl
// fill-in rows). Assemble with at(i,j), factor once, solve many right-hand
// sides; used for the implicit dispersion stage of the time stepper.
class BandedLU {
  public:
    BandedLU(int n, int kl, int ku);

    std::complex<double>& at(int i, int j); // valid for -ku <= i-j <= kl
    void factor();
    void solve(std::vector<std::complex<double>>& b) const;

  private:
    int n_, kl_, ku_;
    int rows_; // 2*kl + ku + 1 (kl fill rows above the ku superdiagonals)
    std::vector<std::complex<double>> ab_;
    std::vector<int> piv_;
    bool factored_ = false;

    // A(i,j) lives at band row kl+ku+i-j of column j
    std::complex<double>& band(int i, int j) {
        return ab_[(kl_ + ku_ + i - j) + static_cast<size_t>(j) * rows_];
    }
    const std::complex<double>& band(int i, int j) const {
        return ab_[(kl_ + ku_ + i - j) + static_cast<size_t>(j) * rows_];
    }
};

} // namespace qls

#endif
