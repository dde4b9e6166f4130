#ifndef QLS_PROFILE_HPP
#define QLS_PROFILE_HPP

#include <memory>
#include <utility>
#include <vector>

#include "qls/field.hpp"
#include "qls/model.hpp"

namespace qls {

// Pointwise-accurate traveling-wave profile machinery shared by the kink
// (c=0, turning point at eta=-r0^2) and gray solitons (c>0). The map
// x(eta) = int sqrt(nu/(-V_c)) d eta is tabulated in two charts — the
// turning-point chart eta = xi(c)+s^2 and a logarithmic tail chart in
// q = -eta — and inverted per query by Newton with local re-quadrature, so
// amplitude values carry quadrature (not interpolation) accuracy.
class ProfileEvaluator {
  public:
    ProfileEvaluator(const NonlinearModel& model, double c);

    double c() const { return c_; }
    double xi_c() const { return xi_c_; }
    bool is_kink() const { return c_ == 0.0; }
    double mu_c() const;          // min amplitude, sqrt(r0^2+xi(c))
    double lambda_tail() const { return lambda_; } // true asymptotic decay of |eta|

    double eta_at(double x) const;      // even in x
    double amp_at(double x) const;      // sqrt(r0^2 + eta)
    double deta_dx(double x) const;     // signed (positive for x>0)
    double theta_prime_at(double x) const; // c*eta/(2(r0^2+eta))

    // kink as a signed real function plus derivatives (closed-form in u):
    // u' = sqrt(F(u^2)/nu(u^2)), u'' = -u (f nu + F nu')/nu^2
    double kink_value(double x) const;
    double kink_deriv(double x) const;
    double kink_dderiv(double x) const;

    const NonlinearModel& model() const { return model_; }

  private:
    struct ChartPoint {
        double eta;
        double sigma; // r0^2 + eta, cancellation-free in the core chart
    };
    ChartPoint locate(double xa) const; // xa >= 0

    double x_of_s(int k, double s) const; // cumulative + local panel
    double x_of_tau(int k, double tau) const;
    double integrand_s(double s) const;   // 2 s sqrt(nu/(-V_c)) at eta=xi+s^2
    double integrand_tau(double tau) const; // q sqrt(nu/(-V_c)) at eta=-e^tau
    double neg_potential(double eta) const;

    NonlinearModel model_;
    double c_ = 0.0;
    double xi_c_ = 0.0;
    double s_split_ = 0.0;           // core chart covers s in [0, s_split]
    std::vector<double> s_nodes_, xs_;   // cumulative x over the core chart
    std::vector<double> tau_nodes_, xq_; // cumulative x over the tail chart
    double lambda_ = 0.0;
};

struct SolitonProfile {
    NonlinearModel model;
    double c = 0.0;
    double x0 = 0.0, dx = 0.0;
    std::vector<double> amplitude; // |u|(x_i)
    std::vector<double> phase;     // theta(x_i); identically 0 for the kink
    std::vector<double> eta;       // |u|^2 - r0^2
    double mu_c = 0.0;
    double decay_rate = 0.0;          // fitted exponential rate of |eta|
    double expected_decay_rate = 0.0; // sqrt((c_s^2-c^2)/nu(r0^2))
    std::shared_ptr<const ProfileEvaluator> eval;

    int n() const { return static_cast<int>(amplitude.size()); }
    double x(int i) const { return x0 + i * dx; }
    double x_max() const { return x0 + (n() - 1) * dx; }
    bool is_kink() const { return c == 0.0; }
    cdouble value(int i) const;       // grid sample (signed real for the kink)
    cdouble value_at(double x) const; // evaluator-accurate off-grid value
    double theta_at(double x) const;
    FieldState to_field() const;
};

// Default half-width: max(20, 30/decay) so functional tails sit at ~1e-12.
double default_x_max(const NonlinearModel& model, double c);

SolitonProfile kink_profile(const NonlinearModel& model, double x_max = 0.0, int n = 4096);
SolitonProfile gray_profile(const NonlinearModel& model, double c, double x_max = 0.0,
                            int n = 4096);

// (fitted rate, expected rate) from a linear fit of -log|eta| over
// x in [0.3, 0.8] x_max; throws when |eta| dips below 1e-14 in the window.
std::pair<double, double> decay_rate_fit(const SolitonProfile& profile);

// u(x-shift) e^{i phase_offset} resampled onto the profile grid by cubic
// interpolation; endpoints clamped to the background values.
FieldState sample_field(const SolitonProfile& profile, double phase_offset, double shift);

} // namespace qls

#endif
