#ifndef YAMABE_REDUCTIONS_HPP
#define YAMABE_REDUCTIONS_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/scalar_field.hpp"
#include "yamabe/signature.hpp"

namespace yamabe {

// Reduction of the soliton equation under the two symmetry ansaetze:
//   translation  xi = sum_i alpha_i x_i,
//   rotation     r  = sum_i eps_i x_i^2.
// Both collapse the tensor equation to two ODEs for 1-D profiles
// phi(.), f(.): a potential equation f'' + 2 f' phi'/phi = 0 and a
// curvature equation whose coefficient is b_nk (translation) or c_nk
// (rotation).

namespace detail {

// (n-1)! / (k! (n-k)!) as an exact reduced rational, returned as the
// correctly rounded double num/den.
inline double reduced_binomial_ratio(int n, int k) {
    if (n < 2 || k < 1 || k > n)
        throw InputError("reduced_binomial_ratio: need n >= 2 and 1 <= k <= n");
    if (n > 20)
        throw InputError("reduced_binomial_ratio: factorials exceed exact integer range");
    auto fact = [](int m) {
        std::uint64_t r = 1;
        for (int i = 2; i <= m; ++i) r *= static_cast<std::uint64_t>(i);
        return r;
    };
    std::uint64_t num = fact(n - 1);
    std::uint64_t den = fact(k) * fact(n - k);
    std::uint64_t g = std::gcd(num, den);
    return static_cast<double>(num / g) / static_cast<double>(den / g);
}

} // namespace detail

// Translation curvature coefficient:
// b_nk = (n-1)!/(k!(n-k)!) * (-1)^(k-1) / 2^(k-1).
inline double b_nk(int n, int k) {
    double base = detail::reduced_binomial_ratio(n, k);
    double sign = (k % 2 == 1) ? 1.0 : -1.0;
    return base * sign * std::ldexp(1.0, 1 - k);
}

// Rotation curvature coefficient:
// c_nk = (n-1)!/(k!(n-k)!) * 2^(k-1).
inline double c_nk(int n, int k) {
    return detail::reduced_binomial_ratio(n, k) * std::ldexp(1.0, k - 1);
}

// Spectrum of the Schouten endomorphism under the translation ansatz:
// theta with multiplicity n-1, mu simple.
struct EigenPair {
    double theta;
    double mu;
};

inline EigenPair translation_eigenpair(double phi, double dphi, double ddphi,
                                       double alpha_norm2) {
    return EigenPair{-0.5 * dphi * dphi * alpha_norm2,
                     (phi * ddphi - 0.5 * dphi * dphi) * alpha_norm2};
}

// sigma_k of the translation-invariant metric:
// b_nk [k phi phi'' - (n/2) phi'^2] phi'^(2k-2) ||alpha||^(2k).
inline double translation_sigma_k(double phi, double dphi, double ddphi,
                                  double alpha_norm2, int n, int k) {
    double bracket = k * phi * ddphi - 0.5 * n * dphi * dphi;
    double dpow = (k == 1) ? 1.0 : std::pow(dphi * dphi, k - 1);
    double apow = (k == 0) ? 1.0 : std::pow(alpha_norm2, k);
    return b_nk(n, k) * bracket * dpow * apow;
}

// sigma_k of the rotation-invariant metric:
// c_nk [phi phi' - r phi'^2]^(k-1) [2n phi phi' - 2n r phi'^2 + 4k r phi phi''].
inline double rotation_sigma_k(double phi, double dphi, double ddphi,
                               double r, int n, int k) {
    double b1 = phi * dphi - r * dphi * dphi;
    double b2 = 2.0 * n * phi * dphi - 2.0 * n * r * dphi * dphi
              + 4.0 * k * r * phi * ddphi;
    double b1pow = (k == 1) ? 1.0 : std::pow(b1, k - 1);
    return c_nk(n, k) * b1pow * b2;
}

// Residuals of the two reduced equations. Both vanish exactly when the
// profiles solve the reduced system at the given abscissa.
struct ReducedResidual {
    double potential;  // f'' + 2 f' phi' / phi
    double curvature;  // curvature ODE left side minus lambda
};

// Translation-invariant data: direction alpha, its signed norm, and the
// 1-D profiles. The light-like flag is fixed at construction by exact
// comparison of the positive and negative parts of sum_i eps_i alpha_i^2;
// no tolerance is involved.
class TranslationAnsatz {
public:
    TranslationAnsatz(std::vector<double> alpha, Signature sig,
                      Profile1D phi, Profile1D f)
        : alpha_(std::move(alpha)), sig_(std::move(sig)),
          phi_(std::move(phi)), f_(std::move(f)) {
        if (static_cast<int>(alpha_.size()) != sig_.dim())
            throw InputError("TranslationAnsatz: alpha/signature dimension mismatch");
        bool all_zero = true;
        for (double a : alpha_)
            if (a != 0.0) { all_zero = false; break; }
        if (all_zero) throw InputError("TranslationAnsatz: alpha must be nonzero");
        alpha_norm2_ = sig_.norm2(alpha_);
        lightlike_ = sig_.is_null(alpha_);
        if (lightlike_) alpha_norm2_ = 0.0;
    }

    const std::vector<double>& alpha() const { return alpha_; }
    const Signature& sig() const { return sig_; }
    int dim() const { return sig_.dim(); }
    double alpha_norm2() const { return alpha_norm2_; }
    bool lightlike() const { return lightlike_; }
    const Profile1D& phi() const { return phi_; }
    const Profile1D& f() const { return f_; }

    double xi_of(std::span<const double> x) const {
        double s = 0.0;
        for (size_t i = 0; i < alpha_.size(); ++i) s += alpha_[i] * x[i];
        return s;
    }

    ScalarField phi_field() const {
        return ScalarField::translation_profile(phi_, alpha_, /*require_positive=*/true);
    }
    ScalarField f_field() const {
        return ScalarField::translation_profile(f_, alpha_);
    }

private:
    std::vector<double> alpha_;
    Signature sig_;
    double alpha_norm2_;
    bool lightlike_;
    Profile1D phi_, f_;
};

inline ReducedResidual translation_residuals(const TranslationAnsatz& a, int k,
                                             double lambda, double xi) {
    const int n = a.dim();
    ProfileJet p = a.phi()(xi);
    ProfileJet f = a.f()(xi);
    if (!(p.v > 0.0))
        throw FieldDomainError("translation_residuals: phi(xi) <= 0");
    double r1 = f.d2 + 2.0 * f.d1 * p.d1 / p.v;
    double r2 = translation_sigma_k(p.v, p.d1, p.d2, a.alpha_norm2(), n, k)
              + p.v * p.d1 * f.d1 * a.alpha_norm2() / (2.0 * (n - 1))
              - lambda;
    return ReducedResidual{r1, r2};
}

// Rotation-invariant data: profiles of r = sum_i eps_i x_i^2. The r = 0
// locus is a coordinate singularity of the parametrization; evaluation is
// meant for r != 0.
class RotationAnsatz {
public:
    RotationAnsatz(Signature sig, Profile1D phi, Profile1D f)
        : sig_(std::move(sig)), phi_(std::move(phi)), f_(std::move(f)) {}

    const Signature& sig() const { return sig_; }
    int dim() const { return sig_.dim(); }
    const Profile1D& phi() const { return phi_; }
    const Profile1D& f() const { return f_; }

    ScalarField phi_field() const {
        return ScalarField::rotation_profile(phi_, sig_, /*require_positive=*/true);
    }
    ScalarField f_field() const {
        return ScalarField::rotation_profile(f_, sig_);
    }

private:
    Signature sig_;
    Profile1D phi_, f_;
};

inline ReducedResidual rotation_residuals(const RotationAnsatz& a, int k,
                                          double lambda, double r) {
    const int n = a.dim();
    ProfileJet p = a.phi()(r);
    ProfileJet f = a.f()(r);
    if (!(p.v > 0.0))
        throw FieldDomainError("rotation_residuals: phi(r) <= 0");
    double r1 = f.d2 + 2.0 * f.d1 * p.d1 / p.v;
    double r2 = rotation_sigma_k(p.v, p.d1, p.d2, r, n, k)
              - p.v * p.v * f.d1 / (n - 1)
              + 2.0 * r * f.d1 * p.d1 * p.v / (n - 1)
              - lambda;
    return ReducedResidual{r1, r2};
}

} // namespace yamabe

#endif
