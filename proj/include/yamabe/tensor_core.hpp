#ifndef YAMABE_TENSOR_CORE_HPP
#define YAMABE_TENSOR_CORE_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/jet.hpp"
#include "yamabe/matrix.hpp"
#include "yamabe/scalar_field.hpp"
#include "yamabe/signature.hpp"

namespace yamabe {

// Pointwise curvature of the conformally flat metric g = delta / phi^2,
// where delta is the signed flat metric and phi > 0. Everything below is a
// closed formula in phi and its first two derivatives, evaluated through
// exact jets. Conventions:
//   lap(phi)   = sum_i eps_i phi_ii        (signed Laplacian)
//   grad2(phi) = sum_i eps_i phi_i^2       (signed gradient square)

namespace detail {

inline void check_dims(const ScalarField& f, const Signature& sig,
                       std::span<const double> x, const char* who) {
    if (f.dim() != sig.dim() || static_cast<int>(x.size()) != sig.dim())
        throw InputError(std::string(who) + ": dimension mismatch");
}

inline double signed_laplacian(const Jet2& j, const Signature& sig) {
    double s = 0.0;
    for (int i = 0; i < sig.dim(); ++i) s += sig.eps(i) * j.d2(i, i);
    return s;
}

inline double signed_grad2(const Jet2& j, const Signature& sig) {
    double s = 0.0;
    for (int i = 0; i < sig.dim(); ++i) s += sig.eps(i) * j.d1(i) * j.d1(i);
    return s;
}

} // namespace detail

// Christoffel symbols of g = delta / phi^2, indexed Gamma^k_ij.
class Christoffel {
public:
    explicit Christoffel(int n) : n_(n), g_(static_cast<size_t>(n) * n * n, 0.0) {}
    int dim() const { return n_; }
    double operator()(int k, int i, int j) const {
        return g_[(static_cast<size_t>(k) * n_ + i) * n_ + j];
    }
    double& at(int k, int i, int j) {
        return g_[(static_cast<size_t>(k) * n_ + i) * n_ + j];
    }

private:
    int n_;
    std::vector<double> g_;
};

// Gamma^k_ij = 0 for distinct i,j,k;  Gamma^i_ij = -phi_j/phi;
// Gamma^k_ii = eps_i eps_k phi_k/phi (i != k);  Gamma^i_ii = -phi_i/phi.
inline Christoffel conformal_christoffel(const ScalarField& phi, const Signature& sig,
                                         std::span<const double> x) {
    detail::check_dims(phi, sig, x, "conformal_christoffel");
    const int n = sig.dim();
    Jet2 pj = phi.eval(x);
    if (!(pj.value() > 0.0))
        throw FieldDomainError("conformal_christoffel: phi <= 0 at evaluation point");
    const double ip = 1.0 / pj.value();

    Christoffel G(n);
    for (int i = 0; i < n; ++i) {
        G.at(i, i, i) = -pj.d1(i) * ip;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            G.at(i, i, j) = -pj.d1(j) * ip;
            G.at(i, j, i) = -pj.d1(j) * ip;
            G.at(j, i, i) = sig.eps(i) * sig.eps(j) * pj.d1(j) * ip;
        }
    }
    return G;
}

// Hessian of f in the conformal metric:
// (hess f)_ij = f_ij + (phi_i f_j + phi_j f_i)/phi
//               - delta_ij eps_i sum_k eps_k phi_k f_k / phi.
// Equivalent to f_ij - Gamma^k_ij f_k with the symbols above; built
// symmetric by mirroring the lower triangle.
inline Matrix hessian_conformal(const ScalarField& f, const ScalarField& phi,
                                const Signature& sig, std::span<const double> x) {
    detail::check_dims(f, sig, x, "hessian_conformal");
    detail::check_dims(phi, sig, x, "hessian_conformal");
    const int n = sig.dim();
    Jet2 pj = phi.eval(x);
    if (!(pj.value() > 0.0))
        throw FieldDomainError("hessian_conformal: phi <= 0 at evaluation point");
    Jet2 fj = f.eval(x);
    const double ip = 1.0 / pj.value();

    double mixed = 0.0;  // sum_k eps_k phi_k f_k / phi
    for (int k = 0; k < n; ++k) mixed += sig.eps(k) * pj.d1(k) * fj.d1(k);
    mixed *= ip;

    Matrix H(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = fj.d2(i, j) + ip * (pj.d1(i) * fj.d1(j) + pj.d1(j) * fj.d1(i));
            if (i == j) v -= sig.eps(i) * mixed;
            H(i, j) = v;
            H(j, i) = v;
        }
    return H;
}

// Ric = phi^{-2} { (n-2) phi hess_flat(phi) + [phi lap(phi) - (n-1) grad2(phi)] delta }.
inline Matrix ricci_conformal(const ScalarField& phi, const Signature& sig,
                              std::span<const double> x) {
    detail::check_dims(phi, sig, x, "ricci_conformal");
    const int n = sig.dim();
    Jet2 pj = phi.eval(x);
    if (!(pj.value() > 0.0))
        throw FieldDomainError("ricci_conformal: phi <= 0 at evaluation point");
    const double p = pj.value();
    const double lap = detail::signed_laplacian(pj, sig);
    const double g2 = detail::signed_grad2(pj, sig);
    const double ip2 = 1.0 / (p * p);
    const double diag = p * lap - (n - 1) * g2;

    Matrix R(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = (n - 2) * p * pj.d2(i, j);
            if (i == j) v += diag * sig.eps(i);
            v *= ip2;
            R(i, j) = v;
            R(j, i) = v;
        }
    return R;
}

// scal = (n-1) (2 phi lap(phi) - n grad2(phi)).
inline double scalar_conformal(const ScalarField& phi, const Signature& sig,
                               std::span<const double> x) {
    detail::check_dims(phi, sig, x, "scalar_conformal");
    const int n = sig.dim();
    Jet2 pj = phi.eval(x);
    if (!(pj.value() > 0.0))
        throw FieldDomainError("scalar_conformal: phi <= 0 at evaluation point");
    return (n - 1) * (2.0 * pj.value() * detail::signed_laplacian(pj, sig)
                      - n * detail::signed_grad2(pj, sig));
}

// Schouten tensor of the conformal metric as a (0,2) tensor, in the
// reduced form A = hess_flat(phi)/phi - grad2(phi) delta / (2 phi^2).
// This form carries no 1/(n-2) factor and is used for every n >= 2; the
// general-metric definition is singular at n = 2.
inline Matrix schouten_tensor(const ScalarField& phi, const Signature& sig,
                              std::span<const double> x) {
    detail::check_dims(phi, sig, x, "schouten_tensor");
    const int n = sig.dim();
    Jet2 pj = phi.eval(x);
    if (!(pj.value() > 0.0))
        throw FieldDomainError("schouten_tensor: phi <= 0 at evaluation point");
    const double p = pj.value();
    const double g2 = detail::signed_grad2(pj, sig);

    Matrix A(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = pj.d2(i, j) / p;
            if (i == j) v -= 0.5 * g2 * sig.eps(i) / (p * p);
            A(i, j) = v;
            A(j, i) = v;
        }
    return A;
}

// Endomorphism g^{-1} A, first index raised with g^{ij} = phi^2 eps_i:
// (g^{-1}A)_ij = eps_i phi phi_ij - grad2(phi) delta_ij / 2.
// Not symmetric entrywise in mixed signature, but its characteristic
// polynomial (hence every sigma_k) is raising-convention independent.
inline Matrix schouten_endomorphism(const ScalarField& phi, const Signature& sig,
                                    std::span<const double> x) {
    detail::check_dims(phi, sig, x, "schouten_endomorphism");
    const int n = sig.dim();
    Jet2 pj = phi.eval(x);
    if (!(pj.value() > 0.0))
        throw FieldDomainError("schouten_endomorphism: phi <= 0 at evaluation point");
    const double p = pj.value();
    const double g2 = detail::signed_grad2(pj, sig);

    Matrix E(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = sig.eps(i) * p * pj.d2(i, j);
            if (i == j) v -= 0.5 * g2;
            E(i, j) = v;
        }
    return E;
}

// All elementary symmetric functions sigma_1..sigma_n of the spectrum of a
// real matrix, computed from traces of powers through the Newton
// identities. No eigendecomposition: the result stays real even when the
// spectrum is complex (indefinite signature), and sigma_1 is the trace by
// the same arithmetic path.
inline std::vector<double> sigma_all(const Matrix& endo) {
    const int n = endo.dim();
    std::vector<double> power_traces(static_cast<size_t>(n) + 1, 0.0);
    Matrix acc = endo;
    power_traces[1] = acc.trace();
    for (int m = 2; m <= n; ++m) {
        acc = acc * endo;
        power_traces[static_cast<size_t>(m)] = acc.trace();
    }

    std::vector<double> e(static_cast<size_t>(n) + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        double sign = 1.0;
        for (int m = 1; m <= k; ++m) {
            s += sign * e[static_cast<size_t>(k - m)] * power_traces[static_cast<size_t>(m)];
            sign = -sign;
        }
        e[static_cast<size_t>(k)] = s / k;
    }
    return {e.begin() + 1, e.end()};
}

// One candidate soliton: metric delta/phi^2 with potential f, curvature
// order k and constant lambda.
struct SolitonSpec {
    int n;
    int k;
    double lambda;
    Signature sig;
    ScalarField phi;  // positivity-required
    ScalarField f;

    SolitonSpec(int n_, int k_, double lambda_, Signature sig_, ScalarField phi_, ScalarField f_)
        : n(n_), k(k_), lambda(lambda_), sig(std::move(sig_)),
          phi(std::move(phi_)), f(std::move(f_)) {
        if (n != sig.dim() || phi.dim() != n || f.dim() != n)
            throw InputError("SolitonSpec: inconsistent dimensions");
        if (k < 1 || k > n)
            throw InputError("SolitonSpec: need 1 <= k <= n");
    }
};

// Residual of the soliton equation at x:
//   hess_g f - 2(n-1)(sigma_k - lambda) g,   g_ij = eps_i delta_ij / phi^2.
// Vanishes (to tolerance) exactly when the spec solves the equation at x.
inline Matrix soliton_residual(const SolitonSpec& spec, std::span<const double> x) {
    Matrix H = hessian_conformal(spec.f, spec.phi, spec.sig, x);
    Matrix E = schouten_endomorphism(spec.phi, spec.sig, x);
    double sk = sigma_all(E)[static_cast<size_t>(spec.k - 1)];
    double p = spec.phi.value(x);
    double c = 2.0 * (spec.n - 1) * (sk - spec.lambda) / (p * p);
    for (int i = 0; i < spec.n; ++i)
        H(i, i) -= c * spec.sig.eps(i);
    return H;
}

// Everything the pointwise engine produces at one point.
struct CurvaturePack {
    Matrix ricci;
    double scalar;
    Matrix schouten;
    Matrix endo;
    std::vector<double> sigma;  // sigma_1 .. sigma_n
};

inline CurvaturePack curvature_pack(const ScalarField& phi, const Signature& sig,
                                    std::span<const double> x) {
    Matrix E = schouten_endomorphism(phi, sig, x);
    return CurvaturePack{
        ricci_conformal(phi, sig, x),
        scalar_conformal(phi, sig, x),
        schouten_tensor(phi, sig, x),
        E,
        sigma_all(E),
    };
}

} // namespace yamabe

#endif
