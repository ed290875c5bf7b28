#ifndef YAMABE_SCALAR_FIELD_HPP
#define YAMABE_SCALAR_FIELD_HPP

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "yamabe/errors.hpp"
#include "yamabe/jet.hpp"
#include "yamabe/signature.hpp"

namespace yamabe {

// Value and first two derivatives of a function of one variable.
struct ProfileJet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// One-dimensional profile with honest second derivatives, defined on an
// open interval (lo, hi). Closed-form members supply analytic jets;
// tabulated members interpolate (see quadrature.hpp).
class Profile1D {
public:
    Profile1D() = default;
    Profile1D(std::function<ProfileJet(double)> fn, double lo, double hi)
        : fn_(std::move(fn)), lo_(lo), hi_(hi) {}

    ProfileJet operator()(double s) const { return fn_(s); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool valid() const { return static_cast<bool>(fn_); }

    static Profile1D constant(double c) {
        return Profile1D([c](double) { return ProfileJet{c, 0.0, 0.0}; },
                         -std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity());
    }

private:
    std::function<ProfileJet(double)> fn_;
    double lo_ = -std::numeric_limits<double>::infinity();
    double hi_ = std::numeric_limits<double>::infinity();
};

namespace detail {

class FieldImpl {
public:
    virtual ~FieldImpl() = default;
    virtual Jet2 eval(std::span<const double> x) const = 0;
    // Value and gradient only; default falls back to the full jet.
    virtual std::pair<double, std::vector<double>>
    eval_gradient(std::span<const double> x) const {
        Jet2 j = eval(x);
        std::vector<double> g(j.grad().begin(), j.grad().end());
        return {j.value(), std::move(g)};
    }
};

// Generic field: any expression written over Jet2 arithmetic.
class FunctionField final : public FieldImpl {
public:
    using JetFn = std::function<Jet2(std::span<const Jet2>)>;
    FunctionField(int dim, JetFn fn) : dim_(dim), fn_(std::move(fn)) {}

    Jet2 eval(std::span<const double> x) const override {
        std::vector<Jet2> seeds;
        seeds.reserve(static_cast<size_t>(dim_));
        for (int i = 0; i < dim_; ++i)
            seeds.push_back(Jet2::variable(dim_, i, x[static_cast<size_t>(i)]));
        return fn_(seeds);
    }

private:
    int dim_;
    JetFn fn_;
};

// phi(xi) with xi = sum_i alpha_i x_i. The chain rule is applied directly:
// grad_i = p' alpha_i, hess_ij = p'' alpha_i alpha_j.
class TranslationField final : public FieldImpl {
public:
    TranslationField(Profile1D p, std::vector<double> alpha)
        : p_(std::move(p)), alpha_(std::move(alpha)) {}

    Jet2 eval(std::span<const double> x) const override {
        int n = static_cast<int>(alpha_.size());
        Jet2 xi(n);
        double s = arg(x);
        for (int i = 0; i < n; ++i)
            xi = xi + Jet2::variable(n, i, x[static_cast<size_t>(i)]) * alpha_[static_cast<size_t>(i)];
        ProfileJet pj = p_(s);
        return xi.chain(pj.v, pj.d1, pj.d2);
    }

    std::pair<double, std::vector<double>>
    eval_gradient(std::span<const double> x) const override {
        ProfileJet pj = p_(arg(x));
        std::vector<double> g(alpha_.size());
        for (size_t i = 0; i < alpha_.size(); ++i) g[i] = pj.d1 * alpha_[i];
        return {pj.v, std::move(g)};
    }

    double arg(std::span<const double> x) const {
        double s = 0.0;
        for (size_t i = 0; i < alpha_.size(); ++i) s += alpha_[i] * x[i];
        return s;
    }

    const Profile1D& profile() const { return p_; }
    const std::vector<double>& alpha() const { return alpha_; }

private:
    Profile1D p_;
    std::vector<double> alpha_;
};

// phi(r) with r = sum_i eps_i x_i^2.
class RotationField final : public FieldImpl {
public:
    RotationField(Profile1D p, Signature sig) : p_(std::move(p)), sig_(std::move(sig)) {}

    Jet2 eval(std::span<const double> x) const override {
        int n = sig_.dim();
        Jet2 r(n);
        for (int i = 0; i < n; ++i) {
            Jet2 xi = Jet2::variable(n, i, x[static_cast<size_t>(i)]);
            r = r + xi * xi * static_cast<double>(sig_.eps(i));
        }
        ProfileJet pj = p_(r.value());
        return r.chain(pj.v, pj.d1, pj.d2);
    }

    std::pair<double, std::vector<double>>
    eval_gradient(std::span<const double> x) const override {
        double r = sig_.norm2(x);
        ProfileJet pj = p_(r);
        std::vector<double> g(static_cast<size_t>(sig_.dim()));
        for (int i = 0; i < sig_.dim(); ++i)
            g[static_cast<size_t>(i)] = 2.0 * sig_.eps(i) * x[static_cast<size_t>(i)] * pj.d1;
        return {pj.v, std::move(g)};
    }

    const Profile1D& profile() const { return p_; }

private:
    Profile1D p_;
    Signature sig_;
};

} // namespace detail

// Smooth function of n variables with exact first and second derivatives.
// Immutable and cheap to copy; safe for concurrent evaluation.
class ScalarField {
public:
    ScalarField() = default;

    static ScalarField from_function(int dim, detail::FunctionField::JetFn fn,
                                     bool require_positive = false) {
        return ScalarField(std::make_shared<detail::FunctionField>(dim, std::move(fn)),
                           dim, require_positive);
    }

    static ScalarField constant(int dim, double c, bool require_positive = false) {
        return ScalarField(std::make_shared<detail::TranslationField>(
                               Profile1D::constant(c),
                               std::vector<double>(static_cast<size_t>(dim), 0.0)),
                           dim, require_positive);
    }

    static ScalarField translation_profile(Profile1D p, std::vector<double> alpha,
                                           bool require_positive = false) {
        int dim = static_cast<int>(alpha.size());
        return ScalarField(std::make_shared<detail::TranslationField>(std::move(p), std::move(alpha)),
                           dim, require_positive);
    }

    static ScalarField rotation_profile(Profile1D p, const Signature& sig,
                                        bool require_positive = false) {
        int dim = sig.dim();
        return ScalarField(std::make_shared<detail::RotationField>(std::move(p), sig),
                           dim, require_positive);
    }

    int dim() const { return dim_; }
    bool positivity_required() const { return positive_; }
    bool valid() const { return static_cast<bool>(impl_); }

    // Full second-order jet at x.
    Jet2 eval(std::span<const double> x) const {
        check_point(x);
        Jet2 j = impl_->eval(x);
        enforce_positive(j.value(), x);
        return j;
    }

    // Value and gradient only (geodesic right-hand sides need no Hessian).
    std::pair<double, std::vector<double>> eval_gradient(std::span<const double> x) const {
        check_point(x);
        auto vg = impl_->eval_gradient(x);
        enforce_positive(vg.first, x);
        return vg;
    }

    double value(std::span<const double> x) const { return eval_gradient(x).first; }

private:
    ScalarField(std::shared_ptr<const detail::FieldImpl> impl, int dim, bool positive)
        : impl_(std::move(impl)), dim_(dim), positive_(positive) {}

    void check_point(std::span<const double> x) const {
        if (!impl_) throw InputError("ScalarField: empty field");
        if (static_cast<int>(x.size()) != dim_)
            throw InputError("ScalarField: point dimension mismatch");
    }

    void enforce_positive(double v, std::span<const double> x) const {
        if (positive_ && !(v > 0.0)) {
            std::ostringstream os;
            os << "ScalarField: positivity violated (value " << v << " at point";
            for (double c : x) os << ' ' << c;
            os << ")";
            throw FieldDomainError(os.str());
        }
    }

    std::shared_ptr<const detail::FieldImpl> impl_;
    int dim_ = 0;
    bool positive_ = false;
};

} // namespace yamabe

#endif
