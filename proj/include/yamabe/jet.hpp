#ifndef YAMABE_JET_HPP
#define YAMABE_JET_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "yamabe/errors.hpp"

namespace yamabe {

// Second-order forward-mode jet in n variables: value, gradient and
// symmetric Hessian propagated exactly (to roundoff) through arithmetic.
// The Hessian is stored as a packed lower triangle, so symmetry holds by
// construction, not by cancellation.
class Jet2 {
public:
    explicit Jet2(int dim)
        : n_(dim), v_(0.0), g_(static_cast<size_t>(dim), 0.0),
          h_(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0) {
        if (dim < 1) throw InputError("Jet2: dimension must be >= 1");
    }

    static Jet2 constant(int dim, double v) {
        Jet2 j(dim);
        j.v_ = v;
        return j;
    }

    // Seed for the i-th coordinate: value v, unit gradient, zero Hessian.
    static Jet2 variable(int dim, int index, double v) {
        Jet2 j(dim);
        if (index < 0 || index >= dim) throw InputError("Jet2: variable index out of range");
        j.v_ = v;
        j.g_[static_cast<size_t>(index)] = 1.0;
        return j;
    }

    int dim() const { return n_; }
    double value() const { return v_; }
    double d1(int i) const { return g_[static_cast<size_t>(i)]; }
    double d2(int i, int j) const {
        return i >= j ? h_[pack(i, j)] : h_[pack(j, i)];
    }

    std::span<const double> grad() const { return g_; }

    // f(u) with univariate derivatives f0 = f(u), f1 = f'(u), f2 = f''(u).
    Jet2 chain(double f0, double f1, double f2) const {
        Jet2 r(n_);
        r.v_ = f0;
        for (int i = 0; i < n_; ++i) r.g_[i] = f1 * g_[i];
        size_t idx = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j <= i; ++j, ++idx)
                r.h_[idx] = f1 * h_[idx] + f2 * g_[i] * g_[j];
        return r;
    }

    Jet2 operator-() const {
        Jet2 r(*this);
        r.v_ = -r.v_;
        for (auto& x : r.g_) x = -x;
        for (auto& x : r.h_) x = -x;
        return r;
    }

    Jet2& operator+=(const Jet2& o) {
        v_ += o.v_;
        for (int i = 0; i < n_; ++i) g_[i] += o.g_[i];
        for (size_t i = 0; i < h_.size(); ++i) h_[i] += o.h_[i];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        v_ -= o.v_;
        for (int i = 0; i < n_; ++i) g_[i] -= o.g_[i];
        for (size_t i = 0; i < h_.size(); ++i) h_[i] -= o.h_[i];
        return *this;
    }
    Jet2& operator+=(double c) { v_ += c; return *this; }
    Jet2& operator-=(double c) { v_ -= c; return *this; }
    Jet2& operator*=(double c) {
        v_ *= c;
        for (auto& x : g_) x *= c;
        for (auto& x : h_) x *= c;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { a += b; return a; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { a -= b; return a; }
    friend Jet2 operator+(Jet2 a, double c) { a += c; return a; }
    friend Jet2 operator+(double c, Jet2 a) { a += c; return a; }
    friend Jet2 operator-(Jet2 a, double c) { a -= c; return a; }
    friend Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }
    friend Jet2 operator*(Jet2 a, double c) { a *= c; return a; }
    friend Jet2 operator*(double c, Jet2 a) { a *= c; return a; }
    friend Jet2 operator/(Jet2 a, double c) { a *= 1.0 / c; return a; }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        Jet2 r(a.n_);
        r.v_ = a.v_ * b.v_;
        for (int i = 0; i < a.n_; ++i)
            r.g_[i] = a.v_ * b.g_[i] + b.v_ * a.g_[i];
        size_t idx = 0;
        for (int i = 0; i < a.n_; ++i)
            for (int j = 0; j <= i; ++j, ++idx)
                r.h_[idx] = a.v_ * b.h_[idx] + b.v_ * a.h_[idx]
                          + a.g_[i] * b.g_[j] + a.g_[j] * b.g_[i];
        return r;
    }

    friend Jet2 operator/(const Jet2& a, const Jet2& b) {
        double iv = 1.0 / b.v_;
        return a * b.chain(iv, -iv * iv, 2.0 * iv * iv * iv);
    }
    friend Jet2 operator/(double c, const Jet2& b) {
        double iv = 1.0 / b.v_;
        return b.chain(c * iv, -c * iv * iv, 2.0 * c * iv * iv * iv);
    }

private:
    static size_t pack(int i, int j) {  // requires i >= j
        return static_cast<size_t>(i) * (i + 1) / 2 + j;
    }

    int n_;
    double v_;
    std::vector<double> g_;
    std::vector<double> h_;
};

inline Jet2 exp(const Jet2& u) {
    double e = std::exp(u.value());
    return u.chain(e, e, e);
}

inline Jet2 log(const Jet2& u) {
    double iv = 1.0 / u.value();
    return u.chain(std::log(u.value()), iv, -iv * iv);
}

inline Jet2 sqrt(const Jet2& u) {
    double s = std::sqrt(u.value());
    return u.chain(s, 0.5 / s, -0.25 / (s * u.value()));
}

inline Jet2 sin(const Jet2& u) {
    double s = std::sin(u.value()), c = std::cos(u.value());
    return u.chain(s, c, -s);
}

inline Jet2 cos(const Jet2& u) {
    double s = std::sin(u.value()), c = std::cos(u.value());
    return u.chain(c, -s, -c);
}

// Real power; for non-integer p the base must be positive.
inline Jet2 pow(const Jet2& u, double p) {
    double v = u.value();
    double f0 = std::pow(v, p);
    double f1 = p * std::pow(v, p - 1.0);
    double f2 = p * (p - 1.0) * std::pow(v, p - 2.0);
    return u.chain(f0, f1, f2);
}

inline Jet2 pow(const Jet2& u, int p) {
    if (p == 0) return Jet2::constant(u.dim(), 1.0);
    double v = u.value();
    double f0 = std::pow(v, p);
    double f1 = p * std::pow(v, p - 1);
    double f2 = static_cast<double>(p) * (p - 1) * std::pow(v, p - 2);
    return u.chain(f0, f1, f2);
}

} // namespace yamabe

#endif
