#ifndef YAMABE_SIGNATURE_HPP
#define YAMABE_SIGNATURE_HPP

#include <algorithm>
#include <span>
#include <vector>

#include "yamabe/errors.hpp"

namespace yamabe {

// Diagonal +-1 pattern of the flat background metric. Lorentzian means
// exactly one negative entry; Riemannian means none.
class Signature {
public:
    explicit Signature(std::vector<int> eps) : eps_(std::move(eps)) {
        if (eps_.size() < 2)
            throw InputError("Signature: need dimension >= 2");
        for (int e : eps_)
            if (e != 1 && e != -1)
                throw InputError("Signature: entries must be +1 or -1");
    }

    static Signature euclidean(int n) {
        return Signature(std::vector<int>(static_cast<size_t>(n), 1));
    }

    // (-1, +1, ..., +1)
    static Signature lorentzian(int n) {
        std::vector<int> e(static_cast<size_t>(n), 1);
        e[0] = -1;
        return Signature(std::move(e));
    }

    int dim() const { return static_cast<int>(eps_.size()); }
    int eps(int i) const { return eps_[static_cast<size_t>(i)]; }
    const std::vector<int>& entries() const { return eps_; }

    bool is_riemannian() const {
        return std::all_of(eps_.begin(), eps_.end(), [](int e) { return e == 1; });
    }
    bool is_lorentzian() const {
        return std::count(eps_.begin(), eps_.end(), -1) == 1;
    }

    // Signed quadratic form sum_i eps_i u_i^2.
    double norm2(std::span<const double> u) const {
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) s += eps(i) * u[i] * u[i];
        return s;
    }

    // Exact zero test for the signed norm, done by comparing the positive
    // and negative partial sums instead of testing a cancelled float
    // against a tolerance.
    bool is_null(std::span<const double> u) const {
        double pos = 0.0, neg = 0.0;
        for (int i = 0; i < dim(); ++i) {
            if (eps(i) > 0) pos += u[i] * u[i];
            else            neg += u[i] * u[i];
        }
        return pos == neg;
    }

private:
    std::vector<int> eps_;
};

} // namespace yamabe

#endif
