#ifndef YAMABE_MATRIX_HPP
#define YAMABE_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "yamabe/errors.hpp"

namespace yamabe {

// Dense square matrix, sized at runtime. Dimensions here are tiny (the
// manifold dimension), so no attempt at blocking or views.
class Matrix {
public:
    explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
        if (n < 1) throw InputError("Matrix: dimension must be >= 1");
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    Matrix& operator+=(const Matrix& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(double c) {
        for (auto& x : a_) x *= c;
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }
    friend Matrix operator-(Matrix a, const Matrix& b) { a -= b; return a; }
    friend Matrix operator*(Matrix a, double c) { a *= c; return a; }
    friend Matrix operator*(double c, Matrix a) { a *= c; return a; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix r(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < a.n_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    Matrix transpose() const {
        Matrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

private:
    int n_;
    std::vector<double> a_;
};

} // namespace yamabe

#endif
