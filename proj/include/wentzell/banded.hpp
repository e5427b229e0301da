#pragma once

#include <stdexcept>

#include "wentzell/grid.hpp"

namespace wentzell {

/// Symmetric matrix with half-bandwidth 2 (pentadiagonal), stored by diagonals.
class SymBand2 {
public:
    SymBand2() = default;
    explicit SymBand2(Eigen::Index n)
        : d0_(Vector::Zero(n)),
          d1_(Vector::Zero(n > 0 ? n - 1 : 0)),
          d2_(Vector::Zero(n > 1 ? n - 2 : 0)) {}

    Eigen::Index size() const { return d0_.size(); }

    /// Adds v to (i,j) and (j,i); |i-j| <= 2.
    void add(Eigen::Index i, Eigen::Index j, double v) {
        if (i > j) std::swap(i, j);
        switch (j - i) {
            case 0: d0_[i] += v; break;
            case 1: d1_[i] += v; break;
            case 2: d2_[i] += v; break;
            default: throw std::out_of_range("SymBand2: entry outside band");
        }
    }

    double operator()(Eigen::Index i, Eigen::Index j) const {
        if (i > j) std::swap(i, j);
        switch (j - i) {
            case 0: return d0_[i];
            case 1: return d1_[i];
            case 2: return d2_[i];
            default: return 0.0;
        }
    }

    /// out = K x
    void apply(const Vector& x, Vector& out) const {
        const auto n = size();
        out.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = d0_[i] * x[i];
            if (i + 1 < n) s += d1_[i] * x[i + 1];
            if (i >= 1) s += d1_[i - 1] * x[i - 1];
            if (i + 2 < n) s += d2_[i] * x[i + 2];
            if (i >= 2) s += d2_[i - 2] * x[i - 2];
            out[i] = s;
        }
    }

    Vector operator*(const Vector& x) const {
        Vector out;
        apply(x, out);
        return out;
    }

    /// x^T K y
    double bilinear(const Vector& x, const Vector& y) const {
        const auto n = size();
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s += d0_[i] * x[i] * y[i];
            if (i + 1 < n) s += d1_[i] * (x[i] * y[i + 1] + x[i + 1] * y[i]);
            if (i + 2 < n) s += d2_[i] * (x[i] * y[i + 2] + x[i + 2] * y[i]);
        }
        return s;
    }

    Matrix dense() const {
        const auto n = size();
        Matrix m = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            m(i, i) = d0_[i];
            if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = d1_[i];
            if (i + 2 < n) m(i, i + 2) = m(i + 2, i) = d2_[i];
        }
        return m;
    }

    /// Drops the first `k` rows and columns.
    SymBand2 trailing(Eigen::Index k) const {
        SymBand2 r(size() - k);
        r.d0_ = d0_.tail(size() - k);
        r.d1_ = d1_.tail(std::max<Eigen::Index>(0, d1_.size() - k));
        r.d2_ = d2_.tail(std::max<Eigen::Index>(0, d2_.size() - k));
        return r;
    }

    const Vector& diagonal() const { return d0_; }

private:
    Vector d0_, d1_, d2_;
};

}  // namespace wentzell
