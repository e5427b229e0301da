#pragma once

#include "wentzell/grid.hpp"

namespace wentzell::quad {

/// Composite trapezoid rule of nodal samples.
inline double trapezoid(const Grid& g, const Vector& f) {
    double s = 0.0;
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        s += 0.5 * (f[i] + f[i - 1]) * g.h(i);
    }
    return s;
}

/// Trapezoid of the pointwise product f*g.
inline double trapezoid(const Grid& g, const Vector& f, const Vector& w) {
    double s = 0.0;
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        s += 0.5 * (f[i] * w[i] + f[i - 1] * w[i - 1]) * g.h(i);
    }
    return s;
}

/// F[i] = trapezoid integral of f over [0, x_i]; F[0] = 0.
inline Vector cumulative_trapezoid(const Grid& g, const Vector& f) {
    Vector out(g.nodes());
    out[0] = 0.0;
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * g.h(i);
    }
    return out;
}

/// Trapezoid nodal weights (h_1/2, (h_1+h_2)/2, ..., h_N/2).
inline Vector trapezoid_weights(const Grid& g) {
    Vector w = Vector::Zero(g.nodes());
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        w[i - 1] += 0.5 * g.h(i);
        w[i] += 0.5 * g.h(i);
    }
    return w;
}

/// Sum over intervals of c_mid * ((u[i]-u[i-1])/h_i)^2 * h_i, with c averaged at the
/// interval midpoint. Pass c = nullptr for unit weight.
inline double gradient_squared(const Grid& g, const Vector& u, const Vector* c = nullptr) {
    double s = 0.0;
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        const double d = (u[i] - u[i - 1]) / g.h(i);
        const double w = c ? 0.5 * ((*c)[i] + (*c)[i - 1]) : 1.0;
        s += w * d * d * g.h(i);
    }
    return s;
}

}  // namespace wentzell::quad
