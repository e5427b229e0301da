#pragma once

#include <cmath>
#include <ostream>
#include <utility>

#include "wentzell/model.hpp"

namespace wentzell {

/// Right-hand side y of (I + G) z = y: y1 in H^1, y2 in L^2, three boundary reals.
struct GeneratorInput {
    Vector y1;
    Vector y2;
    double y3 = 0.0;
    double y4 = 0.0;
    double y5 = 0.0;
};

/// Element of the generator domain. `dz1_left`, `dz1_right` are the traces z1'(0),
/// z1'(1) the discrete operator uses as boundary fluxes.
struct GeneratorOutput {
    Vector z1;
    Vector z2;
    double z3 = 0.0;
    double z4 = 0.0;
    double z5 = 0.0;
    double dz1_left = 0.0;
    double dz1_right = 0.0;

    /// max(|z2(1) - z3|, |z2(0) - z5|).
    double domain_defect() const {
        return std::max(std::abs(z2[z2.size() - 1] - z3), std::abs(z2[0] - z5));
    }
};

namespace detail {

inline double mid_a(const PhysicalParams& p, Eigen::Index i) { return 0.5 * (p.a[i] + p.a[i - 1]); }

inline void check_generator_sizes(const Vector& v1, const Vector& v2, const Grid& g,
                                  const PhysicalParams& p) {
    if (v1.size() != g.nodes() || v2.size() != g.nodes() || p.nodes() != g.nodes()) {
        throw std::invalid_argument("wellposed: vectors do not match the grid");
    }
}

}  // namespace detail

/// Finite-volume form of (a z')' on trapezoid half cells, closed by the boundary fluxes
/// a(0) d0 and a(1) dN:
///   node i: [a_{i+1/2}(z_{i+1}-z_i)/h_{i+1} - a_{i-1/2}(z_i-z_{i-1})/h_i] / w_i
/// with w the trapezoid weights and a_{i+1/2} the interval average.
inline Vector flux_divergence(const Vector& z, double d0, double dN, const Grid& g,
                              const PhysicalParams& p) {
    const auto n = g.n();
    const Vector w = quad::trapezoid_weights(g);
    Vector out(g.nodes());
    auto flux = [&](Eigen::Index i) { return detail::mid_a(p, i) * (z[i] - z[i - 1]) / g.h(i); };
    out[0] = (flux(1) - p.a_left() * d0) / w[0];
    for (Eigen::Index i = 1; i < n; ++i) out[i] = (flux(i + 1) - flux(i)) / w[i];
    out[n] = (p.a_right() * dN - flux(n)) / w[n];
    return out;
}

/// Second-order one-sided derivatives at both ends from three nodes (any spacing).
inline std::pair<double, double> one_sided_traces(const Vector& z, const Grid& g) {
    auto deriv = [](double x0, double x1, double x2, double f0, double f1, double f2) {
        // Derivative at x0 of the quadratic through (x0,f0), (x1,f1), (x2,f2).
        const double d1 = x1 - x0, d2 = x2 - x0;
        return f0 * (-(d1 + d2) / (d1 * d2)) + f1 * (d2 / (d1 * (d2 - d1))) +
               f2 * (-d1 / (d2 * (d2 - d1)));
    };
    const auto& x = g.x();
    const auto n = g.n();
    return {deriv(x[0], x[1], x[2], z[0], z[1], z[2]),
            deriv(x[n], x[n - 1], x[n - 2], z[n], z[n - 1], z[n - 2])};
}

/// Fills dz1_left/dz1_right of a hand-built state from its z1 samples.
inline GeneratorOutput with_traces(GeneratorOutput z, const Grid& g) {
    std::tie(z.dz1_left, z.dz1_right) = one_sided_traces(z.z1, g);
    return z;
}

/// G z = (-z2, -(a z1')' + z2 + z1, beta1 z1'(1), 0, -mu1 z1'(0)); the result's
/// traces are left at zero.
inline GeneratorOutput apply_generator(const GeneratorOutput& z, const PhysicalParams& p,
                                       const Grid& g) {
    detail::check_generator_sizes(z.z1, z.z2, g, p);
    GeneratorOutput out;
    out.z1 = -z.z2;
    out.z2 = -flux_divergence(z.z1, z.dz1_left, z.dz1_right, g, p) + z.z2 + z.z1;
    out.z3 = p.beta1 * z.dz1_right;
    out.z4 = 0.0;
    out.z5 = -p.mu1 * z.dz1_left;
    return out;
}

/// <z, w> = int (z1 w1 + z2 w2 + a z1' w1') + a(1)/beta1 z3 w3 + z4 w4 + a(0)/mu1 z5 w5,
/// trapezoid in the L^2 parts and per-interval differences in the gradient part.
inline double inner_product(const GeneratorOutput& z, const GeneratorOutput& w,
                            const PhysicalParams& p, const Grid& g) {
    detail::check_generator_sizes(z.z1, z.z2, g, p);
    detail::check_generator_sizes(w.z1, w.z2, g, p);
    double s = quad::trapezoid(g, z.z1, w.z1) + quad::trapezoid(g, z.z2, w.z2);
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        s += detail::mid_a(p, i) * (z.z1[i] - z.z1[i - 1]) * (w.z1[i] - w.z1[i - 1]) / g.h(i);
    }
    s += p.a_right() / p.beta1 * z.z3 * w.z3 + z.z4 * w.z4 + p.a_left() / p.mu1 * z.z5 * w.z5;
    return s;
}

/// Solves (I + G) z = y. Eliminating z2 = z1 - y1 leaves
///   3 z1 - (a z1')' = 2 y1 + y2,
///   beta1 z1'(1) + z1(1) = y3 + y1(1),   -mu1 z1'(0) + z1(0) = y5 + y1(0),
/// solved as one tridiagonal system with the Robin relations giving the boundary
/// fluxes. Recovery: z3 = y3 - beta1 z1'(1), z4 = y4, z5 = y5 + mu1 z1'(0).
inline GeneratorOutput resolvent_solve(const GeneratorInput& y, const PhysicalParams& p,
                                       const Grid& g) {
    detail::check_generator_sizes(y.y1, y.y2, g, p);
    if (!(p.a.minCoeff() > 0.0)) throw HypothesisError("h1", "resolvent_solve: a must be positive");
    if (!(p.beta1 > 0.0) || !(p.mu1 > 0.0)) {
        throw HypothesisError("h3", "resolvent_solve: beta1 and mu1 must be positive");
    }
    const auto n = g.n();
    const auto m = g.nodes();
    const Vector w = quad::trapezoid_weights(g);
    Vector lower = Vector::Zero(m), diag = Vector::Zero(m), upper = Vector::Zero(m);
    Vector rhs = 2.0 * y.y1 + y.y2;
    for (Eigen::Index i = 0; i <= n; ++i) {
        diag[i] = 3.0;
        if (i >= 1) {
            const double c = detail::mid_a(p, i) / (g.h(i) * w[i]);
            diag[i] += c;
            lower[i] = -c;
        }
        if (i < n) {
            const double c = detail::mid_a(p, i + 1) / (g.h(i + 1) * w[i]);
            diag[i] += c;
            upper[i] = -c;
        }
    }
    // a(1) z1'(1) = a(1) (y3 + y1(1) - z1(1)) / beta1, and likewise at x = 0.
    const double cr = p.a_right() / (p.beta1 * w[n]);
    diag[n] += cr;
    rhs[n] += cr * (y.y3 + y.y1[n]);
    const double cl = p.a_left() / (p.mu1 * w[0]);
    diag[0] += cl;
    rhs[0] += cl * (y.y1[0] + y.y5);

    // Thomas algorithm.
    Vector c_prime(m), d_prime(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double denom = diag[i] - (i > 0 ? lower[i] * c_prime[i - 1] : 0.0);
        if (!(std::abs(denom) > 0.0)) throw std::runtime_error("resolvent_solve: singular system");
        c_prime[i] = upper[i] / denom;
        d_prime[i] = (rhs[i] - (i > 0 ? lower[i] * d_prime[i - 1] : 0.0)) / denom;
    }
    GeneratorOutput z;
    z.z1.resize(m);
    z.z1[m - 1] = d_prime[m - 1];
    for (Eigen::Index i = m - 1; i-- > 0;) z.z1[i] = d_prime[i] - c_prime[i] * z.z1[i + 1];

    z.z2 = z.z1 - y.y1;
    z.dz1_right = (y.y3 + y.y1[n] - z.z1[n]) / p.beta1;
    z.dz1_left = (z.z1[0] - y.y1[0] - y.y5) / p.mu1;
    z.z3 = y.y3 - p.beta1 * z.dz1_right;
    z.z4 = y.y4;
    z.z5 = y.y5 + p.mu1 * z.dz1_left;
    return z;
}

/// max over interior nodes of |3 z1 - (a z1')' - 2 y1 - y2| with the discrete operator.
inline double resolvent_residual(const GeneratorOutput& z, const GeneratorInput& y,
                                 const PhysicalParams& p, const Grid& g) {
    detail::check_generator_sizes(z.z1, y.y1, g, p);
    const Vector r = 3.0 * z.z1 - flux_divergence(z.z1, z.dz1_left, z.dz1_right, g, p) -
                     2.0 * y.y1 - y.y2;
    return r.segment(1, g.n() - 1).cwiseAbs().maxCoeff();
}

/// Largest component of z + G z - y in the discrete norm, relative to |y|.
inline double fixed_point_defect(const GeneratorOutput& z, const GeneratorInput& y,
                                 const PhysicalParams& p, const Grid& g) {
    GeneratorOutput d = apply_generator(z, p, g);
    d.z1 += z.z1 - y.y1;
    d.z2 += z.z2 - y.y2;
    d.z3 += z.z3 - y.y3;
    d.z4 += z.z4 - y.y4;
    d.z5 += z.z5 - y.y5;
    GeneratorOutput yy{y.y1, y.y2, y.y3, y.y4, y.y5};
    const double ny = std::sqrt(inner_product(yy, yy, p, g));
    return std::sqrt(std::max(0.0, inner_product(d, d, p, g))) / std::max(ny, 1e-300);
}

struct Pairing {
    double pairing = 0.0;
    double reference = 0.0;
};

/// <z, G z> next to int z2^2 (trapezoid); requires z2(1) = z3, z2(0) = z5.
inline Pairing monotonicity_pairing(const GeneratorOutput& z, const PhysicalParams& p,
                                    const Grid& g) {
    if (!(z.domain_defect() <= 1e-8)) {
        throw std::invalid_argument("monotonicity_pairing: z violates z2(1) = z3, z2(0) = z5 by " +
                                    std::to_string(z.domain_defect()));
    }
    return {inner_product(z, apply_generator(z, p, g), p, g), quad::trapezoid(g, z.z2, z.z2)};
}

/// Columns x, y1, y2, z1, z2, residual (interior rows; endpoints carry 0 residual).
inline void write_resolvent_csv(std::ostream& os, const GeneratorInput& y, const GeneratorOutput& z,
                                const PhysicalParams& p, const Grid& g) {
    const Vector r = 3.0 * z.z1 - flux_divergence(z.z1, z.dz1_left, z.dz1_right, g, p) -
                     2.0 * y.y1 - y.y2;
    os.precision(17);
    os << "x,y1,y2,z1,z2,residual\n";
    for (Eigen::Index i = 0; i < g.nodes(); ++i) {
        const bool interior = i > 0 && i < g.n();
        os << g.x(i) << ',' << y.y1[i] << ',' << y.y2[i] << ',' << z.z1[i] << ',' << z.z2[i] << ','
           << (interior ? r[i] : 0.0) << '\n';
    }
}

}  // namespace wentzell
