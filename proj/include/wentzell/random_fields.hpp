#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "wentzell/grid.hpp"

namespace wentzell {

/// Smooth random nodal field: c0 + sum_k (c_k cos(k pi x) + s_k sin(k pi x)) / k^2,
/// coefficients uniform in [-1, 1].
template <class Rng>
Vector random_smooth_field(const Grid& g, Rng& rng, int modes = 6) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Vector out = Vector::Constant(g.nodes(), coef(rng));
    for (int k = 1; k <= modes; ++k) {
        const double c = coef(rng) / (k * k);
        const double s = coef(rng) / (k * k);
        for (Eigen::Index i = 0; i < g.nodes(); ++i) {
            const double arg = k * std::numbers::pi * g.x(i);
            out[i] += c * std::cos(arg) + s * std::sin(arg);
        }
    }
    return out;
}

/// Independent uniform entries in [-scale, scale].
template <class Rng>
Vector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

}  // namespace wentzell
