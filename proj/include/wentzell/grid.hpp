#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wentzell {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Nodes 0 = x[0] < x[1] < ... < x[N] = 1 on the unit interval.
///
/// Interval lengths use the 1-based convention of the discrete Lagrangian:
/// `h(i) = x[i] - x[i-1]` for i = 1..N. `dx()` stores them 0-based.
class Grid {
public:
    Grid() = default;

    static Grid uniform(std::size_t intervals) {
        if (intervals < 2) {
            throw std::invalid_argument("grid: need at least 2 intervals, got " +
                                        std::to_string(intervals));
        }
        Vector nodes(intervals + 1);
        for (std::size_t i = 0; i <= intervals; ++i) {
            nodes[static_cast<Eigen::Index>(i)] =
                static_cast<double>(i) / static_cast<double>(intervals);
        }
        nodes[static_cast<Eigen::Index>(intervals)] = 1.0;
        return Grid(std::move(nodes));
    }

    static Grid from_nodes(const std::vector<double>& nodes) {
        return from_nodes(Eigen::Map<const Vector>(nodes.data(),
                                                   static_cast<Eigen::Index>(nodes.size())));
    }

    static Grid from_nodes(const Vector& nodes) {
        if (nodes.size() < 3) {
            throw std::invalid_argument("grid: need at least 3 nodes");
        }
        if (nodes[0] != 0.0 || nodes[nodes.size() - 1] != 1.0) {
            throw std::invalid_argument("grid: nodes must start at 0 and end at 1");
        }
        for (Eigen::Index i = 1; i < nodes.size(); ++i) {
            if (!(nodes[i] > nodes[i - 1])) {
                throw std::invalid_argument("grid: nodes must be strictly increasing (index " +
                                            std::to_string(i) + ")");
            }
        }
        return Grid(nodes);
    }

    /// Number of intervals N.
    std::size_t intervals() const { return static_cast<std::size_t>(dx_.size()); }
    Eigen::Index n() const { return dx_.size(); }
    Eigen::Index nodes() const { return x_.size(); }

    const Vector& x() const { return x_; }
    const Vector& dx() const { return dx_; }

    double x(Eigen::Index i) const { return x_[i]; }
    /// Length of interval i (1-based, i = 1..N).
    double h(Eigen::Index i) const { return dx_[i - 1]; }

    double min_dx() const { return dx_.minCoeff(); }
    double max_dx() const { return dx_.maxCoeff(); }

private:
    explicit Grid(Vector nodes) : x_(std::move(nodes)) {
        dx_ = x_.tail(x_.size() - 1) - x_.head(x_.size() - 1);
    }

    Vector x_;
    Vector dx_;
};

inline Grid build_grid(std::size_t intervals) { return Grid::uniform(intervals); }
inline Grid build_grid(const std::vector<double>& nodes) { return Grid::from_nodes(nodes); }

}  // namespace wentzell
