#pragma once

#include <ostream>
#include <vector>

#include "wentzell/banded.hpp"
#include "wentzell/model.hpp"

namespace wentzell {

/// Potential part of the discrete Lagrangian (Simpson 1/3 weighted gradients):
///
///   P(u) = 1/2 sum_{i=1}^{N-1} h_i [ a_{i-1}/12 ((u_i - u_{i-1})/h_i)^2
///                                  + a_i/3   ((u_{i+1} - u_{i-1})/(h_i + h_{i+1}))^2
///                                  + a_{i+1}/12 ((u_{i+1} - u_i)/h_{i+1})^2 ]
inline double potential_energy(const Vector& u, const Grid& g, const PhysicalParams& p) {
    if (u.size() != g.nodes() || p.nodes() != g.nodes()) {
        throw std::invalid_argument("potential_energy: dimension mismatch");
    }
    const auto& a = p.a;
    double s = 0.0;
    for (Eigen::Index i = 1; i < g.n(); ++i) {
        const double hl = g.h(i);
        const double hr = g.h(i + 1);
        const double dl = (u[i] - u[i - 1]) / hl;
        const double dc = (u[i + 1] - u[i - 1]) / (hl + hr);
        const double dr = (u[i + 1] - u[i]) / hr;
        s += hl * (a[i - 1] / 12.0 * dl * dl + a[i] / 3.0 * dc * dc + a[i + 1] / 12.0 * dr * dr);
    }
    return 0.5 * s;
}

/// Exact Hessian of potential_energy, so that P(u) = 1/2 u^T K u.
inline SymBand2 assemble_stiffness(const Grid& g, const PhysicalParams& p) {
    if (p.nodes() != g.nodes()) throw std::invalid_argument("assemble_stiffness: size mismatch");
    const auto& a = p.a;
    SymBand2 K(g.nodes());
    // coef * (u_j - u_k)^2 in P contributes 2 coef [[1,-1],[-1,1]] to the Hessian.
    auto pair = [&K](Eigen::Index j, Eigen::Index k, double coef) {
        K.add(j, j, 2.0 * coef);
        K.add(k, k, 2.0 * coef);
        K.add(j, k, -2.0 * coef);
    };
    for (Eigen::Index i = 1; i < g.n(); ++i) {
        const double hl = g.h(i);
        const double hr = g.h(i + 1);
        const double w = 0.5 * hl;
        pair(i, i - 1, w * a[i - 1] / (12.0 * hl * hl));
        pair(i + 1, i - 1, w * a[i] / (3.0 * (hl + hr) * (hl + hr)));
        pair(i + 1, i, w * a[i + 1] / (12.0 * hr * hr));
    }
    return K;
}

/// Second-difference Hessian of potential_energy at u = 0 (verification oracle).
inline Matrix hessian_oracle(const Grid& g, const PhysicalParams& p, double h = 1e-4) {
    if (!(h > 0.0)) throw std::invalid_argument("hessian_oracle: step must be positive");
    const auto n = g.nodes();
    Vector z = Vector::Zero(n);
    const double p0 = potential_energy(z, g, p);
    Vector single(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        z.setZero();
        z[i] = h;
        single[i] = potential_energy(z, g, p);
    }
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            z.setZero();
            z[i] += h;
            z[j] += h;
            out(i, j) = (potential_energy(z, g, p) - single[i] - single[j] + p0) / (h * h);
        }
    }
    return out;
}

/// Generalized mass: interior E_i = h_i, E_N = a(1)/beta1, E_0 = a(0)/mu1 when x=0
/// carries dynamics (0 for Dirichlet variants, whose node 0 is eliminated).
inline Vector assemble_mass(const Grid& g, const PhysicalParams& p, const BoundaryVariant& v) {
    const auto n = g.n();
    Vector E = Vector::Zero(g.nodes());
    for (Eigen::Index i = 1; i < n; ++i) E[i] = g.h(i);
    E[n] = p.a_right() / p.beta1;
    if (v.dynamic_at_zero()) E[0] = p.a_left() / p.mu1;
    return E;
}

inline Vector assemble_dissipation(const Grid& g, const PhysicalParams& p,
                                   const BoundaryVariant& v) {
    if (p.q.minCoeff() < 0.0) {
        throw HypothesisError("h2", "assemble_dissipation: negative in-domain damping");
    }
    const auto n = g.n();
    Vector R = Vector::Zero(g.nodes());
    for (Eigen::Index i = 1; i < n; ++i) R[i] = p.q[i] * g.h(i);
    R[n] = p.a_right() / p.beta1 * p.q1;
    if (v.dynamic_at_zero()) R[0] = p.a_left() / p.mu1 * p.gamma1;
    return R;
}

struct InputOutput {
    Vector b;
    Vector c_out;
    Vector f_d;
};

/// Control enters row N scaled by a(1)/beta1 so that row N divided by E_N reads
/// u_tt(1) = ... + U + f1; the measurement is the collocated velocity at x=1.
inline InputOutput assemble_io(const Grid& g, const PhysicalParams& p, const BoundaryVariant& v) {
    const auto n = g.n();
    InputOutput io;
    io.b = Vector::Zero(g.nodes());
    io.c_out = Vector::Zero(g.nodes());
    io.f_d = Vector::Zero(g.nodes());
    io.b[n] = p.a_right() / p.beta1;
    io.c_out[n] = 1.0;
    for (Eigen::Index i = 1; i < n; ++i) io.f_d[i] = p.f[i] * g.h(i);
    io.f_d[n] = p.a_right() / p.beta1 * p.f1;
    if (v.dynamic_at_zero()) io.f_d[0] = p.a_left() / p.mu1 * p.f2;
    return io;
}

/// E u'' = -K u - R u' + b U + f_d,  y = c_out^T u'.
///
/// After apply_dirichlet, vectors cover nodes offset..N only (offset = 1) and
/// `dirichlet_mask` is cleared; `offset` keeps the mapping to grid nodes.
struct DiscreteSystem {
    Grid grid;
    BoundaryVariant variant;
    Vector E;
    SymBand2 K;
    Vector R;
    Vector b;
    Vector c_out;
    Vector f_d;
    std::vector<Eigen::Index> dirichlet_mask;
    Eigen::Index offset = 0;

    Eigen::Index size() const { return E.size(); }
    /// Local index of the x=1 node.
    Eigen::Index last() const { return E.size() - 1; }
    bool reduced() const { return offset > 0; }

    /// Local vector -> full nodal vector, constrained nodes set to zero.
    Vector to_full(const Vector& local) const {
        if (offset == 0) return local;
        Vector full = Vector::Zero(grid.nodes());
        full.tail(local.size()) = local;
        return full;
    }
    Vector to_local(const Vector& full) const {
        return offset == 0 ? full : Vector(full.tail(full.size() - offset));
    }
};

inline DiscreteSystem assemble(const Grid& g, const PhysicalParams& p, const BoundaryVariant& v) {
    DiscreteSystem s;
    s.grid = g;
    s.variant = v;
    s.E = assemble_mass(g, p, v);
    s.K = assemble_stiffness(g, p);
    s.R = assemble_dissipation(g, p, v);
    auto io = assemble_io(g, p, v);
    s.b = std::move(io.b);
    s.c_out = std::move(io.c_out);
    s.f_d = std::move(io.f_d);
    if (v.dirichlet_at_zero()) s.dirichlet_mask = {0};
    return s;
}

/// Eliminates node 0 (u(t,0) = 0) from every operator.
inline DiscreteSystem apply_dirichlet(const DiscreteSystem& sys) {
    if (!sys.variant.dirichlet_at_zero() || sys.reduced()) {
        throw std::invalid_argument("apply_dirichlet: system has no pending Dirichlet node");
    }
    DiscreteSystem r = sys;
    const auto m = sys.size() - 1;
    r.E = sys.E.tail(m);
    r.K = sys.K.trailing(1);
    r.R = sys.R.tail(m);
    r.b = sys.b.tail(m);
    r.c_out = sys.c_out.tail(m);
    r.f_d = sys.f_d.tail(m);
    r.dirichlet_mask.clear();
    r.offset = 1;
    return r;
}

/// assemble followed by apply_dirichlet where the variant requires it.
inline DiscreteSystem build_system(const Grid& g, const PhysicalParams& p,
                                   const BoundaryVariant& v) {
    auto s = assemble(g, p, v);
    return v.dirichlet_at_zero() ? apply_dirichlet(s) : s;
}

/// Discrete counterpart of regulation_shift: with u = v - t v1_ref 1 + profile and
/// eta2 = eta_v + eta_offset the semi-discrete PI loop becomes the unforced target
/// system exactly (profile[0] = 0 gauge).
inline RegulationShift discrete_regulation_shift(const DiscreteSystem& sys,
                                                 const ControlParams& c) {
    if (sys.reduced() || sys.variant.dirichlet_at_zero()) {
        throw std::invalid_argument("discrete_regulation_shift: needs a free x=0 end");
    }
    const double r = c.v1_ref;
    const auto n = sys.size();
    const double bN = sys.b[sys.last()];
    const double imbalance = r * sys.R.sum() - sys.f_d.sum();
    RegulationShift s;
    if (c.alpha2 > 0.0) {
        s.eta_offset = imbalance / (c.alpha2 * bN);
    } else if (std::abs(imbalance) > 1e-14 * (1.0 + std::abs(r) * sys.R.cwiseAbs().sum())) {
        throw std::invalid_argument(
            "discrete_regulation_shift: without integral action the steady forcing "
            "must balance (r * sum R = sum f_d)");
    }
    Vector rhs = r * sys.R - sys.f_d - c.alpha2 * s.eta_offset * sys.b;
    s.profile = Vector::Zero(n);
    const Matrix Kr = sys.K.trailing(1).dense();
    s.profile.tail(n - 1) = Kr.ldlt().solve(rhs.tail(n - 1));
    return s;
}

/// Rest state of the integrator loop (U = -kp y - alpha2 eta2, no forcing) with
/// u[N] - eta2 = u_star: K p + alpha2 eta2 b = 0.
struct Equilibrium {
    Vector profile;  ///< local (reduced) coordinates
    double eta2 = 0.0;
};

inline Equilibrium closed_loop_equilibrium(const DiscreteSystem& sys, double alpha2,
                                           double u_star_1) {
    if (!(alpha2 > 0.0)) throw std::invalid_argument("closed_loop_equilibrium: alpha2 <= 0");
    const auto n = sys.size();
    Matrix M = Matrix::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = sys.K.dense();
    M.block(0, n, n, 1) = alpha2 * sys.b;
    M(n, sys.last()) = 1.0;
    M(n, n) = -1.0;
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = u_star_1;
    const Vector sol = M.fullPivLu().solve(rhs);
    return {sol.head(n), sol[n]};
}

/// Writes K (band), E and R (diagonals) as "matrix,row,col,value" triplets.
inline void write_matrices_csv(std::ostream& os, const DiscreteSystem& sys) {
    os.precision(17);
    os << "matrix,row,col,value\n";
    const auto n = sys.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = std::max<Eigen::Index>(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            os << "K," << i << ',' << j << ',' << sys.K(i, j) << '\n';
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) os << "E," << i << ',' << i << ',' << sys.E[i] << '\n';
    for (Eigen::Index i = 0; i < n; ++i) os << "R," << i << ',' << i << ',' << sys.R[i] << '\n';
}

}  // namespace wentzell
