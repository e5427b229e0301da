#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "wentzell/errors.hpp"
#include "wentzell/grid.hpp"
#include "wentzell/quadrature.hpp"

namespace wentzell {

/// What the parameters will be used for. Decay certification needs strictly
/// positive in-domain and x=0 damping; plain simulation accepts zero damping.
enum class Mode { simulation, certification };

struct BoundaryConstants {
    double beta1 = 20.0;
    double mu1 = 20.0;
    double q1 = 0.0;
    double gamma1 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;

    bool operator==(const BoundaryConstants&) const = default;
};

/// Coefficients of
///   v_tt = (a v_x)_x - q v_t + f                      on (0,1)
///   v_tt(1) = -beta1 v_x(1) - q1 v_t(1) + U + f1
///   v_tt(0) =  mu1 v_x(0) - gamma1 v_t(0) + f2
/// with a, q, f sampled at the grid nodes.
struct PhysicalParams {
    Vector a;
    Vector q;
    Vector f;
    double beta1 = 20.0;
    double mu1 = 20.0;
    double q1 = 0.0;
    double gamma1 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;

    double a_lower = 0.0;
    double a_upper = 0.0;
    double q_lower = 0.0;
    double q_upper = 0.0;

    static PhysicalParams sampled(Vector a, Vector q, Vector f, const BoundaryConstants& bc) {
        PhysicalParams p;
        p.a = std::move(a);
        p.q = std::move(q);
        p.f = std::move(f);
        p.beta1 = bc.beta1;
        p.mu1 = bc.mu1;
        p.q1 = bc.q1;
        p.gamma1 = bc.gamma1;
        p.f1 = bc.f1;
        p.f2 = bc.f2;
        p.refresh_bounds();
        return p;
    }

    static PhysicalParams uniform(const Grid& g, double a, double q, double f,
                                  const BoundaryConstants& bc) {
        const auto n = g.nodes();
        return sampled(Vector::Constant(n, a), Vector::Constant(n, q), Vector::Constant(n, f), bc);
    }

    void refresh_bounds() {
        if (a.size() == 0 || q.size() == 0) return;
        a_lower = a.minCoeff();
        a_upper = a.maxCoeff();
        q_lower = q.minCoeff();
        q_upper = q.maxCoeff();
    }

    Eigen::Index nodes() const { return a.size(); }
    double a_left() const { return a[0]; }
    double a_right() const { return a[a.size() - 1]; }

    BoundaryConstants boundary() const { return {beta1, mu1, q1, gamma1, f1, f2}; }

    void validate(Mode mode) const {
        if (a.size() != q.size() || a.size() != f.size()) {
            throw std::invalid_argument("params: a, q, f sample counts differ");
        }
        if (!a.allFinite() || !q.allFinite() || !f.allFinite()) {
            throw std::invalid_argument("params: non-finite coefficient samples");
        }
        if (!(a.minCoeff() > 0.0)) {
            throw HypothesisError("h1", "a must be positive at every node (min " +
                                            std::to_string(a.minCoeff()) + ")");
        }
        if (q.minCoeff() < 0.0) {
            throw HypothesisError("h2", "q must be nonnegative (min " +
                                            std::to_string(q.minCoeff()) + ")");
        }
        if (!(beta1 > 0.0) || !(mu1 > 0.0)) {
            throw HypothesisError("h3", "beta1 and mu1 must be positive");
        }
        if (gamma1 < 0.0) {
            throw HypothesisError("h3", "gamma1 must be nonnegative");
        }
        if (!std::isfinite(q1) || !std::isfinite(f1) || !std::isfinite(f2)) {
            throw std::invalid_argument("params: non-finite boundary constants");
        }
        if (mode == Mode::certification) {
            if (!(q.minCoeff() > 0.0)) {
                throw HypothesisError("h2", "decay certification needs q bounded below by a "
                                            "positive constant");
            }
            if (!(gamma1 > 0.0)) {
                throw HypothesisError("h3", "decay certification needs gamma1 > 0");
            }
        }
    }
};

/// PI law U = -kp (v_t(1) - v1_ref) - alpha2 * eta_v with eta_v' = v_t(1) - v1_ref.
struct ControlParams {
    double kp = 0.0;
    double alpha2 = 0.0;
    double v1_ref = 0.0;

    /// Boundary damping of the closed loop. The q in "alpha1 = kp + q" is read as the
    /// boundary constant q1.
    double alpha1(const PhysicalParams& p) const { return kp + p.q1; }

    void validate() const {
        if (kp < 0.0 || alpha2 < 0.0) {
            throw std::invalid_argument("control: kp and alpha2 must be nonnegative");
        }
        if (!std::isfinite(v1_ref)) throw std::invalid_argument("control: v1_ref not finite");
    }

    bool operator==(const ControlParams&) const = default;
};

enum class VariantKind { W2W1, W1D, W2D, W1W1 };

inline std::string_view to_string(VariantKind k) {
    switch (k) {
        case VariantKind::W2W1: return "W2W1";
        case VariantKind::W1D: return "W1D";
        case VariantKind::W2D: return "W2D";
        case VariantKind::W1W1: return "W1W1";
    }
    return "?";
}

inline VariantKind parse_variant(std::string_view s) {
    if (s == "W2W1") return VariantKind::W2W1;
    if (s == "W1D") return VariantKind::W1D;
    if (s == "W2D") return VariantKind::W2D;
    if (s == "W1W1") return VariantKind::W1W1;
    throw std::invalid_argument("unknown boundary variant '" + std::string(s) + "'");
}

/// Boundary structure of the stabilization target:
///   W2W1: second-order (integrator) at x=1, first-order Wentzell at x=0
///   W1D : first-order Wentzell at x=1, Dirichlet at x=0
///   W2D : integrator at x=1, Dirichlet at x=0
///   W1W1: first-order Wentzell at both ends
struct BoundaryVariant {
    VariantKind kind = VariantKind::W2W1;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 0.0;
    double gamma1 = 0.0;
    double mu1 = 0.0;

    static BoundaryVariant make(VariantKind kind, const PhysicalParams& p,
                                const ControlParams& c) {
        BoundaryVariant v;
        v.kind = kind;
        v.alpha1 = c.alpha1(p);
        v.beta1 = p.beta1;
        if (has_integrator(kind)) v.alpha2 = c.alpha2;
        if (!dirichlet_at_zero(kind)) {
            v.gamma1 = p.gamma1;
            v.mu1 = p.mu1;
        }
        return v;
    }

    static constexpr bool has_integrator(VariantKind k) {
        return k == VariantKind::W2W1 || k == VariantKind::W2D;
    }
    static constexpr bool dirichlet_at_zero(VariantKind k) {
        return k == VariantKind::W1D || k == VariantKind::W2D;
    }

    bool has_integrator() const { return has_integrator(kind); }
    bool dirichlet_at_zero() const { return dirichlet_at_zero(kind); }
    bool dynamic_at_zero() const { return !dirichlet_at_zero(kind); }

    /// All constants carried by the active variant must be strictly positive.
    void validate() const {
        auto require = [&](double v, const char* name) {
            if (!(v > 0.0)) {
                throw std::invalid_argument(std::string("variant ") + std::string(to_string(kind)) +
                                            ": " + name + " must be positive");
            }
        };
        require(alpha1, "alpha1");
        require(beta1, "beta1");
        if (has_integrator()) require(alpha2, "alpha2");
        if (dynamic_at_zero()) {
            require(gamma1, "gamma1");
            require(mu1, "mu1");
        }
    }
};

/// Nodal state of the continuum system: displacement, velocity and the boundary
/// states eta1 = u_t(1), eta2 (integrator), xi1 = u_t(0).
struct ContinuousState {
    Vector u;
    Vector udot;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double xi1 = 0.0;
    double t = 0.0;

    /// max(|udot[N] - eta1|, |udot[0] - xi1|).
    double compatibility_defect() const {
        const auto n = udot.size() - 1;
        return std::max(std::abs(udot[n] - eta1), std::abs(udot[0] - xi1));
    }

    static ContinuousState from_nodal(Vector u, Vector udot, double eta2, double t = 0.0) {
        ContinuousState s;
        s.u = std::move(u);
        s.udot = std::move(udot);
        s.eta1 = s.udot[s.udot.size() - 1];
        s.xi1 = s.udot[0];
        s.eta2 = eta2;
        s.t = t;
        return s;
    }
};

/// Static part of the regulation change of variables:
///   u = v - t v1_ref + profile(x),   eta2 = eta_v + eta_offset.
struct RegulationShift {
    Vector profile;
    double eta_offset = 0.0;
};

inline RegulationShift regulation_shift(const PhysicalParams& p, const ControlParams& c,
                                        const Grid& g) {
    if (p.nodes() != g.nodes()) {
        throw std::invalid_argument("regulation_transform: grid and coefficient sizes differ");
    }
    if (!(p.a.minCoeff() > 0.0)) {
        throw HypothesisError("h1", "regulation_transform divides by a; a must be positive");
    }
    const double r = c.v1_ref;
    const Vector source = (-r * p.q + p.f).eval();
    const Vector inv_a = p.a.cwiseInverse();
    const Vector inner = quad::cumulative_trapezoid(g, source);
    const Vector outer = quad::cumulative_trapezoid(g, inner.cwiseProduct(inv_a));
    const Vector compliance = quad::cumulative_trapezoid(g, inv_a);
    const double left = p.a_left() / p.mu1 * (-p.gamma1 * r + p.f2);

    RegulationShift s;
    s.profile = outer + left * compliance;
    if (c.alpha2 > 0.0) {
        const double a1 = p.a_right();
        s.eta_offset = -p.beta1 / (c.alpha2 * a1) * inner[inner.size() - 1] -
                       p.beta1 * p.a_left() / (c.alpha2 * p.mu1 * a1) * (-p.gamma1 * r + p.f2) +
                       (p.q1 * r - p.f1) / c.alpha2;
    }
    // alpha2 = 0: no integrator in the loop, eta passes through unshifted.
    return s;
}

enum class Direction { to_stabilization, to_regulation };

/// Maps a regulation-problem state (v, v_t, eta_v) to the stabilization target
/// (u, u_t, eta2) or back. Integrals are cumulative trapezoid sums on the grid.
inline ContinuousState regulation_transform(const ContinuousState& in, const PhysicalParams& p,
                                            const ControlParams& c, const Grid& g,
                                            Direction dir = Direction::to_stabilization) {
    const RegulationShift s = regulation_shift(p, c, g);
    const double r = c.v1_ref;
    const double sign = dir == Direction::to_stabilization ? 1.0 : -1.0;
    ContinuousState out;
    out.t = in.t;
    out.u = in.u + sign * (s.profile - Vector::Constant(in.u.size(), in.t * r));
    out.udot = in.udot - Vector::Constant(in.udot.size(), sign * r);
    out.eta1 = in.eta1 - sign * r;
    out.xi1 = in.xi1 - sign * r;
    out.eta2 = in.eta2 + sign * s.eta_offset;
    return out;
}

/// Level reached by the displacement: u(t,1) - eta2(t) is conserved and equals this.
inline double u_star(double u0_at_1, double eta2_0) { return u0_at_1 - eta2_0; }

struct SteadyProfile {
    Vector profile;
    double C2 = 0.0;
    double eta2_offset = 0.0;
};

/// Equilibrium of the integrator/Dirichlet variant:
///   v(x) = C2 int_0^x ds/a,  C2 = a(1) alpha2 u* / (a(1) alpha2 int_0^1 ds/a + beta1),
///   eta2 -> beta1 C2 / (a(1) alpha2).
inline SteadyProfile steady_profile(const PhysicalParams& p, double alpha2, double u_star_1,
                                    const Grid& g) {
    if (!(alpha2 > 0.0) || !(p.beta1 > 0.0)) {
        throw std::invalid_argument("steady_profile: alpha2 and beta1 must be positive");
    }
    const Vector compliance = quad::cumulative_trapezoid(g, p.a.cwiseInverse());
    const double a1 = p.a_right();
    const double total = compliance[compliance.size() - 1];
    SteadyProfile s;
    s.C2 = a1 * alpha2 * u_star_1 / (a1 * alpha2 * total + p.beta1);
    s.profile = s.C2 * compliance;
    s.eta2_offset = p.beta1 * s.C2 / (a1 * alpha2);
    return s;
}

}  // namespace wentzell
