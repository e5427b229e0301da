#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wentzell/discretize.hpp"
#include "wentzell/integrate.hpp"
#include "wentzell/samples.hpp"

namespace wentzell {

/// Reference data the variant functionals need beyond the state itself.
struct VariantExtras {
    double u_star = 0.0;
    std::optional<SteadyProfile> steady;
};

namespace detail {

inline void check_state(const ContinuousState& s, const Grid& g) {
    if (s.u.size() != g.nodes() || s.udot.size() != g.nodes()) {
        throw std::invalid_argument("functional: state does not match the grid");
    }
}

inline Eigen::Index last(const ContinuousState& s) { return s.u.size() - 1; }

}  // namespace detail

/// E_u = 1/2 int (u_t^2 + a u_x^2).
inline double energy(const ContinuousState& s, const Grid& g, const PhysicalParams& p) {
    detail::check_state(s, g);
    return 0.5 * (quad::trapezoid(g, s.udot, s.udot) + quad::gradient_squared(g, s.u, &p.a));
}

inline double F_functional(const ContinuousState& s, const Grid& g, const PhysicalParams& p,
                           const BoundaryVariant& v) {
    double f = energy(s, g, p) + p.a_right() / (2.0 * p.beta1) * s.eta1 * s.eta1;
    if (v.dynamic_at_zero()) f += p.a_left() / (2.0 * p.mu1) * s.xi1 * s.xi1;
    return f;
}

/// eta2 and xi2 are reconstructed as u(1) - u_star and u(0) - u_star.
inline double W_functional(const ContinuousState& s, const Grid& g, const PhysicalParams& p,
                           const BoundaryVariant& v, double u_star) {
    detail::check_state(s, g);
    const Vector w = s.u.array() - u_star;
    double W = quad::trapezoid(g, w, s.udot) + 0.5 * quad::trapezoid(g, p.q.cwiseProduct(w), w);
    const double eta2 = w[detail::last(s)];
    W += p.a_right() / p.beta1 * (0.5 * v.alpha1 * eta2 * eta2 + eta2 * s.eta1);
    if (v.dynamic_at_zero()) {
        const double xi2 = w[0];
        W += p.a_left() / p.mu1 * (0.5 * v.gamma1 * xi2 * xi2 + xi2 * s.xi1);
    }
    return W;
}

/// V = F + a(1) alpha2/(2 beta1) eta2^2 + ell W.
inline double V_functional(const ContinuousState& s, const Grid& g, const PhysicalParams& p,
                           const BoundaryVariant& v, double ell, double u_star) {
    const double eta2 = s.u[detail::last(s)] - u_star;
    return F_functional(s, g, p, v) + p.a_right() * v.alpha2 / (2.0 * p.beta1) * eta2 * eta2 +
           ell * W_functional(s, g, p, v, u_star);
}

/// Distance to the attractor of the active variant (unit weight on u_x^2). For W2D
/// the gradient part is taken on u - v so that the attractor is the kernel.
inline double gamma(const ContinuousState& s, const Grid& g, const BoundaryVariant& v,
                    const VariantExtras& extras = {}) {
    detail::check_state(s, g);
    const auto n = detail::last(s);
    double G = quad::trapezoid(g, s.udot, s.udot) + s.eta1 * s.eta1;
    switch (v.kind) {
        case VariantKind::W2W1: {
            const double eta2 = s.u[n] - extras.u_star;
            G += quad::gradient_squared(g, s.u) + eta2 * eta2 + s.xi1 * s.xi1;
            break;
        }
        case VariantKind::W1D: G += quad::gradient_squared(g, s.u); break;
        case VariantKind::W2D: {
            if (!extras.steady || extras.steady->profile.size() != s.u.size()) {
                throw std::invalid_argument("gamma: W2D needs the steady profile on this grid");
            }
            const Vector d = s.u - extras.steady->profile;
            const double eta2 = d[n];
            G += quad::trapezoid(g, d, d) + quad::gradient_squared(g, d) + eta2 * eta2;
            break;
        }
        case VariantKind::W1W1: G += quad::gradient_squared(g, s.u) + s.xi1 * s.xi1; break;
    }
    return G;
}

/// G_u = int (u - u(1)) u_t - a(0) xi1/mu1 (u(1) - u(0)).
inline double G_u_functional(const ContinuousState& s, const Grid& g, const PhysicalParams& p) {
    detail::check_state(s, g);
    const double u1 = s.u[detail::last(s)];
    const Vector d = s.u.array() - u1;
    return quad::trapezoid(g, d, s.udot) - p.a_left() * s.xi1 / p.mu1 * (u1 - s.u[0]);
}

/// Lyapunov candidate of each variant. W1D: V with u_star = 0 (Dirichlet pins the
/// level). W2D: V of w = u - v with eta2 shifted by the steady offset. W1W1: F + ell G_u.
inline double variant_V(const ContinuousState& s, const Grid& g, const PhysicalParams& p,
                        double ell, const BoundaryVariant& v, const VariantExtras& extras = {}) {
    switch (v.kind) {
        case VariantKind::W2W1: return V_functional(s, g, p, v, ell, extras.u_star);
        case VariantKind::W1D: return V_functional(s, g, p, v, ell, 0.0);
        case VariantKind::W2D: {
            if (!extras.steady || extras.steady->profile.size() != s.u.size()) {
                throw std::invalid_argument("variant_V: W2D needs the steady profile on this grid");
            }
            ContinuousState w = s;
            w.u = s.u - extras.steady->profile;
            return V_functional(w, g, p, v, ell, 0.0);
        }
        case VariantKind::W1W1: return F_functional(s, g, p, v) + ell * G_u_functional(s, g, p);
    }
    throw std::invalid_argument("variant_V: unknown variant");
}

struct SupDeviation {
    double value = 0.0;
    /// (4/a_lower) E_u + 2 eta2^2, a bound on value^2.
    double bound = 0.0;
};

inline SupDeviation sup_deviation(const ContinuousState& s, const Grid& g, const PhysicalParams& p,
                                  double u_star) {
    const double eta2 = s.u[detail::last(s)] - u_star;
    return {(s.u.array() - u_star).abs().maxCoeff(),
            4.0 / p.a_lower * energy(s, g, p) + 2.0 * eta2 * eta2};
}

/// Variant analog of max |u - u_star|: |u| for W1D, |u - v| for W2D, |u - u(1)| for W1W1.
inline double variant_sup_deviation(const ContinuousState& s, const BoundaryVariant& v,
                                    const VariantExtras& extras = {}) {
    switch (v.kind) {
        case VariantKind::W2W1: return (s.u.array() - extras.u_star).abs().maxCoeff();
        case VariantKind::W1D: return s.u.cwiseAbs().maxCoeff();
        case VariantKind::W2D:
            if (!extras.steady) throw std::invalid_argument("sup_deviation: W2D needs the profile");
            return (s.u - extras.steady->profile).cwiseAbs().maxCoeff();
        case VariantKind::W1W1: return (s.u.array() - s.u[detail::last(s)]).abs().maxCoeff();
    }
    return 0.0;
}

/// ell = 0.5 min(q_lower/2, alpha1, gamma1 (if x=0 is dynamic), sqrt(2 q_lower)).
inline double choose_ell(const PhysicalParams& p, const BoundaryVariant& v) {
    if (!(p.q_lower > 0.0)) {
        throw HypothesisError("h2", "choose_ell: q_lower = 0, certification unavailable");
    }
    double m = std::min({p.q_lower / 2.0, v.alpha1, std::sqrt(2.0 * p.q_lower)});
    if (v.dynamic_at_zero()) m = std::min(m, v.gamma1);
    return 0.5 * m;
}

/// The Lyapunov functionals assembled with the semi-discrete quadratures (kinetic via
/// E, potential via K, q-terms via R), in the local coordinates of `sys`. Along the
/// closed loop U = -kp y - alpha2 w_N their time derivatives are exact quadratic forms.
///
/// `center` is the rest displacement (u_star 1, 0, or the discrete steady profile);
/// W1W1 measures against u_N instead and ignores it.
class DiscreteLyapunov {
public:
    DiscreteLyapunov(const DiscreteSystem& sys, double kp, double ell, Vector center)
        : sys_(&sys), kp_(kp), ell_(ell), center_(std::move(center)) {
        if (center_.size() != sys.size()) {
            throw std::invalid_argument("DiscreteLyapunov: center has wrong dimension");
        }
        b_n_ = sys.b[sys.last()];
        alpha2_ = sys.variant.has_integrator() ? sys.variant.alpha2 : 0.0;
    }

    double ell() const { return ell_; }
    bool uses_G() const { return sys_->variant.kind == VariantKind::W1W1; }

    double kinetic(const Vector& udot) const { return 0.5 * udot.dot(sys_->E.cwiseProduct(udot)); }

    /// 1/2 u^T K u_prev (K annihilates constants, so the center drops out except for W2D).
    double potential(const Vector& u, const Vector& u_prev) const {
        return 0.5 * sys_->K.bilinear(u - center_, u_prev - center_);
    }

    double F(const Vector& u, const Vector& udot) const { return kinetic(udot) + potential(u, u); }

    double integrator_term(const Vector& u, const Vector& u_prev) const {
        const auto L = sys_->last();
        return 0.5 * b_n_ * alpha2_ * (u[L] - center_[L]) * (u_prev[L] - center_[L]);
    }

    /// W = w^T E udot + 1/2 w^T R w + b_N kp/2 w_N^2 or, for W1W1, G = (u - u_N)^T E udot.
    double W(const Vector& u, const Vector& udot) const {
        const auto L = sys_->last();
        if (uses_G()) {
            const Vector d = u.array() - u[L];
            return d.dot(sys_->E.cwiseProduct(udot));
        }
        const Vector w = u - center_;
        return w.dot(sys_->E.cwiseProduct(udot)) + 0.5 * w.dot(sys_->R.cwiseProduct(w)) +
               0.5 * b_n_ * kp_ * w[L] * w[L];
    }

    double V(const Vector& u, const Vector& udot) const {
        return F(u, udot) + integrator_term(u, u) + ell_ * W(u, udot);
    }

    /// Staggered evaluation along symplectic steps: position-position products pair
    /// u[k] with u[k-1].
    double V_shadow(const Vector& u, const Vector& u_prev, const Vector& udot) const {
        return kinetic(udot) + potential(u, u_prev) + integrator_term(u, u_prev) +
               ell_ * W(u, udot);
    }

private:
    const DiscreteSystem* sys_;
    double kp_;
    double ell_;
    Vector center_;
    double b_n_ = 0.0;
    double alpha2_ = 0.0;
};

/// Matrices of V, Gamma and -dV/dt in certification coordinates z = (w, udot), local
/// nodes of `sys`. W1W1 drops w_N (gauge u_N = 0, the forms are shift invariant).
struct CertificationForms {
    Matrix Q_V;
    Matrix Q_Gamma;
    Matrix Q_D;
    /// Closed-loop generator in the full (w, udot) coordinates.
    Matrix A;
    Eigen::Index dim = 0;
    bool gauge_dropped = false;

    /// Full (w, udot) coordinates -> certification coordinates.
    Vector restrict(const Vector& full) const {
        if (!gauge_dropped) return full;
        const auto n = full.size() / 2;
        Vector z(dim);
        z.head(n - 1) = full.head(n - 1);
        z.tail(n) = full.tail(n);
        return z;
    }
};

inline CertificationForms certification_forms(const DiscreteSystem& sys, double kp, double ell) {
    const auto& v = sys.variant;
    const auto n = sys.size();
    const auto L = sys.last();
    const double bN = sys.b[L];
    const double alpha2 = v.has_integrator() ? v.alpha2 : 0.0;
    const Matrix Kd = sys.K.dense();

    // Sampled Gamma pieces on the full grid, then restricted to the local nodes.
    const Grid& g = sys.grid;
    Matrix grad_full = Matrix::Zero(g.nodes(), g.nodes());
    for (Eigen::Index i = 1; i <= g.n(); ++i) {
        const double c = 1.0 / g.h(i);
        grad_full(i, i) += c;
        grad_full(i - 1, i - 1) += c;
        grad_full(i, i - 1) -= c;
        grad_full(i - 1, i) -= c;
    }
    const Vector trap_full = quad::trapezoid_weights(g);
    const Matrix grad = grad_full.bottomRightCorner(n, n);
    const Vector trap = trap_full.tail(n);

    Matrix QV = Matrix::Zero(2 * n, 2 * n);
    Matrix QG = Matrix::Zero(2 * n, 2 * n);
    auto ww = [&](Matrix& M) { return M.topLeftCorner(n, n); };
    auto vv = [&](Matrix& M) { return M.bottomRightCorner(n, n); };

    ww(QV) = 0.5 * Kd;
    vv(QV).diagonal() = 0.5 * sys.E;
    QV.topRightCorner(n, n).diagonal() = 0.5 * ell * sys.E;
    QV.bottomLeftCorner(n, n).diagonal() = 0.5 * ell * sys.E;
    if (v.kind != VariantKind::W1W1) {
        ww(QV).diagonal() += 0.5 * ell * sys.R;
        ww(QV)(L, L) += 0.5 * bN * (alpha2 + ell * kp);
    }

    ww(QG) = grad;
    vv(QG).diagonal() = trap;
    vv(QG)(L, L) += 1.0;
    if (v.dynamic_at_zero()) vv(QG)(0, 0) += 1.0;
    if (v.has_integrator()) ww(QG)(L, L) += 1.0;
    if (v.kind == VariantKind::W2D) ww(QG).diagonal() += trap;

    // w' = udot,  E udot' = -K w - R udot - b (kp udot_N + alpha2 w_N).
    Matrix A = Matrix::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n).setIdentity();
    Matrix stiff = Kd;
    stiff.col(L) += alpha2 * sys.b;
    Matrix damp = Matrix(sys.R.asDiagonal());
    damp.col(L) += kp * sys.b;
    const Vector inv_e = sys.E.cwiseInverse();
    A.bottomLeftCorner(n, n) = -(inv_e.asDiagonal() * stiff);
    A.bottomRightCorner(n, n) = -(inv_e.asDiagonal() * damp);

    Matrix QD = -(A.transpose() * QV + QV * A);
    QD = 0.5 * (QD + QD.transpose()).eval();

    CertificationForms out;
    out.A = A;
    if (v.kind == VariantKind::W1W1) {
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < 2 * n; ++i) {
            if (i != L) keep.push_back(i);
        }
        out.Q_V = QV(keep, keep);
        out.Q_Gamma = QG(keep, keep);
        out.Q_D = QD(keep, keep);
        out.gauge_dropped = true;
    } else {
        out.Q_V = QV;
        out.Q_Gamma = QG;
        out.Q_D = QD;
    }
    out.dim = out.Q_V.rows();
    return out;
}

struct CertificationReport {
    double ell = 0.0;
    double c = 0.0;
    double C = 0.0;
    /// V' <= -rho_formal V; NaN when Q_V is not positive definite.
    double rho_formal = 0.0;
    BoundaryVariant variant;
    std::size_t N_used = 0;

    bool success() const { return c > 0.0 && C >= c && rho_formal > 0.0; }
};

/// c, C = extreme generalized eigenvalues of (Q_V, Q_Gamma); rho_formal = smallest
/// generalized eigenvalue of (Q_D, Q_V).
inline CertificationReport certify(const DiscreteSystem& sys, const PhysicalParams& p,
                                   const BoundaryVariant& v, double ell) {
    if (!(p.q_lower > 0.0)) {
        throw HypothesisError("h2", "certify: q must be bounded below by a positive constant");
    }
    if (v.kind != sys.variant.kind || v.dirichlet_at_zero() != sys.reduced()) {
        throw std::invalid_argument("certify: system was not built for this variant");
    }
    v.validate();
    if (!(ell >= 0.0)) throw std::invalid_argument("certify: ell must be nonnegative");
    const double kp = v.alpha1 - p.q1;
    const auto forms = certification_forms(sys, kp, ell);

    Eigen::LLT<Matrix> gamma_chol(forms.Q_Gamma);
    if (gamma_chol.info() != Eigen::Success) {
        throw CertificationError("certify: Gamma form is not positive definite");
    }
    CertificationReport r;
    r.ell = ell;
    r.variant = v;
    r.N_used = sys.grid.intervals();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> sandwich(forms.Q_V, forms.Q_Gamma,
                                                              Eigen::EigenvaluesOnly);
    r.c = sandwich.eigenvalues().minCoeff();
    r.C = sandwich.eigenvalues().maxCoeff();
    if (r.c > 0.0) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> rate(forms.Q_D, forms.Q_V,
                                                              Eigen::EigenvaluesOnly);
        r.rho_formal = rate.eigenvalues().minCoeff();
    } else {
        r.rho_formal = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

struct DecayFit {
    double M = 1.0;
    double rho = 0.0;
    double r_squared = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    /// Fraction of samples above M Gamma(0) exp(-rho t).
    double violation_fraction = 0.0;
};

/// Running maximum from the right: env[k] = max_{j >= k} values[j].
inline std::vector<double> suffix_max_envelope(const std::vector<double>& values) {
    std::vector<double> env(values.size());
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = values.size(); k-- > 0;) {
        m = std::max(m, values[k]);
        env[k] = m;
    }
    return env;
}

/// Least-squares line through (t, log Gamma) on [t0, t1]; non-positive samples are skipped.
inline DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& gamma_values,
                          std::optional<std::pair<double, double>> window = std::nullopt) {
    if (t.size() != gamma_values.size()) {
        throw std::invalid_argument("fit_decay: time and value series differ in length");
    }
    const double lo = window ? window->first : -std::numeric_limits<double>::infinity();
    const double hi = window ? window->second : std::numeric_limits<double>::infinity();
    std::vector<double> ts, ls, vs;
    DecayFit fit;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < lo || t[k] > hi) continue;
        if (!(gamma_values[k] > 0.0) || !std::isfinite(gamma_values[k])) {
            ++fit.excluded;
            continue;
        }
        ts.push_back(t[k]);
        vs.push_back(gamma_values[k]);
        ls.push_back(std::log(gamma_values[k]));
    }
    if (ts.size() < 10) {
        throw std::invalid_argument("fit_decay: fewer than 10 usable samples");
    }
    const double m = static_cast<double>(ts.size());
    double tm = 0.0, lm = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        tm += ts[k];
        lm += ls[k];
    }
    tm /= m;
    lm /= m;
    double stt = 0.0, stl = 0.0, sll = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - tm) * (ts[k] - tm);
        stl += (ts[k] - tm) * (ls[k] - lm);
        sll += (ls[k] - lm) * (ls[k] - lm);
    }
    if (!(stt > 0.0)) throw std::invalid_argument("fit_decay: degenerate time window");
    const double slope = stl / stt;
    const double intercept = lm - slope * tm;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double e = ls[k] - (intercept + slope * ts[k]);
        ss_res += e * e;
    }
    fit.rho = -slope;
    fit.r_squared = sll > 0.0 ? 1.0 - ss_res / sll : 1.0;
    fit.M = std::max(1.0, std::exp(intercept) / vs.front());
    fit.t_start = ts.front();
    fit.t_end = ts.back();
    fit.used = ts.size();
    std::size_t violations = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (vs[k] > fit.M * vs.front() * std::exp(-fit.rho * (ts[k] - ts.front()))) ++violations;
    }
    fit.violation_fraction = static_cast<double>(violations) / m;
    return fit;
}

/// Simulation observer recording FunctionalSample values in target-system coordinates.
///
/// For W2W1 the simulated (regulation) state is mapped with the exact discrete
/// regulation shift: u = v - t v1_ref + profile, udot = v_t - v1_ref, eta2 = eta_v + offset.
/// E_u and Gamma are the sampled functionals; F, W, V are the discrete forms with the
/// staggered position pairing. W2D measures Gamma against the discrete rest profile.
class FunctionalMonitor {
public:
    FunctionalMonitor(const DiscreteSystem& sys, const PhysicalParams& p, const ControlParams& c,
                      double ell)
        : sys_(&sys), p_(&p), ell_(ell), kp_(c.kp), r_(0.0) {
        const auto& v = sys.variant;
        if (v.kind == VariantKind::W2W1) {
            shift_ = discrete_regulation_shift(sys, c);
            r_ = c.v1_ref;
        }
        if (v.kind == VariantKind::W2D) {
            if (!(v.alpha2 > 0.0)) throw std::invalid_argument("monitor: W2D needs alpha2 > 0");
        }
    }

    void operator()(const StepView& view) {
        const auto L = sys_->last();
        const double eta2 = view.eta + (shift_ ? shift_->eta_offset : 0.0);
        u_ = to_target(view.u, view.t);
        u_prev_ = to_target(view.u_prev, view.t - view.dt);
        udot_ = view.udot.array() - r_;

        if (view.step == 0) initialize(eta2);
        const double V = forms_->V_shadow(u_, u_prev_, udot_);
        if (view.step == 0) {
            V0_ = V;
        } else {
            max_increase_ = std::max(max_increase_, V - V_last_);
            if (V > V_last_) ++increases_;
        }
        V_last_ = V;
        if (sys_->variant.has_integrator()) {
            conservation_ = std::max(conservation_, std::abs(u_[L] - eta2 - u_star_));
        }
        if (!view.sampled) return;

        const auto state = ContinuousState::from_nodal(sys_->to_full(u_), sys_->to_full(udot_),
                                                       eta2, view.t);
        FunctionalSample s;
        s.t = view.t;
        s.E_u = energy(state, sys_->grid, *p_);
        s.F = forms_->kinetic(udot_) + forms_->potential(u_, u_prev_);
        s.W = forms_->W(u_, udot_);
        s.V = V;
        s.Gamma = gamma(state, sys_->grid, sys_->variant, extras_);
        s.sup_dev = variant_sup_deviation(state, sys_->variant, extras_);
        samples_.push_back(s);
    }

    const std::vector<FunctionalSample>& samples() const { return samples_; }
    double V0() const { return V0_; }
    /// max_k V[k+1] - V[k] (negative when strictly decreasing).
    double max_increase() const { return max_increase_; }
    std::size_t increase_count() const { return increases_; }
    double u_star() const { return u_star_; }
    /// max_t |u_N - eta2 - u_star| in target coordinates (integrator variants).
    double conservation_residual() const { return conservation_; }
    const VariantExtras& extras() const { return extras_; }
    const std::optional<RegulationShift>& shift() const { return shift_; }

private:
    Vector to_target(const Vector& v, double t) const {
        if (!shift_) return v;
        return v.array() - t * r_ + shift_->profile.array();
    }

    void initialize(double eta2) {
        const auto L = sys_->last();
        const auto& var = sys_->variant;
        Vector center = Vector::Zero(sys_->size());
        if (var.has_integrator()) u_star_ = u_[L] - eta2;
        extras_.u_star = u_star_;
        if (var.kind == VariantKind::W2W1) {
            center.setConstant(u_star_);
        } else if (var.kind == VariantKind::W2D) {
            // Gamma is measured against the rest state of the simulated system.
            const auto eq = closed_loop_equilibrium(*sys_, var.alpha2, u_star_);
            center = eq.profile;
            SteadyProfile rest;
            rest.profile = sys_->to_full(eq.profile);
            rest.C2 = std::numeric_limits<double>::quiet_NaN();
            rest.eta2_offset = eq.eta2;
            extras_.steady = std::move(rest);
        }
        forms_.emplace(*sys_, kp_, ell_, std::move(center));
    }

    const DiscreteSystem* sys_;
    const PhysicalParams* p_;
    double ell_;
    double kp_;
    double r_;
    std::optional<RegulationShift> shift_;
    std::optional<DiscreteLyapunov> forms_;
    VariantExtras extras_;
    double u_star_ = 0.0;
    double V0_ = 0.0;
    double V_last_ = 0.0;
    double max_increase_ = -std::numeric_limits<double>::infinity();
    std::size_t increases_ = 0;
    double conservation_ = 0.0;
    std::vector<FunctionalSample> samples_;
    Vector u_, u_prev_, udot_;
};

}  // namespace wentzell
