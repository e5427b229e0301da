#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "wentzell/discretize.hpp"
#include "wentzell/samples.hpp"

namespace wentzell {

/// U = -kp (y - y_ref) - ki eta,  eta' = y - y_ref,  eta(0) = 0.
struct PIController {
    double kp = 0.0;
    double ki = 0.0;
    double y_ref = 0.0;
    double eta = 0.0;
    std::optional<double> saturation;

    static PIController from(const ControlParams& c) { return {c.kp, c.alpha2, c.v1_ref, 0.0, {}}; }
};

inline double pi_output(const PIController& c, double y) {
    double u = -c.kp * (y - c.y_ref) - c.ki * c.eta;
    if (c.saturation) u = std::clamp(u, -*c.saturation, *c.saturation);
    return u;
}

/// Explicit Euler on the integrator state.
inline PIController pi_advance(PIController c, double y, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("pi_advance: dt must be positive");
    c.eta += dt * (y - c.y_ref);
    return c;
}

struct SimState {
    Vector u;
    Vector udot;
    double t = 0.0;
    std::size_t step = 0;
};

/// Precomputed diagonal factors for a fixed dt:
///   udot' = (udot + dt E^-1 (-K u + b U + f_d)) / (1 + dt R/E),   u' = u + dt udot'.
class SymplecticStepper {
public:
    SymplecticStepper(const DiscreteSystem& sys, double dt) : sys_(&sys), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("symplectic_step: dt must be positive");
        const auto n = sys.size();
        inv_e_.resize(n);
        contraction_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(sys.E[i] > 0.0)) {
                throw std::invalid_argument("symplectic_step: non-positive mass entry at " +
                                            std::to_string(i));
            }
            inv_e_[i] = 1.0 / sys.E[i];
            const double denom = 1.0 + dt * sys.R[i] * inv_e_[i];
            if (!(denom > 0.0)) {
                throw DivergenceError(0.0, "symplectic_step: 1 + dt R/E <= 0 at node " +
                                               std::to_string(i) + "; need dt < " +
                                               std::to_string(sys.E[i] / -sys.R[i]));
            }
            contraction_[i] = 1.0 / denom;
        }
        b_scaled_ = sys.b.cwiseProduct(inv_e_);
        f_scaled_ = sys.f_d.cwiseProduct(inv_e_);
    }

    double dt() const { return dt_; }

    void advance(Vector& u, Vector& udot, double U) {
        sys_->K.apply(u, ku_);
        const auto n = u.size();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = udot[i] + dt_ * (-ku_[i] * inv_e_[i] + b_scaled_[i] * U + f_scaled_[i]);
            udot[i] = v * contraction_[i];
            u[i] += dt_ * udot[i];
        }
    }

private:
    const DiscreteSystem* sys_;
    double dt_;
    Vector inv_e_, contraction_, b_scaled_, f_scaled_, ku_;
};

inline SimState symplectic_step(const DiscreteSystem& sys, const SimState& s, double U, double dt) {
    SymplecticStepper stepper(sys, dt);
    SimState out = s;
    stepper.advance(out.u, out.udot, U);
    out.t = s.t + dt;
    out.step = s.step + 1;
    if (!out.u.allFinite() || !out.udot.allFinite()) {
        throw DivergenceError(s.t, "symplectic_step: non-finite state");
    }
    return out;
}

struct SimulationOptions {
    double dt = 0.0;
    double t_end = 0.0;
    std::size_t sample_stride = 10;
    bool record_displacement = true;
    bool record_velocity = true;
    double divergence_bound = 1e12;
};

/// One completed step as seen by observers. For step 0 (the initial state) the
/// "previous" displacement is u - dt udot, the state a symplectic step would have
/// come from.
struct StepView {
    std::size_t step;
    double t;
    double dt;
    const Vector& u_prev;
    const Vector& u;
    const Vector& udot;
    double eta_prev;
    double eta;
    double y;
    double U;
    bool sampled;
};

struct Trajectory {
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> sample_times;
    std::vector<Vector> u_samples;
    std::vector<Vector> udot_samples;
    std::vector<double> y_series;
    std::vector<double> U_series;
    std::vector<double> eta_series;
    std::vector<FunctionalSample> functional_series;
    SimState final_state;
    double final_eta = 0.0;
};

struct NullObserver {
    void operator()(const StepView&) const {}
};

/// Closed (or open, ctrl = nullopt) loop run over ceil(T/dt) steps. Each step reads
/// y = c_out^T udot, applies U = pi_output, takes the symplectic step and advances
/// the integrator with the updated output.
template <class Observer = NullObserver>
Trajectory simulate(const DiscreteSystem& sys, std::optional<PIController> ctrl, SimState ic,
                    const SimulationOptions& opt, Observer&& observe = Observer{}) {
    if (!(opt.dt > 0.0) || !(opt.t_end > 0.0)) {
        throw std::invalid_argument("simulate: dt and T must be positive");
    }
    if (opt.sample_stride == 0) throw std::invalid_argument("simulate: sample_stride must be >= 1");
    if (ic.u.size() != sys.size() || ic.udot.size() != sys.size()) {
        throw std::invalid_argument("simulate: initial state has wrong dimension");
    }
    SymplecticStepper stepper(sys, opt.dt);
    const auto steps = static_cast<std::size_t>(std::ceil(opt.t_end / opt.dt - 1e-9));
    const double dt = opt.dt;

    Trajectory tr;
    tr.dt = dt;
    tr.steps = steps;

    SimState s = std::move(ic);
    double eta = ctrl ? ctrl->eta : 0.0;
    auto output = [&](const Vector& udot) { return sys.c_out.dot(udot); };
    auto control = [&](double y) {
        if (!ctrl) return 0.0;
        ctrl->eta = eta;
        return pi_output(*ctrl, y);
    };
    auto record = [&](double y) {
        tr.sample_times.push_back(s.t);
        if (opt.record_displacement) tr.u_samples.push_back(s.u);
        if (opt.record_velocity) tr.udot_samples.push_back(s.udot);
        tr.y_series.push_back(y);
        tr.U_series.push_back(control(y));
        tr.eta_series.push_back(eta);
    };

    Vector u_prev = s.u - dt * s.udot;
    double y = output(s.udot);
    {
        const double eta_prev = ctrl ? eta - dt * (y - ctrl->y_ref) : 0.0;
        record(y);
        observe(StepView{0, s.t, dt, u_prev, s.u, s.udot, eta_prev, eta, y, control(y), true});
    }

    for (std::size_t k = 0; k < steps; ++k) {
        const double U = control(y);
        u_prev = s.u;
        stepper.advance(s.u, s.udot, U);
        s.step = k + 1;
        s.t = tr.sample_times.front() + static_cast<double>(k + 1) * dt;
        const double eta_prev = eta;
        y = output(s.udot);
        if (ctrl) {
            ctrl->eta = eta;
            eta = pi_advance(*ctrl, y, dt).eta;
        }
        const double bound = std::max(s.u.cwiseAbs().maxCoeff(), s.udot.cwiseAbs().maxCoeff());
        if (!std::isfinite(bound) || bound > opt.divergence_bound) {
            throw DivergenceError(s.t - dt, "simulate: state diverged at t = " +
                                                std::to_string(s.t) + " (|x|_inf = " +
                                                std::to_string(bound) + ")");
        }
        const bool sampled = (k + 1) % opt.sample_stride == 0 || k + 1 == steps;
        if (sampled) record(y);
        observe(StepView{k + 1, s.t, dt, u_prev, s.u, s.udot, eta_prev, eta, y, control(y), sampled});
    }
    tr.final_state = s;
    tr.final_eta = eta;
    return tr;
}

struct Spectrum {
    /// Generalized eigenvalues of (K, E), ascending.
    Vector generalized;
    /// Eigenvalues of the first-order system [u; udot]' = A [u; udot].
    std::vector<std::complex<double>> eigenvalues;

    double max_real_part() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& z : eigenvalues) m = std::max(m, z.real());
        return m;
    }
    double max_abs_real_part() const {
        double m = 0.0;
        for (const auto& z : eigenvalues) m = std::max(m, std::abs(z.real()));
        return m;
    }
};

/// Undamped (R = 0): symmetric reduction E^-1/2 K E^-1/2, eigenvalues +-i sqrt(lambda)
/// (a negative lambda beyond round-off shows up as a real pair). Damped: eigenvalues
/// of the companion matrix [[0, I], [-E^-1 K, -E^-1 R]].
inline Spectrum spectrum(const DiscreteSystem& sys) {
    const auto n = sys.size();
    if (!(sys.E.minCoeff() > 0.0)) {
        throw std::invalid_argument("spectrum: mass must be positive on unconstrained nodes");
    }
    const Vector s = sys.E.cwiseInverse().cwiseSqrt();
    const Matrix Kd = sys.K.dense();
    const Matrix S = s.asDiagonal() * Kd * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    Spectrum out;
    out.generalized = es.eigenvalues();
    const double scale = std::max(1.0, out.generalized.cwiseAbs().maxCoeff());
    const double zero_tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    if (sys.R.cwiseAbs().maxCoeff() == 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double lam = out.generalized[i];
            if (std::abs(lam) <= zero_tol) lam = 0.0;
            if (lam >= 0.0) {
                const double w = std::sqrt(lam);
                out.eigenvalues.emplace_back(0.0, w);
                out.eigenvalues.emplace_back(0.0, -w);
            } else {
                const double r = std::sqrt(-lam);
                out.eigenvalues.emplace_back(r, 0.0);
                out.eigenvalues.emplace_back(-r, 0.0);
            }
        }
        return out;
    }

    const Vector inv_e = sys.E.cwiseInverse();
    Matrix A = Matrix::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n).setIdentity();
    A.bottomLeftCorner(n, n) = -(inv_e.asDiagonal() * Kd);
    A.bottomRightCorner(n, n) = -Matrix(inv_e.cwiseProduct(sys.R).asDiagonal());
    Eigen::EigenSolver<Matrix> ges(A, false);
    const auto ev = ges.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.eigenvalues.push_back(ev[i]);
    return out;
}

/// Default step: 0.1 min(dx) / sqrt(a_upper).
inline double auto_dt(const Grid& g, const PhysicalParams& p) {
    return 0.1 * g.min_dx() / std::sqrt(p.a_upper);
}

}  // namespace wentzell
