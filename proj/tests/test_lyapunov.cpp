#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wentzell/wentzell.hpp"

using namespace wentzell;

namespace {

constexpr BoundaryConstants kSet3{20.0, 20.0, 0.005, 0.005, 0.0, 0.0};

struct Fixture {
    Grid g;
    PhysicalParams p;
    BoundaryVariant v;
};

Fixture make(std::size_t N, VariantKind kind, double q = 0.005, BoundaryConstants bc = kSet3,
             ControlParams c = {10.0, 100.0, 0.0}) {
    Fixture f{build_grid(N), {}, {}};
    f.p = PhysicalParams::uniform(f.g, 1.0, q, 0.0, bc);
    if (!BoundaryVariant::has_integrator(kind)) c.alpha2 = 0.0;
    f.v = BoundaryVariant::make(kind, f.p, c);
    return f;
}

ContinuousState random_state(const Grid& g, std::mt19937_64& rng) {
    return ContinuousState::from_nodal(random_smooth_field(g, rng), random_smooth_field(g, rng),
                                       random_vector(1, rng)[0]);
}

// Independent transcription of W for the W2W1 variant.
double W_reference(const ContinuousState& s, const Grid& g, const PhysicalParams& p, double alpha1,
                   double gamma1, double ustar) {
    double W = 0.0;
    for (Eigen::Index i = 1; i < g.nodes(); ++i) {
        const double h = g.x(i) - g.x(i - 1);
        const double wl = s.u[i - 1] - ustar, wr = s.u[i] - ustar;
        W += 0.5 * h * (wl * s.udot[i - 1] + wr * s.udot[i]);
        W += 0.25 * h * (p.q[i - 1] * wl * wl + p.q[i] * wr * wr);
    }
    const double e2 = s.u[g.n()] - ustar, x2 = s.u[0] - ustar;
    W += p.a_right() / p.beta1 * (alpha1 / 2.0 * e2 * e2 + e2 * s.eta1);
    W += p.a_left() / p.mu1 * (gamma1 / 2.0 * x2 * x2 + x2 * s.xi1);
    return W;
}

double G_reference(const ContinuousState& s, const Grid& g, const PhysicalParams& p) {
    const double u1 = s.u[g.n()];
    double G = 0.0;
    for (Eigen::Index i = 1; i < g.nodes(); ++i) {
        const double h = g.x(i) - g.x(i - 1);
        G += 0.5 * h * ((s.u[i - 1] - u1) * s.udot[i - 1] + (s.u[i] - u1) * s.udot[i]);
    }
    return G - p.a_left() / p.mu1 * s.xi1 * (u1 - s.u[0]);
}

}  // namespace

TEST(Energy, TranslationInvariant) {
    std::mt19937_64 rng(1);
    const auto f = make(30, VariantKind::W2W1);
    const auto s = random_state(f.g, rng);
    auto shifted = s;
    shifted.u.array() += 3.7;
    EXPECT_NEAR(energy(s, f.g, f.p), energy(shifted, f.g, f.p), 1e-12);
    const auto rest = ContinuousState::from_nodal(Vector::Constant(31, 2.0), Vector::Zero(31), 0.0);
    EXPECT_EQ(energy(rest, f.g, f.p), 0.0);
}

TEST(Energy, LinearProfileExact) {
    const auto f = make(17, VariantKind::W2W1);
    const auto s = ContinuousState::from_nodal(f.g.x(), Vector::Zero(18), 0.0);
    EXPECT_NEAR(energy(s, f.g, f.p), 0.5, 1e-12);
}

TEST(Energy, SineProfile) {
    const auto f = make(199, VariantKind::W2W1);
    const Vector u = (std::numbers::pi * f.g.x().array()).sin();
    const auto s = ContinuousState::from_nodal(u, Vector::Zero(200), 0.0);
    const double exact = std::numbers::pi * std::numbers::pi / 4.0;
    EXPECT_NEAR(energy(s, f.g, f.p) / exact, 1.0, 1e-3);
}

TEST(F, Examples) {
    const auto f = make(10, VariantKind::W2W1);
    const auto zero = ContinuousState::from_nodal(Vector::Zero(11), Vector::Zero(11), 0.0);
    EXPECT_EQ(F_functional(zero, f.g, f.p, f.v), 0.0);
    auto s = zero;
    s.eta1 = 1.0;
    EXPECT_DOUBLE_EQ(F_functional(s, f.g, f.p, f.v), 0.025);
    std::mt19937_64 rng(2);
    auto r = random_state(f.g, rng);
    r.eta1 = r.xi1 = 0.0;
    EXPECT_DOUBLE_EQ(F_functional(r, f.g, f.p, f.v), energy(r, f.g, f.p));
}

TEST(W, AttractorAndFormula) {
    auto f = make(10, VariantKind::W2W1, 1.0, {20.0, 20.0, 0.5, 0.25, 0.0, 0.0});
    const double ustar = 0.4;
    const auto rest = ContinuousState::from_nodal(Vector::Constant(11, ustar), Vector::Zero(11), 0.0);
    EXPECT_EQ(W_functional(rest, f.g, f.p, f.v, ustar), 0.0);
    const auto s = ContinuousState::from_nodal(Vector::Constant(11, ustar + 1.0), Vector::Zero(11), 1.0);
    const double expected = 0.5 + f.v.alpha1 / (2.0 * 20.0) + f.v.gamma1 / (2.0 * 20.0);
    EXPECT_NEAR(W_functional(s, f.g, f.p, f.v, ustar), expected, 1e-14);
}

TEST(W, DuplicateFormula) {
    std::mt19937_64 rng(3);
    const auto f = make(40, VariantKind::W2W1);
    for (int k = 0; k < 5; ++k) {
        const auto s = random_state(f.g, rng);
        const double us = random_vector(1, rng)[0];
        EXPECT_NEAR(W_functional(s, f.g, f.p, f.v, us),
                    W_reference(s, f.g, f.p, f.v.alpha1, f.v.gamma1, us), 1e-12);
    }
}

TEST(V, LinearInEll) {
    std::mt19937_64 rng(4);
    const auto f = make(40, VariantKind::W2W1);
    const auto s = random_state(f.g, rng);
    const double us = 0.3;
    const double eta2 = s.u[40] - us;
    const double base = F_functional(s, f.g, f.p, f.v) + f.v.alpha2 / (2.0 * 20.0) * eta2 * eta2;
    EXPECT_NEAR(V_functional(s, f.g, f.p, f.v, 0.0, us), base, 1e-12);
    EXPECT_NEAR(V_functional(s, f.g, f.p, f.v, 0.01, us) - base,
                0.01 * W_functional(s, f.g, f.p, f.v, us), 1e-12);
    const auto rest = ContinuousState::from_nodal(Vector::Constant(41, us), Vector::Zero(41), 0.0);
    EXPECT_EQ(V_functional(rest, f.g, f.p, f.v, 0.01, us), 0.0);
}

TEST(Gamma, Examples) {
    const auto f = make(20, VariantKind::W2W1);
    auto s = ContinuousState::from_nodal(Vector::Zero(21), Vector::Ones(21), 0.0);
    EXPECT_NEAR(gamma(s, f.g, f.v, {-1.0, {}}), 4.0, 1e-14);
    const auto w1d = make(20, VariantKind::W1D);
    EXPECT_NEAR(gamma(s, w1d.g, w1d.v), 2.0, 1e-14);
    const auto w1w1 = make(20, VariantKind::W1W1);
    EXPECT_NEAR(gamma(s, w1w1.g, w1w1.v), 3.0, 1e-14);
    const auto rest = ContinuousState::from_nodal(Vector::Constant(21, 0.7), Vector::Zero(21), 0.0);
    EXPECT_EQ(gamma(rest, f.g, f.v, {0.7, {}}), 0.0);
    EXPECT_EQ(gamma(rest, w1w1.g, w1w1.v), 0.0);
}

TEST(Gamma, W2DKernel) {
    const auto f = make(30, VariantKind::W2D);
    const double us = 0.5;
    const auto v = steady_profile(f.p, f.v.alpha2, us, f.g);
    const auto s = ContinuousState::from_nodal(v.profile, Vector::Zero(31), v.eta2_offset);
    EXPECT_NEAR(gamma(s, f.g, f.v, {us, v}), 0.0, 1e-24);
    EXPECT_THROW(gamma(s, f.g, f.v, {us, {}}), std::invalid_argument);
}

TEST(Gu, Examples) {
    const auto f = make(10, VariantKind::W1W1);
    const auto c = ContinuousState::from_nodal(Vector::Constant(11, 1.5), Vector::Ones(11), 0.0);
    auto flat = c;
    flat.xi1 = 0.0;
    EXPECT_EQ(G_u_functional(flat, f.g, f.p), 0.0);
    Vector u = Vector::Zero(11);
    u[10] = 2.0;
    auto s = ContinuousState::from_nodal(u, Vector::Zero(11), 0.0);
    s.xi1 = 1.0;
    EXPECT_NEAR(G_u_functional(s, f.g, f.p), -0.1, 1e-15);
    std::mt19937_64 rng(5);
    const auto r = random_state(f.g, rng);
    EXPECT_NEAR(G_u_functional(r, f.g, f.p), G_reference(r, f.g, f.p), 1e-12);
}

TEST(VariantV, AttractorsAndShift) {
    const auto w1d = make(20, VariantKind::W1D);
    const auto zero = ContinuousState::from_nodal(Vector::Zero(21), Vector::Zero(21), 0.0);
    EXPECT_EQ(variant_V(zero, w1d.g, w1d.p, 0.01, w1d.v), 0.0);

    const auto w1w1 = make(20, VariantKind::W1W1);
    const auto flat = ContinuousState::from_nodal(Vector::Constant(21, 0.3), Vector::Zero(21), 0.0);
    EXPECT_EQ(variant_V(flat, w1w1.g, w1w1.p, 0.01, w1w1.v), 0.0);

    const auto w2d = make(20, VariantKind::W2D);
    const auto v = steady_profile(w2d.p, w2d.v.alpha2, 0.5, w2d.g);
    const auto rest = ContinuousState::from_nodal(v.profile, Vector::Zero(21), v.eta2_offset);
    EXPECT_NEAR(variant_V(rest, w2d.g, w2d.p, 0.01, w2d.v, {0.5, v}), 0.0, 1e-24);

    std::mt19937_64 rng(6);
    auto w = random_state(w2d.g, rng);
    w.u[0] = w.udot[0] = w.xi1 = 0.0;
    auto u = w;
    u.u += v.profile;
    EXPECT_NEAR(variant_V(u, w2d.g, w2d.p, 0.01, w2d.v, {0.5, v}),
                V_functional(w, w2d.g, w2d.p, w2d.v, 0.01, 0.0), 1e-12);
}

TEST(VariantV, EllZeroIsF) {
    std::mt19937_64 rng(7);
    const auto f = make(20, VariantKind::W1W1);
    const auto s = random_state(f.g, rng);
    EXPECT_DOUBLE_EQ(variant_V(s, f.g, f.p, 0.0, f.v), F_functional(s, f.g, f.p, f.v));
}

TEST(ChooseEll, Examples) {
    const auto f = make(10, VariantKind::W2W1);
    EXPECT_NEAR(choose_ell(f.p, f.v), 0.00125, 1e-15);
    auto p = PhysicalParams::uniform(f.g, 1.0, 2.0, 0.0, {20.0, 20.0, 0.0, 1.0, 0.0, 0.0});
    const auto v = BoundaryVariant::make(VariantKind::W2W1, p, ControlParams{1.0, 1.0, 0.0});
    EXPECT_DOUBLE_EQ(choose_ell(p, v), 0.5);
    const auto open = make(10, VariantKind::W2W1, 0.0, {});
    EXPECT_THROW(choose_ell(open.p, open.v), HypothesisError);
}

TEST(Certify, SetThreeGainsB) {
    const auto f = make(50, VariantKind::W2W1);
    const auto sys = build_system(f.g, f.p, f.v);
    const auto r = certify(sys, f.p, f.v, choose_ell(f.p, f.v));
    EXPECT_GT(r.c, 0.0);
    EXPECT_GE(r.C, r.c);
    EXPECT_GT(r.rho_formal, 0.0);
    EXPECT_TRUE(r.success());
    EXPECT_EQ(r.N_used, 50u);
}

TEST(Certify, EllZeroHasNoRate) {
    const auto f = make(50, VariantKind::W2W1);
    const auto sys = build_system(f.g, f.p, f.v);
    const auto r = certify(sys, f.p, f.v, 0.0);
    EXPECT_GT(r.c, 0.0);
    EXPECT_NEAR(r.rho_formal, 0.0, 1e-10);
}

TEST(Certify, Preconditions) {
    const auto open = make(20, VariantKind::W2W1, 0.0, {});
    EXPECT_THROW(certify(build_system(open.g, open.p, open.v), open.p, open.v, 0.001), HypothesisError);
    const auto f = make(20, VariantKind::W2W1);
    const auto w1d = make(20, VariantKind::W1D);
    EXPECT_THROW(certify(build_system(f.g, f.p, f.v), w1d.p, w1d.v, 0.001), std::invalid_argument);
}

TEST(Certify, FormsSymmetric) {
    for (auto k : {VariantKind::W2W1, VariantKind::W1D, VariantKind::W2D, VariantKind::W1W1}) {
        const auto f = make(30, k);
        const auto forms = certification_forms(build_system(f.g, f.p, f.v), 10.0, 0.00125);
        EXPECT_LE((forms.Q_V - forms.Q_V.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LE((forms.Q_Gamma - forms.Q_Gamma.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_EQ(forms.gauge_dropped, k == VariantKind::W1W1);
    }
}

// -dV/dt assembled by hand from the closed-loop equations.
TEST(Certify, DissipationDualRoute) {
    std::mt19937_64 rng(8);
    for (auto k : {VariantKind::W2W1, VariantKind::W1D, VariantKind::W2D}) {
        const auto f = make(25, k);
        const auto sys = build_system(f.g, f.p, f.v);
        const double kp = 10.0, ell = 0.00125;
        const auto forms = certification_forms(sys, kp, ell);
        const auto n = sys.size();
        const auto L = sys.last();
        const double bN = sys.b[L];
        const double a2 = f.v.alpha2;
        for (int t = 0; t < 5; ++t) {
            const Vector w = random_vector(n, rng), ud = random_vector(n, rng);
            Vector z(2 * n);
            z << w, ud;
            double hand = ud.dot((sys.R - ell * sys.E).cwiseProduct(ud)) + kp * bN * ud[L] * ud[L];
            hand += ell * sys.K.bilinear(w, w) + ell * bN * a2 * w[L] * w[L];
            const double form = z.dot(forms.Q_D * z);
            EXPECT_NEAR(form, hand, 1e-10 * (1.0 + std::abs(hand)));
        }
    }
}

TEST(Certify, SandwichOnRandomStates) {
    std::mt19937_64 rng(9);
    for (auto k : {VariantKind::W2W1, VariantKind::W1W1}) {
        const auto f = make(30, k);
        const auto sys = build_system(f.g, f.p, f.v);
        const double ell = choose_ell(f.p, f.v);
        const auto r = certify(sys, f.p, f.v, ell);
        const auto forms = certification_forms(sys, f.v.alpha1 - f.p.q1, ell);
        for (int t = 0; t < 200; ++t) {
            const Vector z = forms.restrict(random_vector(2 * sys.size(), rng));
            const double V = z.dot(forms.Q_V * z), G = z.dot(forms.Q_Gamma * z);
            EXPECT_LE(r.c * G, V * (1.0 + 1e-10));
            EXPECT_LE(V, r.C * G * (1.0 + 1e-10));
        }
    }
}

// Centered difference of V along a 3b trajectory against -z^T Q_D z.
TEST(Certify, DiscreteDissipationIdentity) {
    auto c = preset_config("3b");
    const auto m = resolve_model(c);
    const auto sys = build_system(m.grid, m.params, m.variant);
    const double dt = 1e-3, ell = choose_ell(m.params, m.variant);
    const auto shift = discrete_regulation_shift(sys, m.control);
    const double r = m.control.v1_ref;
    const auto forms = certification_forms(sys, m.control.kp, ell);

    Vector udot0 = Vector::Zero(sys.size());
    udot0[sys.last()] = 1.0;
    std::vector<Vector> us, uds;
    double ustar = 0.0;
    auto obs = [&](const StepView& v) {
        Vector u = v.u.array() - v.t * r + shift.profile.array();
        if (v.step == 0) ustar = u[sys.last()] - (v.eta + shift.eta_offset);
        if (v.step >= 999 && v.step <= 1001) {
            us.push_back(u);
            uds.push_back(v.udot.array() - r);
        }
    };
    simulate(sys, PIController::from(m.control), SimState{Vector::Zero(sys.size()), udot0, 0.0, 0},
             SimulationOptions{dt, 1.0011, 100, false, false}, obs);
    ASSERT_EQ(us.size(), 3u);
    const DiscreteLyapunov L(sys, m.control.kp, ell, Vector::Constant(sys.size(), ustar));
    const double dV = (L.V(us[2], uds[2]) - L.V(us[0], uds[0])) / (2.0 * dt);
    Vector z(2 * sys.size());
    z << us[1].array() - ustar, uds[1];
    const double rate = -z.dot(forms.Q_D * z);
    EXPECT_LE(std::abs(dV - rate), 0.05 * std::abs(rate));
}

TEST(FitDecay, Synthetic) {
    std::vector<double> t, g;
    for (int k = 0; k < 100; ++k) {
        t.push_back(0.1 * k);
        g.push_back(2.0 * std::exp(-0.3 * t.back()));
    }
    const auto f = fit_decay(t, g);
    EXPECT_NEAR(f.rho, 0.3, 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_GE(f.M, 1.0);
    EXPECT_EQ(f.violation_fraction, 0.0);
}

TEST(FitDecay, ConstantAndErrors) {
    std::vector<double> t, g;
    for (int k = 0; k < 20; ++k) {
        t.push_back(k);
        g.push_back(3.0);
    }
    EXPECT_NEAR(fit_decay(t, g).rho, 0.0, 1e-15);
    std::vector<double> zeros(20, 0.0);
    EXPECT_THROW(fit_decay(t, zeros), std::invalid_argument);
    EXPECT_THROW(fit_decay(t, g, std::pair{0.0, 5.0}), std::invalid_argument);
    g[3] = 0.0;
    EXPECT_EQ(fit_decay(t, g).excluded, 1u);
}

TEST(FitDecay, Envelope) {
    EXPECT_EQ(suffix_max_envelope({1.0, 3.0, 2.0, 0.5}), (std::vector<double>{3.0, 3.0, 2.0, 0.5}));
}

TEST(FitDecay, SetTwoTrajectory) {
    const auto r = run(preset_config("2b")).report;
    ASSERT_TRUE(r.gamma_fit);
    EXPECT_GT(r.gamma_fit->rho, 0.0);
    EXPECT_GT(r.gamma_fit->r_squared, 0.9);
    EXPECT_LE(r.V_max_increase, 1e-6);
}

TEST(SupDeviation, Examples) {
    const auto f = make(30, VariantKind::W2W1);
    const auto rest = ContinuousState::from_nodal(Vector::Constant(31, 0.8), Vector::Zero(31), 0.0);
    EXPECT_EQ(sup_deviation(rest, f.g, f.p, 0.8).value, 0.0);
    std::mt19937_64 rng(10);
    for (int k = 0; k < 200; ++k) {
        const auto s = random_state(f.g, rng);
        const auto d = sup_deviation(s, f.g, f.p, 0.2);
        EXPECT_LE(d.value * d.value, d.bound + 1e-9);
    }
}

TEST(Monitor, ConservationAndMonotoneV) {
    auto c = preset_config("3b");
    c.T = 20.0;
    const auto r = run(c).report;
    ASSERT_TRUE(r.conservation_residual);
    EXPECT_LE(*r.conservation_residual, 1e-9);
    EXPECT_LE(r.V_max_increase, 1e-6);
}
