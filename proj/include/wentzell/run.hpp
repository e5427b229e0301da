#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wentzell/config.hpp"
#include "wentzell/discretize.hpp"
#include "wentzell/integrate.hpp"
#include "wentzell/lyapunov.hpp"
#include "wentzell/random_fields.hpp"
#include "wentzell/wellposed.hpp"

namespace wentzell {

struct RunFlags {
    bool certify = false;
    bool resolvent_check = false;
};

struct ResolventCheck {
    std::size_t N = 0;
    double constant_case_error = 0.0;
    double residual = 0.0;
    double fixed_point_defect = 0.0;
    double min_pairing = 0.0;
    double max_pairing_mismatch = 0.0;
};

struct RunReport {
    json config;
    std::string variant;
    double dt = 0.0;
    double T = 0.0;
    std::size_t steps = 0;
    double ell = 0.0;
    double u_star = 0.0;
    std::optional<DecayFit> gamma_fit;
    std::optional<DecayFit> sup_dev_fit;
    std::optional<CertificationReport> certification;
    std::string certification_error;
    /// max |u_N - eta2 - u_star| / max(1, |u_star|), integrator variants only.
    std::optional<double> conservation_residual;
    double final_y = 0.0;
    double final_y_error = 0.0;
    /// max_t |H(t) - H(0)| / H(0), H = 1/2 udot^T E udot + 1/2 u^T K u.
    double energy_drift = 0.0;
    /// Least-squares slope of H(t) over the samples, divided by H(0).
    double energy_slope = 0.0;
    double V0 = 0.0;
    /// max_k (V[k+1] - V[k]) / V(0).
    double V_max_increase = 0.0;
    std::size_t V_increase_count = 0;
    std::optional<ResolventCheck> resolvent;
    /// Not serialized, so that reports are reproducible.
    double wall_clock_seconds = 0.0;
};

struct RunResult {
    RunConfig config;
    ResolvedModel model;
    DiscreteSystem system;
    Trajectory trajectory;
    RunReport report;
};

/// Initial nodal state of a config in the local coordinates of `sys`.
inline SimState initial_state(const RunConfig& c, const DiscreteSystem& sys) {
    const auto nodes = sys.grid.nodes();
    Vector u = detail::nodal(c.initial.u, nodes, "initial.u");
    Vector udot = detail::nodal(c.initial.udot, nodes, "initial.udot");
    if (c.initial.udot_at_1) udot[nodes - 1] = *c.initial.udot_at_1;
    if (sys.variant.dirichlet_at_zero() && (u[0] != 0.0 || udot[0] != 0.0)) {
        throw ConfigError("initial.u", "Dirichlet variants need u(0) = udot(0) = 0");
    }
    return {sys.to_local(u), sys.to_local(udot), 0.0, 0};
}

/// Explicit ell, else choose_ell where its hypotheses hold, else 0.
inline double resolve_ell(const RunConfig& c, const ResolvedModel& m) {
    if (c.ell) return *c.ell;
    const auto& v = m.variant;
    const bool usable = m.params.q_lower > 0.0 && v.alpha1 > 0.0 &&
                        (!v.dynamic_at_zero() || v.gamma1 > 0.0);
    return usable ? choose_ell(m.params, v) : 0.0;
}

inline ResolventCheck resolvent_check(const ResolvedModel& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Grid& g = m.grid;
    const PhysicalParams& p = m.params;
    ResolventCheck rc;
    rc.N = g.intervals();

    const double c = 0.75;
    GeneratorInput yc{Vector::Constant(g.nodes(), c), Vector::Constant(g.nodes(), c), 0.0, 1.5, 0.0};
    const auto zc = resolvent_solve(yc, p, g);
    rc.constant_case_error = std::max({(zc.z1.array() - c).abs().maxCoeff(), zc.z2.cwiseAbs().maxCoeff(),
                                       std::abs(zc.z3), std::abs(zc.z4 - 1.5), std::abs(zc.z5)});

    GeneratorInput y{random_smooth_field(g, rng), random_smooth_field(g, rng), 0.3, -0.2, 0.1};
    const auto z = resolvent_solve(y, p, g);
    rc.residual = resolvent_residual(z, y, p, g);
    rc.fixed_point_defect = fixed_point_defect(z, y, p, g);

    rc.min_pairing = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        GeneratorOutput s;
        s.z1 = random_smooth_field(g, rng);
        s.z2 = random_smooth_field(g, rng);
        s.z3 = s.z2[g.n()];
        s.z4 = random_vector(1, rng)[0];
        s.z5 = s.z2[0];
        const auto pr = monotonicity_pairing(with_traces(s, g), p, g);
        rc.min_pairing = std::min(rc.min_pairing, pr.pairing);
        rc.max_pairing_mismatch = std::max(rc.max_pairing_mismatch,
                                           std::abs(pr.pairing - pr.reference) / (1.0 + pr.reference));
    }
    return rc;
}

namespace detail {

inline std::optional<DecayFit> envelope_fit(const std::vector<double>& t, const std::vector<double>& v) {
    try {
        return fit_decay(t, suffix_max_envelope(v));
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

inline double slope(const std::vector<double>& t, const std::vector<double>& v) {
    const double n = static_cast<double>(t.size());
    if (t.size() < 2) return 0.0;
    double tm = 0.0, vm = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        tm += t[k];
        vm += v[k];
    }
    tm /= n;
    vm /= n;
    double stt = 0.0, stv = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        stv += (t[k] - tm) * (v[k] - vm);
    }
    return stt > 0.0 ? stv / stt : 0.0;
}

}  // namespace detail

/// Simulates a config, evaluates the functionals and optionally certifies.
inline RunResult run(const RunConfig& config, const RunFlags& flags = {}) {
    const auto started = std::chrono::steady_clock::now();
    RunResult res;
    res.config = config;
    res.model = resolve_model(config);
    const auto& m = res.model;
    res.system = build_system(m.grid, m.params, m.variant);
    const auto& sys = res.system;

    const double dt = config.dt ? *config.dt : auto_dt(m.grid, m.params);
    const double T = config.resolved_T();
    const double ell = resolve_ell(config, m);

    std::optional<PIController> ctrl;
    if (!config.open_loop() || config.initial.eta != 0.0) {
        PIController pc = PIController::from(m.control);
        pc.eta = config.initial.eta;
        pc.saturation = config.saturation;
        ctrl = pc;
    }

    FunctionalMonitor monitor(sys, m.params, m.control, ell);
    double H0 = 0.0, max_dev = 0.0;
    std::vector<double> h_t, h_v;
    auto observer = [&](const StepView& v) {
        monitor(v);
        const double H = 0.5 * v.udot.dot(sys.E.cwiseProduct(v.udot)) + 0.5 * sys.K.bilinear(v.u, v.u);
        if (v.step == 0) H0 = H;
        max_dev = std::max(max_dev, std::abs(H - H0));
        if (v.sampled) {
            h_t.push_back(v.t);
            h_v.push_back(H);
        }
    };

    SimulationOptions opt;
    opt.dt = dt;
    opt.t_end = T;
    opt.sample_stride = config.sample_stride;
    opt.record_displacement = config.trajectory_displacement;
    opt.record_velocity = !config.trajectory_displacement;
    res.trajectory = simulate(sys, ctrl, initial_state(config, sys), opt, observer);
    res.trajectory.functional_series = monitor.samples();

    auto& r = res.report;
    r.config = to_json(config);
    r.variant = std::string(to_string(m.variant.kind));
    r.dt = dt;
    r.T = T;
    r.steps = res.trajectory.steps;
    r.ell = ell;
    r.u_star = monitor.u_star();
    const auto& fs = res.trajectory.functional_series;
    std::vector<double> t, gam, dev;
    for (const auto& s : fs) {
        t.push_back(s.t);
        gam.push_back(s.Gamma);
        dev.push_back(s.sup_dev);
    }
    r.gamma_fit = detail::envelope_fit(t, gam);
    r.sup_dev_fit = detail::envelope_fit(t, dev);
    if (m.variant.has_integrator()) {
        r.conservation_residual = monitor.conservation_residual() / std::max(1.0, std::abs(r.u_star));
    }
    r.final_y = res.trajectory.y_series.back();
    r.final_y_error = std::abs(r.final_y - m.control.v1_ref);
    r.energy_drift = H0 > 0.0 ? max_dev / H0 : max_dev;
    r.energy_slope = H0 > 0.0 ? detail::slope(h_t, h_v) / H0 : detail::slope(h_t, h_v);
    r.V0 = monitor.V0();
    r.V_max_increase = r.V0 > 0.0 ? monitor.max_increase() / r.V0 : monitor.max_increase();
    r.V_increase_count = monitor.increase_count();

    if (flags.certify) {
        try {
            const double cell = config.ell ? *config.ell : choose_ell(m.params, m.variant);
            r.certification = certify(sys, m.params, m.variant, cell);
        } catch (const std::exception& e) {
            r.certification_error = e.what();
        }
    }
    if (flags.resolvent_check) r.resolvent = resolvent_check(m, config.seed);
    r.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

inline json to_json(const DecayFit& f) {
    return {{"M", f.M},           {"rho", f.rho},   {"r_squared", f.r_squared},
            {"t_start", f.t_start}, {"t_end", f.t_end}, {"samples", f.used},
            {"excluded", f.excluded}, {"violation_fraction", f.violation_fraction}};
}

inline json to_json(const CertificationReport& c) {
    return {{"ell", c.ell},
            {"c", c.c},
            {"C", c.C},
            {"rho_formal", std::isfinite(c.rho_formal) ? json(c.rho_formal) : json(nullptr)},
            {"variant", std::string(to_string(c.variant.kind))},
            {"N_used", c.N_used},
            {"success", c.success()}};
}

inline json to_json(const RunReport& r) {
    json j;
    j["config"] = r.config;
    j["variant"] = r.variant;
    j["dt"] = r.dt;
    j["T"] = r.T;
    j["steps"] = r.steps;
    j["ell"] = r.ell;
    j["u_star"] = r.u_star;
    j["decay_fit"] = r.gamma_fit ? to_json(*r.gamma_fit) : json(nullptr);
    j["sup_dev_fit"] = r.sup_dev_fit ? to_json(*r.sup_dev_fit) : json(nullptr);
    if (r.certification) j["certification"] = to_json(*r.certification);
    if (!r.certification_error.empty()) j["certification_error"] = r.certification_error;
    j["conservation_residual"] =
        r.conservation_residual ? json(*r.conservation_residual) : json(nullptr);
    j["final_y"] = r.final_y;
    j["final_y_error"] = r.final_y_error;
    j["energy_drift"] = r.energy_drift;
    j["energy_slope"] = r.energy_slope;
    j["V0"] = r.V0;
    j["V_max_increase"] = r.V_max_increase;
    j["V_increase_count"] = r.V_increase_count;
    if (r.resolvent) {
        const auto& c = *r.resolvent;
        j["resolvent_check"] = {{"N", c.N},
                                {"constant_case_error", c.constant_case_error},
                                {"residual", c.residual},
                                {"fixed_point_defect", c.fixed_point_defect},
                                {"min_pairing", c.min_pairing},
                                {"max_pairing_mismatch", c.max_pairing_mismatch}};
    }
    return j;
}

/// t, node_0 .. node_N; velocities unless the config asks for displacements.
inline void write_trajectory_csv(std::ostream& os, const RunResult& res) {
    const auto& tr = res.trajectory;
    const auto& rows = res.config.trajectory_displacement ? tr.u_samples : tr.udot_samples;
    os << std::setprecision(17) << 't';
    for (Eigen::Index i = 0; i < res.system.grid.nodes(); ++i) os << ",node_" << i;
    os << '\n';
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Vector full = res.system.to_full(rows[k]);
        os << tr.sample_times[k];
        for (Eigen::Index i = 0; i < full.size(); ++i) os << ',' << full[i];
        os << '\n';
    }
}

inline void write_functionals_csv(std::ostream& os, const RunResult& res) {
    const auto& tr = res.trajectory;
    os << std::setprecision(17) << "t,E_u,F,W,V,Gamma,sup_dev,y,U,eta\n";
    for (std::size_t k = 0; k < tr.functional_series.size(); ++k) {
        const auto& s = tr.functional_series[k];
        os << s.t << ',' << s.E_u << ',' << s.F << ',' << s.W << ',' << s.V << ',' << s.Gamma << ','
           << s.sup_dev << ',' << tr.y_series[k] << ',' << tr.U_series[k] << ',' << tr.eta_series[k]
           << '\n';
    }
}

/// Writes trajectory.csv, functionals.csv and report.json into `dir`.
inline void write_outputs(const RunResult& res, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("trajectory.csv");
        write_trajectory_csv(f, res);
    }
    {
        auto f = open("functionals.csv");
        write_functionals_csv(f, res);
    }
    {
        auto f = open("report.json");
        f << to_json(res.report).dump(2) << '\n';
    }
}

/// certify over ell = a, ..., b (n evenly spaced values).
inline std::vector<CertificationReport> sweep_ell(const RunConfig& config, double a, double b,
                                                  std::size_t n) {
    if (n == 0) throw std::invalid_argument("sweep: need at least one ell value");
    const auto m = resolve_model(config);
    const auto sys = build_system(m.grid, m.params, m.variant);
    std::vector<CertificationReport> out;
    for (std::size_t k = 0; k < n; ++k) {
        const double ell = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
        out.push_back(certify(sys, m.params, m.variant, ell));
    }
    return out;
}

}  // namespace wentzell
