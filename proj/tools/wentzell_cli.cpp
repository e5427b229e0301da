// Command-line driver: simulate presets or config files, certify, sweep ell, spectra.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "wentzell/wentzell.hpp"

namespace {

using namespace wentzell;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDivergence = 3;
constexpr int kCertificationFailure = 4;

std::filesystem::path output_dir(const std::string& flag, const RunConfig& c, const std::string& name) {
    if (!flag.empty()) return flag;
    if (c.output_dir) return *c.output_dir;
    if (const char* env = std::getenv("WENTZELL_OUT_DIR")) return std::filesystem::path(env) / name;
    return std::filesystem::path("wentzell_out") / name;
}

std::string run_name(const std::string& spec, const RunConfig& c) {
    return c.preset.empty() || c.preset != spec ? std::filesystem::path(spec).stem().string() : c.preset;
}

void print_summary(std::ostream& os, const RunReport& r) {
    os << "variant " << r.variant << ", dt " << r.dt << ", T " << r.T << ", steps " << r.steps << '\n';
    os << "final y " << r.final_y << " (|y - y_ref| = " << r.final_y_error << ")\n";
    os << "energy drift " << r.energy_drift << ", V max increase " << r.V_max_increase << '\n';
    if (r.conservation_residual) os << "conservation residual " << *r.conservation_residual << '\n';
    if (r.gamma_fit) {
        os << "Gamma decay rho " << r.gamma_fit->rho << " (r^2 " << r.gamma_fit->r_squared << ")\n";
    }
    if (r.certification) {
        const auto& c = *r.certification;
        os << "certification ell " << c.ell << ": c " << c.c << ", C " << c.C << ", rho " << c.rho_formal
           << '\n';
    }
    if (!r.certification_error.empty()) os << "certification failed: " << r.certification_error << '\n';
    os << "wall clock " << r.wall_clock_seconds << " s\n";
}

int run_one(const std::string& spec, const RunFlags& flags, const std::string& out_flag,
            std::ostream& os) {
    try {
        const RunConfig c = resolve_config(spec);
        const auto res = run(c, flags);
        const auto dir = output_dir(out_flag, c, run_name(spec, c));
        write_outputs(res, dir);
        os << spec << " -> " << dir.string() << '\n';
        print_summary(os, res.report);
        if (flags.certify && (!res.report.certification || !res.report.certification->success())) {
            return kCertificationFailure;
        }
        return kOk;
    } catch (const ConfigError& e) {
        os << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DivergenceError& e) {
        os << "divergence: " << e.what() << " (last valid time " << e.last_valid_time() << ")\n";
        return kDivergence;
    } catch (const HypothesisError& e) {
        os << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

int spectrum_cmd(const std::string& spec, const std::string& out_flag) {
    try {
        const RunConfig c = resolve_config(spec);
        const auto m = resolve_model(c);
        const auto sys = build_system(m.grid, m.params, m.variant);
        const auto s = spectrum(sys);
        std::size_t zeros = 0;
        for (Eigen::Index i = 0; i < s.generalized.size(); ++i) {
            if (std::abs(s.generalized[i]) <= 1e-10) ++zeros;
        }
        std::cout << "nodes " << sys.size() << ", max |Re| " << s.max_abs_real_part() << ", max Re "
                  << s.max_real_part() << ", lambda_min " << s.generalized.minCoeff()
                  << ", zero eigenvalues " << zeros << '\n';
        const auto dir = output_dir(out_flag, c, run_name(spec, c));
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "spectrum.csv");
        f << std::setprecision(17) << "re,im\n";
        for (const auto& z : s.eigenvalues) f << z.real() << ',' << z.imag() << '\n';
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
}

int sweep_cmd(const std::string& spec, const std::string& range) {
    double a = 0.0, b = 0.0;
    std::size_t n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(range);
    if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n == 0) {
        std::cerr << "config error: --ell expects a:b:n\n";
        return kConfigError;
    }
    try {
        const auto rows = sweep_ell(resolve_config(spec), a, b, n);
        std::cout << std::setprecision(10) << "ell,c,C,rho_formal\n";
        bool ok = true;
        for (const auto& r : rows) {
            std::cout << r.ell << ',' << r.c << ',' << r.C << ',' << r.rho_formal << '\n';
            ok = ok && r.success();
        }
        return ok ? kOk : kCertificationFailure;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const HypothesisError& e) {
        std::cerr << "certification unavailable: " << e.what() << '\n';
        return kCertificationFailure;
    } catch (const CertificationError& e) {
        std::cerr << "certification failed: " << e.what() << '\n';
        return kCertificationFailure;
    }
}

int batch_cmd(std::vector<std::string> specs, const RunFlags& flags, const std::string& out_flag) {
    if (specs.empty()) specs = preset_names();
    std::vector<int> codes(specs.size(), kOk);
    std::vector<std::ostringstream> logs(specs.size());
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        workers.emplace_back([&, k] {
            const std::string out = out_flag.empty() ? "" : (std::filesystem::path(out_flag) / specs[k]).string();
            codes[k] = run_one(specs[k], flags, out, logs[k]);
        });
    }
    for (auto& w : workers) w.join();
    int worst = kOk;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        std::cout << logs[k].str();
        worst = std::max(worst, codes[k]);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped wave equation with Wentzell boundary conditions and PI regulation"};
    app.require_subcommand(1);

    std::string spec, out, ell_range;
    std::vector<std::string> batch_specs;
    RunFlags flags;

    auto* run_cmd = app.add_subcommand("run", "Simulate a preset (1a..3c) or a JSON config file");
    run_cmd->add_option("config", spec, "Preset name or config path")->required();
    run_cmd->add_flag("--certify", flags.certify, "Certify the Lyapunov constants");
    run_cmd->add_flag("--resolvent-check", flags.resolvent_check, "Run the generator checks");
    run_cmd->add_option("--out", out, "Output directory");

    auto* presets_cmd = app.add_subcommand("presets", "List the built-in presets as JSON");

    auto* sweep = app.add_subcommand("sweep", "Certification constants over a range of ell");
    sweep->add_option("config", spec, "Preset name or config path")->default_val("3b");
    sweep->add_option("--ell", ell_range, "Range a:b:n")->required();

    auto* spec_cmd = app.add_subcommand("spectrum", "Eigenvalues of the semi-discrete system");
    spec_cmd->add_option("config", spec, "Preset name or config path")->required();
    spec_cmd->add_option("--out", out, "Output directory");

    auto* batch = app.add_subcommand("batch", "Run several presets/configs concurrently");
    batch->add_option("configs", batch_specs, "Presets or config paths (default: all presets)");
    batch->add_flag("--certify", flags.certify, "Certify the Lyapunov constants");
    batch->add_flag("--resolvent-check", flags.resolvent_check, "Run the generator checks");
    batch->add_option("--out", out, "Parent output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigError;
    }

    if (run_cmd->parsed()) return run_one(spec, flags, out, std::cout);
    if (presets_cmd->parsed()) {
        json all = json::object();
        for (const auto& c : presets()) all[c.preset] = to_json(c);
        std::cout << all.dump(2) << '\n';
        return kOk;
    }
    if (sweep->parsed()) return sweep_cmd(spec, ell_range);
    if (spec_cmd->parsed()) return spectrum_cmd(spec, out);
    if (batch->parsed()) return batch_cmd(batch_specs, flags, out);
    return kOk;
}
