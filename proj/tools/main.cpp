// circlegas command line: experiments, limit laws, kernels and Kac zeros.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "circlegas/experiments.hpp"
#include "circlegas/kernels.hpp"

using namespace circlegas;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int threads = 1;
};

cplx parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("point '" + s + "': expected re,im");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("point '" + s + "': cannot parse");
    }
}

void print_result(const ExperimentResult& r) {
    std::printf("[%2d] %-20s %s  stat=%-12s tol=%-10s (%.1f s)\n", criterion(r.config.experiment),
                to_string(r.config.experiment).c_str(), r.pass ? "PASS" : "FAIL", format_double(r.ks).c_str(),
                format_double(r.config.tolerance).c_str(), r.wall_seconds);
    for (const auto& c : r.checks)
        if (!c.pass())
            std::printf("     check %s = %s, need %s %s\n", c.name.c_str(), format_double(c.value).c_str(),
                        c.at_most ? "<=" : ">=", format_double(c.bound).c_str());
    std::fflush(stdout);
}

ExperimentConfig build_config(const std::string& path, const std::string& experiment,
                              const std::vector<std::string>& overrides, const Globals& g) {
    std::vector<std::string> lines;
    if (!path.empty()) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config " + path);
        for (std::string l; std::getline(f, l);) lines.push_back(l);
    } else if (!experiment.empty()) {
        lines.push_back("experiment = " + experiment);
    } else {
        throw ConfigError("give --config or --experiment");
    }
    std::vector<std::string> extra = overrides;
    if (g.seed) extra.push_back("seed = " + std::to_string(*g.seed));
    if (g.out) extra.push_back("output_dir = " + *g.out);
    // command-line values replace the file's lines for the same key
    auto key_of = [](const std::string& l) {
        const auto k = l.substr(0, std::min(l.find('='), l.find('#')));
        const auto b = k.find_first_not_of(" \t"), e = k.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : k.substr(b, e - b + 1);
    };
    std::ostringstream text;
    for (const auto& l : lines) {
        const auto k = key_of(l);
        const bool replaced = !k.empty() && std::any_of(extra.begin(), extra.end(), [&](const auto& x) { return key_of(x) == k; });
        if (!replaced) text << l << '\n';
    }
    for (const auto& x : extra) text << x << '\n';
    std::istringstream in(text.str());
    return parse_config(in);
}

LimitLaw make_law(const std::string& name, double R, double chi, double alpha, double gamma, double lp, double lm,
                  double q, std::optional<double> qt) {
    if (name == "very_weak") return law::VeryWeak{R, chi};
    if (name == "annulus") return law::Annulus{R, chi};
    if (name == "finite_particles") return law::FiniteParticles{alpha, chi, gamma, lp, lm};
    if (name == "infinite_particles") return law::InfiniteParticles{alpha, chi, gamma};
    if (name == "gumbel_strong") return law::GumbelStrong{q, qt};
    if (name == "hard_exponential") return law::HardExponential{};
    if (name == "gumbel_weak") return law::GumbelWeak{chi};
    throw ConfigError("unknown law '" + name + "'");
}

LimitKernelSpec make_kernel(const std::string& name, double R, double chi, double alpha, double gamma, double lp,
                            double lm, double q, double Q, const std::vector<std::string>& intervals) {
    if (name == "B_R") return limit::BR{R, chi};
    if (name == "A_R") return limit::AR{R, chi};
    if (name == "F_alpha") return limit::F{alpha, chi, gamma, lp, lm};
    if (name == "I_alpha") return limit::I{alpha, chi, gamma};
    if (name == "G_alpha") return limit::G{alpha, chi, gamma, lp, lm};
    if (name == "G_alpha_inf") return limit::GInf{alpha, chi, gamma};
    if (name == "M_A") {
        limit::MA m;
        m.chi = chi;
        for (const auto& s : intervals) {
            const cplx p = parse_point(s);
            m.intervals.emplace_back(p.real(), p.imag());
        }
        return m;
    }
    if (name == "edge_hard") return limit::EdgeHard{};
    if (name == "edge_E") return limit::EdgeE{q, Q};
    if (name == "bergman_disk") return limit::BergmanDisk{};
    if (name == "bergman_halfplane") return limit::BergmanHalfplane{};
    if (name == "gaf_F") return limit::GafF{};
    throw ConfigError("unknown kernel '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial determinantal Coulomb gases and Kac polynomials: experiments and evaluators"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Base seed (overrides the config)");
    app.add_option("--out", g.out, "Output directory (overrides the config)");
    app.add_option("--threads", g.threads, "Worker threads for replica loops")->check(CLI::Range(1, 1024));

    // shared law / kernel parameters
    double R = 1.0, chi = 1.0, alpha = 3.0, gamma = 1.0, lp = 1.0, lm = 1.0, q = 2.0, Q = 1.0;
    std::optional<double> qt;
    auto add_params = [&](CLI::App* s) {
        s->add_option("--R", R);
        s->add_option("--chi", chi);
        s->add_option("--alpha", alpha);
        s->add_option("--gamma", gamma, "gamma (lambda for the G kernels)");
        s->add_option("--l-plus", lp);
        s->add_option("--l-minus", lm);
        s->add_option("--q", q);
    };

    std::string config_path, experiment;
    std::vector<std::string> overrides;
    auto* sample = app.add_subcommand("sample-max", "Sample rescaled maxima of a Coulomb gas and compare with the limit law");
    auto* run = app.add_subcommand("run", "Run any named experiment from a config");
    for (auto* s : {sample, run}) {
        s->add_option("--config", config_path, "key = value config file");
        s->add_option("--experiment", experiment, "Experiment name (acceptance defaults)");
        s->add_option("--set", overrides, "Extra 'key = value' lines");
    }
    bool print_config = false;
    run->add_flag("--print-config", print_config, "Print the validated config and exit");

    std::string law_name;
    std::vector<double> ts;
    double t_from = 0.0, t_to = 1.0;
    int t_points = 101;
    auto* lcdf = app.add_subcommand("limit-cdf", "Tabulate a limit law CDF: t,cdf,tail_bound");
    lcdf->add_option("--law", law_name)->required();
    add_params(lcdf);
    lcdf->add_option("--q-tilde", qt);
    lcdf->add_option("--t", ts, "Explicit evaluation points")->delimiter(',');
    lcdf->add_option("--from", t_from);
    lcdf->add_option("--to", t_to);
    lcdf->add_option("--points", t_points)->check(CLI::Range(2, 10000000));

    std::string kernel_name;
    std::vector<std::string> zs, ws, intervals;
    auto* keval = app.add_subcommand("kernel-eval", "Evaluate a limit kernel: re_z,im_z,re_w,im_w,re_K,im_K");
    keval->add_option("--kernel", kernel_name)->required();
    add_params(keval);
    keval->add_option("--Q", Q);
    keval->add_option("--interval", intervals, "a,b piece of A for M_A (repeatable)");
    keval->add_option("--z", zs, "re,im (repeatable)")->required();
    keval->add_option("--w", ws, "re,im (repeatable); defaults to the z list");

    int kn = 100, kreplicas = 100;
    double window = 5.0;
    std::string coeff_law = "complex_gaussian";
    auto* kac = app.add_subcommand("kac-zeros", "Zeros of Kac polynomials: per-replica CSV and rescaled point dump");
    kac->add_option("--n", kn, "Degree")->check(CLI::Range(1, 100000));
    kac->add_option("--replicas", kreplicas)->check(CLI::Range(1, 100000000));
    kac->add_option("--law", coeff_law, "complex_gaussian, uniform_disk_normalized or complex_rademacher");
    kac->add_option("--window", window, "Dump rescaled zeros n(z-1) with |.| below this");

    auto* edge = app.add_subcommand("edge-intensity", "Binned intensity of rescaled Kac zeros against the two edge densities");
    edge->add_option("--n", kn, "Degree")->check(CLI::Range(1, 100000));
    edge->add_option("--replicas", kreplicas)->check(CLI::Range(2, 100000000));
    edge->add_option("--law", coeff_law);

    std::string suite_name;
    auto* verify = app.add_subcommand("verify-all", "Run the acceptance suite; exit 0 iff every experiment passes");
    verify->add_option("suite", suite_name, "fast or full")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;  // usage errors share exit code 2
    }

    RunOptions opts;
    opts.threads = g.threads;
    try {
        if (*sample || *run) {
            const auto cfg = build_config(config_path, experiment, overrides, g);
            if (print_config) {
                std::fputs(format_config(cfg).c_str(), stdout);
                return 0;
            }
            if (*sample && cfg.experiment > Experiment::finite_particles)
                throw ConfigError("sample-max runs the maxima experiments only; use run for " + to_string(cfg.experiment));
            const auto r = run_experiment(cfg, opts);
            print_result(r);
            return r.pass ? 0 : 1;
        }
        if (*lcdf) {
            const LimitLaw law = make_law(law_name, R, chi, alpha, gamma, lp, lm, q, qt);
            validate(law);
            if (ts.empty())
                for (int i = 0; i < t_points; ++i) ts.push_back(t_from + (t_to - t_from) * i / (t_points - 1));
            std::cout << "t,cdf,tail_bound\n";
            for (double t : ts) {
                const auto v = cdf_max_detail(law, t);
                std::cout << format_double(t) << ',' << format_double(v.value) << ',' << format_double(v.tail_bound) << '\n';
            }
            return 0;
        }
        if (*keval) {
            const auto spec = make_kernel(kernel_name, R, chi, alpha, gamma, lp, lm, q, Q, intervals);
            validate(spec);
            if (ws.empty()) ws = zs;
            std::cout << "re_z,im_z,re_w,im_w,re_K,im_K\n";
            for (const auto& zs_ : zs)
                for (const auto& ws_ : ws) {
                    const cplx z = parse_point(zs_), w = parse_point(ws_);
                    const cplx K = eval_limit_kernel(spec, z, w);
                    std::cout << format_double(z.real()) << ',' << format_double(z.imag()) << ',' << format_double(w.real())
                              << ',' << format_double(w.imag()) << ',' << format_double(K.real()) << ','
                              << format_double(K.imag()) << '\n';
                }
            return 0;
        }
        if (*kac) {
            const auto law = parse_coefficient_law(coeff_law);
            const std::uint64_t seed = g.seed.value_or(1);
            const fs::path dir = fs::path(g.out.value_or("out")) / "kac_zeros";
            fs::create_directories(dir);
            const auto M = static_cast<std::size_t>(kreplicas);
            std::vector<RootSet> sets(M);
            parallel_for(M, g.threads, [&](std::size_t i) {
                Stream s(seed, i, StreamRole::kac_coefficients);
                sets[i] = find_roots(sample_polynomial(kn, law, s));
            });
            std::vector<std::vector<double>> per, pts;
            for (std::size_t i = 0; i < M; ++i) {
                const auto io = split_inner_outer(sets[i]);
                per.push_back({double(i), double(sets[i].roots.size()), double(io.inner.size()),
                               double(io.outer_inverted.size()), double(io.near_circle), sets[i].max_residual(),
                               double(sets[i].iterations)});
                for (const cplx z : rescale_near_one(sets[i], kn))
                    if (std::abs(z) < window) pts.push_back({double(i), z.real(), z.imag()});
            }
            write_csv(dir / "replicas.csv",
                      {"replica", "roots", "inner", "outer", "near_circle", "max_residual", "iterations"}, per);
            write_csv(dir / "points.csv", {"replica", "re", "im"}, pts);
            std::printf("wrote %zu replicas, %zu rescaled zeros to %s\n", M, pts.size(), dir.string().c_str());
            return 0;
        }
        if (*edge) {
            auto cfg = default_config(Experiment::edge_distinction);
            cfg.n = kn;
            cfg.replicas = kreplicas;
            cfg.coefficients = parse_coefficient_law(coeff_law);
            if (g.seed) cfg.seed = *g.seed;
            if (g.out) cfg.output_dir = *g.out;
            const auto r = run_experiment(cfg, opts);
            for (const auto& [k, v] : r.diagnostics) std::printf("%s = %s\n", k.c_str(), format_double(v).c_str());
            print_result(r);
            return r.pass ? 0 : 1;
        }
        if (*verify) {
            const Suite suite = parse_suite(suite_name);
            const fs::path dir = g.out.value_or("out/verify_" + to_string(suite));
            const auto rep = verify_all(suite, dir, opts, print_result);
            std::printf("suite %s: %s (%.1f s), report %s\n", to_string(suite).c_str(), rep.pass() ? "PASS" : "FAIL",
                        rep.wall_seconds, (dir / "report.json").string().c_str());
            return rep.pass() ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
