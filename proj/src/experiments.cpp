#include "circlegas/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "circlegas/kernels.hpp"
#include "circlegas/nonradial.hpp"
#include "circlegas/stats.hpp"

namespace circlegas {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

struct Entry {
    Experiment e;
    const char* name;
    bool monte_carlo;
};

constexpr Entry kTable[] = {
    {Experiment::hard_exponential, "hard_exponential", true},
    {Experiment::gumbel_linear, "gumbel_linear", true},
    {Experiment::very_weak, "very_weak", true},
    {Experiment::annulus_law, "annulus", true},
    {Experiment::finite_particles, "finite_particles", true},
    {Experiment::hard_kernel, "hard_kernel", false},
    {Experiment::gaf_covariance, "gaf_covariance", false},
    {Experiment::edge_bergman, "edge_bergman", false},
    {Experiment::edge_distinction, "edge_distinction", true},
    {Experiment::kac_independence, "kac_independence", true},
    {Experiment::coulomb_cross_decay, "coulomb_cross_decay", false},
    {Experiment::inversion, "inversion", false},
    {Experiment::gumbel_weak, "gumbel_weak", false},
    {Experiment::nonradial_edge, "nonradial_edge", false},
};

const Entry& entry(Experiment e) {
    for (const auto& t : kTable)
        if (t.e == e) return t;
    throw std::logic_error("experiment table incomplete");
}

// Height 5 on the disk |z - 0.2| < 0.3; V vanishes on 0.5 <= |z| <= 1.
const std::vector<DiskBump> kBump{{{0.2, 0.0}, 0.3, 5.0}};
constexpr double kBumpOuter = 0.5;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T x{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: key '" + key + "': cannot parse '" + v + "'");
    return x;
}

void hypothesis(bool ok, const std::string& name, const std::string& detail = {}) {
    if (!ok) throw ConfigError("hypothesis violated: " + name + (detail.empty() ? "" : " (" + detail + ")"));
}

void require_circle(const RadialPotential& V) {
    std::vector<double> grid;
    for (double r = 0.0; r <= 10.0; r += 1.0 / 256) grid.push_back(r);
    for (double r = 10.0; r < 1e6; r *= 1.1) grid.push_back(r);
    const auto rep = check_circle_conditions(V, grid);
    if (!rep.pass) {
        const auto& v = rep.violations.front();
        hypothesis(false, "circle conditions", v.what + " at r = " + format_double(v.r));
    }
}

// Remaining hypotheses of the finite-particle theorem, checked numerically.
void require_finite_particle_hypotheses(const RadialPotential& V, double alpha, double gamma, double lp, double lm) {
    // beyond r = 1e3 the difference V - log r falls below the resolution of log r
    for (double r = 1.0 + 1.0 / 1024; r <= 1e3; r *= 1.01)
        hypothesis(V(r).raw() > std::log(r), "V(r) > log r for r >= 1", "r = " + format_double(r));
    const double big = 1e3;
    const double g = std::pow(big, alpha) * (V(big).raw() - std::log(big));
    hypothesis(std::abs(g - gamma) <= 1e-2 * gamma, "r^alpha (V - log r) -> gamma", "got " + format_double(g));
    const double h = 1e-7;
    const double right = V(1.0 + h).raw() / h, left = V(1.0 - h).raw() / h;
    hypothesis(std::abs(right - (lp + 1.0)) <= 1e-4 * (lp + 1.0), "V(r)/(r-1) -> L+ + 1 as r -> 1+",
               "got " + format_double(right));
    hypothesis(std::abs(left - (lm - 1.0)) <= 1e-4 * lm, "V(r)/(1-r) -> L- - 1 as r -> 1-", "got " + format_double(left));
}

std::vector<cplx> disk_lattice(double r, double step) {
    std::vector<cplx> out;
    const int m = static_cast<int>(std::floor(r / step + 1e-9));
    for (int i = -m; i <= m; ++i)
        for (int j = -m; j <= m; ++j) {
            const cplx z{i * step, j * step};
            if (std::abs(z) <= r + 1e-12) out.push_back(z);
        }
    return out;
}

// sum_k c_k x^k by Horner in split real arithmetic (no complex-multiply NaN handling).
cplx horner_real(const std::vector<double>& c, cplx x) {
    double pr = 0.0, pi_ = 0.0;
    const double xr = x.real(), xi = x.imag();
    for (std::size_t k = c.size(); k-- > 0;) {
        const double t = pr * xr - pi_ * xi + c[k];
        pi_ = pr * xi + pi_ * xr;
        pr = t;
    }
    return {pr, pi_};
}

double max_successive_ratio(const std::vector<double>& v) {
    double r = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) r = std::max(r, v[i] / v[i - 1]);
    return r;
}

ExperimentResult start(const ExperimentConfig& c) {
    ExperimentResult r;
    r.config = c;
    return r;
}

// ------------------------------------------------------------ extremes of Coulomb gases

ExperimentResult run_extremes(const ExperimentConfig& c, const RunOptions& o) {
    auto r = start(c);
    const KostlanSampler sampler(experiment_gas(c));
    const auto M = static_cast<std::size_t>(c.replicas);
    r.raw_extremes.assign(M, 0.0);
    parallel_for(M, o.threads, [&](std::size_t i) { r.raw_extremes[i] = sampler.sample(c.seed, i).max(); });
    const auto scheme = experiment_rescale(c);
    const auto params = experiment_rescale_params(c);
    for (double x : r.raw_extremes) r.rescaled.push_back(rescale_extreme(x, scheme, params));

    const LimitLaw law = experiment_law(c);
    const auto [lo, hi] = support(law);
    double tail = 0.0;
    auto F = [&](double t) {
        if (t < lo || t > hi) return cdf_max_extended(law, t);
        const auto v = cdf_max_detail(law, t);
        tail = std::max(tail, v.tail_bound);
        return v.value;
    };
    const Ecdf E(r.rescaled);
    r.ks = ks_statistic(E, F);
    r.tail_bound = tail;
    r.checks.push_back({"ks", r.ks, c.tolerance});
    r.diagnostics.emplace_back("dkw_eps_0.001", dkw_epsilon(M, 1e-3));
    r.diagnostics.emplace_back("outside_support",
                               static_cast<double>(std::count_if(r.rescaled.begin(), r.rescaled.end(),
                                                                 [&](double t) { return t < lo || t > hi; })));
    if (c.experiment == Experiment::gumbel_linear) r.diagnostics.emplace_back("eps_n", params.eps);
    // distance to the exact finite-n law separates sampling error from the distance to the limit
    r.diagnostics.emplace_back("ks_vs_finite_n_law",
                               ks_statistic(Ecdf(r.raw_extremes), [&](double x) { return sampler.max_cdf(x); }));

    Table samples{"samples.csv", {"replica", "raw_extreme", "rescaled"}, {}, {}};
    for (std::size_t i = 0; i < M; ++i) samples.rows.push_back({double(i), r.raw_extremes[i], r.rescaled[i]});
    r.tables.push_back(std::move(samples));

    // ECDF against the limit on a grid spanning the bulk of the sample
    const auto& s = E.sorted();
    const double a = s[static_cast<std::size_t>(0.001 * double(M - 1))];
    const double b = s[static_cast<std::size_t>(0.999 * double(M - 1))];
    Table overlay{"limit_cdf.csv", {"t", "ecdf", "limit_cdf"}, {}, "ecdf_overlay"};
    for (int i = 0; i <= 200; ++i) {
        const double t = a + (b - a) * i / 200.0;
        overlay.rows.push_back({t, E(t), cdf_max_extended(law, t)});
    }
    r.tables.push_back(std::move(overlay));
    return r;
}

// ------------------------------------------------------------ deterministic kernel limits

// sup over lattice pairs of |(pi/m^2) K_m(1 - a/m, 1 - b/m) - f(a + conj b)|, polynomial part of the kernel.
std::pair<double, double> hard_kernel_error(int m) {
    const GasSpec spec(m, 1.0, hard_edge_flat());
    const auto logc = radial_coefficients(spec);
    std::vector<double> c(logc.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::exp(logc[k]) * pi / (double(m) * m);
    const auto grid = disk_lattice(3.0, 0.25);
    double worst = 0.0, worst_rel = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {  // the (j, i) error is the same
            const cplx a = grid[i], b = grid[j];
            const cplx x = (1.0 - a / double(m)) * std::conj(1.0 - b / double(m));
            const cplx lim = limit_edge_kernel_hard(a + std::conj(b));
            const double e = std::abs(horner_real(c, x) - lim);
            worst = std::max(worst, e);
            worst_rel = std::max(worst_rel, e / std::abs(lim));
        }
    return {worst, worst_rel};
}

ExperimentResult run_hard_kernel(const ExperimentConfig& c) {
    auto r = start(c);
    Table t{"errors.csv", {"n", "sup_abs_error", "sup_rel_error"}, {}, "error_curve"};
    std::vector<double> errs;
    for (int d : {8, 4, 2, 1}) {
        const int m = c.n / d;
        const auto [e, rel] = hard_kernel_error(m);
        errs.push_back(e);
        t.rows.push_back({double(m), e, rel});
    }
    r.ks = errs.back();
    r.checks.push_back({"sup_abs_error", r.ks, c.tolerance});
    r.checks.push_back({"max_successive_ratio", max_successive_ratio(errs), 1.0});
    r.diagnostics.emplace_back("sup_rel_error", t.rows.back()[2]);
    r.tables.push_back(std::move(t));
    return r;
}

std::pair<double, double> gaf_covariance_error(int m) {
    const std::vector<double> c(static_cast<std::size_t>(m) + 1, 1.0 / m);
    const auto grid = disk_lattice(3.0, 0.25);
    double worst = 0.0, worst_rel = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const cplx z = grid[i], w = grid[j];
            const cplx x = (1.0 + z / double(m)) * std::conj(1.0 + w / double(m));
            const cplx lim = gaf_covariance(z, w);
            const double e = std::abs(horner_real(c, x) - lim);
            worst = std::max(worst, e);
            worst_rel = std::max(worst_rel, e / std::abs(lim));
        }
    return {worst, worst_rel};
}

ExperimentResult run_gaf_covariance(const ExperimentConfig& c) {
    auto r = start(c);
    Table t{"errors.csv", {"n", "sup_abs_error", "sup_rel_error"}, {}, "error_curve"};
    for (int d : {8, 4, 2, 1}) {
        const auto [e, rel] = gaf_covariance_error(c.n / d);
        t.rows.push_back({double(c.n / d), e, rel});
    }
    r.ks = t.rows.back()[1];
    r.checks.push_back({"sup_abs_error", r.ks, c.tolerance});
    r.diagnostics.emplace_back("sup_rel_error", t.rows.back()[2]);
    r.tables.push_back(std::move(t));
    return r;
}

double edge_bergman_error(int m, double q) {
    std::vector<cplx> grid;
    for (int i = 0; i <= 10; ++i)
        for (int j = -2; j <= 2; ++j) grid.emplace_back(-3.0 + 0.25 * i, 0.5 * j);
    double worst = 0.0;
    const double mm = m;
    for (const cplx z : grid)
        for (const cplx w : grid) {
            const cplx v = mm * mm * limit_edge_kernel_E(q, 1.0, mm * z, mm * w);
            worst = std::max(worst, std::abs(v - eval_limit_kernel(limit::BergmanHalfplane{}, z, w)));
        }
    return worst;
}

ExperimentResult run_edge_bergman(const ExperimentConfig& c) {
    auto r = start(c);
    Table t{"errors.csv", {"n", "sup_abs_error"}, {}, "error_curve"};
    for (int d : {4, 2, 1}) t.rows.push_back({double(c.n / d), edge_bergman_error(c.n / d, c.q)});
    r.ks = t.rows.back()[1] / t.rows.front()[1];
    r.checks.push_back({"error_ratio_n_over_n/4", r.ks, c.tolerance});
    r.diagnostics.emplace_back("sup_abs_error", t.rows.back()[1]);
    r.tables.push_back(std::move(t));
    return r;
}

double cross_block_sup(int m, double radius) {
    const auto spec = circle_log_inner_outer(m);
    const auto grid = disk_lattice(radius, 0.1);
    double worst = 0.0;
    for (const cplx z : grid)
        for (const cplx w : grid) worst = std::max(worst, std::abs(inner_outer_blocks(spec, z, w, Block::IO)));
    return worst;
}

ExperimentResult run_cross_decay(const ExperimentConfig& c) {
    auto r = start(c);
    Table t{"errors.csv", {"n", "sup_abs_io"}, {}, "error_curve"};
    for (int d : {4, 2, 1}) t.rows.push_back({double(c.n / d), cross_block_sup(c.n / d, c.R)});
    r.ks = t.rows[2][1] / t.rows[1][1];
    r.checks.push_back({"io_ratio_n_over_n/2", r.ks, c.tolerance});
    r.diagnostics.emplace_back("sup_abs_io", t.rows[2][1]);
    r.tables.push_back(std::move(t));
    return r;
}

ExperimentResult run_inversion(const ExperimentConfig& c) {
    auto r = start(c);
    const GasSpec direct(c.n, c.chi, power_q(c.q));
    const GasSpec inverted = lambda_gas(c.n, c.chi, invert_potential(direct.potential, c.chi));
    Table t{"errors.csv", {"k", "sup_abs_error"}, {}, {}};
    double worst = 0.0;
    for (int k = 0; k < c.n; ++k) {
        const ComponentLaw a(direct, k), b(inverted, c.n - 1 - k);
        double e = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = 0.2 * std::pow(25.0, i / 99.0);  // log grid on [0.2, 5]
            e = std::max(e, std::abs(a.survival(1.0 / x) - b.cdf(x)));
        }
        t.rows.push_back({double(k), e});
        worst = std::max(worst, e);
    }
    r.ks = worst;
    r.checks.push_back({"sup_abs_error", r.ks, c.tolerance});
    r.tables.push_back(std::move(t));
    return r;
}

ExperimentResult run_gumbel_weak(const ExperimentConfig& c) {
    auto r = start(c);
    Table t{"errors.csv", {"chi", "sup_abs_error"}, {}, "error_curve"};
    std::vector<double> errs;
    double tail = 0.0;
    for (int d : {8, 4, 2, 1}) {
        const double chi = c.chi / d;
        double e = 0.0;
        for (int i = 0; i <= 600; ++i) {
            const double a = -2.0 + 0.01 * i;
            const auto v = cdf_max_detail(law::GumbelWeak{chi}, a);
            tail = std::max(tail, v.tail_bound);
            e = std::max(e, std::abs(v.value - std::exp(-std::exp(-a))));
        }
        errs.push_back(e);
        t.rows.push_back({chi, e});
    }
    r.ks = errs.back();
    r.tail_bound = tail;
    r.checks.push_back({"sup_abs_error", r.ks, c.tolerance});
    r.checks.push_back({"max_successive_ratio", max_successive_ratio(errs), 1.0});
    r.tables.push_back(std::move(t));
    return r;
}

ExperimentResult run_nonradial(const ExperimentConfig& c) {
    auto r = start(c);
    const int n = c.n;
    const double beta = 2.0 * (n + c.chi);
    const auto K = nonradial_kernel(kBump, n, c.chi);

    // independent rule for the weighted measure, of different orders than the kernel's own
    PlanarRule rule = polar_rule({0.0, 0.0}, 0.0, 1.0, n + 20, 2 * n + 40);
    rule.append(disk_indicator_rule(kBump, beta, n + 10, 2 * n + 30));

    double repro = 0.0;
    for (const cplx z0 : {cplx{0.0, 0.0}, cplx{0.3, -0.5}, cplx{-0.6, 0.2}, cplx{0.2, 0.0}, cplx{0.95, 0.0}}) {
        std::vector<cplx> acc(static_cast<std::size_t>(n), cplx{0.0, 0.0});
        for (std::size_t i = 0; i < rule.size(); ++i) {
            cplx v = rule.weights[i] * K(z0, rule.nodes[i]);
            for (int j = 0; j < n; ++j) {
                acc[static_cast<std::size_t>(j)] += v;
                v *= rule.nodes[i];
            }
        }
        for (int j = 0; j < n; ++j) repro = std::max(repro, std::abs(acc[static_cast<std::size_t>(j)] - std::pow(z0, j)));
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) trace += rule.weights[i] * K(rule.nodes[i], rule.nodes[i]).real();

    Table t{"edge_diagonal.csv", {"alpha", "theta", "rescaled_kernel", "lower", "upper", "radial_limit"}, {}, {}};
    double violation = 0.0, deviation = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double a = 0.05 * i;
        for (int j = 0; j < 8; ++j) {
            const double th = 2.0 * pi * j / 8;
            const cplx z = std::polar(1.0 - a / n, th);
            const auto [lo, hi] = sandwich_bounds(n, kBumpOuter, z);
            const double v = K(z, z).real();
            violation = std::max({violation, (lo - v) / lo, (v - hi) / hi});
            const double s = 1.0 / (double(n) * n);
            const double lim = first_intensity_limit_hard(a);
            deviation = std::max(deviation, std::abs(v * s - lim) / lim);
            t.rows.push_back({a, th, v * s, lo * s, hi * s, lim});
        }
    }
    r.ks = repro;
    r.checks.push_back({"reproducing_error", repro, c.tolerance});
    r.checks.push_back({"trace_error", std::abs(trace - n), c.tolerance});
    r.checks.push_back({"sandwich_violation", violation, 1e-8});
    r.checks.push_back({"rel_deviation_from_radial_limit", deviation, 0.15});
    r.diagnostics.emplace_back("rcond", K.rcond());
    r.tables.push_back(std::move(t));
    return r;
}

// ------------------------------------------------------------ Kac polynomials

RootSet kac_roots(const ExperimentConfig& c, std::size_t replica) {
    Stream s(c.seed, replica, StreamRole::kac_coefficients);
    return find_roots(sample_polynomial(c.n, c.coefficients, s));
}

ExperimentResult run_edge_distinction(const ExperimentConfig& c, const RunOptions& o) {
    auto r = start(c);
    const auto M = static_cast<std::size_t>(c.replicas);
    const double window = 3.0;
    std::vector<std::vector<cplx>> pts(M);
    std::vector<double> worst(M);
    parallel_for(M, o.threads, [&](std::size_t i) {
        const auto roots = kac_roots(c, i);
        worst[i] = roots.max_residual();
        for (const cplx z : rescale_near_one(roots, c.n))
            if (std::abs(z.real()) < window && std::abs(z.imag()) < window) pts[i].push_back(z);
    });

    const RectBin center{-0.5, 0.5, -0.5, 0.5};
    IntensityAccumulator primary({center});
    std::vector<RectBin> profile;
    for (int i = 0; i < 12; ++i) profile.push_back({-3.0 + 0.5 * i, -2.5 + 0.5 * i, -0.5, 0.5});
    IntensityAccumulator along(profile);
    Table samples{"samples.csv", {"replica", "count_in_bin"}, {}, {}};
    Table dump{"points.csv", {"replica", "re", "im"}, {}, {}};
    for (std::size_t i = 0; i < M; ++i) {
        primary.add_replica(pts[i]);
        along.add_replica(pts[i]);
        const auto k = std::count_if(pts[i].begin(), pts[i].end(), [&](cplx z) { return center.contains(z); });
        samples.rows.push_back({double(i), double(k)});
        for (const cplx z : pts[i]) dump.rows.push_back({double(i), z.real(), z.imag()});
    }
    const auto est = primary.result().front();
    const double rho_f = gaf_intensity(0.0), rho_e = limit_edge_kernel_E(0.0, 1.0, 0.0, 0.0).real();
    r.ks = std::abs(est.mean - rho_f) / est.se;
    r.checks.push_back({"se_from_gaf_intensity", r.ks, c.tolerance});
    r.checks.push_back({"se_from_coulomb_intensity", std::abs(est.mean - rho_e) / est.se, 5.0, false});
    r.checks.push_back({"anchor_ratio_error", std::abs(rho_e / rho_f - 2.0), 1e-10});
    r.diagnostics.emplace_back("intensity_estimate", est.mean);
    r.diagnostics.emplace_back("standard_error", est.se);
    r.diagnostics.emplace_back("max_root_residual", *std::max_element(worst.begin(), worst.end()));

    Table prof{"intensity.csv", {"x", "empirical", "se", "rho_E", "rho_F"}, {}, "intensity_compare"};
    const auto ps = along.result();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double x = 0.5 * (profile[i].x0 + profile[i].x1);
        prof.rows.push_back({x, ps[i].mean, ps[i].se, limit_edge_kernel_E(0.0, 1.0, x, x).real(), gaf_intensity(x)});
    }
    r.tables.push_back(std::move(samples));
    r.tables.push_back(std::move(prof));
    r.tables.push_back(std::move(dump));
    return r;
}

ExperimentResult run_kac_independence(const ExperimentConfig& c, const RunOptions& o) {
    auto r = start(c);
    const auto M = static_cast<std::size_t>(c.replicas);
    std::vector<double> inner(M), outer(M);
    parallel_for(M, o.threads, [&](std::size_t i) {
        const auto split = split_inner_outer(kac_roots(c, i));
        inner[i] = count_in_disk(split.inner, 0.0, c.R);
        outer[i] = count_in_disk(split.outer_inverted, 0.0, c.R);
    });
    r.ks = std::abs(pearson_corr(inner, outer));
    r.checks.push_back({"abs_pearson_corr", r.ks, c.tolerance});
    r.diagnostics.emplace_back("mean_inner_count", mean(inner));
    r.diagnostics.emplace_back("mean_outer_count", mean(outer));
    Table t{"samples.csv", {"replica", "inner_count", "outer_count"}, {}, {}};
    for (std::size_t i = 0; i < M; ++i) t.rows.push_back({double(i), inner[i], outer[i]});
    r.tables.push_back(std::move(t));
    return r;
}

// ------------------------------------------------------------ output

json summary_json(const ExperimentResult& r) {
    const auto& c = r.config;
    json j;
    j["experiment"] = to_string(c.experiment);
    j["criterion"] = criterion(c.experiment);
    j["n"] = c.n;
    j["replicas"] = is_monte_carlo(c.experiment) ? c.replicas : 0;
    j["seed"] = c.seed;
    j["ks"] = r.ks;
    j["tolerance"] = c.tolerance;
    j["pass"] = r.pass;
    j["tail_bound"] = r.tail_bound;
    j["wall_seconds"] = r.wall_seconds;
    json checks = json::array();
    for (const auto& ch : r.checks)
        checks.push_back({{"name", ch.name}, {"value", ch.value}, {"bound", ch.bound},
                          {"relation", ch.at_most ? "<=" : ">="}, {"pass", ch.pass()}});
    j["checks"] = checks;
    json diag = json::object();
    for (const auto& [k, v] : r.diagnostics) diag[k] = v;
    j["diagnostics"] = diag;
    json files = json::array();
    for (const auto& t : r.tables) files.push_back(t.file);
    j["files"] = files;
    json cfg = json::object();
    std::istringstream lines(format_config(c));
    for (std::string line; std::getline(lines, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    j["config"] = cfg;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_result(const ExperimentResult& r) {
    const std::string name = to_string(r.config.experiment);
    const fs::path dir = r.config.output_dir / name;
    fs::create_directories(dir);
    for (const auto& t : r.tables) {
        write_csv(dir / t.file, t.header, t.rows);
        if (!t.figure_kind.empty())
            register_figure(r.config.output_dir, t.figure_kind, fs::path(name) / t.file,
                            name + "_" + fs::path(t.file).stem().string() + ".png");
    }
    write_json(dir / "summary.json", summary_json(r));
}

std::string config_value(const ExperimentConfig& c, const std::string& key) {
    if (key == "experiment") return to_string(c.experiment);
    if (key == "n") return std::to_string(c.n);
    if (key == "chi") return format_double(c.chi);
    if (key == "q") return format_double(c.q);
    if (key == "R") return format_double(c.R);
    if (key == "alpha") return format_double(c.alpha);
    if (key == "gamma") return format_double(c.gamma);
    if (key == "l_plus") return format_double(c.l_plus);
    if (key == "l_minus") return format_double(c.l_minus);
    if (key == "coefficients") return to_string(c.coefficients);
    if (key == "replicas") return std::to_string(c.replicas);
    if (key == "seed") return std::to_string(c.seed);
    if (key == "output_dir") return c.output_dir.string();
    if (key == "tolerance") return format_double(c.tolerance);
    throw std::logic_error("config_value: " + key);
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& v) {
    if (key == "n") c.n = parse_number<int>(key, v);
    else if (key == "chi") c.chi = parse_number<double>(key, v);
    else if (key == "q") c.q = parse_number<double>(key, v);
    else if (key == "R") c.R = parse_number<double>(key, v);
    else if (key == "alpha") c.alpha = parse_number<double>(key, v);
    else if (key == "gamma") c.gamma = parse_number<double>(key, v);
    else if (key == "l_plus") c.l_plus = parse_number<double>(key, v);
    else if (key == "l_minus") c.l_minus = parse_number<double>(key, v);
    else if (key == "replicas") c.replicas = parse_number<int>(key, v);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "tolerance") c.tolerance = parse_number<double>(key, v);
    else if (key == "output_dir") {
        if (v.empty()) throw ConfigError("config: output_dir is empty");
        c.output_dir = v;
    } else if (key == "coefficients") {
        try {
            c.coefficients = parse_coefficient_law(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    } else
        throw std::logic_error("set_config_value: " + key);
}

const std::set<std::string> kAllKeys{"experiment", "n",        "chi",      "q",    "R",          "alpha",     "gamma",
                                     "l_plus",     "l_minus",  "coefficients", "replicas", "seed", "output_dir", "tolerance"};

}  // namespace

// ------------------------------------------------------------ names

Experiment parse_experiment(const std::string& s) {
    for (const auto& t : kTable)
        if (s == t.name) return t.e;
    throw ConfigError("unknown experiment '" + s + "'");
}

std::string to_string(Experiment e) { return entry(e).name; }

int criterion(Experiment e) { return static_cast<int>(e); }

std::vector<Experiment> all_experiments() {
    std::vector<Experiment> out;
    for (const auto& t : kTable) out.push_back(t.e);
    return out;
}

bool is_monte_carlo(Experiment e) { return entry(e).monte_carlo; }

// ------------------------------------------------------------ configuration

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.seed = 20240600 + static_cast<std::uint64_t>(criterion(e));
    c.replicas = 4000;
    switch (e) {
        case Experiment::hard_exponential: c.n = 1000; c.tolerance = 0.035; break;
        case Experiment::gumbel_linear: c.n = 5000; c.q = 2.0; c.tolerance = 0.05; break;
        case Experiment::very_weak: c.n = 500; c.tolerance = 0.04; break;
        case Experiment::annulus_law: c.n = 500; c.R = 1.5; c.q = 2.0; c.tolerance = 0.04; break;
        case Experiment::finite_particles:
            c.n = 2000;
            c.alpha = 3.0;
            c.gamma = 1.0;
            c.l_plus = 0.5;
            c.l_minus = 1.5;
            c.tolerance = 0.05;
            break;
        case Experiment::hard_kernel: c.n = 2000; c.tolerance = 0.01; break;
        case Experiment::gaf_covariance: c.n = 10000; c.tolerance = 5e-3; break;
        case Experiment::edge_bergman: c.n = 200; c.q = 0.0; c.tolerance = 0.5; break;
        case Experiment::edge_distinction: c.n = 500; c.tolerance = 3.0; break;
        case Experiment::kac_independence:
            c.n = 300;
            c.replicas = 2000;
            c.R = 0.8;
            c.tolerance = 3.0 / std::sqrt(2000.0);
            break;
        case Experiment::coulomb_cross_decay: c.n = 200; c.R = 0.7; c.tolerance = 0.5; break;
        case Experiment::inversion: c.n = 20; c.q = 2.0; c.tolerance = 1e-6; break;
        case Experiment::gumbel_weak: c.chi = 400.0; c.tolerance = 0.05; break;
        case Experiment::nonradial_edge: c.n = 50; c.tolerance = 1e-6; break;
    }
    return c;
}

std::vector<std::string> config_keys(Experiment e) {
    std::vector<std::string> k{"experiment"};
    auto add = [&](std::initializer_list<const char*> more) { k.insert(k.end(), more.begin(), more.end()); };
    switch (e) {
        case Experiment::hard_exponential: add({"n", "chi"}); break;
        case Experiment::gumbel_linear: add({"n", "chi", "q"}); break;
        case Experiment::very_weak: add({"n", "chi"}); break;
        case Experiment::annulus_law: add({"n", "chi", "R", "q"}); break;
        case Experiment::finite_particles: add({"n", "chi", "alpha", "gamma", "l_plus", "l_minus"}); break;
        case Experiment::hard_kernel: add({"n"}); break;
        case Experiment::gaf_covariance: add({"n"}); break;
        case Experiment::edge_bergman: add({"n", "q"}); break;
        case Experiment::edge_distinction: add({"n", "coefficients"}); break;
        case Experiment::kac_independence: add({"n", "coefficients", "R"}); break;
        case Experiment::coulomb_cross_decay: add({"n", "R"}); break;
        case Experiment::inversion: add({"n", "chi", "q"}); break;
        case Experiment::gumbel_weak: add({"chi"}); break;
        case Experiment::nonradial_edge: add({"n", "chi"}); break;
    }
    if (is_monte_carlo(e)) add({"replicas"});
    add({"seed", "output_dir", "tolerance"});
    return k;
}

ExperimentConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!kAllKeys.count(key)) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.emplace_back(std::move(key), std::move(value));
    }
    const auto it = std::find_if(kv.begin(), kv.end(), [](const auto& p) { return p.first == "experiment"; });
    if (it == kv.end()) throw ConfigError("config: missing key 'experiment'");
    ExperimentConfig c = default_config(parse_experiment(it->second));
    const auto keys = config_keys(c.experiment);
    for (const auto& [key, value] : kv) {
        if (key == "experiment") continue;
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("config: key '" + key + "' does not apply to experiment " + to_string(c.experiment));
        set_config_value(c, key, value);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path.string());
    return parse_config(f);
}

std::string format_config(const ExperimentConfig& c) {
    std::string out;
    for (const auto& k : config_keys(c.experiment)) out += k + " = " + config_value(c, k) + "\n";
    return out;
}

void validate(const ExperimentConfig& c) {
    const auto e = c.experiment;
    if (!(c.tolerance > 0.0) || !std::isfinite(c.tolerance)) throw ConfigError("config: tolerance must be finite and > 0");
    if (is_monte_carlo(e) && c.replicas < 1) throw ConfigError("config: replicas must be >= 1");
    if (is_monte_carlo(e) && c.replicas < 2 && (e == Experiment::kac_independence || e == Experiment::edge_distinction))
        throw ConfigError("config: replicas must be >= 2 for a correlation or standard error");
    if (c.n < 1) throw ConfigError("config: n must be >= 1");
    if (!(c.chi > 0.0)) throw ConfigError("config: chi must be > 0");
    switch (e) {
        case Experiment::gumbel_linear: hypothesis(c.q > 1.0, "strong confinement needs q > 1"); break;
        case Experiment::annulus_law: hypothesis(c.R > 1.0, "annulus needs R > 1"); break;
        case Experiment::hard_kernel:
        case Experiment::gumbel_weak:
            if (c.n < 8 || c.chi / 8 <= 0.0) throw ConfigError("config: the n/8 (chi/8) sequence needs n >= 8");
            break;
        case Experiment::edge_bergman:
            if (c.n < 4) throw ConfigError("config: n must be >= 4");
            hypothesis(c.q >= 0.0 && c.q < 1.0, "edge kernel needs 0 <= q < Q = 1");
            break;
        case Experiment::coulomb_cross_decay:
            if (c.n < 4) throw ConfigError("config: n must be >= 4");
            hypothesis(c.R > 0.0 && c.R < 1.0, "cross block is evaluated inside the unit disk (0 < R < 1)");
            break;
        case Experiment::kac_independence:
            hypothesis(c.R > 0.0 && c.R < 1.0, "inner/outer counting disk needs 0 < R < 1");
            break;
        case Experiment::nonradial_edge:
            if (c.n > 200) throw ConfigError("config: n must be <= 200 for the Gram factorization");
            break;
        default: break;
    }
    try {
        switch (e) {
            case Experiment::hard_exponential:
            case Experiment::gumbel_linear:
            case Experiment::very_weak:
            case Experiment::annulus_law:
            case Experiment::finite_particles: {
                const auto gas = experiment_gas(c);
                validate(experiment_law(c));
                if (e == Experiment::very_weak || e == Experiment::annulus_law || e == Experiment::finite_particles)
                    require_circle(gas.potential);
                if (e == Experiment::finite_particles)
                    require_finite_particle_hypotheses(gas.potential, c.alpha, c.gamma, c.l_plus, c.l_minus);
                break;
            }
            case Experiment::inversion: (void)power_q(c.q); break;
            default: break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("hypothesis violated: ") + ex.what());
    }
}

GasSpec experiment_gas(const ExperimentConfig& c) {
    switch (c.experiment) {
        case Experiment::hard_exponential: return GasSpec(c.n, c.chi, hard_edge_flat());
        case Experiment::gumbel_linear: return GasSpec(c.n, c.chi, power_q(c.q));
        case Experiment::very_weak: return GasSpec(c.n, c.chi, circle_log());
        case Experiment::annulus_law: return GasSpec(c.n, c.chi, annulus(c.R, c.q));
        case Experiment::finite_particles: return GasSpec(c.n, c.chi, power_tail(c.alpha, c.gamma, c.l_plus, c.l_minus));
        case Experiment::hard_kernel: return GasSpec(c.n, 1.0, hard_edge_flat());
        case Experiment::inversion: return GasSpec(c.n, c.chi, power_q(c.q));
        default: throw ConfigError("experiment " + to_string(c.experiment) + " has no radial gas");
    }
}

LimitLaw experiment_law(const ExperimentConfig& c) {
    switch (c.experiment) {
        case Experiment::hard_exponential: return law::HardExponential{};
        case Experiment::gumbel_linear: return law::GumbelStrong{c.q, std::nullopt};
        case Experiment::very_weak: return law::VeryWeak{1.0, c.chi};
        case Experiment::annulus_law: return law::Annulus{c.R, c.chi};
        case Experiment::finite_particles: return law::FiniteParticles{c.alpha, c.chi, c.gamma, c.l_plus, c.l_minus};
        case Experiment::gumbel_weak: return law::GumbelWeak{c.chi};
        default: throw ConfigError("experiment " + to_string(c.experiment) + " has no limit law of the maximum");
    }
}

RescaleScheme experiment_rescale(const ExperimentConfig& c) {
    switch (c.experiment) {
        case Experiment::hard_exponential: return RescaleScheme::quadratic_hard;
        case Experiment::gumbel_linear: return RescaleScheme::linear_gumbel;
        case Experiment::finite_particles: return RescaleScheme::power;
        default: return RescaleScheme::identity;
    }
}

RescaleParams experiment_rescale_params(const ExperimentConfig& c) {
    RescaleParams p;
    p.n = c.n;
    p.chi = c.chi;
    p.alpha = c.alpha;
    if (c.experiment == Experiment::gumbel_linear) p.eps = solve_eps_n(c.q, c.n);
    return p;
}

// ------------------------------------------------------------ running

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    validate(config);
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult r;
    switch (config.experiment) {
        case Experiment::hard_exponential:
        case Experiment::gumbel_linear:
        case Experiment::very_weak:
        case Experiment::annulus_law:
        case Experiment::finite_particles: r = run_extremes(config, options); break;
        case Experiment::hard_kernel: r = run_hard_kernel(config); break;
        case Experiment::gaf_covariance: r = run_gaf_covariance(config); break;
        case Experiment::edge_bergman: r = run_edge_bergman(config); break;
        case Experiment::edge_distinction: r = run_edge_distinction(config, options); break;
        case Experiment::kac_independence: r = run_kac_independence(config, options); break;
        case Experiment::coulomb_cross_decay: r = run_cross_decay(config); break;
        case Experiment::inversion: r = run_inversion(config); break;
        case Experiment::gumbel_weak: r = run_gumbel_weak(config); break;
        case Experiment::nonradial_edge: r = run_nonradial(config); break;
    }
    r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& ch) { return ch.pass(); });
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (options.write_files) write_result(r);
    return r;
}

Suite parse_suite(const std::string& s) {
    if (s == "fast") return Suite::fast;
    if (s == "full") return Suite::full;
    throw ConfigError("unknown suite '" + s + "' (expected fast or full)");
}

std::string to_string(Suite s) { return s == Suite::fast ? "fast" : "full"; }

ExperimentConfig suite_config(Experiment e, Suite s, const fs::path& output_dir) {
    ExperimentConfig c = default_config(e);
    c.output_dir = output_dir;
    if (s == Suite::full) return c;
    if (is_monte_carlo(e)) c.replicas = 1000;
    switch (e) {
        case Experiment::gumbel_linear: c.n = 2000; break;
        case Experiment::finite_particles: c.n = 500; break;
        case Experiment::hard_kernel: c.n = 1000; break;
        case Experiment::gaf_covariance: c.n = 5000; break;
        case Experiment::edge_distinction:
            c.n = 250;
            c.replicas = 2000;
            break;
        case Experiment::kac_independence:
            c.n = 150;
            c.tolerance = 3.0 / std::sqrt(double(c.replicas));
            break;
        default: break;
    }
    c.tolerance *= 1.5;
    return c;
}

bool SuiteReport::pass() const {
    return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

SuiteReport verify_all(Suite suite, const fs::path& output_dir, const RunOptions& options, const ProgressFn& progress) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep;
    rep.suite = suite;
    for (const auto e : all_experiments()) {
        rep.results.push_back(run_experiment(suite_config(e, suite, output_dir), options));
        if (progress) progress(rep.results.back());
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (options.write_files) {
        json j;
        j["suite"] = to_string(suite);
        j["pass"] = rep.pass();
        j["wall_seconds"] = rep.wall_seconds;
        j["experiments"] = json::array();
        for (const auto& r : rep.results) j["experiments"].push_back(summary_json(r));
        fs::create_directories(output_dir);
        write_json(output_dir / "report.json", j);
    }
    return rep;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first;
    std::mutex m;
    auto work = [&] {
        for (std::size_t i; !failed && (i = next++) < count;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!first) first = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, count); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

// ------------------------------------------------------------ files

std::string format_double(double x) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
    return {buf, p};
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::string line;
    for (std::size_t i = 0; i < header.size(); ++i) line += (i ? "," : "") + header[i];
    f << line << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::logic_error("write_csv: row width differs from header");
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ',';
            line += format_double(row[i]);
        }
        f << line << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void register_figure(const fs::path& dir, const std::string& kind, const fs::path& csv, const std::string& image_name) {
    const fs::path figs = dir / "figures";
    fs::create_directories(figs);
    const fs::path manifest = figs / "manifest.json";
    json j = {{"figures", json::array()}};
    if (fs::exists(manifest)) {
        std::ifstream f(manifest);
        j = json::parse(f);
    }
    auto& list = j["figures"];
    json item = {{"kind", kind}, {"csv", csv.generic_string()}, {"image", image_name}};
    bool replaced = false;
    for (auto& x : list)
        if (x.value("image", "") == image_name) {
            x = item;
            replaced = true;
        }
    if (!replaced) list.push_back(item);
    write_json(manifest, j);
}

}  // namespace circlegas
