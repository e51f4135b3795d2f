// Acceptance run: one PASS/FAIL line per primary criterion, with the tolerances pinned here.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <thread>

#include "circlegas/experiments.hpp"

using namespace circlegas;

namespace {

struct Pinned {
    Experiment experiment;
    int n;         // chi for gumbel_weak
    int replicas;  // 0: deterministic
    double tolerance;
};

const Pinned kPinned[] = {
    {Experiment::hard_exponential, 1000, 4000, 0.035},
    {Experiment::gumbel_linear, 5000, 4000, 0.05},
    {Experiment::very_weak, 500, 4000, 0.04},
    {Experiment::annulus_law, 500, 4000, 0.04},
    {Experiment::finite_particles, 2000, 4000, 0.05},
    {Experiment::hard_kernel, 2000, 0, 0.01},
    {Experiment::gaf_covariance, 10000, 0, 5e-3},
    {Experiment::edge_bergman, 200, 0, 0.5},
    {Experiment::edge_distinction, 500, 4000, 3.0},
    {Experiment::kac_independence, 300, 2000, 0.06708203932499368},  // 3 / sqrt(2000)
    {Experiment::coulomb_cross_decay, 200, 0, 0.5},
    {Experiment::inversion, 20, 0, 1e-6},
    {Experiment::gumbel_weak, 400, 0, 0.05},
    {Experiment::nonradial_edge, 50, 0, 1e-6},
};

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
    RunOptions opts;
    opts.threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    int failed = 0;
    double total = 0.0;
    for (const auto& p : kPinned) {
        auto c = default_config(p.experiment);
        if (p.experiment == Experiment::gumbel_weak) c.chi = p.n;
        else c.n = p.n;
        if (p.replicas > 0) c.replicas = p.replicas;
        c.tolerance = p.tolerance;
        c.output_dir = out;
        ExperimentResult r;
        try {
            r = run_experiment(c, opts);
        } catch (const std::exception& e) {
            std::printf("criterion %2d %-20s FAIL  error: %s\n", criterion(p.experiment), to_string(p.experiment).c_str(),
                        e.what());
            ++failed;
            continue;
        }
        total += r.wall_seconds;
        std::printf("criterion %2d %-20s %s  %s = %s (tolerance %s, %.1f s)\n", criterion(p.experiment),
                    to_string(p.experiment).c_str(), r.pass ? "PASS" : "FAIL", r.checks.front().name.c_str(),
                    format_double(r.ks).c_str(), format_double(p.tolerance).c_str(), r.wall_seconds);
        for (std::size_t i = 1; i < r.checks.size(); ++i) {
            const auto& ch = r.checks[i];
            std::printf("             %-20s %s  %s = %s (need %s %s)\n", "", ch.pass() ? "pass" : "FAIL", ch.name.c_str(),
                        format_double(ch.value).c_str(), ch.at_most ? "<=" : ">=", format_double(ch.bound).c_str());
        }
        if (!r.pass)
            for (const auto& [k, v] : r.diagnostics)
                std::printf("             %-20s diagnostic %s = %s\n", "", k.c_str(), format_double(v).c_str());
        std::fflush(stdout);
        failed += r.pass ? 0 : 1;
    }
    std::printf("acceptance: %d of %zu criteria passed (%.1f s)\n", static_cast<int>(std::size(kPinned)) - failed,
                std::size(kPinned), total);
    return failed == 0 ? 0 : 1;
}
