#include <doctest.h>

#include <atomic>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "circlegas/experiments.hpp"

using namespace circlegas;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("circlegas_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string message_of(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("every acceptance item has exactly one named experiment") {
    const auto all = all_experiments();
    CHECK(all.size() == kExperimentCount);
    std::set<int> items;
    std::set<std::string> names;
    for (auto e : all) {
        items.insert(criterion(e));
        names.insert(to_string(e));
        CHECK(parse_experiment(to_string(e)) == e);
        CHECK(default_config(e).experiment == e);
    }
    CHECK(items.size() == kExperimentCount);
    CHECK(*items.begin() == 1);
    CHECK(*items.rbegin() == kExperimentCount);
    CHECK(names.size() == kExperimentCount);
    CHECK_THROWS_AS((void)parse_experiment("nope"), ConfigError);
}

TEST_CASE("config parsing") {
    const auto c = parse("# comment\nexperiment = gumbel_linear\nn = 300  # trailing\nreplicas=17\nseed = 99\n"
                         "tolerance = 0.1\noutput_dir = some/dir\n");
    CHECK(c.experiment == Experiment::gumbel_linear);
    CHECK(c.n == 300);
    CHECK(c.replicas == 17);
    CHECK(c.seed == 99);
    CHECK(c.tolerance == 0.1);
    CHECK(c.output_dir == fs::path("some/dir"));
    CHECK(c.q == 2.0);  // default kept

    // round trip through the formatter
    const auto d = parse(format_config(c));
    CHECK(format_config(d) == format_config(c));

    CHECK(message_of("experiment = hard_exponential\nfoo = 1\n").find("unknown key 'foo'") != std::string::npos);
    CHECK(message_of("experiment = hard_exponential\nq = 3\n").find("does not apply") != std::string::npos);
    CHECK(message_of("experiment = hard_exponential\nn = 5\nn = 6\n").find("duplicate") != std::string::npos);
    CHECK(message_of("n = 5\n").find("missing key 'experiment'") != std::string::npos);
    CHECK(message_of("experiment = hard_exponential\nn = five\n").find("cannot parse") != std::string::npos);
    CHECK(message_of("experiment = hard_exponential\nn\n").find("expected key = value") != std::string::npos);
    CHECK(message_of("experiment = hard_exponential\nreplicas = 0\n").find("replicas") != std::string::npos);
    CHECK(message_of("experiment = hard_kernel\nreplicas = 10\n").find("does not apply") != std::string::npos);
    CHECK(message_of("experiment = kac_independence\ncoefficients = cauchy\n").find("cauchy") != std::string::npos);
}

TEST_CASE("hypothesis violations name the hypothesis") {
    CHECK(message_of("experiment = gumbel_linear\nq = 1\n").find("q > 1") != std::string::npos);
    CHECK(message_of("experiment = annulus\nR = 0.9\n").find("R > 1") != std::string::npos);
    CHECK(message_of("experiment = finite_particles\nl_minus = 0.5\n").find("L-") != std::string::npos);
    CHECK(message_of("experiment = finite_particles\nalpha = 1\n").find("alpha") != std::string::npos);
    CHECK(message_of("experiment = edge_bergman\nq = 1\n").find("q < Q") != std::string::npos);
    CHECK(message_of("experiment = kac_independence\nR = 1.2\n").find("0 < R < 1") != std::string::npos);
    CHECK(message_of("experiment = very_weak\nchi = -1\n").find("chi") != std::string::npos);
    CHECK(message_of("experiment = finite_particles\n").empty());
}

TEST_CASE("suites") {
    CHECK(parse_suite("fast") == Suite::fast);
    CHECK(parse_suite("full") == Suite::full);
    CHECK_THROWS_AS((void)parse_suite(""), ConfigError);
    CHECK_THROWS_AS((void)parse_suite("medium"), ConfigError);
    for (auto e : all_experiments()) {
        const auto full = suite_config(e, Suite::full, "x");
        const auto fast = suite_config(e, Suite::fast, "x");
        CHECK(format_config(full) == format_config([&] {
                  auto d = default_config(e);
                  d.output_dir = "x";
                  return d;
              }()));
        CHECK(fast.n <= full.n);
        CHECK(fast.replicas <= full.replicas);
        if (e != Experiment::kac_independence) CHECK(fast.tolerance == doctest::Approx(1.5 * full.tolerance));
        CHECK_NOTHROW(validate(fast));
        CHECK_NOTHROW(validate(full));
    }
}

TEST_CASE("csv dialect and number formatting") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, 123456789.0}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(1.0) == "1");
    const auto dir = scratch("csv");
    fs::create_directories(dir);
    write_csv(dir / "a.csv", {"x", "y"}, {{1.0, 0.5}, {2.0, -0.25}});
    CHECK(slurp(dir / "a.csv") == "x,y\n1,0.5\n2,-0.25\n");
    CHECK_THROWS_AS(write_csv(dir / "b.csv", {"x"}, {{1.0, 2.0}}), std::logic_error);

    register_figure(dir, "ecdf_overlay", "e/limit_cdf.csv", "e.png");
    register_figure(dir, "error_curve", "e/limit_cdf.csv", "e.png");
    register_figure(dir, "error_curve", "f/errors.csv", "f.png");
    const auto m = slurp(dir / "figures" / "manifest.json");
    CHECK(m.find("ecdf_overlay") == std::string::npos);
    CHECK(m.find("f/errors.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
    for (int threads : {1, 2, 5}) {
        std::vector<int> hit(1000, 0);
        parallel_for(hit.size(), threads, [&](std::size_t i) { ++hit[i]; });
        CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
        CHECK_THROWS_AS(parallel_for(100, threads,
                                     [](std::size_t i) {
                                         if (i == 37) throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("called on empty range"); });
}

TEST_CASE("runs are byte-identical given the seed, for any thread count") {
    auto c = default_config(Experiment::hard_exponential);
    c.n = 60;
    c.replicas = 300;
    c.output_dir = scratch("det_a");
    const auto a = run_experiment(c);
    c.output_dir = scratch("det_b");
    const auto b = run_experiment(c, {3, true});
    const std::string csv_a = slurp(a.config.output_dir / "hard_exponential" / "samples.csv");
    CHECK(!csv_a.empty());
    CHECK(csv_a == slurp(b.config.output_dir / "hard_exponential" / "samples.csv"));
    CHECK(csv_a.find('\r') == std::string::npos);
    CHECK(csv_a.rfind("replica,raw_extreme,rescaled\n", 0) == 0);
    CHECK(a.ks == b.ks);
    CHECK(a.pass == (a.ks <= c.tolerance));
    CHECK(a.checks.front().value == a.ks);
    CHECK(fs::exists(a.config.output_dir / "hard_exponential" / "summary.json"));
    CHECK(fs::exists(a.config.output_dir / "figures" / "manifest.json"));
    c.seed += 1;
    const auto other = run_experiment(c, {1, false});
    CHECK(other.raw_extremes != a.raw_extremes);
    fs::remove_all(a.config.output_dir);
    fs::remove_all(b.config.output_dir);
}

TEST_CASE("every experiment runs at reduced size") {
    const auto dir = scratch("small");
    for (auto e : all_experiments()) {
        CAPTURE(to_string(e));
        auto c = default_config(e);
        c.output_dir = dir;
        switch (e) {
            case Experiment::hard_kernel:
            case Experiment::gaf_covariance: c.n = 16; break;
            case Experiment::edge_bergman:
            case Experiment::coulomb_cross_decay: c.n = 8; break;
            case Experiment::edge_distinction:
            case Experiment::kac_independence: c.n = 20; break;
            case Experiment::inversion: c.n = 5; break;
            case Experiment::gumbel_weak: c.chi = 16; break;
            case Experiment::nonradial_edge: c.n = 10; break;
            default: c.n = 40; break;
        }
        if (is_monte_carlo(e)) c.replicas = 40;
        const auto r = run_experiment(c);
        CHECK(!r.checks.empty());
        CHECK(r.checks.front().value == r.ks);
        CHECK(std::isfinite(r.ks));
        CHECK(r.wall_seconds >= 0.0);
        if (is_monte_carlo(e)) CHECK(r.tables.front().rows.size() == 40);
        for (const auto& t : r.tables) CHECK(fs::exists(dir / to_string(e) / t.file));
        CHECK(fs::exists(dir / to_string(e) / "summary.json"));
    }
    // reproducing property, trace and sandwich hold at any n
    auto c = default_config(Experiment::nonradial_edge);
    c.n = 10;
    c.output_dir = dir;
    const auto r = run_experiment(c);
    for (const auto& ch : r.checks) {
        CAPTURE(ch.name);
        if (ch.name != "rel_deviation_from_radial_limit") CHECK(ch.pass());
    }
    fs::remove_all(dir);
}
