#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace circlegas {

/// Empirical CDF: right-continuous step function of a sorted sample.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> sample);

    [[nodiscard]] double operator()(double t) const;    // #{x_i <= t} / n
    [[nodiscard]] double left_limit(double t) const;    // #{x_i < t} / n
    [[nodiscard]] const std::vector<double>& sorted() const { return x_; }
    [[nodiscard]] std::size_t size() const { return x_.size(); }

private:
    std::vector<double> x_;
};

/// sup_x |F_hat - F| evaluated at the sample points from both sides.
double ks_statistic(const Ecdf& sample, const std::function<double(double)>& cdf);
/// sup_x |F_a - F_b|.
double ks_two_sample(const Ecdf& a, const Ecdf& b);
/// DKW: P(sup |F_hat - F| > eps) <= 2 exp(-2 n eps^2); returns eps for the given level.
double dkw_epsilon(std::size_t n, double level);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
/// Throws std::invalid_argument on unequal lengths, fewer than 2 points, or zero variance.
double pearson_corr(std::span<const double> x, std::span<const double> y);

struct RectBin {
    double x0, x1, y0, y1;
    [[nodiscard]] double area() const { return (x1 - x0) * (y1 - y0); }
    [[nodiscard]] bool contains(std::complex<double> z) const {
        return z.real() >= x0 && z.real() < x1 && z.imag() >= y0 && z.imag() < y1;
    }
};

struct IntensityEstimate {
    double mean = 0.0;  // count / (area M)
    double se = 0.0;    // standard error from the per-replica counts
    long long count = 0;
};

/// Streams per-replica point sets into per-bin counts.
class IntensityAccumulator {
public:
    explicit IntensityAccumulator(std::vector<RectBin> bins);

    void add_replica(std::span<const std::complex<double>> points);
    [[nodiscard]] std::vector<IntensityEstimate> result() const;
    [[nodiscard]] std::size_t replicas() const { return replicas_; }
    [[nodiscard]] const std::vector<RectBin>& bins() const { return bins_; }

private:
    std::vector<RectBin> bins_;
    std::vector<double> sum_, sum_sq_;
    std::vector<long long> count_;
    std::size_t replicas_ = 0;
};

/// Mean intensity per bin over the M = per_replica.size() replicas.
std::vector<IntensityEstimate> binned_intensity(const std::vector<std::vector<std::complex<double>>>& per_replica,
                                                const std::vector<RectBin>& bins);

}  // namespace circlegas
