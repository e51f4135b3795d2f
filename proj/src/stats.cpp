#include "circlegas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace circlegas {

Ecdf::Ecdf(std::vector<double> sample) : x_(std::move(sample)) {
    for (double v : x_)
        if (std::isnan(v)) throw std::invalid_argument("Ecdf: NaN in sample");
    std::sort(x_.begin(), x_.end());
}

double Ecdf::operator()(double t) const {
    if (x_.empty()) return 0.0;
    return static_cast<double>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) / static_cast<double>(x_.size());
}

double Ecdf::left_limit(double t) const {
    if (x_.empty()) return 0.0;
    return static_cast<double>(std::lower_bound(x_.begin(), x_.end(), t) - x_.begin()) / static_cast<double>(x_.size());
}

double ks_statistic(const Ecdf& sample, const std::function<double(double)>& cdf) {
    const auto& x = sample.sorted();
    if (x.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < x.size()) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;  // ties
        // F(x-) through the neighbouring double, so atoms of F are handled exactly
        const double F = cdf(x[i]);
        const double Fm = cdf(std::nextafter(x[i], -std::numeric_limits<double>::infinity()));
        d = std::max({d, std::abs(static_cast<double>(j) / n - F), std::abs(static_cast<double>(i) / n - Fm)});
        i = j;
    }
    return d;
}

double ks_two_sample(const Ecdf& a, const Ecdf& b) {
    const auto& x = a.sorted();
    const auto& y = b.sorted();
    if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        const double t = j >= y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double dkw_epsilon(std::size_t n, double level) {
    if (n == 0 || !(level > 0.0 && level < 1.0)) throw std::invalid_argument("dkw_epsilon: need n > 0 and level in (0,1)");
    return std::sqrt(std::log(2.0 / level) / (2.0 * static_cast<double>(n)));
}

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("stddev: need at least 2 values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_corr: lengths differ");
    if (x.size() < 2) throw std::invalid_argument("pearson_corr: need at least 2 pairs");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson_corr: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

IntensityAccumulator::IntensityAccumulator(std::vector<RectBin> bins)
    : bins_(std::move(bins)), sum_(bins_.size()), sum_sq_(bins_.size()), count_(bins_.size()) {
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        const auto& b = bins_[i];
        if (!(b.x1 > b.x0 && b.y1 > b.y0)) throw std::invalid_argument("binned_intensity: zero-area bin");
        for (std::size_t j = 0; j < i; ++j) {
            const auto& c = bins_[j];
            const bool overlap = std::min(b.x1, c.x1) > std::max(b.x0, c.x0) && std::min(b.y1, c.y1) > std::max(b.y0, c.y0);
            if (overlap) throw std::invalid_argument("binned_intensity: overlapping bins");
        }
    }
}

void IntensityAccumulator::add_replica(std::span<const std::complex<double>> points) {
    std::vector<long long> c(bins_.size(), 0);
    for (const auto& z : points)
        for (std::size_t i = 0; i < bins_.size(); ++i)
            if (bins_[i].contains(z)) {
                ++c[i];
                break;
            }
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        const auto v = static_cast<double>(c[i]);
        sum_[i] += v;
        sum_sq_[i] += v * v;
        count_[i] += c[i];
    }
    ++replicas_;
}

std::vector<IntensityEstimate> IntensityAccumulator::result() const {
    std::vector<IntensityEstimate> out(bins_.size());
    if (replicas_ == 0) return out;
    const auto M = static_cast<double>(replicas_);
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        const double A = bins_[i].area();
        const double m = sum_[i] / M;
        out[i].mean = m / A;
        out[i].count = count_[i];
        if (replicas_ > 1) {
            const double var = std::max(0.0, (sum_sq_[i] - M * m * m) / (M - 1.0));
            out[i].se = std::sqrt(var / M) / A;
        }
    }
    return out;
}

std::vector<IntensityEstimate> binned_intensity(const std::vector<std::vector<std::complex<double>>>& per_replica,
                                                const std::vector<RectBin>& bins) {
    IntensityAccumulator acc(bins);
    for (const auto& pts : per_replica) acc.add_replica(pts);
    return acc.result();
}

}  // namespace circlegas
