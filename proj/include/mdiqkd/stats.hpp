#pragma once

#include <cmath>
#include <cstdint>

namespace mdiqkd {

/// Welford running mean and variance.
class RunningMean {
public:
    void add(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Sample standard deviation of the mean; 0 below two samples.
    double standard_error() const noexcept {
        if (n_ < 2) return 0.0;
        const double n = static_cast<double>(n_);
        return std::sqrt(m2_ / (n - 1.0) / n);
    }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace mdiqkd
