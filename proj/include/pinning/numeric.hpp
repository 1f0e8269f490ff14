// Small summation and log-domain helpers shared across the library.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace pinning {

// Deterministic pairwise reduction; order depends only on the input length.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Kahan compensated accumulator, used where we want an error bound that does
// not grow with the number of terms.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Streaming log(sum exp(x_i)) with a running maximum; safe against overflow
// for any mix of magnitudes. Empty stream yields -inf.
class LogSumExp {
public:
    void add(double x) {
        if (std::isinf(x) && x < 0) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }
    double value() const {
        if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

inline double log_add(double a, double b) {
    LogSumExp l;
    l.add(a);
    l.add(b);
    return l.value();
}

}  // namespace pinning
