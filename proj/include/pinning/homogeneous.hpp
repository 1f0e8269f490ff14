// Homogeneous pinning (no disorder): the free energy F(h) solves
//   sum_n K(n) e^{-F n} = e^{-h}   for h > 0,
// and vanishes for h <= 0. Also exposes the finite-volume pinned partition
// function and a centered-difference contact fraction.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "pinning/numeric.hpp"
#include "pinning/renewal_dp.hpp"
#include "pinning/renewal_kernel.hpp"

namespace pinning {

struct HomogeneousSolution {
    double h = 0.0;
    double free_energy = 0.0;
    double residual = 0.0;   // sum_n K(n) e^{-F n} - e^{-h}, zero when the equation is inactive
};

namespace detail {

// sum_n K(n) e^{-F n}, with an early stop once the remaining tail cannot move
// the accumulated value at working precision.
inline double laplace_transform(const RenewalKernel& kernel, double f) {
    KahanSum s;
    for (int n = 1; n <= kernel.cutoff; ++n) {
        s.add(kernel.prob(n) * std::exp(-f * double(n)));
        if (kernel.tail_mass(n) * std::exp(-f * double(n + 1)) < 1e-18 * s.value()) break;
    }
    return s.value();
}

}  // namespace detail

inline HomogeneousSolution homogeneous_free_energy(const RenewalKernel& kernel, double h) {
    if (!std::isfinite(h)) throw std::invalid_argument("homogeneous_free_energy: h must be finite");
    if (h <= 0.0) return {h, 0.0, 0.0};
    const double target = std::exp(-h);
    double lo = 0.0;
    double hi = h + std::log(1.0 / kernel.prob(1)) + 1.0;   // Laplace transform < e^{-h} here
    const double width_floor = 1e-14 * (hi > 1.0 ? hi : 1.0);
    while (hi - lo > width_floor) {
        const double mid = 0.5 * (lo + hi);
        if (detail::laplace_transform(kernel, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    const double f = 0.5 * (lo + hi);
    return {h, f, detail::laplace_transform(kernel, f) - target};
}

// log of the pinned homogeneous partition function at length l, i.e. every
// contact contributes e^{h} and the configuration must renew at l.
inline double exact_homog_partition(const RenewalKernel& kernel, double h, int l,
                                    int site_cap = 20000) {
    if (l < 1) throw std::invalid_argument("exact_homog_partition: length must be >= 1");
    if (l > site_cap) throw std::invalid_argument("exact_homog_partition: length exceeds site cap");
    std::vector<double> w(std::size_t(l), h);
    return renewal_log_partition(w, kernel);
}

// d/dh (1/l) log Z_l(h) by centered differences: the mean contact density.
inline double contact_fraction(const RenewalKernel& kernel, double h, int l,
                               int site_cap = 20000, double step = 1e-5) {
    const double up = exact_homog_partition(kernel, h + step, l, site_cap);
    const double down = exact_homog_partition(kernel, h - step, l, site_cap);
    return (up - down) / (2.0 * step * double(l));
}

}  // namespace pinning
