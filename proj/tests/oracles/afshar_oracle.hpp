#pragma once

// Image intensities from the closed-form illumination of the wired two-slit
// field, J(H) = J(V) = e^{-2 gamma}/2, J(D) = e^{-2 gamma} cos^2(k y),
// J(A) = e^{-2 gamma} sin^2(k y), summed with trapezoid weights on a grid
// built independently of the engine.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace qtest {

struct AfsharOracleConfig {
    double kappa_y = 1.0;
    std::size_t samples = 4096;
    double gamma_peak = 6.0;
    bool gaussian = false;
};

inline double oracle_gamma(const AfsharOracleConfig& c, double y) {
    const double d = std::numbers::pi / (10.0 * c.kappa_y);
    if (c.gaussian) {
        const double s = d / 2.355;
        return c.gamma_peak * std::exp(-0.5 * y * y / (s * s));
    }
    return std::abs(y) < d / 2.0 ? c.gamma_peak : 0.0;
}

inline double oracle_integral(const AfsharOracleConfig& c, const std::function<double(double)>& f) {
    const double half = 5.0 * std::numbers::pi / c.kappa_y;
    const std::size_t n = c.samples;
    const double h = 2.0 * half / static_cast<double>(n - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        s += w * f(-half + h * static_cast<double>(i));
    }
    return s * h;
}

/// polarizer: 'N', 'H', 'V', 'D' or 'A'.
inline std::pair<double, double> oracle_images(const AfsharOracleConfig& c, char polarizer) {
    auto att = [&](double y) { return std::exp(-2.0 * oracle_gamma(c, y)); };
    const double hv = oracle_integral(c, [&](double y) { return 0.5 * att(y); });
    switch (polarizer) {
        case 'N': return {hv, hv};
        case 'H': return {hv, 0.0};
        case 'V': return {0.0, hv};
        case 'D': {
            const double t = oracle_integral(c, [&](double y) { return att(y) * std::pow(std::cos(c.kappa_y * y), 2); });
            return {t / 2.0, t / 2.0};
        }
        default: {
            const double t = oracle_integral(c, [&](double y) { return att(y) * std::pow(std::sin(c.kappa_y * y), 2); });
            return {t / 2.0, t / 2.0};
        }
    }
}

}  // namespace qtest
