#include "qoptics/afshar.hpp"

#include <cmath>
#include <numbers>

#include "qoptics/errors.hpp"

namespace qoptics::afshar {

using std::numbers::pi;
using std::numbers::sqrt2;

std::string_view to_string(Polarizer p) {
    switch (p) {
        case Polarizer::None: return "none";
        case Polarizer::H: return "H";
        case Polarizer::V: return "V";
        case Polarizer::D: return "D";
        case Polarizer::A: return "A";
    }
    return "?";
}

std::string_view to_string(GammaProfile p) { return p == GammaProfile::TopHat ? "tophat" : "gaussian"; }

double AfsharConfig::wire_diameter() const { return pi / (10.0 * kappa_y); }
double AfsharConfig::y_max() const { return half_span > 0.0 ? half_span : 5.0 * pi / kappa_y; }
double AfsharConfig::y_min() const { return -y_max(); }

void AfsharConfig::validate() const {
    if (!(kappa_y > 0.0) || !std::isfinite(kappa_y)) throw ConfigError("kappa_y must be positive");
    if (!std::isfinite(kappa_z)) throw ConfigError("kappa_z must be finite");
    if (!(gamma_peak >= 0.0) || !std::isfinite(gamma_peak)) throw ConfigError("gamma_peak must be >= 0");
    if (half_span < 0.0) throw ConfigError("half_span must be >= 0");
    if (samples < 2) throw ConfigError("at least two grid samples are required");
}

std::vector<double> grid(const AfsharConfig& cfg) {
    cfg.validate();
    std::vector<double> y(cfg.samples);
    const double lo = cfg.y_min(), step = (cfg.y_max() - lo) / static_cast<double>(cfg.samples - 1);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lo + step * static_cast<double>(i);
    return y;
}

double gamma_at(const AfsharConfig& cfg, double y) {
    const double d = cfg.wire_diameter();
    switch (cfg.gamma_profile) {
        case GammaProfile::TopHat:
            return std::abs(y) < d / 2.0 ? cfg.gamma_peak : 0.0;
        case GammaProfile::Gaussian: {
            const double sigma = d / 2.355;
            return cfg.gamma_peak * std::exp(-y * y / (2.0 * sigma * sigma));
        }
    }
    return 0.0;
}

PolarizedField two_slit_field(const AfsharConfig& cfg) {
    PolarizedField f;
    f.basis = Basis::HV;
    f.y = grid(cfg);
    f.samples.reserve(f.y.size());
    const Complex carrier = std::polar(1.0 / sqrt2, cfg.kappa_z * cfg.z);
    for (double y : f.y) {
        f.samples.push_back({carrier * std::polar(1.0, cfg.kappa_y * y), carrier * std::polar(1.0, -cfg.kappa_y * y)});
    }
    return f;
}

PolarizedField to_diagonal_basis(const PolarizedField& f) {
    if (f.basis != Basis::HV) throw ConfigError("to_diagonal_basis expects a field in the H/V basis");
    PolarizedField out{Basis::DA, f.y, {}};
    out.samples.reserve(f.samples.size());
    for (const auto& s : f.samples) out.samples.push_back({(s.first + s.second) / sqrt2, (s.first - s.second) / sqrt2});
    return out;
}

PolarizedField to_hv_basis(const PolarizedField& f) {
    if (f.basis != Basis::DA) throw ConfigError("to_hv_basis expects a field in the D/A basis");
    PolarizedField out{Basis::HV, f.y, {}};
    out.samples.reserve(f.samples.size());
    for (const auto& s : f.samples) out.samples.push_back({(s.first + s.second) / sqrt2, (s.first - s.second) / sqrt2});
    return out;
}

PolarizedField apply_wire(const PolarizedField& f, const AfsharConfig& cfg) {
    PolarizedField out = f;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double t = std::exp(-gamma_at(cfg, out.y[i]));
        out.samples[i].first *= t;
        out.samples[i].second *= t;
    }
    return out;
}

IntensityMap intensities(const PolarizedField& f) {
    const PolarizedField hv = f.basis == Basis::HV ? f : to_hv_basis(f);
    const PolarizedField da = f.basis == Basis::DA ? f : to_diagonal_basis(f);
    IntensityMap m{f.y, {}};
    m.samples.reserve(f.samples.size());
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        m.samples.push_back({std::norm(hv.samples[i].first), std::norm(hv.samples[i].second),
                             std::norm(da.samples[i].first), std::norm(da.samples[i].second)});
    }
    return m;
}

double integrate(const std::vector<double>& y, const std::vector<double>& values) {
    double s = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) s += 0.5 * (y[i] - y[i - 1]) * (values[i] + values[i - 1]);
    return s;
}

std::pair<double, double> image_intensities(const AfsharConfig& cfg, Polarizer polarizer) {
    const IntensityMap m = intensities(apply_wire(two_slit_field(cfg), cfg));
    auto integrated = [&](double IntensitySample::*component) {
        std::vector<double> v(m.samples.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = m.samples[i].*component;
        return integrate(m.y, v);
    };
    // Each image receives the projected flux in proportion to |<P|slit polarization>|^2.
    switch (polarizer) {
        case Polarizer::None: return {integrated(&IntensitySample::h), integrated(&IntensitySample::v)};
        case Polarizer::H: return {integrated(&IntensitySample::h), 0.0};
        case Polarizer::V: return {0.0, integrated(&IntensitySample::v)};
        case Polarizer::D: {
            const double total = integrated(&IntensitySample::d);
            return {0.5 * total, 0.5 * total};
        }
        case Polarizer::A: {
            const double total = integrated(&IntensitySample::a);
            return {0.5 * total, 0.5 * total};
        }
    }
    return {0.0, 0.0};
}

}  // namespace qoptics::afshar
