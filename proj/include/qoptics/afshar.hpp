#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "qoptics/fock.hpp"

namespace qoptics::afshar {

enum class GammaProfile { TopHat, Gaussian };
enum class Basis { HV, DA };
enum class Polarizer { None, H, V, D, A };

std::string_view to_string(Polarizer p);
std::string_view to_string(GammaProfile p);

/// Two-slit field near the symmetry plane y = 0, with an absorbing wire on
/// that plane. The wire diameter is pi/(10 kappa_y).
struct AfsharConfig {
    double kappa_y = 1.0;
    double kappa_z = 1.0;
    /// Symmetric y window [-half_span, half_span]; 0 means 5 pi / kappa_y.
    double half_span = 0.0;
    std::size_t samples = 4096;
    /// Plane at which the field phase e^{i kappa_z z} is evaluated.
    double z = 0.0;
    double gamma_peak = 6.0;
    GammaProfile gamma_profile = GammaProfile::TopHat;

    double wire_diameter() const;
    double y_min() const;
    double y_max() const;
    /// Throws ConfigError on non-positive wave numbers, negative opacity or
    /// fewer than two samples.
    void validate() const;
};

/// Jones vector in the basis recorded on the owning field.
struct Jones {
    Complex first;   // H or D
    Complex second;  // V or A
};

struct PolarizedField {
    Basis basis = Basis::HV;
    std::vector<double> y;
    std::vector<Jones> samples;
};

struct IntensitySample {
    double h, v, d, a;
};

struct IntensityMap {
    std::vector<double> y;
    std::vector<IntensitySample> samples;
};

std::vector<double> grid(const AfsharConfig& cfg);
/// gamma(y) of the configured wire profile.
double gamma_at(const AfsharConfig& cfg, double y);

PolarizedField two_slit_field(const AfsharConfig& cfg);
/// H = (D + A)/sqrt2, V = (D - A)/sqrt2. Throws ConfigError unless the field is in HV.
PolarizedField to_diagonal_basis(const PolarizedField& f);
/// Inverse of to_diagonal_basis.
PolarizedField to_hv_basis(const PolarizedField& f);
PolarizedField apply_wire(const PolarizedField& f, const AfsharConfig& cfg);
IntensityMap intensities(const PolarizedField& f);

/// Trapezoid integral of samples over the grid.
double integrate(const std::vector<double>& y, const std::vector<double>& values);

/// Integrated intensity reaching image 1 (H slit) and image 2 (V slit) after
/// the wire, with the polarizer projecting the field in the overlap region.
std::pair<double, double> image_intensities(const AfsharConfig& cfg, Polarizer polarizer);

}  // namespace qoptics::afshar
