#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "oracles/afshar_oracle.hpp"
#include "qoptics/afshar.hpp"
#include "qoptics/errors.hpp"
#include "support/generators.hpp"

using namespace qoptics;
using namespace qoptics::afshar;
using std::numbers::pi;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Samples placed so that y = 0 and y = pi/2 land exactly on the grid.
AfsharConfig aligned() {
    AfsharConfig c;
    c.samples = 201;  // step pi/20
    return c;
}

std::size_t at(const PolarizedField& f, double y) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < f.y.size(); ++i) {
        if (std::abs(f.y[i] - y) < std::abs(f.y[best] - y)) best = i;
    }
    REQUIRE(std::abs(f.y[best] - y) < 1e-12);
    return best;
}

double reduction(const AfsharConfig& cfg, Polarizer p) {
    AfsharConfig open = cfg;
    open.gamma_peak = 0.0;
    return 1.0 - image_intensities(cfg, p).first / image_intensities(open, p).first;
}

}  // namespace

TEST_CASE("two-slit field") {
    auto cfg = aligned();
    cfg.z = 0.7;
    const auto f = two_slit_field(cfg);
    REQUIRE(f.samples.size() == 201);
    const auto da = to_diagonal_basis(f);

    SUBCASE("pure D on the symmetry plane") {
        const auto k = at(f, 0.0);
        CHECK(std::abs(f.samples[k].first - f.samples[k].second) < 1e-15);
        CHECK(std::abs(f.samples[k].first - std::polar(kInvSqrt2, 0.7)) < 1e-15);
        CHECK(std::abs(da.samples[k].second) < 1e-15);
        CHECK(std::abs(std::abs(da.samples[k].first) - 1.0) < 1e-15);
    }
    SUBCASE("pure A a quarter period away") {
        const auto k = at(f, pi / 2.0);
        CHECK(std::abs(da.samples[k].first) < 1e-14);
        CHECK(std::abs(std::abs(da.samples[k].second) - 1.0) < 1e-14);
    }
    SUBCASE("unit norm everywhere") {
        for (const auto& s : f.samples) CHECK(std::abs(std::norm(s.first) + std::norm(s.second) - 1.0) < 1e-15);
    }
}

TEST_CASE("grid and wire geometry") {
    AfsharConfig c;
    CHECK(c.wire_diameter() == pi / 10.0);
    c.kappa_y = 2.0;
    CHECK(c.wire_diameter() == pi / 20.0);
    CHECK(c.y_max() == doctest::Approx(2.5 * pi));
    const auto y = grid(c);
    CHECK(y.size() == 4096);
    CHECK(y.front() == doctest::Approx(-2.5 * pi));
    CHECK(y.back() == doctest::Approx(2.5 * pi));

    AfsharConfig bad;
    bad.kappa_y = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.gamma_peak = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.samples = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("basis change") {
    PolarizedField h{Basis::HV, {0.0}, {{1.0, 0.0}}};
    const auto hd = to_diagonal_basis(h);
    CHECK(hd.basis == Basis::DA);
    CHECK(std::abs(hd.samples[0].first - kInvSqrt2) < 1e-15);
    CHECK(std::abs(hd.samples[0].second - kInvSqrt2) < 1e-15);

    PolarizedField d{Basis::HV, {0.0}, {{kInvSqrt2, kInvSqrt2}}};
    const auto dd = to_diagonal_basis(d);
    CHECK(std::abs(dd.samples[0].first - 1.0) < 1e-15);
    CHECK(std::abs(dd.samples[0].second) < 1e-15);

    SUBCASE("wrong basis label") {
        CHECK_THROWS_AS(to_diagonal_basis(hd), ConfigError);
        CHECK_THROWS_AS(to_hv_basis(h), ConfigError);
    }
    SUBCASE("property: round trip is the identity") {
        qtest::Gen gen(31);
        for (int k = 0; k < 20; ++k) {
            PolarizedField f{Basis::HV, {}, {}};
            for (int i = 0; i < 50; ++i) {
                f.y.push_back(i);
                f.samples.push_back({gen.gaussian_complex(), gen.gaussian_complex()});
            }
            const auto back = to_hv_basis(to_diagonal_basis(f));
            CHECK(back.basis == Basis::HV);
            for (std::size_t i = 0; i < f.samples.size(); ++i) {
                CHECK(std::abs(back.samples[i].first - f.samples[i].first) < 1e-14);
                CHECK(std::abs(back.samples[i].second - f.samples[i].second) < 1e-14);
            }
        }
    }
}

TEST_CASE("wire absorption") {
    auto cfg = aligned();
    const auto f = two_slit_field(cfg);

    SUBCASE("transparent wire") {
        cfg.gamma_peak = 0.0;
        const auto w = apply_wire(f, cfg);
        for (std::size_t i = 0; i < f.samples.size(); ++i) {
            CHECK(w.samples[i].first == f.samples[i].first);
            CHECK(w.samples[i].second == f.samples[i].second);
        }
    }
    SUBCASE("opaque centre, untouched sine maximum") {
        const auto w = apply_wire(f, cfg);
        const auto k0 = at(f, 0.0);
        CHECK(std::abs(w.samples[k0].first - std::exp(-6.0) * f.samples[k0].first) < 1e-18);
        const auto k1 = at(f, pi / 2.0);
        CHECK(w.samples[k1].first == f.samples[k1].first);
        CHECK(w.samples[k1].second == f.samples[k1].second);
    }
    SUBCASE("top hat vanishes outside the wire") {
        for (double y : grid(cfg)) {
            if (std::abs(y) >= cfg.wire_diameter() / 2.0) CHECK(gamma_at(cfg, y) == 0.0);
        }
    }
    SUBCASE("gaussian tail") {
        cfg.gamma_profile = GammaProfile::Gaussian;
        CHECK(gamma_at(cfg, 0.0) == 6.0);
        const double sigma = cfg.wire_diameter() / 2.355;
        CHECK(gamma_at(cfg, 6.0 * sigma) < 1e-6 * cfg.gamma_peak);
        for (double y : grid(cfg)) {
            if (std::abs(y) > 3.0 * cfg.wire_diameter()) CHECK(gamma_at(cfg, y) < 1e-6 * cfg.gamma_peak);
        }
    }
}

TEST_CASE("intensities") {
    auto cfg = aligned();
    SUBCASE("no wire: D and A add to one") {
        cfg.gamma_peak = 0.0;
        const auto m = intensities(apply_wire(two_slit_field(cfg), cfg));
        for (const auto& s : m.samples) CHECK(std::abs(s.d + s.a - 1.0) < 1e-14);
    }
    SUBCASE("wire centre") {
        const auto f = apply_wire(two_slit_field(cfg), cfg);
        const auto m = intensities(f);
        const auto k = at(f, 0.0);
        CHECK(m.samples[k].d == doctest::Approx(std::exp(-12.0)).epsilon(1e-13));
        CHECK(m.samples[k].a < 1e-30);
    }
    SUBCASE("closed form and isometry at every sample") {
        cfg.gamma_profile = GammaProfile::Gaussian;
        cfg.z = 1.3;
        const auto f = apply_wire(two_slit_field(cfg), cfg);
        const auto m = intensities(f);
        const auto m_da = intensities(to_diagonal_basis(f));
        for (std::size_t i = 0; i < m.samples.size(); ++i) {
            const auto& s = m.samples[i];
            const double y = m.y[i], att = std::exp(-2.0 * gamma_at(cfg, y));
            CHECK(std::abs(s.h - 0.5 * att) < 1e-15);
            CHECK(std::abs(s.v - 0.5 * att) < 1e-15);
            CHECK(std::abs(s.d - att * std::pow(std::cos(y), 2)) < 1e-15);
            CHECK(std::abs(s.a - att * std::pow(std::sin(y), 2)) < 1e-15);
            CHECK(std::abs(s.h + s.v - s.d - s.a) < 1e-15);
            CHECK(s.h >= 0.0);
            CHECK(s.a >= 0.0);
            CHECK(std::abs(m_da.samples[i].d - s.d) < 1e-15);
        }
    }
}

TEST_CASE("image cases") {
    const AfsharConfig cfg;
    AfsharConfig open = cfg;
    open.gamma_peak = 0.0;

    SUBCASE("H polarizer shows only image 1") {
        const auto [i1, i2] = image_intensities(cfg, Polarizer::H);
        CHECK(i2 == 0.0);
        CHECK(i1 > 0.0);
        const auto [v1, v2] = image_intensities(cfg, Polarizer::V);
        CHECK(v1 == 0.0);
        CHECK(v2 == i1);
    }
    SUBCASE("A polarizer barely notices the wire") {
        const auto [a1, a2] = image_intensities(cfg, Polarizer::A);
        const auto [o1, o2] = image_intensities(open, Polarizer::A);
        CHECK(a1 == a2);
        CHECK(1.0 - a1 / o1 < 0.01);
        CHECK(1.0 - a2 / o2 < 0.01);
        CHECK(a1 < o1);
    }
    SUBCASE("D polarizer is dimmer than A") {
        const auto [d1, d2] = image_intensities(cfg, Polarizer::D);
        const auto [a1, a2] = image_intensities(cfg, Polarizer::A);
        CHECK(d1 == d2);
        CHECK(d1 < a1);
        CHECK(d2 < a2);
    }
    SUBCASE("flux accounting without a wire") {
        const auto [n1, n2] = image_intensities(open, Polarizer::None);
        CHECK(std::abs((n1 + n2) - 10.0 * pi) / (10.0 * pi) < 1e-3);
    }
}

TEST_CASE("property: more opacity never brightens an image") {
    qtest::Gen gen(40);
    for (auto profile : {GammaProfile::TopHat, GammaProfile::Gaussian}) {
        AfsharConfig cfg;
        cfg.samples = 1024;
        cfg.gamma_profile = profile;
        double peak = 0.0;
        std::array<std::pair<double, double>, 5> prev{};
        const std::array pols{Polarizer::None, Polarizer::H, Polarizer::V, Polarizer::D, Polarizer::A};
        for (int step = 0; step < 12; ++step) {
            cfg.gamma_peak = peak;
            for (std::size_t p = 0; p < pols.size(); ++p) {
                const auto img = image_intensities(cfg, pols[p]);
                if (step > 0) {
                    CHECK(img.first <= prev[p].first);
                    CHECK(img.second <= prev[p].second);
                }
                prev[p] = img;
            }
            peak += gen.uniform(0.0, 2.0);
        }
    }
}

TEST_CASE("property: D stays below A for any positive opacity") {
    qtest::Gen gen(41);
    for (int k = 0; k < 30; ++k) {
        AfsharConfig cfg;
        cfg.samples = 1024;
        cfg.gamma_peak = gen.uniform(1e-3, 20.0);
        cfg.kappa_y = gen.uniform(0.5, 3.0);
        cfg.gamma_profile = gen.index(2) ? GammaProfile::Gaussian : GammaProfile::TopHat;
        CHECK(image_intensities(cfg, Polarizer::D).first < image_intensities(cfg, Polarizer::A).first);
    }
}

TEST_CASE("images agree with the closed-form grid oracle") {
    for (bool gaussian : {false, true}) {
        for (double kappa : {1.0, 2.5}) {
            AfsharConfig cfg;
            cfg.kappa_y = kappa;
            cfg.gamma_profile = gaussian ? GammaProfile::Gaussian : GammaProfile::TopHat;
            const qtest::AfsharOracleConfig oc{kappa, cfg.samples, cfg.gamma_peak, gaussian};
            const std::array<std::pair<Polarizer, char>, 5> cases{
                {{Polarizer::None, 'N'}, {Polarizer::H, 'H'}, {Polarizer::V, 'V'}, {Polarizer::D, 'D'}, {Polarizer::A, 'A'}}};
            for (const auto& [p, c] : cases) {
                const auto got = image_intensities(cfg, p);
                const auto want = qtest::oracle_images(oc, c);
                CHECK(got.first == doctest::Approx(want.first).epsilon(1e-11));
                CHECK(got.second == doctest::Approx(want.second).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("frozen reductions for the default configuration") {
    std::ifstream in(QOPTICS_FIXTURE_DIR "/afshar_reductions.json");
    REQUIRE(in.good());
    const auto fx = nlohmann::json::parse(in);
    const double tol = fx["relative_tolerance"];
    const AfsharConfig cfg;
    REQUIRE(cfg.samples == fx["config"]["samples"].get<std::size_t>());
    REQUIRE(cfg.gamma_peak == fx["config"]["gamma_peak"].get<double>());
    AfsharConfig open = cfg;
    open.gamma_peak = 0.0;

    for (const auto& [key, pol] : {std::pair{"A", Polarizer::A}, std::pair{"D", Polarizer::D}}) {
        CAPTURE(key);
        const auto& row = fx[key];
        CHECK(image_intensities(cfg, pol).first == doctest::Approx(row["image"].get<double>()).epsilon(tol));
        CHECK(image_intensities(open, pol).first == doctest::Approx(row["no_wire"].get<double>()).epsilon(tol));
        CHECK(reduction(cfg, pol) == doctest::Approx(row["reduction"].get<double>()).epsilon(tol));
    }
    const auto [n1, n2] = image_intensities(cfg, Polarizer::None);
    CHECK(n1 == n2);
    CHECK(n1 == doctest::Approx(fx["none"]["image"].get<double>()).epsilon(tol));
    CHECK(reduction(cfg, Polarizer::None) == doctest::Approx(fx["none"]["reduction"].get<double>()).epsilon(tol));
}

TEST_CASE("the grid value of the A reduction sits near its continuum limit") {
    // With a top hat, 1 - I/I0 = (1 - e^{-12}) (d/2 - sin(d)/2) / (5 pi) for the
    // wire diameter d; the grid misses part of the edge cells.
    const double d = pi / 10.0;
    const double continuum = (1.0 - std::exp(-12.0)) * (d / 2.0 - std::sin(d) / 2.0) / (5.0 * pi);
    const double r = reduction(AfsharConfig{}, Polarizer::A);
    CHECK(std::abs(r - continuum) / continuum < 0.1);
    AfsharConfig fine;
    fine.samples = 65536;
    CHECK(std::abs(reduction(fine, Polarizer::A) - continuum) < std::abs(r - continuum));
}
