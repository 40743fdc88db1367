#include "doctest.h"

#include <filesystem>

#include "json.hpp"

#include "cqed/config.hpp"
#include "cqed/errors.hpp"
#include "cqed/io.hpp"
#include "cqed/spectra.hpp"
#include "cqed/units.hpp"

using namespace cqed;

namespace {

SpectrumSurface small_surface() {
    const SystemParams p = SystemParams::from_cooperativity(
        2.0, mhz_to_angular(3000.0), mhz_to_angular(3.0));
    const ProbeConfig probe = ProbeConfig::cavity_drive(1.0, 0.5 * p.kappa);
    return scan_2d(p, probe, linspace(-p.kappa, p.kappa, 5),
                   linspace(-10.0 * p.gamma, 10.0 * p.gamma, 7));
}

} // namespace

TEST_CASE("run configuration round-trips") {
    SUBCASE("defaults") {
        RunConfig cfg;
        const std::string ini = cfg.to_ini();
        const RunConfig back = RunConfig::from_ini(ini);
        CHECK(back == cfg);
        CHECK(back.to_ini() == ini);
    }
    SUBCASE("modified values, including non-representable decimals") {
        RunConfig cfg;
        cfg.cooperativity = 13.4;
        cfg.kappa_mhz = 2200.0;
        cfg.mode = "atom";
        cfg.exposure_ms = 0.37;
        cfg.seed = 987654321;
        cfg.noiseless = true;
        cfg.out_dir = "results/run1";
        cfg.domega_over_gamma = 1.0 / 3.0;
        const RunConfig back = RunConfig::from_ini(cfg.to_ini());
        CHECK(back == cfg);
        CHECK(back.to_ini() == cfg.to_ini());
    }
    SUBCASE("comments and blank lines are tolerated") {
        const RunConfig cfg = RunConfig::from_ini(
            "# comment\n\n[system]\n g_mhz = 42 \n; another comment\n[probe]\nmode = atom\n");
        CHECK(cfg.g_mhz == 42.0);
        CHECK(cfg.mode == "atom");
    }
    SUBCASE("parse errors carry line numbers") {
        try {
            RunConfig::from_ini("[system]\ng_mhz = 95\nbogus_key = 1\n");
            FAIL("expected InvalidInput");
        } catch (const InvalidInput &e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
            CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
        }
        CHECK_THROWS_AS(RunConfig::from_ini("[nope]\n"), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_ini("[system]\ng_mhz = abc\n"), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_ini("g_mhz = 1\n"), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_ini("[system\n"), InvalidInput);
    }
    SUBCASE("system params honour the cooperativity override") {
        RunConfig cfg;
        cfg.cooperativity = 13.4;
        const SystemParams p = cfg.system_params();
        CHECK(cooperativity(p) == doctest::Approx(13.4).epsilon(1e-12));
        cfg.cooperativity = -1.0;
        cfg.g_mhz = 345.0;
        CHECK(cfg.system_params().g == doctest::Approx(mhz_to_angular(345.0)));
    }
}

TEST_CASE("surface exports") {
    const SpectrumSurface s = small_surface();
    SUBCASE("CSV layout") {
        const std::string csv = surface_csv(s);
        std::size_t lines = 0;
        for (char c : csv) lines += (c == '\n');
        CHECK(lines == 1 + s.n_c() * s.n_a());
        CHECK(csv.rfind("delta_c_rad_s,delta_a_rad_s,delta_c_over_kappa,delta_a_over_gamma,value\n",
                        0) == 0);
    }
    SUBCASE("JSON document") {
        const auto doc = nlohmann::json::parse(surface_json(s));
        CHECK(doc["schema_version"] == 1);
        CHECK(doc["mode"] == "cavity");
        CHECK(doc["values"].size() == s.n_c());
        CHECK(doc["values"][0].size() == s.n_a());
        CHECK(doc["system"]["cooperativity"].get<double>() == doctest::Approx(2.0));
        CHECK(doc["delta_c_over_kappa"][0].get<double>() == doctest::Approx(-1.0));
    }
    SUBCASE("deterministic output") {
        CHECK(surface_csv(s) == surface_csv(s));
        CHECK(surface_json(s) == surface_json(s));
    }
}

TEST_CASE("count surfaces round-trip through CSV + sidecar") {
    const SpectrumSurface s = small_surface();
    const CountSurface counts = synthesize_counts(s, 1e4, 1e-3, 40, 31);
    const SystemParams p = s.params_used;
    const std::string csv = counts_csv(counts);
    const std::string sidecar = counts_sidecar_json(counts, &p);

    const CountSurface back = counts_from_text(csv, sidecar);
    CHECK(back.counts == counts.counts);
    CHECK(back.delta_c_grid == counts.delta_c_grid);
    CHECK(back.delta_a_grid == counts.delta_a_grid);
    CHECK(back.exposure == counts.exposure);
    CHECK(back.realisations == counts.realisations);
    REQUIRE(back.seed.has_value());
    CHECK(*back.seed == 31);
    CHECK(back.mode == counts.mode);

    SidecarParams sp{};
    REQUIRE(sidecar_system_params(sidecar, sp));
    CHECK(sp.kappa_mhz == doctest::Approx(3000.0));
    CHECK(sp.gamma_mhz == doctest::Approx(3.0));

    SUBCASE("malformed inputs are rejected with diagnostics") {
        CHECK_THROWS_AS(counts_from_text("", sidecar), InvalidInput);
        CHECK_THROWS_AS(counts_from_text(csv, "not json"), InvalidInput);
        CHECK_THROWS_AS(counts_from_text(csv, "{}"), InvalidInput);
        CHECK_THROWS_AS(counts_from_text("a,b\n1,2\n", sidecar), InvalidInput);
        CHECK_THROWS_AS(counts_from_text("h,h,h\n1,2,3.5\n", sidecar), InvalidInput);
        CHECK_THROWS_AS(counts_from_text("h,h,h\n1,2,-3\n", sidecar), InvalidInput);
        auto doc = nlohmann::json::parse(sidecar);
        doc["delta_c_rad_s"] = {1.0, 1.0, 2.0};  // not strictly increasing
        CHECK_THROWS_AS(counts_from_text(csv, doc.dump()), InvalidInput);
    }
}

TEST_CASE("fit result JSON") {
    FitResult fit;
    fit.c_hat = 6.6;
    fit.amplitude_hat = 123.25;
    fit.residual_norm = 1.02;
    fit.iterations = 17;
    fit.converged = true;
    fit.covariance = {{{1e-4, 2e-6}, {2e-6, 3.0}}};
    const auto doc = nlohmann::json::parse(fit_result_json(fit));
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["c_hat"].get<double>() == 6.6);
    CHECK(doc["converged"].get<bool>());
    CHECK(doc["covariance"][0][1].get<double>() == 2e-6);
}

TEST_CASE("trajectory CSV") {
    Trajectory traj;
    traj.times = {0.0, 1e-9, 2e-9};
    traj.a_t = {{1.0, 0.0}, {0.5, -0.25}, {0.25, -0.125}};
    traj.sigma_t = {{0.0, 0.0}, {0.1, 0.2}, {0.05, 0.1}};
    const std::string csv = trajectory_csv(traj);
    CHECK(csv.rfind("t_s,re_a,im_a,re_sigma,im_sigma\n", 0) == 0);
    CHECK(csv.find("1e-09,0.5,-0.25,0.1,0.2\n") != std::string::npos);
}

TEST_CASE("SVG heatmaps") {
    const SpectrumSurface s = small_surface();
    std::vector<double> xs(s.delta_c_grid), ys(s.delta_a_grid);
    HeatmapOptions options;
    options.x_label = "x";
    options.y_label = "y";
    const std::string svg = svg_heatmap({{&s.values, "panel"}}, xs, ys, options);
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t rects = 0;
    for (std::size_t pos = svg.find("<rect"); pos != std::string::npos;
         pos = svg.find("<rect", pos + 1)) {
        ++rects;
    }
    CHECK(rects >= s.values.size());
    CHECK(svg == svg_heatmap({{&s.values, "panel"}}, xs, ys, options));

    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS(svg_heatmap({{&wrong, "bad"}}, xs, ys, options), InvalidInput);

    options.overlay = {{xs.front(), ys.front()}, {xs.back(), ys.back()}};
    const std::string with_overlay = svg_heatmap({{&s.values, "panel"}}, xs, ys, options);
    CHECK(with_overlay.find("<polyline") != std::string::npos);
}

TEST_CASE("text file round trip creates directories") {
    const auto dir = std::filesystem::temp_directory_path() / "cqed_io_test";
    std::filesystem::remove_all(dir);
    const std::string path = (dir / "nested" / "file.txt").string();
    write_text_file(path, "hello\n");
    CHECK(read_text_file(path) == "hello\n");
    CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), InvalidInput);
    std::filesystem::remove_all(dir);
}

TEST_CASE("format_double is stable") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3000.0) == "3000");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    CHECK(format_double_full(1.0 / 3.0) == "0.33333333333333331");
}
