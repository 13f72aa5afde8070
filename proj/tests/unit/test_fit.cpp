#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "edgegov/errors.hpp"
#include "edgegov/fit/power_model.hpp"
#include "edgegov/orch/campaign.hpp"

using namespace edgegov;
using namespace edgegov::fit;

namespace {

std::vector<core::NodeConfig> all_rungs(const sim::DeviceProfile& p) {
    std::vector<core::NodeConfig> out;
    for (auto f : p.ladder().rungs()) out.push_back({f});
    return out;
}

std::vector<orch::BenchmarkRecord> bench(const sim::DeviceProfile& p, int reps = 1, std::uint64_t seed = 0) {
    orch::LoopbackTransport t(p);
    orch::CampaignSpec spec;
    spec.configs = all_rungs(p);
    spec.repetitions = reps;
    spec.seed = seed;
    return orch::run_campaign(t, spec, [] { return 0.0; }).records;
}

Kilohertz mhz(std::int64_t m) { return Kilohertz::from_mhz(m); }

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("noise-free fit recovers the generator") {
    const auto p = sim::default_profile().with_noise(0.0);
    const auto m = fit::fit(bench(p));
    REQUIRE(m.power_grid().rows() == 13);
    REQUIRE(m.power_grid().cols() == 11);
    CHECK(m.warnings().empty());
    for (std::size_t i = 0; i < m.ladder().size(); ++i) {
        const auto f = m.ladder()[i];
        CHECK(rel_close(m.throughput_curve()(static_cast<Eigen::Index>(i)), p.throughput_at(f), 1e-12));
        for (std::size_t j = 0; j < m.loads().size(); ++j) {
            const double u = m.loads()[j];
            const double want = p.p_idle_at(f) + (p.p_full_at(f) - p.p_idle_at(f)) * u / 100.0;
            CHECK(rel_close(m.power_grid()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), want, 1e-12));
        }
    }
}

TEST_CASE("fit on a single config with idle and full load") {
    const auto p = sim::default_profile().with_noise(0.0);
    orch::LoopbackTransport t(p);
    orch::CampaignSpec spec;
    spec.configs = {{mhz(1200)}};
    spec.loads = {100};
    const auto m = fit::fit(orch::run_campaign(t, spec).records);
    CHECK(m.ladder().size() == 1);
    CHECK(m.loads() == std::vector<int>{0, 100});
    const double mid = 0.5 * (p.p_idle_at(mhz(1200)) + p.p_full_at(mhz(1200)));
    CHECK(query(m, mhz(1200), 50.0) == doctest::Approx(mid).epsilon(1e-12));
    CHECK(query(m, mhz(600), 50.0) == doctest::Approx(mid).epsilon(1e-12));
}

TEST_CASE("duplicated repetitions leave the fit unchanged") {
    const auto p = sim::default_profile().with_noise(0.0);
    const auto m1 = fit::fit(bench(p, 1));
    const auto m3 = fit::fit(bench(p, 3));
    CHECK((m1.power_grid() - m3.power_grid()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fit rejects an incomplete grid and lists the gaps") {
    auto records = bench(sim::default_profile());
    records.erase(std::remove_if(records.begin(), records.end(),
                                 [](const auto& r) {
                                     return (r.config.freq == mhz(700) && r.load_pct == 30) ||
                                            (r.config.freq == mhz(1600) && r.load_pct == 0);
                                 }),
                  records.end());
    try {
        fit::fit(records);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("700000 kHz, 30%") != std::string::npos);
        CHECK(msg.find("1600000 kHz, 0%") != std::string::npos);
    }
    CHECK_THROWS_AS(fit::fit({}), FormatError);
}

TEST_CASE("fit warns about non-physical data instead of failing") {
    auto records = bench(sim::default_profile().with_noise(0.0));
    for (auto& r : records)
        if (r.config.freq == mhz(900) && r.load_pct == 0) r.power = 10.0;
    const auto m = fit::fit(records);
    CHECK_FALSE(m.warnings().empty());
}

TEST_CASE("efficiency grid on the default profile") {
    const auto m = fit::fit(bench(sim::default_profile().with_noise(0.0)));
    const auto e = efficiency(m);
    CHECK(m.ladder()[static_cast<std::size_t>(e.best_row)] == mhz(1500));
    CHECK(m.loads()[static_cast<std::size_t>(e.best_col)] == 100);
    CHECK(e.values(e.best_row, e.best_col) == 1.0);
    CHECK(e.values.maxCoeff() == 1.0);
    CHECK(e.values.minCoeff() >= 0.0);
    CHECK(e.values.col(0).isZero(0.0));
    CHECK((e.values.array() == 1.0).count() == 1);

    // Unimodal along the full-load column, 1800 strictly below 1500.
    const auto full = e.values.col(e.values.cols() - 1);
    for (Eigen::Index i = 1; i <= e.best_row; ++i) CHECK(full(i) > full(i - 1));
    for (Eigen::Index i = e.best_row + 1; i < full.size(); ++i) CHECK(full(i) < full(i - 1));
}

TEST_CASE("efficiency rejects non-positive power") {
    const auto base = fit::fit(bench(sim::default_profile().with_noise(0.0)));
    Eigen::MatrixXd grid = base.power_grid();
    grid(3, 4) = 0.0;
    const PowerModel m(base.ladder(), base.loads(), grid, base.throughput_curve());
    CHECK_THROWS_AS(efficiency(m), DomainError);
}

TEST_CASE("query interpolation") {
    const auto p = sim::default_profile().with_noise(0.0);
    const auto m = fit::fit(bench(p));
    CHECK(query(m, mhz(700), 30) == m.power_grid()(1, 3));
    CHECK(query(m, mhz(1800), 100) == m.power_grid()(12, 10));
    CHECK(query(m, Kilohertz{650'000}, 100) ==
          doctest::Approx(0.5 * (m.power_grid()(0, 10) + m.power_grid()(1, 10))).epsilon(1e-12));
    CHECK(query(m, mhz(700), 35) ==
          doctest::Approx(0.5 * (m.power_grid()(1, 3) + m.power_grid()(1, 4))).epsilon(1e-12));
    CHECK(query(m, mhz(300), 100) == m.power_grid()(0, 10));
    CHECK(query(m, mhz(2500), 150) == m.power_grid()(12, 10));
    CHECK(query(m, mhz(600), -5) == m.power_grid()(0, 0));
    CHECK(query_throughput(m, mhz(1500)) == doctest::Approx(1500.0).epsilon(1e-12));
    CHECK(query_throughput(m, Kilohertz{1'550'000}) == doctest::Approx(1550.0).epsilon(1e-12));
}

TEST_CASE("noisy fit stays close to the generator") {
    const auto p = sim::default_profile();
    const auto m = fit::fit(bench(p, 5, 42));
    double sq = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < m.ladder().size(); ++i) {
        const auto f = m.ladder()[i];
        for (std::size_t j = 0; j < m.loads().size(); ++j) {
            const double u = m.loads()[j];
            const double want = p.p_idle_at(f) + (p.p_full_at(f) - p.p_idle_at(f)) * u / 100.0;
            const double rel = m.power_grid()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / want - 1.0;
            sq += rel * rel;
            ++n;
        }
    }
    CHECK(std::sqrt(sq / n) < 0.03);
}

TEST_CASE("model JSON round trip and validation") {
    const auto m = fit::fit(bench(sim::default_profile(), 2, 5));
    const auto back = model_from_json(to_json(m));
    CHECK(back.power_grid() == m.power_grid());
    CHECK(back.throughput_curve() == m.throughput_curve());
    CHECK(back.loads() == m.loads());
    CHECK(std::ranges::equal(back.ladder().rungs(), m.ladder().rungs()));

    const auto path = (std::filesystem::temp_directory_path() / "edgegov_model_test.json").string();
    save_model(m, path);
    CHECK(load_model(path).power_grid() == m.power_grid());
    std::filesystem::remove(path);

    auto j = to_json(m);
    j["power_grid_w"].erase(0);
    CHECK_THROWS_AS(model_from_json(j), FormatError);
    j = to_json(m);
    j.erase("loads");
    CHECK_THROWS_AS(model_from_json(j), FormatError);
    j = to_json(m);
    j["idle_w"][0] = 99.0;
    CHECK_THROWS_AS(model_from_json(j), FormatError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}
