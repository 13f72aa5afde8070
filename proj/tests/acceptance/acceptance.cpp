// Acceptance run: one PASS/FAIL line per criterion, each with its own
// runtime budget. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "edgegov/errors.hpp"
#include "edgegov/fit/power_model.hpp"
#include "edgegov/opt/optimizer.hpp"
#include "edgegov/orch/campaign.hpp"
#include "edgegov/orch/wire.hpp"
#include "edgegov/sim/stream_sim.hpp"
#include "oracle.hpp"

using namespace edgegov;

namespace {

struct Outcome {
    bool ok{true};
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

Kilohertz mhz(std::int64_t m) { return Kilohertz::from_mhz(m); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

orch::CampaignSpec full_grid(const sim::DeviceProfile& p) {
    orch::CampaignSpec spec;
    for (auto f : p.ladder().rungs()) spec.configs.push_back({f});
    return spec;
}

std::vector<orch::BenchmarkRecord> bench(const sim::DeviceProfile& p, int reps, std::uint64_t seed) {
    orch::LoopbackTransport t(p);
    auto spec = full_grid(p);
    spec.repetitions = reps;
    spec.seed = seed;
    return orch::run_campaign(t, spec, [] { return 0.0; }).records;
}

Outcome calibration() {
    Outcome o;
    const auto p = sim::default_profile();
    const double hi = p.p_full_at(mhz(1800)), lo = p.p_full_at(mhz(600));
    if (std::abs(hi - 4.75) > 0.01) o.fail("p_full(1800 MHz) = " + std::to_string(hi));
    if (std::abs(lo - 2.0) > 0.01) o.fail("p_full(600 MHz) = " + std::to_string(lo));
    for (std::int64_t khz = 600'000; khz <= 1'200'000; khz += 1'000) {
        const double w = p.p_full_at(Kilohertz{khz});
        if (w < 2.0 - 1e-12 || w > 2.5) o.fail("p_full(" + std::to_string(khz) + " kHz) = " + std::to_string(w));
    }
    o.detail = o.ok ? "p_full(600)=" + std::to_string(lo) + " W, p_full(1800)=" + std::to_string(hi) +
                          " W, p_full(1200)=" + std::to_string(p.p_full_at(mhz(1200))) + " W"
                    : o.detail;
    return o;
}

Outcome efficiency_peak() {
    Outcome o;
    const auto m = fit::fit(bench(sim::default_profile().with_noise(0.0), 1, 0));
    const auto e = fit::efficiency(m);
    const auto f = m.ladder()[static_cast<std::size_t>(e.best_row)];
    const int u = m.loads()[static_cast<std::size_t>(e.best_col)];
    if (f != mhz(1500) || u != 100) o.fail("argmax at " + to_string(f) + ", " + std::to_string(u) + "%");
    const auto full = e.values.col(e.values.cols() - 1);
    int direction_changes = 0;
    for (Eigen::Index i = 2; i < full.size(); ++i)
        if ((full(i) - full(i - 1) > 0) != (full(i - 1) - full(i - 2) > 0)) ++direction_changes;
    if (direction_changes != 1 || full(1) <= full(0)) o.fail("full-load efficiency curve is not unimodal");
    const double e1500 = full(static_cast<Eigen::Index>(m.ladder().index_of(mhz(1500))));
    const double e1800 = full(static_cast<Eigen::Index>(m.ladder().index_of(mhz(1800))));
    if (!(e1800 < e1500)) o.fail("1800 MHz efficiency not below 1500 MHz");
    if (o.ok) o.detail = "argmax (1500 MHz, 100%), e(1800)/e(1500)=" + std::to_string(e1800 / e1500);
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    int feasible = 0, total = 0;
    for (int pi = 0; pi < 100; ++pi) {
        const auto p = oracle::random_profile(rng);
        const auto rungs = opt::characterize(p);
        const auto oracle_rungs = oracle::rungs_of(p);
        for (int si = 0; si < 100; ++si, ++total) {
            const auto [d, k] = oracle::random_stream(rng, p.throughput_at(p.ladder().highest()));
            const auto r = opt::optimize(rungs, core::StreamSpec::make(d, k));
            const auto want = oracle::brute_force(oracle_rungs, d, k);
            if (r.feasible() != want.has_value()) {
                o.fail("feasibility mismatch at profile " + std::to_string(pi) + ", stream " + std::to_string(si));
                continue;
            }
            if (!want) continue;
            ++feasible;
            if (r.best->config.freq.value != want->khz || !rel_close(r.best->avg_power, want->avg_power, 1e-9))
                o.fail("rung/power mismatch at profile " + std::to_string(pi) + ", stream " + std::to_string(si));
        }
    }
    if (o.ok) o.detail = std::to_string(total) + " cases, " + std::to_string(feasible) + " feasible";
    return o;
}

Outcome lowest_rung_optimal() {
    Outcome o;
    const auto p = sim::default_profile();
    const auto rungs = opt::characterize(p);
    const double top = p.throughput_at(p.ladder().highest());
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // 20 token periods x 50 demands each; demands sorted so power can be
    // checked as k decreases with d fixed.
    int checked = 0;
    for (int di = 0; di < 20; ++di) {
        const double d = std::pow(10.0, -3.0 + 4.0 * u(rng));
        std::vector<double> ks(50);
        for (auto& k : ks) k = d * top * u(rng);
        std::sort(ks.begin(), ks.end(), std::greater<>());
        double prev = INFINITY;
        for (double k : ks) {
            const auto r = opt::optimize(rungs, core::StreamSpec::make(d, k));
            ++checked;
            if (!r.feasible()) {
                o.fail("feasible stream reported infeasible");
                continue;
            }
            Kilohertz lowest{};
            for (const auto& rc : rungs)
                if (k / rc.throughput <= d) {
                    lowest = rc.config.freq;
                    break;
                }
            if (r.best->config.freq != lowest)
                o.fail("chose " + to_string(r.best->config.freq) + ", lowest feasible is " + to_string(lowest));
            if (r.best->avg_power > prev) o.fail("avg_power rose as k decreased");
            prev = r.best->avg_power;
        }
    }
    if (o.ok) o.detail = std::to_string(checked) + " streams, lowest feasible rung every time";
    return o;
}

Outcome closed_form_agreement() {
    Outcome o;
    const auto p = sim::default_profile().with_noise(0.0);
    const auto stream = core::StreamSpec::make(0.8, 0.7 * 0.8 * p.throughput_at(mhz(1100)));
    int rungs_checked = 0;
    for (auto f : p.ladder().rungs()) {
        const auto plan = core::make_plan(stream, {f}, p.throughput_at(f), {p.p_full_at(f)}, {p.p_idle_at(f)});
        if (!core::is_feasible(plan)) continue;
        const auto& sp = std::get<core::SchedulePlan>(plan);
        const auto trace = sim::simulate_stream(p, core::NodeConfig{f}, stream, 1000, 16);
        ++rungs_checked;
        if (!rel_close(trace.energy, 1000.0 * sp.energy_per_token, 1e-9))
            o.fail(to_string(f) + ": simulated " + std::to_string(trace.energy) + " J vs " +
                   std::to_string(1000.0 * sp.energy_per_token) + " J");
    }
    if (rungs_checked == 0) o.fail("no feasible rung");
    if (o.ok) o.detail = std::to_string(rungs_checked) + " feasible rungs agree";
    return o;
}

Outcome governor_ordering() {
    Outcome o;
    const auto p = sim::default_profile();
    const auto stream = core::StreamSpec::make(1.0, 0.9 * p.throughput_at(mhz(900)));
    const auto best = opt::optimize(p, stream);
    if (!best.feasible()) {
        o.fail("stream infeasible");
        return o;
    }
    const auto pin = best.best->config.freq;
    const auto cmp = opt::compare_governors(
        p, stream, 1000, {sim::governor::Performance{}, sim::governor::Ondemand{}, sim::governor::Userspace{pin}});
    const double perf = cmp.rows[0].energy, ond = cmp.rows[1].energy, user = cmp.rows[2].energy;
    const double base = *cmp.baseline_energy;
    if (!(perf > ond)) o.fail("performance " + std::to_string(perf) + " J not above ondemand " + std::to_string(ond));
    if (!(ond >= base * (1.0 - 1e-9))) o.fail("ondemand below the optimal static baseline");
    if (!rel_close(user, base, 1e-9)) o.fail("userspace at optimum differs from baseline");
    if (o.ok)
        o.detail = "performance " + std::to_string(perf) + " J > ondemand " + std::to_string(ond) +
                   " J >= optimal " + std::to_string(base) + " J (" + to_string(pin) + ")";
    return o;
}

Outcome campaign_structure() {
    Outcome o;
    const auto p = sim::default_profile();
    auto spec = full_grid(p);
    orch::LoopbackTransport t(p);
    const auto r = orch::run_campaign(t, spec, [] { return 0.0; });
    if (r.records.size() != 143) o.fail(std::to_string(r.records.size()) + " records");
    std::size_t i = 0;
    for (const auto& c : spec.configs) {
        for (int load : {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}) {
            if (i >= r.records.size()) break;
            if (r.records[i].config != c || r.records[i].load_pct != load) o.fail("out of order at " + std::to_string(i));
            ++i;
        }
    }
    // Cardinality with repetitions and a smaller load set.
    spec.loads = {25, 75};
    spec.repetitions = 3;
    spec.configs.resize(4);
    const auto r2 = orch::run_campaign(t, spec, [] { return 0.0; });
    if (r2.records.size() != 4 * 3 * 3) o.fail("|C|(|loads|+1)reps mismatch");
    if (o.ok) o.detail = "143 records in loop order (130 loaded + 13 idle)";
    return o;
}

Outcome fit_round_trip() {
    Outcome o;
    const auto quiet = sim::default_profile().with_noise(0.0);
    const auto m = fit::fit(bench(quiet, 1, 0));
    double worst = 0.0;
    for (std::size_t i = 0; i < m.ladder().size(); ++i) {
        const auto f = m.ladder()[i];
        for (std::size_t j = 0; j < m.loads().size(); ++j) {
            const double want =
                quiet.p_idle_at(f) + (quiet.p_full_at(f) - quiet.p_idle_at(f)) * m.loads()[j] / 100.0;
            const double got = m.power_grid()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            worst = std::max(worst, std::abs(got - want) / want);
        }
    }
    if (worst > 1e-12) o.fail("noise-free deviation " + std::to_string(worst));

    const auto noisy = sim::default_profile().with_noise(0.02);
    const auto mn = fit::fit(bench(noisy, 5, 2024));
    double sq = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < mn.ladder().size(); ++i) {
        const auto f = mn.ladder()[i];
        for (std::size_t j = 0; j < mn.loads().size(); ++j) {
            const double want =
                noisy.p_idle_at(f) + (noisy.p_full_at(f) - noisy.p_idle_at(f)) * mn.loads()[j] / 100.0;
            const double rel = mn.power_grid()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / want - 1;
            sq += rel * rel;
            ++n;
        }
    }
    const double rms = std::sqrt(sq / n);
    if (rms >= 0.03) o.fail("noisy RMS " + std::to_string(rms));
    if (o.ok) o.detail = "max noise-free deviation " + sci(worst) + ", noisy RMS " + sci(rms);
    return o;
}

Outcome protocol_codec() {
    Outcome o;
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> kind(0, 6), len(0, 32), byte(0x20, 0x7e), n_cmds(0, 5);
    auto text = [&] {
        std::string s(static_cast<std::size_t>(len(rng)), ' ');
        for (auto& c : s) c = static_cast<char>(byte(rng));
        return s;
    };
    constexpr int kCases = 10'000;
    for (int i = 0; i < kCases; ++i) {
        orch::WireMessage m;
        m.kind = static_cast<orch::MessageKind>(kind(rng));
        m.client_id = text();
        m.correlation_id = text();
        std::vector<std::string> cmds;
        for (int c = n_cmds(rng); c > 0; --c) cmds.push_back(text());
        m.payload = {{"commands", cmds}, {"seq", i}};
        try {
            if (orch::decode_message(orch::encode_message(m)) != m) o.fail("round trip changed message " + std::to_string(i));
        } catch (const std::exception& e) {
            o.fail(std::string("round trip threw: ") + e.what());
        }
    }
    // Expected offset: where the offending value starts.
    const std::string bad_kind = R"({"kind":"shout","client_id":"a","correlation_id":"b","payload":{}})";
    const std::string bad_client = R"({"kind":"ack","client_id":7,"correlation_id":"b"})";
    const std::string bad_payload = R"({"kind":"ack","client_id":"a","correlation_id":"b","payload":[1]})";
    const std::map<std::string, std::size_t> malformed{
        {"{", 1},
        {bad_kind, bad_kind.find("\"shout\"")},
        {bad_client, bad_client.find('7')},
        {bad_payload, bad_payload.find('[')},
    };
    for (const auto& [bytes, offset] : malformed) {
        try {
            orch::decode_message(bytes);
            o.fail("accepted malformed input " + bytes);
        } catch (const ProtocolError& e) {
            if (e.offset() != offset)
                o.fail("offset " + std::to_string(e.offset()) + " for " + bytes + ", expected " + std::to_string(offset));
        }
    }
    if (o.ok) o.detail = std::to_string(kCases) + " round trips, " + std::to_string(malformed.size()) +
                         " malformed inputs rejected at the right offset";
    return o;
}

Outcome core_invariants() {
    Outcome o;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int feasible = 0;
    constexpr int kCases = 100'000;
    for (int i = 0; i < kCases; ++i) {
        const double d = std::pow(10.0, -4.0 + 6.0 * u(rng));
        const double v = std::pow(10.0, 1.0 + 4.0 * u(rng));
        const double k = d * v * 1.1 * u(rng);
        const double idle = 0.1 + 5.0 * u(rng);
        const double full = idle + 10.0 * u(rng);
        const auto plan = core::make_plan(core::StreamSpec::make(d, k), {mhz(1000)}, v, {full}, {idle});
        if (!core::is_feasible(plan)) {
            if (k / v <= d) o.fail("feasible stream rejected");
            continue;
        }
        ++feasible;
        const auto& p = std::get<core::SchedulePlan>(plan);
        if (!rel_close(p.t_p + p.t_d, d, 1e-9)) o.fail("t_p + t_d != d");
        if (p.avg_power < idle * (1 - 1e-9) || p.avg_power > full * (1 + 1e-9)) o.fail("P_c outside [P_idle, P_full]");
        if (!rel_close(p.energy_per_token, p.avg_power * d, 1e-9)) o.fail("energy_per_token != P_c d");
    }
    if (o.ok) o.detail = std::to_string(kCases) + " evaluations, " + std::to_string(feasible) + " feasible";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    // An optional criterion number runs just that one.
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::vector<Criterion> criteria{
        {1, "calibration fidelity", 1.0, calibration},
        {2, "efficiency peak at (1500 MHz, 100%)", 5.0, efficiency_peak},
        {3, "optimizer matches exhaustive oracle", 30.0, oracle_equivalence},
        {4, "lowest feasible rung is optimal", 10.0, lowest_rung_optimal},
        {5, "simulator matches closed form", 5.0, closed_form_agreement},
        {6, "governor energy ordering", 10.0, governor_ordering},
        {7, "campaign loop structure", 5.0, campaign_structure},
        {8, "fit round trip", 10.0, fit_round_trip},
        {9, "protocol codec", 10.0, protocol_codec},
        {10, "core-model invariants", 10.0, core_invariants},
    };
    int failures = 0, ran = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.fail(std::string("threw: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed >= c.budget_s) o.fail("over budget");
        failures += o.ok ? 0 : 1;
        std::printf("%s criterion %2d: %-38s %8.3f s (limit %4.0f s)  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name,
                    elapsed, c.budget_s, o.detail.c_str());
    }
    if (ran == 0) {
        std::printf("no criterion %d\n", only);
        return 1;
    }
    std::printf("%d/%d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
