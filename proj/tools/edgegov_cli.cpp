// edgegov: benchmark, fit, optimize, simulate and report from the command line.
//
// Subcommands compose through files only. Every output is written to a temp
// file and renamed into place.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "edgegov/errors.hpp"
#include "edgegov/fit/power_model.hpp"
#include "edgegov/io/atomic_file.hpp"
#include "edgegov/opt/optimizer.hpp"
#include "edgegov/orch/broker.hpp"
#include "edgegov/orch/campaign.hpp"
#include "edgegov/orch/mqtt.hpp"
#include "edgegov/orch/records_csv.hpp"

namespace fs = std::filesystem;
using namespace edgegov;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

// Reads `--config` files shaped like {"bench": {"duration": 5, "configs": [600000]}}.
// Top-level scalars bind to global options; nested objects bind to the
// subcommand of the same name. Explicit flags still win.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(input);
        } catch (const nlohmann::json::parse_error& e) {
            throw CLI::ConversionError(std::string("config file: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file: top level must be an object");
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void collect(const nlohmann::json& j, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                collect(value, nested, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(value));
            out.push_back(std::move(item));
        }
    }

    static nlohmann::json dump(const CLI::App* app, bool default_also) {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
            const auto& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& res = opt->results();
                j[name] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            auto nested = dump(sub, default_also);
            if (!nested.empty()) j[sub->get_name()] = nested;
        }
        return j;
    }
};

// "builtin", an existing path, or a name looked up in EDGEGOV_PROFILE_DIR
// (colon-separated) as <name> or <name>.json.
sim::DeviceProfile resolve_profile(const std::string& spec) {
    if (spec == "builtin") return sim::default_profile();
    if (fs::is_regular_file(spec)) return sim::load_profile(spec);
    std::vector<std::string> searched;
    if (const char* dirs = std::getenv("EDGEGOV_PROFILE_DIR")) {
        std::stringstream ss(dirs);
        std::string dir;
        while (std::getline(ss, dir, ':')) {
            if (dir.empty()) continue;
            for (const auto& candidate : {fs::path(dir) / spec, fs::path(dir) / (spec + ".json")}) {
                if (fs::is_regular_file(candidate)) return sim::load_profile(candidate.string());
                searched.push_back(candidate.string());
            }
        }
    }
    std::string msg = "profile '" + spec + "' not found";
    if (!searched.empty()) {
        msg += " (searched";
        for (const auto& s : searched) msg += " " + s;
        msg += ")";
    }
    throw IoError(msg);
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct BenchArgs {
    std::string profile{"builtin"};
    std::vector<std::int64_t> configs;
    std::vector<int> loads;
    double duration{15.0};
    double settle{0.0};
    int reps{1};
    std::uint64_t seed{0};
    std::optional<double> noise;
    std::string out;
    bool no_timestamps{false};
    std::string transport{"loopback"};
    std::string broker;
};

// Connection file: {"host", "port", "client_id", "sut_id", "timeout_ms"}.
std::unique_ptr<orch::SutTransport> open_broker(const std::string& path) {
    if (path.empty()) throw DomainError("broker", "--transport broker needs --broker <connection.json>");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    orch::mqtt::ConnectionOptions opts;
    std::string sut;
    std::chrono::milliseconds timeout{30000};
    try {
        opts.host = j.value("host", opts.host);
        opts.port = j.value("port", opts.port);
        opts.client_id = j.value("client_id", opts.client_id);
        sut = j.at("sut_id").get<std::string>();
        timeout = std::chrono::milliseconds(j.value("timeout_ms", std::int64_t{30000}));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    auto channel = std::make_unique<orch::mqtt::TcpChannel>(opts);
    auto transport = std::make_unique<orch::BrokerTransport>(std::move(channel), sut, timeout);
    std::cerr << "waiting for " << sut << " to register on " << opts.host << ":" << opts.port << "\n";
    transport->await_registration();
    return transport;
}

int run_bench(const BenchArgs& a) {
    orch::CampaignSpec spec;
    std::unique_ptr<orch::SutTransport> transport;
    if (a.transport == "loopback") {
        auto profile = resolve_profile(a.profile);
        if (a.noise) profile = profile.with_noise(*a.noise);
        for (auto f : profile.ladder().rungs()) spec.configs.push_back({f});
        transport = std::make_unique<orch::LoopbackTransport>(profile);
    } else if (a.transport == "broker") {
        for (auto f : sim::default_profile().ladder().rungs()) spec.configs.push_back({f});
    } else {
        throw DomainError("transport", "expected loopback or broker, got '" + a.transport + "'");
    }
    if (!a.configs.empty()) {
        spec.configs.clear();
        for (auto khz : a.configs) spec.configs.push_back({Kilohertz{khz}});
    }
    if (!a.loads.empty()) spec.loads = a.loads;
    spec.stress_duration = a.duration;
    spec.settle_wait = a.settle;
    spec.repetitions = a.reps;
    spec.seed = a.seed;
    spec.validate();
    if (!transport) transport = open_broker(a.broker);

    const orch::Clock clock = a.no_timestamps ? orch::Clock([] { return 0.0; }) : orch::Clock(orch::wall_clock);
    const auto result = orch::run_campaign(*transport, spec, clock);
    orch::persist_records(result.records, a.out);

    for (const auto& s : result.skipped) std::cerr << "skipped " << s.reason << "\n";
    if (result.aborted) std::cerr << "aborted at " << result.aborted->reason << "\n";
    std::cerr << "wrote " << result.records.size() << " records to " << a.out << "\n";
    return result.complete() ? kExitOk : kExitPartial;
}

int run_fit(const std::string& records_path, const std::string& out) {
    const auto model = fit::fit(orch::load_records(records_path));
    for (const auto& w : model.warnings()) std::cerr << "warning: " << w << "\n";
    fit::save_model(model, out);
    return kExitOk;
}

struct OptimizeArgs {
    std::string model;
    std::string profile;
    std::optional<double> d, k;
    std::vector<double> sweep_d, sweep_k;
    std::string out;
};

int run_optimize(const OptimizeArgs& a) {
    const auto rungs = a.model.empty() ? opt::characterize(resolve_profile(a.profile))
                                       : opt::characterize(fit::load_model(a.model));
    std::vector<double> ds = a.sweep_d, ks = a.sweep_k;
    if (ds.empty() != ks.empty()) throw DomainError("sweep", "--sweep-d and --sweep-k go together");
    if (ds.empty()) {
        if (!a.d || !a.k) throw DomainError("stream", "give --d and --k, or --sweep-d and --sweep-k");
        ds = {*a.d};
        ks = {*a.k};
    }
    io::write_atomic(a.out, opt::sweep_to_csv(opt::sweep(rungs, ds, ks)));
    return kExitOk;
}

struct SimulateArgs {
    std::string profile{"builtin"};
    std::string policy{"all"};
    double d{1.0};
    double k{0.0};
    std::size_t tokens{1000};
    std::size_t queue{16};
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    const auto profile = resolve_profile(a.profile);
    const auto stream = core::StreamSpec::make(a.d, a.k);
    std::vector<sim::GovernorPolicy> policies;
    if (a.policy == "all") {
        const auto best = opt::optimize(profile, stream);
        policies = opt::default_policies(best.feasible() ? best.best->config.freq : profile.ladder().highest());
    } else {
        policies.push_back(sim::parse_policy(a.policy));
    }
    const auto cmp = opt::compare_governors(profile, stream, a.tokens, policies, a.queue);
    auto j = cmp.to_json();
    j["stream"] = {{"d_s", stream.d}, {"k_bops", stream.k}, {"tokens", a.tokens}, {"queue_capacity", a.queue}};
    j["profile"] = profile.name();
    io::write_atomic(a.out, dump_json(j));
    return kExitOk;
}

int run_report(const std::string& model_path, const std::string& out) {
    const auto model = fit::load_model(model_path);
    const auto eff = fit::efficiency(model);
    std::string csv = "freq_khz,load_pct,efficiency_norm\n";
    for (std::size_t i = 0; i < model.ladder().size(); ++i)
        for (std::size_t j = 0; j < model.loads().size(); ++j)
            csv += std::to_string(model.ladder()[i].value) + "," + std::to_string(model.loads()[j]) + "," +
                   io::format_double(eff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + "\n";
    io::write_atomic(out, csv);
    const auto best_f = model.ladder()[static_cast<std::size_t>(eff.best_row)];
    std::cerr << "peak efficiency at " << to_string(best_f) << ", "
              << model.loads()[static_cast<std::size_t>(eff.best_col)] << "% load\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DVFS benchmarking, power modelling and frequency optimisation for edge nodes", "edgegov"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file with option values (flags take precedence)");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Run a benchmarking campaign and write records CSV");
    b->add_option("--profile", bench.profile, "builtin, a JSON path, or a name in EDGEGOV_PROFILE_DIR")
        ->capture_default_str();
    b->add_option("--configs", bench.configs, "Frequencies in kHz (default: every rung)")->delimiter(',');
    b->add_option("--loads", bench.loads, "Loads in percent, ascending (default: 10..100)")->delimiter(',');
    b->add_option("--duration", bench.duration, "Stressor duration per cell, seconds")->capture_default_str();
    b->add_option("--settle", bench.settle, "Wait before and after each stressor run, seconds")
        ->capture_default_str();
    b->add_option("--reps", bench.reps, "Repetitions per cell")->capture_default_str();
    b->add_option("--seed", bench.seed, "Campaign seed")->capture_default_str();
    b->add_option("--noise", bench.noise, "Override the profile's relative noise sd");
    b->add_option("--out", bench.out, "Records CSV")->required();
    b->add_flag("--no-timestamps", bench.no_timestamps, "Write timestamp 0 for reproducible output");
    b->add_option("--transport", bench.transport, "loopback or broker")->capture_default_str();
    b->add_option("--broker", bench.broker, "Broker connection JSON for --transport broker");

    std::string fit_records, fit_out;
    auto* f = app.add_subcommand("fit", "Fit a power model from records CSV");
    f->add_option("--records", fit_records, "Records CSV")->required();
    f->add_option("--out", fit_out, "Model JSON")->required();

    OptimizeArgs optimize;
    auto* o = app.add_subcommand("optimize", "Pick the lowest-power rung for a stream or a sweep of streams");
    auto* model_opt = o->add_option("--model", optimize.model, "Model JSON");
    auto* profile_opt = o->add_option("--profile", optimize.profile, "Use a device profile instead of a model");
    model_opt->excludes(profile_opt);
    o->add_option("--d", optimize.d, "Token period, seconds");
    o->add_option("--k", optimize.k, "Work per token, bogo ops");
    o->add_option("--sweep-d", optimize.sweep_d, "Token periods for a sweep")->delimiter(',');
    o->add_option("--sweep-k", optimize.sweep_k, "Work values for a sweep")->delimiter(',');
    o->add_option("--out", optimize.out, "Sweep CSV")->required();

    SimulateArgs simulate;
    auto* s = app.add_subcommand("simulate", "Simulate governors on a token stream");
    s->add_option("--profile", simulate.profile, "builtin, a JSON path, or a name in EDGEGOV_PROFILE_DIR")
        ->capture_default_str();
    s->add_option("--policy", simulate.policy,
                  "all, or one of performance, powersave, userspace:<khz>, ondemand[:up], "
                  "conservative[:up:down], schedutil[:headroom]")
        ->capture_default_str();
    s->add_option("--d", simulate.d, "Token period, seconds")->capture_default_str();
    s->add_option("--k", simulate.k, "Work per token, bogo ops")->capture_default_str();
    s->add_option("--tokens", simulate.tokens, "Tokens to simulate")->capture_default_str();
    s->add_option("--queue", simulate.queue, "Wait-queue capacity")->capture_default_str();
    s->add_option("--out", simulate.out, "Comparison JSON")->required();

    std::string report_model, report_out;
    auto* r = app.add_subcommand("report", "Write the normalised efficiency heatmap");
    r->add_option("--model", report_model, "Model JSON")->required();
    r->add_option("--out", report_out, "Heatmap CSV")->required();

    std::string profile_name{"builtin"}, profile_out;
    auto* p = app.add_subcommand("profile", "Export a device profile as JSON");
    p->add_option("--name", profile_name, "builtin, a JSON path, or a name in EDGEGOV_PROFILE_DIR")
        ->capture_default_str();
    p->add_option("--out", profile_out, "Profile JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*b) return run_bench(bench);
        if (*f) return run_fit(fit_records, fit_out);
        if (*o) return run_optimize(optimize);
        if (*s) return run_simulate(simulate);
        if (*r) return run_report(report_model, report_out);
        if (*p) {
            sim::save_profile(resolve_profile(profile_name), profile_out);
            return kExitOk;
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.parameter() << ": " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
