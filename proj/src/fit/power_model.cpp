#include "edgegov/fit/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "edgegov/errors.hpp"
#include "edgegov/io/atomic_file.hpp"

namespace edgegov::fit {

namespace {

// Bracketing index and weight of x on a sorted axis, clamped to the hull.
struct Bracket {
    Eigen::Index lo{0};
    double t{0.0};
};

template <class Axis>
Bracket bracket(const Axis& axis, std::size_t n, double x) {
    if (n == 1 || x <= axis(0)) return {0, 0.0};
    const auto last = static_cast<Eigen::Index>(n - 1);
    if (x >= axis(last)) return {last - 1, 1.0};
    Eigen::Index i = 0;
    while (axis(i + 1) <= x) ++i;
    if (axis(i) == x) return {i, 0.0};
    return {i, (x - axis(i)) / (axis(i + 1) - axis(i))};
}

double lerp(double a, double b, double t) {
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    return a + (b - a) * t;
}

}  // namespace

PowerModel::PowerModel(core::FrequencyLadder ladder, std::vector<int> loads, Eigen::MatrixXd power_grid,
                       Eigen::VectorXd throughput_curve, std::vector<std::string> warnings)
    : ladder_(std::move(ladder)),
      loads_(std::move(loads)),
      power_grid_(std::move(power_grid)),
      throughput_(std::move(throughput_curve)),
      warnings_(std::move(warnings)) {
    const auto rows = static_cast<Eigen::Index>(ladder_.size());
    const auto cols = static_cast<Eigen::Index>(loads_.size());
    if (power_grid_.rows() != rows || power_grid_.cols() != cols)
        throw FormatError("power_grid_w: expected " + std::to_string(rows) + "x" + std::to_string(cols) + " cells");
    if (throughput_.size() != rows) throw FormatError("throughput_bops: expected one value per rung");
    if (loads_.size() < 2 || loads_.front() != 0 || loads_.back() != 100)
        throw FormatError("loads: must include 0 and 100");
    if (std::adjacent_find(loads_.begin(), loads_.end(), [](int a, int b) { return a >= b; }) != loads_.end())
        throw FormatError("loads: must be strictly ascending");
    if (!power_grid_.allFinite() || (power_grid_.array() < 0.0).any())
        throw FormatError("power_grid_w: values must be finite and >= 0");
    if (!throughput_.allFinite() || (throughput_.array() <= 0.0).any())
        throw FormatError("throughput_bops: values must be finite and > 0");
}

double PowerModel::power(double freq_khz, double load_pct) const {
    const auto fr = bracket([&](Eigen::Index i) { return static_cast<double>(ladder_[static_cast<std::size_t>(i)].value); },
                            ladder_.size(), freq_khz);
    const auto lr = bracket([&](Eigen::Index j) { return static_cast<double>(loads_[static_cast<std::size_t>(j)]); },
                            loads_.size(), load_pct);
    const auto f1 = std::min<Eigen::Index>(fr.lo + 1, power_grid_.rows() - 1);
    const auto l1 = std::min<Eigen::Index>(lr.lo + 1, power_grid_.cols() - 1);
    const double lo = lerp(power_grid_(fr.lo, lr.lo), power_grid_(fr.lo, l1), lr.t);
    const double hi = lerp(power_grid_(f1, lr.lo), power_grid_(f1, l1), lr.t);
    return lerp(lo, hi, fr.t);
}

double PowerModel::throughput(double freq_khz) const {
    const auto fr = bracket([&](Eigen::Index i) { return static_cast<double>(ladder_[static_cast<std::size_t>(i)].value); },
                            ladder_.size(), freq_khz);
    const auto f1 = std::min<Eigen::Index>(fr.lo + 1, throughput_.size() - 1);
    return lerp(throughput_(fr.lo), throughput_(f1), fr.t);
}

PowerModel fit(std::span<const orch::BenchmarkRecord> records) {
    if (records.empty()) throw FormatError("no records to fit");
    std::set<std::int64_t> freqs;
    std::set<int> load_set{0, 100};
    struct Sum {
        double power{0.0};
        double ops{0.0};
        int n{0};
    };
    std::map<std::pair<std::int64_t, int>, Sum> cells;
    for (const auto& r : records) {
        if (!(std::isfinite(r.power) && r.power >= 0.0 && std::isfinite(r.bogo_ops_per_sec) && r.bogo_ops_per_sec >= 0.0))
            throw FormatError("record at " + std::to_string(r.config.freq.value) + " kHz, " + std::to_string(r.load_pct) +
                              "% has a negative or non-finite measurement");
        if (r.load_pct < 0 || r.load_pct > 100) throw FormatError("record load outside [0, 100]");
        freqs.insert(r.config.freq.value);
        load_set.insert(r.load_pct);
        auto& c = cells[{r.config.freq.value, r.load_pct}];
        c.power += r.power;
        c.ops += r.bogo_ops_per_sec;
        ++c.n;
    }

    std::vector<Kilohertz> rungs;
    for (auto f : freqs) rungs.emplace_back(f);
    std::vector<int> loads(load_set.begin(), load_set.end());

    std::string missing;
    for (auto f : freqs)
        for (int u : loads)
            if (!cells.count({f, u})) missing += " (" + std::to_string(f) + " kHz, " + std::to_string(u) + "%)";
    if (!missing.empty()) throw FormatError("incomplete grid, missing cells:" + missing);

    const auto rows = static_cast<Eigen::Index>(rungs.size());
    const auto cols = static_cast<Eigen::Index>(loads.size());
    Eigen::MatrixXd grid(rows, cols);
    Eigen::VectorXd throughput(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const auto& c = cells.at({rungs[static_cast<std::size_t>(i)].value, loads[static_cast<std::size_t>(j)]});
            grid(i, j) = c.power / c.n;
        }
        const auto& full = cells.at({rungs[static_cast<std::size_t>(i)].value, 100});
        throughput(i) = full.ops / full.n;
    }
    if ((throughput.array() <= 0.0).any()) throw FormatError("full-load throughput must be > 0 on every rung");

    std::vector<std::string> warnings;
    for (Eigen::Index i = 1; i < rows; ++i)
        if (throughput(i) <= throughput(i - 1))
            warnings.push_back("throughput not increasing at " + std::to_string(rungs[static_cast<std::size_t>(i)].value) +
                               " kHz");
    std::string first_cell;
    int below_idle = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 1; j < cols; ++j)
            if (grid(i, 0) > grid(i, j) && below_idle++ == 0)
                first_cell = std::to_string(rungs[static_cast<std::size_t>(i)].value) + " kHz, " +
                             std::to_string(loads[static_cast<std::size_t>(j)]) + "%";
    if (below_idle > 0)
        warnings.push_back("loaded power below idle power in " + std::to_string(below_idle) + " cell(s), first at " +
                           first_cell);

    return PowerModel(core::FrequencyLadder(std::move(rungs)), std::move(loads), std::move(grid), std::move(throughput),
                      std::move(warnings));
}

EfficiencyGrid efficiency(const PowerModel& model) {
    const auto& grid = model.power_grid();
    EfficiencyGrid out;
    out.raw = Eigen::MatrixXd::Zero(grid.rows(), grid.cols());
    double best = -1.0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.cols(); ++j) {
            const int u = model.loads()[static_cast<std::size_t>(j)];
            if (u == 0) continue;
            if (!(grid(i, j) > 0.0)) throw DomainError("power", "zero power in a loaded cell");
            out.raw(i, j) = model.throughput_curve()(i) * u / 100.0 / grid(i, j);
            if (out.raw(i, j) > best) {
                best = out.raw(i, j);
                out.best_row = i;
                out.best_col = j;
            }
        }
    }
    out.values = out.raw / best;
    out.values(out.best_row, out.best_col) = 1.0;
    return out;
}

nlohmann::json to_json(const PowerModel& m) {
    std::vector<std::int64_t> ladder;
    for (auto f : m.ladder().rungs()) ladder.push_back(f.value);
    std::vector<double> grid;
    for (Eigen::Index i = 0; i < m.power_grid().rows(); ++i)
        for (Eigen::Index j = 0; j < m.power_grid().cols(); ++j) grid.push_back(m.power_grid()(i, j));
    const Eigen::VectorXd idle = m.idle_curve();
    nlohmann::json j{{"ladder_khz", ladder},
                     {"loads", m.loads()},
                     {"power_grid_w", grid},
                     {"throughput_bops", std::vector<double>(m.throughput_curve().begin(), m.throughput_curve().end())},
                     {"idle_w", std::vector<double>(idle.begin(), idle.end())}};
    if (!m.warnings().empty()) j["warnings"] = m.warnings();
    return j;
}

PowerModel model_from_json(const nlohmann::json& j) {
    auto field = [&](const char* name) -> const nlohmann::json& {
        if (!j.contains(name)) throw FormatError(std::string("model: missing field '") + name + "'");
        if (!j.at(name).is_array()) throw FormatError(std::string("model: field '") + name + "' must be an array");
        return j.at(name);
    };
    try {
        std::vector<Kilohertz> rungs;
        for (const auto& f : field("ladder_khz")) rungs.emplace_back(f.get<std::int64_t>());
        auto loads = field("loads").get<std::vector<int>>();
        const auto flat = field("power_grid_w").get<std::vector<double>>();
        const auto tp = field("throughput_bops").get<std::vector<double>>();
        const auto idle = field("idle_w").get<std::vector<double>>();
        const auto rows = static_cast<Eigen::Index>(rungs.size()), cols = static_cast<Eigen::Index>(loads.size());
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
            throw FormatError("model: field 'power_grid_w' must hold " + std::to_string(rows * cols) + " values");
        if (static_cast<Eigen::Index>(idle.size()) != rows)
            throw FormatError("model: field 'idle_w' must hold one value per rung");
        Eigen::MatrixXd grid = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            if (grid(i, 0) != idle[static_cast<std::size_t>(i)])
                throw FormatError("model: field 'idle_w' disagrees with the 0% column of 'power_grid_w'");
        std::vector<std::string> warnings;
        if (j.contains("warnings")) warnings = j.at("warnings").get<std::vector<std::string>>();
        return PowerModel(core::FrequencyLadder(std::move(rungs)), std::move(loads), std::move(grid),
                          Eigen::Map<const Eigen::VectorXd>(tp.data(), static_cast<Eigen::Index>(tp.size())),
                          std::move(warnings));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model: ") + e.what());
    } catch (const FormatError& e) {
        const std::string what = e.what();
        if (what.rfind("model:", 0) == 0) throw;
        throw FormatError("model: " + what);
    } catch (const DomainError& e) {
        throw FormatError(std::string("model: ") + e.what());
    }
}

PowerModel load_model(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model(const PowerModel& model, const std::string& path) {
    io::write_atomic(path, to_json(model).dump(2) + "\n");
}

}  // namespace edgegov::fit
