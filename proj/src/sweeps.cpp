#include "mdiqkd/sweeps.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/design12.hpp"
#include "mdiqkd/mdi_core.hpp"
#include "mdiqkd/parallel.hpp"
#include "mdiqkd/protocol.hpp"
#include "mdiqkd/rng.hpp"
#include "mdiqkd/stats.hpp"

namespace mdiqkd {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

// Stream families; the second key component is the grid index.
constexpr std::uint64_t kAlphaUnprotectedStreams = 1;
constexpr std::uint64_t kAlphaProtectedStreams = 2;
constexpr std::uint64_t kBiasStreams = 3;  // + panel
constexpr std::uint64_t kPguessStreams = 5;


std::vector<double> numeric_column(const SweepTable& table, std::size_t col, const std::string& panel) {
    std::vector<double> out;
    for (const auto& row : table.rows) {
        if (!panel.empty()) {
            const auto* label = std::get_if<std::string>(&row.front());
            if (label == nullptr || *label != panel) continue;
        }
        if (const auto* v = std::get_if<double>(&row[col])) out.push_back(*v);
    }
    return out;
}

void add_crossing(SweepTable& table, const std::string& label, Series series, std::span<const double> xs,
                  std::span<const double> ys, double level) {
    table.crossings.push_back({label, series, first_crossing(xs, ys, level)});
}

}  // namespace

bool selected(Series series, SeriesSelection selection) {
    switch (series) {
        case Series::Common:
            return true;
        case Series::Unprotected:
            return selection != SeriesSelection::Protected;
        case Series::Protected:
            return selection != SeriesSelection::Unprotected;
    }
    return true;
}

void validate(const SweepConfig& cfg) {
    if (!std::isfinite(cfg.start) || !std::isfinite(cfg.stop)) throw std::invalid_argument("sweep range must be finite");
    if (cfg.steps < 2) throw std::invalid_argument("sweep steps must be >= 2");
    if (cfg.samples < 1) throw std::invalid_argument("sweep samples must be >= 1");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 0.5)) throw std::invalid_argument("threshold must be in (0, 0.5)");
}

std::vector<double> linear_grid(const SweepConfig& cfg) {
    validate(cfg);
    std::vector<double> grid(cfg.steps);
    const double step = (cfg.stop - cfg.start) / static_cast<double>(cfg.steps - 1);
    for (std::size_t i = 0; i < cfg.steps; ++i) grid[i] = cfg.start + step * static_cast<double>(i);
    grid.back() = cfg.stop;
    return grid;
}

SweepConfig default_alpha_config() { return {0.0, 90.0, 91}; }
SweepConfig default_bias_config() { return {0.0, 1.0, 51}; }
SweepConfig default_pguess_config() { return {0.0, 90.0, 91}; }
SweepConfig default_distance_config() { return {0.0, 1.0, 51}; }

std::vector<double> SweepTable::column(const std::string& name, const std::string& panel) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].name == name) return numeric_column(*this, c, panel);
    }
    throw std::out_of_range("SweepTable: no column " + name);
}

std::optional<double> SweepTable::crossing(const std::string& label) const {
    for (const auto& c : crossings) {
        if (c.label == label) return c.value;
    }
    throw std::out_of_range("SweepTable: no crossing " + label);
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::optional<double> first_crossing(std::span<const double> xs, std::span<const double> ys, double level) {
    if (xs.size() != ys.size()) throw std::invalid_argument("first_crossing: size mismatch");
    if (xs.empty()) return std::nullopt;
    if (ys[0] >= level) return xs[0];
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (ys[i] < level && ys[i + 1] >= level) {
            return xs[i] + (level - ys[i]) * (xs[i + 1] - xs[i]) / (ys[i + 1] - ys[i]);
        }
    }
    return std::nullopt;
}

SweepTable sweep_alpha(const SweepConfig& cfg) {
    const std::vector<double> grid = linear_grid(cfg);
    SweepTable table;
    table.command = "sweep-alpha";
    table.metadata = {{"axis", "y"},
                      {"samples", std::to_string(cfg.samples)},
                      {"seed", std::to_string(cfg.seed)},
                      {"threshold", format_number(cfg.threshold)},
                      {"grid_resolution_deg", format_number(grid[1] - grid[0])}};
    table.columns = {{"alpha_deg", Series::Common},
                     {"qber_unprotected_exact", Series::Unprotected},
                     {"qber_unprotected_sampled", Series::Unprotected},
                     {"se_unprotected_sampled", Series::Unprotected},
                     {"qber_protected_exact", Series::Protected},
                     {"qber_protected_sampled", Series::Protected},
                     {"se_protected_sampled", Series::Protected}};
    table.rows.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t j) {
        const double alpha = grid[j] * kDegree;
        const Mat2d u = su2_from_axis_angle(canonical_rotation(Eigen::Vector3d::UnitY(), alpha));
        const NoiseModel model = FixedAxisSweep{Eigen::Vector3d::UnitY(), alpha};
        const QberEstimate unprotected =
            estimate_qber_z(model, false, cfg.samples, cfg.seed, stream_key(kAlphaUnprotectedStreams, j, 0));
        const QberEstimate protected_ =
            estimate_qber_z(model, true, cfg.samples, cfg.seed, stream_key(kAlphaProtectedStreams, j, 0));
        table.rows[j] = {grid[j],
                         qber_exact(u),
                         unprotected.qber,
                         unprotected.standard_error,
                         qber_protected_exact(u),
                         protected_.qber,
                         protected_.standard_error};
    });
    for (const auto& [name, series] : std::vector<std::pair<std::string, Series>>{
             {"qber_unprotected_exact", Series::Unprotected},
             {"qber_unprotected_sampled", Series::Unprotected},
             {"qber_protected_exact", Series::Protected},
             {"qber_protected_sampled", Series::Protected}}) {
        add_crossing(table, "alpha_deg." + name, series, grid, table.column(name), cfg.threshold);
    }
    return table;
}

SweepTable sweep_bias(const SweepConfig& cfg, double jitter_sigma) {
    const std::vector<double> grid = linear_grid(cfg);
    if (!(jitter_sigma >= 0.0)) throw std::invalid_argument("jitter must be >= 0");
    const TwirlSetd& set = standard_twirl_set();
    SweepTable table;
    table.command = "sweep-bias";
    table.metadata = {{"jitter_sigma", format_number(jitter_sigma)},
                      {"samples", std::to_string(cfg.samples)},
                      {"seed", std::to_string(cfg.seed)},
                      {"threshold", format_number(cfg.threshold)},
                      {"grid_resolution_rad", format_number(grid[1] - grid[0])}};
    table.columns = {{"panel", Series::Common},
                     {"bias_rad", Series::Common},
                     {"qber_unprotected", Series::Unprotected},
                     {"se_unprotected", Series::Unprotected},
                     {"qber_protected", Series::Protected},
                     {"se_protected", Series::Protected},
                     {"qber_protected_beacon", Series::Protected},
                     {"se_protected_beacon", Series::Protected}};
    const std::array<BiasAxis, 2> panels = {BiasAxis::Y, BiasAxis::Z};
    table.rows.resize(2 * grid.size());
    parallel_for(table.rows.size(), [&](std::size_t job) {
        const std::size_t p = job / grid.size();
        const std::size_t j = job % grid.size();
        const NoiseModel model = FixedAxisBias{panels[p], grid[j], jitter_sigma};
        RunningMean unprotected, protected_, beacon;
        for (std::uint64_t i = 0; i < cfg.samples; ++i) {
            RngStream rng(cfg.seed, stream_key(kBiasStreams + p, j, i));
            const Mat2d u = su2_from_axis_angle(sample_rotation(model, rng));
            unprotected.add(qber_exact(u));
            protected_.add(qber_protected_exact(u, set));
            const Mat2d& v = set[rng.uniform_index(static_cast<std::uint32_t>(set.size()))];
            beacon.add(qber_exact(v.adjoint() * u * v));
        }
        table.rows[job] = {std::string(p == 0 ? "y" : "z"),
                           grid[j],
                           unprotected.mean(),
                           unprotected.standard_error(),
                           protected_.mean(),
                           protected_.standard_error(),
                           beacon.mean(),
                           beacon.standard_error()};
    });
    for (const std::string panel : {"y", "z"}) {
        for (const auto& [name, series] : std::vector<std::pair<std::string, Series>>{
                 {"qber_unprotected", Series::Unprotected},
                 {"qber_protected", Series::Protected},
                 {"qber_protected_beacon", Series::Protected}}) {
            add_crossing(table, "bias_rad." + panel + "." + name, series, grid, table.column(name, panel),
                         cfg.threshold);
        }
    }
    return table;
}

SweepTable sweep_pguess(const SweepConfig& cfg) {
    const std::vector<double> grid = linear_grid(cfg);
    SweepTable table;
    table.command = "sweep-pguess";
    table.metadata = {{"good_axis", "0.707106781,0,0.707106781"},
                      {"bad_axis", "0,1,0"},
                      {"samples", std::to_string(cfg.samples)},
                      {"seed", std::to_string(cfg.seed)},
                      {"grid_resolution_deg", format_number(grid[1] - grid[0])}};
    table.columns = {{"alpha_deg", Series::Common},
                     {"p_total_good_axis", Series::Unprotected},
                     {"p_total_bad_axis", Series::Unprotected},
                     {"p_total_turbulent_sampled", Series::Unprotected},
                     {"se_turbulent_sampled", Series::Unprotected},
                     {"p_total_protected", Series::Protected},
                     {"p_total_envelope", Series::Protected}};
    table.rows.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t j) {
        const double alpha = grid[j] * kDegree;
        const NoiseModel turbulent = HaarAxis{alpha};
        RunningMean acc;
        for (std::uint64_t i = 0; i < cfg.samples; ++i) {
            RngStream rng(cfg.seed, stream_key(kPguessStreams, j, i));
            acc.add(guess_report_numeric(sample_rotation(turbulent, rng), false).p_guess_total);
        }
        table.rows[j] = {grid[j],
                         guess_report_numeric(canonical_rotation(good_axis(), alpha), false).p_guess_total,
                         guess_report_numeric(canonical_rotation(bad_axis(), alpha), false).p_guess_total,
                         acc.mean(),
                         acc.standard_error(),
                         guess_report_numeric(canonical_rotation(bad_axis(), alpha), true).p_guess_total,
                         protected_guess_envelope(alpha)};
    });
    return table;
}

double zero_distance_error(const LinkParams& params) {
    validate(params);
    return (params.threshold * (params.mu + params.y0) - 0.5 * params.y0) / params.mu;
}

SweepTable sweep_distance(const SweepConfig& cfg, const LinkParams& params) {
    const std::vector<double> grid = linear_grid(cfg);
    validate(params);
    if (cfg.samples < 1000) throw std::invalid_argument("sweep-distance needs samples >= 1000");
    SweepConfig checked = cfg;
    checked.threshold = params.threshold;
    validate(checked);
    SweepTable table;
    table.command = "sweep-distance";
    table.metadata = {{"noise_model", "two-arm-gaussian"},
                      {"beta_db_per_km", format_number(params.beta)},
                      {"mu", format_number(params.mu)},
                      {"y0", format_number(params.y0)},
                      {"threshold", format_number(params.threshold)},
                      {"samples", std::to_string(cfg.samples)},
                      {"seed", std::to_string(cfg.seed)},
                      {"grid_resolution_rad", format_number(grid[1] - grid[0])}};
    table.columns = {{"sigma_rad", Series::Common},
                     {"e_int_unprotected", Series::Unprotected},
                     {"se_unprotected", Series::Unprotected},
                     {"e_int_protected", Series::Protected},
                     {"se_protected", Series::Protected},
                     {"l_max_unprotected", Series::Unprotected},
                     {"l_max_protected", Series::Protected}};
    for (const auto& pt : distance_curve(params, grid, cfg.samples, cfg.seed)) {
        table.rows.push_back({pt.sigma, pt.e_int_unprotected, pt.se_unprotected, pt.e_int_protected,
                              pt.se_protected, pt.l_max_unprotected, pt.l_max_protected});
    }
    const double level = zero_distance_error(params);
    add_crossing(table, "zero_distance_sigma.unprotected", Series::Unprotected, grid,
                 table.column("e_int_unprotected"), level);
    add_crossing(table, "zero_distance_sigma.protected", Series::Protected, grid,
                 table.column("e_int_protected"), level);
    const auto a = table.crossings[0].value;
    const auto b = table.crossings[1].value;
    std::optional<double> ratio;
    if (a && b && *a > 0.0) ratio = *b / *a;
    table.crossings.push_back({"zero_distance_sigma.ratio", Series::Common, ratio});
    return table;
}

void write_csv(std::ostream& out, const SweepTable& table, SeriesSelection selection,
               const std::vector<std::string>& extra_metadata) {
    out << "# mdiqkd " << table.command << '\n';
    for (const auto& [key, value] : table.metadata) out << "# " << key << " = " << value << '\n';
    for (const auto& line : extra_metadata) out << "# " << line << '\n';
    for (const auto& c : table.crossings) {
        if (!selected(c.series, selection)) continue;
        out << "# crossing." << c.label << " = " << (c.value ? format_number(*c.value) : "none") << '\n';
    }
    bool first = true;
    for (const auto& col : table.columns) {
        if (!selected(col.series, selection)) continue;
        out << (first ? "" : ",") << col.name;
        first = false;
    }
    out << '\n';
    for (const auto& row : table.rows) {
        first = true;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (!selected(table.columns[c].series, selection)) continue;
            out << (first ? "" : ",");
            first = false;
            if (const auto* v = std::get_if<double>(&row[c])) {
                out << format_number(*v);
            } else {
                out << std::get<std::string>(row[c]);
            }
        }
        out << '\n';
    }
}

}  // namespace mdiqkd
