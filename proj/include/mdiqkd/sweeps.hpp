#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mdiqkd/link_budget.hpp"

namespace mdiqkd {

enum class Series { Common, Unprotected, Protected };
enum class SeriesSelection { Unprotected, Protected, Both };

bool selected(Series series, SeriesSelection selection);

/// Grid and sampling parameters shared by all sweeps.
struct SweepConfig {
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 2;
    std::uint64_t samples = 5000;
    std::uint64_t seed = 1;
    double threshold = 0.11;
};

void validate(const SweepConfig& cfg);
std::vector<double> linear_grid(const SweepConfig& cfg);

SweepConfig default_alpha_config();     // 0..90 deg, 91 points
SweepConfig default_bias_config();      // 0..1 rad, 51 points
SweepConfig default_pguess_config();    // 0..90 deg, 91 points
SweepConfig default_distance_config();  // 0..1 rad, 51 points

using Cell = std::variant<double, std::string>;

struct Column {
    std::string name;
    Series series = Series::Common;
};

struct Crossing {
    std::string label;
    Series series = Series::Common;
    std::optional<double> value;
};

struct SweepTable {
    std::string command;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<Crossing> crossings;

    /// Numeric values of a column, optionally restricted to rows whose first cell equals `panel`.
    std::vector<double> column(const std::string& name, const std::string& panel = {}) const;
    std::optional<double> crossing(const std::string& label) const;
};

/// Locale-independent, 9 significant digits.
std::string format_number(double value);

/// x where ys first rises through `level`, by linear interpolation between grid points. Returns
/// xs[0] when ys[0] already meets the level, and nothing if the level is never reached.
std::optional<double> first_crossing(std::span<const double> xs, std::span<const double> ys, double level);

/// QBER vs misalignment angle about ŷ: exact and event-sampled, both modes.
SweepTable sweep_alpha(const SweepConfig& cfg);

/// QBER vs bias angle about ŷ and ẑ with isotropic jitter, both modes.
SweepTable sweep_bias(const SweepConfig& cfg, double jitter_sigma = 0.02);

/// P_guess,total vs angle for the good axis, bad axis, Haar-random axis, and protected mode.
SweepTable sweep_pguess(const SweepConfig& cfg);

/// Maximum secure distance vs relative rotation noise.
SweepTable sweep_distance(const SweepConfig& cfg, const LinkParams& params = {});

/// Intrinsic error at which the maximum secure distance reaches zero.
double zero_distance_error(const LinkParams& params);

/// `#` metadata lines (command, table metadata, `extra` lines, crossings), column header, rows.
/// Columns and crossings of unselected series are omitted.
void write_csv(std::ostream& out, const SweepTable& table, SeriesSelection selection = SeriesSelection::Both,
               const std::vector<std::string>& extra_metadata = {});

}  // namespace mdiqkd
