#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/design12.hpp"
#include "mdiqkd/mdi_core.hpp"
#include "mdiqkd/rng.hpp"

namespace mdiqkd {

/// Classical reversal map: (beacon k, announced ψ_C) → ψ_eff = (V_k† ⊗ V_k†)ψ_C up to phase.
class LookupTable {
public:
    explicit LookupTable(std::vector<std::array<BellState, 4>> rows);

    std::size_t size() const noexcept { return rows_.size(); }
    /// beacon_k is 1-based.
    BellState reverse(int beacon_k, BellState announced) const;
    /// Inverse of reverse(): the announcement that reverses to `effective`.
    BellState forward(int beacon_k, BellState effective) const;
    const std::array<BellState, 4>& row(int beacon_k) const;

private:
    std::vector<std::array<BellState, 4>> rows_;
};

/// Brute force: applies V_k† ⊗ V_k† to each Bell vector and matches the result to a Bell state by
/// overlap modulus > 1 − 1e-9. Throws std::runtime_error when some image is not a Bell state.
LookupTable build_lookup_table(const TwirlSetd& set);

/// The published three-row reference table, expanded to twelve beacon values (rows repeat per
/// group of four).
LookupTable published_lookup_table();

/// Shared instance of build_lookup_table(standard_twirl_set()).
const LookupTable& standard_lookup_table();

struct TableMismatch {
    int beacon_k;
    BellState announced;
    BellState expected;
    BellState actual;
};

/// Cells where `computed` differs from `reference`.
std::vector<TableMismatch> compare_tables(const LookupTable& computed, const LookupTable& reference);

/// Draws a Bell outcome with probability Tr(ρ·P). Throws std::logic_error if a probability is
/// below −1e-10 or the total differs from 1 by more than 1e-10.
BellState sample_bell_outcome(const Mat4d& rho_joint, RngStream& rng);

struct PulseRecord {
    std::uint64_t index = 0;
    int beacon_k = 1;
    Basis basis_a = Basis::Z;
    Basis basis_b = Basis::Z;
    int bit_a = 0;
    int bit_b = 0;
    RotationSpec rotation;
    /// Empty for a missing coincidence (never produced by the ideal four-outcome BSM).
    std::optional<BellState> announced;
    BellState effective = BellState::PhiPlus;
    bool sifted = false;
    bool error = false;
};

/// True when Bob must flip his bit for the given basis and effective Bell state:
/// Z basis on Ψ±, X basis on Φ− and Ψ−.
bool parity_flip(Basis basis, BellState effective);

struct PulseOptions {
    bool z_basis_only = false;
};

/// One protocol round. Draw order from RngStream(seed, index): bases and bits, beacon (protected
/// only), rotation, Bell outcome.
///
/// Alice sends V_k ρ_A V_k†, Bob sends U_rel V_k ρ_B V_k† U_rel† (unprotected: k = 1, V_1 = 𝕀).
/// Charlie announces ψ_C; the parties reverse it through the look-up table to ψ_eff, sift on
/// matching bases and apply the parity rule.
PulseRecord simulate_pulse(std::uint64_t index, const NoiseModel& model, bool protected_mode,
                           std::uint64_t seed, PulseOptions options = {});

struct SessionResult {
    std::uint64_t pulses = 0;
    std::uint64_t sifted_z_pairs = 0;
    std::uint64_t sifted_x_pairs = 0;
    std::uint64_t z_errors = 0;
    std::uint64_t x_errors = 0;
    /// Basis-mismatched pulses.
    std::uint64_t discarded = 0;
    std::uint64_t no_coincidence = 0;

    /// 0 when there are no sifted pairs; check has_z_pairs().
    double qber_z() const;
    double qber_x() const;
    double se_z() const;
    double se_x() const;
    bool has_z_pairs() const noexcept { return sifted_z_pairs > 0; }
    bool has_x_pairs() const noexcept { return sifted_x_pairs > 0; }

    void add(const PulseRecord& record);
    SessionResult& operator+=(const SessionResult& other);
    bool operator==(const SessionResult&) const = default;
};

using PulseSink = std::function<void(const PulseRecord&)>;

/// Runs `pulses` rounds. Pulses are sharded across threads unless a sink is given, in which case
/// they run in index order and each record is passed to the sink.
SessionResult run_session(std::uint64_t pulses, const NoiseModel& model, bool protected_mode,
                          std::uint64_t seed, const PulseSink& sink = {});

struct QberEstimate {
    double qber = 0.0;
    double standard_error = 0.0;
    std::uint64_t pairs = 0;
};

/// Z-basis-only event simulation (both parties in Z, so every pulse is sifted), pulses drawn from
/// streams [stream_base, stream_base + pulses).
QberEstimate estimate_qber_z(const NoiseModel& model, bool protected_mode, std::uint64_t pulses,
                             std::uint64_t seed, std::uint64_t stream_base = 0);

void write_event_csv_header(std::ostream& out);
void write_event_csv_row(std::ostream& out, const PulseRecord& record);

}  // namespace mdiqkd
