#include "mdiqkd/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdiqkd/parallel.hpp"

namespace mdiqkd {

namespace {

constexpr double kBellMatchTol = 1e-9;
constexpr double kProbabilityTol = 1e-10;
constexpr std::uint64_t kShardSize = 4096;

int index_of(BellState s) { return static_cast<int>(s); }

double standard_error(std::uint64_t errors, std::uint64_t pairs) {
    if (pairs == 0) return 0.0;
    const double q = static_cast<double>(errors) / static_cast<double>(pairs);
    return std::sqrt(q * (1.0 - q) / static_cast<double>(pairs));
}

}  // namespace

LookupTable::LookupTable(std::vector<std::array<BellState, 4>> rows) : rows_(std::move(rows)) {
    for (const auto& row : rows_) {
        std::array<bool, 4> seen{};
        for (const auto s : row) seen[index_of(s)] = true;
        for (const bool hit : seen) {
            if (!hit) throw std::invalid_argument("LookupTable: row is not a permutation of the Bell basis");
        }
    }
}

const std::array<BellState, 4>& LookupTable::row(int beacon_k) const {
    if (beacon_k < 1 || static_cast<std::size_t>(beacon_k) > rows_.size()) {
        throw std::out_of_range("LookupTable: beacon " + std::to_string(beacon_k) + " out of range");
    }
    return rows_[beacon_k - 1];
}

BellState LookupTable::reverse(int beacon_k, BellState announced) const {
    return row(beacon_k)[index_of(announced)];
}

BellState LookupTable::forward(int beacon_k, BellState effective) const {
    const auto& r = row(beacon_k);
    for (const auto s : kBellStates) {
        if (r[index_of(s)] == effective) return s;
    }
    throw std::logic_error("LookupTable: row is not a permutation");
}

LookupTable build_lookup_table(const TwirlSetd& set) {
    std::vector<std::array<BellState, 4>> rows;
    rows.reserve(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
        const Mat2d vd = set[k].adjoint();
        const Mat4d reversal = tensor(vd, vd);
        std::array<BellState, 4> row{};
        for (const auto in : kBellStates) {
            const Ket4d image = reversal * bell_ket(in);
            bool matched = false;
            for (const auto out : kBellStates) {
                if (std::abs(bell_ket(out).dot(image)) > 1.0 - kBellMatchTol) {
                    row[index_of(in)] = out;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                throw std::runtime_error("build_lookup_table: V_" + std::to_string(k + 1) +
                                         " does not map " + std::string(to_string(in)) +
                                         " onto a Bell state");
            }
        }
        rows.push_back(row);
    }
    return LookupTable(std::move(rows));
}

LookupTable published_lookup_table() {
    using B = BellState;
    const std::array<B, 4> pauli = {B::PhiPlus, B::PhiMinus, B::PsiPlus, B::PsiMinus};
    const std::array<B, 4> clifford_xyz = {B::PhiPlus, B::PsiPlus, B::PhiMinus, B::PsiMinus};
    const std::array<B, 4> clifford_conj = {B::PhiMinus, B::PhiPlus, B::PsiMinus, B::PsiPlus};
    std::vector<std::array<B, 4>> rows;
    for (const auto* group : {&pauli, &clifford_xyz, &clifford_conj}) {
        for (int k = 0; k < 4; ++k) rows.push_back(*group);
    }
    return LookupTable(std::move(rows));
}

const LookupTable& standard_lookup_table() {
    static const LookupTable table = build_lookup_table(standard_twirl_set());
    return table;
}

std::vector<TableMismatch> compare_tables(const LookupTable& computed, const LookupTable& reference) {
    if (computed.size() != reference.size()) {
        throw std::invalid_argument("compare_tables: tables have different sizes");
    }
    std::vector<TableMismatch> mismatches;
    for (int k = 1; k <= static_cast<int>(computed.size()); ++k) {
        for (const auto in : kBellStates) {
            const BellState actual = computed.reverse(k, in);
            const BellState expected = reference.reverse(k, in);
            if (actual != expected) mismatches.push_back({k, in, expected, actual});
        }
    }
    return mismatches;
}

BellState sample_bell_outcome(const Mat4d& rho_joint, RngStream& rng) {
    std::array<double, 4> p{};
    double total = 0.0;
    for (const auto s : kBellStates) {
        const double value = bell_probability(rho_joint, s);
        if (value < -kProbabilityTol) {
            throw std::logic_error("sample_bell_outcome: negative probability " + std::to_string(value));
        }
        p[index_of(s)] = std::max(0.0, value);
        total += value;
    }
    if (std::abs(total - 1.0) > kProbabilityTol) {
        throw std::logic_error("sample_bell_outcome: probabilities sum to " + std::to_string(total));
    }
    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    BellState last = BellState::PhiPlus;
    for (const auto s : kBellStates) {
        if (p[index_of(s)] <= 0.0) continue;
        cumulative += p[index_of(s)];
        last = s;
        if (u < cumulative) return s;
    }
    return last;
}

bool parity_flip(Basis basis, BellState effective) {
    if (basis == Basis::Z) return effective == BellState::PsiPlus || effective == BellState::PsiMinus;
    return effective == BellState::PhiMinus || effective == BellState::PsiMinus;
}

PulseRecord simulate_pulse(std::uint64_t index, const NoiseModel& model, bool protected_mode,
                           std::uint64_t seed, PulseOptions options) {
    const TwirlSetd& set = standard_twirl_set();
    RngStream rng(seed, index);
    PulseRecord rec;
    rec.index = index;
    rec.basis_a = options.z_basis_only ? Basis::Z : (rng.bit() ? Basis::X : Basis::Z);
    rec.bit_a = rng.bit();
    rec.basis_b = options.z_basis_only ? Basis::Z : (rng.bit() ? Basis::X : Basis::Z);
    rec.bit_b = rng.bit();
    rec.beacon_k = protected_mode ? 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint32_t>(set.size()))) : 1;
    rec.rotation = sample_rotation(model, rng);

    const Mat2d& v = set[rec.beacon_k - 1];
    const Mat2d u = su2_from_axis_angle(rec.rotation);
    const Mat2d sent_a = v * prepare_state(rec.basis_a, rec.bit_a) * v.adjoint();
    const Mat2d bob_out = u * v;
    const Mat2d sent_b = bob_out * prepare_state(rec.basis_b, rec.bit_b) * bob_out.adjoint();
    const BellState announced = sample_bell_outcome(tensor(sent_a, sent_b), rng);

    rec.announced = announced;
    rec.effective = protected_mode ? standard_lookup_table().reverse(rec.beacon_k, announced) : announced;
    rec.sifted = rec.basis_a == rec.basis_b;
    if (rec.sifted) {
        const int bob_bit = rec.bit_b ^ (parity_flip(rec.basis_b, rec.effective) ? 1 : 0);
        rec.error = bob_bit != rec.bit_a;
    }
    return rec;
}

double SessionResult::qber_z() const {
    return sifted_z_pairs == 0 ? 0.0 : static_cast<double>(z_errors) / static_cast<double>(sifted_z_pairs);
}

double SessionResult::qber_x() const {
    return sifted_x_pairs == 0 ? 0.0 : static_cast<double>(x_errors) / static_cast<double>(sifted_x_pairs);
}

double SessionResult::se_z() const { return standard_error(z_errors, sifted_z_pairs); }

double SessionResult::se_x() const { return standard_error(x_errors, sifted_x_pairs); }

void SessionResult::add(const PulseRecord& record) {
    ++pulses;
    if (!record.announced) {
        ++no_coincidence;
    } else if (!record.sifted) {
        ++discarded;
    } else if (record.basis_a == Basis::Z) {
        ++sifted_z_pairs;
        z_errors += record.error ? 1 : 0;
    } else {
        ++sifted_x_pairs;
        x_errors += record.error ? 1 : 0;
    }
}

SessionResult& SessionResult::operator+=(const SessionResult& other) {
    pulses += other.pulses;
    sifted_z_pairs += other.sifted_z_pairs;
    sifted_x_pairs += other.sifted_x_pairs;
    z_errors += other.z_errors;
    x_errors += other.x_errors;
    discarded += other.discarded;
    no_coincidence += other.no_coincidence;
    return *this;
}

SessionResult run_session(std::uint64_t pulses, const NoiseModel& model, bool protected_mode,
                          std::uint64_t seed, const PulseSink& sink) {
    if (pulses < 1) throw std::invalid_argument("run_session: pulses must be >= 1");
    validate(model);
    if (sink) {
        SessionResult result;
        for (std::uint64_t i = 0; i < pulses; ++i) {
            const PulseRecord rec = simulate_pulse(i, model, protected_mode, seed);
            sink(rec);
            result.add(rec);
        }
        return result;
    }
    const std::size_t shards = static_cast<std::size_t>((pulses + kShardSize - 1) / kShardSize);
    std::vector<SessionResult> partial(shards);
    parallel_for(shards, [&](std::size_t shard) {
        const std::uint64_t begin = shard * kShardSize;
        const std::uint64_t end = std::min<std::uint64_t>(pulses, begin + kShardSize);
        for (std::uint64_t i = begin; i < end; ++i) {
            partial[shard].add(simulate_pulse(i, model, protected_mode, seed));
        }
    });
    SessionResult result;
    for (const auto& p : partial) result += p;
    return result;
}

QberEstimate estimate_qber_z(const NoiseModel& model, bool protected_mode, std::uint64_t pulses,
                             std::uint64_t seed, std::uint64_t stream_base) {
    std::uint64_t errors = 0;
    for (std::uint64_t i = 0; i < pulses; ++i) {
        const PulseRecord rec = simulate_pulse(stream_base + i, model, protected_mode, seed, {true});
        errors += rec.error ? 1 : 0;
    }
    QberEstimate est;
    est.pairs = pulses;
    est.qber = pulses == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(pulses);
    est.standard_error = standard_error(errors, pulses);
    return est;
}

void write_event_csv_header(std::ostream& out) {
    out << "index,k,basis_a,bit_a,basis_b,bit_b,announced,effective,sifted,error\n";
}

void write_event_csv_row(std::ostream& out, const PulseRecord& r) {
    out << r.index << ',' << r.beacon_k << ',' << to_string(r.basis_a) << ',' << r.bit_a << ','
        << to_string(r.basis_b) << ',' << r.bit_b << ','
        << (r.announced ? to_string(*r.announced) : std::string_view("NoCoincidence")) << ','
        << to_string(r.effective) << ',' << (r.sifted ? 1 : 0) << ',' << (r.error ? 1 : 0) << '\n';
}

}  // namespace mdiqkd
