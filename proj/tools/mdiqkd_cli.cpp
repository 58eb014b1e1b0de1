// mdiqkd: sweeps, design verification and protocol runs for correlated-twirling MDI-QKD.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mdiqkd/channel.hpp"
#include "mdiqkd/design12.hpp"
#include "mdiqkd/link_budget.hpp"
#include "mdiqkd/protocol.hpp"
#include "mdiqkd/sweeps.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2, kIoError = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::uint64_t seed = 1;
    std::uint64_t samples = 5000;
    std::string out = "-";
    bool protected_only = false;
    bool unprotected_only = false;
    bool both = false;

    mdiqkd::SeriesSelection selection() const {
        if (protected_only) return mdiqkd::SeriesSelection::Protected;
        if (unprotected_only) return mdiqkd::SeriesSelection::Unprotected;
        return mdiqkd::SeriesSelection::Both;
    }
};

void add_seed_and_output(CLI::App* sub, CommonOptions& common) {
    sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub->add_option("--out", common.out, "Output path, '-' for stdout")->capture_default_str();
}

void add_common(CLI::App* sub, CommonOptions& common, std::uint64_t default_samples) {
    common.samples = default_samples;
    add_seed_and_output(sub, common);
    sub->add_option("--samples", common.samples, "Samples per grid point (pulses for run-protocol)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto* p = sub->add_flag("--protected", common.protected_only, "Protected series only");
    auto* u = sub->add_flag("--unprotected", common.unprotected_only, "Unprotected series only");
    auto* b = sub->add_flag("--both", common.both, "Both series (default)");
    p->excludes(u)->excludes(b);
    u->excludes(b);
}

void add_range(CLI::App* sub, mdiqkd::SweepConfig& cfg, const char* unit) {
    sub->add_option("--start", cfg.start, std::string("Grid start (") + unit + ")")->capture_default_str();
    sub->add_option("--stop", cfg.stop, std::string("Grid stop (") + unit + ")")->capture_default_str();
    sub->add_option("--steps", cfg.steps, "Grid points")->capture_default_str()->check(CLI::Range(2, 1000000));
}

/// Writes through `writer` to the --out target.
void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open output file: " + path);
    writer(file);
    file.flush();
    if (!file) throw IoError("failed writing output file: " + path);
}

/// Effective configuration of the invoked subcommand as metadata lines. Output paths are left out
/// so that reruns writing to different files stay byte-identical.
std::vector<std::string> config_lines(const CLI::App& sub) {
    std::vector<std::string> lines = {"config: [" + sub.get_name() + "]"};
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "config" || name == "out" || name == "events") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
        } else {
            value = opt->get_default_str();
        }
        if (opt->get_expected_min() == 0) value = opt->count() > 0 ? "true" : "false";
        lines.push_back("config: " + name + " = " + value);
    }
    return lines;
}

void report_crossings(const mdiqkd::SweepTable& table, mdiqkd::SeriesSelection selection) {
    for (const auto& c : table.crossings) {
        if (!mdiqkd::selected(c.series, selection)) continue;
        std::cerr << table.command << ": crossing " << c.label << " = "
                  << (c.value ? mdiqkd::format_number(*c.value) : "none") << '\n';
    }
}

void write_sweep(const CLI::App& sub, const CommonOptions& common, const mdiqkd::SweepTable& table) {
    const auto meta = config_lines(sub);
    emit(common.out, [&](std::ostream& os) { mdiqkd::write_csv(os, table, common.selection(), meta); });
    report_crossings(table, common.selection());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlated-twirling MDI-QKD simulator"};
    app.set_config("--config", "", "INI config file with one [subcommand] section per command");
    app.fallthrough();
    app.require_subcommand(1);

    // sweep-alpha
    CommonOptions alpha_common;
    mdiqkd::SweepConfig alpha_cfg = mdiqkd::default_alpha_config();
    auto* alpha = app.add_subcommand("sweep-alpha", "QBER vs misalignment angle about the Y axis");
    add_common(alpha, alpha_common, 5000);
    add_range(alpha, alpha_cfg, "deg");
    alpha->add_option("--threshold", alpha_cfg.threshold, "QBER threshold")->capture_default_str();

    // sweep-bias
    CommonOptions bias_common;
    mdiqkd::SweepConfig bias_cfg = mdiqkd::default_bias_config();
    double jitter = 0.02;
    auto* bias = app.add_subcommand("sweep-bias", "QBER vs bias angle about Y and Z with jitter");
    add_common(bias, bias_common, 5000);
    add_range(bias, bias_cfg, "rad");
    bias->add_option("--jitter", jitter, "Jitter std per rotation-vector component (rad)")->capture_default_str();
    bias->add_option("--threshold", bias_cfg.threshold, "QBER threshold")->capture_default_str();

    // sweep-pguess
    CommonOptions pguess_common;
    mdiqkd::SweepConfig pguess_cfg = mdiqkd::default_pguess_config();
    auto* pguess = app.add_subcommand("sweep-pguess", "Guessing probability vs angle");
    add_common(pguess, pguess_common, 5000);
    add_range(pguess, pguess_cfg, "deg");

    // sweep-distance
    CommonOptions distance_common;
    mdiqkd::SweepConfig distance_cfg = mdiqkd::default_distance_config();
    mdiqkd::LinkParams link;
    auto* distance = app.add_subcommand("sweep-distance", "Maximum secure distance vs rotation noise");
    add_common(distance, distance_common, 5000);
    add_range(distance, distance_cfg, "rad");
    distance->add_option("--beta", link.beta, "Attenuation (dB/km)")->capture_default_str();
    distance->add_option("--mu", link.mu, "Mean photon number")->capture_default_str();
    distance->add_option("--y0", link.y0, "Dark-count probability per gate")->capture_default_str();
    distance->add_option("--threshold", link.threshold, "QBER threshold")->capture_default_str();

    // verify-design
    CommonOptions verify_common;
    std::size_t trials = 100;
    double tol = 1e-10;
    int corrupt = 0;
    std::string table_reference = "published";
    auto* verify = app.add_subcommand("verify-design", "Certify the 2-design and the look-up table");
    add_seed_and_output(verify, verify_common);
    verify->add_option("--trials", trials, "Random (unitary, state) pairs")->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_option("--tol", tol, "Max-norm tolerance")->capture_default_str();
    verify->add_option("--corrupt", corrupt, "Test hook: replace element k (1..12) by the identity")
        ->capture_default_str()
        ->check(CLI::Range(0, 12));
    verify->add_option("--table-reference", table_reference, "Reference table to compare against")
        ->capture_default_str()
        ->check(CLI::IsMember({"published", "none"}));

    // run-protocol
    CommonOptions protocol_common;
    mdiqkd::KeyValues noise = {{"model", "fixed-axis-sweep"}, {"axis", "y"}, {"angle", "0"}};
    std::string events_path;
    auto* protocol = app.add_subcommand("run-protocol", "Event-level sifting protocol session");
    add_common(protocol, protocol_common, 100000);
    protocol->add_option_function<std::string>("--model", [&](const std::string& v) { noise["model"] = v; },
                                               "fixed-axis-sweep | fixed-axis-bias | haar-axis | two-arm-gaussian")
        ->default_str("fixed-axis-sweep");
    protocol->add_option_function<std::string>("--axis", [&](const std::string& v) { noise["axis"] = v; },
                                               "x | y | z | nx,ny,nz")
        ->default_str("y");
    for (const char* key : {"angle", "bias", "jitter", "sigma"}) {
        protocol->add_option_function<std::string>(std::string("--") + key,
                                                   [&noise, key](const std::string& v) { noise[key] = v; },
                                                   "Noise model parameter (rad)");
    }
    protocol->add_option("--events", events_path, "Per-pulse event log CSV (single mode only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*alpha) {
            alpha_cfg.samples = alpha_common.samples;
            alpha_cfg.seed = alpha_common.seed;
            write_sweep(*alpha, alpha_common, mdiqkd::sweep_alpha(alpha_cfg));
        } else if (*bias) {
            bias_cfg.samples = bias_common.samples;
            bias_cfg.seed = bias_common.seed;
            write_sweep(*bias, bias_common, mdiqkd::sweep_bias(bias_cfg, jitter));
        } else if (*pguess) {
            pguess_cfg.samples = pguess_common.samples;
            pguess_cfg.seed = pguess_common.seed;
            write_sweep(*pguess, pguess_common, mdiqkd::sweep_pguess(pguess_cfg));
        } else if (*distance) {
            distance_cfg.samples = distance_common.samples;
            distance_cfg.seed = distance_common.seed;
            distance_cfg.threshold = link.threshold;
            write_sweep(*distance, distance_common, mdiqkd::sweep_distance(distance_cfg, link));
        } else if (*verify) {
            std::vector<mdiqkd::Mat2d> elements(mdiqkd::standard_twirl_set().begin(),
                                                mdiqkd::standard_twirl_set().end());
            std::vector<mdiqkd::TwirlGroup> groups;
            for (std::size_t k = 0; k < elements.size(); ++k) groups.push_back(mdiqkd::standard_twirl_set().group(k));
            if (corrupt > 0) elements[corrupt - 1] = mdiqkd::Mat2d::Identity();
            const mdiqkd::TwirlSetd set(std::move(elements), std::move(groups));

            const auto cert = mdiqkd::certify_two_design(set, trials, tol, verify_common.seed);
            std::ostringstream report;
            report << cert.to_string();
            bool ok = cert.passed;
            try {
                const mdiqkd::LookupTable computed = mdiqkd::build_lookup_table(set);
                report << "look-up table: brute force resolved " << 4 * computed.size()
                       << " cells onto the Bell basis\n";
                if (table_reference == "published") {
                    const auto mismatches = mdiqkd::compare_tables(computed, mdiqkd::published_lookup_table());
                    report << "look-up table vs published reference: "
                           << 4 * computed.size() - mismatches.size() << "/" << 4 * computed.size()
                           << " cells matched\n";
                    for (const auto& m : mismatches) {
                        report << "  mismatch V" << m.beacon_k << " " << mdiqkd::to_string(m.announced)
                               << ": published " << mdiqkd::to_string(m.expected) << ", computed "
                               << mdiqkd::to_string(m.actual) << '\n';
                    }
                    ok = ok && mismatches.empty();
                }
            } catch (const std::runtime_error& e) {
                report << "look-up table: FAIL: " << e.what() << '\n';
                ok = false;
            }
            report << "verify-design: " << (ok ? "PASS" : "FAIL") << '\n';
            emit(verify_common.out, [&](std::ostream& os) { os << report.str(); });
            return ok ? kOk : kVerificationFailed;
        } else if (*protocol) {
            const mdiqkd::NoiseModel model = mdiqkd::noise_model_from_key_values(noise);
            const auto selection = protocol_common.selection();
            if (!events_path.empty() && selection == mdiqkd::SeriesSelection::Both) {
                std::cerr << "run-protocol: --events requires --protected or --unprotected\n";
                return kUsage;
            }
            std::vector<std::pair<std::string, mdiqkd::SessionResult>> results;
            for (const bool protected_mode : {false, true}) {
                if (!mdiqkd::selected(protected_mode ? mdiqkd::Series::Protected : mdiqkd::Series::Unprotected,
                                      selection)) {
                    continue;
                }
                mdiqkd::SessionResult result;
                if (!events_path.empty()) {
                    std::ofstream events(events_path, std::ios::binary);
                    if (!events) throw IoError("cannot open event log: " + events_path);
                    mdiqkd::write_event_csv_header(events);
                    result = mdiqkd::run_session(protocol_common.samples, model, protected_mode, protocol_common.seed,
                                                 [&events](const mdiqkd::PulseRecord& r) {
                                                     mdiqkd::write_event_csv_row(events, r);
                                                 });
                    if (!events) throw IoError("failed writing event log: " + events_path);
                } else {
                    result = mdiqkd::run_session(protocol_common.samples, model, protected_mode, protocol_common.seed);
                }
                results.emplace_back(protected_mode ? "protected" : "unprotected", result);
            }
            const auto meta = config_lines(*protocol);
            emit(protocol_common.out, [&](std::ostream& os) {
                using mdiqkd::format_number;
                os << "# mdiqkd run-protocol\n# noise_model = " << mdiqkd::describe(model) << '\n';
                for (const auto& line : meta) os << "# " << line << '\n';
                os << "mode,pulses,sifted_z_pairs,z_errors,qber_z,se_z,sifted_x_pairs,x_errors,qber_x,se_x,"
                      "discarded,no_coincidence\n";
                for (const auto& [mode, r] : results) {
                    os << mode << ',' << r.pulses << ',' << r.sifted_z_pairs << ',' << r.z_errors << ','
                       << format_number(r.qber_z()) << ',' << format_number(r.se_z()) << ',' << r.sifted_x_pairs
                       << ',' << r.x_errors << ',' << format_number(r.qber_x()) << ',' << format_number(r.se_x())
                       << ',' << r.discarded << ',' << r.no_coincidence << '\n';
                }
            });
            for (const auto& [mode, r] : results) {
                std::cerr << "run-protocol " << mode << ": qber_z = " << mdiqkd::format_number(r.qber_z())
                          << " (" << r.sifted_z_pairs << " pairs), qber_x = " << mdiqkd::format_number(r.qber_x())
                          << " (" << r.sifted_x_pairs << " pairs)\n";
            }
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}
