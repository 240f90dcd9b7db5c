#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade/fit.hpp"

namespace cascade::cli {

// Declarative pipeline configuration, loaded from a single JSON file.
// Validation is fail-closed: unknown keys are rejected.
struct RunConfig {
    std::vector<std::string> groups;

    // inputs
    std::string events_path;
    std::string redirects_path;
    std::string state_domains_path;
    std::string news_domains_path;
    std::string params_path;                      // simulate
    std::map<std::string, std::string> archives;  // cohort name -> tweet archive

    // intermediate artifacts (defaults live under out_dir)
    std::string bundle_path;
    std::string fits_path;

    std::string out_dir = "out";
    std::string time_unit = "hours";  // seconds | minutes | hours | days
    std::optional<double> horizon;    // global window, model units
    double horizon_padding = 24.0;
    std::size_t min_total_events = 1;

    FitConfig fit;
    bool include_degenerate = false;

    double sim_horizon = 1000.0;
    std::size_t sim_count = 1;
    bool sim_allow_supercritical = false;
    bool sim_track_parents = false;

    std::size_t baseline_size = 0;  // 0 = no cohort matching
    std::size_t top_n = 10;

    std::uint64_t seed = 0;
    std::size_t parallel = 0;  // 0 = all cores
    std::string log_level = "info";

    [[nodiscard]] std::string bundle_file() const;
    [[nodiscard]] std::string fits_file() const;
    [[nodiscard]] double seconds_per_unit() const;
    void validate() const;
};

[[nodiscard]] RunConfig load_config(const std::string& path);

// Command bodies; they throw (ConfigError for validation problems) and
// run_command translates that into process exit codes.
void run_ingest(const RunConfig& config);
void run_simulate(const RunConfig& config);
void run_fit(const RunConfig& config);
void run_impact(const RunConfig& config);
void run_compare(const RunConfig& config);
void run_characterize(const RunConfig& config);

// 0 success, 1 runtime failure, 2 validation failure.
int run_command(const std::string& command, const RunConfig& config);

} // namespace cascade::cli
