#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "current_lab/network.hpp"
#include "current_lab/samplers.hpp"

namespace current_lab {

enum class Suite { VerifyCoupling, GffCheck, LoopsoupCheck, VrjpCheck, ReconstructCheck, Full };

std::string to_string(Suite suite);
Suite parse_suite(const std::string& name);

struct Tolerances {
    double tv_exact = 1e-12;
    double tv_recon = 1e-10;
    double sigma_level = 3.0;
};

struct ExperimentConfig {
    std::filesystem::path network_path;
    Suite suite = Suite::VerifyCoupling;
    std::size_t replicas = 100000;
    std::uint64_t seed = 0;
    Tolerances tolerances;
    /// Loop-soup intensity and skeleton cutoff.
    double alpha = 0.5;
    std::size_t cutoff = 24;
    double truncation_tolerance = 1e-6;
    /// Vertex order for the jump process; empty means 0..n-1.
    std::vector<std::size_t> order;
    ChainParams chain;
    /// Output directory; empty means no files are written.
    std::filesystem::path out_dir;
    /// Worker threads; 0 means default_thread_count().
    std::size_t threads = 0;

    /// Checks ranges. Throws ValidationError.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct CheckRecord {
    std::string suite;
    std::string name;
    /// Largest |z| for statistical checks, the measured error otherwise.
    double statistic = 0.0;
    /// Threshold the statistic is compared against.
    double tolerance = 0.0;
    bool statistical = false;
    /// Per-cell z-scores (statistical checks only).
    std::vector<double> z;
    bool pass = false;
    nlohmann::json detail = nlohmann::json::object();
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CheckRecord> checks;
    std::vector<std::string> skipped;
    std::size_t threads = 1;
    nlohmann::json timings = nlohmann::json::object();

    bool pass() const;
    nlohmann::json to_json() const;
};

/// Runs a suite on an already loaded network. CSV tables go to
/// config.out_dir when it is set; report.json is written by run_experiment.
ExperimentReport run_suite(const Network& net, const ExperimentConfig& config);

/// Loads the network, runs the suite, writes report.json and the CSV tables.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// 0 pass, 1 check failure.
int exit_status(const ExperimentReport& report);

inline constexpr const char* version = "1.0.0";

}  // namespace current_lab
