// Experiment configuration (JSON), validation, and the runners behind the
// command-line subcommands. Every run writes its data files plus a manifest
// listing each file with its SHA-256, the config hash, seeds and code version.
#pragma once

#include "mhd/noise.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhd {

// initial data for one field: zero | single | random (band-limited, given L2 norm) | file
struct InitialSpec {
    std::string kind = "zero";
    int k1 = 0, k2 = 0;
    double amp1 = 0, amp2 = 0;
    double band = 4;
    double l2 = 0;
    std::uint64_t seed = 0;
    std::string path;  // JSON records file with two components
    bool operator==(const InitialSpec&) const = default;
};

struct ExperimentConfig {
    std::string kind;  // identities | renorm | simulate | galerkin | noise-stats
    int n = 64;
    double nu = 1.0;
    double a = 3.0;
    double kappa = 0.02;
    double dt = 1e-3;
    double t_final = 1.0;
    double lambda = 8.0;
    std::vector<double> lambdas;
    std::vector<double> times;  // extra times for the r table
    std::uint64_t seed = 1;
    int seed_count = 1;  // seeds are seed, seed+1, ... unless seeds is given
    std::vector<std::uint64_t> seeds;
    int samples = 200;
    double eps = 0.3;
    bool noise = true;
    std::vector<int> levels{4, 8, 16, 32};
    std::vector<int> mode_sq{1, 4, 16};
    int diag_every = 10;
    bool probe = false;
    std::string out;
    InitialSpec initial_u, initial_b;
    bool operator==(const ExperimentConfig&) const = default;

    std::vector<std::uint64_t> seed_list() const;
};

// all violations of one config, joined into what()
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::vector<std::string>& problems);
    std::vector<std::string> problems;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);
void validate(const ExperimentConfig& c);  // throws ConfigError
std::string emit_config(const ExperimentConfig& c);  // canonical JSON, parses back to an equal config

std::string sha256_hex(const std::string& bytes);

struct RunResult {
    std::string out_dir;
    std::vector<std::string> files;  // relative to out_dir, manifest last
    bool ok = false;                 // every asserted invariant held
    std::string summary;
};

// threads only changes wall time, never the bytes written
RunResult run_experiment(const ExperimentConfig& c, const std::string& out_dir, int threads = 1);

// MHDLAB_OUT if set, else ./mhdlab_out
std::string default_out_dir();
std::string code_version();

}  // namespace mhd
