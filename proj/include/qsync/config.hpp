#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qsync/models.hpp"

namespace qsync {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ModelKind { Vdp, CavityQubit };

enum class Measure { MutualInfo, Sc, Classical, Discord, Negativity };

std::string measure_name(Measure m);

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    std::vector<double> values() const;
    void validate(const std::string& field) const;
};

struct SolverConfig {
    double tol = 1e-10;       // steady-state residual tolerance
    double leak_tol = 1e-6;   // top-two Fock population bound
    double obs_tol = 1e-3;    // cutoff-to-cutoff observable drift bound
    int max_cutoff = 64;
};

// A (delta, g) grid experiment over one of the two models.
struct SweepConfig {
    ModelKind kind = ModelKind::Vdp;
    VdpParams vdp;
    CavityQubitParams cavity;
    GridSpec delta_grid{-5.0, 5.0, 41};
    GridSpec g_grid{0.0, 5.0, 21};
    std::vector<Measure> measures;
    SolverConfig solver;
    std::string output_path = "sweep.csv";
    bool json_mirror = false;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const;
    std::string serialize() const;
};

// A single time-domain run of the cavity-qubit model.
struct TransientConfig {
    CavityQubitParams cavity;
    double total_tau = 40.0;     // duration in units of 2*pi/omega1
    int samples_per_tau = 32;
    int mi_stride = 10;          // full-state sampling period for MI(t)
    std::string initial_state = "vacuum-ground";
    double rel_tol = 1e-8;
    std::string output_path = "transient.csv";
    bool json_mirror = false;

    void validate() const;
    std::string serialize() const;
};

using ParsedConfig = std::variant<SweepConfig, TransientConfig>;

// Parse a flat `key = value` file (dotted key prefixes, `#` comment lines).
// Unknown keys are rejected; defaults are materialized into the result.
ParsedConfig parse_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace qsync
