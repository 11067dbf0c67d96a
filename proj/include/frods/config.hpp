// Run configuration: sectioned key-value files, validated with field paths
// before any computation, and re-serializable for reproducibility.

#pragma once

#include "frods/bath.hpp"
#include "frods/matrix.hpp"
#include "frods/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frods {

enum class Rho0Kind { First, Symmetric, Mixed, Explicit };

struct ModelConfig {
    std::string kind = "spin_boson"; // spin_boson | multilevel | custom
    double epsilon = 0.0;
    double delta = 1.0;
    int m = 2;
    double omega = 1.0;
    Rho0Kind rho0 = Rho0Kind::First;
    std::optional<ComplexMatrix> h_s;  // custom only
    std::optional<ComplexMatrix> w_s;
    std::optional<ComplexMatrix> rho0_matrix; // rho0 = explicit
};

struct NumericsConfig {
    double dt = 0.1;
    int n_steps = 10;
    int order = 2;
    int k_max = 0;
    int d_max = 0;
};

struct OutputConfig {
    std::string path = "out.csv";
    std::vector<std::string> observables = {"sigma_z"}; // sigma_z | populations
};

struct RunConfig {
    ModelConfig model;
    OhmicBathSpec bath;
    NumericsConfig numerics;
    OutputConfig output;

    SystemModel build_model() const;
    void validate() const; // throws ConfigError with field paths
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

} // namespace frods
