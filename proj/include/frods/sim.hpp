// Experiment driver: observable extraction, per-step diagnostics, the
// convergence-order estimator, and memory-length sweeps.

#pragma once

#include "frods/bath.hpp"
#include "frods/engine.hpp"
#include "frods/matrix.hpp"
#include "frods/system.hpp"

#include <string>
#include <vector>

namespace frods {

struct RunResult {
    double dt = 0.0;
    std::vector<double> times;        // n_steps + 1, uniformly spaced
    std::vector<ComplexMatrix> rhos;  // same length
    std::vector<StepStat> stats;      // n_steps
    std::vector<double> trace_re;     // per state, including t = 0
    std::vector<double> trace_im;
    std::vector<double> herm;         // max |rho - rho^dag| entry
};

RunResult simulate(const SystemModel& model, const PropagatorSet& props, const BathTable& table,
                   int n_steps, const EngineOptions& opt,
                   const std::function<void(const StepStat&)>& on_step = {});

cd expectation(const ComplexMatrix& rho, const ComplexMatrix& obs);

// Real parts of the diagonal; any imaginary part is a diagnostic, not data.
std::vector<double> populations(const ComplexMatrix& rho);

// p = log2(|v_4dt - v_2dt| / |v_2dt - v_dt|) in l2 over the common time grid.
// Series must share t = 0 and the final time, with steps dt, 2dt, 4dt.
double convergence_order(const std::vector<double>& v_dt, const std::vector<double>& v_2dt,
                         const std::vector<double>& v_4dt);

struct SweepResult {
    std::vector<int> k_max_values;
    std::vector<std::vector<double>> series; // observable per k_max, including t = 0
    std::vector<double> diffs;               // sup-norm between consecutive k_max runs
};

// Runs per k_max value (ascending) and reports sup-norm differences of the
// observable series between consecutive runs.
SweepResult truncation_sweep(const SystemModel& model, const DiscretizedBath& bath,
                             const OhmicBathSpec& spec, double dt, int n_steps,
                             const std::vector<int>& k_max_values, int d_max, int order,
                             const ComplexMatrix& obs, int threads = 1);

} // namespace frods
