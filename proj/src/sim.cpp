#include "frods/sim.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace frods {

RunResult simulate(const SystemModel& model, const PropagatorSet& props, const BathTable& table,
                   int n_steps, const EngineOptions& opt,
                   const std::function<void(const StepStat&)>& on_step) {
    RunOutput raw = run(model, props, table, n_steps, opt, on_step);
    RunResult res;
    res.dt = props.dt;
    res.rhos = std::move(raw.rhos);
    res.stats = std::move(raw.stats);
    res.times.resize(res.rhos.size());
    res.trace_re.resize(res.rhos.size());
    res.trace_im.resize(res.rhos.size());
    res.herm.resize(res.rhos.size());
    for (std::size_t i = 0; i < res.rhos.size(); ++i) {
        res.times[i] = props.dt * static_cast<double>(i);
        const cd tr = trace(res.rhos[i]);
        res.trace_re[i] = tr.real();
        res.trace_im[i] = tr.imag();
        res.herm[i] = herm_defect(res.rhos[i]);
    }
    return res;
}

cd expectation(const ComplexMatrix& rho, const ComplexMatrix& obs) {
    if (rho.dim() != obs.dim())
        throw std::invalid_argument("expectation: dimension mismatch");
    return trace(matmul(rho, obs));
}

std::vector<double> populations(const ComplexMatrix& rho) {
    std::vector<double> p(static_cast<std::size_t>(rho.dim()));
    for (int i = 0; i < rho.dim(); ++i) p[static_cast<std::size_t>(i)] = rho(i, i).real();
    return p;
}

double convergence_order(const std::vector<double>& v_dt, const std::vector<double>& v_2dt,
                         const std::vector<double>& v_4dt) {
    if (v_4dt.size() < 2) throw std::invalid_argument("convergence_order: series too short");
    const std::size_t n4 = v_4dt.size() - 1;
    if (v_2dt.size() != 2 * n4 + 1 || v_dt.size() != 4 * n4 + 1)
        throw std::invalid_argument(
            "convergence_order: series lengths must correspond to steps dt, 2dt, 4dt over one horizon");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 1; j <= n4; ++j) {
        const double coarse = v_4dt[j];
        const double mid = v_2dt[2 * j];
        const double fine = v_dt[4 * j];
        num += (coarse - mid) * (coarse - mid);
        den += (mid - fine) * (mid - fine);
    }
    if (den == 0.0)
        throw std::domain_error("convergence_order: identical series (zero denominator)");
    return 0.5 * std::log2(num / den);
}

SweepResult truncation_sweep(const SystemModel& model, const DiscretizedBath& bath,
                             const OhmicBathSpec& spec, double dt, int n_steps,
                             const std::vector<int>& k_max_values, int d_max, int order,
                             const ComplexMatrix& obs, int threads) {
    for (std::size_t i = 1; i < k_max_values.size(); ++i)
        if (k_max_values[i] <= k_max_values[i - 1])
            throw std::invalid_argument("truncation_sweep: k_max list must be ascending");
    SweepResult out;
    out.k_max_values = k_max_values;
    for (int k_max : k_max_values) {
        const BathTable table =
            BathTable::build(bath, spec, dt, k_max, k_max > 0 ? k_max : std::max(1, n_steps - 1));
        EngineOptions opt;
        opt.order = order;
        opt.k_max = k_max;
        opt.d_max = d_max;
        opt.threads = threads;
        const PropagatorSet props = build_propagators(model, dt);
        RunOutput raw = run(model, props, table, n_steps, opt);
        std::vector<double> series(raw.rhos.size());
        for (std::size_t i = 0; i < raw.rhos.size(); ++i)
            series[i] = expectation(raw.rhos[i], obs).real();
        out.series.push_back(std::move(series));
    }
    for (std::size_t i = 1; i < out.series.size(); ++i) {
        double sup = 0.0;
        for (std::size_t j = 0; j < out.series[i].size(); ++j)
            sup = std::max(sup, std::abs(out.series[i][j] - out.series[i - 1][j]));
        out.diffs.push_back(sup);
    }
    return out;
}

} // namespace frods
