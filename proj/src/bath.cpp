#include "frods/bath.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace frods {

namespace {

double coth(double x) {
    // tanh saturates to 1 well before overflow territory; short-circuit the
    // cold-bath regime explicitly.
    if (x > 50.0) return 1.0;
    return 1.0 / std::tanh(x);
}

} // namespace

void OhmicBathSpec::validate() const {
    std::ostringstream msg;
    if (!(xi >= 0.0)) msg << "bath.xi: must be >= 0; ";
    if (!(omega_c > 0.0)) msg << "bath.omega_c: must be > 0; ";
    if (!(beta > 0.0)) msg << "bath.beta: must be > 0; ";
    if (n_modes < 1) msg << "bath.n_modes: must be >= 1; ";
    if (!(omega_max > 0.0)) msg << "bath.omega_max: must be > 0; ";
    const std::string s = msg.str();
    if (!s.empty()) throw std::invalid_argument(s);
}

DiscretizedBath discretize(const OhmicBathSpec& spec) {
    spec.validate();
    const int L = spec.n_modes;
    const double depletion = 1.0 - std::exp(-spec.omega_max / spec.omega_c);
    const double cscale = std::sqrt(spec.xi * spec.omega_c * depletion / L);
    DiscretizedBath bath;
    bath.omegas.resize(L);
    bath.couplings.resize(L);
    for (int j = 1; j <= L; ++j) {
        const double w = -spec.omega_c * std::log(1.0 - (static_cast<double>(j) / L) * depletion);
        bath.omegas[j - 1] = w;
        bath.couplings[j - 1] = w * cscale;
    }
    return bath;
}

cd correlation(const DiscretizedBath& bath, const OhmicBathSpec& spec, double tau1, double tau2) {
    const double dtau = std::abs(tau1) - std::abs(tau2);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < bath.omegas.size(); ++j) {
        const double w = bath.omegas[j];
        if (w == 0.0) throw std::domain_error("correlation: zero-frequency bath mode");
        const double c2w = bath.couplings[j] * bath.couplings[j] / w;
        re += c2w * coth(0.5 * spec.beta * w) * std::cos(w * dtau);
        im -= c2w * std::sin(w * dtau);
    }
    return 0.5 * cd(re, im);
}

BathTable::BathTable(double dt, int k_max, int max_offset)
    : dt_(dt), k_max_(k_max), max_offset_(max_offset),
      values_(static_cast<std::size_t>(2 * max_offset + 1)) {}

BathTable BathTable::build(const DiscretizedBath& bath, const OhmicBathSpec& spec, double dt,
                           int k_max, int max_offset) {
    if (!(dt > 0.0)) throw std::invalid_argument("BathTable::build: dt must be > 0");
    if (k_max < 0) throw std::invalid_argument("BathTable::build: k_max must be >= 0");
    if (max_offset < 0) throw std::invalid_argument("BathTable::build: max_offset must be >= 0");
    BathTable t(dt, k_max, max_offset);
    for (int d = -max_offset; d <= max_offset; ++d) {
        if (k_max > 0 && std::abs(d) > k_max) continue; // stays exactly zero
        // Midpoints with |tau1| - |tau2| = d*dt; the cross-branch pair is as
        // good a representative as any since only dtau enters.
        const double tau1 = -(std::abs(d) + 0.5) * dt;
        const double tau2 = 0.5 * dt;
        cd v = correlation(bath, spec, tau1, tau2);
        if (d < 0) v = std::conj(v);
        t.values_[static_cast<std::size_t>(d + max_offset)] = v;
    }
    return t;
}

BathTable BathTable::from_values(double dt, int k_max, const std::vector<cd>& values_nonneg_d) {
    if (values_nonneg_d.empty()) throw std::invalid_argument("BathTable::from_values: empty");
    const int max_offset = static_cast<int>(values_nonneg_d.size()) - 1;
    BathTable t(dt, k_max, max_offset);
    for (int d = 0; d <= max_offset; ++d) {
        if (k_max > 0 && d > k_max) continue;
        t.values_[static_cast<std::size_t>(max_offset + d)] = values_nonneg_d[d];
        t.values_[static_cast<std::size_t>(max_offset - d)] = std::conj(values_nonneg_d[d]);
    }
    return t;
}

cd BathTable::value(int d) const {
    if (std::abs(d) > max_offset_) {
        if (k_max_ > 0) return 0.0;
        std::ostringstream msg;
        msg << "BathTable::value: offset " << d << " outside precomputed range " << max_offset_;
        throw std::out_of_range(msg.str());
    }
    return values_[static_cast<std::size_t>(d + max_offset_)];
}

cd BathTable::arc(ArcCase, int r, int rp) const { return value(r - rp); }

} // namespace frods
