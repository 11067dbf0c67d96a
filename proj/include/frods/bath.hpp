// Ohmic bath: discretized mode frequencies/couplings, the two-point
// correlation function B, and the precomputed midpoint-lattice table used by
// the diagram engine. Lattice arcs depend only on the signed step offset
// d = |r| - |r'|; the general three sign cases of the pair (r, r') are kept in
// the interface even though they coincide for this stationary bath.

#pragma once

#include "frods/matrix.hpp"

#include <vector>

namespace frods {

struct OhmicBathSpec {
    double xi = 0.2;        // Kondo parameter
    double omega_c = 2.5;   // cutoff frequency
    double beta = 5.0;      // inverse temperature
    int n_modes = 400;
    double omega_max = 25.0;

    void validate() const; // throws std::invalid_argument on bad fields
};

struct DiscretizedBath {
    std::vector<double> omegas;
    std::vector<double> couplings;
};

// omega_j = -omega_c ln(1 - (j/L)(1 - exp(-omega_max/omega_c)))
// c_j     = omega_j sqrt(xi omega_c (1 - exp(-omega_max/omega_c)) / L)
DiscretizedBath discretize(const OhmicBathSpec& spec);

// B(tau1, tau2) with dtau = |tau1| - |tau2|.
cd correlation(const DiscretizedBath& bath, const OhmicBathSpec& spec, double tau1, double tau2);

// Sign case of an index pair (r, r') from {1-,2-,...} x {1+,2+,...}.
enum class ArcCase { MinusMinus, MinusPlus, PlusPlus };

class BathTable {
public:
    // Correlation values at midpoint offsets d in [-max_offset, max_offset];
    // entries with |d| > k_max are zero when k_max > 0 (k_max = 0 disables
    // truncation). The boundary |d| == k_max stays nonzero.
    static BathTable build(const DiscretizedBath& bath, const OhmicBathSpec& spec, double dt,
                           int k_max, int max_offset);

    // Table with arbitrary values for d >= 0; negative offsets filled by
    // conjugation. Used by tests that need synthetic correlation data.
    static BathTable from_values(double dt, int k_max, const std::vector<cd>& values_nonneg_d);

    cd value(int d) const;
    cd arc(ArcCase c, int r, int rp) const; // d = r - rp; all cases coincide here

    double dt() const { return dt_; }
    int k_max() const { return k_max_; }
    int max_offset() const { return max_offset_; }

private:
    BathTable(double dt, int k_max, int max_offset);

    double dt_ = 0.0;
    int k_max_ = 0;
    int max_offset_ = 0;
    std::vector<cd> values_; // index d + max_offset_
};

} // namespace frods
