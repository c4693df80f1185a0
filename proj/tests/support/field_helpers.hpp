#pragma once

#include <algorithm>
#include <cmath>

#include "ionspec/spectral_field.hpp"
#include "oracles.hpp"

namespace testing_support {

inline ionspec::SpectralField to_field(const oracle::Lattice& lat, const ionspec::GridPtr& grid) {
    ionspec::SpectralField f(grid);
    for (const auto& [k, v] : lat.c) {
        if (k.second < 0) continue;
        if (k.second == 0 && k.first < 0) continue;
        f.set_coeff(k.first, k.second, v);
    }
    return f;
}

/// max_k |field_k - lattice_k| over every lattice mode of the grid.
inline double max_diff(const ionspec::SpectralField& f, const oracle::Lattice& lat) {
    const int n = f.grid().n();
    double m = 0.0;
    for (int k1 = -n / 2 + 1; k1 <= n / 2; ++k1) {
        for (int k2 = -n / 2 + 1; k2 <= n / 2; ++k2) {
            m = std::max(m, std::abs(f.coeff(k1, k2) - lat.at(k1, k2)));
        }
    }
    return m;
}

inline double max_diff(const ionspec::SpectralField& a, const ionspec::SpectralField& b) {
    double m = 0.0;
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

inline ionspec::SpectralField single_mode(const ionspec::GridPtr& grid, int k1, int k2,
                                          ionspec::cplx amp) {
    ionspec::SpectralField f(grid);
    f.set_coeff(k1, k2, amp);
    return f;
}

}  // namespace testing_support
