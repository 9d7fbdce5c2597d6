#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include "cqm/states.hpp"
#include "cqm/transport.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <vector>

namespace support {

using Grid = cqm::SpatialGrid1D<double>;

/// L1 distance between the image of the exact position distribution under
/// the map and the exact momentum distribution, both as masses of the
/// momentum-grid cells [p_k - dp/2, p_k + dp/2]. The cell preimages come from
/// the map's inverse, so this measures the map itself against closed forms.
inline double pushforward_l1(const cqm::MonotoneMomentumMap<double>& map, const Grid& g,
                             const oracle::AnalyticDensities& d) {
    const Eigen::Index n = g.size();
    std::vector<double> edges(n + 1), pre(n + 1);
    for (Eigen::Index k = 0; k <= n; ++k) edges[k] = g.p(0) + (double(k) - 0.5) * g.dp();
    for (Eigen::Index k = 0; k <= n; ++k) pre[k] = map.inverse(edges[k]);
    const bool decreasing = map.orientation() == cqm::Orientation::decreasing;
    if (decreasing) std::reverse(pre.begin(), pre.end());
    std::vector<double> fx = oracle::cdf_at(d.rho_x, d.x_lo, pre);
    if (decreasing) std::reverse(fx.begin(), fx.end());
    const std::vector<double> fp = oracle::cdf_at(d.rho_p, d.p_lo, edges);
    double l1 = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) l1 += std::abs(std::abs(fx[k + 1] - fx[k]) - (fp[k + 1] - fp[k]));
    return l1;
}

/// The 1D corpus: gaussian, boosted gaussian, cat state, oscillator levels 0..3.
struct CorpusEntry {
    const char* name;
    cqm::StateSpec spec;
    oracle::AnalyticDensities densities;
};

inline std::vector<CorpusEntry> corpus() {
    std::vector<CorpusEntry> out;
    out.push_back({"gaussian", cqm::Gaussian{0, 0, 1}, oracle::gaussian_densities(0, 0, 1)});
    out.push_back({"boosted gaussian", cqm::Gaussian{0, 2, 1}, oracle::gaussian_densities(0, 2, 1)});
    out.push_back({"cat state", cqm::Superposition{{{{1, 0}, {-4, 0, 1}}, {{1, 0}, {4, 0, 1}}}},
                   oracle::cat_densities({-4, 4}, 1, {1, 1})});
    const char* names[] = {"oscillator k=0", "oscillator k=1", "oscillator k=2", "oscillator k=3"};
    for (int k = 0; k <= 3; ++k)
        out.push_back({names[k], cqm::HarmonicEigenstate{k, 1, 1}, oracle::harmonic_densities(k, 1, 1)});
    return out;
}

}  // namespace support
