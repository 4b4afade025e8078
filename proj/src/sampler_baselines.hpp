// Comparator samplers sharing the ordered-allocation Gibbs state.
//
// 1. The original ordered allocation sampler: allocations move only inside the
//    admissible range that preserves least-element order, preceded by a
//    uniform permutation of the data positions each sweep.
// 2. The marginal sampler (Polya-urn predictive): weights integrated out,
//    available for the Dirichlet and Pitman-Yor priors only.
#pragma once

#include <vector>

#include "model.hpp"
#include "sampler_oas.hpp"
#include "weights.hpp"

namespace oasmix {

// Uniform random permutation of the data positions with consistent relabeling
// of allocations and reordering of per-block pairs.
void permute_positions(OasState& st, const OasConfig& cfg, Rng& rng);

// Resamples d at 0-based `pos` over its admissible range. Masses: block
// weight times Gaussian fit for existing blocks; leftover weight mass times
// the fit of the block-creating slot, which is the current component when the
// observation sits alone in the last block and a fresh prior draw otherwise.
void ooas_update_one_allocation(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                                int pos, Rng& rng);

// One full sweep: permute positions, update every allocation sequentially,
// then refresh components and weights. Rejects cfg.collapsed.
void ooas_sweep(OasState& st, const std::vector<double>& y, const OasConfig& cfg, Rng& rng);

// --- Marginal sampler --------------------------------------------------------

struct MarginalState {
  std::vector<int> c;       // labels 1..k, arbitrary order, every label occupied
  std::vector<int> counts;  // counts[j-1] = |{i : c_i = j}|
  std::vector<GaussComponent> comps;
  int n() const { return static_cast<int>(c.size()); }
  int k() const { return static_cast<int>(counts.size()); }
  void validate() const;
};

MarginalState init_marginal_one_block(const std::vector<double>& y, const NormalGammaBase& base,
                                      Rng& rng);

// Resamples c at `pos`: existing block c gets (m_c - sigma) g(y|x_c); a new
// block gets (beta + k sigma) g(y|aux) where aux is the removed component when
// the observation sat alone (its block is deleted first) and a fresh prior
// draw otherwise. DP/PY only.
void marginal_update_one_allocation(MarginalState& st, const std::vector<double>& y,
                                    const MixingPrior& prior, const NormalGammaBase& base,
                                    int pos, Rng& rng);

// One full sweep: every allocation sequentially, then component refresh.
void marginal_sweep(MarginalState& st, const std::vector<double>& y, const MixingPrior& prior,
                    const NormalGammaBase& base, Rng& rng);

}  // namespace oasmix
