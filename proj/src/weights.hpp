// Mixing weight laws for the two sampler paths.
//
// Size-biased path (Dirichlet / Pitman-Yor): block weights are kept directly
// in discovery order; sticks have independent Beta full conditionals.
//
// General path (exchangeable stick-breaking / geometric-weights): a prefix of
// raw weights p_1..p_L is kept together with distinct picks alpha_j telling
// which raw weight each block uses.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace oasmix {

enum class PriorKind { kDP, kPY, kESB, kGP };

struct MixingPrior {
  PriorKind kind = PriorKind::kDP;
  double beta = 1.0;   // DP/PY concentration
  double sigma = 0.0;  // PY discount (0 for DP)
  double a = 1.0;      // ESB/GP Beta parameters
  double b = 1.0;

  bool size_biased() const { return kind == PriorKind::kDP || kind == PriorKind::kPY; }
  void validate() const;
  std::string name() const;

  static MixingPrior dp(double beta);
  static MixingPrior py(double sigma, double beta);
  static MixingPrior esb(double a, double b);
  static MixingPrior gp(double a, double b);
};

double log_beta_pdf(double x, double a, double b);

// --- Size-biased path -------------------------------------------------------

struct StickWeights {
  std::vector<double> v;  // sticks
  std::vector<double> p;  // block weights, p_j = v_j * prod_{l<j} (1 - v_l)
  double tail = 1.0;      // 1 - sum(p)
};

StickWeights sticks_to_weights(const std::vector<double>& v);

// Beta parameters of stick j given block sizes n: (n_j - sigma,
// sum_{l>j} n_l + beta + j*sigma), for j = 1..k.
std::vector<std::pair<double, double>> stick_posterior_params(const MixingPrior& prior,
                                                              const std::vector<int>& counts);
// Zero-count case: (1 - sigma, beta + j*sigma).
std::vector<std::pair<double, double>> stick_prior_params(const MixingPrior& prior, int k);

StickWeights sample_sticks_prior(const MixingPrior& prior, int k, Rng& rng);
StickWeights sample_sticks_posterior(const MixingPrior& prior, const std::vector<int>& counts,
                                     Rng& rng);

// Weight of a newly discovered block given the existing block weights:
// v * (1 - sum(pblock)) with v ~ Be(1-sigma, beta+(k+1)*sigma). The sum is
// accumulated in ascending order so the result does not depend on the order
// of the existing weights.
double discover_new_weight_sb(const MixingPrior& prior, const std::vector<double>& pblock,
                              Rng& rng);

// Log density of block weights p under independent sticks v_j ~ Be(params[j]),
// expressed in p coordinates (includes the stick-to-weight Jacobian).
double log_stick_weight_density(const std::vector<double>& p,
                                const std::vector<std::pair<double, double>>& params);

// --- General path ------------------------------------------------------------

struct GeneralWeights {
  std::vector<double> sticks;  // ESB only: one stick per prefix entry
  double lambda = 0.5;         // GP only
  std::vector<double> p;       // raw weight prefix p_1..p_L
  std::vector<int> alpha;      // distinct 1-based picks, one per block

  int L() const { return static_cast<int>(p.size()); }
  int k() const { return static_cast<int>(alpha.size()); }
  double pblock(int j) const { return p[alpha[j] - 1]; }  // j is 0-based block index
  double occupied() const;                                // sum of picked weights
  double prefix_sum() const;
  void validate(const MixingPrior& prior) const;
};

// Fresh prior state with a single block: alpha = (1) and a prefix covering it.
GeneralWeights init_general_prior(const MixingPrior& prior, Rng& rng);

// Appends one raw weight to the prefix by the prior continuation rule.
void extend_prefix(GeneralWeights& w, const MixingPrior& prior, Rng& rng);

// Drops raw weights beyond the largest pick.
void prune_prefix(GeneralWeights& w);

// Draws an unoccupied raw-weight index with probability proportional to its
// weight, extending the prefix on demand; does not modify alpha.
int sample_unoccupied_index(GeneralWeights& w, const MixingPrior& prior, Rng& rng);

// As above but appends the pick to alpha. Returns the picked index.
int discover_new_alpha(GeneralWeights& w, const MixingPrior& prior, Rng& rng);

// Log probability of drawing the given sequence of picks one after another,
// each proportional to its raw weight among the not-yet-picked ones.
double log_alpha_sequence_density(const GeneralWeights& w, const std::vector<int>& seq);

enum class AlphaMode { kEnumerate, kLocallyBalanced };

// Redraws the assignment of blocks to the currently picked raw weights from
// pi(rho) proportional to prod_j p_{alpha_rho(j)}^{n_j}: exactly (enumerate,
// k <= 6) or by `steps` locally-balanced Metropolis steps on transpositions.
void sample_alpha_block(GeneralWeights& w, const std::vector<int>& counts, AlphaMode mode,
                        int steps, Rng& rng);

// One sequential pass over blocks proposing to switch each pick with a fresh
// unoccupied one; accepted with the two-option posterior odds.
void alpha_acceleration(GeneralWeights& w, const MixingPrior& prior,
                        const std::vector<int>& counts, Rng& rng);

// Exponent of each raw weight in the likelihood: r_l = n_j if alpha_j = l for
// some block j, else 0; length equals the prefix length.
std::vector<long> alpha_exponents(const GeneralWeights& w, const std::vector<int>& counts);

std::vector<std::pair<double, double>> esb_stick_posterior_params(const MixingPrior& prior,
                                                                  const std::vector<long>& r);
std::pair<double, double> gp_lambda_posterior_params(const MixingPrior& prior,
                                                     const std::vector<long>& r);

// Full conditional update of the raw weights given the picks: ESB sticks from
// independent Betas, GP lambda from its Beta; the prefix length is preserved.
void sample_weights_posterior_general(GeneralWeights& w, const MixingPrior& prior,
                                      const std::vector<int>& counts, Rng& rng);

// Log prior density of the prefix: ESB in p coordinates (with Jacobian),
// GP as the Be(a,b) density of lambda (always one-dimensional).
double log_general_prefix_prior(const GeneralWeights& w, const MixingPrior& prior);

// Log density of the prefix under the full conditional given exponents r
// (same parameterization as the prior version).
double log_general_prefix_posterior(const GeneralWeights& w, const MixingPrior& prior,
                                    const std::vector<long>& r);

}  // namespace oasmix
