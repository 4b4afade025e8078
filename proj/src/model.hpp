// Observation model and partition bookkeeping: conjugate normal-gamma base
// measure over component parameters, finite Gaussian mixtures for synthetic
// data, dataset I/O, and ordered (least-element) allocation vectors.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace oasmix {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// One mixture component in mean/precision form: y ~ N(mu, 1/tau).
struct GaussComponent {
  double mu = 0.0;
  double tau = 1.0;
};

double log_gauss(double y, const GaussComponent& c);

// Sufficient statistics of a block of observations.
struct BlockStats {
  long n = 0;
  double sum = 0.0;
  double sumsq = 0.0;
  void add(double y) {
    ++n;
    sum += y;
    sumsq += y * y;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
};

// Normal-gamma law over (mu, tau): mu | tau ~ N(mu0, (lambda0 tau)^-1),
// tau ~ Gamma(a0, rate b0). Conjugate to the Gaussian observation model.
struct NormalGammaBase {
  double mu0 = 0.0;
  double lambda0 = 0.01;
  double a0 = 0.5;
  double b0 = 0.5;
  void validate() const;
};

// Hyperparameters of the posterior normal-gamma given a block of data.
NormalGammaBase posterior_hyper(const NormalGammaBase& base, const BlockStats& s);

GaussComponent sample_component(const NormalGammaBase& b, Rng& rng);
double log_normal_gamma_pdf(const NormalGammaBase& b, const GaussComponent& c);

// log of the marginal likelihood of a block: integral of the Gaussian
// likelihood against the normal-gamma base.
double log_marginal_likelihood(const NormalGammaBase& b, const BlockStats& s);
double log_marginal_likelihood_1(const NormalGammaBase& b, double y);

// Finite Gaussian mixture used to synthesize datasets and as the reference
// density in total-variation comparisons.
struct MixtureSpec {
  std::vector<double> w;
  std::vector<double> mu;
  std::vector<double> sd;
  void validate() const;
  double pdf(double x) const;
  double cdf(double x) const;
};

// Named test densities: lepto, bimodal, mix, trimodal, bimodal_sm.
MixtureSpec named_mixture(const std::string& name);

std::vector<double> sample_mixture(const MixtureSpec& m, int n, Rng& rng);

struct Dataset {
  std::vector<double> y;
  double mean() const;
};

// Reads one real number per line, multiplied by `scale`. Blank or non-numeric
// lines are an error. If expect_lines >= 0 the file must contain exactly that
// many values.
Dataset load_numeric_file(const std::string& path, double scale, long expect_lines);
void save_numeric_file(const std::string& path, const std::vector<double>& y);

// --- Ordered allocations -------------------------------------------------
//
// An allocation vector d is in least-element (order-of-appearance) form when
// d_1 = 1 and each d_i <= 1 + max(d_1..d_{i-1}).

bool is_valid_ordered(const std::vector<int>& d);

// Canonicalizes arbitrary positive labels. Returns (d, sigma) where d is the
// least-element form and sigma[j-1] is the input label that became j.
std::pair<std::vector<int>, std::vector<int>> least_element_relabel(const std::vector<int>& labels);

std::vector<int> counts_of(const std::vector<int>& d, int k);

// Contiguous set {lo..hi} of values v for which d with d_i := v stays a valid
// ordered allocation. `i` is 1-based; the current d_i always lies inside.
std::pair<int, int> admissible_move_range(const std::vector<int>& d, int i);

// Canonical text form of the partition: blocks of 1-based data indices, each
// ascending and joined by '.', blocks ordered by least element and joined by
// '|'. The overload with `order` maps vector positions to data indices
// (position p holds data point order[p], 0-based).
std::string partition_signature(const std::vector<int>& d);
std::string partition_signature(const std::vector<int>& d, const std::vector<int>& order);
std::vector<std::vector<int>> parse_partition_signature(const std::string& sig);

// Allocation vector plus the derived block sizes, kept in lockstep.
struct AllocationState {
  std::vector<int> d;       // least-element labels, 1-based
  std::vector<int> counts;  // counts[j-1] = size of block j
  int n() const { return static_cast<int>(d.size()); }
  int k() const { return static_cast<int>(counts.size()); }
  void validate() const;  // throws std::runtime_error on invariant violation
};

AllocationState make_allocation(const std::vector<int>& d);

}  // namespace oasmix
