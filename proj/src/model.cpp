#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oasmix {

double log_gauss(double y, const GaussComponent& c) {
  const double r = y - c.mu;
  return 0.5 * (std::log(c.tau) - kLog2Pi) - 0.5 * c.tau * r * r;
}

void NormalGammaBase::validate() const {
  if (!(lambda0 > 0.0) || !(a0 > 0.0) || !(b0 > 0.0) || !std::isfinite(mu0))
    throw std::invalid_argument("normal-gamma base: lambda0, a0, b0 must be positive and mu0 finite");
}

NormalGammaBase posterior_hyper(const NormalGammaBase& base, const BlockStats& s) {
  if (s.n == 0) return base;
  const double m = static_cast<double>(s.n);
  const double ybar = s.sum / m;
  NormalGammaBase post;
  post.lambda0 = base.lambda0 + m;
  post.mu0 = (base.lambda0 * base.mu0 + s.sum) / post.lambda0;
  post.a0 = base.a0 + 0.5 * m;
  double ss = s.sumsq - m * ybar * ybar;  // within-block sum of squares
  if (ss < 0.0) ss = 0.0;                 // guard against rounding
  const double shrink = base.lambda0 * m * (ybar - base.mu0) * (ybar - base.mu0) / post.lambda0;
  post.b0 = base.b0 + 0.5 * ss + 0.5 * shrink;
  return post;
}

GaussComponent sample_component(const NormalGammaBase& b, Rng& rng) {
  GaussComponent c;
  c.tau = rng.gamma(b.a0) / b.b0;
  if (c.tau < 1e-300) c.tau = 1e-300;
  c.mu = b.mu0 + rng.normal() / std::sqrt(b.lambda0 * c.tau);
  return c;
}

double log_normal_gamma_pdf(const NormalGammaBase& b, const GaussComponent& c) {
  const double r = c.mu - b.mu0;
  const double lognorm = 0.5 * (std::log(b.lambda0) + std::log(c.tau) - kLog2Pi) -
                         0.5 * b.lambda0 * c.tau * r * r;
  const double loggam = b.a0 * std::log(b.b0) - std::lgamma(b.a0) +
                        (b.a0 - 1.0) * std::log(c.tau) - b.b0 * c.tau;
  return lognorm + loggam;
}

double log_marginal_likelihood(const NormalGammaBase& b, const BlockStats& s) {
  if (s.n == 0) return 0.0;
  const NormalGammaBase p = posterior_hyper(b, s);
  const double m = static_cast<double>(s.n);
  return -0.5 * m * kLog2Pi + 0.5 * (std::log(b.lambda0) - std::log(p.lambda0)) +
         std::lgamma(p.a0) - std::lgamma(b.a0) + b.a0 * std::log(b.b0) -
         p.a0 * std::log(p.b0);
}

double log_marginal_likelihood_1(const NormalGammaBase& b, double y) {
  BlockStats s;
  s.add(y);
  return log_marginal_likelihood(b, s);
}

void MixtureSpec::validate() const {
  if (w.empty() || w.size() != mu.size() || w.size() != sd.size())
    throw std::invalid_argument("mixture: w, mu, sd must be nonempty and equal length");
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !(sd[i] > 0.0) || !std::isfinite(mu[i]))
      throw std::invalid_argument("mixture: weights and sds must be positive, means finite");
    total += w[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("mixture: weights must sum to one");
}

double MixtureSpec::pdf(double x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double z = (x - mu[i]) / sd[i];
    f += w[i] * std::exp(-0.5 * z * z) / (sd[i] * std::sqrt(2.0 * M_PI));
  }
  return f;
}

double MixtureSpec::cdf(double x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double z = (x - mu[i]) / (sd[i] * std::sqrt(2.0));
    f += w[i] * 0.5 * std::erfc(-z);
  }
  return f;
}

MixtureSpec named_mixture(const std::string& name) {
  MixtureSpec m;
  if (name == "lepto") {
    m.w = {0.67, 0.33};
    m.mu = {0.0, 0.0};
    m.sd = {1.0, 0.25};
  } else if (name == "bimodal") {
    m.w = {0.5, 0.5};
    m.mu = {-1.0, 1.0};
    m.sd = {0.5, 0.5};
  } else if (name == "mix") {
    m.w = {0.3, 0.2, 0.25, 0.25};
    m.mu = {-2.0, -2.0, 1.5, 4.0};
    m.sd = {1.25, 0.25, 0.75, 0.75};
  } else if (name == "trimodal") {
    m.w = {0.25, 0.5, 0.25};
    m.mu = {-1.4, 0.0, 1.4};
    m.sd = {0.3, 0.3, 0.3};
  } else if (name == "bimodal_sm") {
    m.w = {0.5, 0.5};
    m.mu = {-1.0, 1.0};
    m.sd = {0.6, 0.6};
  } else {
    throw std::invalid_argument("unknown mixture name: " + name);
  }
  m.validate();
  return m;
}

std::vector<double> sample_mixture(const MixtureSpec& m, int n, Rng& rng) {
  m.validate();
  if (n < 0) throw std::invalid_argument("sample_mixture: n must be nonnegative");
  std::vector<double> cum(m.w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m.w.size(); ++i) {
    acc += m.w[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    std::size_t j = 0;
    while (j + 1 < cum.size() && u > cum[j]) ++j;
    y[i] = m.mu[j] + m.sd[j] * rng.normal();
  }
  return y;
}

double Dataset::mean() const {
  if (y.empty()) throw std::runtime_error("dataset is empty");
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

Dataset load_numeric_file(const std::string& path, double scale, long expect_lines) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file: " + path);
  Dataset d;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &pos);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not a number: '" + line + "'");
    }
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos != line.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing content: '" + line + "'");
    d.y.push_back(v * scale);
  }
  if (d.y.empty()) throw std::runtime_error(path + ": no data lines");
  if (expect_lines >= 0 && static_cast<long>(d.y.size()) != expect_lines)
    throw std::runtime_error(path + ": expected " + std::to_string(expect_lines) + " values, found " +
                             std::to_string(d.y.size()));
  return d;
}

void save_numeric_file(const std::string& path, const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write data file: " + path);
  out.precision(17);
  for (double v : y) out << v << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

bool is_valid_ordered(const std::vector<int>& d) {
  if (d.empty()) return false;
  int kmax = 0;
  for (int v : d) {
    if (v < 1 || v > kmax + 1) return false;
    kmax = std::max(kmax, v);
  }
  return true;
}

std::pair<std::vector<int>, std::vector<int>> least_element_relabel(const std::vector<int>& labels) {
  std::vector<int> d(labels.size());
  std::vector<int> sigma;            // sigma[j-1] = original label of new block j
  std::vector<int> map;              // original label -> new label (0 = unseen)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int lab = labels[i];
    if (lab < 1) throw std::invalid_argument("least_element_relabel: labels must be >= 1");
    if (static_cast<std::size_t>(lab) > map.size()) map.resize(lab, 0);
    if (map[lab - 1] == 0) {
      sigma.push_back(lab);
      map[lab - 1] = static_cast<int>(sigma.size());
    }
    d[i] = map[lab - 1];
  }
  return {std::move(d), std::move(sigma)};
}

std::vector<int> counts_of(const std::vector<int>& d, int k) {
  std::vector<int> counts(k, 0);
  for (int v : d) {
    if (v < 1 || v > k) throw std::invalid_argument("counts_of: label out of range");
    ++counts[v - 1];
  }
  return counts;
}

std::pair<int, int> admissible_move_range(const std::vector<int>& d, int i) {
  const int n = static_cast<int>(d.size());
  if (i < 1 || i > n) throw std::invalid_argument("admissible_move_range: position out of range");
  if (!is_valid_ordered(d)) throw std::invalid_argument("admissible_move_range: d is not in least-element form");
  int mprev = 0;  // max over d_1..d_{i-1}
  for (int m = 0; m < i - 1; ++m) mprev = std::max(mprev, d[m]);
  const int hi = mprev + 1;
  // A later position m requires d_m <= 1 + max of its predecessors. If the
  // predecessors other than i reach only below d_m - 1, position i must
  // supply the value d_m - 1.
  int lo = 1;
  int g = mprev;  // max over d_1..d_{m-1} excluding position i
  for (int m = i; m < n; ++m) {
    const int req = d[m] - 1;
    if (g < req) lo = std::max(lo, req);
    g = std::max(g, d[m]);
  }
  return {lo, hi};
}

std::string partition_signature(const std::vector<int>& d) {
  std::vector<int> identity(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) identity[i] = static_cast<int>(i);
  return partition_signature(d, identity);
}

std::string partition_signature(const std::vector<int>& d, const std::vector<int>& order) {
  if (d.size() != order.size())
    throw std::invalid_argument("partition_signature: order size mismatch");
  int k = 0;
  for (int v : d) k = std::max(k, v);
  std::vector<std::vector<int>> blocks(k);
  for (std::size_t pos = 0; pos < d.size(); ++pos) {
    if (d[pos] < 1) throw std::invalid_argument("partition_signature: labels must be >= 1");
    blocks[d[pos] - 1].push_back(order[pos] + 1);  // 1-based data index
  }
  for (auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("partition_signature: empty block label");
    std::sort(b.begin(), b.end());
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) { return a[0] < b[0]; });
  std::string out;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (j) out += '|';
    for (std::size_t i = 0; i < blocks[j].size(); ++i) {
      if (i) out += '.';
      out += std::to_string(blocks[j][i]);
    }
  }
  return out;
}

std::vector<std::vector<int>> parse_partition_signature(const std::string& sig) {
  std::vector<std::vector<int>> blocks;
  if (sig.empty()) throw std::invalid_argument("parse_partition_signature: empty signature");
  std::stringstream ss(sig);
  std::string blocktext;
  while (std::getline(ss, blocktext, '|')) {
    std::vector<int> block;
    std::stringstream bs(blocktext);
    std::string tok;
    while (std::getline(bs, tok, '.')) {
      if (tok.empty()) throw std::invalid_argument("parse_partition_signature: bad token in: " + sig);
      block.push_back(std::stoi(tok));
    }
    if (block.empty()) throw std::invalid_argument("parse_partition_signature: empty block in: " + sig);
    blocks.push_back(std::move(block));
  }
  return blocks;
}

void AllocationState::validate() const {
  if (!is_valid_ordered(d)) throw std::runtime_error("allocation state: d is not in least-element form");
  int kmax = 0;
  for (int v : d) kmax = std::max(kmax, v);
  if (kmax != k()) throw std::runtime_error("allocation state: counts length disagrees with max label");
  const std::vector<int> expect = counts_of(d, kmax);
  if (expect != counts) throw std::runtime_error("allocation state: counts out of sync with d");
  for (int c : counts)
    if (c <= 0) throw std::runtime_error("allocation state: empty block");
}

AllocationState make_allocation(const std::vector<int>& d) {
  if (!is_valid_ordered(d)) throw std::invalid_argument("make_allocation: d is not in least-element form");
  AllocationState st;
  st.d = d;
  int k = 0;
  for (int v : d) k = std::max(k, v);
  st.counts = counts_of(d, k);
  return st;
}

}  // namespace oasmix
