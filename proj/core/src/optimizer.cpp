#include "hybq/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "hybq/constants.hpp"
#include "hybq/errors.hpp"

namespace hybq {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream) {
  std::uint64_t s = master;
  s ^= splitmix64_next(s) + 0xD1342543DE82EF95ull * (stream + 1);
  s ^= splitmix64_next(s) + 0xAF251AF3B0F025B5ull * (substream + 1);
  return splitmix64_next(s);
}

double SplitMix::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

int SplitMix::uniform_int(int n) {
  if (n <= 0) throw ValidationError("uniform_int: n must be positive");
  return static_cast<int>(next() % static_cast<std::uint64_t>(n));
}

void SearchConfig::validate() const {
  if (population_size < 2) throw ValidationError("population_size must be at least 2");
  if (generations < 1 || nm_max_iters < 1 || restarts < 1)
    throw ValidationError("generations, nm_max_iters and restarts must be positive");
  if (!(nm_tolerance > 0.0) || !(success_threshold > 0.0))
    throw ValidationError("tolerances must be positive");
  if (!(mutation_rate > 0.0) || mutation_rate >= 1.0)
    throw ValidationError("mutation_rate must lie in (0,1)");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw ValidationError("crossover_rate must lie in [0,1]");
  if (threads < 0) throw ValidationError("threads must be non-negative");
  if (nm_polish_period < 1 || nm_polish_iters < 1)
    throw ValidationError("polish settings must be positive");
}

void parallel_for_indexed(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int t = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  t = std::clamp(t, 1, n);
  if (t == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

NelderMeadResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                             const SearchConfig& cfg, double initial_step) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw ValidationError("nelder_mead: dimension must be at least 1");
  if (!(initial_step > 0.0)) throw ValidationError("nelder_mead: initial_step must be positive");

  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i](i - 1) += initial_step;
  long evals = 0;
  for (int i = 0; i <= n; ++i) fs[i] = (++evals, f(xs[i]));

  std::vector<int> order(n + 1);
  const auto sort_order = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };

  int iter = 0;
  for (; iter < cfg.nm_max_iters; ++iter) {
    sort_order();
    const int best = order[0], worst = order[n], second = order[n - 1];
    if (fs[worst] - fs[best] < cfg.nm_tolerance) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);  // reflection, alpha = 1
    const double fr = (++evals, f(xr));
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);  // expansion
      const double fe = (++evals, f(xe));
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const Eigen::VectorXd xc =
          outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (xs[worst] - centroid);
      const double fc = (++evals, f(xc));
      if (fc < (outside ? fr : fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {  // shrink toward the best vertex
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = (++evals, f(xs[i]));
        }
      }
    }
  }
  sort_order();
  return {xs[order[0]], fs[order[0]], iter, evals};
}

Eigen::VectorXd Box::fold(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  for (int k = 0; k < y.size(); ++k) {
    const double w = hi(k) - lo(k);
    if (periodic) {
      double r = std::fmod(y(k) - lo(k), w);
      if (r < 0.0) r += w;
      y(k) = (r >= w) ? lo(k) : lo(k) + r;
    } else {
      y(k) = std::clamp(y(k), lo(k), hi(k));
    }
  }
  return y;
}

namespace {

struct GaState {
  std::vector<Individual> pop;
  int best = 0;
  long evaluations = 0;
};

int better_of(const std::vector<Individual>& pop, int a, int b) {
  if (pop[a].f != pop[b].f) return pop[a].f < pop[b].f ? a : b;
  return std::min(a, b);
}

// One GA run. Selection, crossover and mutation are drawn from generators
// derived per (generation, individual), so objective evaluation can run on
// any number of threads without touching the trajectory.
GaState run_ga(const ObjectiveFn& f, const Box& box, const SearchConfig& cfg,
               std::uint64_t master, const ObjectiveFn* polish_target, long* polish_evals,
               Eigen::VectorXd* polish_x, double* polish_f) {
  const int n = static_cast<int>(box.lo.size());
  const int pop_size = cfg.population_size;
  const Eigen::VectorXd width = box.hi - box.lo;

  GaState st;
  st.pop.resize(pop_size);
  for (int i = 0; i < pop_size; ++i) {
    SplitMix rng(derive_seed(master, 0, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x(k) = box.lo(k) + rng.uniform() * width(k);
    st.pop[i].x = std::move(x);
  }
  parallel_for_indexed(pop_size, cfg.threads, [&](int i) { st.pop[i].f = f(st.pop[i].x); });
  st.evaluations += pop_size;
  st.best = 0;
  for (int i = 1; i < pop_size; ++i) st.best = better_of(st.pop, st.best, i);

  const double sigma_scale = 0.05;
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    if (st.pop[st.best].f < cfg.success_threshold) break;

    std::vector<Individual> next(pop_size);
    next[0] = st.pop[st.best];  // elite, fitness kept
    for (int i = 1; i < pop_size; ++i) {
      SplitMix rng(derive_seed(master, static_cast<std::uint64_t>(gen),
                               static_cast<std::uint64_t>(i)));
      const int pa = better_of(st.pop, rng.uniform_int(pop_size), rng.uniform_int(pop_size));
      const int pb = better_of(st.pop, rng.uniform_int(pop_size), rng.uniform_int(pop_size));
      Eigen::VectorXd child = st.pop[pa].x;
      if (rng.uniform() < cfg.crossover_rate) {
        for (int k = 0; k < n; ++k)
          if (rng.uniform() < 0.5) child(k) = st.pop[pb].x(k);
      }
      for (int k = 0; k < n; ++k)
        if (rng.uniform() < cfg.mutation_rate) child(k) += rng.normal() * sigma_scale * width(k);
      next[i].x = box.fold(child);
    }
    parallel_for_indexed(pop_size - 1, cfg.threads,
                         [&](int i) { next[i + 1].f = f(next[i + 1].x); });
    st.evaluations += pop_size - 1;
    st.pop = std::move(next);
    st.best = 0;
    for (int i = 1; i < pop_size; ++i) st.best = better_of(st.pop, st.best, i);

    if (polish_target && gen % cfg.nm_polish_period == 0) {
      SearchConfig polish_cfg = cfg;
      polish_cfg.nm_max_iters = cfg.nm_polish_iters;
      const NelderMeadResult r =
          nelder_mead(*polish_target, st.pop[st.best].x, polish_cfg, 0.02);
      *polish_evals += r.evaluations;
      if (r.f < *polish_f) {
        *polish_f = r.f;
        *polish_x = r.x;
      }
      if (r.f < st.pop[st.best].f) {
        int worst = 0;  // polished point displaces the worst individual
        for (int i = 1; i < pop_size; ++i)
          if (st.pop[i].f >= st.pop[worst].f) worst = i;
        st.pop[worst] = {box.fold(r.x), r.f};
        st.best = better_of(st.pop, st.best, worst);
      }
      if (*polish_f < cfg.success_threshold) break;
    }
  }
  return st;
}

}  // namespace

std::vector<Individual> genetic_search(const ObjectiveFn& f, const Box& domain,
                                       const SearchConfig& cfg) {
  cfg.validate();
  if (domain.lo.size() != domain.hi.size() || domain.lo.size() == 0)
    throw ValidationError("genetic_search: malformed domain box");
  for (int k = 0; k < domain.lo.size(); ++k)
    if (!(domain.lo(k) < domain.hi(k)) || !std::isfinite(domain.lo(k)) ||
        !std::isfinite(domain.hi(k)))
      throw ValidationError("genetic_search: box bounds must be finite with lo < hi");
  GaState st = run_ga(f, domain, cfg, cfg.seed, nullptr, nullptr, nullptr, nullptr);
  std::stable_sort(st.pop.begin(), st.pop.end(),
                   [](const Individual& a, const Individual& b) { return a.f < b.f; });
  return st.pop;
}

double objective_cnot_class(const GateSequence& seq, const ConnectivityGraph& g,
                            const LogicalEncoding& enc, double w_leak, double w_inv) {
  (void)g;
  const MatrixXcd m = sequence_logical_block(enc, seq);
  return w_leak * leakage(m) + w_inv * cnot_class_error(m);
}

double objective_exact_cnot(const GateSequence& seq, const ConnectivityGraph& g,
                            const LogicalEncoding& enc, double w_leak) {
  (void)g;
  const MatrixXcd m = sequence_logical_block(enc, seq);
  return phase_min_distance(m, cnot_matrix()) + w_leak * leakage(m);
}

double evaluate_objective(const Objective& obj, const GateSequence& seq,
                          const ConnectivityGraph& g, const LogicalEncoding& enc) {
  if (obj.target == GateTarget::CNOTClass)
    return objective_cnot_class(seq, g, enc, obj.w_leak, obj.w_inv);
  return objective_exact_cnot(seq, g, enc, obj.w_leak);
}

namespace {

double wrap_unit(double x) {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

GateSequence sequence_from_taus(const ConnectivityGraph& g,
                                const std::vector<std::pair<int, int>>& tmpl,
                                const Eigen::VectorXd& taus) {
  GateSequence seq;
  seq.graph = g.name;
  seq.pulses.reserve(tmpl.size());
  for (std::size_t k = 0; k < tmpl.size(); ++k)
    seq.pulses.push_back({tmpl[k].first, tmpl[k].second, wrap_unit(taus(static_cast<int>(k)))});
  return seq;
}

std::vector<std::pair<int, int>> random_template(const ConnectivityGraph& g, int length,
                                                 SplitMix& rng) {
  std::vector<std::pair<int, int>> tmpl;
  tmpl.reserve(length);
  int previous = -1;
  for (int k = 0; k < length; ++k) {
    int e = rng.uniform_int(static_cast<int>(g.edges.size()));
    if (g.edges.size() > 1) {  // merging identical neighbours would waste a slot
      while (e == previous) e = rng.uniform_int(static_cast<int>(g.edges.size()));
    }
    previous = e;
    tmpl.push_back(g.edges[e]);
  }
  return tmpl;
}

// ---------------------------------------------------------------------------
// Residual refinement for the gate objectives.
//
// The weighted scalar objective is a poor landscape near the solutions: a
// leakage-free CNOT-class sequence has to zero ~40 independent coupling
// components at once, and penalty descent stalls on zero-leakage components
// where the gate invariants are pinned (typically at the identity class).
// The same conditions written as a residual *vector* are smooth in the
// durations, so a damped Gauss-Newton iteration with a finite-difference
// Jacobian reaches exact zeros from generic starts — provided the template
// admits a solution at all. Short templates generically do not (more
// independent conditions than durations), so the random-template search
// first solves on a longer scratch template, where solutions are plentiful,
// and then deletes pulses one at a time, re-solving after each deletion,
// until the requested length is reached.
//
// Exchange pulses commute with total spin, so a column starting in the
// total-spin-1 sector never leaves it. Leakage from the codespace therefore
// goes entirely into the orthogonal complement of the code *within* that
// sector — five states for two encoded qubits on six spins, not eleven —
// and the residual system only needs that complement.

struct ResidualSystem {
  const LogicalEncoding* enc = nullptr;
  GateTarget target = GateTarget::CNOTClass;
  MatrixXcd leak_basis;  // dim x d_leak, orthonormal, orthogonal to the code
  MatrixXcd cnot;        // fixed target for GateTarget::ExactCNOT
  int n_residuals = 0;
  bool valid = false;
};

ResidualSystem make_residual_system(const LogicalEncoding& enc, GateTarget target) {
  ResidualSystem sys;
  sys.enc = &enc;
  sys.target = target;
  sys.cnot = cnot_matrix();
  if (enc.block.n_up < 0) return sys;  // leakage sector analysis needs a fixed-Sz block
  const int dim = enc.block.dim();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(block_s_squared(enc.block));
  if (es.info() != Eigen::Success) return sys;
  std::vector<int> sector;  // total-spin-1 eigenspace: S(S+1) = 2
  for (int k = 0; k < dim; ++k)
    if (std::abs(es.eigenvalues()(k) - 2.0) < 1e-8) sector.push_back(k);
  if (static_cast<int>(sector.size()) <= enc.basis.cols()) return sys;
  MatrixXcd v1(dim, static_cast<int>(sector.size()));
  for (std::size_t c = 0; c < sector.size(); ++c) v1.col(static_cast<int>(c)) = es.eigenvectors().col(sector[c]);
  const MatrixXcd comp = v1 - enc.basis * (enc.basis.adjoint() * v1);
  std::vector<VectorXcd> kept;  // modified Gram-Schmidt, dropping rank-deficient columns
  for (int c = 0; c < comp.cols(); ++c) {
    VectorXcd v = comp.col(c);
    for (const VectorXcd& u : kept) v -= u.dot(v) * u;
    if (v.norm() > 1e-8) {
      v.normalize();
      kept.push_back(std::move(v));
    }
  }
  if (kept.empty()) return sys;
  sys.leak_basis.resize(dim, static_cast<int>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) sys.leak_basis.col(static_cast<int>(c)) = kept[c];
  const int code_dim = static_cast<int>(enc.basis.cols());
  sys.n_residuals = 2 * code_dim * static_cast<int>(kept.size()) +
                    (target == GateTarget::CNOTClass ? 4 : 2 * code_dim * code_dim);
  sys.valid = true;
  return sys;
}

Eigen::VectorXd residual_vector(const ResidualSystem& sys,
                                const std::vector<std::pair<int, int>>& tmpl,
                                const Eigen::VectorXd& taus) {
  MatrixXcd cols = sys.enc->basis;
  for (std::size_t k = 0; k < tmpl.size(); ++k)
    apply_exchange_inplace(sys.enc->block, tmpl[k].first, tmpl[k].second,
                           taus(static_cast<int>(k)), cols);
  const MatrixXcd leak_block = sys.leak_basis.adjoint() * cols;  // code -> complement coupling
  const MatrixXcd m = sys.enc->basis.adjoint() * cols;           // logical block
  Eigen::VectorXd r(sys.n_residuals);
  int p = 0;
  for (int c = 0; c < leak_block.cols(); ++c)
    for (int q = 0; q < leak_block.rows(); ++q) {
      r(p++) = leak_block(q, c).real();
      r(p++) = leak_block(q, c).imag();
    }
  if (sys.target == GateTarget::CNOTClass) {
    const MakhlinInvariants inv = makhlin_invariants(closest_unitary(m));
    r(p++) = inv.g1.real();
    r(p++) = inv.g1.imag();
    r(p++) = (inv.g2.real() - 1.0) / 3.0;  // scale matches the scalar objective's |G2-1|^2/9
    r(p++) = inv.g2.imag() / 3.0;
  } else {
    const Complex tr = (sys.cnot.adjoint() * m).trace();
    const Complex phase = std::abs(tr) > 1e-300 ? tr / std::abs(tr) : Complex(1.0, 0.0);
    const MatrixXcd diff = m - phase * sys.cnot;
    for (int c = 0; c < diff.cols(); ++c)
      for (int q = 0; q < diff.rows(); ++q) {
        r(p++) = diff(q, c).real();
        r(p++) = diff(q, c).imag();
      }
  }
  return r;
}

// Residual-evaluation allowance per restart; every budget unit is one
// residual evaluation (comparable to one objective evaluation).
constexpr long kRefineEvalBudget = 2'500'000;
constexpr double kRefineCostTol = 1e-20;  // cost = ||r||^2 / 2; leakage <= 2 * cost
constexpr int kScratchLength = 44;        // solve length before contraction
constexpr int kOwnLengthStarts = 4;
constexpr int kScratchAttempts = 64;
constexpr double kMinPulseWeight = 0.02;  // min distance of tau from a whole period

struct LmResult {
  Eigen::VectorXd x;
  double cost = std::numeric_limits<double>::infinity();
  bool solved = false;
};

// Damped Gauss-Newton (Levenberg-Marquardt) on the residual vector with a
// forward-difference Jacobian. Fully deterministic; Jacobian columns are
// evaluated in parallel with indexed writes.
LmResult lm_minimize(const ResidualSystem& sys, const std::vector<std::pair<int, int>>& tmpl,
                     const Eigen::VectorXd& x0, int max_iters, double cost_tol, int threads,
                     long& budget) {
  const int n = static_cast<int>(x0.size());
  LmResult out;
  out.x = x0;
  Eigen::VectorXd r = residual_vector(sys, tmpl, out.x);
  --budget;
  out.cost = 0.5 * r.squaredNorm();
  double lambda = 1e-3;
  const double h = 1e-7;
  Eigen::MatrixXd jac(sys.n_residuals, n);
  for (int iter = 0; iter < max_iters && out.cost > cost_tol && budget > 0; ++iter) {
    parallel_for_indexed(n, threads, [&](int k) {
      Eigen::VectorXd xk = out.x;
      xk(k) += h;
      jac.col(k) = (residual_vector(sys, tmpl, xk) - r) / h;
    });
    budget -= n;
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    bool accepted = false;
    double step_norm = 0.0;
    for (int t = 0; t < 8 && budget > 0; ++t) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd dx = damped.ldlt().solve(-grad);
      const Eigen::VectorXd x2 = out.x + dx;
      const Eigen::VectorXd r2 = residual_vector(sys, tmpl, x2);
      --budget;
      const double c2 = 0.5 * r2.squaredNorm();
      if (c2 < out.cost) {
        out.x = x2;
        r = r2;
        out.cost = c2;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        step_norm = dx.norm();
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted || step_norm < 1e-13) break;
  }
  out.solved = out.cost < cost_tol;
  return out;
}

void delete_and_merge(const std::vector<std::pair<int, int>>& tmpl, const Eigen::VectorXd& x,
                      int drop, std::vector<std::pair<int, int>>& tmpl_out,
                      std::vector<double>& taus_out) {
  tmpl_out.clear();
  taus_out.clear();
  for (int k = 0; k < static_cast<int>(tmpl.size()); ++k) {
    if (k == drop) continue;
    if (!tmpl_out.empty() && tmpl_out.back() == tmpl[k]) {
      taus_out.back() += x(k);  // adjacent pulses on one edge fuse into one
    } else {
      tmpl_out.push_back(tmpl[k]);
      taus_out.push_back(x(k));
    }
  }
}

double pulse_triviality(double tau) {
  const double f = tau - std::floor(tau);
  return std::min(f, 1.0 - f);  // distance to a whole period (identity pulse)
}

bool all_pulses_act(const Eigen::VectorXd& taus) {
  for (int k = 0; k < taus.size(); ++k)
    if (pulse_triviality(taus(k)) < kMinPulseWeight) return false;
  return true;
}

struct ContractOutcome {
  std::vector<std::pair<int, int>> tmpl;
  Eigen::VectorXd x;
  double cost = std::numeric_limits<double>::infinity();
};

// Shrink a solved template one pulse at a time, re-solving after each
// deletion and keeping only deletions that re-solve exactly. Near-identity
// pulses are tried first; close to the target length the re-solve gets
// perturbed and fresh restarts before a deletion is abandoned. The last
// deletion (reaching the target length) must leave every remaining pulse
// acting — a solution with a whole-period duration is really shorter than
// its pulse count and another deletion branch is preferred.
ContractOutcome contract_template(const ResidualSystem& sys,
                                  std::vector<std::pair<int, int>> tmpl, Eigen::VectorXd x,
                                  int target_len, SplitMix& rng, int threads, long& budget) {
  std::vector<int> order;
  std::vector<std::pair<int, int>> t2;
  std::vector<double> taus2;
  double cost = 0.0;
  while (static_cast<int>(tmpl.size()) > target_len && budget > 0) {
    order.resize(tmpl.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pulse_triviality(x(a)) < pulse_triviality(x(b));
    });
    bool progressed = false;
    for (int idx : order) {
      if (budget <= 0) break;
      delete_and_merge(tmpl, x, idx, t2, taus2);
      if (static_cast<int>(t2.size()) < target_len) continue;  // a fuse would overshoot
      Eigen::VectorXd base = Eigen::Map<Eigen::VectorXd>(taus2.data(), static_cast<int>(taus2.size()));
      const bool is_final = static_cast<int>(t2.size()) == target_len;
      const bool endgame = static_cast<int>(tmpl.size()) - target_len <= 2;
      const int tries = endgame ? 6 : 2;
      for (int q = 0; q < tries && budget > 0; ++q) {
        Eigen::VectorXd x0 = base;
        if (q >= 3) {  // fresh start: probe the shortened template from scratch
          for (int k = 0; k < x0.size(); ++k) x0(k) = rng.uniform();
        } else if (q > 0) {
          for (int k = 0; k < x0.size(); ++k) x0(k) += 0.04 * q * rng.normal();
        }
        const LmResult res = lm_minimize(sys, t2, x0, q == 0 ? 60 : 90, kRefineCostTol,
                                         threads, budget);
        if (res.solved && (!is_final || all_pulses_act(res.x))) {
          tmpl = t2;
          x = res.x;
          cost = res.cost;
          progressed = true;
          break;
        }
      }
      if (progressed) break;
    }
    if (!progressed) break;
  }
  ContractOutcome out;
  out.tmpl = std::move(tmpl);
  out.x = std::move(x);
  out.cost = cost;
  return out;
}

struct RefineResult {
  bool found = false;
  std::vector<std::pair<int, int>> tmpl;
  Eigen::VectorXd x;
};

// Gauss-Newton stage run after the GA/NM stage of one restart. Tries the
// restart's own template first (seeded by the GA winner), then — when the
// template is free — scratch templates at kScratchLength contracted back to
// the requested length.
RefineResult residual_refine(const ResidualSystem& sys, const ConnectivityGraph& graph,
                             const std::vector<std::pair<int, int>>& tmpl0,
                             const Eigen::VectorXd& x_seed, bool allow_extension,
                             int target_len, std::uint64_t seed, int threads, long& spent) {
  RefineResult out;
  long budget = kRefineEvalBudget;
  SplitMix rng(seed);
  for (int s = 0; s < kOwnLengthStarts && budget > 0; ++s) {
    Eigen::VectorXd x0 = x_seed;
    if (s > 0)
      for (int k = 0; k < x0.size(); ++k) x0(k) = rng.uniform();
    const LmResult res = lm_minimize(sys, tmpl0, x0, 150, kRefineCostTol, threads, budget);
    if (res.solved) {
      out.found = true;
      out.tmpl = tmpl0;
      out.x = res.x;
      break;
    }
  }
  if (!out.found && allow_extension) {
    const int scratch_len = std::max(target_len, kScratchLength);
    for (int attempt = 0; attempt < kScratchAttempts && budget > 0; ++attempt) {
      const std::vector<std::pair<int, int>> tmpl = random_template(graph, scratch_len, rng);
      Eigen::VectorXd x0(scratch_len);
      for (int k = 0; k < scratch_len; ++k) x0(k) = rng.uniform();
      const LmResult res = lm_minimize(sys, tmpl, x0, 150, kRefineCostTol, threads, budget);
      if (!res.solved) continue;
      ContractOutcome comp =
          contract_template(sys, tmpl, res.x, target_len, rng, threads, budget);
      if (static_cast<int>(comp.tmpl.size()) != target_len) continue;
      const LmResult fin = lm_minimize(sys, comp.tmpl, comp.x, 120, 1e-28, threads, budget);
      out.found = true;
      out.tmpl = std::move(comp.tmpl);
      out.x = (fin.cost <= comp.cost && all_pulses_act(fin.x)) ? fin.x : comp.x;
      break;
    }
  }
  spent += kRefineEvalBudget - budget;
  return out;
}

// Shared driver behind the hybrid_search entry points. `enc`/`obj` are null
// on the custom-objective route; `target_length` > 0 marks the
// random-template mode where scratch-template contraction is allowed.
struct SearchDriver {
  const LogicalEncoding* enc = nullptr;
  const Objective* obj = nullptr;
  const SequenceObjectiveFn* custom = nullptr;
  bool allow_extension = false;
  int target_length = 0;
};

SearchOutcome run_attempts(
    const SearchDriver& drv, const ConnectivityGraph& graph, const SearchConfig& cfg,
    const std::function<std::vector<std::pair<int, int>>(int)>& template_for_restart) {
  cfg.validate();
  graph.validate();

  const auto seq_value = [&](const std::vector<std::pair<int, int>>& tm,
                             const Eigen::VectorXd& taus) {
    const GateSequence seq = sequence_from_taus(graph, tm, taus);
    return drv.obj ? evaluate_objective(*drv.obj, seq, graph, *drv.enc) : (*drv.custom)(seq);
  };

  // The Gauss-Newton stage applies only when both the leakage and the gate
  // term of a built-in objective are active; single-term problems are plain
  // descent problems and stay with GA + NM.
  ResidualSystem rsys;
  if (drv.obj && drv.obj->w_leak > 0.0 &&
      (drv.obj->target == GateTarget::ExactCNOT || drv.obj->w_inv > 0.0))
    rsys = make_residual_system(*drv.enc, drv.obj->target);

  SearchOutcome out;
  out.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::vector<std::pair<int, int>> tmpl = template_for_restart(r);
    if (tmpl.empty()) throw ValidationError("hybrid_search: pulse template must not be empty");
    for (auto [i, j] : tmpl)
      if (!graph.has_edge(i, j))
        throw ValidationError("hybrid_search: template edge (" + std::to_string(i) + "," +
                              std::to_string(j) + ") absent from graph '" + graph.name + "'");

    const ObjectiveFn f_tmpl = [&](const Eigen::VectorXd& taus) { return seq_value(tmpl, taus); };
    const int n = static_cast<int>(tmpl.size());
    Box box{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), true};

    const std::uint64_t master = derive_seed(cfg.seed, 0x5EA2C4ull, static_cast<std::uint64_t>(r));
    long polish_evals = 0;
    Eigen::VectorXd polish_x = Eigen::VectorXd::Zero(n);
    double polish_f = std::numeric_limits<double>::infinity();
    GaState st = run_ga(f_tmpl, box, cfg, master, &f_tmpl, &polish_evals, &polish_x, &polish_f);
    out.evaluations += st.evaluations + polish_evals;
    out.restarts_used = r + 1;

    Eigen::VectorXd x = st.pop[st.best].x;
    double fx = st.pop[st.best].f;
    if (polish_f < fx) {
      x = polish_x;
      fx = polish_f;
    }

    std::vector<std::pair<int, int>> best_tmpl = tmpl;
    Eigen::VectorXd best_x = x;
    double best_f = fx;

    if (rsys.valid && best_f >= cfg.success_threshold) {
      long spent = 0;
      const int target_len = drv.target_length > 0 ? drv.target_length : n;
      const RefineResult rr = residual_refine(
          rsys, graph, tmpl, x, drv.allow_extension, target_len,
          derive_seed(cfg.seed, 0x6A4E57ull, static_cast<std::uint64_t>(r)), cfg.threads, spent);
      out.evaluations += spent;
      if (rr.found) {
        const double f_ref = seq_value(rr.tmpl, rr.x);
        ++out.evaluations;
        if (f_ref < best_f) {
          best_tmpl = rr.tmpl;
          best_x = rr.x;
          best_f = f_ref;
        }
      }
    }

    if (best_f >= cfg.success_threshold) {
      const ObjectiveFn f_best = [&](const Eigen::VectorXd& taus) {
        return seq_value(best_tmpl, taus);
      };
      const NelderMeadResult final_polish = nelder_mead(f_best, best_x, cfg, 0.02);
      out.evaluations += final_polish.evaluations;
      if (final_polish.f < best_f) {
        best_f = final_polish.f;
        best_x = final_polish.x;
      }
    }

    if (best_f < out.objective) {
      out.objective = best_f;
      out.sequence = sequence_from_taus(graph, best_tmpl, best_x);
      out.sequence.seed = cfg.seed;
      out.sequence.objective_value = best_f;
      out.sequence.time_steps = greedy_time_steps(out.sequence);
    }
    if (out.objective < cfg.success_threshold) {
      out.success = true;
      break;
    }
  }
  return out;
}

}  // namespace

SearchOutcome hybrid_search(const Objective& obj, const ConnectivityGraph& graph,
                            const LogicalEncoding& enc,
                            const std::vector<std::pair<int, int>>& pulse_template,
                            const SearchConfig& cfg) {
  SearchDriver drv;
  drv.enc = &enc;
  drv.obj = &obj;
  return run_attempts(drv, graph, cfg, [&](int) { return pulse_template; });
}

SearchOutcome hybrid_search_custom(const SequenceObjectiveFn& objective,
                                   const ConnectivityGraph& graph,
                                   const std::vector<std::pair<int, int>>& pulse_template,
                                   const SearchConfig& cfg) {
  if (!objective) throw ValidationError("hybrid_search: objective must be callable");
  SearchDriver drv;
  drv.custom = &objective;
  return run_attempts(drv, graph, cfg, [&](int) { return pulse_template; });
}

SearchOutcome hybrid_search_random_templates(const Objective& obj,
                                             const ConnectivityGraph& graph,
                                             const LogicalEncoding& enc, int length,
                                             const SearchConfig& cfg) {
  if (length < 1) throw ValidationError("hybrid_search: length must be positive");
  SearchDriver drv;
  drv.enc = &enc;
  drv.obj = &obj;
  drv.allow_extension = true;
  drv.target_length = length;
  return run_attempts(drv, graph, cfg, [&](int r) {
    SplitMix rng(derive_seed(cfg.seed, 0x7E3Full, static_cast<std::uint64_t>(r)));
    return random_template(graph, length, rng);
  });
}

std::optional<GateSequence> rationalize_sequence(const GateSequence& seq,
                                                 const ConnectivityGraph& g,
                                                 const LogicalEncoding& enc, const Objective& obj,
                                                 double success_threshold, int max_denominator) {
  if (max_denominator < 1) throw ValidationError("rationalize: max_denominator must be positive");
  GateSequence snapped = seq;
  for (Pulse& p : snapped.pulses) {
    const double tau = wrap_unit(p.tau);
    double best = 0.0, best_err = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= max_denominator; ++q) {
      const double num = std::round(tau * q);
      const double cand = num / q;
      const double err = std::abs(tau - cand);
      if (err < best_err - 1e-15) {  // prefer the smallest denominator on ties
        best_err = err;
        best = cand;
      }
    }
    p.tau = wrap_unit(best);
  }
  const double f = evaluate_objective(obj, snapped, g, enc);
  if (f >= success_threshold) return std::nullopt;
  snapped.objective_value = f;
  snapped.time_steps = greedy_time_steps(snapped);
  return snapped;
}

}  // namespace hybq
