#include "htg/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "htg/errors.hpp"
#include "htg/format.hpp"

namespace htg {

SystemConfig SystemConfig::make(long n, std::vector<UncertaintyClass> classes,
                                std::vector<double> h, double horizon,
                                std::uint64_t seed) {
  if (n < 1) throw ConfigError("SystemConfig: n must be >= 1");
  if (!(horizon > 0.0)) throw ConfigError("SystemConfig: horizon must be > 0");
  if (classes.empty()) throw ConfigError("SystemConfig: classes must be nonempty");
  if (h.size() != classes.size())
    throw ConfigError("SystemConfig: h must have one entry per class");
  for (double hv : h)
    if (!(hv > 0.0)) throw ConfigError("SystemConfig: holding costs must be > 0");

  double load = 0.0;
  for (const auto& cls : classes) load += 1.0 / cls.mu();
  if (std::abs(load - 1.0) > 1e-12)
    throw ConfigError("SystemConfig: heavy-traffic condition sum 1/mu = 1 violated");

  // Sort types by the priority index h*mu (ascending; type 1 = lowest).
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return h[a] * classes[a].mu() < h[b] * classes[b].mu();
  });

  SystemConfig cfg;
  cfg.n = n;
  cfg.horizon = horizon;
  cfg.seed = seed;
  for (std::size_t idx : order) {
    cfg.classes.push_back(std::move(classes[idx]));
    cfg.h.push_back(h[idx]);
  }
  const double scale = cfg.h[0] * cfg.classes[0].mu();
  for (double& hv : cfg.h) hv /= scale;
  return cfg;
}

AdversaryPolicy AdversaryPolicy::feedback(FeedbackPolicy policy) {
  AdversaryPolicy a;
  a.kind_ = Kind::feedback;
  a.feedback_ = std::move(policy);
  return a;
}

AdversaryPolicy AdversaryPolicy::static_points(std::vector<DriftVarPoint> points) {
  AdversaryPolicy a;
  a.kind_ = Kind::static_points;
  a.points_ = std::move(points);
  return a;
}

AdversaryPolicy AdversaryPolicy::iid_random(std::vector<std::vector<double>> weights) {
  AdversaryPolicy a;
  a.kind_ = Kind::iid_random;
  a.weights_ = std::move(weights);
  return a;
}

AdversaryPolicy AdversaryPolicy::static_laws(std::vector<JobDistribution> laws) {
  AdversaryPolicy a;
  a.kind_ = Kind::static_laws;
  a.laws_ = std::move(laws);
  return a;
}

AdversaryPolicy feedback_adversary(const HJBSolution& sol,
                                   std::vector<UncertaintyClass> classes) {
  return AdversaryPolicy::feedback(
      FeedbackPolicy(std::make_shared<HJBSolution>(sol), std::move(classes)));
}

namespace {

struct TypeState {
  std::vector<double> jobs;  // all arrivals, in arrival order
  std::size_t head = 0;      // next unserved job
  long queue = 0;            // arrived minus departed
  double workload = 0.0;     // remaining unserved work incl. residual
};

// Next job under the scheduler, or no type if all buffers are empty.
std::optional<std::size_t> select_type(const std::vector<TypeState>& types,
                                       Scheduler scheduler) {
  if (scheduler == Scheduler::cmu) {
    for (std::size_t l = types.size(); l-- > 0;)
      if (types[l].head < types[l].jobs.size()) return l;
    return std::nullopt;
  }
  // fifo_global: earliest arrival epoch = smallest head index; ties go to the
  // lowest type index since simultaneous arrivals enqueue in type order.
  std::optional<std::size_t> best;
  for (std::size_t l = 0; l < types.size(); ++l) {
    if (types[l].head >= types[l].jobs.size()) continue;
    if (!best || types[l].head < types[*best].head) best = l;
  }
  return best;
}

void validate_adversary(const SystemConfig& config, const AdversaryPolicy& adv) {
  const std::size_t L = config.classes.size();
  switch (adv.kind()) {
    case AdversaryPolicy::Kind::feedback: {
      const auto& pol = adv.feedback_policy();
      if (pol.num_classes() != L)
        throw std::invalid_argument("simulate: feedback policy class count mismatch");
      for (std::size_t l = 0; l < L; ++l)
        if (pol.classes()[l].points() != config.classes[l].points())
          throw std::invalid_argument(
              "simulate: feedback policy solved for different classes");
      break;
    }
    case AdversaryPolicy::Kind::static_points: {
      if (adv.points().size() != L)
        throw std::invalid_argument("simulate: static adversary needs one point per class");
      for (std::size_t l = 0; l < L; ++l)
        if (!config.classes[l].contains(adv.points()[l]))
          throw std::invalid_argument("simulate: static point outside its class");
      break;
    }
    case AdversaryPolicy::Kind::iid_random: {
      if (adv.weights().size() != L)
        throw std::invalid_argument("simulate: iid adversary needs weights per class");
      for (std::size_t l = 0; l < L; ++l) {
        const auto& w = adv.weights()[l];
        if (w.size() != config.classes[l].points().size())
          throw std::invalid_argument("simulate: weight count != class point count");
        double sum = 0.0;
        for (double x : w) {
          if (x < 0.0) throw std::invalid_argument("simulate: negative weight");
          sum += x;
        }
        if (!(sum > 0.0)) throw std::invalid_argument("simulate: zero total weight");
      }
      break;
    }
    case AdversaryPolicy::Kind::static_laws:
      if (adv.laws().size() != L)
        throw std::invalid_argument("simulate: need one law per class");
      break;
  }
}

}  // namespace

PathStats simulate(const SystemConfig& config, const AdversaryPolicy& adversary,
                   Scheduler scheduler, Rng& rng, RecordMode mode) {
  validate_adversary(config, adversary);

  const long n = config.n;
  const std::size_t L = config.classes.size();
  const double root_n = std::sqrt(static_cast<double>(n));
  const long K = static_cast<long>(std::floor(
      static_cast<double>(n) * config.horizon + 1e-9));

  PathStats stats;
  stats.n = n;
  stats.horizon = config.horizon;
  stats.rsp_gap.assign(L, 0.0);

  const bool full = mode == RecordMode::full;
  if (full) {
    stats.t.reserve(K + 1);
    stats.w_hat_tot.reserve(K + 1);
    stats.w_hat_tot_pre.reserve(K + 1);
    stats.r_hat.reserve(K + 1);
    stats.j_tot.reserve(K + 1);
    stats.w_hat.assign(L, {});
    stats.q_hat.assign(L, {});
    stats.t.push_back(0.0);
    stats.w_hat_tot.push_back(0.0);
    stats.w_hat_tot_pre.push_back(0.0);
    stats.r_hat.push_back(0.0);
    stats.j_tot.push_back(0.0);
    for (std::size_t l = 0; l < L; ++l) {
      stats.w_hat[l].push_back(0.0);
      stats.q_hat[l].push_back(0.0);
    }
  }

  std::vector<TypeState> types(L);
  for (auto& ts : types) ts.jobs.reserve(K);

  // Static adversaries fix the laws once.
  std::vector<JobDistribution> static_laws;
  if (adversary.kind() == AdversaryPolicy::Kind::static_points) {
    for (std::size_t l = 0; l < L; ++l)
      static_laws.push_back(config.classes[l].member(adversary.points()[l], n));
  } else if (adversary.kind() == AdversaryPolicy::Kind::static_laws) {
    static_laws = adversary.laws();
  }
  std::vector<std::vector<double>> cum_weights;
  if (adversary.kind() == AdversaryPolicy::Kind::iid_random) {
    for (const auto& w : adversary.weights()) {
      std::vector<double> cum(w.size());
      std::partial_sum(w.begin(), w.end(), cum.begin());
      cum_weights.push_back(std::move(cum));
    }
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // In-service job (non-preemptive): type and remaining work.
  std::optional<std::size_t> serving;
  double residual = 0.0;

  // Total-workload recursion at epochs, kept separate from the event-driven
  // bookkeeping so the recorded W_hat_tot and R_hat are identical across
  // schedulers: post_k = pre_{k-1} + J_k, pre_k = (post_k - 1)^+.
  double post_prev = 0.0;  // unscaled, after the previous arrival
  double idleness = 0.0;   // unscaled cumulative

  // Discounted cost, integrated exactly on the piecewise-constant h.Q path.
  double cost = 0.0;
  double hq = 0.0;  // current h . Q (unscaled queue counts)
  double seg_start = 0.0;
  auto close_segment = [&](double t_now) {
    if (hq != 0.0 && t_now > seg_start)
      cost += (hq / root_n) * (std::exp(-seg_start) - std::exp(-t_now));
    seg_start = t_now;
  };

  // Serves up to `budget` units of work starting at scaled time t_base.
  // With budget 0 this only drains zero-size jobs, which depart the moment
  // they are admitted into service.
  auto serve = [&](double budget, double t_base) {
    double consumed = 0.0;
    while (true) {
      if (!serving) {
        serving = select_type(types, scheduler);
        if (!serving) return;  // idle for the rest of the interval
        auto& ts = types[*serving];
        residual = ts.jobs[ts.head++];
      }
      if (residual > 0.0 && budget <= 0.0) return;
      auto& ts = types[*serving];
      const double amount = std::min(residual, budget);
      residual -= amount;
      budget -= amount;
      consumed += amount;
      ts.workload -= amount;
      if (residual <= 0.0) {  // departure (instant for zero-size jobs)
        const double t_dep = t_base + consumed / static_cast<double>(n);
        close_segment(t_dep);
        ts.queue -= 1;
        hq -= config.h[*serving];
        serving.reset();
      }
    }
  };

  const double x_max =
      adversary.kind() == AdversaryPolicy::Kind::feedback
          ? adversary.feedback_policy().x_max()
          : 0.0;

  for (long k = 1; k <= K; ++k) {
    const double t_k = static_cast<double>(k) / static_cast<double>(n);
    serve(1.0, static_cast<double>(k - 1) / static_cast<double>(n));

    idleness += std::max(1.0 - post_prev, 0.0);
    const double pre = std::max(post_prev - 1.0, 0.0);

    // The adversary observes the scaled workload at the previous epoch and
    // selects the laws before the k-th sizes exist.
    const double w_obs = post_prev / root_n;
    double j_total = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      double size = 0.0;
      switch (adversary.kind()) {
        case AdversaryPolicy::Kind::feedback: {
          double w = w_obs;
          if (w > x_max) {
            if (l == 0) stats.clamp_count += 1;
            w = x_max;
          }
          size = adversary.feedback_policy().member(l, w, n).sample(rng);
          break;
        }
        case AdversaryPolicy::Kind::iid_random: {
          const auto& cum = cum_weights[l];
          const double u = unif(rng) * cum.back();
          const std::size_t idx = static_cast<std::size_t>(
              std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
          const auto& pt = config.classes[l].points()[std::min(idx, cum.size() - 1)];
          size = config.classes[l].member(pt, n).sample(rng);
          break;
        }
        default:
          size = static_laws[l].sample(rng);
      }
      auto& ts = types[l];
      ts.jobs.push_back(size);
      ts.workload += size;
      j_total += size;
    }

    close_segment(t_k);
    for (std::size_t l = 0; l < L; ++l) {
      types[l].queue += 1;
      hq += config.h[l];
    }
    // A free server admits work immediately; zero-size jobs depart at once.
    serve(0.0, t_k);

    const double post = pre + j_total;
    post_prev = post;

    // Per-epoch records and running sups.
    double hp = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      const double w_hat_l = types[l].workload / root_n;
      const double q_hat_l = static_cast<double>(types[l].queue) / root_n;
      stats.rsp_gap[l] = std::max(
          stats.rsp_gap[l], std::abs(q_hat_l - config.classes[l].mu() * w_hat_l));
      if (l >= 1) hp += w_hat_l;
      if (full) {
        stats.w_hat[l].push_back(w_hat_l);
        stats.q_hat[l].push_back(q_hat_l);
      }
    }
    stats.high_priority_sup = std::max(stats.high_priority_sup, hp);
    if (full) {
      stats.t.push_back(t_k);
      stats.w_hat_tot.push_back(post / root_n);
      // end-of-interval value: max(post - 1, 0) is the workload just before
      // arrival k+1, the sequence obeying the one-step reflected recursion
      stats.w_hat_tot_pre.push_back(std::max(post - 1.0, 0.0) / root_n);
      stats.r_hat.push_back(idleness / root_n);
      stats.j_tot.push_back(j_total);
    }
  }

  // Tail [K/n, T] when nT is not an integer.
  const double t_last = static_cast<double>(K) / static_cast<double>(n);
  if (config.horizon > t_last) {
    serve((config.horizon - t_last) * static_cast<double>(n), t_last);
    close_segment(config.horizon);
  } else {
    close_segment(config.horizon);
  }

  stats.discounted_cost = cost;
  return stats;
}

std::vector<double> rsp_gap(const PathStats& stats) { return stats.rsp_gap; }

double high_priority_workload(const PathStats& stats) {
  return stats.high_priority_sup;
}

SimBatch estimate_batch(const SystemConfig& config, const AdversaryPolicy& adversary,
                        Scheduler scheduler, std::size_t replications, int jobs) {
  if (replications < 2)
    throw std::invalid_argument("estimate_batch: need at least 2 replications");

  struct Rep {
    double cost = 0.0;
    double rsp = 0.0;
    double hp = 0.0;
    long clamps = 0;
  };
  auto reps = run_replications(
      replications, config.seed,
      [&](std::size_t, Rng& rng) {
        PathStats s = simulate(config, adversary, scheduler, rng, RecordMode::summary);
        Rep r;
        r.cost = s.discounted_cost;
        r.rsp = *std::max_element(s.rsp_gap.begin(), s.rsp_gap.end());
        r.hp = s.high_priority_sup;
        r.clamps = s.clamp_count;
        return r;
      },
      jobs);

  SimBatch batch;
  std::vector<double> rsp, hp;
  batch.costs.reserve(replications);
  for (const auto& r : reps) {
    batch.costs.push_back(r.cost);
    rsp.push_back(r.rsp);
    hp.push_back(r.hp);
    batch.clamp_count += r.clamps;
  }
  batch.cost = summarize(batch.costs);
  batch.rsp_gap_median = median(std::move(rsp));
  batch.high_priority_sup_median = median(std::move(hp));
  return batch;
}

EstimateSummary estimate_cost(const SystemConfig& config,
                              const AdversaryPolicy& adversary, Scheduler scheduler,
                              std::size_t replications, int jobs) {
  return estimate_batch(config, adversary, scheduler, replications, jobs).cost;
}

void write_path_csv(const PathStats& stats, std::ostream& os) {
  os << "t,W_hat_tot,R_hat";
  for (std::size_t l = 0; l < stats.w_hat.size(); ++l)
    os << ",W_hat_" << (l + 1) << ",Q_hat_" << (l + 1);
  os << "\n";
  for (std::size_t k = 0; k < stats.t.size(); ++k) {
    os << fmt_full(stats.t[k]) << ',' << fmt_full(stats.w_hat_tot[k]) << ','
       << fmt_full(stats.r_hat[k]);
    for (std::size_t l = 0; l < stats.w_hat.size(); ++l)
      os << ',' << fmt_full(stats.w_hat[l][k]) << ',' << fmt_full(stats.q_hat[l][k]);
    os << "\n";
  }
}

}  // namespace htg
