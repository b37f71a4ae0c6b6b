#include "sspkit/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "sspkit/errors.hpp"

namespace sspkit {

std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::NonMonotone: return "non_monotone";
    case Monotonicity::Weak: return "weak";
    case Monotonicity::Strict: return "strict";
  }
  return "unknown";
}

namespace {

struct SliceRef {
  std::size_t agent;
  std::size_t base;
};

std::vector<SliceRef> all_slices(const MechanismTable& mech) {
  std::vector<SliceRef> out;
  out.reserve(mech.agents() * mech.slice_count());
  for (std::size_t i = 0; i < mech.agents(); ++i) {
    for (std::size_t base : mech.slice_bases(i)) out.push_back({i, base});
  }
  return out;
}

Deviation make_deviation(const MechanismTable& mech, std::size_t agent, std::size_t base,
                         std::size_t t, std::size_t r, double loss) {
  Deviation d;
  d.agent = agent;
  d.base = base;
  d.opponents = mech.opponent_types(agent, base);
  d.true_index = t;
  d.report_index = r;
  d.true_type = mech.grid()[t];
  d.report = mech.grid()[r];
  d.loss = loss;
  return d;
}

// Runs fn(begin, end, chunk) over contiguous chunks of [0, count). Chunk
// results are merged by the caller in chunk order, so the outcome does not
// depend on the thread count.
template <class Fn>
void for_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  const std::size_t per = (count + workers - 1) / std::max<std::size_t>(workers, 1);
  if (workers == 1) {
    fn(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * per);
    const std::size_t end = std::min(count, begin + per);
    pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  for (auto& th : pool) th.join();
}

struct ScanResult {
  double min_loss = std::numeric_limits<double>::infinity();
  Deviation argmin;
  bool has_argmin = false;
  std::vector<Deviation> weak_witnesses;
  std::vector<Deviation> strict_witnesses;
  std::size_t checked = 0;
};

ScanResult scan_deviations(const PayoffModel& model, const MechanismTable& mech,
                           const VerifyOptions& opts) {
  const auto slices = all_slices(mech);
  const std::size_t m = mech.grid().size();
  const unsigned threads = std::max(1u, opts.threads);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, slices.size()));
  std::vector<ScanResult> partial(workers);

  for_chunks(slices.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t w) {
    ScanResult& out = partial[w];
    std::vector<double> x(m), p(m), truth(m);
    for (std::size_t s = begin; s < end; ++s) {
      const auto [agent, base] = slices[s];
      const std::size_t stride = mech.stride(agent);
      for (std::size_t k = 0; k < m; ++k) {
        x[k] = mech.allocation(base + k * stride, agent);
        p[k] = mech.payment(base + k * stride, agent);
      }
      for (std::size_t t = 0; t < m; ++t) truth[t] = model.g(x[t], mech.grid()[t]) - p[t];
      for (std::size_t t = 0; t < m; ++t) {
        const double type = mech.grid()[t];
        for (std::size_t r = 0; r < m; ++r) {
          if (r == t) continue;
          const double loss = truth[t] - (model.g(x[r], type) - p[r]);
          ++out.checked;
          if (loss < out.min_loss) {
            out.min_loss = loss;
            out.argmin = make_deviation(mech, agent, base, t, r, loss);
            out.has_argmin = true;
          }
          if (loss < -opts.tol && out.weak_witnesses.size() < opts.max_witnesses) {
            out.weak_witnesses.push_back(make_deviation(mech, agent, base, t, r, loss));
          }
          if (!(loss > opts.tol) && out.strict_witnesses.size() < opts.max_witnesses) {
            out.strict_witnesses.push_back(make_deviation(mech, agent, base, t, r, loss));
          }
        }
      }
    }
  });

  ScanResult merged;
  for (auto& part : partial) {
    merged.checked += part.checked;
    if (part.has_argmin && part.min_loss < merged.min_loss) {
      merged.min_loss = part.min_loss;
      merged.argmin = std::move(part.argmin);
      merged.has_argmin = true;
    }
    for (auto& d : part.weak_witnesses) {
      if (merged.weak_witnesses.size() < opts.max_witnesses) merged.weak_witnesses.push_back(std::move(d));
    }
    for (auto& d : part.strict_witnesses) {
      if (merged.strict_witnesses.size() < opts.max_witnesses) merged.strict_witnesses.push_back(std::move(d));
    }
  }
  // A one-point grid has no deviations; m >= 2 by TypeGrid's invariant.
  if (!merged.has_argmin) merged.min_loss = 0.0;
  return merged;
}

VerificationResult base_result(const PayoffModel& model, const MechanismTable& mech,
                               const VerifyOptions& opts, const ScanResult& scan) {
  VerificationResult res;
  res.tol = opts.tol;
  res.min_loss = scan.min_loss;
  res.strict_margin = scan.min_loss;
  res.weak_sp = scan.min_loss >= -opts.tol;
  res.strict_sp = scan.min_loss > opts.tol;
  res.argmin = scan.argmin;
  res.deviations_checked = scan.checked;
  res.monotonicity =
      check_monotonicity(mech, MonotonicityMode::Strict, opts.strict_increment).worst;
  res.envelope_residual = envelope_residual(model, mech, opts.interp);
  return res;
}

}  // namespace

DeviationReport deviation_report(const PayoffModel& model, const MechanismTable& mech) {
  DeviationReport report;
  const std::size_t m = mech.grid().size();
  report.min_loss = std::numeric_limits<double>::infinity();
  for (const auto& [agent, base] : all_slices(mech)) {
    for (std::size_t t = 0; t < m; ++t) {
      const double truth = utility_at(model, mech, agent, base, t, t);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == t) continue;
        const double loss = truth - utility_at(model, mech, agent, base, t, r);
        report.entries.push_back(make_deviation(mech, agent, base, t, r, loss));
        if (loss < report.min_loss) {
          report.min_loss = loss;
          report.argmin = report.entries.back();
        }
      }
    }
  }
  return report;
}

MonotonicityReport check_monotonicity(const MechanismTable& mech, MonotonicityMode mode,
                                      double margin) {
  if (!(margin >= 0.0)) throw DomainError("monotonicity margin must be nonnegative");
  MonotonicityReport report;
  report.mode = mode;
  report.margin = margin;
  const double weak_slack = mode == MonotonicityMode::Weak ? margin : 0.0;
  const double strict_floor = mode == MonotonicityMode::Strict ? margin : kDefaultStrictIncrement;
  const std::size_t m = mech.grid().size();
  report.first_failure = std::numeric_limits<std::size_t>::max();
  for (const auto& [agent, base] : all_slices(mech)) {
    SliceMonotonicity s;
    s.agent = agent;
    s.base = base;
    s.min_increment = std::numeric_limits<double>::infinity();
    const std::size_t stride = mech.stride(agent);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double inc = mech.allocation(base + (k + 1) * stride, agent) -
                         mech.allocation(base + k * stride, agent);
      if (inc < s.min_increment) {
        s.min_increment = inc;
        s.lo = k;
        s.hi = k + 1;
      }
    }
    if (s.min_increment < -weak_slack) {
      s.cls = Monotonicity::NonMonotone;
    } else if (s.min_increment > strict_floor) {
      s.cls = Monotonicity::Strict;
    } else {
      s.cls = Monotonicity::Weak;
    }
    const bool ok = mode == MonotonicityMode::Weak ? s.cls != Monotonicity::NonMonotone
                                                   : s.cls == Monotonicity::Strict;
    if (!ok && report.pass) {
      report.pass = false;
      report.first_failure = report.slices.size();
    }
    report.worst = std::min(report.worst, s.cls);
    report.slices.push_back(s);
  }
  if (report.pass) report.first_failure = report.slices.size();
  return report;
}

MonotonicityReport check_monotonicity(const MechanismTable& mech, MonotonicityMode mode) {
  return check_monotonicity(mech, mode,
                            mode == MonotonicityMode::Weak ? 0.0 : kDefaultStrictIncrement);
}

VerificationResult check_weak_sp(const PayoffModel& model, const MechanismTable& mech,
                                 const VerifyOptions& opts) {
  if (!(opts.tol >= 0.0)) throw DomainError("tolerance must be nonnegative");
  auto scan = scan_deviations(model, mech, opts);
  auto res = base_result(model, mech, opts, scan);
  res.witnesses = std::move(scan.weak_witnesses);
  return res;
}

VerificationResult check_strict_sp(const PayoffModel& model, const MechanismTable& mech,
                                   const VerifyOptions& opts) {
  if (!(opts.tol >= 0.0)) throw DomainError("tolerance must be nonnegative");
  auto scan = scan_deviations(model, mech, opts);
  auto res = base_result(model, mech, opts, scan);
  res.witnesses = std::move(scan.strict_witnesses);
  return res;
}

CharacterizationReport characterize(const PayoffModel& model, const MechanismTable& mech,
                                    const VerifyOptions& opts) {
  CharacterizationReport rep;
  rep.weak_monotonicity = check_monotonicity(mech, MonotonicityMode::Weak, 0.0);
  rep.strict_monotonicity = check_monotonicity(mech, MonotonicityMode::Strict, opts.strict_increment);

  auto scan = scan_deviations(model, mech, opts);
  rep.weak = base_result(model, mech, opts, scan);
  rep.strict = rep.weak;
  rep.weak.witnesses = std::move(scan.weak_witnesses);
  rep.strict.witnesses = std::move(scan.strict_witnesses);
  rep.envelope_residual = rep.weak.envelope_residual;
  const double res = rep.envelope_residual;
  const bool envelope_ok = res <= kEnvelopeGate;
  const double min_loss = rep.weak.min_loss;

  // Payments within `res` of envelope payments move every loss by at most 2 res.
  Implication strict_forward{"strict_monotone_and_envelope_imply_strict_sp",
                             rep.strict_monotonicity.pass && envelope_ok &&
                                 opts.interp == Interpolation::Linear,
                             true};
  if (strict_forward.premise && !rep.strict.strict_sp) {
    strict_forward.holds = min_loss > -(2.0 * res) - 1e-12;
    rep.resolution_limited = strict_forward.holds;
  }

  Implication weak_forward{"weak_monotone_and_envelope_imply_weak_sp",
                           rep.weak_monotonicity.pass && envelope_ok, true};
  if (weak_forward.premise) weak_forward.holds = min_loss >= -(2.0 * res + opts.tol);

  // Adding the two incentive constraints of t > r cancels payments and leaves
  // int_r^t [g2(X(t), s) - g2(X(r), s)] ds > 2 tol, forcing X(t) > X(r).
  Implication strict_converse{"strict_sp_implies_strict_monotone", rep.strict.strict_sp, true};
  if (strict_converse.premise) {
    for (const auto& s : rep.strict_monotonicity.slices) {
      if (!(s.min_increment > 0.0)) strict_converse.holds = false;
    }
  }

  Implication weak_converse{"weak_sp_implies_weak_monotone", rep.weak.weak_sp, true};
  if (weak_converse.premise && !rep.weak_monotonicity.pass) {
    const std::size_t m = mech.grid().size();
    const auto& grid = mech.grid();
    for (const auto& s : rep.weak_monotonicity.slices) {
      if (s.cls != Monotonicity::NonMonotone) continue;
      const std::size_t stride = mech.stride(s.agent);
      for (std::size_t r = 0; r < m && weak_converse.holds; ++r) {
        const double xr = mech.allocation(s.base + r * stride, s.agent);
        for (std::size_t t = r + 1; t < m; ++t) {
          const double xt = mech.allocation(s.base + t * stride, s.agent);
          if (!(xt < xr)) continue;
          const double gap = model.integrate_g2_fixed(xr, grid[r], grid[t]) -
                             model.integrate_g2_fixed(xt, grid[r], grid[t]);
          if (gap > 2.0 * opts.tol + 1e-12) {
            weak_converse.holds = false;
            break;
          }
        }
      }
    }
  }

  rep.implications = {strict_forward, weak_forward, strict_converse, weak_converse};
  rep.consistent = std::all_of(rep.implications.begin(), rep.implications.end(),
                               [](const Implication& imp) { return imp.holds; });
  return rep;
}

IRReport check_ir(const PayoffModel& model, const MechanismTable& mech,
                  const std::vector<double>& outside, const VerifyOptions& opts) {
  if (outside.size() != mech.agents()) {
    throw DomainError("outside options must list one value per agent");
  }
  const auto weak = check_weak_sp(model, mech, opts);
  if (!weak.weak_sp) {
    std::ostringstream msg;
    msg << "check_ir needs a weakly strategy-proof mechanism (min loss " << weak.min_loss << ")";
    throw PreconditionError(msg.str());
  }
  IRReport rep;
  rep.outside = outside;
  rep.reduction_min_slack = std::numeric_limits<double>::infinity();
  rep.direct_min_slack = std::numeric_limits<double>::infinity();
  const std::size_t m = mech.grid().size();
  for (const auto& [agent, base] : all_slices(mech)) {
    const double w = outside[agent];
    for (std::size_t t = 0; t < m; ++t) {
      const double u = utility_at(model, mech, agent, base, t, t);
      const double slack = u - w;
      if (t == 0) {
        rep.reduction_min_slack = std::min(rep.reduction_min_slack, slack);
        if (slack < -opts.tol) rep.reduction_pass = false;
      }
      rep.direct_min_slack = std::min(rep.direct_min_slack, slack);
      if (slack < -opts.tol) {
        rep.direct_pass = false;
        if (rep.witnesses.size() < opts.max_witnesses) {
          rep.witnesses.push_back({agent, mech.opponent_types(agent, base), mech.grid()[t], u, w});
        }
      }
    }
  }
  rep.agree = rep.reduction_pass == rep.direct_pass;
  return rep;
}

}  // namespace sspkit
