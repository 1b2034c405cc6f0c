#include "blurfitts/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace blurfitts {

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

double student_t_upper_quantile(double alpha, double df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
  return boost::math::quantile(
      boost::math::complement(boost::math::students_t_distribution<double>(df), alpha));
}

TostResult paired_tost(std::span<const double> diffs, double dz, double alpha) {
  const std::size_t n = diffs.size();
  if (n < 2) throw DomainError("paired TOST needs at least two differences");
  if (!(dz > 0.0)) throw DomainError("dz must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");

  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / nd;
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (nd - 1.0));
  if (!(sd > 0.0)) throw DegenerateVarianceError("differences have zero variance; bound undefined");

  TostResult r;
  r.mean_diff = mean;
  r.sd_diff = sd;
  r.n = n;
  r.dz = dz;
  r.alpha = alpha;
  r.bound = dz * sd;
  const double se = sd / std::sqrt(nd);
  r.t_lower = (mean + r.bound) / se;
  r.t_upper = (mean - r.bound) / se;
  const boost::math::students_t_distribution<double> dist(nd - 1.0);
  r.p_lower = boost::math::cdf(boost::math::complement(dist, r.t_lower));  // H0: mean <= -bound
  r.p_upper = boost::math::cdf(dist, r.t_upper);                           // H0: mean >= +bound
  r.p_tost = std::max(r.p_lower, r.p_upper);
  r.equivalent = r.p_lower < alpha && r.p_upper < alpha;
  return r;
}

double tost_max_statistic(std::size_t n, double dz) {
  return dz * std::sqrt(static_cast<double>(n));
}

bool tost_can_reach_equivalence(std::size_t n, double dz, double alpha) {
  if (n < 2) return false;
  return tost_max_statistic(n, dz) > student_t_upper_quantile(alpha, static_cast<double>(n - 1));
}

std::vector<double> holm_correct(std::span<const double> p) {
  const std::size_t m = p.size();
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("p-values must lie in [0, 1]");

  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });

  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double scaled = std::min(1.0, static_cast<double>(m - rank) * p[idx[rank]]);
    running = std::max(running, scaled);
    adjusted[idx[rank]] = running;
  }
  return adjusted;
}

BatteryReport equivalence_battery(const std::vector<ConditionSummary>& summaries,
                                  double baseline_B, double dz, double alpha) {
  BatteryReport report;
  report.baseline_B = baseline_B;
  report.dz = dz;
  report.alpha = alpha;

  std::set<Block> blocks;
  std::set<std::string> participants;
  std::set<std::pair<double, double>> cells;
  std::set<double> levels;
  std::map<std::pair<std::string, TaskCondition>, double> mt;
  for (const auto& s : summaries) {
    blocks.insert(s.block);
    participants.insert(s.participant);
    cells.insert({s.condition.A, s.condition.W});
    if (s.condition.B != baseline_B) levels.insert(s.condition.B);
    if (!std::isnan(s.mean_mt)) mt[{s.participant, s.condition}] = s.mean_mt;
  }
  if (blocks.size() > 1)
    throw DomainError("equivalence battery expects summaries from a single block");

  auto describe = [](const std::string& who, double A, double W, double B) {
    std::ostringstream os;
    os << "participant " << who << " lacks A=" << A << " W=" << W << " B=" << B;
    return os.str();
  };

  for (const auto& [A, W] : cells) {
    for (double B : levels) {
      BatteryTest test;
      test.A = A;
      test.W = W;
      test.B = B;
      bool cell_complete = true;
      for (const auto& who : participants) {
        const auto base = mt.find({who, {A, W, baseline_B}});
        const auto cmp = mt.find({who, {A, W, B}});
        if (base == mt.end()) {
          report.missing.push_back(describe(who, A, W, baseline_B));
          cell_complete = false;
        }
        if (cmp == mt.end()) {
          report.missing.push_back(describe(who, A, W, B));
          cell_complete = false;
        }
        if (base != mt.end() && cmp != mt.end()) {
          test.participants.push_back(who);
          test.diffs.push_back(cmp->second - base->second);
        }
      }
      if (!cell_complete) {
        test.error = "missing participant data";
      } else {
        try {
          test.result = paired_tost(test.diffs, dz, alpha);
        } catch (const DomainError& e) {
          test.error = e.what();
        }
      }
      report.tests.push_back(std::move(test));
    }
  }

  std::sort(report.missing.begin(), report.missing.end());
  report.missing.erase(std::unique(report.missing.begin(), report.missing.end()),
                       report.missing.end());
  report.complete = report.missing.empty();

  std::vector<double> raw;
  for (const auto& t : report.tests)
    if (t.result) raw.push_back(t.result->p_tost);
  const auto adjusted = holm_correct(raw);
  std::size_t k = 0;
  for (auto& t : report.tests) {
    if (!t.result) continue;
    t.p_adjusted = adjusted[k++];
    t.equivalent = *t.p_adjusted < alpha;
    if (t.equivalent) ++report.n_equivalent;
  }
  return report;
}

}  // namespace blurfitts
