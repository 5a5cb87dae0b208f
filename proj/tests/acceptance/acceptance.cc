// Copyright 2026 The FLIP Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
// here and nowhere else. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "flip/accountant/calibration.h"
#include "flip/accountant/privacy_params.h"
#include "flip/accountant/rdp.h"
#include "flip/common/rng.h"
#include "flip/dpsgd/dp_sgd.h"
#include "flip/dpsgd/local_training.h"
#include "flip/dpsgd/model.h"
#include "flip/dpsgd/sampler.h"
#include "flip/fl/fed_avg.h"
#include "flip/fl/federation.h"
#include "flip/partition/partitioner.h"
#include "flip/practitioner/engine.h"
#include "flip/service/http_service.h"
#include "flip/service/run_manager.h"
#include "flip/service/run_registry.h"
#include "httplib.h"
#include "json.hpp"
#include "oracles/noise_table.h"
#include "oracles/partition_table.h"
#include "oracles/renyi_oracle.h"

namespace flip::acceptance {
namespace {

using accountant::Adjacency;
using accountant::SubsamplingScheme;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kPartitionRuntimeSeconds = 1.0;
constexpr double kPoissonNoiseTolerance = 0.10;
constexpr double kFixedNoiseTolerance = 0.15;
constexpr double kRatioLow = 1.7;
constexpr double kRatioHigh = 2.1;
constexpr double kSweepRuntimeSeconds = 300.0;
constexpr double kOracleRelative = 1e-4;
constexpr double kGaussianAbsolute = 1e-12;
constexpr int kPropertyCases = 200;
constexpr double kComposeUlps = 2.0;
constexpr double kPoissonMeanRelative = 0.01;
constexpr double kPoissonVarianceRelative = 0.05;
constexpr double kInjectVarianceRelative = 0.02;
constexpr double kWeightSumAbsolute = 1e-12;
constexpr double kCentralizedAbsolute = 1e-9;
constexpr double kFixedPointAbsolute = 1e-12;
constexpr double kUtilityGapPoints = 5.0;
constexpr double kUtilityRuntimeSeconds = 300.0;

constexpr int64_t kBatch = 550;
constexpr int64_t kRounds = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int64_t Steps(int64_t n) { return kRounds * ((n + kBatch - 1) / kBatch); }

Outcome PartitionFidelity() {
  const auto start = Clock::now();
  int exact = 0;
  std::string first_miss;
  for (const auto& row : oracle::kPartitionTable) {
    auto sizes = partition::PartitionSizes(row.total, 4, row.policy);
    const bool ok = sizes.ok() &&
                    std::equal(sizes->begin(), sizes->end(), row.sizes.begin());
    exact += ok ? 1 : 0;
    if (!ok && first_miss.empty()) {
      first_miss = absl::StrCat(row.dataset, " ",
                                partition::PolicyName(row.policy));
    }
  }
  const double elapsed = Seconds(start);
  Outcome o;
  o.pass = exact == 12 && elapsed < kPartitionRuntimeSeconds;
  o.detail = absl::StrFormat("%d/12 rows exact in %.3fs", exact, elapsed);
  if (!first_miss.empty()) o.detail += "; first miss " + first_miss;
  return o;
}

struct CellResult {
  const char* dataset;
  std::string policy;
  int partition;
  double epsilon;
  double reference;
  double sigma;
};

// Calibrates every cell of the reference noise table with one accountant.
absl::StatusOr<std::vector<CellResult>> SweepCells(bool poisson) {
  std::vector<CellResult> out;
  for (size_t r = 0; r < oracle::kNoiseTable.size(); ++r) {
    const auto& row = oracle::kNoiseTable[r];
    const auto& sizes = oracle::kPartitionTable[r].sizes;
    for (int p = 0; p < 4; ++p) {
      const int64_t n = sizes[p];
      absl::StatusOr<SubsamplingScheme> scheme =
          poisson ? SubsamplingScheme::Poisson(
                        static_cast<double>(kBatch) / static_cast<double>(n),
                        Adjacency::kAddRemove)
                  : SubsamplingScheme::FixedSize(kBatch, n,
                                                 Adjacency::kReplaceOne);
      if (!scheme.ok()) return scheme.status();
      for (double eps : {10.0, 6.0}) {
        const auto& cell = eps == 10.0 ? row.eps10[p] : row.eps6[p];
        auto cal = accountant::CalibrateSigma({eps, row.delta}, *scheme,
                                              Steps(n));
        if (!cal.ok()) return cal.status();
        out.push_back({row.dataset, partition::PolicyName(row.policy), p + 1,
                       eps, poisson ? cell.poisson : cell.fixed_size,
                       cal->sigma});
      }
    }
  }
  return out;
}

struct CellStats {
  int within = 0;
  double worst = 0;
  std::string worst_cell;
};

CellStats Compare(const std::vector<CellResult>& cells, double tolerance) {
  CellStats s;
  for (const auto& c : cells) {
    const double rel = std::abs(c.sigma - c.reference) / c.reference;
    if (rel <= tolerance) ++s.within;
    if (rel > s.worst) {
      s.worst = rel;
      s.worst_cell = absl::StrFormat("%s %s p%d eps=%g: %.3f vs %.2f",
                                     c.dataset, c.policy, c.partition,
                                     c.epsilon, c.sigma, c.reference);
    }
  }
  return s;
}

bool OracleEquivalenceHolds(std::string* detail);

Outcome PoissonFidelity(const std::vector<CellResult>& cells) {
  const CellStats s = Compare(cells, kPoissonNoiseTolerance);
  Outcome o;
  const bool direct = s.within == static_cast<int>(cells.size());
  std::string oracle_detail;
  const bool oracle_ok = OracleEquivalenceHolds(&oracle_detail);
  const bool documented = std::filesystem::exists(
      std::filesystem::path(FLIP_SOURCE_DIR) / "docs" /
      "noise_calibration.md");
  o.pass = direct || (oracle_ok && documented);
  o.detail = absl::StrFormat(
      "%d/%d cells within %.0f%% (worst %.0f%%: %s)", s.within, cells.size(),
      100 * kPoissonNoiseTolerance, 100 * s.worst, s.worst_cell);
  if (!direct) {
    o.detail += absl::StrCat("; fallback: oracle check ",
                             oracle_ok ? "passes" : "FAILS",
                             ", convention mismatch ",
                             documented ? "documented in docs/" : "NOT documented");
  }
  return o;
}

Outcome FixedFidelity(const std::vector<CellResult>& fixed,
                      const std::vector<CellResult>& poisson,
                      double sweep_seconds) {
  const CellStats s = Compare(fixed, kFixedNoiseTolerance);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (size_t i = 0; i < fixed.size(); ++i) {
    const double ratio = fixed[i].sigma / poisson[i].sigma;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const bool cells_ok = s.within == static_cast<int>(fixed.size());
  const bool ratio_ok = lo >= kRatioLow && hi <= kRatioHigh;
  const bool time_ok = sweep_seconds < kSweepRuntimeSeconds;
  Outcome o;
  o.pass = cells_ok && ratio_ok && time_ok;
  o.detail = absl::StrFormat(
      "%d/%d cells within %.0f%% (worst %.0f%%: %s); ratio range "
      "[%.3f, %.3f] %s [%.1f, %.1f]; 96-cell sweep %.1fs",
      s.within, fixed.size(), 100 * kFixedNoiseTolerance, 100 * s.worst,
      s.worst_cell, lo, hi, ratio_ok ? "inside" : "OUTSIDE", kRatioLow,
      kRatioHigh, sweep_seconds);
  return o;
}

bool OracleEquivalenceHolds(std::string* detail) {
  double worst = 0;
  int checked = 0;
  const auto orders = accountant::IntegerOrders(2, 32);
  for (double sigma : {0.8, 1.0, 2.0}) {
    for (double q : {0.001, 0.01, 0.1}) {
      auto curve = accountant::PoissonSubsampledRdp(sigma, q, orders);
      if (!curve.ok()) {
        *detail = std::string(curve.status().message());
        return false;
      }
      for (size_t i = 0; i < orders.size(); ++i) {
        const double expected =
            oracle::MixtureToBaseRenyi(orders[i], q, 1.0 / sigma);
        worst = std::max(worst,
                         std::abs(curve->values[i] - expected) / expected);
        ++checked;
      }
    }
  }
  double gauss_worst = 0;
  for (double sigma : {0.5, 0.8, 1.0, 2.0, 5.0}) {
    auto curve = accountant::PoissonSubsampledRdp(sigma, 1.0, orders);
    if (!curve.ok()) return false;
    for (size_t i = 0; i < orders.size(); ++i) {
      gauss_worst = std::max(
          gauss_worst,
          std::abs(curve->values[i] - orders[i] / (2 * sigma * sigma)));
    }
  }
  *detail = absl::StrFormat(
      "%d points, max relative gap %.2e (limit %.0e); q=1 max abs gap "
      "%.1e (limit %.0e)",
      checked, worst, kOracleRelative, gauss_worst, kGaussianAbsolute);
  return worst <= kOracleRelative && gauss_worst <= kGaussianAbsolute;
}

Outcome OracleEquivalence() {
  Outcome o;
  o.pass = OracleEquivalenceHolds(&o.detail);
  return o;
}

double UlpDistance(double a, double b) {
  if (a == b) return 0;
  const double ulp =
      std::nextafter(std::max(std::abs(a), std::abs(b)),
                     std::numeric_limits<double>::infinity()) -
      std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) / ulp;
}

Outcome Monotonicity() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> log_sigma(std::log(0.4),
                                                   std::log(8.0));
  std::uniform_real_distribution<double> log_q(std::log(1e-4), std::log(0.3));
  std::uniform_int_distribution<int64_t> steps_dist(1, 5000);
  std::uniform_real_distribution<double> log_delta(std::log(1e-8),
                                                   std::log(1e-4));
  const auto orders = accountant::IntegerOrders(2, 64);
  int cases = 0, sigma_fail = 0, steps_fail = 0, alpha_fail = 0,
      compose_fail = 0, errors = 0;
  double worst_ulps = 0;
  for (int i = 0; i < kPropertyCases; ++i) {
    const double sigma = std::exp(log_sigma(rng));
    const double q = std::exp(log_q(rng));
    const int64_t t1 = steps_dist(rng), t2 = steps_dist(rng);
    const double delta = std::exp(log_delta(rng));
    absl::StatusOr<SubsamplingScheme> scheme;
    if (i % 4 == 3) {
      const int64_t n = 1000 + static_cast<int64_t>(rng() % 100000);
      const int64_t m = std::max<int64_t>(1, static_cast<int64_t>(q * n));
      scheme = SubsamplingScheme::FixedSize(
          m, n, i % 8 == 3 ? Adjacency::kReplaceOne : Adjacency::kAddRemove);
    } else {
      scheme = SubsamplingScheme::Poisson(
          q, i % 2 == 0 ? Adjacency::kAddRemove : Adjacency::kReplaceOne);
    }
    auto curve = accountant::SchemeRdp(sigma, *scheme, orders);
    auto curve_more = accountant::SchemeRdp(sigma * 1.05, *scheme, orders);
    if (!scheme.ok() || !curve.ok() || !curve_more.ok()) {
      ++errors;
      continue;
    }
    ++cases;
    for (size_t k = 1; k < curve->size(); ++k) {
      if (curve->values[k] < curve->values[k - 1]) {
        ++alpha_fail;
        break;
      }
    }
    const auto a = accountant::Compose(*curve, t1);
    const auto b = accountant::Compose(*curve, t2);
    const auto ab = accountant::Compose(*curve, t1 + t2);
    double case_ulps = 0;
    for (size_t k = 0; k < curve->size(); ++k) {
      case_ulps =
          std::max(case_ulps, UlpDistance(ab.values[k], a.values[k] + b.values[k]));
    }
    worst_ulps = std::max(worst_ulps, case_ulps);
    if (case_ulps > kComposeUlps) ++compose_fail;

    auto eps = accountant::RdpToDp(a, delta);
    auto eps_noisier =
        accountant::RdpToDp(accountant::Compose(*curve_more, t1), delta);
    auto eps_longer = accountant::RdpToDp(ab, delta);
    if (!eps.ok() || !eps_noisier.ok() || !eps_longer.ok()) {
      ++errors;
      continue;
    }
    if (!(eps_noisier->epsilon < eps->epsilon)) ++sigma_fail;
    if (eps_longer->epsilon < eps->epsilon) ++steps_fail;
  }
  Outcome o;
  o.pass = cases >= kPropertyCases && errors == 0 && sigma_fail == 0 &&
           steps_fail == 0 && alpha_fail == 0 && compose_fail == 0;
  o.detail = absl::StrFormat(
      "%d cases (%d errors): eps strictly decreasing in sigma violated %d, "
      "nondecreasing in steps violated %d, curve nondecreasing in alpha "
      "violated %d, compose additivity worst %.0f ulp (limit %.0f)",
      cases, errors, sigma_fail, steps_fail, alpha_fail, worst_ulps,
      kComposeUlps);
  return o;
}

Outcome MemoryContrast() {
  constexpr int64_t kM = 120, kN = 50000, kFixedSteps = 416,
                    kPoissonSteps = 10000;
  const dpsgd::MemoryModel memory{0, 1};
  std::mt19937_64 rng(DeriveSeed(7, Stream::kSampling, 0, 0));
  auto fixed = dpsgd::SampleMinibatches(*dpsgd::MinibatchSampler::FixedSize(kM),
                                        kN, kFixedSteps, rng, memory);
  const double q = static_cast<double>(kM) / kN;
  auto poisson = dpsgd::SampleMinibatches(
      *dpsgd::MinibatchSampler::Poisson(q), kN, kPoissonSteps, rng, memory);
  Outcome o;
  if (!fixed.ok() || !poisson.ok()) {
    o.detail = "sampling failed";
    return o;
  }
  const auto& fp = fixed->profile;
  const bool fixed_constant =
      fp.BatchSizeVariance() == 0.0 &&
      std::all_of(fp.batch_sizes.begin(), fp.batch_sizes.end(),
                  [&](int64_t b) { return memory.Units(b) == fp.peak_units; });
  const double mean = poisson->profile.MeanBatchSize();
  const double var = poisson->profile.BatchSizeVariance();
  const double expected_var = kM * (1 - q);
  const double mean_rel = std::abs(mean - kM) / kM;
  const double var_rel = std::abs(var - expected_var) / expected_var;
  o.pass = fixed_constant && mean_rel <= kPoissonMeanRelative &&
           var_rel <= kPoissonVarianceRelative;
  o.detail = absl::StrFormat(
      "fixed: variance %g, peak %d %s over %d steps; poisson: mean %.3f "
      "(%.2f%%), variance %.2f vs %.2f (%.2f%%), peak %d",
      fp.BatchSizeVariance(), fp.peak_units,
      fixed_constant ? "constant" : "VARIES", kFixedSteps, mean,
      100 * mean_rel, var, expected_var, 100 * var_rel,
      poisson->profile.peak_units);
  return o;
}

fl::FederationConfig SmallFederation() {
  fl::FederationConfig c;
  c.clients = 3;
  c.rounds = 3;
  c.batch_size = 64;
  c.learning_rate = 0.3;
  c.data = {3000, 600, 20, 2, 2.0};
  c.model = {dpsgd::Architecture::kMlp, 20, 2, 16};
  c.seed = 11;
  return c;
}

Outcome DpSgdContracts() {
  // Clipping over vectors spanning many magnitudes.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> log_scale(std::log(1e-4),
                                                   std::log(1e8));
  int clip_cases = 0, clip_violations = 0;
  for (int i = 0; i < 20000; ++i) {
    const int dim = 1 + static_cast<int>(rng() % 200);
    const double scale = std::exp(log_scale(rng));
    const double c = std::exp(log_scale(rng)) * 1e-3;
    std::vector<double> g(dim);
    for (double& v : g) v = scale * normal(rng);
    auto norm = dpsgd::ClipInPlace(g, c);
    double direct = 0;
    for (double v : g) direct += v * v;
    direct = std::sqrt(direct);
    ++clip_cases;
    if (!norm.ok() || direct > c || *norm > c) ++clip_violations;
  }

  // sigma = 0 runs: bitwise identical across re-runs and parallelism.
  fl::FederationConfig c = SmallFederation();
  c.privacy.enabled = false;
  const auto data = fl::MakeFederationData(c.data, c.seed);
  auto a = fl::RunFederation(c, data);
  auto b = fl::RunFederation(c, data);
  c.parallelism = 3;
  c.gradient_workers = 4;
  auto d = fl::RunFederation(c, data);
  bool deterministic = a.ok() && b.ok() && d.ok() &&
                       a->final_parameters == b->final_parameters &&
                       a->final_parameters == d->final_parameters;
  if (deterministic) {
    for (size_t r = 0; r < a->rounds.size(); ++r) {
      deterministic &= a->rounds[r].accuracy == d->rounds[r].accuracy &&
                       a->rounds[r].loss == d->rounds[r].loss;
    }
  }

  // Per-round injection variance.
  constexpr double kSigma = 1.3, kClip = 3.0;
  constexpr int64_t kL = 50;
  constexpr int kDraws = 100000, kDim = 8;
  std::vector<double> sum(kDim, 0), sum_sq(kDim, 0);
  std::mt19937_64 noise(DeriveSeed(5, Stream::kRoundNoise, 0, 0));
  for (int i = 0; i < kDraws; ++i) {
    std::vector<double> u(kDim, 0.0);
    if (!dpsgd::PerRoundInject(u, kSigma, kClip, kL, noise).ok()) break;
    for (int j = 0; j < kDim; ++j) {
      sum[j] += u[j];
      sum_sq[j] += u[j] * u[j];
    }
  }
  const double target = std::pow(kSigma * kClip / kL, 2);
  double worst_var = 0;
  for (int j = 0; j < kDim; ++j) {
    const double mean = sum[j] / kDraws;
    const double var = (sum_sq[j] - kDraws * mean * mean) / (kDraws - 1);
    worst_var = std::max(worst_var, std::abs(var - target) / target);
  }

  Outcome o;
  o.pass = clip_violations == 0 && deterministic &&
           worst_var <= kInjectVarianceRelative;
  o.detail = absl::StrFormat(
      "clip violations %d/%d; sigma=0 runs %s across re-runs and "
      "parallelism; per-round inject worst variance gap %.2f%% over %d draws "
      "(limit %.0f%%)",
      clip_violations, clip_cases,
      deterministic ? "bitwise identical" : "DIFFER", 100 * worst_var, kDraws,
      100 * kInjectVarianceRelative);
  return o;
}

Outcome FedAvgContracts() {
  std::mt19937_64 rng(4242);
  double worst_sum = 0;
  int weight_cases = 0;
  for (const auto& row : oracle::kPartitionTable) {
    auto p = fl::AggregationWeights(row.sizes);
    if (!p.ok()) return {false, "weights failed"};
    worst_sum = std::max(
        worst_sum, std::abs(std::accumulate(p->begin(), p->end(), 0.0) - 1.0));
    ++weight_cases;
  }
  for (int i = 0; i < 1000; ++i) {
    std::vector<int64_t> sizes(1 + rng() % 64);
    for (auto& s : sizes) s = 1 + static_cast<int64_t>(rng() % 1000000);
    auto p = fl::AggregationWeights(sizes);
    if (!p.ok()) return {false, "weights failed"};
    worst_sum = std::max(
        worst_sum, std::abs(std::accumulate(p->begin(), p->end(), 0.0) - 1.0));
    ++weight_cases;
  }

  // Single client versus the same local steps without aggregation.
  fl::FederationConfig c = SmallFederation();
  c.clients = 1;
  c.privacy.sigmas = {0.9};
  const auto data = fl::MakeFederationData(c.data, c.seed);
  auto record = fl::RunFederation(c, data);
  double worst_central = std::numeric_limits<double>::infinity();
  if (record.ok()) {
    auto plan = partition::MakePlan(data.train.size(), 1, c.policy,
                                    DeriveSeed(c.seed, Stream::kPartition, 0, 0));
    auto model =
        dpsgd::Model::Initialize(c.model, DeriveSeed(c.seed, Stream::kModelInit, 0, 0));
    if (plan.ok() && model.ok()) {
      const dpsgd::Dataset local = data.train.Subset(plan->assignments[0]);
      dpsgd::LocalTrainingConfig lc;
      lc.batch_size = c.batch_size;
      lc.learning_rate = c.learning_rate;
      lc.clip_norm = c.privacy.clip_norm;
      lc.sigma = 0.9;
      bool ok = true;
      for (int64_t r = 1; r <= c.rounds && ok; ++r) {
        auto res = dpsgd::TrainLocal(*model, local, lc, c.seed, 0, r);
        ok = res.ok();
        if (ok) model = dpsgd::Model::Create(c.model, res->parameters);
        ok = ok && model.ok();
      }
      if (ok) {
        worst_central = 0;
        for (int64_t j = 0; j < model->size(); ++j) {
          worst_central =
              std::max(worst_central, std::abs(record->final_parameters[j] -
                                               model->parameters()[j]));
        }
      }
    }
  }

  // Identical clients.
  std::normal_distribution<double> normal;
  double worst_fixed = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> w(1 + rng() % 300);
    for (double& v : w) v = normal(rng);
    std::vector<int64_t> sizes(1 + rng() % 16);
    for (auto& s : sizes) s = 1 + static_cast<int64_t>(rng() % 100000);
    std::vector<std::vector<double>> params(sizes.size(), w);
    auto avg = fl::FedAvg(params, sizes);
    if (!avg.ok()) return {false, "fedavg failed"};
    for (size_t j = 0; j < w.size(); ++j) {
      worst_fixed = std::max(worst_fixed, std::abs((*avg)[j] - w[j]));
    }
  }

  Outcome o;
  o.pass = worst_sum <= kWeightSumAbsolute &&
           worst_central <= kCentralizedAbsolute &&
           worst_fixed <= kFixedPointAbsolute;
  o.detail = absl::StrFormat(
      "|sum p - 1| max %.1e over %d cases; single client vs centralized max "
      "gap %.1e; identical-client fixed point max gap %.1e",
      worst_sum, weight_cases, worst_central, worst_fixed);
  return o;
}

Outcome UtilityTrend() {
  const auto start = Clock::now();
  // Library defaults: 4 IID clients, n = 20000, d = 20, 2 classes, 5 rounds,
  // L = 550, C = 3, logistic model, per-step Poisson DP-SGD.
  const std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  double sums[3] = {0, 0, 0};
  for (uint64_t seed : seeds) {
    for (int arm = 0; arm < 3; ++arm) {
      fl::FederationConfig c;
      c.seed = seed;
      if (arm == 0) {
        c.privacy.enabled = false;
      } else {
        c.privacy.target_epsilon = arm == 1 ? 10.0 : 6.0;
      }
      const auto data = fl::MakeFederationData(c.data, c.seed);
      auto record = fl::RunFederation(c, data);
      if (!record.ok() || record->aborted || record->rounds.empty()) {
        return {false, absl::StrCat("run failed: ",
                                    record.ok() ? record->diagnostic
                                                : std::string(record.status().message()))};
      }
      sums[arm] += record->rounds.back().accuracy;
    }
  }
  const double n = static_cast<double>(seeds.size());
  const double np = 100 * sums[0] / n, e10 = 100 * sums[1] / n,
               e6 = 100 * sums[2] / n;
  const double elapsed = Seconds(start);
  Outcome o;
  const bool ordered = np >= e10 && e10 >= e6;
  o.pass = ordered && np - e10 <= kUtilityGapPoints && elapsed < kUtilityRuntimeSeconds;
  o.detail = absl::StrFormat(
      "mean final accuracy non-private %.3f%%, eps=10 %.3f%%, eps=6 %.3f%%; "
      "ordering %s; gaps %.3f / %.3f points (limit %.0f); %.1fs",
      np, e10, e6, ordered ? "holds" : "VIOLATED", np - e10, e10 - e6,
      kUtilityGapPoints, elapsed);
  return o;
}

Outcome PractitionerRules() {
  int rows = 0, exact_rows = 0;
  for (const auto& row : oracle::kPartitionTable) {
    practitioner::Requirements r;
    r.goal = practitioner::PrivacyGoal::kMitigateMia;
    r.clients = 4;
    r.partition_sizes.assign(row.sizes.begin(), row.sizes.end());
    r.model_units = 42;
    r.memory_budget = 1'000'000;
    r.max_batch_size = kBatch;
    auto rec = practitioner::Recommend(r);
    ++rows;
    if (!rec.ok()) continue;
    bool exact = rec->deltas.size() == 4;
    for (size_t i = 0; exact && i < 4; ++i) {
      exact = rec->deltas[i] == 1.0 / static_cast<double>(row.sizes[i]);
    }
    exact_rows += exact ? 1 : 0;
  }

  // Memory-constrained requirement run end to end.
  fl::FederationConfig base;
  base.policy = partition::PartitionPolicy::kLinear;
  practitioner::Requirements r;
  r.goal = practitioner::PrivacyGoal::kMitigateMia;
  r.clients = 4;
  r.dataset_size = base.data.train_size;
  r.policy_hint = partition::PartitionPolicy::kLinear;
  r.model_units = base.model.ParameterCount();
  r.memory_budget = r.model_units + kBatch + 16;
  auto rec = practitioner::Recommend(r);
  Outcome o;
  if (!rec.ok()) {
    o.detail = absl::StrCat("recommend failed: ", rec.status().message());
    return o;
  }
  const bool fixed =
      rec->accountant == practitioner::AccountantChoice::kFixedSizeRdp;
  const auto config = practitioner::ApplyRecommendation(base, *rec);
  const auto data = fl::MakeFederationData(config.data, config.seed);
  auto record = fl::RunFederation(config, data);
  int64_t peak = 0;
  bool ran = record.ok() && !record->aborted;
  if (ran) {
    for (const auto& round : record->rounds) {
      for (const auto& c : round.clients) peak = std::max(peak, c.memory_peak);
    }
  }
  o.pass = exact_rows == rows && fixed && ran && peak <= r.memory_budget;
  o.detail = absl::StrFormat(
      "delta = 1/|D_i| exact for %d/%d partition rows; memory budget %d -> "
      "%s, L=%d, simulated peak %d %s budget",
      exact_rows, rows, r.memory_budget,
      practitioner::AccountantName(rec->accountant), rec->batch_size, peak,
      ran ? (peak <= r.memory_budget ? "within" : "EXCEEDS") : "(run failed)");
  return o;
}

// In-process service bound to a loopback port.
class LiveService {
 public:
  explicit LiveService(const std::string& store) {
    auto registry = service::RunRegistry::Open(store);
    if (!registry.ok()) return;
    registry_ = std::move(*registry);
    runs_ = std::make_unique<service::RunManager>(registry_.get());
    if (!runs_->RecoverAfterRestart().ok()) return;
    service_ = std::make_unique<service::FlipService>(
        registry_.get(), runs_.get(), practitioner::GoalPolicyTable{});
    service_->Mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ <= 0) return;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveService() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
    runs_.reset();
  }

  bool ok() const { return port_ > 0 && thread_.joinable(); }
  httplib::Client Client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(120, 0);
    return c;
  }
  service::RunRegistry& registry() { return *registry_; }
  service::RunManager& runs() { return *runs_; }

 private:
  std::unique_ptr<service::RunRegistry> registry_;
  std::unique_ptr<service::RunManager> runs_;
  std::unique_ptr<service::FlipService> service_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

Outcome ServicePurityAndPersistence() {
  const std::string store =
      (std::filesystem::temp_directory_path() / "flip_acceptance_store")
          .string();
  std::filesystem::remove_all(store);
  const std::string calibrate_body = json({{"epsilon", 10},
                                           {"delta", 1e-6},
                                           {"scheme", "poisson"},
                                           {"batch", kBatch},
                                           {"dataset_size", 90962},
                                           {"rounds", kRounds}})
                                         .dump();
  const std::string partitions_path = "/partitions?n=67349&k=4&policy=square";
  bool calibrate_same = false, partitions_same = false, state_same = false,
       listing_same = false;
  int64_t runs_done = 0;
  std::string before_state, before_listing;
  {
    LiveService live(store);
    if (!live.ok()) return {false, "service failed to start"};
    auto client = live.Client();
    auto c1 = client.Post("/calibrate", calibrate_body, "application/json");
    auto c2 = client.Post("/calibrate", calibrate_body, "application/json");
    calibrate_same = c1 && c2 && c1->status == 200 && c1->body == c2->body;
    auto p1 = client.Get(partitions_path);
    auto p2 = client.Get(partitions_path);
    partitions_same = p1 && p2 && p1->status == 200 && p1->body == p2->body;

    json config = {{"clients", 2},
                   {"rounds", 3},
                   {"batch_size", 100},
                   {"data", {{"train_size", 2000}, {"test_size", 400}}},
                   {"privacy", {{"target_epsilon", 8.0}}}};
    for (int i = 0; i < 2; ++i) {
      client.Post("/runs", json({{"config", config}}).dump(),
                  "application/json");
    }
    live.runs().JoinAll();
    for (const auto& s : live.registry().List()) {
      runs_done += s.status == service::RunStatus::kDone ? 1 : 0;
    }
    before_state = live.registry().StateJson().dump();
    auto listing = client.Get("/runs");
    if (listing) before_listing = listing->body;
  }
  {
    LiveService live(store);
    if (!live.ok()) return {false, "service failed to restart"};
    state_same = live.registry().StateJson().dump() == before_state;
    auto listing = live.Client().Get("/runs");
    listing_same = listing && listing->body == before_listing;
  }
  Outcome o;
  o.pass = calibrate_same && partitions_same && runs_done == 2 && state_same &&
           listing_same;
  o.detail = absl::StrFormat(
      "/calibrate %s, /partitions %s across repeats; %d runs done; registry "
      "state %s and /runs %s after restart",
      calibrate_same ? "byte-identical" : "DIFFERS",
      partitions_same ? "byte-identical" : "DIFFERS", runs_done,
      state_same ? "identical" : "DIFFERS",
      listing_same ? "identical" : "DIFFERS");
  return o;
}

int Report(int id, const std::string& name, const Outcome& o) {
  std::printf("%s  [%2d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

int Main() {
  int failures = 0;
  failures += Report(1, "Partition fidelity", PartitionFidelity());

  const auto sweep_start = Clock::now();
  auto poisson = SweepCells(true);
  auto fixed = SweepCells(false);
  const double sweep_seconds = Seconds(sweep_start);
  if (!poisson.ok() || !fixed.ok()) {
    const std::string why = std::string(
        (!poisson.ok() ? poisson.status() : fixed.status()).message());
    failures += Report(2, "Poisson accountant fidelity", {false, why});
    failures += Report(3, "Fixed-size accountant fidelity", {false, why});
  } else {
    failures += Report(2, "Poisson accountant fidelity", PoissonFidelity(*poisson));
    failures += Report(3, "Fixed-size accountant fidelity",
                       FixedFidelity(*fixed, *poisson, sweep_seconds));
  }
  failures += Report(4, "Oracle equivalence", OracleEquivalence());
  failures += Report(5, "Monotonicity suite", Monotonicity());
  failures += Report(6, "Memory contrast", MemoryContrast());
  failures += Report(7, "DP-SGD contracts", DpSgdContracts());
  failures += Report(8, "FedAvg contracts", FedAvgContracts());
  failures += Report(9, "Desk-scale utility trend", UtilityTrend());
  failures += Report(10, "Practitioner rules", PractitionerRules());
  failures += Report(11, "Service", ServicePurityAndPersistence());
  std::printf("%d/11 criteria pass\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace flip::acceptance

int main() { return flip::acceptance::Main(); }
