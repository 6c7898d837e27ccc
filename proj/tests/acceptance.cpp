// Copyright 2026 The Lesion Toolkit Authors.
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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lesion/aggregate.hpp"
#include "lesion/augment.hpp"
#include "lesion/datamodel.hpp"
#include "lesion/imbalance.hpp"
#include "lesion/metrics.hpp"
#include "lesion/preprocess.hpp"
#include "lesion/report.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace lesion;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Random binary problem with deliberate ties; both classes present.
void random_instance(std::mt19937_64& gen, std::vector<double>& s, std::vector<std::uint8_t>& y) {
  const int n = std::uniform_int_distribution<int>(2, 200)(gen);
  const int levels = std::uniform_int_distribution<int>(2, 40)(gen);
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.1, 0.9)(gen));
  s.assign(n, 0.0);
  y.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    y[i] = coin(gen);
    s[i] = (level(gen) + 0.3 * y[i]) / levels;
  }
  y[0] = 1;
  y[1] = 0;
}

Result auc_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(101);
  double worst = 0;
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  for (int k = 0; k < 500; ++k) {
    random_instance(gen, s, y);
    worst = std::max(worst, std::abs(auc(roc_curve(s, y)) - oracle::pair_auc(s, y)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 10.0, "max diff " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Result ap_oracle() {
  std::mt19937_64 gen(202);
  double worst = 0;
  std::vector<double> s;
  std::vector<std::uint8_t> y;
  for (int k = 0; k < 500; ++k) {
    random_instance(gen, s, y);
    worst = std::max(worst, std::abs(average_precision(s, y) - oracle::average_precision(s, y)));
  }
  return {worst <= 1e-9, "max diff " + fmt("%.3g", worst)};
}

Result accuracy_identity() {
  std::mt19937_64 gen(303);
  std::uniform_int_distribution<std::int64_t> d(0, 100000);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    ConfusionCounts c{d(gen), d(gen), d(gen), d(gen)};
    if (k % 10 == 0) c.tp = c.fn = 0;  // no positives
    if (k % 10 == 1) c.tn = c.fp = 0;  // no negatives
    const double direct = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    worst = std::max(worst, std::abs(binary_metrics(c).accuracy - direct));
  }
  return {worst <= 1e-12, "max diff " + fmt("%.3g", worst)};
}

Result table_mean() {
  const std::vector<std::optional<double>> auc_row{.924, .957, .942, .917, .893, .977, .932, .936, .638};
  const auto mean = mean_column(auc_row);
  const bool ok = mean && std::abs(*mean - 0.902) <= 0.0005;
  return {ok, "mean " + fmt("%.6f", mean.value_or(-1))};
}

ClassCounts skewed_counts() {
  ClassCounts c;
  c.counts = {5415, 14525, 3695, 1005, 3105, 355, 385, 865, 3398};
  return c;
}

Result effective_weights_check() {
  ClassCounts c = skewed_counts();
  const WeightVector w0 = effective_weights(c, 0.0);
  bool ones = true;
  for (std::size_t i = 0; i < w0.size(); ++i) ones &= w0[i] == 1.0;

  const WeightVector near = effective_weights(c, 1.0 - 1e-8);
  // Independent inverse frequency, normalized to sum to the class count.
  double inv_sum = 0;
  for (auto n : c.counts) inv_sum += 1.0 / static_cast<double>(n);
  double worst_rel = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    const double expected = (1.0 / static_cast<double>(c.counts[i])) * 9.0 / inv_sum;
    worst_rel = std::max(worst_rel, std::abs(near[i] - expected) / expected);
  }

  const long double beta = 0.999L;
  const long double exact = (1.0L - std::pow(beta, 1000.0L)) / (1.0L - beta);
  const double e = effective_number(1000, 0.999);
  const bool near_632 = std::abs(e - 632.30) < 0.01;
  const bool ok = ones && worst_rel <= 1e-3 && std::abs(e - static_cast<double>(exact)) <= 0.01 && near_632;
  return {ok, std::string(ones ? "beta=0 exact ones" : "beta=0 NOT ones") + ", inverse rel " +
                  fmt("%.3g", worst_rel) + ", E(1000)=" + fmt("%.4f", e) + " vs " +
                  fmt("%.4f", static_cast<double>(exact))};
}

Result cross_entropy_check() {
  const std::vector<double> logits(9, 0.37);
  const WeightVector ones(std::vector<double>(9, 1.0));
  const double uniform = weighted_cross_entropy(logits, 4, ones);
  const bool ln9 = std::abs(uniform - std::log(9.0)) <= 1e-12;

  std::mt19937_64 gen(606);
  std::normal_distribution<double> z(0, 3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  bool linear = true;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x(9);
    for (auto& v : x) v = z(gen);
    std::vector<double> wv(9);
    for (auto& v : wv) v = u(gen);
    const WeightVector w(wv);
    const std::size_t t = static_cast<std::size_t>(k % 9);
    linear &= weighted_cross_entropy(x, t, w) == wv[t] * weighted_cross_entropy(x, t, ones);
    // Doubling every weight doubles the batch loss.
    std::vector<double> w2 = wv;
    for (auto& v : w2) v *= 2;
    const std::vector<std::size_t> targets{t, (t + 3) % 9};
    std::vector<double> batch = x;
    batch.insert(batch.end(), x.rbegin(), x.rend());
    linear &= weighted_cross_entropy(batch, targets, WeightVector(w2)) ==
              2 * weighted_cross_entropy(batch, targets, w);
  }
  return {ln9 && linear, "uniform loss " + fmt("%.15f", uniform) + (linear ? ", linear" : ", NOT linear")};
}

Result prior_rescale_check() {
  std::mt19937_64 gen(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> ids;
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) {
    ids.push_back("r" + std::to_string(i));
    double sum = 0;
    std::vector<double> row(9);
    for (auto& x : row) sum += (x = u(gen));
    for (auto x : row) v.push_back(x / sum);
  }
  const PredictionSet p(ids, v);
  ClassCounts uniform;
  uniform.counts.assign(9, 50);
  const PredictionSet q = prior_rescale(p, uniform);
  double worst = 0;
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(q.values()[i] - v[i]));

  std::vector<double> two(9, 0.0);
  two[0] = two[1] = 0.5;
  ClassCounts priors;
  priors.counts = {3, 1, 0, 0, 0, 0, 0, 0, 0};
  const PredictionSet r = prior_rescale(PredictionSet({"w"}, two), priors);
  const bool worked = std::abs(r.at(0, 0) - 0.25) <= 1e-12 && std::abs(r.at(0, 1) - 0.75) <= 1e-12;
  return {worst <= 1e-12 && worked,
          "identity diff " + fmt("%.3g", worst) + ", worked example [" + fmt("%.17g", r.at(0, 0)) + ", " +
              fmt("%.17g", r.at(0, 1)) + "]"};
}

PredictionSet random_set(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> ids;
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("t" + std::to_string(i));
    for (int c = 0; c < 9; ++c) v.push_back(u(gen));
  }
  return PredictionSet(ids, v);
}

double max_diff(const PredictionSet& a, const PredictionSet& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

Result aggregation_check() {
  std::mt19937_64 gen(808);
  double fixed = 0, boundary = 0;
  bool perm = true;
  for (int k = 0; k < 50; ++k) {
    const PredictionSet r = random_set(gen, 30);
    const std::vector<PredictionSet> same(8, r);
    fixed = std::max(fixed, max_diff(tta_merge(r, same), r));
    fixed = std::max(fixed, max_diff(ensemble_mean(same), r));
    std::vector<PredictionSet> aug;
    for (int j = 0; j < 8; ++j) aug.push_back(random_set(gen, 30));
    boundary = std::max(boundary, max_diff(tta_merge(r, aug, 1.0), r));

    std::vector<PredictionSet> shuffled = aug;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    perm &= max_diff(ensemble_mean(aug), ensemble_mean(shuffled)) <= 1e-12;
    perm &= max_diff(tta_merge(r, aug), tta_merge(r, shuffled)) <= 1e-12;
    std::vector<double> w(8);
    for (auto& x : w) x = std::uniform_real_distribution<double>(0.1, 2.0)(gen);
    std::vector<std::size_t> order(8);
    for (std::size_t j = 0; j < 8; ++j) order[j] = j;
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<PredictionSet> pm;
    std::vector<double> pw;
    for (auto j : order) {
      pm.push_back(aug[j]);
      pw.push_back(w[j]);
    }
    perm &= max_diff(ensemble_weighted(aug, w), ensemble_weighted(pm, pw)) <= 1e-12;
  }
  std::vector<double> a(9, 0.0), b(9, 0.0);
  a[0] = 1;
  b[1] = 1;
  const std::vector<PredictionSet> pair{PredictionSet({"s"}, a), PredictionSet({"s"}, b)};
  const PredictionSet e = ensemble_mean(pair);
  const bool sym = std::abs(e.at(0, 0) - 0.5) <= 1e-12 && std::abs(e.at(0, 1) - 0.5) <= 1e-12;
  const bool ok = fixed <= 1e-12 && boundary <= 1e-12 && sym && perm;
  return {ok, "fixed-point " + fmt("%.3g", fixed) + ", beta=1 " + fmt("%.3g", boundary) +
                  (sym ? ", symmetric" : ", NOT symmetric") + (perm ? ", permutation invariant" : ", order dependent")};
}

Result preprocessing_check() {
  std::mt19937_64 gen(909);
  std::uniform_int_distribution<int> side(90, 200), border(0, 40);
  int exact = 0, guarded = 0;
  for (int k = 0; k < 1000; ++k) {
    const int w = side(gen), h = side(gen);
    ContentBox content{border(gen), border(gen), 0, 0};
    content.right = w - border(gen);
    content.bottom = h - border(gen);
    const ImageTensor img = synthetic::bordered_image(w, h, content, kDefaultBorderThreshold, gen());
    const ContentBox expected =
        content.area() < kDefaultMinKeep * static_cast<double>(w) * h ? full_box(img) : content;
    guarded += !(expected == content);
    exact += detect_content_box(img) == expected;
  }
  const ImageTensor black(150, 110, 0);
  const bool guard = detect_content_box(black) == full_box(black);
  return {exact == 1000 && guard, std::to_string(exact) + "/1000 exact (" + std::to_string(guarded) +
                                      " via min-keep guard), all-black " + (guard ? "full box" : "WRONG")};
}

Result augmentation_check() {
  AugmentationPolicy policy;  // default bounds
  policy.crop_pad_size = 32;
  std::mt19937_64 gen(1010);
  ImageTensor img(40, 36);
  for (auto& s : img.samples()) s = static_cast<std::uint8_t>(gen());

  bool identical = true, bounded = true;
  for (int i = 0; i < 10000; ++i) {
    const std::string key = "item" + std::to_string(i);
    const TransformSample a = sample_transform(policy, 42, key);
    const TransformSample b = sample_transform(policy, 42, key);
    identical &= a == b && apply_transform(img, a) == apply_transform(img, b);
    const double slack = (1.0 - 1.0 / a.zoom) / 2.0;
    bounded &= std::abs(a.angle) <= policy.max_rotate && std::abs(a.shear) <= policy.max_shear &&
               a.zoom >= 1.0 && a.zoom <= policy.max_zoom && std::abs(a.lighting) <= policy.max_lighting &&
               std::abs(a.dx) <= slack && std::abs(a.dy) <= slack && a.size == policy.crop_pad_size;
    bounded &= static_cast<int>(a.cutouts.size()) <= policy.cutout_holes.second;
    for (const auto& r : a.cutouts) {
      bounded &= r.w >= policy.cutout_length.first && r.w <= policy.cutout_length.second && r.x >= 0 &&
                 r.y >= 0 && r.x + r.w <= a.size && r.y + r.h <= a.size;
    }
  }
  bool tta = true;
  for (int k = 0; k < 20; ++k) {
    ImageTensor t(60 + k, 70 - k);
    for (auto& s : t.samples()) s = static_cast<std::uint8_t>(gen());
    const auto v1 = tta_variants(t, 44);
    const auto v2 = tta_variants(t, 44);
    tta &= v1.size() == 8 && v1 == v2;
  }
  return {identical && bounded && tta, std::string(identical ? "bit-identical" : "NOT identical") +
                                           (bounded ? ", within bounds" : ", OUT OF BOUNDS") +
                                           (tta ? ", 8 deterministic TTA variants" : ", TTA mismatch")};
}

Result split_check() {
  const ClassCounts c = skewed_counts();
  Manifest m;
  for (std::size_t k = 0; k < 9; ++k) {
    for (std::int64_t i = 0; i < c.counts[k]; ++i) {
      m.records.push_back({"img/" + std::string(kCategoryNames[k]) + "_" + std::to_string(i) + ".jpg", "SYN",
                           category_at(k), Split::none});
    }
  }
  const Manifest s = split_manifest(m, 0.1, 7);
  const auto train = count_labels(s, Split::train).total();
  const auto valid = count_labels(s, Split::valid).total();
  return {m.records.size() == 32748 && train == 29469 && valid == 3279,
          std::to_string(m.records.size()) + " -> " + std::to_string(train) + "/" + std::to_string(valid)};
}

// ---------------------------------------------------------------------------
// End to end through the command-line binary.

int sh(const std::string& cmd, const fs::path& log) {
  const std::string full = cmd + " >> '" + log.string() + "' 2>&1";
  const int rc = std::system(full.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

Result end_to_end() {
  TempDir dir("acceptance");
  const fs::path log = dir / "log.txt";
  const std::string cli = std::string("'") + LESION_CLI_PATH + "'";
  const std::string stub = LESION_STUB_PATH;
  const auto t0 = Clock::now();

  synthetic::write_dataset(synthetic::make_dataset(10, 2024), dir / "raw");
  const fs::path truth = dir / "raw" / "truth.csv";
  std::vector<std::string> steps{
      cli + " preprocess --images " + q(dir / "raw") + " --target 64 --out " + q(dir / "pre"),
      cli + " manifest --images " + q(dir / "pre") + " --truth " + q(truth) + " --source SYN --out " +
          q(dir / "manifest.csv"),
      cli + " split --manifest " + q(dir / "manifest.csv") + " --seed 1 --out " + q(dir / "split.csv"),
      cli + " weights --manifest " + q(dir / "split.csv") + " --split train --out " + q(dir / "weights.csv"),
  };
  const std::vector<std::pair<std::string, std::string>> models{{"a", stub + " 1 mean"}, {"b", stub + " 3 centre"}};
  for (const auto& [name, backend] : models) {
    const fs::path pred = dir / (name + ".csv");
    steps.push_back(cli + " infer --backend " + q(backend) + " --manifest " + q(dir / "split.csv") +
                    " --tta-crop 56 --out " + q(pred));
    std::string aug;
    for (int k = 0; k < 8; ++k) aug += " " + q(dir / (name + "_tta" + std::to_string(k) + ".csv"));
    steps.push_back(cli + " tta-merge --regular " + q(pred) + " --augmented" + aug + " --out " +
                    q(dir / (name + "_merged.csv")));
  }
  steps.push_back(cli + " ensemble " + q(dir / "a_merged.csv") + " " + q(dir / "b_merged.csv") + " --out " +
                  q(dir / "ensemble.csv"));
  steps.push_back(cli + " score --pred " + q(dir / "ensemble.csv") + " --truth " + q(truth) + " --out " +
                  q(dir / "report.txt"));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (sh(steps[i], log) != 0) {
      return {false, "step " + std::to_string(i + 1) + " failed: " + read_text_file(log)};
    }
  }
  const double secs = seconds_since(t0);

  // Recompute the merge and the ensemble by hand from the per-variant files.
  std::vector<PredictionSet> merged;
  for (const auto& [name, backend] : models) {
    const PredictionSet r = parse_predictions(dir / (name + ".csv"));
    std::vector<PredictionSet> aug;
    for (int k = 0; k < 8; ++k) aug.push_back(parse_predictions(dir / (name + "_tta" + std::to_string(k) + ".csv")));
    std::vector<double> v(r.values().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double s = 0;
      for (const auto& a : aug) s += a.values()[i];
      v[i] = 0.4 * r.values()[i] + 0.6 * (s / 8.0);
    }
    merged.emplace_back(r.ids(), v);
  }
  std::vector<double> ens(merged[0].values().size());
  for (std::size_t i = 0; i < ens.size(); ++i) ens[i] = (merged[0].values()[i] + merged[1].values()[i]) / 2;
  const PredictionSet ensemble_file = parse_predictions(dir / "ensemble.csv");
  const double agg_diff = max_diff(ensemble_file, PredictionSet(merged[0].ids(), ens));

  // Brute-force every report cell from the ensemble and the truth.
  const GroundTruthSet gt = parse_ground_truth(truth);
  const AlignedPair pair = align(ensemble_file, gt);
  const auto kv = parse_kv(read_text_file(dir / "report.txt"));
  double worst = 0;
  int cells = 0, nulls = 0;
  std::vector<double> row_sum(kNumMetrics, 0.0);
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    std::vector<double> s;
    std::vector<std::uint8_t> y;
    oracle::Counts counts;
    for (std::size_t i = 0; i < pair.truth.size(); ++i) {
      s.push_back(pair.preds.at(i, c));
      y.push_back(index_of(pair.truth.label(i)) == c);
      const bool called = s.back() >= 0.5;
      if (called && y.back()) ++counts.tp;
      else if (called) ++counts.fp;
      else if (y.back()) ++counts.fn;
      else ++counts.tn;
    }
    const oracle::Metrics om = oracle::metrics(counts);
    const double expected[] = {oracle::pair_auc(s, y), oracle::partial_auc(oracle::roc(s, y), 0.8),
                               oracle::average_precision(s, y), om.accuracy, om.sensitivity, om.specificity,
                               om.dice, om.ppv, om.npv};
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
      const std::string key = std::string(metric_key(kAllMetrics[m])) + "." + std::string(kCategoryNames[c]);
      const auto it = kv.find(key);
      if (it == kv.end() || it->second == "null") {
        ++nulls;
        continue;
      }
      ++cells;
      row_sum[m] += expected[m];
      worst = std::max(worst, std::abs(std::stod(it->second) - expected[m]));
    }
  }
  for (std::size_t m = 0; m < kNumMetrics; ++m) {
    const auto it = kv.find(std::string(metric_key(kAllMetrics[m])) + ".mean");
    if (it == kv.end() || it->second == "null") {
      ++nulls;
      continue;
    }
    ++cells;
    worst = std::max(worst, std::abs(std::stod(it->second) - row_sum[m] / 9.0));
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> cls;
  for (std::size_t i = 0; i < pair.truth.size(); ++i) {
    rows.emplace_back(pair.preds.row(i).begin(), pair.preds.row(i).end());
    cls.push_back(static_cast<int>(index_of(pair.truth.label(i))));
  }
  const auto ba = kv.find("balanced_accuracy");
  if (ba == kv.end()) {
    ++nulls;
  } else {
    ++cells;
    worst = std::max(worst, std::abs(std::stod(ba->second) - oracle::balanced_accuracy(rows, cls, 9)));
  }

  const bool ok = secs < 60.0 && nulls == 0 && cells == 91 && worst <= 1e-9 && agg_diff <= 1e-12 &&
                  pair.truth.size() == 90;
  return {ok, std::to_string(cells) + " cells, " + std::to_string(nulls) + " null, max diff " +
                  fmt("%.3g", worst) + ", aggregation diff " + fmt("%.3g", agg_diff) + ", " +
                  fmt("%.1f", secs) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"AUC matches pairwise oracle", auc_oracle},
      {"average precision matches exhaustive sweep", ap_oracle},
      {"prevalence-form accuracy identity", accuracy_identity},
      {"AUC column mean of nine reference values", table_mean},
      {"effective-number weights", effective_weights_check},
      {"weighted cross-entropy", cross_entropy_check},
      {"prior rescaling", prior_rescale_check},
      {"TTA merge and ensemble properties", aggregation_check},
      {"border detection on synthetic images", preprocessing_check},
      {"augmentation determinism and bounds", augmentation_check},
      {"stratified split arithmetic", split_check},
      {"end-to-end pipeline", end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.detail.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
