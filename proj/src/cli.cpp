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

#include "lesion/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lesion/aggregate.hpp"
#include "lesion/augment.hpp"
#include "lesion/datamodel.hpp"
#include "lesion/error.hpp"
#include "lesion/imbalance.hpp"
#include "lesion/infer.hpp"
#include "lesion/metrics.hpp"
#include "lesion/preprocess.hpp"
#include "lesion/report.hpp"

#ifndef LESION_VERSION
#define LESION_VERSION "0.0.0"
#endif

namespace lesion::cli {
namespace fs = std::filesystem;

std::string version() { return LESION_VERSION; }

AugmentationPolicy policy_from_config(const Config& cfg) {
  AugmentationPolicy p;
  p.max_rotate = cfg.get_double("max_rotate", p.max_rotate);
  p.p_affine = cfg.get_double("p_affine", p.p_affine);
  p.do_flip = cfg.get_bool("do_flip", p.do_flip);
  p.flip_vert = cfg.get_bool("flip_vert", p.flip_vert);
  p.max_zoom = cfg.get_double("max_zoom", p.max_zoom);
  p.max_lighting = cfg.get_double("max_lighting", p.max_lighting);
  p.max_shear = cfg.get_double("max_shear", p.max_shear);
  p.crop_pad_size = cfg.get_int("crop_pad_size", p.crop_pad_size);
  p.cutout_holes = cfg.get_int_range("cutout_holes", p.cutout_holes);
  p.cutout_length = cfg.get_int_range("cutout_length", p.cutout_length);
  p.cutout_p = cfg.get_double("cutout_p", p.cutout_p);
  p.validate();
  return p;
}

PreprocessOptions preprocess_options_from_config(const Config& cfg) {
  PreprocessOptions o;
  o.threshold = cfg.get_double("threshold", o.threshold);
  o.min_keep = cfg.get_double("min_keep", o.min_keep);
  o.target_short_side = cfg.get_int("target_short_side", o.target_short_side);
  o.workers = static_cast<unsigned>(std::max(0, cfg.get_int("workers", 0)));
  for (const auto& [source, value] : cfg.with_prefix("bottom_crop.")) {
    o.bottom_crop_by_source[source] = cfg.get_double("bottom_crop." + source, 0.0);
  }
  return o;
}

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out;
};

struct Context {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
  const Globals& globals;
  Config config;
  std::string command;
};

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

fs::path provenance_path(const fs::path& out) {
  std::error_code ec;
  if (fs::is_directory(out, ec)) return out / "provenance.txt";
  return fs::path(out.string() + ".provenance");
}

// Sidecar written next to every primary output. Contains nothing that varies
// between identical invocations.
void write_provenance(const Context& ctx, const fs::path& out) {
  std::string rec;
  rec += "command=" + ctx.command + "\n";
  rec += "args=";
  for (std::size_t i = 1; i < ctx.args.size(); ++i) {
    if (i > 1) rec += ' ';
    rec += ctx.args[i];
  }
  rec += "\n";
  rec += "seed=" + std::to_string(ctx.globals.seed) + "\n";
  rec += "config_digest=fnv1a64:" + hex64(ctx.config.digest()) + "\n";
  rec += "version=" + version() + "\n";
  write_text_file(provenance_path(out), rec);
}

fs::path require_out(const Context& ctx) {
  if (ctx.globals.out.empty()) throw Error(ctx.command + ": --out is required");
  return ctx.globals.out;
}

template <typename T>
T pick(const CLI::Option* flag, const T& flag_value, T config_value) {
  return flag->count() > 0 ? flag_value : config_value;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string roc_svg(const std::vector<std::pair<Category, RocCurve>>& curves) {
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  constexpr double x0 = 60, y0 = 380, side = 320;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"440\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"520\" height=\"440\" fill=\"white\"/>\n";
  s += "<line x1=\"60\" y1=\"380\" x2=\"380\" y2=\"380\" stroke=\"black\"/>\n";
  s += "<line x1=\"60\" y1=\"380\" x2=\"60\" y2=\"60\" stroke=\"black\"/>\n";
  s += "<line x1=\"60\" y1=\"380\" x2=\"380\" y2=\"60\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    const std::string label = svg_number(f).substr(0, 3);
    s += "<text x=\"" + svg_number(x0 + f * side) + "\" y=\"398\" text-anchor=\"middle\">" + label + "</text>\n";
    s += "<text x=\"52\" y=\"" + svg_number(y0 - f * side + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  s += "<text x=\"220\" y=\"425\" text-anchor=\"middle\">False positive rate</text>\n";
  s += "<text x=\"18\" y=\"220\" text-anchor=\"middle\" transform=\"rotate(-90 18 220)\">True positive rate</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& [cat, curve] = curves[k];
    const char* color = kColors[index_of(cat)];
    s += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(color) + "\" points=\"";
    for (const auto& p : curve.points) {
      s += svg_number(x0 + p.fpr * side) + "," + svg_number(y0 - p.tpr * side) + " ";
    }
    s += "\"/>\n";
    const double ly = 70 + 18.0 * static_cast<double>(k);
    s += "<line x1=\"400\" y1=\"" + svg_number(ly) + "\" x2=\"420\" y2=\"" + svg_number(ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"426\" y=\"" + svg_number(ly + 4) + "\">" + std::string(to_string(cat)) + " " +
         svg_number(auc(curve)).substr(0, 5) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

fs::path tta_output_path(const fs::path& out, std::size_t k) {
  return out.parent_path() / (out.stem().string() + "_tta" + std::to_string(k) + out.extension().string());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skin-lesion classification pipeline tools", args.empty() ? "lesion" : args[0]};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Globals globals;
  auto add_globals = [&globals](CLI::App* sub) {
    sub->add_option("--seed", globals.seed, "Random seed");
    sub->add_option("--config", globals.config_path, "key = value configuration file");
    sub->add_option("--out", globals.out, "Output file or directory");
  };

  std::function<void(Context&)> handler;
  auto command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_globals(sub);
    return sub;
  };

  // preprocess ---------------------------------------------------------------
  std::string pre_manifest, pre_images;
  double pre_threshold = kDefaultBorderThreshold, pre_min_keep = kDefaultMinKeep;
  int pre_target = 0;
  unsigned pre_workers = 0;
  auto* pre = command("preprocess", "Remove black borders and rescale images");
  auto* pre_src = pre->add_option("--manifest", pre_manifest, "Input manifest");
  pre->add_option("--images", pre_images, "Input image directory (alternative to --manifest)")
      ->excludes(pre_src);
  auto* pre_thr = pre->add_option("--threshold", pre_threshold, "Border luminance threshold (0-255)");
  auto* pre_keep = pre->add_option("--min-keep", pre_min_keep, "Smallest retained area fraction");
  auto* pre_tgt = pre->add_option("--target", pre_target, "Target short side in pixels");
  auto* pre_wrk = pre->add_option("--workers", pre_workers, "Worker threads (0 = all cores)");
  pre->callback([&] {
    handler = [&](Context& ctx) {
      PreprocessOptions opt = preprocess_options_from_config(ctx.config);
      opt.threshold = pick(pre_thr, pre_threshold, opt.threshold);
      opt.min_keep = pick(pre_keep, pre_min_keep, opt.min_keep);
      opt.target_short_side = pick(pre_tgt, pre_target, opt.target_short_side);
      opt.workers = pick(pre_wrk, pre_workers, opt.workers);
      if (pre_manifest.empty() && pre_images.empty()) throw Error("preprocess: give --manifest or --images");
      const fs::path out_dir = require_out(ctx);

      std::vector<BoxLogEntry> boxes;
      std::vector<PreprocessFailure> failures;
      std::size_t written = 0;
      if (!pre_manifest.empty()) {
        PreprocessResult r = preprocess_batch(parse_manifest(pre_manifest), out_dir, opt);
        write_manifest(r.manifest, out_dir / "manifest.csv");
        written = r.manifest.records.size();
        boxes = std::move(r.boxes);
        failures = std::move(r.failures);
      } else {
        std::vector<PreprocessItem> items;
        for (const auto& p : list_images(pre_images)) items.push_back({p.string(), ""});
        PreprocessOutcome r = preprocess_images(items, out_dir, opt);
        written = r.output_paths.size();
        boxes = std::move(r.boxes);
        failures = std::move(r.failures);
      }
      write_text_file(out_dir / "boxes.csv", format_box_log(boxes));
      if (!failures.empty()) write_text_file(out_dir / "failures.csv", format_failure_log(failures));
      write_provenance(ctx, out_dir);
      ctx.out << "preprocessed " << written << " image(s) into " << out_dir.string() << "\n";
      if (!failures.empty()) {
        for (const auto& f : failures) ctx.err << "failed: " << f.path << ": " << f.reason << "\n";
        throw Error(std::to_string(failures.size()) + " image(s) failed; see failures.csv");
      }
    };
  });

  // manifest -----------------------------------------------------------------
  std::string man_images, man_truth, man_source = "unknown";
  auto* man = command("manifest", "Build a manifest from an image directory and ground truth");
  man->add_option("--images", man_images, "Image directory")->required();
  man->add_option("--truth", man_truth, "Ground-truth CSV")->required();
  man->add_option("--source", man_source, "Source dataset name");
  man->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      const GroundTruthSet truth = parse_ground_truth(man_truth);
      std::unordered_map<std::string, fs::path> by_id;
      for (const auto& p : list_images(man_images)) by_id.emplace(p.stem().string(), p);
      Manifest m;
      std::string missing;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto it = by_id.find(truth.id(i));
        if (it == by_id.end()) {
          missing += " " + truth.id(i);
          continue;
        }
        m.records.push_back({it->second.string(), man_source, truth.label(i), Split::none});
      }
      if (!missing.empty()) throw Error("no image found for ids:" + missing);
      write_manifest(m, out_file);
      write_provenance(ctx, out_file);
      ctx.out << "wrote " << m.records.size() << " record(s) to " << out_file.string() << "\n";
    };
  });

  // split --------------------------------------------------------------------
  std::string split_manifest_path;
  double split_fraction = 0.1;
  auto* spl = command("split", "Stratified train/validation split");
  spl->add_option("--manifest", split_manifest_path, "Input manifest")->required();
  auto* spl_frac = spl->add_option("--valid-fraction", split_fraction, "Validation fraction");
  spl->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      const double fraction = pick(spl_frac, split_fraction, ctx.config.get_double("valid_fraction", 0.1));
      const Manifest m = split_manifest(parse_manifest(split_manifest_path), fraction, ctx.globals.seed);
      write_manifest(m, out_file);
      write_provenance(ctx, out_file);
      const ClassCounts train = count_labels(m, Split::train);
      const ClassCounts valid = count_labels(m, Split::valid);
      ctx.out << "train=" << train.total() << " valid=" << valid.total() << "\n";
    };
  });

  // oversample ---------------------------------------------------------------
  std::string over_manifest;
  auto* ovs = command("oversample", "Balance training classes by random duplication");
  ovs->add_option("--manifest", over_manifest, "Input manifest")->required();
  ovs->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      const Manifest m = oversample_manifest(parse_manifest(over_manifest, true), ctx.globals.seed);
      write_manifest(m, out_file);
      write_provenance(ctx, out_file);
      ctx.out << "wrote " << m.records.size() << " record(s)\n";
    };
  });

  // weights ------------------------------------------------------------------
  std::string w_counts, w_manifest, w_split = "train", w_mode = "effective", w_counts_out;
  double w_beta = 0.999;
  auto* wts = command("weights", "Per-class loss weights");
  auto* w_cnt_opt = wts->add_option("--counts", w_counts, "Class counts CSV");
  wts->add_option("--manifest", w_manifest, "Manifest to count labels from")->excludes(w_cnt_opt);
  wts->add_option("--split", w_split, "Split to count when using --manifest")
      ->check(CLI::IsMember({"train", "valid", "none", "all"}));
  auto* w_mode_opt = wts->add_option("--mode", w_mode, "effective | inverse")
                         ->check(CLI::IsMember({"effective", "inverse"}));
  auto* w_beta_opt = wts->add_option("--beta", w_beta, "Effective-number beta in [0, 1)");
  wts->add_option("--counts-out", w_counts_out, "Also write the class counts used");
  wts->callback([&] {
    handler = [&](Context& ctx) {
      ClassCounts counts;
      if (!w_counts.empty()) {
        counts = parse_class_counts(w_counts);
      } else if (!w_manifest.empty()) {
        const Manifest m = parse_manifest(w_manifest, true);
        counts = w_split == "all" ? count_labels(m) : count_labels(m, parse_split(w_split));
        if (counts.total() == 0) throw Error("no records in split '" + w_split + "'");
      } else {
        throw Error("weights: give --counts or --manifest");
      }
      const std::string mode = pick(w_mode_opt, w_mode, ctx.config.get("weight_mode").value_or("effective"));
      const double beta = pick(w_beta_opt, w_beta, ctx.config.get_double("beta", 0.999));
      WeightVector weights = mode == "inverse" ? inverse_frequency_weights(counts)
                                               : effective_weights(counts, beta);
      std::string csv = "category,weight\n";
      nlohmann::json block;
      block["mode"] = mode;
      if (mode == "effective") block["beta"] = beta;
      block["categories"] = nlohmann::json::array();
      block["counts"] = nlohmann::json::array();
      block["weights"] = nlohmann::json::array();
      for (std::size_t c = 0; c < kNumCategories; ++c) {
        csv += std::string(kCategoryNames[c]) + "," + format_double(weights[c]) + "\n";
        block["categories"].push_back(kCategoryNames[c]);
        block["counts"].push_back(counts.counts[c]);
        block["weights"].push_back(weights[c]);
      }
      ctx.out << csv << "\n" << block.dump(2) << "\n";
      if (!ctx.globals.out.empty()) {
        write_text_file(ctx.globals.out, csv);
        write_provenance(ctx, ctx.globals.out);
      }
      if (!w_counts_out.empty()) write_text_file(w_counts_out, format_class_counts(counts));
    };
  });

  // rescale ------------------------------------------------------------------
  std::string rs_pred, rs_counts;
  auto* rsc = command("rescale", "Divide predictions by class priors and renormalize");
  rsc->add_option("--pred", rs_pred, "Prediction CSV")->required();
  rsc->add_option("--counts", rs_counts, "Training class counts CSV")->required();
  rsc->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      write_predictions(prior_rescale(parse_predictions(rs_pred), parse_class_counts(rs_counts)), out_file);
      write_provenance(ctx, out_file);
    };
  });

  // tta-merge ----------------------------------------------------------------
  std::string tm_regular;
  std::vector<std::string> tm_augmented;
  double tm_beta = kTtaBeta;
  auto* ttm = command("tta-merge", "Blend regular and test-time-augmented predictions");
  ttm->add_option("--regular", tm_regular, "Predictions on the unmodified images")->required();
  ttm->add_option("--augmented", tm_augmented, "Predictions on the augmented variants")->required();
  auto* tm_beta_opt = ttm->add_option("--beta", tm_beta, "Weight of the regular predictions");
  ttm->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      const double beta = pick(tm_beta_opt, tm_beta, ctx.config.get_double("tta_beta", kTtaBeta));
      const PredictionSet regular = parse_predictions(tm_regular);
      std::vector<PredictionSet> augmented;
      for (const auto& f : tm_augmented) augmented.push_back(parse_predictions(f));
      write_predictions(tta_merge(regular, augmented, beta), out_file);
      write_provenance(ctx, out_file);
    };
  });

  // ensemble -----------------------------------------------------------------
  std::vector<std::string> ens_inputs;
  std::vector<double> ens_weights;
  auto* ens = command("ensemble", "Average the predictions of several models");
  ens->add_option("inputs", ens_inputs, "Prediction CSV files")->required();
  ens->add_option("--weights", ens_weights, "Optional per-member weights")->delimiter(',');
  ens->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      std::vector<PredictionSet> members;
      for (const auto& f : ens_inputs) members.push_back(parse_predictions(f));
      const PredictionSet merged =
          ens_weights.empty() ? ensemble_mean(members) : ensemble_weighted(members, ens_weights);
      write_predictions(merged, out_file);
      write_provenance(ctx, out_file);
    };
  });

  // score --------------------------------------------------------------------
  std::string sc_pred, sc_truth, sc_counts, sc_table;
  auto* scr = command("score", "Evaluate predictions against ground truth");
  scr->add_option("--pred", sc_pred, "Prediction CSV")->required();
  scr->add_option("--truth", sc_truth, "Ground-truth CSV")->required();
  scr->add_option("--counts", sc_counts, "Training class counts CSV");
  scr->add_option("--table", sc_table, "Also write the text table to this file");
  scr->callback([&] {
    handler = [&](Context& ctx) {
      const GroundTruthSet truth = parse_ground_truth(sc_truth);
      const AlignedPair pair = align(parse_predictions(sc_pred), truth);
      std::optional<ClassCounts> counts;
      if (!sc_counts.empty()) counts = parse_class_counts(sc_counts);
      const MetricsReport report = full_report(pair.preds, pair.truth, counts);
      const std::string table = format_report_table(report);
      ctx.out << table;
      if (!report.absent_categories.empty()) {
        ctx.err << "warning: categories without positives:";
        for (Category c : report.absent_categories) ctx.err << ' ' << to_string(c);
        ctx.err << "\n";
      }
      if (!ctx.globals.out.empty()) {
        write_text_file(ctx.globals.out, format_report_key_values(report));
        write_provenance(ctx, ctx.globals.out);
      }
      if (!sc_table.empty()) write_text_file(sc_table, table);
    };
  });

  // roc ----------------------------------------------------------------------
  std::string roc_pred, roc_truth, roc_category, roc_svg_path;
  auto* rocc = command("roc", "Export ROC curve points and an SVG plot");
  rocc->add_option("--pred", roc_pred, "Prediction CSV")->required();
  rocc->add_option("--truth", roc_truth, "Ground-truth CSV")->required();
  rocc->add_option("--category", roc_category, "Single category (default: all)");
  rocc->add_option("--svg", roc_svg_path, "Write an SVG plot");
  rocc->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      const GroundTruthSet truth = parse_ground_truth(roc_truth);
      const AlignedPair pair = align(parse_predictions(roc_pred), truth);
      std::vector<Category> cats;
      if (roc_category.empty()) {
        cats.assign(kAllCategories.begin(), kAllCategories.end());
      } else {
        const auto c = parse_category(roc_category);
        if (!c) throw Error("unknown category '" + roc_category + "'");
        cats.push_back(*c);
      }
      std::vector<std::pair<Category, RocCurve>> curves;
      std::string csv = "category,fpr,tpr,threshold\n";
      for (Category c : cats) {
        const auto labels = category_labels(pair.truth, c);
        const auto positives = std::count(labels.begin(), labels.end(), 1);
        if (positives == 0 || positives == static_cast<long>(labels.size())) {
          ctx.err << "skipping " << to_string(c) << ": needs positives and negatives\n";
          continue;
        }
        RocCurve curve = roc_curve(category_scores(pair.preds, c), labels);
        for (const auto& p : curve.points) {
          csv += std::string(to_string(c)) + "," + format_double(p.fpr) + "," + format_double(p.tpr) + "," +
                 format_double(p.threshold) + "\n";
        }
        curves.emplace_back(c, std::move(curve));
      }
      write_text_file(out_file, csv);
      write_provenance(ctx, out_file);
      if (!roc_svg_path.empty()) write_text_file(roc_svg_path, roc_svg(curves));
    };
  });

  // augment-preview ----------------------------------------------------------
  std::string ap_image;
  int ap_count = 8, ap_columns = 4, ap_tta_crop = 0;
  auto* apv = command("augment-preview", "Contact sheet of sampled augmentations");
  apv->add_option("--image", ap_image, "Input image")->required();
  apv->add_option("--count", ap_count, "Number of variants")->check(CLI::PositiveNumber);
  apv->add_option("--columns", ap_columns, "Columns in the sheet")->check(CLI::PositiveNumber);
  apv->add_option("--tta-crop", ap_tta_crop, "Show the eight test-time variants with this crop size");
  apv->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      const ImageTensor img = read_image(ap_image);
      std::vector<ImageTensor> tiles;
      if (ap_tta_crop > 0) {
        tiles = tta_variants(img, ap_tta_crop, ctx.config.get_double("tta_scale", kTtaScale));
      } else {
        const AugmentationPolicy policy = policy_from_config(ctx.config);
        const std::string key = image_id_from_path(ap_image);
        for (int k = 0; k < ap_count; ++k) {
          tiles.push_back(apply_transform(
              img, sample_transform(policy, ctx.globals.seed, key + "#" + std::to_string(k))));
        }
      }
      write_png(contact_sheet(tiles, ap_columns), out_file);
      write_provenance(ctx, out_file);
    };
  });

  // infer --------------------------------------------------------------------
  std::string inf_backend, inf_manifest, inf_split = "all", inf_tta_dir;
  double inf_timeout = 30.0;
  int inf_tta_crop = 0;
  auto* inf = command("infer", "Query an external model process for predictions");
  auto* inf_be = inf->add_option("--backend", inf_backend, "Backend command line");
  inf->add_option("--manifest", inf_manifest, "Images to predict")->required();
  inf->add_option("--split", inf_split, "Restrict to a split")
      ->check(CLI::IsMember({"train", "valid", "none", "all"}));
  auto* inf_to = inf->add_option("--timeout", inf_timeout, "Seconds per image");
  auto* inf_crop = inf->add_option("--tta-crop", inf_tta_crop, "Also predict the eight TTA variants");
  inf->add_option("--tta-dir", inf_tta_dir, "Where to write TTA variant images");
  inf->callback([&] {
    handler = [&](Context& ctx) {
      const fs::path out_file = require_out(ctx);
      BackendOptions backend;
      backend.command = pick(inf_be, inf_backend, ctx.config.get("backend").value_or(""));
      const double timeout_s = pick(inf_to, inf_timeout, ctx.config.get_double("timeout", 30.0));
      if (!(timeout_s > 0.0)) throw Error("timeout must be positive");
      backend.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));

      Manifest m = parse_manifest(inf_manifest, true);
      if (inf_split != "all") {
        const Split wanted = *parse_split(inf_split);
        std::erase_if(m.records, [&](const ManifestRecord& r) { return r.split != wanted; });
      }
      write_predictions(infer(backend, m), out_file);
      write_provenance(ctx, out_file);

      const int crop = pick(inf_crop, inf_tta_crop, ctx.config.get_int("tta_crop", 0));
      if (crop > 0) {
        const double scale = ctx.config.get_double("tta_scale", kTtaScale);
        const fs::path dir = inf_tta_dir.empty() ? out_file.parent_path() / (out_file.stem().string() + "_tta")
                                                 : fs::path(inf_tta_dir);
        fs::create_directories(dir);
        std::vector<std::string> ids;
        std::vector<std::vector<std::string>> variant_paths(kTtaVariantCount);
        for (const auto& r : m.records) {
          const std::string id = image_id_from_path(r.path);
          ids.push_back(id);
          const auto variants = tta_variants(read_image(r.path), crop, scale);
          for (std::size_t k = 0; k < variants.size(); ++k) {
            const fs::path p = dir / (id + "_tta" + std::to_string(k) + ".png");
            write_png(variants[k], p);
            variant_paths[k].push_back(p.string());
          }
        }
        for (std::size_t k = 0; k < kTtaVariantCount; ++k) {
          const fs::path p = tta_output_path(out_file, k);
          write_predictions(infer(backend, variant_paths[k], ids), p);
          write_provenance(ctx, p);
        }
      }
      ctx.out << "predicted " << m.records.size() << " image(s)\n";
    };
  });

  // --------------------------------------------------------------------------
  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"lesion"} : args;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      if (dynamic_cast<const CLI::CallForVersion*>(&e)) out << version() << "\n";
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::string command_name;
  for (const auto* sub : app.get_subcommands()) command_name = sub->get_name();
  try {
    Context ctx{storage, out, err, globals, Config{}, command_name};
    if (!globals.config_path.empty()) ctx.config = Config::load(globals.config_path);
    if (handler) handler(ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace lesion::cli
