// Copyright (c) the robkit project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robkit/attention.h"
#include "robkit/augment.h"
#include "robkit/builders.h"
#include "robkit/corrupt_tree.h"
#include "robkit/corruptions.h"
#include "robkit/dataset_ops.h"
#include "robkit/error.h"
#include "robkit/io_util.h"
#include "robkit/manifest.h"
#include "robkit/metrics.h"
#include "robkit/predictions.h"
#include "robkit/rng.h"
#include "robkit/run_record.h"
#include "robkit/severity_params.h"
#include "robkit/thread_pool.h"
#include "robkit/version.h"

namespace fs = std::filesystem;
using namespace robkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
  int threads = 0;
  std::string params_path;

  SeverityTable LoadTable() const {
    return params_path.empty() ? SeverityTable::Builtin()
                               : SeverityTable::FromFile(params_path);
  }
};

std::vector<std::string> CollectArgs(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return args;
}

void PrintPerClassSummary(const DatasetManifest& m) {
  const auto counts = m.PerClassCounts();
  size_t nonempty = 0, min_count = 0, max_count = 0;
  bool first = true;
  for (const size_t c : counts) {
    if (c == 0) continue;
    ++nonempty;
    if (first) {
      min_count = max_count = c;
      first = false;
    } else {
      min_count = std::min(min_count, c);
      max_count = std::max(max_count, c);
    }
  }
  std::printf("items %zu  classes %zu/%zu", m.items.size(), nonempty,
              m.label_space.size());
  if (nonempty > 0) {
    std::printf("  per-class min %zu max %zu", min_count, max_count);
  }
  std::printf("\n");
}

Geometry ParseGeometry(const std::string& text) {
  Geometry g;
  if (std::sscanf(text.c_str(), "%dx%dx%d", &g.width, &g.height,
                  &g.channels) != 3) {
    throw UsageError("geometry must look like 64x64x3");
  }
  return g;
}

// ---- subcommand bodies ----

int RunStats(const fs::path& manifest_path, const fs::path& out,
             const GlobalOptions& global,
             const std::vector<std::string>& argv) {
  const DatasetManifest m = LoadManifest(manifest_path);
  const ChannelStats stats =
      ComputeChannelStats(m, ResolveRoot(m, manifest_path), global.threads);
  std::printf("mean");
  for (const double v : stats.mean) std::printf(" %.4f", v);
  std::printf("\nstd ");
  for (const double v : stats.std) std::printf(" %.4f", v);
  std::printf("\n");
  if (!out.empty()) {
    std::string body = "{\n  \"mean\": [";
    char buf[64];
    for (size_t i = 0; i < stats.mean.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", i ? ", " : "", stats.mean[i]);
      body += buf;
    }
    body += "],\n  \"std\": [";
    for (size_t i = 0; i < stats.std.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.17g", i ? ", " : "", stats.std[i]);
      body += buf;
    }
    body += "]\n}\n";
    AtomicWriteText(out, body);
    RunRecord record;
    record.subcommand = "stats";
    record.arguments = argv;
    record.AddInputFile(manifest_path);
    record.AddOutputFile(out);
    WriteRunRecord(record, RunRecordPathFor(out));
  }
  return kExitOk;
}

int RunSubset(const fs::path& manifest_path, double fraction, uint64_t seed,
              bool no_stratify, const fs::path& out,
              const std::vector<std::string>& argv) {
  const DatasetManifest m = LoadManifest(manifest_path);
  DatasetManifest subset = StratifiedSubset(m, fraction, seed, !no_stratify);
  // Keep item paths resolvable from the new manifest location.
  const fs::path abs_root = fs::weakly_canonical(ResolveRoot(m, manifest_path));
  const fs::path out_dir =
      fs::weakly_canonical(out.parent_path().empty() ? "." : out.parent_path());
  subset.root = fs::relative(abs_root, out_dir).generic_string();
  SaveManifest(subset, out);
  PrintPerClassSummary(subset);
  RunRecord record;
  record.subcommand = "subset";
  record.arguments = argv;
  record.seed = seed;
  record.AddInputFile(manifest_path);
  record.AddOutputFile(out);
  WriteRunRecord(record, RunRecordPathFor(out));
  return kExitOk;
}

int RunIngestGen(const fs::path& dir, const fs::path& labels_file,
                 const fs::path& space_from, const std::string& name,
                 const fs::path& out, const std::vector<std::string>& argv) {
  const DatasetManifest space_manifest = LoadManifest(space_from);
  IngestLabeling labeling;
  if (!labels_file.empty()) {
    labeling.mode = IngestLabeling::Mode::kMapFile;
    labeling.map_file = labels_file;
  }
  DatasetManifest gen =
      IngestGenerated(dir, labeling, space_manifest.label_space, name);
  if (gen.items.empty()) {
    std::fprintf(stderr, "warning: ingest found no images under %s\n",
                 dir.string().c_str());
  }
  const fs::path abs_dir = fs::weakly_canonical(dir);
  const fs::path out_dir =
      fs::weakly_canonical(out.parent_path().empty() ? "." : out.parent_path());
  gen.root = fs::relative(abs_dir, out_dir).generic_string();
  SaveManifest(gen, out);
  PrintPerClassSummary(gen);
  RunRecord record;
  record.subcommand = "ingest-gen";
  record.arguments = argv;
  record.AddInputFile(space_from);
  if (!labels_file.empty()) record.AddInputFile(labels_file);
  record.AddOutputFile(out);
  WriteRunRecord(record, RunRecordPathFor(out));
  return kExitOk;
}

int RunMix(const fs::path& real_path, const fs::path& gen_path,
           std::optional<double> ratio, std::optional<int64_t> take_count,
           uint64_t seed, const fs::path& out,
           const std::vector<std::string>& argv) {
  if (ratio.has_value() == take_count.has_value()) {
    throw UsageError("exactly one of --ratio and --take is required");
  }
  const DatasetManifest real = LoadManifest(real_path);
  const DatasetManifest gen = LoadManifest(gen_path);
  MixPathContext ctx;
  ctx.real_root = ResolveRoot(real, real_path);
  ctx.gen_root = ResolveRoot(gen, gen_path);
  ctx.out_root = out.parent_path().empty() ? "." : out.parent_path();
  const TakeSpec take = ratio.has_value() ? TakeSpec::Ratio(*ratio)
                                          : TakeSpec::Count(*take_count);
  DatasetManifest mixed = MixDatasets(real, gen, take, seed, ctx);
  SaveManifest(mixed, out);
  std::printf("real %zu  generated %zu  mixed %zu\n",
              mixed.CountBySource(Source::kReal),
              mixed.CountBySource(Source::kGenerated), mixed.size());
  RunRecord record;
  record.subcommand = "mix";
  record.arguments = argv;
  record.seed = seed;
  record.AddInputFile(real_path);
  record.AddInputFile(gen_path);
  record.AddOutputFile(out);
  WriteRunRecord(record, RunRecordPathFor(out));
  return kExitOk;
}

int RunCorrupt(const fs::path& manifest_path, const std::string& profile_name,
               uint64_t seed, const fs::path& out, const GlobalOptions& global,
               const std::vector<std::string>& argv) {
  const DatasetManifest m = LoadManifest(manifest_path);
  const SeverityTable table = global.LoadTable();
  CorruptionContext ctx;
  ctx.table = &table;
  const CorruptionProfile profile = ProfileFromName(profile_name);
  const auto desc =
      BuildCorruptedTestset(m, ResolveRoot(m, manifest_path), profile, seed,
                            out, global.threads, ctx);
  const size_t total = desc.item_count * desc.kinds.size() * 5;
  std::printf("kinds %zu  severities 5  items %zu  images %zu\n",
              desc.kinds.size(), desc.item_count, total);
  RunRecord record;
  record.subcommand = "corrupt";
  record.arguments = argv;
  record.seed = seed;
  record.AddInputFile(manifest_path);
  record.AddOutputTree(out);
  WriteRunRecord(record, out / "run_record.json");
  return kExitOk;
}

int RunBuildV2(const fs::path& source, const fs::path& target_space_path,
               const std::string& geometry_text, const std::string& name,
               const fs::path& out, const GlobalOptions& global,
               const std::vector<std::string>& argv) {
  DatasetManifest src;
  fs::path src_root;
  if (fs::is_directory(source)) {
    src = ManifestFromClassTree(source, name.empty() ? "source" : name);
    src_root = source;
  } else {
    src = LoadManifest(source);
    src_root = ResolveRoot(src, source);
  }
  const DatasetManifest target = LoadManifest(target_space_path);
  Geometry geometry = target.geometry;
  if (!geometry_text.empty()) geometry = ParseGeometry(geometry_text);
  const ClassIntersection inter =
      IntersectClasses(src.label_space, target.label_space);
  if (inter.mapping.empty()) {
    std::fprintf(stderr, "warning: class intersection is empty\n");
  }
  DatasetManifest built = BuildIntersectionTestset(
      src, src_root, inter, geometry, out, global.threads);
  if (!name.empty()) {
    built.name = name;
    SaveManifest(built, out / "manifest.json");
  }
  std::printf("mapped classes %zu\n", inter.mapping.size());
  PrintPerClassSummary(built);
  RunRecord record;
  record.subcommand = "build-v2";
  record.arguments = argv;
  record.AddInputFile(target_space_path);
  if (!fs::is_directory(source)) record.AddInputFile(source);
  record.AddOutputTree(out);
  WriteRunRecord(record, out / "run_record.json");
  return kExitOk;
}

int RunBuildA(const fs::path& val_path, const fs::path& preds_path,
              const fs::path& out, const std::vector<std::string>& argv) {
  const DatasetManifest val = LoadManifest(val_path);
  const PredictionSet preds = LoadPredictions(preds_path);
  const DatasetManifest built = BuildAdversarialFilterTestset(
      val, ResolveRoot(val, val_path), preds, out);
  PrintPerClassSummary(built);
  RunRecord record;
  record.subcommand = "build-a";
  record.arguments = argv;
  record.AddInputFile(val_path);
  record.AddInputFile(preds_path);
  record.AddOutputTree(out);
  WriteRunRecord(record, out / "run_record.json");
  return kExitOk;
}

int RunAugment(const fs::path& manifest_path, const std::string& op,
               double alpha_mixup, double alpha_cutmix, double p_switch,
               int severity, int width, int depth, uint64_t seed,
               const fs::path& out, const GlobalOptions& global,
               const std::vector<std::string>& argv) {
  const DatasetManifest m = LoadManifest(manifest_path);
  if (m.items.empty()) throw ValidationError("augment needs a non-empty manifest");
  const fs::path root = ResolveRoot(m, manifest_path);
  const int num_classes = static_cast<int>(m.label_space.size());
  fs::create_directories(out);

  DatasetManifest augmented;
  augmented.name = m.name + "_aug_" + op;
  augmented.root = ".";
  augmented.label_space = m.label_space;
  augmented.geometry = m.geometry;
  augmented.items.resize(m.items.size());

  std::vector<std::string> sidecar_lines(m.items.size());
  ParallelFor(m.items.size(), global.threads, [&](size_t i) {
    const ItemRecord& item = m.items[i];
    const uint64_t item_seed = ItemSeed(seed, item.id);
    const ImageBuffer img = LoadImage(ItemImagePath(m, root, item));
    const std::string file_name = SanitizeFileName(item.id) + ".png";

    ImageBuffer result;
    SoftLabel soft = SoftLabel::OneHot(item.label, num_classes);
    if (op == "augmix") {
      AugmixConfig cfg;
      cfg.severity = severity;
      cfg.width = width;
      cfg.depth = depth;
      result = Augmix(img, cfg, item_seed);
    } else {
      // Seeded partner draw (never the item itself when N > 1).
      Rng partner_rng(Hash64().U64(item_seed).Str("partner").Digest());
      size_t j = i;
      if (m.items.size() > 1) {
        j = static_cast<size_t>(partner_rng.UniformInt(
            0, static_cast<int64_t>(m.items.size()) - 2));
        if (j >= i) ++j;
      }
      const ItemRecord& other = m.items[j];
      const ImageBuffer img_b = LoadImage(ItemImagePath(m, root, other));
      MixResult mix;
      if (op == "mixup") {
        mix = Mixup(img, item.label, img_b, other.label, num_classes,
                    alpha_mixup, item_seed);
      } else if (op == "cutmix") {
        mix = Cutmix(img, item.label, img_b, other.label, num_classes,
                     alpha_cutmix, item_seed);
      } else if (op == "switch") {
        mix = CutmixMixupSwitch(img, item.label, img_b, other.label,
                                num_classes, p_switch, alpha_cutmix,
                                alpha_mixup, item_seed);
      } else {
        throw UsageError("unknown augment op: " + op);
      }
      result = std::move(mix.image);
      soft = std::move(mix.label);
    }
    SavePng(result, out / file_name);

    std::string line = item.id + "\t";
    bool first = true;
    for (size_t c = 0; c < soft.weights.size(); ++c) {
      if (soft.weights[c] <= 0.0) continue;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s%zu:%.17g", first ? "" : ",", c,
                    soft.weights[c]);
      line += buf;
      first = false;
    }
    sidecar_lines[i] = std::move(line);

    ItemRecord rec = item;
    rec.path = file_name;
    rec.provenance = "augment:" + op;
    augmented.items[i] = std::move(rec);
  });

  std::string sidecar;
  for (const auto& line : sidecar_lines) {
    sidecar += line;
    sidecar += '\n';
  }
  AtomicWriteText(out / "labels.tsv", sidecar);
  SaveManifest(augmented, out / "manifest.json");
  std::printf("augmented %zu items with %s\n", augmented.items.size(),
              op.c_str());
  RunRecord record;
  record.subcommand = "augment";
  record.arguments = argv;
  record.seed = seed;
  record.AddInputFile(manifest_path);
  record.AddOutputTree(out);
  WriteRunRecord(record, out / "run_record.json");
  return kExitOk;
}

int RunEval(const fs::path& manifest_path, const fs::path& preds_path,
            const fs::path& tree_root, const fs::path& preds_dir,
            const fs::path& baseline_matrix_path, const std::string& model,
            const fs::path& out, const fs::path& csv_out,
            const std::vector<std::string>& argv) {
  const DatasetManifest clean = LoadManifest(manifest_path);
  const PredictionSet clean_preds = LoadPredictions(preds_path);

  EvalReport report;
  report.model_id = model;
  report.dataset_id = clean.name;
  report.clean_error = CleanError(clean, clean_preds);

  RunRecord record;
  record.subcommand = "eval";
  record.arguments = argv;
  record.AddInputFile(manifest_path);
  record.AddInputFile(preds_path);

  if (!tree_root.empty()) {
    if (preds_dir.empty()) {
      throw UsageError("--preds-dir is required when --tree is given");
    }
    const CorruptedTreeDescriptor tree = LoadCorruptedTree(tree_root);
    report.profile = std::string(ProfileName(tree.profile));
    std::vector<DatasetManifest> cell_manifests;
    std::vector<PredictionSet> cell_preds;
    cell_manifests.reserve(tree.cell_manifests.size());
    cell_preds.reserve(tree.cell_manifests.size());
    std::map<std::pair<std::string, int>,
             std::pair<const DatasetManifest*, const PredictionSet*>>
        cells;
    for (const auto& [cell, manifest_path_cell] : tree.cell_manifests) {
      const fs::path cell_preds_path =
          preds_dir / (cell.first + "_" + std::to_string(cell.second) + ".csv");
      if (!fs::exists(cell_preds_path)) {
        throw ValidationError("missing predictions for cell (" + cell.first +
                              ", " + std::to_string(cell.second) +
                              "): " + cell_preds_path.string());
      }
      cell_manifests.push_back(LoadManifest(manifest_path_cell));
      cell_preds.push_back(LoadPredictions(cell_preds_path));
      cells[cell] = {&cell_manifests.back(), &cell_preds.back()};
    }
    report.matrix = BuildErrorMatrix(tree.kinds, tree.severities, cells);
    report.mce = Mce(report.matrix);
    if (!baseline_matrix_path.empty()) {
      const CorruptionErrorMatrix baseline =
          LoadMatrixCsv(baseline_matrix_path);
      report.normalized_mce = NormalizedMce(report.matrix, baseline);
      record.AddInputFile(baseline_matrix_path);
    }
    record.AddInputFile(tree_root / "index.json");
  }

  report.Validate();
  SaveEvalReport(report, out);
  record.AddOutputFile(out);
  if (!csv_out.empty()) {
    AtomicWriteText(csv_out, EvalReportToCsv(report));
    record.AddOutputFile(csv_out);
  }
  WriteRunRecord(record, RunRecordPathFor(out));
  std::printf("clean_error %.1f\n", report.clean_error);
  if (report.mce.has_value()) std::printf("mce %.1f\n", *report.mce);
  return kExitOk;
}

int RunMce(const fs::path& matrix_path, const fs::path& baseline_path,
           const fs::path& out, const std::vector<std::string>& argv) {
  const CorruptionErrorMatrix matrix = LoadMatrixCsv(matrix_path);
  const double mce = Mce(matrix);
  std::printf("%.1f\n", mce);
  std::optional<double> normalized;
  if (!baseline_path.empty()) {
    normalized = NormalizedMce(matrix, LoadMatrixCsv(baseline_path));
    std::printf("normalized %.4f\n", *normalized);
  }
  if (!out.empty()) {
    char buf[160];
    if (normalized.has_value()) {
      std::snprintf(buf, sizeof(buf),
                    "{\n  \"mce\": %.17g,\n  \"normalized_mce\": %.17g\n}\n",
                    mce, *normalized);
    } else {
      std::snprintf(buf, sizeof(buf), "{\n  \"mce\": %.17g\n}\n", mce);
    }
    AtomicWriteText(out, buf);
    RunRecord record;
    record.subcommand = "mce";
    record.arguments = argv;
    record.AddInputFile(matrix_path);
    if (!baseline_path.empty()) record.AddInputFile(baseline_path);
    record.AddOutputFile(out);
    WriteRunRecord(record, RunRecordPathFor(out));
  }
  return kExitOk;
}

int RunDelta(const fs::path& before_path, const fs::path& after_path,
             const fs::path& out, const std::vector<std::string>& argv) {
  const EvalReport before = LoadEvalReport(before_path);
  const EvalReport after = LoadEvalReport(after_path);
  const auto rows = DeltaReport(before, after);
  std::printf("%-16s %8s %8s %8s  %s\n", "metric", "before", "after", "delta",
              "improved");
  std::string csv = "metric,before,after,delta,improved\n";
  for (const auto& row : rows) {
    std::printf("%-16s %8.1f %8.1f %8s  %s\n", row.metric.c_str(), row.before,
                row.after, row.display.c_str(), row.improved ? "yes" : "no");
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%s,%s\n",
                  row.metric.c_str(), row.before, row.after,
                  row.display.c_str(), row.improved ? "yes" : "no");
    csv += buf;
  }
  if (!out.empty()) {
    AtomicWriteText(out, csv);
    RunRecord record;
    record.subcommand = "delta";
    record.arguments = argv;
    record.AddInputFile(before_path);
    record.AddInputFile(after_path);
    record.AddOutputFile(out);
    WriteRunRecord(record, RunRecordPathFor(out));
  }
  return kExitOk;
}

int RunAttnDist(const fs::path& dump_dir, const fs::path& out,
                const std::vector<std::string>& argv) {
  const AttentionDump dump = LoadAttentionDump(dump_dir);
  const AttentionDistances dist = MeanAttentionDistance(dump);
  std::string csv = "layer,head,distance_px\n";
  for (int layer = 0; layer < dump.layers; ++layer) {
    for (int head = 0; head < dump.heads; ++head) {
      const double v =
          dist.per_head[static_cast<size_t>(layer)][static_cast<size_t>(head)];
      std::printf("layer %d head %d  %.4f px\n", layer, head, v);
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", layer, head, v);
      csv += buf;
    }
    std::printf("layer %d mean    %.4f px\n", layer,
                dist.per_layer_mean[static_cast<size_t>(layer)]);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,mean,%.17g\n", layer,
                  dist.per_layer_mean[static_cast<size_t>(layer)]);
    csv += buf;
  }
  if (!out.empty()) {
    AtomicWriteText(out, csv);
    RunRecord record;
    record.subcommand = "attn-dist";
    record.arguments = argv;
    record.AddInputFile(dump_dir / "meta.json");
    record.AddOutputFile(out);
    WriteRunRecord(record, RunRecordPathFor(out));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dataset mixing and robustness benchmark toolkit"};
  app.set_config("--config", "", "INI config file; flags override it");
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--threads", global.threads,
                 "worker threads (0 = hardware count)");
  app.add_option("--params", global.params_path,
                 "severity parameter table override (JSON)");
  app.set_version_flag(
      "--version", [] {
        return std::string("robkit ") + kToolkitVersion +
               " (severity-params " + SeverityTable::Builtin().version() +
               ")";
      }());

  const std::vector<std::string> args = CollectArgs(argc, argv);

  // stats
  auto* stats = app.add_subcommand("stats", "per-channel mean/std");
  fs::path stats_manifest, stats_out;
  stats->add_option("--manifest", stats_manifest)->required();
  stats->add_option("--out", stats_out, "write full-precision JSON");

  // subset
  auto* subset = app.add_subcommand("subset", "stratified random subset");
  fs::path subset_manifest, subset_out;
  double subset_fraction = 0.0;
  uint64_t subset_seed = 0;
  bool subset_no_stratify = false;
  subset->add_option("--manifest", subset_manifest)->required();
  subset->add_option("--fraction", subset_fraction)->required();
  subset->add_option("--seed", subset_seed)->required();
  subset->add_flag("--no-stratify", subset_no_stratify,
                   "uniform draw over all items instead");
  subset->add_option("--out", subset_out)->required();

  // ingest-gen
  auto* ingest = app.add_subcommand("ingest-gen",
                                    "ingest generated images into a manifest");
  fs::path ingest_dir, ingest_labels, ingest_space, ingest_out;
  std::string ingest_name = "generated";
  ingest->add_option("--dir", ingest_dir)->required();
  ingest->add_option("--labels", ingest_labels,
                     "map file (relative/path<TAB>class_key); default: "
                     "per-class subdirectories");
  ingest->add_option("--space-from", ingest_space,
                     "manifest supplying the target label space")
      ->required();
  ingest->add_option("--name", ingest_name);
  ingest->add_option("--out", ingest_out)->required();

  // mix
  auto* mix = app.add_subcommand("mix", "concatenate real + generated");
  fs::path mix_real, mix_gen, mix_out;
  std::optional<double> mix_ratio;
  std::optional<int64_t> mix_take;
  uint64_t mix_seed = 0;
  mix->add_option("--real", mix_real)->required();
  mix->add_option("--gen", mix_gen)->required();
  mix->add_option("--ratio", mix_ratio, "generated items as a ratio of N_real");
  mix->add_option("--take", mix_take, "generated items as a count");
  mix->add_option("--seed", mix_seed)->required();
  mix->add_option("--out", mix_out)->required();

  // corrupt
  auto* corrupt = app.add_subcommand("corrupt", "build a corrupted test tree");
  fs::path corrupt_manifest, corrupt_out;
  std::string corrupt_profile = "natural";
  uint64_t corrupt_seed = 0;
  corrupt->add_option("--manifest", corrupt_manifest)->required();
  corrupt->add_option("--profile", corrupt_profile)
      ->check(CLI::IsMember({"natural", "medical"}));
  corrupt->add_option("--seed", corrupt_seed)->required();
  corrupt->add_option("--out", corrupt_out)->required();

  // build-v2
  auto* buildv2 =
      app.add_subcommand("build-v2", "class-intersection test set builder");
  fs::path v2_source, v2_space, v2_out;
  std::string v2_geometry, v2_name;
  buildv2->add_option("--source", v2_source,
                      "source tree (<root>/<class_key>/...) or manifest")
      ->required();
  buildv2->add_option("--target-space", v2_space,
                      "manifest supplying the target label space + geometry")
      ->required();
  buildv2->add_option("--geometry", v2_geometry, "override, e.g. 64x64x3");
  buildv2->add_option("--name", v2_name);
  buildv2->add_option("--out", v2_out)->required();

  // build-a
  auto* builda =
      app.add_subcommand("build-a", "misclassification-filtered test set");
  fs::path a_val, a_preds, a_out;
  builda->add_option("--val", a_val)->required();
  builda->add_option("--preds", a_preds)->required();
  builda->add_option("--out", a_out)->required();

  // augment
  auto* augment = app.add_subcommand("augment", "offline augmentation");
  fs::path aug_manifest, aug_out;
  std::string aug_op;
  double aug_alpha_mixup = 0.8, aug_alpha_cutmix = 1.0, aug_p_switch = 0.5;
  int aug_severity = 3, aug_width = 3, aug_depth = 0;
  uint64_t aug_seed = 0;
  augment->add_option("--manifest", aug_manifest)->required();
  augment->add_option("--op", aug_op)
      ->required()
      ->check(CLI::IsMember({"mixup", "cutmix", "switch", "augmix"}));
  augment->add_option("--alpha-mixup", aug_alpha_mixup);
  augment->add_option("--alpha-cutmix", aug_alpha_cutmix);
  augment->add_option("--p-switch", aug_p_switch);
  augment->add_option("--severity", aug_severity);
  augment->add_option("--width", aug_width);
  augment->add_option("--depth", aug_depth, "0 samples depth in [1,3]");
  augment->add_option("--seed", aug_seed)->required();
  augment->add_option("--out", aug_out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "clean error + corruption matrix");
  fs::path eval_manifest, eval_preds, eval_tree, eval_preds_dir,
      eval_baseline, eval_out, eval_csv;
  std::string eval_model = "model";
  eval->add_option("--manifest", eval_manifest)->required();
  eval->add_option("--preds", eval_preds)->required();
  eval->add_option("--tree", eval_tree, "corrupted tree root");
  eval->add_option("--preds-dir", eval_preds_dir,
                   "per-cell CSVs named <kind>_<severity>.csv");
  eval->add_option("--baseline-matrix", eval_baseline,
                   "baseline matrix CSV for normalized mCE");
  eval->add_option("--model", eval_model);
  eval->add_option("--out", eval_out)->required();
  eval->add_option("--csv", eval_csv, "also emit the CSV table");

  // mce
  auto* mce = app.add_subcommand("mce", "mean corrupted error from a matrix");
  fs::path mce_matrix, mce_baseline, mce_out;
  mce->add_option("--matrix", mce_matrix)->required();
  mce->add_option("--baseline", mce_baseline);
  mce->add_option("--out", mce_out);

  // delta
  auto* delta = app.add_subcommand("delta", "signed metric deltas");
  fs::path delta_before, delta_after, delta_out;
  delta->add_option("--before", delta_before)->required();
  delta->add_option("--after", delta_after)->required();
  delta->add_option("--out", delta_out, "CSV output");

  // attn-dist
  auto* attn = app.add_subcommand("attn-dist", "mean attention distances");
  fs::path attn_dump, attn_out;
  attn->add_option("--dump", attn_dump)->required();
  attn->add_option("--out", attn_out, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (stats->parsed()) return RunStats(stats_manifest, stats_out, global, args);
    if (subset->parsed()) {
      return RunSubset(subset_manifest, subset_fraction, subset_seed,
                       subset_no_stratify, subset_out, args);
    }
    if (ingest->parsed()) {
      return RunIngestGen(ingest_dir, ingest_labels, ingest_space, ingest_name,
                          ingest_out, args);
    }
    if (mix->parsed()) {
      return RunMix(mix_real, mix_gen, mix_ratio, mix_take, mix_seed, mix_out,
                    args);
    }
    if (corrupt->parsed()) {
      return RunCorrupt(corrupt_manifest, corrupt_profile, corrupt_seed,
                        corrupt_out, global, args);
    }
    if (buildv2->parsed()) {
      return RunBuildV2(v2_source, v2_space, v2_geometry, v2_name, v2_out,
                        global, args);
    }
    if (builda->parsed()) return RunBuildA(a_val, a_preds, a_out, args);
    if (augment->parsed()) {
      return RunAugment(aug_manifest, aug_op, aug_alpha_mixup,
                        aug_alpha_cutmix, aug_p_switch, aug_severity,
                        aug_width, aug_depth, aug_seed, aug_out, global, args);
    }
    if (eval->parsed()) {
      return RunEval(eval_manifest, eval_preds, eval_tree, eval_preds_dir,
                     eval_baseline, eval_model, eval_out, eval_csv, args);
    }
    if (mce->parsed()) return RunMce(mce_matrix, mce_baseline, mce_out, args);
    if (delta->parsed()) {
      return RunDelta(delta_before, delta_after, delta_out, args);
    }
    if (attn->parsed()) return RunAttnDist(attn_dump, attn_out, args);
    std::fprintf(stderr, "no subcommand given\n");
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
}
