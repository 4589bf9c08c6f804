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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "robkit/attention.h"
#include "robkit/augment.h"
#include "robkit/builders.h"
#include "robkit/corrupt_tree.h"
#include "robkit/corruptions.h"
#include "robkit/dataset_ops.h"
#include "robkit/error.h"
#include "robkit/manifest.h"
#include "robkit/metrics.h"
#include "robkit/predictions.h"
#include "robkit/severity_params.h"
#include "robkit/version.h"

namespace py = pybind11;
using namespace robkit;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

ImageBuffer ArrayToImage(const FloatArray& arr) {
  const auto info = arr.request();
  ImageBuffer img;
  if (info.ndim == 2) {
    img.height = static_cast<int>(info.shape[0]);
    img.width = static_cast<int>(info.shape[1]);
    img.channels = 1;
  } else if (info.ndim == 3) {
    img.height = static_cast<int>(info.shape[0]);
    img.width = static_cast<int>(info.shape[1]);
    img.channels = static_cast<int>(info.shape[2]);
  } else {
    throw ValidationError("image array must be HxW or HxWxC");
  }
  if (img.channels != 1 && img.channels != 3) {
    throw ValidationError("image array must have 1 or 3 channels");
  }
  const float* data = static_cast<const float*>(info.ptr);
  img.pixels.assign(data, data + static_cast<size_t>(img.width) * img.height *
                              img.channels);
  return img;
}

py::array ImageToArray(const ImageBuffer& img, bool squeeze) {
  if (img.channels == 1 && squeeze) {
    FloatArray out({static_cast<py::ssize_t>(img.height),
                    static_cast<py::ssize_t>(img.width)});
    std::copy(img.pixels.begin(), img.pixels.end(),
              static_cast<float*>(out.request().ptr));
    return out;
  }
  FloatArray out({static_cast<py::ssize_t>(img.height),
                  static_cast<py::ssize_t>(img.width),
                  static_cast<py::ssize_t>(img.channels)});
  std::copy(img.pixels.begin(), img.pixels.end(),
            static_cast<float*>(out.request().ptr));
  return out;
}

py::dict MixResultToDict(const MixResult& result, bool squeeze) {
  py::dict out;
  out["image"] = ImageToArray(result.image, squeeze);
  out["label"] = result.label.weights;
  out["lambda"] = result.lambda;
  out["lambda_adjusted"] = result.lambda_adjusted;
  out["branch"] = result.branch == MixBranch::kCutmix ? "cutmix" : "mixup";
  if (result.box.has_value()) {
    out["box"] = py::make_tuple(result.box->x1, result.box->y1,
                                result.box->x2, result.box->y2);
  }
  return out;
}

MixOverrides MakeOverrides(std::optional<double> lambda_override,
                           std::optional<std::tuple<int, int, int, int>> box) {
  MixOverrides ov;
  ov.lambda = lambda_override;
  if (box.has_value()) {
    ov.box = Box{std::get<0>(*box), std::get<1>(*box), std::get<2>(*box),
                 std::get<3>(*box)};
  }
  return ov;
}

CorruptionErrorMatrix MatrixFromArray(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  const auto info = arr.request();
  if (info.ndim != 2) throw ValidationError("matrix must be 2-D");
  CorruptionErrorMatrix matrix;
  const auto rows = static_cast<size_t>(info.shape[0]);
  const auto cols = static_cast<size_t>(info.shape[1]);
  const double* data = static_cast<const double*>(info.ptr);
  for (size_t k = 0; k < rows; ++k) {
    matrix.kinds.push_back("kind_" + std::to_string(k));
    matrix.errors.emplace_back(data + k * cols, data + (k + 1) * cols);
  }
  for (size_t s = 0; s < cols; ++s) {
    matrix.severities.push_back(static_cast<int>(s) + 1);
  }
  return matrix;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dataset mixing and robustness benchmark toolkit";
  m.attr("__version__") = kToolkitVersion;

  py::register_exception<UsageError>(m, "UsageError");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<ClassDescriptor>(m, "ClassDescriptor")
      .def(py::init<>())
      .def_readwrite("index", &ClassDescriptor::index)
      .def_readwrite("key", &ClassDescriptor::key)
      .def_readwrite("display_name", &ClassDescriptor::display_name);

  py::class_<Geometry>(m, "Geometry")
      .def(py::init<>())
      .def_readwrite("width", &Geometry::width)
      .def_readwrite("height", &Geometry::height)
      .def_readwrite("channels", &Geometry::channels);

  py::class_<ItemRecord>(m, "ItemRecord")
      .def(py::init<>())
      .def_readwrite("id", &ItemRecord::id)
      .def_readwrite("path", &ItemRecord::path)
      .def_readwrite("label", &ItemRecord::label)
      .def_readwrite("provenance", &ItemRecord::provenance)
      .def_property(
          "source",
          [](const ItemRecord& r) { return SourceName(r.source); },
          [](ItemRecord& r, const std::string& s) {
            r.source = SourceFromName(s);
          });

  py::class_<DatasetManifest>(m, "DatasetManifest")
      .def(py::init<>())
      .def_readwrite("name", &DatasetManifest::name)
      .def_readwrite("root", &DatasetManifest::root)
      .def_readwrite("label_space", &DatasetManifest::label_space)
      .def_readwrite("items", &DatasetManifest::items)
      .def_readwrite("geometry", &DatasetManifest::geometry)
      .def("__len__", &DatasetManifest::size)
      .def("count_real",
           [](const DatasetManifest& m) { return m.CountBySource(Source::kReal); })
      .def("count_generated",
           [](const DatasetManifest& m) {
             return m.CountBySource(Source::kGenerated);
           })
      .def("per_class_counts", &DatasetManifest::PerClassCounts)
      .def("validate", &DatasetManifest::Validate);

  m.def(
      "load_manifest",
      [](const std::filesystem::path& path, bool validate_images) {
        return LoadManifest(path, validate_images ? ImageCheck::kDecode
                                                  : ImageCheck::kNone);
      },
      py::arg("path"), py::arg("validate_images") = false);
  m.def("save_manifest", &SaveManifest, py::arg("manifest"), py::arg("path"));

  m.def(
      "compute_channel_stats",
      [](const std::filesystem::path& manifest_path, int threads) {
        const DatasetManifest mf = LoadManifest(manifest_path);
        const ChannelStats stats = ComputeChannelStats(
            mf, ResolveRoot(mf, manifest_path), threads);
        return py::make_tuple(stats.mean, stats.std);
      },
      py::arg("manifest_path"), py::arg("threads") = 0);

  m.def("stratified_subset", &StratifiedSubset, py::arg("manifest"),
        py::arg("fraction"), py::arg("seed"), py::arg("stratify") = true);

  m.def(
      "mix_datasets",
      [](const DatasetManifest& real, const DatasetManifest& generated,
         std::optional<double> ratio, std::optional<int64_t> take,
         uint64_t seed) {
        if (ratio.has_value() == take.has_value()) {
          throw UsageError("pass exactly one of ratio= and take=");
        }
        const TakeSpec spec =
            ratio.has_value() ? TakeSpec::Ratio(*ratio) : TakeSpec::Count(*take);
        return MixDatasets(real, generated, spec, seed);
      },
      py::arg("real"), py::arg("generated"), py::arg("ratio") = std::nullopt,
      py::arg("take") = std::nullopt, py::arg("seed") = 0);

  m.def(
      "ingest_generated",
      [](const std::filesystem::path& dir,
         const std::vector<ClassDescriptor>& space, const std::string& name,
         const std::optional<std::filesystem::path>& labels) {
        IngestLabeling labeling;
        if (labels.has_value()) {
          labeling.mode = IngestLabeling::Mode::kMapFile;
          labeling.map_file = *labels;
        }
        return IngestGenerated(dir, labeling, space, name);
      },
      py::arg("image_dir"), py::arg("target_label_space"),
      py::arg("name") = "generated", py::arg("labels") = std::nullopt);

  // -- corruptions --
  m.def("corruption_kinds", [] {
    std::vector<std::string> names;
    for (const CorruptionKind kind : AllCorruptionKinds()) {
      names.emplace_back(KindName(kind));
    }
    return names;
  });
  m.def("kind_category", [](const std::string& kind) {
    switch (KindCategory(KindFromName(kind))) {
      case CorruptionCategory::kNoise: return "noise";
      case CorruptionCategory::kBlur: return "blur";
      case CorruptionCategory::kWeather: return "weather";
      default: return "digital";
    }
  });
  m.def("is_stochastic",
        [](const std::string& kind) { return IsStochastic(KindFromName(kind)); });

  m.def(
      "apply_corruption",
      [](const FloatArray& image, const std::string& kind, int severity,
         uint64_t seed, const std::optional<std::filesystem::path>& params) {
        const ImageBuffer img = ArrayToImage(image);
        CorruptionSpec spec;
        spec.kind = KindFromName(kind);
        spec.severity = severity;
        spec.seed = seed;
        SeverityTable table;
        CorruptionContext ctx;
        if (params.has_value()) {
          table = SeverityTable::FromFile(*params);
          ctx.table = &table;
        }
        const ImageBuffer out = ApplyCorruption(img, spec, ctx);
        return ImageToArray(out, image.request().ndim == 2);
      },
      py::arg("image"), py::arg("kind"), py::arg("severity"), py::arg("seed"),
      py::arg("params") = std::nullopt);

  m.def(
      "build_corrupted_testset",
      [](const std::filesystem::path& manifest_path, const std::string& profile,
         uint64_t seed, const std::filesystem::path& out, int threads) {
        const DatasetManifest mf = LoadManifest(manifest_path);
        const auto desc = BuildCorruptedTestset(
            mf, ResolveRoot(mf, manifest_path), ProfileFromName(profile), seed,
            out, threads);
        py::dict summary;
        summary["root"] = desc.root;
        summary["kinds"] = desc.kinds;
        summary["item_count"] = desc.item_count;
        summary["images"] = desc.item_count * desc.kinds.size() * 5;
        return summary;
      },
      py::arg("manifest_path"), py::arg("profile"), py::arg("seed"),
      py::arg("out"), py::arg("threads") = 0);

  // -- augmentation --
  m.def(
      "mixup",
      [](const FloatArray& a, int label_a, const FloatArray& b, int label_b,
         int num_classes, double alpha, uint64_t seed,
         std::optional<double> lambda_override) {
        const MixResult result =
            Mixup(ArrayToImage(a), label_a, ArrayToImage(b), label_b,
                  num_classes, alpha, seed,
                  MakeOverrides(lambda_override, std::nullopt));
        return MixResultToDict(result, a.request().ndim == 2);
      },
      py::arg("a"), py::arg("label_a"), py::arg("b"), py::arg("label_b"),
      py::arg("num_classes"), py::arg("alpha") = 0.8, py::arg("seed") = 0,
      py::arg("lambda_override") = std::nullopt);

  m.def(
      "cutmix",
      [](const FloatArray& a, int label_a, const FloatArray& b, int label_b,
         int num_classes, double alpha, uint64_t seed,
         std::optional<double> lambda_override,
         std::optional<std::tuple<int, int, int, int>> box) {
        const MixResult result =
            Cutmix(ArrayToImage(a), label_a, ArrayToImage(b), label_b,
                   num_classes, alpha, seed, MakeOverrides(lambda_override, box));
        return MixResultToDict(result, a.request().ndim == 2);
      },
      py::arg("a"), py::arg("label_a"), py::arg("b"), py::arg("label_b"),
      py::arg("num_classes"), py::arg("alpha") = 1.0, py::arg("seed") = 0,
      py::arg("lambda_override") = std::nullopt,
      py::arg("box") = std::nullopt);

  m.def(
      "cutmix_mixup_switch",
      [](const FloatArray& a, int label_a, const FloatArray& b, int label_b,
         int num_classes, double p_switch, double alpha_cutmix,
         double alpha_mixup, uint64_t seed) {
        const MixResult result = CutmixMixupSwitch(
            ArrayToImage(a), label_a, ArrayToImage(b), label_b, num_classes,
            p_switch, alpha_cutmix, alpha_mixup, seed);
        return MixResultToDict(result, a.request().ndim == 2);
      },
      py::arg("a"), py::arg("label_a"), py::arg("b"), py::arg("label_b"),
      py::arg("num_classes"), py::arg("p_switch") = 0.5,
      py::arg("alpha_cutmix") = 1.0, py::arg("alpha_mixup") = 0.8,
      py::arg("seed") = 0);

  m.def(
      "augmix",
      [](const FloatArray& image, uint64_t seed, int severity, int width,
         int depth, double dirichlet_alpha, double beta_alpha,
         std::optional<double> m_override) {
        AugmixConfig cfg;
        cfg.severity = severity;
        cfg.width = width;
        cfg.depth = depth;
        cfg.dirichlet_alpha = dirichlet_alpha;
        cfg.beta_alpha = beta_alpha;
        AugmixOverrides ov;
        ov.blend_m = m_override;
        const ImageBuffer out = Augmix(ArrayToImage(image), cfg, seed, ov);
        return ImageToArray(out, image.request().ndim == 2);
      },
      py::arg("image"), py::arg("seed"), py::arg("severity") = 3,
      py::arg("width") = 3, py::arg("depth") = 0,
      py::arg("dirichlet_alpha") = 1.0, py::arg("beta_alpha") = 1.0,
      py::arg("m_override") = std::nullopt);

  // -- metrics --
  m.def(
      "clean_error",
      [](const std::vector<int>& labels, const std::vector<int>& preds) {
        if (labels.size() != preds.size() || labels.empty()) {
          throw ValidationError("labels and preds must be equal-length, non-empty");
        }
        size_t correct = 0;
        for (size_t i = 0; i < labels.size(); ++i) {
          if (labels[i] == preds[i]) ++correct;
        }
        return 100.0 * (1.0 - static_cast<double>(correct) / labels.size());
      },
      py::arg("labels"), py::arg("preds"));

  m.def(
      "clean_error_files",
      [](const std::filesystem::path& manifest_path,
         const std::filesystem::path& preds_path) {
        return CleanError(LoadManifest(manifest_path),
                          LoadPredictions(preds_path));
      },
      py::arg("manifest_path"), py::arg("preds_path"));

  m.def(
      "mce",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             matrix) { return Mce(MatrixFromArray(matrix)); },
      py::arg("matrix"));

  m.def(
      "normalized_mce",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>&
             matrix,
         const py::array_t<double, py::array::c_style | py::array::forcecast>&
             baseline) {
        return NormalizedMce(MatrixFromArray(matrix),
                             MatrixFromArray(baseline));
      },
      py::arg("matrix"), py::arg("baseline"));

  m.def("format_signed_delta", &FormatSignedDelta, py::arg("delta"));

  m.def(
      "mean_attention_distance",
      [](const FloatArray& weights, int grid_rows, int grid_cols,
         int patch_size, bool cls_present) {
        const auto info = weights.request();
        if (info.ndim != 4) {
          throw ValidationError("weights must be [layers, heads, T, T]");
        }
        AttentionDump dump;
        dump.layers = static_cast<int>(info.shape[0]);
        dump.heads = static_cast<int>(info.shape[1]);
        dump.tokens = static_cast<int>(info.shape[2]);
        dump.grid_rows = grid_rows;
        dump.grid_cols = grid_cols;
        dump.patch_size = patch_size;
        dump.cls_present = cls_present;
        const float* data = static_cast<const float*>(info.ptr);
        const size_t per_layer =
            static_cast<size_t>(dump.heads) * dump.tokens * dump.tokens;
        for (int layer = 0; layer < dump.layers; ++layer) {
          dump.weights.emplace_back(data + layer * per_layer,
                                    data + (layer + 1) * per_layer);
        }
        const AttentionDistances dist = MeanAttentionDistance(dump);
        py::array_t<double> out({static_cast<py::ssize_t>(dump.layers),
                                 static_cast<py::ssize_t>(dump.heads)});
        double* optr = static_cast<double*>(out.request().ptr);
        for (int layer = 0; layer < dump.layers; ++layer) {
          for (int head = 0; head < dump.heads; ++head) {
            optr[layer * dump.heads + head] =
                dist.per_head[static_cast<size_t>(layer)]
                             [static_cast<size_t>(head)];
          }
        }
        return out;
      },
      py::arg("weights"), py::arg("grid_rows"), py::arg("grid_cols"),
      py::arg("patch_size"), py::arg("cls_present") = false);

  // -- builders --
  m.def(
      "intersect_classes",
      [](const std::vector<ClassDescriptor>& source,
         const std::vector<ClassDescriptor>& target) {
        const ClassIntersection inter = IntersectClasses(source, target);
        return inter.mapping;
      },
      py::arg("source_space"), py::arg("target_space"));
}
