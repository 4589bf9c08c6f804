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

#include "robkit/dataset_ops.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "robkit/error.h"
#include "robkit/image.h"
#include "robkit/io_util.h"
#include "robkit/rng.h"
#include "robkit/thread_pool.h"

namespace robkit {

namespace fs = std::filesystem;

int64_t RoundHalfEven(double x) {
  const double f = std::floor(x);
  const double frac = x - f;
  const auto lo = static_cast<int64_t>(f);
  if (frac > 0.5) return lo + 1;
  if (frac < 0.5) return lo;
  return (lo % 2 == 0) ? lo : lo + 1;
}

namespace {

struct StatsPartial {
  double sum[3] = {0, 0, 0};
  double sumsq[3] = {0, 0, 0};
  uint64_t count = 0;  // pixels (not pixel-values)

  void Combine(const StatsPartial& o) {
    for (int c = 0; c < 3; ++c) {
      sum[c] += o.sum[c];
      sumsq[c] += o.sumsq[c];
    }
    count += o.count;
  }
};

// Fixed binary reduction over [lo, hi); the tree shape depends only on the
// index range, never on scheduling.
StatsPartial ReduceTree(const std::vector<StatsPartial>& parts, size_t lo,
                        size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const size_t mid = lo + (hi - lo) / 2;
  StatsPartial left = ReduceTree(parts, lo, mid);
  left.Combine(ReduceTree(parts, mid, hi));
  return left;
}

// Selects k of the indices in `pool` under rng; returned in pool order.
std::vector<size_t> SampleWithoutReplacement(std::vector<size_t> pool,
                                             size_t k, Rng& rng) {
  const size_t n = pool.size();
  for (size_t i = 0; i < k && i < n; ++i) {
    const size_t j =
        i + static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(n - i - 1)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(std::min(k, n));
  std::sort(pool.begin(), pool.end());
  return pool;
}

bool HasImageExtension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

ChannelStats ComputeChannelStats(const DatasetManifest& m,
                                 const fs::path& resolved_root, int threads) {
  if (m.items.empty()) {
    throw ValidationError("channel stats need at least one item");
  }
  const int channels = m.geometry.channels;
  std::vector<StatsPartial> parts(m.items.size());
  ParallelFor(m.items.size(), threads, [&](size_t i) {
    const ImageBuffer img =
        LoadImage(ItemImagePath(m, resolved_root, m.items[i]));
    if (img.channels != channels) {
      throw ValidationError("item \"" + m.items[i].id +
                            "\" channel count differs from manifest geometry");
    }
    StatsPartial p;
    const size_t npx = static_cast<size_t>(img.width) * img.height;
    for (size_t px = 0; px < npx; ++px) {
      for (int c = 0; c < channels; ++c) {
        const double v = img.pixels[px * channels + c];
        p.sum[c] += v;
        p.sumsq[c] += v * v;
      }
    }
    p.count = npx;
    parts[i] = p;
  });
  const StatsPartial total = ReduceTree(parts, 0, parts.size());
  ChannelStats stats;
  stats.mean.resize(channels);
  stats.std.resize(channels);
  const double n = static_cast<double>(total.count);
  for (int c = 0; c < channels; ++c) {
    const double mean = total.sum[c] / n;
    const double var = std::max(0.0, total.sumsq[c] / n - mean * mean);
    stats.mean[c] = mean;
    stats.std[c] = std::sqrt(var);
  }
  return stats;
}

DatasetManifest StratifiedSubset(const DatasetManifest& m, double fraction,
                                 uint64_t seed, bool stratify) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ValidationError("fraction must lie in (0, 1]");
  }
  m.Validate();
  std::vector<size_t> keep;
  if (stratify) {
    std::vector<std::vector<size_t>> per_class(m.label_space.size());
    for (size_t i = 0; i < m.items.size(); ++i) {
      per_class[static_cast<size_t>(m.items[i].label)].push_back(i);
    }
    for (size_t c = 0; c < per_class.size(); ++c) {
      const auto& pool = per_class[c];
      if (pool.empty()) continue;
      const int64_t k = RoundHalfEven(fraction * static_cast<double>(pool.size()));
      if (k <= 0) {
        throw ValidationError("fraction " + std::to_string(fraction) +
                              " empties class \"" + m.label_space[c].key +
                              "\" (" + std::to_string(pool.size()) + " items)");
      }
      Rng rng(Hash64().U64(seed).Str("subset").Str(m.label_space[c].key).Digest());
      const auto chosen =
          SampleWithoutReplacement(pool, static_cast<size_t>(k), rng);
      keep.insert(keep.end(), chosen.begin(), chosen.end());
    }
  } else {
    const int64_t k = RoundHalfEven(fraction * static_cast<double>(m.items.size()));
    if (k <= 0 && !m.items.empty()) {
      throw ValidationError("fraction empties the dataset");
    }
    std::vector<size_t> pool(m.items.size());
    for (size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    Rng rng(Hash64().U64(seed).Str("subset-flat").Digest());
    keep = SampleWithoutReplacement(std::move(pool), static_cast<size_t>(k), rng);
  }
  std::sort(keep.begin(), keep.end());
  DatasetManifest out;
  out.name = m.name + "_subset";
  out.root = m.root;
  out.label_space = m.label_space;
  out.geometry = m.geometry;
  out.items.reserve(keep.size());
  for (const size_t i : keep) out.items.push_back(m.items[i]);
  return out;
}

DatasetManifest IngestGenerated(const fs::path& image_dir,
                                const IngestLabeling& labeling,
                                const std::vector<ClassDescriptor>& target_space,
                                const std::string& name) {
  if (!fs::exists(image_dir) || !fs::is_directory(image_dir)) {
    throw IoError("image directory does not exist: " + image_dir.string());
  }
  std::unordered_map<std::string, int> key_to_index;
  for (const auto& cls : target_space) key_to_index[cls.key] = cls.index;

  // (relative path, class key), in a stable sorted order.
  std::vector<std::pair<std::string, std::string>> entries;
  if (labeling.mode == IngestLabeling::Mode::kMapFile) {
    std::istringstream in(ReadFileText(labeling.map_file));
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ValidationError("label map line " + std::to_string(line_no) +
                              " lacks a tab separator");
      }
      entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
  } else {
    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(image_dir)) {
      if (e.is_directory()) class_dirs.push_back(e.path());
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    for (const auto& dir : class_dirs) {
      const std::string key = dir.filename().string();
      std::vector<fs::path> files;
      for (const auto& f : fs::recursive_directory_iterator(dir)) {
        if (f.is_regular_file() && HasImageExtension(f.path())) {
          files.push_back(f.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        entries.emplace_back(fs::relative(f, image_dir).generic_string(), key);
      }
    }
  }

  DatasetManifest out;
  out.name = name;
  out.root = ".";
  out.label_space = target_space;
  out.geometry = Geometry{0, 0, 3};

  // Downstream-awareness check: reject before touching any pixels so a bad
  // key never yields a partial ingest.
  for (const auto& [rel, key] : entries) {
    if (!key_to_index.count(key)) {
      throw ValidationError("class key \"" + key +
                            "\" is not in the target label space (item " +
                            rel + ")");
    }
  }

  bool geometry_set = false;
  for (const auto& [rel, key] : entries) {
    ImageBuffer img;
    try {
      img = LoadImage(image_dir / rel);
    } catch (const IoError& e) {
      throw ValidationError("undecodable generated image \"" + rel +
                            "\": " + e.what());
    }
    if (!geometry_set) {
      out.geometry = Geometry{img.width, img.height, img.channels};
      geometry_set = true;
    } else if (img.width != out.geometry.width ||
               img.height != out.geometry.height ||
               img.channels != out.geometry.channels) {
      throw ValidationError("generated image \"" + rel +
                            "\" geometry differs from the first image");
    }
    ItemRecord item;
    item.id = rel;
    item.path = rel;
    item.label = key_to_index.at(key);
    item.source = Source::kGenerated;
    out.items.push_back(std::move(item));
  }
  out.Validate();
  return out;
}

DatasetManifest MixDatasets(const DatasetManifest& real,
                            const DatasetManifest& generated, TakeSpec take,
                            uint64_t seed,
                            const std::optional<MixPathContext>& paths) {
  real.Validate();
  generated.Validate();
  if (!SameLabelSpace(real.label_space, generated.label_space)) {
    throw ValidationError("label-space mismatch between real and generated");
  }
  if (generated.size() > 0 && !(real.geometry == generated.geometry)) {
    throw ValidationError("geometry mismatch between real and generated");
  }
  int64_t n_take = 0;
  if (take.count.has_value()) {
    n_take = *take.count;
  } else if (take.ratio.has_value()) {
    n_take = RoundHalfEven(*take.ratio * static_cast<double>(real.size()));
  } else {
    throw ValidationError("take must specify a count or a ratio");
  }
  if (n_take < 0) throw ValidationError("take must be non-negative");
  if (n_take > static_cast<int64_t>(generated.size())) {
    throw ValidationError("take (" + std::to_string(n_take) +
                          ") exceeds generated item count (" +
                          std::to_string(generated.size()) + ")");
  }

  // Class-stratified apportionment of n_take by largest remainder.
  const size_t k = real.label_space.size();
  std::vector<std::vector<size_t>> gen_per_class(k);
  for (size_t i = 0; i < generated.items.size(); ++i) {
    gen_per_class[static_cast<size_t>(generated.items[i].label)].push_back(i);
  }
  std::vector<size_t> quota(k, 0);
  if (n_take > 0) {
    const double n_gen = static_cast<double>(generated.size());
    std::vector<std::pair<double, size_t>> remainders;
    int64_t assigned = 0;
    for (size_t c = 0; c < k; ++c) {
      const double share = n_take * (gen_per_class[c].size() / n_gen);
      quota[c] = static_cast<size_t>(std::floor(share));
      assigned += static_cast<int64_t>(quota[c]);
      remainders.emplace_back(share - std::floor(share), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (size_t r = 0; assigned < n_take && r < remainders.size(); ++r) {
      const size_t c = remainders[r].second;
      if (quota[c] < gen_per_class[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    if (assigned != n_take) {
      // Remaining capacity exists because n_take <= N_gen; top up in order.
      for (size_t c = 0; c < k && assigned < n_take; ++c) {
        while (quota[c] < gen_per_class[c].size() && assigned < n_take) {
          ++quota[c];
          ++assigned;
        }
      }
    }
  }

  std::vector<size_t> chosen;
  for (size_t c = 0; c < k; ++c) {
    if (quota[c] == 0) continue;
    Rng rng(Hash64().U64(seed).Str("mix").Str(real.label_space[c].key).Digest());
    const auto picked =
        SampleWithoutReplacement(gen_per_class[c], quota[c], rng);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  std::sort(chosen.begin(), chosen.end());

  const bool same_root = real.root == generated.root && !paths.has_value();
  if (!same_root && !paths.has_value()) {
    throw ValidationError(
        "manifests have different roots; a MixPathContext is required");
  }

  auto rewrite = [&](const fs::path& in_root, const std::string& rel) {
    if (same_root) return rel;
    const fs::path abs = fs::weakly_canonical(in_root / rel);
    return fs::relative(abs, fs::weakly_canonical(paths->out_root))
        .generic_string();
  };

  DatasetManifest out;
  out.name = real.name + "_mix";
  out.root = same_root ? real.root : ".";
  out.label_space = real.label_space;
  out.geometry = real.geometry;
  out.items.reserve(real.size() + chosen.size());
  for (const auto& it : real.items) {
    ItemRecord r = it;
    r.id = "real:" + it.id;
    if (!same_root) r.path = rewrite(paths->real_root, it.path);
    out.items.push_back(std::move(r));
  }
  for (const size_t i : chosen) {
    ItemRecord r = generated.items[i];
    r.id = "gen:" + generated.items[i].id;
    if (!same_root) r.path = rewrite(paths->gen_root, generated.items[i].path);
    out.items.push_back(std::move(r));
  }
  out.Validate();
  return out;
}

}  // namespace robkit
