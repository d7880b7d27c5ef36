#include "smsd/patch_pipeline.hpp"

#include "smsd/error.hpp"
#include "smsd/persistence.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

namespace smsd {

PatchDataset PatchDataset::subset(const std::vector<Index>& indices) const {
  PatchDataset out;
  out.patch_size = patch_size;
  out.images = images;
  out.mean_removed = mean_removed;
  out.columns.resize(columns.rows(), static_cast<Index>(indices.size()));
  if (mean_removed) out.means.resize(static_cast<Index>(indices.size()));
  out.provenance.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Index src = indices[i];
    out.columns.col(static_cast<Index>(i)) = columns.col(src);
    if (mean_removed) out.means(static_cast<Index>(i)) = means(src);
    if (!provenance.empty()) out.provenance.push_back(provenance[static_cast<std::size_t>(src)]);
  }
  return out;
}

std::vector<Index> PatchDataset::columns_of_image(Index image_id) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < provenance.size(); ++i) {
    if (provenance[i].image_id == image_id) out.push_back(static_cast<Index>(i));
  }
  return out;
}

PatchDataset extract_patches(const GrayImage& image, const ExtractOptions& options,
                             std::mt19937_64& rng) {
  const Index ps = options.patch_size;
  if (ps < 1) throw InvalidInput("extract_patches: patch size must be >= 1");
  if (image.rows() < ps || image.cols() < ps) {
    throw InvalidInput("extract_patches: image " + std::to_string(image.rows()) + "x" +
                       std::to_string(image.cols()) + " is smaller than one " +
                       std::to_string(ps) + "x" + std::to_string(ps) + " patch");
  }
  const Index tiles_down = image.rows() / ps;
  const Index tiles_across = image.cols() / ps;
  std::vector<Index> tiles(static_cast<std::size_t>(tiles_down * tiles_across));
  std::iota(tiles.begin(), tiles.end(), 0);

  if (options.samples_per_image) {
    const Index want = *options.samples_per_image;
    if (want < 0) throw InvalidInput("extract_patches: negative sample count");
    if (want < static_cast<Index>(tiles.size())) {
      std::shuffle(tiles.begin(), tiles.end(), rng);
      tiles.resize(static_cast<std::size_t>(want));
      std::sort(tiles.begin(), tiles.end());
    }
  }

  PatchDataset ds;
  ds.patch_size = ps;
  ds.images.push_back({options.image_id, options.image_name, image.rows(), image.cols()});
  ds.columns.resize(ps * ps, static_cast<Index>(tiles.size()));
  ds.provenance.reserve(tiles.size());
  // Tiles are enumerated column-of-tiles first, matching the in-patch order.
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    const Index row = (tiles[k] % tiles_down) * ps;
    const Index col = (tiles[k] / tiles_down) * ps;
    for (Index c = 0; c < ps; ++c) {
      ds.columns.col(static_cast<Index>(k)).segment(c * ps, ps) =
          image.col(col + c).segment(row, ps);
    }
    ds.provenance.push_back({options.image_id, row, col});
  }
  if (options.mean_removal) {
    ds.mean_removed = true;
    ds.means = ds.columns.colwise().mean().transpose();
    ds.columns.rowwise() -= ds.means.transpose();
  }
  return ds;
}

void append_dataset(PatchDataset& into, const PatchDataset& other) {
  if (into.columns.size() == 0 && into.images.empty()) {
    into = other;
    return;
  }
  if (into.patch_size != other.patch_size || into.mean_removed != other.mean_removed) {
    throw InvalidInput("append_dataset: incompatible datasets");
  }
  Index next_id = 0;
  for (const auto& info : into.images) next_id = std::max(next_id, info.id + 1);
  std::vector<std::pair<Index, Index>> remap;
  for (const auto& info : other.images) {
    ImageInfo copy = info;
    copy.id = next_id++;
    remap.emplace_back(info.id, copy.id);
    into.images.push_back(copy);
  }
  auto mapped = [&](Index id) {
    for (auto [from, to] : remap) {
      if (from == id) return to;
    }
    throw InvalidInput("append_dataset: provenance references unknown image");
  };
  const Index old = into.columns.cols();
  into.columns.conservativeResize(other.columns.rows(), old + other.columns.cols());
  into.columns.rightCols(other.columns.cols()) = other.columns;
  if (into.mean_removed) {
    into.means.conservativeResize(old + other.means.size());
    into.means.tail(other.means.size()) = other.means;
  }
  for (const auto& p : other.provenance) {
    into.provenance.push_back({mapped(p.image_id), p.row, p.col});
  }
}

GrayImage assemble_patches(const PatchDataset& layout, const Matrix& patches,
                           Index image_id) {
  const Index ps = layout.patch_size;
  if (patches.rows() != ps * ps || patches.cols() != layout.patch_count()) {
    throw InvalidInput("assemble_patches: patch matrix does not match the layout");
  }
  const auto info = std::find_if(layout.images.begin(), layout.images.end(),
                                 [&](const ImageInfo& i) { return i.id == image_id; });
  if (info == layout.images.end()) {
    throw InvalidInput("assemble_patches: unknown image id " + std::to_string(image_id));
  }
  const Index tiles_down = info->height / ps;
  const Index tiles_across = info->width / ps;
  GrayImage out = GrayImage::Zero(tiles_down * ps, tiles_across * ps);
  std::vector<char> seen(static_cast<std::size_t>(tiles_down * tiles_across), 0);

  for (std::size_t k = 0; k < layout.provenance.size(); ++k) {
    const PatchOrigin& p = layout.provenance[k];
    if (p.image_id != image_id) continue;
    if (p.row % ps || p.col % ps || p.row / ps >= tiles_down || p.col / ps >= tiles_across) {
      throw InvalidInput("assemble_patches: patch origin is off the tiling grid");
    }
    const double mean = layout.mean_removed ? layout.means(static_cast<Index>(k)) : 0.0;
    for (Index c = 0; c < ps; ++c) {
      out.col(p.col + c).segment(p.row, ps) =
          patches.col(static_cast<Index>(k)).segment(c * ps, ps).array() + mean;
    }
    seen[static_cast<std::size_t>((p.col / ps) * tiles_down + p.row / ps)] = 1;
  }

  std::vector<MissingPatchError::Gap> gaps;
  for (Index tc = 0; tc < tiles_across; ++tc) {
    for (Index tr = 0; tr < tiles_down; ++tr) {
      if (!seen[static_cast<std::size_t>(tc * tiles_down + tr)]) gaps.push_back({tr * ps, tc * ps});
    }
  }
  if (!gaps.empty()) {
    std::string what = "assemble_patches: " + std::to_string(gaps.size()) +
                       " missing patches, first at (" + std::to_string(gaps[0].row) +
                       ", " + std::to_string(gaps[0].col) + ")";
    throw MissingPatchError(std::move(gaps), what);
  }
  return out.cwiseMax(0.0).cwiseMin(255.0);
}

BatchIterator::BatchIterator(Index column_count, Index eta, std::mt19937_64& rng)
    : rng_(&rng), eta_(eta) {
  if (eta < 1) throw InvalidConfig("batch size must be >= 1");
  if (eta > column_count) {
    throw InvalidConfig("batch size " + std::to_string(eta) + " exceeds the " +
                        std::to_string(column_count) + " available columns");
  }
  order_.resize(static_cast<std::size_t>(column_count));
  std::iota(order_.begin(), order_.end(), 0);
  reshuffle();
}

void BatchIterator::reshuffle() {
  std::shuffle(order_.begin(), order_.end(), *rng_);
  cursor_ = 0;
  ++epoch_;
}

const std::vector<Index>& BatchIterator::next() {
  if (cursor_ + eta_ > static_cast<Index>(order_.size())) reshuffle();
  batch_.assign(order_.begin() + cursor_, order_.begin() + cursor_ + eta_);
  cursor_ += eta_;
  return batch_;
}

Matrix BatchIterator::gather(const Matrix& data, const std::vector<Index>& indices) {
  Matrix out(data.rows(), static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.col(static_cast<Index>(i)) = data.col(indices[i]);
  }
  return out;
}

void save_dataset(const PatchDataset& dataset, const std::filesystem::path& path) {
  save_matrix(dataset.columns, path);
  nlohmann::json j;
  j["patchSize"] = dataset.patch_size;
  j["meanRemoved"] = dataset.mean_removed;
  j["images"] = nlohmann::json::array();
  for (const auto& info : dataset.images) {
    j["images"].push_back(
        {{"id", info.id}, {"name", info.name}, {"height", info.height}, {"width", info.width}});
  }
  auto& prov = j["provenance"] = nlohmann::json::array();
  for (const auto& p : dataset.provenance) prov.push_back({p.image_id, p.row, p.col});
  if (dataset.mean_removed) {
    j["means"] = std::vector<double>(dataset.means.data(),
                                     dataset.means.data() + dataset.means.size());
  }
  std::ofstream out(path.string() + ".json", std::ios::trunc);
  if (!out) throw IoError("cannot write provenance sidecar for " + path.string());
  out << j.dump();
}

PatchDataset load_dataset(const std::filesystem::path& path) {
  PatchDataset ds;
  ds.columns = load_matrix(path);
  const std::filesystem::path sidecar = path.string() + ".json";
  std::ifstream in(sidecar);
  if (!in) {
    // Bare matrix: no provenance, square patches assumed.
    Index ps = 1;
    while ((ps + 1) * (ps + 1) <= ds.columns.rows()) ++ps;
    ds.patch_size = ps;
    return ds;
  }
  try {
    const auto j = nlohmann::json::parse(in);
    ds.patch_size = j.at("patchSize").get<Index>();
    ds.mean_removed = j.at("meanRemoved").get<bool>();
    for (const auto& img : j.at("images")) {
      ds.images.push_back({img.at("id").get<Index>(), img.at("name").get<std::string>(),
                           img.at("height").get<Index>(), img.at("width").get<Index>()});
    }
    for (const auto& p : j.at("provenance")) {
      ds.provenance.push_back({p.at(0).get<Index>(), p.at(1).get<Index>(), p.at(2).get<Index>()});
    }
    if (ds.mean_removed) {
      const auto means = j.at("means").get<std::vector<double>>();
      ds.means = Eigen::Map<const Vector>(means.data(), static_cast<Index>(means.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(0, "bad provenance sidecar " + sidecar.string() + ": " + e.what());
  }
  if (ds.patch_size * ds.patch_size != ds.columns.rows() ||
      (!ds.provenance.empty() &&
       static_cast<Index>(ds.provenance.size()) != ds.columns.cols())) {
    throw FormatError(0, "provenance sidecar does not match " + path.string());
  }
  return ds;
}

}  // namespace smsd
