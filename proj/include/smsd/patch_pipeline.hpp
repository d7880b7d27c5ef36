#pragma once

#include "smsd/core_model.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace smsd {

/// Grayscale image, rows = height, cols = width, intensities on 0..255.
using GrayImage = Matrix;

struct PatchOrigin {
  Index image_id = 0;
  Index row = 0;  // top-left pixel of the patch
  Index col = 0;
};

struct ImageInfo {
  Index id = 0;
  std::string name;
  Index height = 0;
  Index width = 0;
};

/// Vectorized patches, one per column. Within a patch, pixels are stacked
/// column-major: element (r, c) of the patch is entry r + c * patch_size.
struct PatchDataset {
  Matrix columns;
  Index patch_size = 8;
  std::vector<PatchOrigin> provenance;
  std::vector<ImageInfo> images;
  bool mean_removed = false;
  Vector means;  // per patch, present when mean_removed

  Index patch_count() const noexcept { return columns.cols(); }
  Index signal_dim() const noexcept { return columns.rows(); }
  /// Dataset restricted to the given column indices (images list is kept).
  PatchDataset subset(const std::vector<Index>& indices) const;
  /// Column indices whose provenance points at `image_id`.
  std::vector<Index> columns_of_image(Index image_id) const;
};

struct ExtractOptions {
  Index patch_size = 8;
  std::optional<Index> samples_per_image;
  bool mean_removal = false;
  Index image_id = 0;
  std::string image_name;
};

/// Non-overlapping tiling; right/bottom remainders are discarded. With
/// samples_per_image, that many tiles are drawn without replacement.
PatchDataset extract_patches(const GrayImage& image, const ExtractOptions& options,
                             std::mt19937_64& rng);

/// Appends `other` to `into`, renumbering image ids to stay unique.
void append_dataset(PatchDataset& into, const PatchDataset& other);

/// Rebuilds the tiled region of one image from `patches` (same layout as
/// `layout.columns`). Means are re-added when the layout is mean-removed and
/// pixels are clamped to [0, 255]. Throws MissingPatchError when the tiling is
/// incomplete.
GrayImage assemble_patches(const PatchDataset& layout, const Matrix& patches,
                           Index image_id);
inline GrayImage assemble_patches(const PatchDataset& dataset, Index image_id) {
  return assemble_patches(dataset, dataset.columns, image_id);
}

/// Cycles over a random permutation of the columns in contiguous slices of
/// eta; when fewer than eta columns remain, the order is reshuffled and the
/// short tail is skipped.
class BatchIterator {
 public:
  BatchIterator(Index column_count, Index eta, std::mt19937_64& rng);

  /// Column indices of the next batch.
  const std::vector<Index>& next();
  Index epoch() const noexcept { return epoch_; }
  Index eta() const noexcept { return eta_; }

  static Matrix gather(const Matrix& data, const std::vector<Index>& indices);

 private:
  void reshuffle();

  std::mt19937_64* rng_;
  std::vector<Index> order_;
  std::vector<Index> batch_;
  Index eta_;
  Index cursor_ = 0;
  Index epoch_ = 0;
};

/// Corpus file (matrix format) plus "<path>.json" provenance sidecar.
void save_dataset(const PatchDataset& dataset, const std::filesystem::path& path);
PatchDataset load_dataset(const std::filesystem::path& path);

}  // namespace smsd
