#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gcca/errors.hpp"
#include "gcca/types.hpp"

namespace gcca {

struct Dataset {
  Mat data;  // features x samples
  std::vector<int> labels;

  bool has_labels() const { return !labels.empty(); }
};

struct CsvLayout {
  bool rows_are_samples = false;  // transpose on load so samples end up in columns
  bool labels_inline = false;     // final column holds integer class ids
};

/// Rectangular numeric CSV. Throws ParseError with the offending line/column
/// and RaggedRowsError when row lengths disagree.
Dataset load_csv(std::istream& in, const CsvLayout& layout = {});
Dataset load_csv(const std::string& path, const CsvLayout& layout = {});

/// Writes with 17 significant digits; samples as rows when rows_are_samples.
void save_csv(std::ostream& out, const Mat& data, const CsvLayout& layout = {},
              const std::vector<int>* labels = nullptr);
void save_csv(const std::string& path, const Mat& data, const CsvLayout& layout = {},
              const std::vector<int>* labels = nullptr);

/// IDX image container (magic 0x00000803, big-endian dims). Pixels scaled by
/// 1/255, each image flattened row-major into one column.
Mat load_idx_images(const std::string& path, int* rows_out = nullptr, int* cols_out = nullptr);

/// IDX label container (magic 0x00000801).
std::vector<int> load_idx_labels(const std::string& path);

/// Image/label pair with a count consistency check.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writers for fixture generation; pixels are clamped to [0, 1] and quantized
// back to bytes.
void save_idx_images(const std::string& path, const Mat& columns, int rows, int cols);
void save_idx_labels(const std::string& path, const std::vector<int>& labels);

}  // namespace gcca
