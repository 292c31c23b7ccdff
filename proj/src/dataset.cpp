#include "gcca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gcca/format.hpp"

namespace gcca {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

double parse_cell(const std::string& cell, long line, long column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end != begin + cell.size() && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || end != begin + cell.size())
    throw ParseError("bad numeric cell '" + cell + "'", line, column);
  return v;
}

}  // namespace

Dataset load_csv(std::istream& in, const CsvLayout& layout) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream stream(line);
    std::string cell;
    long column = 0;
    while (std::getline(stream, cell, ',')) {
      ++column;
      row.push_back(parse_cell(cell, line_no, column));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw RaggedRowsError("line " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty CSV", 1, 1);

  Mat table(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < table.rows(); ++r)
    for (Index c = 0; c < table.cols(); ++c) table(r, c) = rows[r][c];

  Dataset out;
  // Internal layout keeps samples in columns.
  Mat columns = layout.rows_are_samples ? Mat(table.transpose()) : table;
  if (layout.labels_inline) {
    if (columns.rows() < 2) throw ParseError("labels-inline CSV needs at least two fields", 1, 1);
    // The label field travels with the sample, i.e. the last row after the
    // samples-in-columns normalization.
    const Vec label_row = columns.row(columns.rows() - 1);
    out.labels.resize(columns.cols());
    for (Index j = 0; j < columns.cols(); ++j) {
      const double v = label_row(j);
      if (v != std::floor(v))
        throw ParseError("label '" + fmt_g17(v) + "' is not an integer", j + 1,
                         layout.rows_are_samples ? table.cols() : j + 1);
      out.labels[j] = static_cast<int>(v);
    }
    out.data = columns.topRows(columns.rows() - 1);
  } else {
    out.data = columns;
  }
  return out;
}

Dataset load_csv(const std::string& path, const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_csv(in, layout);
}

void save_csv(std::ostream& out, const Mat& data, const CsvLayout& layout,
              const std::vector<int>* labels) {
  if (labels && static_cast<Index>(labels->size()) != data.cols())
    throw CountMismatchError("save_csv: " + std::to_string(labels->size()) + " labels for " +
                             std::to_string(data.cols()) + " samples");
  if (layout.rows_are_samples) {
    for (Index j = 0; j < data.cols(); ++j) {
      for (Index i = 0; i < data.rows(); ++i) out << (i ? "," : "") << fmt_g17(data(i, j));
      if (labels) out << "," << (*labels)[j];
      out << "\n";
    }
  } else {
    for (Index i = 0; i < data.rows(); ++i) {
      for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << fmt_g17(data(i, j));
      out << "\n";
    }
    if (labels) {
      for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << (*labels)[j];
      out << "\n";
    }
  }
}

void save_csv(const std::string& path, const Mat& data, const CsvLayout& layout,
              const std::vector<int>* labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  save_csv(out, data, layout, labels);
}

namespace {

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw TruncatedFileError(path + ": truncated header");
  return (static_cast<std::uint32_t>(bytes[0]) << 24) | (static_cast<std::uint32_t>(bytes[1]) << 16) |
         (static_cast<std::uint32_t>(bytes[2]) << 8) | static_cast<std::uint32_t>(bytes[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Mat load_idx_images(const std::string& path, int* rows_out, int* cols_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::uint32_t magic = read_u32_be(in, path);
  if (magic != kImagesMagic)
    throw BadMagicError(path + ": magic " + std::to_string(magic) + " is not an IDX image file");
  const std::uint32_t count = read_u32_be(in, path);
  const std::uint32_t rows = read_u32_be(in, path);
  const std::uint32_t cols = read_u32_be(in, path);

  const std::size_t pixels = static_cast<std::size_t>(count) * rows * cols;
  std::vector<unsigned char> raw(pixels);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels)))
    throw TruncatedFileError(path + ": expected " + std::to_string(pixels) + " pixels");

  Mat out(static_cast<Index>(rows) * cols, static_cast<Index>(count));
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::size_t base = static_cast<std::size_t>(n) * rows * cols;
    for (std::uint32_t p = 0; p < rows * cols; ++p)
      out(static_cast<Index>(p), static_cast<Index>(n)) = raw[base + p] / 255.0;
  }
  if (rows_out) *rows_out = static_cast<int>(rows);
  if (cols_out) *cols_out = static_cast<int>(cols);
  return out;
}

std::vector<int> load_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::uint32_t magic = read_u32_be(in, path);
  if (magic != kLabelsMagic)
    throw BadMagicError(path + ": magic " + std::to_string(magic) + " is not an IDX label file");
  const std::uint32_t count = read_u32_be(in, path);
  std::vector<unsigned char> raw(count);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count)))
    throw TruncatedFileError(path + ": expected " + std::to_string(count) + " labels");
  return std::vector<int>(raw.begin(), raw.end());
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  Dataset out;
  out.data = load_idx_images(images_path);
  out.labels = load_idx_labels(labels_path);
  if (static_cast<Index>(out.labels.size()) != out.data.cols())
    throw CountMismatchError(labels_path + ": " + std::to_string(out.labels.size()) +
                             " labels for " + std::to_string(out.data.cols()) + " images");
  return out;
}

void save_idx_images(const std::string& path, const Mat& columns, int rows, int cols) {
  if (static_cast<Index>(rows) * cols != columns.rows())
    throw DimensionMismatchError("save_idx_images: " + std::to_string(rows) + "x" +
                                 std::to_string(cols) + " does not match " +
                                 std::to_string(columns.rows()) + " pixels per column");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_u32_be(out, kImagesMagic);
  write_u32_be(out, static_cast<std::uint32_t>(columns.cols()));
  write_u32_be(out, static_cast<std::uint32_t>(rows));
  write_u32_be(out, static_cast<std::uint32_t>(cols));
  for (Index n = 0; n < columns.cols(); ++n) {
    for (Index p = 0; p < columns.rows(); ++p) {
      const double v = std::clamp(columns(p, n), 0.0, 1.0);
      const unsigned char byte = static_cast<unsigned char>(std::lround(v * 255.0));
      out.write(reinterpret_cast<const char*>(&byte), 1);
    }
  }
  if (!out) throw IoError("write to " + path + " failed");
}

void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_u32_be(out, kLabelsMagic);
  write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  for (int label : labels) {
    const unsigned char byte = static_cast<unsigned char>(label);
    out.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace gcca
