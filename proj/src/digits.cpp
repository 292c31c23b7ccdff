#include "gcca/digits.hpp"

#include <algorithm>
#include <cmath>

#include "gcca/prng.hpp"

namespace gcca {

namespace {

struct Stroke {
  double row, col, sigma, amplitude;
};

// Smooth class template: a handful of Gaussian strokes on the canvas.
Mat class_template(int side, Prng& rng) {
  const int strokes = 4 + static_cast<int>(rng.below(3));
  std::vector<Stroke> parts(strokes);
  for (auto& s : parts) {
    s.row = rng.uniform(0.18, 0.82) * side;
    s.col = rng.uniform(0.18, 0.82) * side;
    s.sigma = rng.uniform(0.07, 0.16) * side;
    s.amplitude = rng.uniform(0.6, 1.0);
  }
  Mat img = Mat::Zero(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      double v = 0.0;
      for (const auto& s : parts) {
        const double dr = r - s.row;
        const double dc = c - s.col;
        v += s.amplitude * std::exp(-(dr * dr + dc * dc) / (2.0 * s.sigma * s.sigma));
      }
      img(r, c) = v;
    }
  const double peak = img.maxCoeff();
  if (peak > 0.0) img /= peak;
  return img;
}

Mat shifted(const Mat& img, int dr, int dc) {
  const int side = static_cast<int>(img.rows());
  Mat out = Mat::Zero(side, side);
  for (int r = 0; r < side; ++r) {
    const int sr = r - dr;
    if (sr < 0 || sr >= side) continue;
    for (int c = 0; c < side; ++c) {
      const int sc = c - dc;
      if (sc < 0 || sc >= side) continue;
      out(r, c) = img(sr, sc);
    }
  }
  return out;
}

}  // namespace

Dataset make_synthetic_digits(int classes, int per_class, std::uint64_t seed, int side) {
  if (classes < 1 || per_class < 1 || side < 4)
    throw Error("make_synthetic_digits: bad shape request");

  std::vector<Mat> templates;
  templates.reserve(classes);
  for (int c = 0; c < classes; ++c) {
    Prng class_rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(c + 1)));
    templates.push_back(class_template(side, class_rng));
  }

  Dataset out;
  out.data.resize(static_cast<Index>(side) * side, static_cast<Index>(classes) * per_class);
  out.labels.reserve(static_cast<std::size_t>(classes) * per_class);

  Prng rng(seed);
  Index column = 0;
  for (int c = 0; c < classes; ++c) {
    for (int s = 0; s < per_class; ++s, ++column) {
      const int dr = static_cast<int>(rng.below(5)) - 2;
      const int dc = static_cast<int>(rng.below(5)) - 2;
      const double amplitude = rng.uniform(0.75, 1.25);
      Mat img = amplitude * shifted(templates[c], dr, dc);
      for (int r = 0; r < side; ++r)
        for (int q = 0; q < side; ++q) {
          const double noisy = img(r, q) + 0.12 * rng.gaussian();
          out.data(static_cast<Index>(r) * side + q, column) = std::clamp(noisy, 0.0, 1.0);
        }
      out.labels.push_back(c);
    }
  }
  return out;
}

Mat block_downsample(const Mat& columns, int side, int out_side) {
  if (static_cast<Index>(side) * side != columns.rows())
    throw DimensionMismatchError("block_downsample: input is not " + std::to_string(side) + "x" +
                                 std::to_string(side));
  const int padded = 2 * out_side;
  if (padded < side)
    throw Error("block_downsample: output side " + std::to_string(out_side) +
                " too small for input side " + std::to_string(side));
  const int offset = (padded - side) / 2;

  Mat out(static_cast<Index>(out_side) * out_side, columns.cols());
  for (Index n = 0; n < columns.cols(); ++n) {
    for (int r = 0; r < out_side; ++r) {
      for (int c = 0; c < out_side; ++c) {
        double sum = 0.0;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const int pr = 2 * r + i - offset;
            const int pc = 2 * c + j - offset;
            if (pr >= 0 && pr < side && pc >= 0 && pc < side)
              sum += columns(static_cast<Index>(pr) * side + pc, n);
          }
        }
        out(static_cast<Index>(r) * out_side + c, n) = sum / 4.0;
      }
    }
  }
  return out;
}

}  // namespace gcca
