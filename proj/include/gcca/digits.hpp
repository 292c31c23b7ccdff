#pragma once

#include <cstdint>

#include "gcca/dataset.hpp"
#include "gcca/types.hpp"

namespace gcca {

/// Deterministic synthetic digit-style image set: each class is a smooth
/// template of Gaussian strokes on a side x side canvas, and every sample is
/// the template under a small shift, amplitude scaling and pixel noise, all
/// clamped to [0, 1]. Useful for desk-scale classification experiments when
/// no real image corpus is at hand.
Dataset make_synthetic_digits(int classes, int per_class, std::uint64_t seed, int side = 20);

/// Halves image resolution by 2x2 block averaging after padding the canvas
/// with a zero border so the output is out_side x out_side. With out_side 20
/// a 28x28 input is padded to 40x40 first, approximating a 20x20 resize while
/// keeping the full field of view.
Mat block_downsample(const Mat& columns, int side, int out_side);

}  // namespace gcca
