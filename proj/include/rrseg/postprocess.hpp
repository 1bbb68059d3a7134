#pragma once

#include <vector>

#include "rrseg/image.hpp"

namespace rrseg {

struct Component {
  /// Raster index of the first pixel met in raster order.
  std::size_t anchor = 0;
  std::size_t size = 0;
};

/// 8-connected foreground components, in order of their anchors.
/// `labels` (if given) receives component index + 1 per pixel, 0 for background.
std::vector<Component> label_components(const SegMask& mask, std::vector<int>* labels = nullptr);

/// Keeps the `keep` largest 8-connected components (ties go to the earlier
/// anchor) and clears every other foreground pixel.
SegMask postprocess_largest_components(const SegMask& mask, int keep);

}  // namespace rrseg
