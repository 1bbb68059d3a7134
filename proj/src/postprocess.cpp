#include "rrseg/postprocess.hpp"

#include <algorithm>
#include <numeric>

#include "rrseg/error.hpp"

namespace rrseg {

std::vector<Component> label_components(const SegMask& mask, std::vector<int>* labels) {
  std::vector<int> local;
  std::vector<int>& label = labels ? *labels : local;
  label.assign(mask.bits.size(), 0);

  std::vector<Component> out;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.bits.size(); ++start) {
    if (!mask.bits[start] || label[start]) continue;
    const int id = static_cast<int>(out.size()) + 1;
    Component comp{start, 0};
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++comp.size;
      const int row = static_cast<int>(p / static_cast<std::size_t>(mask.width));
      const int col = static_cast<int>(p % static_cast<std::size_t>(mask.width));
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int r = row + dr;
          const int c = col + dc;
          if (r < 0 || c < 0 || r >= mask.height || c >= mask.width) continue;
          const std::size_t q = static_cast<std::size_t>(r) * mask.width + c;
          if (mask.bits[q] && !label[q]) {
            label[q] = id;
            stack.push_back(q);
          }
        }
      }
    }
    out.push_back(comp);
  }
  return out;
}

SegMask postprocess_largest_components(const SegMask& mask, int keep) {
  require(keep >= 1, "must keep at least one component");
  std::vector<int> labels;
  const auto comps = label_components(mask, &labels);

  std::vector<std::size_t> order(comps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return comps[a].size > comps[b].size; });

  std::vector<std::uint8_t> kept(comps.size() + 1, 0);
  for (std::size_t i = 0; i < order.size() && i < static_cast<std::size_t>(keep); ++i) kept[order[i] + 1] = 1;

  SegMask out(mask.width, mask.height);
  for (std::size_t i = 0; i < labels.size(); ++i) out.bits[i] = kept[static_cast<std::size_t>(labels[i])];
  return out;
}

}  // namespace rrseg
