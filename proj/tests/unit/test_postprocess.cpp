#include "doctest.h"
#include "rrseg/error.hpp"
#include "rrseg/postprocess.hpp"

using namespace rrseg;

namespace {

void fill_rect(SegMask& m, int row, int col, int h, int w) {
  for (int r = row; r < row + h; ++r) {
    for (int c = col; c < col + w; ++c) m.set(r, c, true);
  }
}

}  // namespace

TEST_CASE("single component is unchanged") {
  SegMask m(20, 20);
  fill_rect(m, 2, 3, 5, 6);
  CHECK(postprocess_largest_components(m, 1) == m);
}

TEST_CASE("sizes {50, 3} with keep=1 keeps the 50-pixel component") {
  SegMask m(30, 20);
  fill_rect(m, 1, 1, 5, 10);
  fill_rect(m, 15, 20, 1, 3);
  const auto out = postprocess_largest_components(m, 1);
  CHECK(out.foreground_count() == 50);
  CHECK(out.at(1, 1));
  CHECK_FALSE(out.at(15, 20));
}

TEST_CASE("empty mask stays empty") {
  const SegMask m(10, 7);
  CHECK(postprocess_largest_components(m, 3) == m);
}

TEST_CASE("8-connectivity joins diagonal neighbors") {
  SegMask m(5, 5);
  m.set(0, 0, true);
  m.set(1, 1, true);
  m.set(2, 2, true);
  m.set(4, 0, true);
  const auto comps = label_components(m);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].size == 3);
  CHECK(comps[0].anchor == 0);
  CHECK(comps[1].size == 1);
}

TEST_CASE("ties go to the earlier raster anchor") {
  SegMask m(10, 10);
  fill_rect(m, 0, 6, 2, 2);  // anchor 6
  fill_rect(m, 5, 0, 2, 2);  // anchor 50
  fill_rect(m, 0, 0, 2, 2);  // anchor 0
  const auto out = postprocess_largest_components(m, 2);
  CHECK(out.at(0, 0));
  CHECK(out.at(0, 6));
  CHECK_FALSE(out.at(5, 0));
}

TEST_CASE("keep below one is a parameter error") {
  CHECK_THROWS_AS(postprocess_largest_components(SegMask(2, 2), 0), Error);
}

TEST_CASE("labels cover exactly the foreground") {
  SegMask m(16, 9);
  for (int i = 0; i < 144; i += 5) m.bits[static_cast<std::size_t>(i)] = 1;
  std::vector<int> labels;
  const auto comps = label_components(m, &labels);
  std::size_t total = 0;
  for (const auto& c : comps) total += c.size;
  CHECK(total == m.foreground_count());
  for (std::size_t i = 0; i < labels.size(); ++i) CHECK((labels[i] > 0) == (m.bits[i] == 1));
}
