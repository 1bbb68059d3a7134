// Dumps the sparse oracle instances as JSON for sparse_oracle.py.
#include <iostream>

#include "json.hpp"
#include "oracles/sparse_instances.hpp"

int main() {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < oracle::kSparseInstanceCount; ++i) {
    const auto inst = oracle::sparse_instance(i);
    const auto basis = rrseg::make_dct_basis(inst.block.width, inst.k);
    std::vector<std::vector<double>> design(basis.design().rows(), std::vector<double>(inst.k));
    for (Eigen::Index r = 0; r < basis.design().rows(); ++r) {
      for (int c = 0; c < inst.k; ++c) design[r][c] = basis.design()(r, c);
    }
    out.push_back({{"index", i},
                   {"n", inst.block.width},
                   {"k", inst.k},
                   {"epsilon", inst.epsilon},
                   {"spike", inst.spike},
                   {"pixels", inst.block.pixels},
                   {"design", design}});
  }
  std::cout << out.dump() << '\n';
}
