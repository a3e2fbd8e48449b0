// Builds the Z2 diagonal example through the library API and prints its
// standard-invariant rows and the index of C ⊂ M_2.

#include "kacsub/kacsub.hpp"

#include <cstdio>

int main() {
  using namespace kacsub;
  auto a = group_algebra(cyclic_group(2));
  Corepresentation v = diagonal_corep(a, {unit_vector(2, 0), unit_vector(2, 1)}, "v");
  CoactionMap beta = t_iota_v(v);
  auto m2 = beta.target;
  InclusionData d = inclusion_data(SubalgebraEmbedding{matrix_algebra(1), m2, Mat(m2->unit())});

  IntegralityResult ir = integrality_check(d);
  std::printf("markov index %.12f, %s\n", markov_index(d).value, to_string(ir.status));

  InvariantLattice lat = standard_invariant(d, beta, 2);
  for (Index i = 0; i <= lat.depth; ++i) {
    std::printf("row %ld:", static_cast<long>(i));
    for (Index n : lat.row_dims(i)) std::printf(" %ld", static_cast<long>(n));
    std::printf("\n");
  }
  return lat.report.pass() ? 0 : 1;
}
