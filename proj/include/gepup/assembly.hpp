#pragma once

#include <vector>

#include "gepup/fe_space.hpp"
#include "gepup/sparse.hpp"

namespace gepup {

/// Sparsity pattern coupling every pair of DoFs that share an element.
CsrMatrix make_sparsity(const FeSpace& space);

/// Element mass and stiffness matrices (row-major n_local x n_local). All
/// cells of a structured mesh are congruent, so one pair serves every element.
std::vector<double> element_mass(const FeSpace& space);
std::vector<double> element_stiffness(const FeSpace& space);

/// m_ij = (eta_i, eta_j)
CsrMatrix assemble_mass(const FeSpace& space);
/// a_ij = (grad eta_i, grad eta_j)
CsrMatrix assemble_stiffness(const FeSpace& space);

}  // namespace gepup
