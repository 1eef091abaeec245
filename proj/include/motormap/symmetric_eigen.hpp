#pragma once

#include <vector>

#include "motormap/matrix.hpp"

namespace motormap {

/// Full eigendecomposition of a real symmetric matrix.
/// Eigenvalues are sorted descending, ties broken by solver output order;
/// eigenvectors(i, j) is component i of the eigenvector for values[j].
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors; // column j pairs with values[j]
};

EigenDecomposition symmetric_eigen(const Matrix& a);

} // namespace motormap
