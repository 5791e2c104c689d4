#pragma once

#include <array>

#include <Eigen/SparseCore>

#include "mfguc/field.hpp"

namespace mfguc::disc {

/// Finite-difference stencil along one axis: value = sum w_k f[i + offset_k].
struct Stencil {
  std::array<int, 4> offsets{};
  std::array<double, 4> weights{};
  int count = 0;
};

/// Central in the interior, 3-point one-sided (second order) at the ends.
Stencil first_derivative_stencil(int i, int n, double h);
/// Central in the interior; 4-point one-sided (second order) at the ends,
/// falling back to the 3-point formula when n == 3.
Stencil second_derivative_stencil(int i, int n, double h);
/// Central in the interior, first-order one-sided at the two time ends.
Stencil time_derivative_stencil(int it, int nt, double tau);

Field partial(const Field& f, int axis);
Field second_partial(const Field& f, int axis);
VectorField gradient(const Field& f);
Field laplacian(const Field& f);
Field divergence(const VectorField& F);
Field dt(const Field& f);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Derivative { d_x1, d_x2, d_x1x1, d_x2x2, d_t };

/// Matrix of the same stencil acting on node-ordered values.
SparseMatrix derivative_matrix(const SpaceTimeGrid& grid, Derivative which);
SparseMatrix laplacian_matrix(const SpaceTimeGrid& grid);
SparseMatrix diagonal_matrix(const Field& f);
SparseMatrix identity_matrix(const SpaceTimeGrid& grid);

}  // namespace mfguc::disc
