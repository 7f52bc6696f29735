// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <vector>

#include "mstvtp/types.hpp"

namespace mstvtp {

/// Map unconstrained transition parameters f to a row-stochastic matrix.
///
/// Diagonal (k = 2): P_ii = logistic(f_i), off-diagonal is the complement.
/// OffDiagonal: multinomial logit per row with the diagonal entry as the
/// reference category, P_ij = exp(f_ij) / (1 + sum_l exp(f_il)). Evaluated
/// with a max-shift so arbitrarily large |f| cannot overflow.
TransitionMatrix link_f_to_matrix(const std::vector<double>& f,
                                  const ModelSpec& spec);

/// Inverse of link_f_to_matrix. All referenced entries must lie strictly in
/// (0,1); a boundary probability raises a Domain error naming the entry.
std::vector<double> link_matrix_to_f(const TransitionMatrix& P,
                                     const ModelSpec& spec);

/// Derivatives of the link. jac[m*k + j] = dP(row(m), j) / df_m, where row(m)
/// is the matrix row the m-th free parameter belongs to (entries of other
/// rows do not depend on f_m). Each derivative row sums to zero.
struct LinkJacobian {
  int k = 0;
  int dim = 0;                // number of free parameters
  std::vector<int> row;       // row(m)
  std::vector<int> col;       // target column of f_m (diagonal index under Diagonal)
  std::vector<double> jac;    // dim x k, row-major
  double d(int m, int j) const { return jac[static_cast<size_t>(m) * k + j]; }
};

LinkJacobian link_jacobian(const std::vector<double>& f, const ModelSpec& spec);

/// Same derivatives evaluated from an already-linked matrix (avoids
/// recomputing the softmax inside tight loops).
LinkJacobian link_jacobian_at(const TransitionMatrix& P, const ModelSpec& spec);

/// In-place variant for hot loops; reuses the storage in `out`.
void link_jacobian_fill(const TransitionMatrix& P, const ModelSpec& spec,
                        LinkJacobian& out);

/// Index of f entry (i -> j) in the free-parameter vector; off-diagonal
/// entries are ordered row-major skipping the diagonal.
int f_index(int i, int j, const ModelSpec& spec);

}  // namespace mstvtp
