#pragma once

#include "mhdcm/dataset.hpp"
#include "mhdcm/model.hpp"

namespace mhdcm {

// Canonical closed-form fit: center, build the label-derived matrices, solve
// the two-block eigenproblem with sign-similarity coupling, then rescale so
// each projected modality has covariance N * I_L under the block weighting.
//
// code_length <= 0 selects min(m, p, c-1); ridge < 0 selects the per-side
// defaults.
ProjectionModel fit_dccm(const MultiModalDataset& train, int code_length = 0,
                         double ridge = -1.0);

// Signed hashing objective of a fitted model on its training set:
// || sgn(A^{1/2} x' W_x) sgn(A^{1/2} y' W_y)^T - L S' ||_F^2 with A^{1/2} the
// block square root and S' the sign similarity. Diagnostic only; the fit
// optimizes the relaxed (sign-free) problem.
double objective_dccm(const ProjectionModel& model, const MultiModalDataset& train);

}  // namespace mhdcm
