#pragma once

#include <Eigen/Dense>

namespace adlkit {

class RandomStream;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest eigenvalue of a symmetric positive semidefinite matrix, i.e.
// sup over unit u of u^T M u. Throws InvariantError when M is not
// symmetric within 1e-9 or has an eigenvalue below -1e-9 (scaled by the
// matrix magnitude).
double second_moment_top_eig(const Matrix& m);

// Max |U^T U - I|; zero for a matrix with exactly orthonormal columns.
double orthonormality_defect(const Matrix& u);

// rows x cols matrix with orthonormal columns (QR of a Gaussian matrix).
Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, RandomStream& rng);

} // namespace adlkit
