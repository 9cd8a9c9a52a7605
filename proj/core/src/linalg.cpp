#include "adlkit/linalg.hpp"

#include "adlkit/error.hpp"
#include "adlkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace adlkit {

double second_moment_top_eig(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw InvariantError("second_moment_top_eig: matrix is not square");
    }
    if (m.size() == 0) {
        return 0.0;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) {
        throw InvariantError("second_moment_top_eig: matrix is not symmetric (max asymmetry " +
                             std::to_string(asym) + ")");
    }
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    if (ev.minCoeff() < -1e-9 * scale) {
        throw InvariantError("second_moment_top_eig: matrix is not positive semidefinite (eigenvalue " +
                             std::to_string(ev.minCoeff()) + ")");
    }
    return std::max(0.0, ev.maxCoeff());
}

double orthonormality_defect(const Matrix& u)
{
    const Matrix gram = u.transpose() * u;
    return (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, RandomStream& rng)
{
    if (cols > rows || cols <= 0) {
        throw RangeError("random_orthonormal: need 0 < cols <= rows");
    }
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            g(i, j) = rng.normal();
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

} // namespace adlkit
