#include "sigexec/kernels.hpp"

namespace sigexec {

Eigen::MatrixXd gram_matrix(const ExpKernel& kernel, const std::vector<double>& grid) {
    kernel.validate();
    if (grid.empty()) throw config_error("gram_matrix: grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw config_error("gram_matrix: grid must be strictly increasing at index " +
                               std::to_string(i));

    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = kernel.kappa * kernel.rho;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel(grid[static_cast<std::size_t>(i)] -
                                    grid[static_cast<std::size_t>(j)]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

bool is_positive_definite(const Eigen::MatrixXd& m, double tol_rel) {
    if (m.rows() != m.cols()) throw config_error("is_positive_definite: matrix must be square");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1.0))
        throw config_error("is_positive_definite: matrix is not symmetric (max asymmetry " +
                           std::to_string(asym) + ")");

    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return false;
    // Pivot k of the factorization is L(k,k)^2; compare against the relative
    // floor so near-singular but technically factorizable inputs are rejected.
    const double floor_val = tol_rel * m.diagonal().maxCoeff();
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (!(diag[i] * diag[i] > floor_val)) return false;
    return true;
}

}  // namespace sigexec
