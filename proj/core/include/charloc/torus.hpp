#pragma once

#include "charloc/filtration.hpp"
#include "charloc/matrix.hpp"

namespace charloc {

/**
 * Eigen-decomposition of a regular semisimple gamma: its tame splitting
 * field E, the eigenvalues (pairwise distinct at precision) and an
 * eigenbasis over E.  T = C_G(gamma)° is recovered from this data; the
 * roots of T are the eigenvalue-ratio characters alpha_{ij}(t) = mu_i/mu_j.
 */
struct TorusData {
    Matrix gamma;                   // over k
    FieldPtr splitting;             // E
    std::vector<Scalar> eigenvalues; // over E, same order as eigenbasis columns
    Matrix eigenbasis;              // P, columns are eigenvectors over E
    Matrix eigenbasis_inv;
    bool is_split_over_k = false;
};

/// Eigenvalues of t in gamma's eigenbasis.  Throws NotInTorus when t fails
/// to commute with gamma at precision (off-diagonal residue after
/// conjugation).
std::vector<Scalar> torus_eigenvalues(const TorusData& T, const Matrix& t);

/// t in T_r: for r > 0 (or 0+), nu(mu_i(t) - 1) >= r (strict when plus) for
/// every eigenvalue; for r = 0 the compact condition nu(mu_i) = 0.
bool torus_membership(const TorusData& T, const Matrix& t, const Depth& r);

/// X = Y + Z with Y in t = C_g(gamma) and Z in t^perp = (Ad(gamma)-1)g,
/// computed through the eigenbasis (diagonal extraction over E).  Both
/// components are returned over E; their lattice data agrees with the
/// k-rational values.
std::pair<Matrix, Matrix> t_perp_decompose(const TorusData& T, const Matrix& X);

/**
 * Computational certificate that x lies in the apartment A(T,k): gamma must
 * lie in the parahoric at x (so gamma fixes x) and the t/t^perp projections
 * must preserve the lattice chain (checked on lattice generators at every
 * break in one period; periodicity extends the check to all depths).
 */
bool point_in_apartment(const TorusData& T, const GroupSpec& G, const ApartmentPoint& x);

} // namespace charloc
