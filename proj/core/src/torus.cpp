#include "charloc/torus.hpp"

namespace charloc {

std::vector<Scalar> torus_eigenvalues(const TorusData& T, const Matrix& t) {
    const FieldPtr& E = T.splitting;
    Matrix D = T.eigenbasis_inv * t.coerced_to(E) * T.eigenbasis;
    for (int i = 0; i < D.rows(); ++i)
        for (int j = 0; j < D.cols(); ++j) {
            if (i == j) continue;
            if (!D.at(i, j).is_zero_at_precision())
                fail(ErrorKind::NotInTorus, "element does not commute with gamma at precision (entry " +
                                                std::to_string(i) + "," + std::to_string(j) + " = " +
                                                D.at(i, j).render() + ")");
        }
    std::vector<Scalar> mu;
    for (int i = 0; i < D.rows(); ++i) mu.push_back(D.at(i, i));
    return mu;
}

bool torus_membership(const TorusData& T, const Matrix& t, const Depth& r) {
    if (r.value < 0) fail(ErrorKind::MalformedInput, "torus filtration is indexed by r >= 0");
    std::vector<Scalar> mu = torus_eigenvalues(T, t);
    const FieldPtr& E = T.splitting;
    if (r.value == 0 && !r.plus) {
        // T_cpt: all eigenvalues units
        for (const auto& m : mu) {
            if (!m.val_at_least(0, false)) return false;
            if (m.val_at_least(0, true)) return false; // nu > 0 means not a unit
        }
        return true;
    }
    for (const auto& m : mu) {
        Scalar diff = m - Scalar::one(E);
        if (!diff.val_at_least(r.value, r.plus)) return false;
    }
    return true;
}

std::pair<Matrix, Matrix> t_perp_decompose(const TorusData& T, const Matrix& X) {
    const FieldPtr& E = T.splitting;
    Matrix M = T.eigenbasis_inv * X.coerced_to(E) * T.eigenbasis;
    Matrix D(E, M.rows(), M.cols());
    for (int i = 0; i < M.rows(); ++i) D.set(i, i, M.at(i, i));
    Matrix Y = T.eigenbasis * D * T.eigenbasis_inv;
    Matrix Z = X.coerced_to(E) - Y;
    return {Y, Z};
}

bool point_in_apartment(const TorusData& T, const GroupSpec& G, const ApartmentPoint& x) {
    if (!parahoric_membership(GroupSpec{GroupKind::GL, G.n, G.field}, T.gamma, x)) return false;
    // the projections must preserve every lattice in the chain; one period
    // of breaks suffices since multiplication by p shifts the chain by 1
    for (const Rational& b : lattice_break_reps(G, x, T.splitting)) {
        Depth level = Depth::at(b);
        for (const Matrix& gen : lattice_generators(GroupSpec{GroupKind::GL, G.n, G.field}, x, level)) {
            auto [Y, Z] = t_perp_decompose(T, gen);
            GroupSpec over_e{GroupKind::GL, G.n, T.splitting};
            if (!lattice_membership(over_e, Y, x, level)) return false;
            if (!lattice_membership(over_e, Z, x, level)) return false;
        }
    }
    return true;
}

} // namespace charloc
