#include "charloc/chevalley.hpp"

namespace charloc {

std::vector<Root> gl_roots(int n) {
    std::vector<Root> roots;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) roots.push_back(Root{i, j});
    return roots;
}

Matrix root_vector(const FieldPtr& F, int n, Root b) {
    Matrix E(F, n, n);
    E.set(b.i, b.j, Scalar::one(F));
    return E;
}

Matrix coroot_element(const FieldPtr& F, int n, Root b) {
    Matrix H(F, n, n);
    H.set(b.i, b.i, Scalar::one(F));
    H.set(b.j, b.j, -Scalar::one(F));
    return H;
}

Matrix one_param(const FieldPtr& F, int n, Root b, const Scalar& lam) {
    Matrix g = Matrix::identity(F, n);
    g.set(b.i, b.j, lam);
    return g;
}

Matrix chevalley_ad_root(const FieldPtr& F, int n, Root b, const Scalar& lam, Root c) {
    if (c == b) return root_vector(F, n, b);
    if (c == b.negated()) {
        // E_c + lam H_b - lam^2 E_b
        Matrix out = root_vector(F, n, c) + lam * coroot_element(F, n, b);
        out = out - (lam * lam) * root_vector(F, n, b);
        return out;
    }
    Matrix out = root_vector(F, n, c);
    if (b.j == c.i) { // E_b E_c = E_{b.i, c.j}
        Matrix t = root_vector(F, n, Root{b.i, c.j});
        out = out + lam * t;
    } else if (c.j == b.i) { // E_c E_b = E_{c.i, b.j}
        Matrix t = root_vector(F, n, Root{c.i, b.j});
        out = out - lam * t;
    }
    return out;
}

Matrix chevalley_ad_cartan(const FieldPtr& F, int n, Root b, const Scalar& lam, const std::vector<Scalar>& h) {
    Matrix H(F, n, n);
    for (int i = 0; i < n; ++i) H.set(i, i, h[i]);
    // db(H) = h_i - h_j
    Scalar dbH = h[b.i] - h[b.j];
    return H - (dbH * lam) * root_vector(F, n, b);
}

Matrix torus_ad_root(const FieldPtr& F, int n, const std::vector<Scalar>& t, Root c) {
    return (t[c.i] / t[c.j]) * root_vector(F, n, c);
}

} // namespace charloc
