#include "charloc/kirillov.hpp"

#include <algorithm>

#include "charloc/depth.hpp"

namespace charloc {

namespace {

long entry_cutoff(const ApartmentPoint& x, const Depth& level, int i, int j) {
    return min_entry_valuation(level, x.offset(i, j));
}

Matrix truncate_entrywise(const GroupSpec& G, const ApartmentPoint& x, const Depth& level, const Matrix& X) {
    Matrix out(G.field, G.n, G.n);
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) out.set(i, j, X.at(i, j).reduced_mod(entry_cutoff(x, level, i, j)));
    return out;
}

} // namespace

CharacterCoset make_character_coset(const GroupSpec& G, const ApartmentPoint& x, const Rational& r,
                                    const Rational& t, const Matrix& X) {
    G.validate();
    if (r <= 0) fail(ErrorKind::MalformedInput, "the level r must be positive");
    if (t < r) fail(ErrorKind::MalformedInput, "need r <= t");
    if (t > 2 * r) fail(ErrorKind::OutOfAbelianRange, "t > 2r: the quotient G_{x,r}/G_{x,t} is not abelian");
    GroupSpec GL_shape{GroupKind::GL, G.n, G.field};
    if (!lattice_membership(G, X, x, Depth::at_plus(-t)))
        fail(ErrorKind::PreconditionViolated, "X is not in g_{x,(-t)+}");
    Depth level = Depth::at_plus(-r);
    Matrix canon = truncate_entrywise(GL_shape, x, level, X);
    if (G.is_sl()) {
        // restore tracelessness inside the lattice: the correction lands on
        // the diagonal slot with the smallest cutoff (ties: the last one)
        Scalar defect = (X - canon).trace();
        int sel = 0;
        long best = entry_cutoff(x, level, 0, 0);
        for (int i = 1; i < G.n; ++i) {
            long cut = entry_cutoff(x, level, i, i);
            if (cut <= best) {
                best = cut;
                sel = i;
            }
        }
        canon.set(sel, sel, canon.at(sel, sel) + defect);
    }
    return CharacterCoset{G, x, r, t, canon};
}

QmodZ psi(const Scalar& z) { return frac_principal(z.shifted(-1)); }

QmodZ evaluate_character(const CharacterCoset& c, const Matrix& g) {
    if (!group_membership(c.group, g, c.x, Depth::at(c.r)))
        fail(ErrorKind::PreconditionViolated, "g is not in G_{x,r}");
    Matrix diff = g - Matrix::identity(g.field(), c.group.n);
    Scalar pairing = (c.X * diff).trace();
    return psi(pairing);
}

TrivialityDepth triviality_depth(const CharacterCoset& c) {
    if (c.X.is_zero_at_precision()) return TrivialityDepth{true, Depth::at(Rational(0))};
    Depth d = element_lattice_depth(GroupSpec{GroupKind::GL, c.group.n, c.group.field}, c.X, c.x);
    return TrivialityDepth{false, Depth::at(-d.value)};
}

// ---------------------------------------------------------------------------
// degeneracy: residue-field linear algebra helpers

namespace {

struct ResMat {
    const LocalField* F;
    int n;
    std::vector<ResidueElem> a;

    ResidueElem& at(int i, int j) { return a[i * n + j]; }
    const ResidueElem& at(int i, int j) const { return a[i * n + j]; }

    static ResMat zero(const LocalField& F, int n) {
        return ResMat{&F, n, std::vector<ResidueElem>((size_t)n * n, F.res_zero())};
    }

    ResMat mul(const ResMat& o) const {
        ResMat out = zero(*F, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                ResidueElem s = F->res_zero();
                for (int k = 0; k < n; ++k) s = F->res_add(s, F->res_mul(at(i, k), o.at(k, j)));
                out.at(i, j) = s;
            }
        return out;
    }

    bool is_zero() const {
        return std::all_of(a.begin(), a.end(), [](const ResidueElem& e) { return e.is_zero(); });
    }
};

int res_rank(ResMat m) {
    const LocalField& F = *m.F;
    int rank = 0;
    for (int col = 0; col < m.n && rank < m.n; ++col) {
        int pivot = -1;
        for (int r = rank; r < m.n; ++r)
            if (!m.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        for (int j = 0; j < m.n; ++j) std::swap(m.at(rank, j), m.at(pivot, j));
        ResidueElem inv = F.res_inv(m.at(rank, col));
        for (int j = 0; j < m.n; ++j) m.at(rank, j) = F.res_mul(inv, m.at(rank, j));
        for (int r = 0; r < m.n; ++r) {
            if (r == rank || m.at(r, col).is_zero()) continue;
            ResidueElem f = m.at(r, col);
            for (int j = 0; j < m.n; ++j) m.at(r, j) = F.res_sub(m.at(r, j), F.res_mul(f, m.at(rank, j)));
        }
        ++rank;
    }
    return rank;
}

bool res_nilpotent(const ResMat& m) {
    ResMat acc = m;
    for (int k = 1; k < m.n; ++k) acc = acc.mul(m);
    return acc.is_zero();
}

// kernel basis of an N x N system over the residue field (row-major)
std::vector<std::vector<ResidueElem>> res_kernel_basis(const LocalField& F, int N,
                                                       std::vector<ResidueElem> m) {
    auto at = [&](int i, int j) -> ResidueElem& { return m[(size_t)i * N + j]; };
    std::vector<int> pivot_of_col(N, -1);
    int rank = 0;
    for (int col = 0; col < N && rank < N; ++col) {
        int pivot = -1;
        for (int r = rank; r < N; ++r)
            if (!at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        for (int j = 0; j < N; ++j) std::swap(at(rank, j), at(pivot, j));
        ResidueElem inv = F.res_inv(at(rank, col));
        for (int j = 0; j < N; ++j) at(rank, j) = F.res_mul(inv, at(rank, j));
        for (int r = 0; r < N; ++r) {
            if (r == rank || at(r, col).is_zero()) continue;
            ResidueElem f = at(r, col);
            for (int j = 0; j < N; ++j) at(r, j) = F.res_sub(at(r, j), F.res_mul(f, at(rank, j)));
        }
        pivot_of_col[col] = rank;
        ++rank;
    }
    std::vector<std::vector<ResidueElem>> basis;
    for (int fc = 0; fc < N; ++fc) {
        if (pivot_of_col[fc] >= 0) continue;
        std::vector<ResidueElem> v(N, F.res_zero());
        v[fc] = F.res_one();
        for (int col = 0; col < N; ++col) {
            int r = pivot_of_col[col];
            if (r >= 0) v[col] = F.res_neg(at(r, fc));
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

ResidueElem res_det(ResMat m) {
    const LocalField& F = *m.F;
    ResidueElem det = F.res_one();
    for (int col = 0; col < m.n; ++col) {
        int pivot = -1;
        for (int r = col; r < m.n; ++r)
            if (!m.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) return F.res_zero();
        if (pivot != col) {
            for (int j = 0; j < m.n; ++j) std::swap(m.at(col, j), m.at(pivot, j));
            det = F.res_neg(det);
        }
        det = F.res_mul(det, m.at(col, col));
        ResidueElem inv = F.res_inv(m.at(col, col));
        for (int r = col + 1; r < m.n; ++r) {
            if (m.at(r, col).is_zero()) continue;
            ResidueElem f = F.res_mul(inv, m.at(r, col));
            for (int j = col; j < m.n; ++j) m.at(r, j) = F.res_sub(m.at(r, j), F.res_mul(f, m.at(col, j)));
        }
    }
    return det;
}

// nilpotent Jordan matrix over Z with block sizes read off the rank sequence
std::vector<long> jordan_partition(const ResMat& rho) {
    int n = rho.n;
    std::vector<int> ranks = {n}; // rank of rho^0
    ResMat power = rho;
    for (int k = 1; k <= n; ++k) {
        ranks.push_back(res_rank(power));
        power = power.mul(rho);
    }
    // number of blocks of size >= k is ranks[k-1] - ranks[k]
    std::vector<long> blocks;
    for (int k = 1; k <= n; ++k) {
        long count_ge_k = ranks[k - 1] - ranks[k];
        long count_ge_k1 = k < n ? ranks[k] - ranks[k + 1] : 0;
        long exactly_k = count_ge_k - count_ge_k1;
        for (long b = 0; b < exactly_k; ++b) blocks.push_back(k);
    }
    std::sort(blocks.rbegin(), blocks.rend());
    return blocks;
}

// Conjugator K over the residue field with K J = rho K and K invertible;
// exists because rho and J share the same Jordan type.  The kernel of the
// linear system is scanned deterministically for an invertible combination.
ResMat conjugator_to_jordan(const ResMat& rho, const ResMat& J) {
    const LocalField& F = *rho.F;
    int n = rho.n, N = n * n;
    std::vector<ResidueElem> sys((size_t)N * N, F.res_zero());
    // equation (a,b): sum_v K_{av} J_{vb} - sum_u rho_{au} K_{ub} = 0
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            int eq = a * n + b;
            for (int v = 0; v < n; ++v)
                sys[(size_t)eq * N + (a * n + v)] = F.res_add(sys[(size_t)eq * N + (a * n + v)], J.at(v, b));
            for (int u = 0; u < n; ++u)
                sys[(size_t)eq * N + (u * n + b)] =
                    F.res_sub(sys[(size_t)eq * N + (u * n + b)], rho.at(a, u));
        }
    auto basis = res_kernel_basis(F, N, std::move(sys));
    if (basis.empty()) fail(ErrorKind::Internal, "empty commutant-translate space");
    // scan combinations with small coefficients
    long p = F.p();
    std::vector<long> coeff(basis.size(), 0);
    for (long attempt = 0; attempt < 100000; ++attempt) {
        // increment the coefficient counter (skip all-zero)
        int i = 0;
        while (i < (int)coeff.size() && coeff[i] == p - 1) coeff[i++] = 0;
        if (i == (int)coeff.size()) break;
        ++coeff[i];
        ResMat K = ResMat::zero(F, n);
        for (size_t bidx = 0; bidx < basis.size(); ++bidx) {
            if (coeff[bidx] == 0) continue;
            ResidueElem c = F.res_from_int(coeff[bidx]);
            for (int idx = 0; idx < N; ++idx)
                K.a[idx] = F.res_add(K.a[idx], F.res_mul(c, basis[bidx][idx]));
        }
        if (!res_det(K).is_zero()) return K;
    }
    fail(ErrorKind::Internal, "no invertible conjugator found");
}

ResMat residue_matrix(const Matrix& scaled) {
    const LocalField& F = *scaled.field();
    ResMat out = ResMat::zero(F, scaled.rows());
    for (int i = 0; i < scaled.rows(); ++i)
        for (int j = 0; j < scaled.cols(); ++j) out.at(i, j) = scaled.at(i, j).residue();
    return out;
}

bool verify_nilpotent_in_coset(const CharacterCoset& c, const Matrix& N) {
    const GroupSpec GL_shape{GroupKind::GL, c.group.n, c.group.field};
    if (!N.trace().is_zero_at_precision()) return false;
    Matrix power = N;
    for (int k = 1; k < c.group.n; ++k) power = power * N;
    if (!power.is_zero_at_precision()) return false;
    return lattice_membership(GL_shape, N - c.X, c.x, Depth::at_plus(-c.r));
}

// --- exact decision for n = 2, p odd ---------------------------------------

struct Ball {
    Scalar center; // exact; the exact zero when 0 is in the ball
    long exp;      // ball = center + p^exp R
};

Ball normalized_ball(const Scalar& center, long exp) {
    if (center.is_exact_zero()) return Ball{center, exp};
    if (center.val_at_least(Rational(exp), false)) return Ball{Scalar::zero(center.field()), exp};
    return Ball{center, exp};
}

Rational ball_center_val(const Ball& b) {
    // +infinity encoded as exp for the zero-centered ball (never compared)
    return b.center.is_exact_zero() ? Rational(b.exp) : b.center.val_exact();
}

std::optional<DegeneracyResult> degenerate_2x2(const CharacterCoset& c) {
    const FieldPtr& k = c.group.field;
    if (c.group.n != 2 || k->p() == 2 || !k->is_qp()) return std::nullopt;
    Depth level = Depth::at_plus(-c.r);
    long m11 = entry_cutoff(c.x, level, 0, 0), m22 = entry_cutoff(c.x, level, 1, 1);
    long m12 = entry_cutoff(c.x, level, 0, 1), m21 = entry_cutoff(c.x, level, 1, 0);

    // trace condition: n11 ranges over A = B11 cap (-B22)
    Scalar tr = c.X.at(0, 0) + c.X.at(1, 1);
    if (!tr.is_exact_zero() && !tr.val_at_least(Rational(std::min(m11, m22)), false))
        return DegeneracyResult{Degeneracy::False, std::nullopt};
    Ball A = m11 >= m22 ? normalized_ball(c.X.at(0, 0), m11) : normalized_ball(-c.X.at(1, 1), m11 >= m22 ? m11 : m22);
    A = normalized_ball(A.center, std::max(m11, m22));

    Ball B12 = normalized_ball(c.X.at(0, 1), m12);
    Ball B21 = normalized_ball(c.X.at(1, 0), m21);

    // P = B12 * B21 is always a ball
    Ball P{Scalar::zero(k), 0};
    if (B12.center.is_exact_zero() && B21.center.is_exact_zero()) {
        P = Ball{Scalar::zero(k), m12 + m21};
    } else if (B12.center.is_exact_zero()) {
        P = Ball{Scalar::zero(k), (long)floor_long(Rational(m12) + ball_center_val(B21))};
    } else if (B21.center.is_exact_zero()) {
        P = Ball{Scalar::zero(k), (long)floor_long(Rational(m21) + ball_center_val(B12))};
    } else {
        long v12 = floor_long(ball_center_val(B12)), v21 = floor_long(ball_center_val(B21));
        long slack = std::min(m12 - v12, m21 - v21);
        P = Ball{B12.center * B21.center, v12 + v21 + slack};
    }

    auto witness_from = [&](const Scalar& z) -> DegeneracyResult {
        // z = -a^2 with a in A, and z = n12 n21 with n12 in B12, n21 in B21
        Scalar a = Scalar::zero(k);
        if (!z.is_exact_zero()) {
            if (A.center.is_exact_zero()) {
                long vz = floor_long(z.val_exact());
                Scalar unit = (-z).shifted(-vz);
                a = sqrt_unit(unit).shifted(vz / 2);
            } else {
                Scalar csq = A.center * A.center;
                a = A.center * sqrt_unit((-z) / csq);
            }
        }
        Scalar q = -(a * a);
        Scalar n12 = Scalar::zero(k), n21 = Scalar::zero(k);
        if (B12.center.is_exact_zero() && B21.center.is_exact_zero()) {
            if (!q.is_zero_at_precision()) {
                n12 = Scalar::rational(k, m12 >= 0 ? Rational(pow_int(k->p(), m12)) : Rational(1, pow_int(k->p(), -m12)));
                n21 = q / n12;
            }
        } else if (B12.center.is_exact_zero()) {
            n21 = B21.center;
            n12 = q / n21;
        } else if (B21.center.is_exact_zero()) {
            n12 = B12.center;
            n21 = q / n12;
        } else {
            long v12 = floor_long(ball_center_val(B12)), v21 = floor_long(ball_center_val(B21));
            Scalar eps = q / (B12.center * B21.center) - Scalar::one(k);
            if (m12 - v12 <= m21 - v21) {
                n12 = B12.center * (Scalar::one(k) + eps);
                n21 = B21.center;
            } else {
                n12 = B12.center;
                n21 = B21.center * (Scalar::one(k) + eps);
            }
        }
        Matrix N(k, 2, 2);
        N.set(0, 0, a);
        N.set(1, 1, -a);
        N.set(0, 1, n12);
        N.set(1, 0, n21);
        if (!verify_nilpotent_in_coset(c, N))
            fail(ErrorKind::Internal, "2x2 degeneracy witness failed verification: " + N.render());
        return DegeneracyResult{Degeneracy::True, N};
    };

    if (A.center.is_exact_zero()) {
        long alpha = A.exp;
        if (P.center.is_exact_zero()) return witness_from(Scalar::zero(k)); // 0 in S cap P
        Rational vw = ball_center_val(P);
        long vwl = floor_long(vw);
        bool ok = is_integer(vw) && vwl % 2 == 0 && vwl >= 2 * alpha;
        if (ok) {
            Scalar unit = (-P.center).shifted(-vwl);
            ok = k->res_is_square(unit.residue());
        }
        if (!ok) return DegeneracyResult{Degeneracy::False, std::nullopt};
        return witness_from(P.center);
    }

    // S = ball(-c^2, nu(c) + alpha)
    Scalar sc = -(A.center * A.center);
    long sexp = floor_long(ball_center_val(A)) + A.exp;
    Scalar gap = sc - P.center;
    bool meet = gap.is_exact_zero() || gap.val_at_least(Rational(std::min(sexp, P.exp)), false);
    if (!meet) return DegeneracyResult{Degeneracy::False, std::nullopt};
    return witness_from(sexp >= P.exp ? sc : P.center);
}

// --- one-step residue criterion ---------------------------------------------

std::optional<DegeneracyResult> degenerate_one_step(const CharacterCoset& c) {
    const FieldPtr& k = c.group.field;
    if (!k->is_qp()) return std::nullopt;
    Depth shallow = Depth::at_plus(-c.r), deep = Depth::at_plus(-c.t);
    long m_r = entry_cutoff(c.x, shallow, 0, 0), m_t = entry_cutoff(c.x, deep, 0, 0);
    for (int i = 0; i < c.group.n; ++i)
        for (int j = 0; j < c.group.n; ++j) {
            if (entry_cutoff(c.x, shallow, i, j) != m_r) return std::nullopt;
            if (entry_cutoff(c.x, deep, i, j) != m_t) return std::nullopt;
        }
    if (m_r - m_t != 1) return std::nullopt;
    // both lattices are scalar: g_{x,(-t)+} = p^{m_t} M_n(R); the coset is
    // determined by the residue of p^{-m_t} X, and it contains a nilpotent
    // exactly when that residue matrix is nilpotent.
    Matrix scaled(k, c.group.n, c.group.n);
    for (int i = 0; i < c.group.n; ++i)
        for (int j = 0; j < c.group.n; ++j) scaled.set(i, j, c.X.at(i, j).shifted(-m_t));
    ResMat rho = residue_matrix(scaled);
    if (!res_nilpotent(rho)) return DegeneracyResult{Degeneracy::False, std::nullopt};

    // witness: conjugate the Jordan pattern of rho by an invertible lift
    int n = c.group.n;
    std::vector<long> blocks = jordan_partition(rho);
    ResMat J = ResMat::zero(*k, n);
    Matrix Jlift(k, n, n);
    {
        int pos = 0;
        for (long b : blocks) {
            for (long s = 0; s + 1 < b; ++s) {
                J.at(pos + (int)s, pos + (int)s + 1) = k->res_one();
                Jlift.set(pos + (int)s, pos + (int)s + 1, Scalar::one(k));
            }
            pos += (int)b;
        }
    }
    ResMat K = conjugator_to_jordan(rho, J);
    Matrix Klift(k, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Klift.set(i, j, Scalar::integer(k, BigInt(K.at(i, j).c[0])));
    Matrix N = Klift * Jlift * Klift.inverse();
    Matrix W(k, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W.set(i, j, N.at(i, j).shifted(m_t));
    if (!verify_nilpotent_in_coset(c, W))
        fail(ErrorKind::Internal, "one-step degeneracy witness failed verification");
    return DegeneracyResult{Degeneracy::True, W};
}

} // namespace

DegeneracyResult is_degenerate(const CharacterCoset& c, long search_bound) {
    if (c.X.is_zero_at_precision()) {
        Matrix zero(c.group.field, c.group.n, c.group.n);
        return DegeneracyResult{Degeneracy::True, zero};
    }
    if (auto exact = degenerate_2x2(c)) return *exact;
    if (auto one_step = degenerate_one_step(c)) return *one_step;

    // bounded search over deeper digits of the coset
    const FieldPtr& k = c.group.field;
    long p = k->p();
    Depth level = Depth::at_plus(-c.r);
    int cells = c.group.n * c.group.n;
    std::vector<long> base((size_t)cells);
    for (int i = 0; i < c.group.n; ++i)
        for (int j = 0; j < c.group.n; ++j) base[(size_t)i * c.group.n + j] = entry_cutoff(c.x, level, i, j);
    long digits_per_cell = search_bound;
    BigInt total = 1;
    for (int idx = 0; idx < cells; ++idx) total *= pow_int(p, digits_per_cell);
    if (total > 200000) {
        // shrink to the cap; sound for "true", everything else is Unknown
        total = 200000;
    }
    std::vector<long> counter((size_t)cells * digits_per_cell, 0);
    for (BigInt it = 0; it < total; ++it) {
        Matrix N = c.X;
        long carry_idx = 0;
        if (it > 0) {
            while (carry_idx < (long)counter.size() && counter[carry_idx] == p - 1) counter[carry_idx++] = 0;
            if (carry_idx == (long)counter.size()) break;
            ++counter[carry_idx];
        }
        for (int idx = 0; idx < cells; ++idx) {
            Rational add(0);
            for (long d = 0; d < digits_per_cell; ++d) {
                long digit = counter[(size_t)idx * digits_per_cell + d];
                if (digit == 0) continue;
                long lvl = base[idx] + d;
                add += Rational(digit) * (lvl >= 0 ? Rational(pow_int(p, lvl)) : Rational(1, pow_int(p, -lvl)));
            }
            if (add != 0) {
                int i = idx / c.group.n, j = idx % c.group.n;
                N.set(i, j, N.at(i, j) + Scalar::rational(k, add));
            }
        }
        if (verify_nilpotent_in_coset(c, N)) return DegeneracyResult{Degeneracy::True, N};
    }
    return DegeneracyResult{Degeneracy::Unknown, std::nullopt};
}

bool gamma_intertwines(const TorusData& T, const CharacterCoset& c) {
    if (!certify(c.group, T.gamma).compact)
        fail(ErrorKind::PreconditionViolated, "gamma must be compact to stabilize G_{x,r}");
    if (!point_in_apartment(T, c.group, c.x))
        fail(ErrorKind::PointNotFixed, "x is not in the apartment of gamma's torus");
    Matrix moved = ad_action(T.gamma, c.X) - c.X;
    GroupSpec GL_shape{GroupKind::GL, c.group.n, c.group.field};
    return lattice_membership(GL_shape, moved, c.x, Depth::at_plus(-c.r));
}

Cor36Verdict cor36_conclusion_holds(const TorusData& T, const CharacterCoset& c, long search_bound) {
    DegeneracyResult deg = is_degenerate(c, search_bound);
    if (deg.verdict == Degeneracy::Unknown) return Cor36Verdict::DegeneracyUnknown;
    if (deg.verdict == Degeneracy::False) return Cor36Verdict::VacuousNotDegenerate;
    if (!gamma_intertwines(T, c)) return Cor36Verdict::VacuousNotIntertwined;
    Rational s = s_gamma(T);
    GroupSpec GL_shape{GroupKind::GL, c.group.n, c.group.field};
    bool concl = lattice_membership(GL_shape, c.X, c.x, Depth::at_plus(-c.r - s));
    return concl ? Cor36Verdict::Holds : Cor36Verdict::Fails;
}

std::vector<CharacterCoset> enumerate_characters(const GroupSpec& G, const ApartmentPoint& x, const Rational& r,
                                                 const Rational& t, long cap) {
    G.validate();
    const FieldPtr& k = G.field;
    long p = k->p();
    Depth shallow = Depth::at_plus(-r), deep = Depth::at_plus(-t);
    struct Cell {
        int i, j;
        long base;   // (-t)+ cutoff
        long digits; // number of free digits
    };
    std::vector<Cell> cells;
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            if (G.is_sl() && i == G.n - 1 && j == G.n - 1) continue; // dependent diagonal slot
            long a = min_entry_valuation(deep, x.offset(i, j));
            long b = min_entry_valuation(shallow, x.offset(i, j));
            if (b > a) cells.push_back(Cell{i, j, a, b - a});
        }
    BigInt total = 1;
    for (const auto& cell : cells) total *= pow_int(p, cell.digits);
    if (total > cap)
        fail(ErrorKind::EnumerationTooLarge,
             "coset count " + rational_str(Rational(total)) + " exceeds the cap " + std::to_string(cap));

    std::vector<CharacterCoset> out;
    out.reserve((size_t)total);
    long total_digits = 0;
    for (const auto& cell : cells) total_digits += cell.digits;
    std::vector<long> counter((size_t)total_digits, 0);
    for (BigInt it = 0; it < total; ++it) {
        if (it > 0) {
            long ci = 0;
            while (counter[ci] == p - 1) counter[ci++] = 0;
            ++counter[ci];
        }
        Matrix X(k, G.n, G.n);
        long off = 0;
        Rational diag_sum(0);
        for (const auto& cell : cells) {
            Rational v(0);
            for (long d = 0; d < cell.digits; ++d) {
                long digit = counter[(size_t)off + d];
                if (digit) {
                    long lvl = cell.base + d;
                    v += Rational(digit) * (lvl >= 0 ? Rational(pow_int(p, lvl)) : Rational(1, pow_int(p, -lvl)));
                }
            }
            off += cell.digits;
            if (v != 0) X.set(cell.i, cell.j, Scalar::rational(k, v));
            if (cell.i == cell.j) diag_sum += v;
        }
        if (G.is_sl() && diag_sum != 0) X.set(G.n - 1, G.n - 1, Scalar::rational(k, -diag_sum));
        out.push_back(make_character_coset(G, x, r, t, X));
    }
    return out;
}

BigInt character_count_from_breaks(const GroupSpec& G, const ApartmentPoint& x, const Rational& r,
                                   const Rational& t) {
    // sum the quotient dimensions over all breaks u with -t < u <= -r
    long dim = 0;
    for (const Rational& rep : lattice_break_reps(G, x, G.field)) {
        // breaks congruent to rep in the window (-t, -r]
        Rational lo = -t, hi = -r;
        BigInt kmin = ceil_big(lo - rep), kmax = floor_big(hi - rep);
        if (Rational(kmin) + rep <= lo) kmin += 1;
        for (BigInt kk = kmin; kk <= kmax; ++kk) {
            Rational u = rep + Rational(kk);
            long d = 0;
            for (int i = 0; i < G.n; ++i)
                for (int j = 0; j < G.n; ++j) {
                    if (G.is_sl() && i == G.n - 1 && j == G.n - 1) continue;
                    if (is_integer(u - x.offset(i, j))) ++d;
                }
            dim += d;
        }
    }
    return pow_int(G.field->p(), dim);
}

std::vector<Matrix> group_generators(const GroupSpec& G, const ApartmentPoint& x, const Depth& r) {
    const FieldPtr& F = G.field;
    std::vector<Matrix> gens;
    for (int i = 0; i < G.n; ++i)
        for (int j = 0; j < G.n; ++j) {
            if (i == j) continue;
            long m = min_entry_valuation(r, x.offset(i, j));
            Matrix g = Matrix::identity(F, G.n);
            g.set(i, j, Scalar::rational(F, m >= 0 ? Rational(pow_int(F->p(), m)) : Rational(1, pow_int(F->p(), -m))));
            gens.push_back(g);
        }
    long m0 = min_entry_valuation(r, Rational(0));
    Scalar u = Scalar::rational(F, Rational(pow_int(F->p(), m0)) + 1); // 1 + p^m
    if (G.is_sl()) {
        for (int i = 0; i + 1 < G.n; ++i) {
            Matrix g = Matrix::identity(F, G.n);
            g.set(i, i, u);
            g.set(G.n - 1, G.n - 1, u.inverse());
            gens.push_back(g);
        }
    } else {
        for (int i = 0; i < G.n; ++i) {
            Matrix g = Matrix::identity(F, G.n);
            g.set(i, i, u);
            gens.push_back(g);
        }
    }
    return gens;
}

} // namespace charloc
