#include "doctest.h"

#include "charloc/chevalley.hpp"
#include "charloc/filtration.hpp"

using namespace charloc;

namespace {

FieldPtr q5() { return LocalField::qp(5); }
GroupSpec gl2() { return GroupSpec{GroupKind::GL, 2, q5()}; }

Matrix mat2(const FieldPtr& F, Rational a, Rational b, Rational c, Rational d) {
    return Matrix::from_rationals(F, {{a, b}, {c, d}});
}

ApartmentPoint x0() { return ApartmentPoint::origin(2); }
ApartmentPoint xhalf() { return ApartmentPoint{{Rational(1, 2), Rational(0)}}; }

} // namespace

TEST_CASE("lattice membership at the origin and at the half point") {
    auto G = gl2();
    auto F = G.field;
    Matrix X = mat2(F, -5, 1, -25, 5);
    CHECK(lattice_membership(G, X, x0(), Depth::at(Rational(0))));
    CHECK_FALSE(lattice_membership(G, X, x0(), Depth::at_plus(Rational(0))));

    Matrix zero(F, 2, 2);
    CHECK(lattice_membership(G, zero, x0(), Depth::at(Rational(100))));
    CHECK(lattice_membership(G, zero, xhalf(), Depth::at_plus(Rational(100))));

    Matrix Y = mat2(F, 0, Rational(1, 5), 0, 0);
    CHECK(lattice_membership(G, Y, xhalf(), Depth::at(Rational(-1, 2))));
    CHECK_FALSE(lattice_membership(G, Y, xhalf(), Depth::at_plus(Rational(-1, 2))));
}

TEST_CASE("element lattice depth") {
    auto G = gl2();
    auto F = G.field;
    CHECK(element_lattice_depth(G, mat2(F, -5, 1, -25, 5), x0()) == Depth::at(Rational(0)));
    CHECK(element_lattice_depth(G, mat2(F, -5, 0, 0, 5), x0()) == Depth::at(Rational(1)));
    CHECK(element_lattice_depth(G, mat2(F, 0, Rational(1, 5), 0, 0), xhalf()) == Depth::at(Rational(-1, 2)));
    CHECK_THROWS_AS_MESSAGE(element_lattice_depth(G, Matrix(F, 2, 2), x0()), Error,
                            doctest::Contains("ZeroAtPrecision"));
}

TEST_CASE("group membership and the parahoric") {
    auto G = gl2();
    auto F = G.field;
    Matrix g = mat2(F, 6, 5, 10, 1 + 25);
    CHECK(group_membership(G, g, x0(), Depth::at(Rational(1))));
    Matrix h = mat2(F, 6, 0, 0, 1);
    CHECK(group_membership(G, h, x0(), Depth::at(Rational(1))));
    CHECK_FALSE(group_membership(G, h, x0(), Depth::at_plus(Rational(1))));
    CHECK(group_membership(G, Matrix::identity(F, 2), x0(), Depth::at(Rational(50))));
    CHECK_THROWS_AS_MESSAGE(group_membership(G, h, x0(), Depth::at(Rational(0))), Error,
                            doctest::Contains("NonPositiveDepth"));
    CHECK(group_membership(G, Matrix::identity(F, 2), x0(), Depth::at_plus(Rational(0))));

    CHECK(parahoric_membership(G, mat2(F, 1, 1, 5, 1), x0()));
    CHECK(parahoric_membership(G, mat2(F, 1, 1, 5, 1), xhalf()));
    CHECK_FALSE(parahoric_membership(G, mat2(F, 0, 1, 5, 0), x0())); // det = -5
    // Iwahori at the half point: the 2,1 entry needs valuation >= 1
    CHECK_FALSE(parahoric_membership(G, mat2(F, 1, 0, 1, 1), xhalf()));
    CHECK(parahoric_membership(G, mat2(F, 1, 0, 1, 1), x0()));
}

TEST_CASE("breaks") {
    auto G = gl2();
    auto reps0 = lattice_break_reps(G, x0(), G.field);
    CHECK(reps0 == std::vector<Rational>{Rational(0)});
    auto repsh = lattice_break_reps(G, xhalf(), G.field);
    CHECK(repsh == std::vector<Rational>{Rational(0), Rational(1, 2)});
    CHECK(is_nilpotent_break(x0(), Rational(1)));
    CHECK_FALSE(is_nilpotent_break(x0(), Rational(1, 2)));
    CHECK(is_nilpotent_break(xhalf(), Rational(1, 2)));
    CHECK_FALSE(is_nilpotent_break(xhalf(), Rational(0)));
}

TEST_CASE("nilpotent sampler hits the requested depth exactly") {
    auto G = gl2();
    Rng rng(99);
    auto run = [&](const ApartmentPoint& x, const Rational& r) {
        for (int i = 0; i < 60; ++i) {
            Matrix X = sample_nilpotent(G, x, Depth::at(r), rng);
            Matrix sq = X * X;
            CHECK(sq.is_zero_at_precision());
            CHECK(element_lattice_depth(G, X, x) == Depth::at(r));
        }
    };
    run(x0(), Rational(-1));
    run(x0(), Rational(0));
    run(x0(), Rational(1));
    run(xhalf(), Rational(-1, 2));
    run(xhalf(), Rational(1, 2));
    run(xhalf(), Rational(3, 2));
    CHECK_THROWS_AS_MESSAGE(sample_nilpotent(G, x0(), Depth::at(Rational(1, 2)), rng), Error,
                            doctest::Contains("NotABreak"));

    GroupSpec gl3{GroupKind::GL, 3, q5()};
    for (int i = 0; i < 20; ++i) {
        Matrix X = sample_nilpotent(gl3, ApartmentPoint::origin(3), Depth::at(Rational(0)), rng);
        Matrix cube = X * X * X;
        CHECK(cube.is_zero_at_precision());
        CHECK(element_lattice_depth(gl3, X, ApartmentPoint::origin(3)) == Depth::at(Rational(0)));
    }
}

TEST_CASE("antitonicity and parahoric stability of the lattices") {
    auto G = gl2();
    Rng rng(123);
    std::vector<ApartmentPoint> points = {x0(), xhalf()};
    for (const auto& x : points) {
        std::vector<Rational> breaks =
            x.coords[0] == 0 ? std::vector<Rational>{-1, 0, 1} : std::vector<Rational>{Rational(-1, 2), Rational(1, 2)};
        for (int i = 0; i < 50; ++i) {
            const Rational& r = breaks[rng.below((long)breaks.size())];
            Matrix X = sample_nilpotent(G, x, Depth::at(r), rng);
            // antitone: membership at r' <= r
            CHECK(lattice_membership(G, X, x, Depth::at(r - 1)));
            CHECK_FALSE(lattice_membership(G, X, x, Depth::at(r + 1)));
            // G_{x,0}-stability
            Matrix g = sample_parahoric(G, x, rng);
            CHECK(lattice_membership(G, ad_action(g, X), x, Depth::at(r)));
        }
    }
}

TEST_CASE("SL restrictions") {
    GroupSpec sl2{GroupKind::SL, 2, q5()};
    sl2.validate();
    auto F = sl2.field;
    CHECK_THROWS_AS(GroupSpec{GroupKind::SL, 5, LocalField::qp(5)}.validate(), Error);
    CHECK_THROWS_AS(GroupSpec{GroupKind::SL, 7, LocalField::qp(5)}.validate(), Error);
    // traceless requirement for the Lie algebra
    CHECK_THROWS_AS_MESSAGE(lattice_membership(sl2, mat2(F, 1, 0, 0, 1), x0(), Depth::at(Rational(0))), Error,
                            doctest::Contains("traceless"));
    CHECK(lattice_membership(sl2, mat2(F, 1, 0, 0, -1), x0(), Depth::at(Rational(0))));
    // det = 1 requirement for the group
    CHECK_THROWS_AS(group_membership(sl2, mat2(F, 6, 0, 0, 1), x0(), Depth::at(Rational(1))), Error);
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        Matrix g = sample_parahoric(sl2, x0(), rng);
        CHECK(approx_equal(g.det(), Scalar::one(F)));
    }
}

TEST_CASE("Chevalley closed forms match direct conjugation") {
    auto F = q5();
    // the rank-2 worked case: Ad(e_b(1)) E_{-b} = [[1,-1],[1,-1]]
    Root b{0, 1};
    Scalar one = Scalar::one(F);
    Matrix lhs = chevalley_ad_root(F, 2, b, one, b.negated());
    Matrix expected = Matrix::from_rationals(F, {{Rational(1), Rational(-1)}, {Rational(1), Rational(-1)}});
    CHECK(approx_equal(lhs, expected));

    Rng rng(2024);
    for (int n : {2, 3}) {
        auto roots = gl_roots(n);
        for (const Root& bb : roots) {
            for (const Root& cc : roots) {
                for (int trial = 0; trial < 8; ++trial) {
                    long u = rng.below(200) - 100;
                    long m = rng.below(5) - 2;
                    Rational lamq =
                        Rational(u) * (m >= 0 ? Rational(pow_int(5, m)) : Rational(1, pow_int(5, -m)));
                    Scalar lam = Scalar::rational(F, lamq);
                    Matrix closed = chevalley_ad_root(F, n, bb, lam, cc);
                    Matrix direct = ad_action(one_param(F, n, bb, lam), root_vector(F, n, cc));
                    CHECK(approx_equal(closed, direct));
                }
            }
            // Cartan case, lambda = 0 included
            std::vector<Scalar> h;
            for (int i = 0; i < n; ++i) h.push_back(Scalar::integer(F, rng.below(50) - 25));
            Matrix H(F, n, n);
            for (int i = 0; i < n; ++i) H.set(i, i, h[i]);
            Matrix closed0 = chevalley_ad_cartan(F, n, bb, Scalar::zero(F), h);
            CHECK(approx_equal(closed0, H));
            Scalar lam = Scalar::integer(F, 3);
            Matrix closed = chevalley_ad_cartan(F, n, bb, lam, h);
            Matrix direct = ad_action(one_param(F, n, bb, lam), H);
            CHECK(approx_equal(closed, direct));
        }
        // torus action on root vectors
        std::vector<Scalar> t;
        for (int i = 0; i < n; ++i) t.push_back(Scalar::integer(F, 1 + rng.below(20)));
        Matrix tm(F, n, n);
        for (int i = 0; i < n; ++i) tm.set(i, i, t[i]);
        for (const Root& cc : roots) {
            Matrix closed = torus_ad_root(F, n, t, cc);
            Matrix direct = ad_action(tm, root_vector(F, n, cc));
            CHECK(approx_equal(closed, direct));
        }
    }
}

TEST_CASE("ad_action on root vectors of a diagonal torus") {
    auto F = q5();
    Matrix gamma = mat2(F, 6, 0, 0, 1);
    Matrix e12 = root_vector(F, 2, Root{0, 1});
    Matrix e21 = root_vector(F, 2, Root{1, 0});
    CHECK(approx_equal(ad_action(gamma, e12), Scalar::integer(F, 6) * e12));
    CHECK(approx_equal(ad_action(gamma, e21), Scalar::rational(F, Rational(1, 6)) * e21));
    Matrix X = mat2(F, 2, 3, 1, 7);
    CHECK(approx_equal(ad_action(Matrix::identity(F, 2), X), X));
}
