#include "doctest.h"

#include "charloc/depth.hpp"
#include "charloc/fuzz.hpp"

using namespace charloc;

namespace {

FieldPtr q5() { return LocalField::qp(5); }
GroupSpec gl2() { return GroupSpec{GroupKind::GL, 2, q5()}; }

Matrix mat2(const FieldPtr& F, Rational a, Rational b, Rational c, Rational d) {
    return Matrix::from_rationals(F, {{a, b}, {c, d}});
}

Matrix diag(const FieldPtr& F, Rational a, Rational b) { return mat2(F, a, 0, 0, b); }

} // namespace

TEST_CASE("torus_of: split, ramified, unramified, and failures") {
    auto G = gl2();
    auto F = G.field;

    TorusData split = torus_of(G, diag(F, 2, 1));
    CHECK(split.is_split_over_k);
    CHECK(split.splitting->degree() == 1);

    TorusData ram = torus_of(G, mat2(F, 1, 1, 5, 1));
    CHECK_FALSE(ram.is_split_over_k);
    CHECK(ram.splitting->e() == 2);
    CHECK(ram.splitting->f() == 1);
    // eigenvalues 1 +- sqrt5: their sum is 2 and product is -4
    Scalar sum = ram.eigenvalues[0] + ram.eigenvalues[1];
    Scalar prod = ram.eigenvalues[0] * ram.eigenvalues[1];
    CHECK(approx_equal(sum, Scalar::integer(ram.splitting, 2)));
    CHECK(approx_equal(prod, Scalar::integer(ram.splitting, -4)));

    // t^2 + 1 splits over Q_5 itself
    TorusData iT = torus_of(G, mat2(F, 0, 1, -1, 0));
    CHECK(iT.is_split_over_k);

    // unramified quadratic: t^2 - 2 with 2 a non-square mod 5
    TorusData ur = torus_of(G, mat2(F, 0, 1, 2, 0));
    CHECK_FALSE(ur.is_split_over_k);
    CHECK(ur.splitting->f() == 2);
    CHECK(ur.splitting->e() == 1);

    CHECK_THROWS_AS_MESSAGE(torus_of(G, diag(F, 2, 2)), Error, doctest::Contains("NotRegular"));

    // wild rejection: ramification index would be divisible by p
    GroupSpec g5{GroupKind::GL, 5, q5()};
    Matrix wild(F, 5, 5);
    for (int i = 0; i + 1 < 5; ++i) wild.set(i, i + 1, Scalar::one(F));
    wild.set(4, 0, Scalar::integer(F, 5));
    CHECK_THROWS_AS_MESSAGE(torus_of(g5, wild), Error, doctest::Contains("WildTorus"));
}

TEST_CASE("s_alpha, s_gamma, Weyl discriminant") {
    auto G = gl2();
    auto F = G.field;

    TorusData six = torus_of(G, diag(F, 6, 1));
    CHECK(s_alpha(six, 0, 1) == 1);
    CHECK(s_alpha(six, 1, 0) == 1);
    CHECK(s_gamma(six) == 1);
    CHECK(weyl_discriminant_valuation(six, six.gamma) == 2);

    TorusData two = torus_of(G, diag(F, 2, 1));
    CHECK(s_gamma(two) == 0);
    CHECK(weyl_discriminant_valuation(two, two.gamma) == 0);

    TorusData ram = torus_of(G, mat2(F, 1, 1, 5, 1));
    CHECK(s_alpha(ram, 0, 1) == Rational(1, 2));
    CHECK(s_gamma(ram) == Rational(1, 2));
    CHECK(weyl_discriminant_valuation(ram, ram.gamma) == 1);

    TorusData iT = torus_of(G, mat2(F, 0, 1, -1, 0));
    CHECK(s_gamma(iT) == 0);
}

TEST_CASE("certify") {
    auto G = gl2();
    auto F = G.field;
    Certificates c1 = certify(G, diag(F, 2, 2));
    CHECK_FALSE(c1.regular);
    CHECK(c1.compact);
    Certificates c2 = certify(G, mat2(F, 0, 1, 5, 0));
    CHECK(c2.regular);
    CHECK_FALSE(c2.compact);
    Certificates c3 = certify(G, mat2(F, 1, 1, 5, 1));
    CHECK(c3.regular);
    CHECK(c3.compact);
}

TEST_CASE("constancy radius instances") {
    auto G = gl2();
    auto F = G.field;
    auto radius_of = [&](const Matrix& gamma, const Rational& rho) {
        TorusData T = torus_of(G, gamma);
        return constancy_radius(G, T, rho);
    };
    ConstancyRadius r1 = radius_of(diag(F, 6, 1), Rational(0));
    CHECK(r1.s == 1);
    CHECK(r1.radius == Depth::at_plus(Rational(2)));
    ConstancyRadius r2 = radius_of(mat2(F, 1, 1, 5, 1), Rational(3, 2));
    CHECK(r2.s == Rational(1, 2));
    CHECK(r2.radius == Depth::at_plus(Rational(2)));
    ConstancyRadius r3 = radius_of(diag(F, 2, 1), Rational(0));
    CHECK(r3.s == 0);
    CHECK(r3.radius == Depth::at_plus(Rational(0)));

    TorusData noncompact = torus_of(G, mat2(F, 0, 1, 5, 0));
    CHECK_THROWS_AS_MESSAGE(constancy_radius(G, noncompact, Rational(0)), Error,
                            doctest::Contains("NotCompact"));
}

TEST_CASE("neighborhood descriptor accepts exactly the coset") {
    auto G = gl2();
    auto F = G.field;
    TorusData T = torus_of(G, diag(F, 6, 1));
    NeighborhoodDescriptor D = neighborhood_descriptor(G, T, Rational(0));
    CHECK(D.radius().radius == Depth::at_plus(Rational(2)));

    Matrix gamma = diag(F, 6, 1);
    CHECK(D.accepts(gamma * diag(F, 1 + 625, 1)));
    CHECK(D.accepts(gamma));
    CHECK_FALSE(D.accepts(gamma * diag(F, 6, 1)));
    CHECK_FALSE(D.accepts(mat2(F, 6, 1, 0, 1))); // does not commute with gamma
    CHECK(D.congruences().size() == 2);
}

TEST_CASE("check_deepness") {
    auto G = gl2();
    auto F = G.field;
    TorusData T = torus_of(G, diag(F, 6, 1));
    DeepnessReport rep = check_deepness(G, T, diag(F, 1 + 25, 1 + 125));
    CHECK(rep.pass);
    CHECK(rep.s_before == 1);
    CHECK(rep.s_after == 1);
    CHECK(rep.disc_before == rep.disc_after);
    CHECK(rep.compact_after);

    DeepnessReport trivial = check_deepness(G, T, Matrix::identity(F, 2));
    CHECK(trivial.pass);

    CHECK_THROWS_AS_MESSAGE(check_deepness(G, T, diag(F, 6, 1)), Error,
                            doctest::Contains("PreconditionViolated"));
}

TEST_CASE("invariance of s under conjugation and central twists") {
    auto G = gl2();
    auto F = G.field;
    std::vector<Matrix> gammas = {diag(F, 6, 1), mat2(F, 1, 1, 5, 1), mat2(F, 0, 1, 2, 0)};
    Rng rng(31337);
    for (const auto& gamma : gammas) {
        Rational s = s_gamma(torus_of(G, gamma));
        for (int i = 0; i < 20; ++i) {
            Matrix g = sample_parahoric(G, ApartmentPoint::origin(2), rng);
            CHECK(s_gamma(torus_of(G, g * gamma * g.inverse())) == s);
        }
        for (int i = 0; i < 10; ++i) {
            long u = 1 + rng.below(24);
            Matrix z = diag(F, Rational(u), Rational(u));
            CHECK(s_gamma(torus_of(G, gamma * z)) == s);
        }
    }
}

TEST_CASE("torus membership and the t/t-perp decomposition") {
    auto G = gl2();
    auto F = G.field;
    TorusData six = torus_of(G, diag(F, 6, 1));

    CHECK(torus_membership(six, diag(F, 1 + 25, 1 + 25 * 7), Depth::at(Rational(2))));
    CHECK(torus_membership(six, Matrix::identity(F, 2), Depth::at(Rational(9))));
    CHECK(torus_membership(six, diag(F, 6, 1), Depth::at(Rational(1))));
    CHECK_FALSE(torus_membership(six, diag(F, 6, 1), Depth::at_plus(Rational(1))));
    CHECK(torus_membership(six, diag(F, 6, 1), Depth::at(Rational(0)))); // compact
    CHECK_FALSE(torus_membership(six, diag(F, 5, 1), Depth::at(Rational(0))));
    CHECK_THROWS_AS_MESSAGE((void)torus_membership(six, mat2(F, 1, 1, 0, 1), Depth::at(Rational(1))), Error,
                            doctest::Contains("NotInTorus"));

    // split case: projection is diagonal extraction
    auto [Y, Z] = t_perp_decompose(six, mat2(F, -5, 1, -25, 5));
    CHECK(approx_equal(Y, diag(F, -5, 5).coerced_to(six.splitting)));
    CHECK(approx_equal(Z, mat2(F, 0, 1, -25, 0).coerced_to(six.splitting)));

    // idempotence on t
    auto [Y2, Z2] = t_perp_decompose(six, diag(F, 3, 8));
    CHECK(approx_equal(Y2, diag(F, 3, 8).coerced_to(six.splitting)));
    CHECK(Z2.is_zero_at_precision());

    // ramified torus: Y commutes with gamma, Z has zero diagonal in the eigenbasis
    TorusData ram = torus_of(G, mat2(F, 1, 1, 5, 1));
    Matrix X = mat2(F, 0, 1, -25, 0);
    auto [Yr, Zr] = t_perp_decompose(ram, X);
    Matrix gammaE = ram.gamma.coerced_to(ram.splitting);
    CHECK(approx_equal(Yr * gammaE, gammaE * Yr));
    CHECK(approx_equal(Yr + Zr, X.coerced_to(ram.splitting)));
    Matrix inB = ram.eigenbasis_inv * Zr * ram.eigenbasis;
    CHECK(inB.at(0, 0).is_zero_at_precision());
    CHECK(inB.at(1, 1).is_zero_at_precision());
}

TEST_CASE("apartment membership certificate") {
    auto G = gl2();
    auto F = G.field;
    ApartmentPoint x0 = ApartmentPoint::origin(2);
    ApartmentPoint xh{{Rational(1, 2), Rational(0)}};

    TorusData split = torus_of(G, diag(F, 6, 1));
    CHECK(point_in_apartment(split, G, x0));
    CHECK(point_in_apartment(split, G, xh)); // split torus: the whole standard apartment

    TorusData ram = torus_of(G, mat2(F, 1, 1, 5, 1));
    CHECK(point_in_apartment(ram, G, xh));
    CHECK_FALSE(point_in_apartment(ram, G, x0)); // Eq-3 stability fails at the origin

    TorusData ur = torus_of(G, mat2(F, 0, 1, 2, 0));
    CHECK(point_in_apartment(ur, G, x0)); // unramified torus fixes the origin
}

TEST_CASE("Eq 3 compatibility: decomposition components stay in the lattice") {
    auto G = gl2();
    auto F = G.field;
    Rng rng(777);
    struct Case {
        Matrix gamma;
        ApartmentPoint x;
        std::vector<Rational> breaks;
    };
    std::vector<Case> cases = {
        {mat2(F, 6, 0, 0, 1), ApartmentPoint::origin(2), {-1, 0, 1}},
        {mat2(F, 1, 1, 5, 1), ApartmentPoint{{Rational(1, 2), Rational(0)}},
         {Rational(-1, 2), Rational(0), Rational(1, 2)}},
        {mat2(F, 0, 1, 2, 0), ApartmentPoint::origin(2), {-1, 0, 1}},
    };
    for (const auto& cs : cases) {
        TorusData T = torus_of(G, cs.gamma);
        GroupSpec over_e{GroupKind::GL, 2, T.splitting};
        for (int i = 0; i < 120; ++i) {
            const Rational& r = cs.breaks[rng.below((long)cs.breaks.size())];
            // random element of g_{x,r}: combination of lattice generators
            Matrix X(F, 2, 2);
            for (const auto& gen : lattice_generators(G, cs.x, Depth::at(r)))
                X = X + Scalar::integer(F, rng.below(25)) * gen;
            if (X.is_zero_at_precision()) continue;
            auto [Y, Z] = t_perp_decompose(T, X);
            CHECK(lattice_membership(over_e, Y, cs.x, Depth::at(r)));
            CHECK(lattice_membership(over_e, Z, cs.x, Depth::at(r)));
        }
    }
}

TEST_CASE("compact torus elements stabilize the lattice chain") {
    auto G = gl2();
    auto F = G.field;
    Rng rng(4242);
    struct Case {
        Matrix gamma;
        ApartmentPoint x;
    };
    std::vector<Case> cases = {
        {mat2(F, 6, 0, 0, 1), ApartmentPoint::origin(2)},
        {mat2(F, 1, 1, 5, 1), ApartmentPoint{{Rational(1, 2), Rational(0)}}},
        {mat2(F, 0, 1, 2, 0), ApartmentPoint::origin(2)},
    };
    for (const auto& cs : cases) {
        TorusData T = torus_of(G, cs.gamma);
        for (int i = 0; i < 15; ++i) {
            Matrix t = sample_torus_element_compact(G, T, rng);
            for (const Rational& b : lattice_break_reps(G, cs.x, F)) {
                for (const auto& gen : lattice_generators(G, cs.x, Depth::at(b))) {
                    CHECK(lattice_membership(G, ad_action(t, gen), cs.x, Depth::at(b)));
                    CHECK(lattice_membership(G, ad_action(t.inverse(), gen), cs.x, Depth::at(b)));
                }
            }
        }
    }
}
