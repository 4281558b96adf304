#include "doctest.h"

#include "charloc/filtration.hpp"
#include "charloc/poly.hpp"
#include "charloc/scalar_io.hpp"

using namespace charloc;

namespace {

FieldPtr q5() { return LocalField::qp(5); }

FieldPtr q5_sqrt5() {
    return LocalField::make_extension(q5(), 1, {{Rational(-5)}, {Rational(0)}}); // t^2 - 5
}

Rational rat(long a, long b = 1) { return Rational(a, b); }

} // namespace

TEST_CASE("valuation of literals") {
    auto F = q5();
    CHECK(Scalar::one(F).val_exact() == 0);
    CHECK(Scalar::integer(F, 20).val_exact() == 1);
    CHECK(Scalar::rational(F, rat(1, 5)).val_exact() == -1);
    CHECK(Scalar::zero(F).val().is_infinite());

    auto E = q5_sqrt5();
    CHECK(E->e() == 2);
    CHECK(E->f() == 1);
    Scalar pi = Scalar::uniformizer(E);
    CHECK(pi.val_exact() == rat(1, 2));
    // value group is (1/2)Z: p still has valuation 1
    CHECK(Scalar::integer(E, 5).val_exact() == 1);
}

TEST_CASE("field operations and tracked valuations") {
    auto F = q5();
    Scalar six = Scalar::integer(F, 6);
    Scalar one = Scalar::one(F);
    CHECK((six - one).val_exact() == 1);

    // 1/(1+5) - 1 = -5/6
    Scalar z = one / six - one;
    CHECK(z.val_exact() == 1);
    CHECK(approx_equal(z, Scalar::rational(F, rat(-5, 6))));

    auto E = q5_sqrt5();
    Scalar pi = Scalar::uniformizer(E);
    Scalar sq = pi * pi;
    CHECK(sq.val_exact() == 1);
    CHECK(approx_equal(sq, Scalar::integer(E, 5)));

    // inverse in the ramified step: 1/sqrt(5) has valuation -1/2
    Scalar inv = pi.inverse();
    CHECK(inv.val_exact() == rat(-1, 2));
    CHECK(approx_equal(pi * inv, Scalar::one(E)));
}

TEST_CASE("make_extension validates the tower") {
    auto F = q5();
    // unramified quadratic preserves the value group
    auto U = LocalField::make_extension(F, 2, {});
    CHECK(U->e() == 1);
    CHECK(U->f() == 2);
    CHECK(Scalar::integer(U, 5).val_exact() == 1);

    CHECK_THROWS_AS_MESSAGE(
        LocalField::make_extension(F, 1, {{rat(-5)}, {rat(0)}, {rat(0)}, {rat(0)}, {rat(0)}}), Error,
        doctest::Contains("WildExtension"));
    CHECK_THROWS_AS_MESSAGE(LocalField::make_extension(F, 1, {{rat(-25)}, {rat(0)}}), Error,
                            doctest::Contains("NotEisenstein"));
    CHECK_THROWS_AS_MESSAGE(LocalField::make_extension(F, 1, {{rat(-1)}, {rat(0)}}), Error,
                            doctest::Contains("NotEisenstein"));
}

TEST_CASE("ultrametric and multiplicativity over random samples") {
    auto F = q5();
    auto E = q5_sqrt5();
    Rng rng(20240811);
    auto random_scalar = [&](const FieldPtr& field) {
        long p = field->p();
        std::vector<Rational> coords(field->degree());
        for (auto& c : coords) {
            long u = rng.below(p * p * p);
            long m = rng.below(7) - 3;
            c = u == 0 ? Rational(0)
                       : Rational(u) * (m >= 0 ? Rational(pow_int(p, m)) : Rational(1, pow_int(p, -m)));
        }
        return Scalar::from_tower_coords(field, coords);
    };
    for (int i = 0; i < 10000; ++i) {
        const FieldPtr& field = i % 2 ? E : F;
        Scalar a = random_scalar(field), b = random_scalar(field), c = random_scalar(field);
        (void)c;
        if (a.is_zero_at_precision() || b.is_zero_at_precision()) continue;
        Rational va = a.val_exact(), vb = b.val_exact();
        CHECK((a * b).val_exact() == va + vb);
        Scalar sum = a + b;
        Valuation vs = sum.val();
        Rational lower = va < vb ? va : vb;
        if (vs.is_finite()) {
            CHECK(vs.value() >= lower);
            if (va != vb) CHECK(vs.value() == lower);
        } else {
            CHECK(va == vb); // cancellation needs equal valuations
        }
    }
}

TEST_CASE("tower coercion preserves valuation") {
    auto F = q5();
    auto E = q5_sqrt5();
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        long u = 1 + rng.below(600);
        long m = rng.below(9) - 4;
        Scalar a = Scalar::rational(F, Rational(u) * (m >= 0 ? Rational(pow_int(5, m)) : Rational(1, pow_int(5, -m))));
        CHECK(a.coerced_to(E).val_exact() == a.val_exact());
    }
}

TEST_CASE("frac_principal and QmodZ") {
    auto F = q5();
    CHECK(frac_principal(Scalar::integer(F, 7)).is_zero());
    CHECK(frac_principal(Scalar::rational(F, rat(7, 5))).value() == rat(2, 5));
    CHECK(frac_principal(Scalar::rational(F, rat(1, 25))).value() == rat(1, 25));
    CHECK(frac_principal(Scalar::rational(F, rat(1, 25))).order() == 25);

    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        long ua = rng.below(600), ub = rng.below(600);
        long ma = rng.below(6) - 3, mb = rng.below(6) - 3;
        auto mk = [&](long u, long m) {
            return Scalar::rational(F, Rational(u) * (m >= 0 ? Rational(pow_int(5, m)) : Rational(1, pow_int(5, -m))));
        };
        Scalar a = mk(ua, ma), b = mk(ub, mb);
        CHECK(frac_principal(a + b) == frac_principal(a) + frac_principal(b));
    }
}

TEST_CASE("precision honesty") {
    auto F = q5(); // default absolute precision 24
    Scalar beyond = Scalar::rational(F, Rational(1) + Rational(pow_int(5, 24)));
    Scalar one = Scalar::one(F);
    Scalar diff = beyond - one;
    CHECK(diff.is_zero_at_precision());
    CHECK_FALSE(diff.is_exact_zero());
    Valuation v = diff.val();
    CHECK(v.kind() == ValKind::AtLeast);
    CHECK(v.value() == 24);
    CHECK_THROWS_AS(diff.val_exact(), Error);
    CHECK(diff.val_at_least(rat(10)));
    CHECK_THROWS_AS((void)diff.val_at_least(rat(30)), Error);
    CHECK_THROWS_AS((void)(one / diff), Error);

    // deep literal: only the bound survives the fixed window
    Scalar deep = Scalar::rational(F, Rational(pow_int(5, 30)));
    CHECK(deep.is_zero_at_precision());

    // raising the precision resolves it
    auto F40 = LocalField::qp(5, 40);
    Scalar diff40 = Scalar::rational(F40, Rational(1) + Rational(pow_int(5, 24))) - Scalar::one(F40);
    CHECK(diff40.val_exact() == 24);
}

TEST_CASE("hensel_factor: quadratics over Q_5 and its ramified quadratic") {
    auto F = q5();
    // t^2 - 2t - 4: discriminant 20 has odd valuation, no roots in Q_5
    Poly f = {Scalar::integer(F, -4), Scalar::integer(F, -2), Scalar::one(F)};
    auto fac = hensel_factor(f, F);
    CHECK(fac.roots.empty());
    REQUIRE(fac.residual.size() == 1);
    CHECK(fac.residual[0].size() == 3);

    auto E = q5_sqrt5();
    auto facE = hensel_factor(f, E);
    REQUIRE(facE.roots.size() == 2);
    Scalar pi = Scalar::uniformizer(E);
    Scalar r1 = Scalar::one(E) + pi, r2 = Scalar::one(E) - pi;
    bool match = (approx_equal(facE.roots[0], r1) && approx_equal(facE.roots[1], r2)) ||
                 (approx_equal(facE.roots[0], r2) && approx_equal(facE.roots[1], r1));
    CHECK(match);
    CHECK(facE.residual.empty());
    for (const auto& r : facE.roots) {
        Scalar value = poly_eval(poly_coerced(f, E), r);
        CHECK(value.is_zero_at_precision());
        Valuation v = value.val();
        CHECK(v.value() >= 20); // roots carry nearly full precision
    }
}

TEST_CASE("hensel_factor: t^2 + 1 over Q_5 and clustered residues") {
    auto F = q5();
    Poly f = {Scalar::one(F), Scalar::zero(F), Scalar::one(F)};
    auto fac = hensel_factor(f, F);
    REQUIRE(fac.roots.size() == 2);
    std::vector<long> residues;
    for (const auto& r : fac.roots) residues.push_back(r.residue().c[0]);
    std::sort(residues.begin(), residues.end());
    CHECK(residues == std::vector<long>{2, 3});

    // roots 1 and 6 share the residue 1: the splitting recursion separates them
    Poly g = {Scalar::integer(F, 6), Scalar::integer(F, -7), Scalar::one(F)};
    auto facg = hensel_factor(g, F);
    REQUIRE(facg.roots.size() == 2);
    bool found1 = false, found6 = false;
    for (const auto& r : facg.roots) {
        if (approx_equal(r, Scalar::one(F))) found1 = true;
        if (approx_equal(r, Scalar::integer(F, 6))) found6 = true;
    }
    CHECK(found1);
    CHECK(found6);

    // squarefree precondition
    Poly sq = {Scalar::integer(F, 4), Scalar::integer(F, -4), Scalar::one(F)}; // (t-2)^2
    CHECK_THROWS_AS_MESSAGE(hensel_factor(sq, F), Error, doctest::Contains("Inseparable"));
}

TEST_CASE("hensel_factor over the ramified quadratic: valuation splitting") {
    auto E = q5_sqrt5();
    // t^2 - 5 = (t - pi)(t + pi), roots of valuation 1/2
    Poly f = {Scalar::integer(E, -5), Scalar::zero(E), Scalar::one(E)};
    auto fac = hensel_factor(f, E);
    REQUIRE(fac.roots.size() == 2);
    for (const auto& r : fac.roots) CHECK(r.val_exact() == Rational(1, 2));
    Scalar prod = fac.roots[0] * fac.roots[1];
    CHECK(approx_equal(prod, Scalar::integer(E, -5)));
}

TEST_CASE("sqrt_unit lifts residue square roots") {
    auto F = q5();
    Scalar a = Scalar::integer(F, 6);
    Scalar r = sqrt_unit(a);
    CHECK(approx_equal(r * r, a));
    CHECK_THROWS_AS(sqrt_unit(Scalar::integer(F, 2)), Error); // 2 is not a QR mod 5
}

TEST_CASE("scalar literal grammar") {
    auto F = q5();
    Scalar a = parse_scalar("1/5", F);
    CHECK(a.val_exact() == -1);
    Scalar b = parse_scalar("-4*5^2", F); // also accepts the unicode minus
    CHECK(b.val_exact() == 2);
    Scalar b2 = parse_scalar("−4*5^2", F);
    CHECK(approx_equal(b, b2));
    CHECK_THROWS_AS_MESSAGE(parse_scalar("1//5", F), Error, doctest::Contains("ParseError"));
    CHECK_THROWS_AS(parse_scalar("", F), Error);
    CHECK_THROWS_AS(parse_scalar("x+1", F), Error);

    // grammar uses the field's p for the shift
    CHECK(parse_scalar("10/2*5^-1", F).val_exact() == 0);

    // round trip at the value's precision
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        long u = 1 + rng.below(3000);
        long m = rng.below(9) - 4;
        Scalar v =
            Scalar::rational(F, Rational(u) * (m >= 0 ? Rational(pow_int(5, m)) : Rational(1, pow_int(5, -m))));
        Scalar back = parse_scalar(render_scalar(v), F);
        CHECK(approx_equal(v, back));
    }
    CHECK(render_scalar(Scalar::zero(F)) == "0");
    Scalar az = Scalar::approx_zero(F, Rational(24));
    CHECK(render_scalar(az) == "O(p^24)");
    CHECK(parse_scalar("O(p^24)", F).is_zero_at_precision());

    // extension literals as coordinate vectors
    auto E = q5_sqrt5();
    Scalar pi = parse_scalar("[0, 1]", E);
    CHECK(pi.val_exact() == Rational(1, 2));
    Scalar again = parse_scalar(render_scalar(pi), E);
    CHECK(approx_equal(pi, again));
}

TEST_CASE("residue field arithmetic in the unramified quadratic") {
    auto F = q5();
    auto U = LocalField::make_extension(F, 2, {});
    CHECK(U->res_all_elements().size() == 25);
    // u generates F_25 over F_5; its square must use the reduction table
    ResidueElem u{std::vector<long>{0, 1}};
    ResidueElem u2 = U->res_mul(u, u);
    CHECK_FALSE(u2.is_zero());
    ResidueElem inv = U->res_inv(u);
    CHECK(U->res_mul(u, inv) == U->res_one());
    // Frobenius-stable count of squares: (q-1)/2 nonzero squares
    int squares = 0;
    for (const auto& e : U->res_all_elements())
        if (!e.is_zero() && U->res_is_square(e)) ++squares;
    CHECK(squares == 12);
}
