#include "charloc/fuzz.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace charloc {

namespace {

bool is_precision_abort(const Error& e) {
    return e.kind() == ErrorKind::InsufficientPrecision || e.kind() == ErrorKind::PrecisionTooLowToSeparateRoots;
}

struct Ctx {
    const FuzzConfig& cfg;
    TorusData torus;
    Rational s;
    GroupSpec gl;     // GL shape over k
    GroupSpec gl_ext; // GL shape over E
};

Ctx make_ctx(const FuzzConfig& cfg) {
    cfg.group.validate();
    if (cfg.trials < 1) fail(ErrorKind::MalformedInput, "trials must be >= 1");
    TorusData T = torus_of(cfg.group, cfg.gamma);
    if (!point_in_apartment(T, cfg.group, cfg.x))
        fail(ErrorKind::PointNotFixed, "x is not in the apartment of gamma's torus");
    Rational s = s_gamma(T);
    GroupSpec gl{GroupKind::GL, cfg.group.n, cfg.group.field};
    GroupSpec gle{GroupKind::GL, cfg.group.n, T.splitting};
    return Ctx{cfg, std::move(T), std::move(s), std::move(gl), std::move(gle)};
}

void require_breaks(const FuzzConfig& cfg, bool nilpotent_breaks) {
    if (cfg.depths.empty()) fail(ErrorKind::MalformedInput, "no depths requested");
    for (const auto& d : cfg.depths) {
        bool ok = nilpotent_breaks ? is_nilpotent_break(cfg.x, d)
                                   : is_lattice_break(cfg.group, cfg.x, cfg.group.field, d);
        if (!ok)
            fail(ErrorKind::NotABreak, "requested depth " + rational_str(d) + " is not a break at x = " +
                                           cfg.x.render());
    }
}

// h(gamma) for a random integer polynomial h of degree < n, together with
// the eigenvalues h(lambda_i) over E
void random_poly_element(const GroupSpec& G, const TorusData& T, const Matrix& gamma, Rng& rng,
                         std::vector<Scalar>& eigen_out, Matrix& matrix_out) {
    const FieldPtr& k = G.field;
    long p = k->p();
    int n = G.n;
    std::vector<Rational> coeffs;
    for (int i = 0; i < n; ++i) {
        long c = rng.below(p * p) - p * p / 2;
        coeffs.push_back(Rational(c));
    }
    Matrix acc(k, n, n);
    Matrix power = Matrix::identity(k, n);
    for (int i = 0; i < n; ++i) {
        acc = acc + Scalar::rational(k, coeffs[i]) * power;
        power = power * gamma;
    }
    eigen_out.clear();
    const FieldPtr& E = T.splitting;
    for (const auto& lam : T.eigenvalues) {
        Scalar v = Scalar::zero(E);
        Scalar lp = Scalar::one(E);
        for (int i = 0; i < n; ++i) {
            v = v + Scalar::rational(E, coeffs[i]) * lp;
            lp = lp * lam;
        }
        eigen_out.push_back(v);
    }
    matrix_out = acc;
}

} // namespace

Matrix sample_torus_element_above(const GroupSpec& G, const TorusData& T, const Rational& s, Rng& rng) {
    const FieldPtr& k = G.field;
    int n = G.n;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<Scalar> hvals;
        Matrix h(k, n, n);
        random_poly_element(G, T, T.gamma, rng, hvals, h);
        Rational vmin;
        bool ok = true, seen = false;
        for (const auto& v : hvals) {
            Valuation val = v.val();
            if (!val.is_finite()) {
                ok = false;
                break;
            }
            if (!seen || val.value() < vmin) {
                vmin = val.value();
                seen = true;
            }
        }
        if (!ok || !seen) continue;
        long m = floor_long(s - vmin) + 1;
        if (m < 0) m = 0;
        m += rng.below(3);
        Scalar scale = Scalar::rational(k, Rational(pow_int(k->p(), m)));
        return Matrix::identity(k, n) + scale * h;
    }
    fail(ErrorKind::Internal, "torus perturbation sampler stalled");
}

Matrix sample_torus_element_compact(const GroupSpec& G, const TorusData& T, Rng& rng) {
    for (int attempt = 0; attempt < 128; ++attempt) {
        std::vector<Scalar> qvals;
        Matrix q(G.field, G.n, G.n);
        random_poly_element(G, T, T.gamma, rng, qvals, q);
        bool units = true;
        for (const auto& v : qvals) {
            Valuation val = v.val();
            if (!val.is_finite() || val.value() != 0) {
                units = false;
                break;
            }
        }
        if (units) return q;
    }
    fail(ErrorKind::Internal, "compact torus sampler stalled");
}

namespace {

struct TrialResult {
    bool fired = true;
    bool ok = true;
    std::string record;
};

TrialResult trial_lemma32(const Ctx& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    Rational r = cfg.depths[rng.below((long)cfg.depths.size())];
    Matrix X = sample_nilpotent(ctx.gl, cfg.x, Depth::at(r), rng);
    auto [Y, Z] = t_perp_decompose(ctx.torus, X);
    Depth dz = element_lattice_depth(ctx.gl_ext, Z, cfg.x);
    TrialResult out;
    out.ok = dz == Depth::at(r);
    std::ostringstream os;
    os << "r=" << r << " X=" << X.render() << " depth(Z)=" << dz.render();
    out.record = os.str();
    return out;
}

TrialResult trial_lemma33(const Ctx& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    const FieldPtr& k = cfg.group.field;
    long base;
    {
        Rational lo = cfg.depths[0];
        for (const auto& d : cfg.depths)
            if (d < lo) lo = d;
        base = floor_long(lo) - 1;
    }
    for (int attempt = 0; attempt < 32; ++attempt) {
        Matrix M(k, cfg.group.n, cfg.group.n);
        for (int i = 0; i < cfg.group.n; ++i)
            for (int j = 0; j < cfg.group.n; ++j) {
                long m = base + rng.below(4);
                long p = k->p();
                long u = rng.below(p * p);
                if (u == 0) continue;
                Rational q = m >= 0 ? Rational(BigInt(u) * pow_int(p, m)) : Rational(BigInt(u), pow_int(p, -m));
                M.set(i, j, Scalar::rational(k, q));
            }
        auto [Y, Z] = t_perp_decompose(ctx.torus, M);
        if (Z.is_zero_at_precision()) continue;
        Depth d = element_lattice_depth(ctx.gl_ext, Z, cfg.x);
        Matrix moved = ad_action(ctx.torus.gamma.coerced_to(ctx.torus.splitting), Z) - Z;
        bool inside = lattice_membership(ctx.gl_ext, moved, cfg.x, Depth::at_plus(d.value + ctx.s));
        TrialResult out;
        out.ok = !inside;
        std::ostringstream os;
        os << "-t=" << d.render() << " Z=" << Z.render();
        out.record = os.str();
        return out;
    }
    fail(ErrorKind::InsufficientPrecision, "lemma33 sampler found no usable t-perp part");
}

TrialResult trial_prop34(const Ctx& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    Rational r = cfg.depths[rng.below((long)cfg.depths.size())];
    // nilpotent depth in (-2r, -2r+3]; half the time force d > -r so the
    // hypothesis fires
    std::vector<Rational> cands, deep_cands;
    std::vector<Rational> fracs;
    for (int i = 0; i < cfg.group.n; ++i)
        for (int j = 0; j < cfg.group.n; ++j) {
            if (i == j) continue;
            Rational fr = frac_part(cfg.x.offset(i, j));
            if (std::find(fracs.begin(), fracs.end(), fr) == fracs.end()) fracs.push_back(fr);
        }
    for (const Rational& fr : fracs) {
        for (BigInt kk = ceil_big(-2 * r - fr); Rational(kk) + fr <= -2 * r + 3; ++kk) {
            Rational v = fr + Rational(kk);
            if (v <= -2 * r || v > -2 * r + 3) continue;
            if (std::find(cands.begin(), cands.end(), v) != cands.end()) continue;
            cands.push_back(v);
            if (v > -r) deep_cands.push_back(v);
        }
    }
    const auto& pool = (!deep_cands.empty() && rng.below(2) == 0) ? deep_cands : cands;
    Rational d = pool[rng.below((long)pool.size())];
    Matrix X = sample_nilpotent(ctx.gl, cfg.x, Depth::at(d), rng);
    Matrix moved = ad_action(ctx.torus.gamma, X) - X;
    bool hypothesis = lattice_membership(ctx.gl, moved, cfg.x, Depth::at_plus(-r));
    TrialResult out;
    out.fired = hypothesis;
    if (hypothesis) out.ok = lattice_membership(ctx.gl, X, cfg.x, Depth::at_plus(-r - ctx.s));
    std::ostringstream os;
    os << "r=" << r << " depth(X)=" << d << " fired=" << (hypothesis ? 1 : 0) << " X=" << X.render();
    out.record = os.str();
    return out;
}

TrialResult trial_deepness(const Ctx& ctx, Rng& rng) {
    const auto& cfg = ctx.cfg;
    Matrix gp = sample_torus_element_above(cfg.group, ctx.torus, ctx.s, rng);
    DeepnessReport rep = check_deepness(cfg.group, ctx.torus, gp);
    TrialResult out;
    out.ok = rep.pass;
    std::ostringstream os;
    os << "gamma'=" << gp.render() << " s_before=" << rep.s_before << " s_after=" << rep.s_after;
    if (out.ok) {
        // conjugation invariance through a fresh eigen-decomposition
        Matrix g = sample_parahoric(ctx.gl, cfg.x, rng);
        Matrix conj = g * cfg.gamma * g.inverse();
        TorusData T2 = torus_of(cfg.group, conj);
        Rational s2 = s_gamma(T2);
        out.ok = s2 == ctx.s;
        os << " s(conj)=" << s2;
    }
    out.record = os.str();
    return out;
}

using TrialFn = TrialResult (*)(const Ctx&, Rng&);

FuzzReport run_harness(const FuzzConfig& cfg, const std::string& lemma, TrialFn fn) {
    auto start = std::chrono::steady_clock::now();
    Ctx ctx = make_ctx(cfg);
    FuzzReport rep;
    rep.lemma = lemma;
    for (long trial = 0; trial < cfg.trials; ++trial) {
        bool done = false;
        for (int attempt = 0; attempt < 8 && !done; ++attempt) {
            Rng rng(Rng::derive(cfg.seed, (uint64_t)trial * 16 + attempt));
            try {
                TrialResult res = fn(ctx, rng);
                ++rep.trials;
                if (res.fired)
                    ++rep.hypothesis_fired;
                else
                    ++rep.vacuous;
                if (!res.ok) rep.failures.push_back(FuzzFailure{trial, res.record});
                done = true;
            } catch (const Error& e) {
                if (!is_precision_abort(e)) throw;
                ++rep.precision_aborts;
            }
        }
        if (!done)
            rep.failures.push_back(FuzzFailure{trial, "precision abort cap reached (resampling livelock)"});
    }
    rep.wall_ms =
        (long)std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
            .count();
    return rep;
}

TrialFn lookup(const std::string& lemma) {
    if (lemma == "lemma32") return trial_lemma32;
    if (lemma == "lemma33") return trial_lemma33;
    if (lemma == "prop34") return trial_prop34;
    if (lemma == "deepness") return trial_deepness;
    fail(ErrorKind::MalformedInput, "unknown lemma id: " + lemma);
}

} // namespace

FuzzReport fuzz_lemma32(const FuzzConfig& cfg) {
    require_breaks(cfg, true);
    return run_harness(cfg, "lemma32", trial_lemma32);
}

FuzzReport fuzz_lemma33(const FuzzConfig& cfg) {
    require_breaks(cfg, false);
    return run_harness(cfg, "lemma33", trial_lemma33);
}

FuzzReport fuzz_prop34(const FuzzConfig& cfg) {
    require_breaks(cfg, false);
    return run_harness(cfg, "prop34", trial_prop34);
}

FuzzReport fuzz_deepness(const FuzzConfig& cfg) {
    FuzzConfig c = cfg;
    if (c.depths.empty()) c.depths.push_back(Rational(0));
    return run_harness(c, "deepness", trial_deepness);
}

std::string replay_trial(const FuzzConfig& cfg, const std::string& lemma, long trial) {
    Ctx ctx = make_ctx(cfg);
    TrialFn fn = lookup(lemma);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Rng rng(Rng::derive(cfg.seed, (uint64_t)trial * 16 + attempt));
        try {
            TrialResult res = fn(ctx, rng);
            return res.record + (res.ok ? " [ok]" : " [FAIL]");
        } catch (const Error& e) {
            if (!is_precision_abort(e)) throw;
        }
    }
    return "[precision abort cap reached]";
}

} // namespace charloc
