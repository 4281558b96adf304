#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "charloc/depth.hpp"

namespace charloc {

/// One harness run: the group, a base point in the torus's apartment, the
/// torus source gamma, the break values to exercise, and the trial budget.
struct FuzzConfig {
    GroupSpec group;
    ApartmentPoint x;
    Matrix gamma;
    std::vector<Rational> depths;
    long trials = 1000;
    uint64_t seed = 1;

    FuzzConfig(GroupSpec g, ApartmentPoint pt, Matrix gm)
        : group(std::move(g)), x(std::move(pt)), gamma(std::move(gm)) {}
};

struct FuzzFailure {
    long trial = 0;
    std::string detail; // replayable witness description
};

struct FuzzReport {
    std::string lemma;
    long trials = 0;
    long hypothesis_fired = 0;
    long vacuous = 0;
    long precision_aborts = 0;
    std::vector<FuzzFailure> failures;
    long wall_ms = 0;

    bool passed() const { return failures.empty(); }
};

/// Nilpotent depth is preserved by the t/t^perp projection: sample X
/// nilpotent of exact depth r, split X = Y + Z, assert depth(Z) = r.
FuzzReport fuzz_lemma32(const FuzzConfig& cfg);

/// Twisting moves t^perp by exactly s(gamma): sample Z in t^perp of exact
/// depth -t, assert ^gamma Z - Z is NOT in g_{x,(-t+s)+}.
FuzzReport fuzz_lemma33(const FuzzConfig& cfg);

/// If a nilpotent X in g_{x,(-2r)+} has ^gamma X - X in g_{x,(-r)+}, then X
/// lies in g_{x,(-r-s)+}.  Vacuous trials (hypothesis not fired) are counted
/// separately; the sampler is tuned so the hypothesis fires often.
FuzzReport fuzz_prop34(const FuzzConfig& cfg);

/// s(gamma gamma') = s(gamma) for gamma' in T_{s+}, the product stays
/// compact regular, and s is conjugation invariant.
FuzzReport fuzz_deepness(const FuzzConfig& cfg);

/// Re-run a single trial deterministically and return its record; failures
/// replay to failures.
std::string replay_trial(const FuzzConfig& cfg, const std::string& lemma, long trial);

/// gamma' = 1 + p^m h(gamma) for a random integer polynomial h, scaled so
/// every eigenvalue perturbation has valuation > s.  Lies in T(k) and is
/// Galois-symmetric by construction (a polynomial in gamma over k).
Matrix sample_torus_element_above(const GroupSpec& G, const TorusData& T, const Rational& s, Rng& rng);

/// Random compact element of T(k) = k[gamma]^x: a polynomial in gamma with
/// unit eigenvalues.
Matrix sample_torus_element_compact(const GroupSpec& G, const TorusData& T, Rng& rng);

} // namespace charloc
