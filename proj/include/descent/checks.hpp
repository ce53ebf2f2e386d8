#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "descent/corpus.hpp"
#include "descent/smoothrate.hpp"

namespace descent {

struct SuiteResult {
    std::string name;
    long samples = 0;
    long failures = 0;
    std::string detail;

    bool pass() const { return failures == 0; }
};

std::string format_suite_line(const SuiteResult& r);

/// Objectives the bulk verification suites run over (one instance per
/// corpus family, plus parameter variants).
const std::vector<Objective>& check_corpus();

/// Uniform point in [-half_width, half_width]^dim kept at least `margin`
/// away from the objective's singular locus, so finite-difference oracles
/// stay valid there.
Vec sample_smooth_point(const Objective& obj, double half_width, double margin,
                        std::mt19937_64& rng);

/// Analytic vs central-difference gradients over the check corpus,
/// n_points per member, relative error <= 1e-6.
SuiteResult check_gradient_consistency(long n_points, std::uint64_t seed);

/// Analytic vs finite-difference Hessians, relative error <= 1e-4.
SuiteResult check_hessian_consistency(long n_points, std::uint64_t seed);

/// armijo_backtrack returns a ladder step satisfying Armijo whose
/// /beta-neighbour fails it (when below delta0), re-checked by evaluation.
SuiteResult check_armijo_maximality(long n_cases, std::uint64_t seed);

/// delta_hat agrees exactly with brute-force enumeration of
/// {beta^n delta0 : n <= 50} filtered by the two strict conditions.
SuiteResult check_delta_hat_oracle(long n_cases, std::uint64_t seed);

/// The descent estimate holds on random diagonal quadratics with known L
/// for delta grids in (0, 1/L].
SuiteResult check_descent_lemma(long n_cases, std::uint64_t seed);

/// The smooth-rate invariant suite: range 0 < h <= delta0, the pointwise
/// Armijo inequality, partition-of-unity sum, in-ball injectivity margin
/// ||H(y1)-H(y2)|| >= (2/9) ||y1-y2||, and a finite-difference smoothness
/// probe of h.
std::vector<SuiteResult> smoothrate_invariant_suite(const Objective& obj,
                                                    const SmoothRate& sr,
                                                    long n_samples, std::uint64_t seed);

} // namespace descent
