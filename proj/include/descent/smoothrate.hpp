#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "descent/objective.hpp"
#include "descent/steppers.hpp"

namespace descent {

struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Vec& x) const;
    /// Uniform sample; degenerate axes (lo == hi) yield that coordinate.
    Vec sample(std::mt19937_64& rng) const;
    void validate(bool require_nondegenerate) const;
};

/// A finite ball cover of a box: grid centers z_j, radii r(z_j) = spacing
/// * sqrt(dim) (so balls overlap with margin), and per-ball Lipschitz
/// constants L(z_j) for grad f, already raised so that every step
/// d <= 1/L(z_j) satisfies the Armijo inequality with the alpha it was
/// built for.
struct Covering {
    std::vector<Vec> centers;
    std::vector<double> radii;
    std::vector<double> lipschitz;
    Box box;
    double spacing = 0.0;
    double alpha = 0.0; // coefficient the L values were adjusted for
};

enum class RateMode {
    Faithful,  // the 1/10^j (M_j + 1) damping, j in grid enumeration order
    Practical, // 1/(K (M_j + 1)) with K = max number of balls covering a point
};

RateMode rate_mode_from_string(const std::string& s);
std::string to_string(RateMode m);

/// The smooth step-size function h(x) = sum_j c_j phi_j(x)
/// min{1/(2 L(z_j)), delta0, 1}, built over a covering. phi_j are smooth
/// compactly supported bumps normalized to sum to 1 on the box; the grid
/// enumeration is row-major with the last axis fastest, and j in the
/// faithful damping 1/10^j counts from 1 in that order.
struct SmoothRate {
    Covering covering;
    std::vector<double> mj; // M_j = max ||grad phi_j(y1)|| * ||grad f(y2)|| over ball pairs
    double delta0 = 1.0;
    double alpha = 0.5;
    RateMode mode = RateMode::Faithful;
    std::uint64_t seed = 0;
    int max_cover = 1; // K

    std::size_t size() const { return covering.centers.size(); }
};

/// Grid cover of the box with step = spacing. L(z_j) comes from the
/// objective's ball-Lipschitz bound when available, else from its (L, r)
/// field sampled over the ball, else from estimate_local_lipschitz; it is
/// then raised to max(L, L / (2 (1 - alpha))) so 1/L-sized steps satisfy
/// Armijo with coefficient alpha on the ball.
Covering build_covering(const Objective& obj, const Box& box, double spacing,
                        double alpha, std::uint64_t seed = 0);

/// safety * max over n_samples random pairs (y, z) in B(center, radius) of
/// ||grad f(y) - grad f(z)|| / ||y - z||, lower-bounded by the largest
/// sampled Hessian operator norm when the objective has one.
double estimate_local_lipschitz(const Objective& obj, const Vec& center, double radius,
                                int n_samples, double safety, std::uint64_t seed = 0);

SmoothRate build_smooth_rate(const Objective& obj, const Covering& cov, double delta0,
                             double alpha, int mj_samples = 1000,
                             RateMode mode = RateMode::Faithful, std::uint64_t seed = 0);

/// h(x); 0 < h <= delta0 on the box. Throws DomainError outside the box.
double eval_h(const SmoothRate& sr, const Vec& x);

/// All partition values phi_j(x) (they sum to 1 on the box).
std::vector<double> partition_values(const SmoothRate& sr, const Vec& x);

/// Analytic gradient of phi_j at x.
Vec partition_gradient(const SmoothRate& sr, std::size_t j, const Vec& x);

/// One step of the continuous map H(x) = x - h(x) grad f(x). Verifies the
/// Armijo inequality f(H(x)) - f(x) <= -alpha h(x) ||grad f(x)||^2 and
/// throws InvariantError naming x on violation. The caller decides what to
/// do when next leaves the box (the construction is box-local).
StepOutcome continuous_step(const Objective& obj, const SmoothRate& sr, const Vec& x);

} // namespace descent
