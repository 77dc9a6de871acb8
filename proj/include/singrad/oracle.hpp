#pragma once

#include <cstdint>
#include <string>

#include "singrad/params.hpp"

namespace singrad {

/// The four elementary gradient inequalities behind every contraction
/// estimate. I1..I3 hold for 1 < p <= 2; the fourth is the p > 2 variant
/// of I1 with the extra quadratic term on the right-hand side.
enum class Ineq { I1, I2, I3, I3_pgt2 };

std::string to_string(Ineq id);

/// Taylor remainder |x+y|^p - |x|^p - p|x|^{p-2} x.y divided by |y|^p,
/// expressed in the scale-invariant coordinates rho = |x|/|y| and
/// c = cos(angle(x,y)). Evaluated directly for moderate rho and by a
/// Gegenbauer expansion in 1/rho for large rho, so the value is accurate
/// relative to its own size even where the three terms cancel to
/// O(rho^{p-2}). Nonnegative for every p > 1 by convexity.
double ineq1_remainder_rel(double p, double rho, double c);

struct OracleReport {
    Ineq id = Ineq::I1;
    double p = 0.0;
    int dim = 0;
    long long n_samples = 0;
    long long violations = 0;
    double C_estimate = 0.0;
    std::uint64_t seed = 0;
};

/// Randomized falsification run for one inequality: n_samples triples with
/// log-uniform magnitudes in [1e-6, 1e6] and uniform directions in R^dim.
/// C_estimate is the largest observed ratio of the left-hand side to the
/// right-hand side stripped of its constant; violations counts samples
/// where the sign part of I1 fails or a ratio is non-finite. Sampling is
/// split into 64 seed-derived shards reduced in fixed order, so reports
/// are reproducible bit-for-bit and shards could run concurrently.
OracleReport check_ineq(Ineq id, double p, int dim, long long n_samples, std::uint64_t seed);

struct LemmaConstantReport {
    double t = 0.0;
    double delta = 0.0;
    double R = 0.0;
    int n_fields = 0;
    // mapped-ball bound: C (R^p + sup_{|z|<delta}|g| + t^{-p/(p-1)} delta^{-q})
    // with q = (N-1)p - sigma - 2 > 0
    double summand_Rp = 0.0;
    double summand_g_sup = 0.0;
    double summand_tail = 0.0;
    double into_full_C = 0.0;
    double into_remainder_C = 0.0;
    // contraction bounds: C R^{p-1} and C (sup_{|z|<delta}|g| + R^{p-1}
    // + 1/(t delta^{alpha-1}))
    double contraction_Rp1 = 0.0;
    double contraction_tail = 0.0;
    double contraction_I_C = 0.0;
    double contraction_J_C = 0.0;
};

/// Measures the empirical constants in the mapping and contraction bounds
/// for the singular-ball fixed point, with g(x) = |x|/2 as the reference
/// perturbation. Draws n_fields random smooth fields phi (and pairs) of
/// X-norm at most R, evaluates the exact nonlinear expressions against the
/// analytic profile slope, and reports each measured sup-ratio next to the
/// closed-form summands it is tested against. Requires the ball regime and
/// (N-1)p - sigma - 2 > 0.
LemmaConstantReport estimate_lemma_constants(const Params& params, double t, double delta, double R,
                                             int n_fields, std::uint64_t seed = 0x5eed0c0ffeeULL);

} // namespace singrad
