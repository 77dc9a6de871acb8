#pragma once

#include <string>

namespace singrad {

enum class Regime { Ball, Exterior };

std::string to_string(Regime regime);

/// Validated parameter regime with all derived constants computed eagerly at
/// construction. Immutable after construction; safe to share across threads.
struct Params {
    Regime regime;
    int N;
    double p;
    double alpha;      // (p-1)(N-1)
    double beta;       // (p-1)/(alpha-1)
    double sigma;      // Ball: (2-p)/(p-1); Exterior: N-2+eps_weight
    double eps_weight; // Exterior only; 0 in the ball regime
    double c_beta;     // beta^(-1/(p-1))
};

/// Ball regime: N >= 3, N/(N-1) < p < 2 strictly.
/// Throws RegimeError outside the admissible set.
Params new_ball_params(int N, double p);

/// Exterior regime: N >= 3, p > N/(N-1), 0 < eps_weight <= 1/2.
/// Rejects (N, p, eps) with sigma+2 - p(sigma+1) > 0 rather than weakening
/// the mapping estimate that needs it.
Params new_exterior_params(int N, double p, double eps_weight);

} // namespace singrad
