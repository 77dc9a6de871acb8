#include "singrad/params.hpp"

#include <cmath>
#include <sstream>

#include "singrad/errors.hpp"

namespace singrad {

std::string to_string(Regime regime) {
    return regime == Regime::Ball ? "ball" : "exterior";
}

namespace {

void check_common(int N, double p) {
    if (N < 3) {
        std::ostringstream msg;
        msg << "dimension N = " << N << " below minimum 3";
        throw RegimeError(msg.str());
    }
    const double lower = static_cast<double>(N) / (N - 1);
    if (!(p > lower)) {
        std::ostringstream msg;
        msg << "exponent p = " << p << " must exceed N/(N-1) = " << lower << " strictly";
        throw RegimeError(msg.str());
    }
}

Params derive(Regime regime, int N, double p, double eps_weight) {
    Params params;
    params.regime = regime;
    params.N = N;
    params.p = p;
    params.alpha = (p - 1.0) * (N - 1.0);
    params.beta = (p - 1.0) / (params.alpha - 1.0);
    params.sigma = regime == Regime::Ball ? (2.0 - p) / (p - 1.0) : (N - 2.0) + eps_weight;
    params.eps_weight = eps_weight;
    params.c_beta = std::pow(params.beta, -1.0 / (p - 1.0));
    return params;
}

} // namespace

Params new_ball_params(int N, double p) {
    check_common(N, p);
    if (!(p < 2.0)) {
        std::ostringstream msg;
        msg << "ball regime requires p < 2 strictly, got p = " << p;
        throw RegimeError(msg.str());
    }
    Params params = derive(Regime::Ball, N, p, 0.0);
    // p > N/(N-1) makes alpha = (p-1)(N-1) > 1; beta and c_beta are then finite
    if (!(params.alpha > 1.0)) throw RegimeError("derived alpha <= 1, regime inconsistent");
    return params;
}

Params new_exterior_params(int N, double p, double eps_weight) {
    check_common(N, p);
    if (!(eps_weight > 0.0) || eps_weight > 0.5) {
        std::ostringstream msg;
        msg << "eps_weight = " << eps_weight << " outside (0, 1/2]";
        throw RegimeError(msg.str());
    }
    Params params = derive(Regime::Exterior, N, p, eps_weight);
    if (!(params.alpha > 1.0)) throw RegimeError("derived alpha <= 1, regime inconsistent");
    // sigma+1 > alpha/(p-1) reduces to eps_weight > 0, already enforced; keep the
    // direct check so a future sigma change cannot silently break the far field
    if (!(params.sigma + 1.0 > params.alpha / (p - 1.0))) {
        throw RegimeError("sigma+1 <= alpha/(p-1): gradient weight would mask the far field");
    }
    const double into_margin = params.sigma + 2.0 - p * (params.sigma + 1.0);
    if (into_margin > 0.0) {
        std::ostringstream msg;
        msg << "sigma+2 - p(sigma+1) = " << into_margin
            << " > 0: mapping estimate unavailable for (N, p, eps) = (" << N << ", " << p << ", "
            << eps_weight << ")";
        throw RegimeError(msg.str());
    }
    return params;
}

} // namespace singrad
