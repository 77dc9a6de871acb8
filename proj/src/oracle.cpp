#include "singrad/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "singrad/errors.hpp"
#include "singrad/radial_profiles.hpp"

namespace singrad {

namespace {

constexpr int kShards = 64;
constexpr int kMaxDim = 8;
constexpr double kLogMagLo = -6.0;
constexpr double kLogMagHi = 6.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Explicit draws instead of std::*_distribution: the engine is fully
// specified by the standard, the distributions are not, and reports must
// reproduce bit-for-bit.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct GaussianPair {
    double a, b;
};

GaussianPair gaussian_pair(std::mt19937_64& rng) {
    const double u1 = 1.0 - unit_uniform(rng);
    const double u2 = unit_uniform(rng);
    const double m = std::sqrt(-2.0 * std::log(u1));
    return {m * std::cos(2.0 * M_PI * u2), m * std::sin(2.0 * M_PI * u2)};
}

using Vec = std::array<double, kMaxDim>;

double draw_magnitude(std::mt19937_64& rng) {
    return std::pow(10.0, kLogMagLo + (kLogMagHi - kLogMagLo) * unit_uniform(rng));
}

void draw_direction(std::mt19937_64& rng, int dim, Vec& out) {
    double nsq = 0.0;
    for (int i = 0; i < dim; i += 2) {
        const GaussianPair g = gaussian_pair(rng);
        out[i] = g.a;
        if (i + 1 < dim) out[i + 1] = g.b;
    }
    for (int i = 0; i < dim; ++i) nsq += out[i] * out[i];
    if (nsq == 0.0) {
        out[0] = 1.0;
        nsq = 1.0;
    }
    const double inv = 1.0 / std::sqrt(nsq);
    for (int i = 0; i < dim; ++i) out[i] *= inv;
}

double dot(const Vec& a, const Vec& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

double clamp_cos(double c) { return std::clamp(c, -1.0, 1.0); }

struct ShardAccum {
    double max_ratio = 0.0;
    long long violations = 0;
};

} // namespace

std::string to_string(Ineq id) {
    switch (id) {
        case Ineq::I1: return "I1";
        case Ineq::I2: return "I2";
        case Ineq::I3: return "I3";
        case Ineq::I3_pgt2: return "I3_pgt2";
    }
    return "?";
}

double ineq1_remainder_rel(double p, double rho, double c) {
    c = clamp_cos(c);
    if (rho <= 8.0) {
        const double base = rho * rho + 2.0 * rho * c + 1.0;
        return std::pow(base, 0.5 * p) - std::pow(rho, p) - p * std::pow(rho, p - 1.0) * c;
    }
    // remainder/|y|^p = rho^{p-2} sum_{n>=2} C_n^{(-p/2)}(-c) rho^{2-n},
    // the Gegenbauer expansion of (1 + 2c/rho + 1/rho^2)^{p/2} with the
    // n = 0, 1 terms cancelled analytically. Every term is O(1) or smaller,
    // so the value keeps full relative accuracy where the direct form loses
    // all digits to cancellation.
    const double e = 1.0 / rho;
    const double lam = -0.5 * p;
    const double u = -c;
    double c_prev = 1.0;
    double c_cur = 2.0 * lam * u;
    double epow = 1.0;
    double sum = 0.0;
    for (int n = 1; n < 64; ++n) {
        const double c_next = (2.0 * (n + lam) * u * c_cur - (n + 2.0 * lam - 1.0) * c_prev) /
                              (n + 1.0);
        const double term = c_next * epow;
        sum += term;
        if (n > 4 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
        epow *= e;
        c_prev = c_cur;
        c_cur = c_next;
    }
    return std::pow(rho, p - 2.0) * sum;
}

OracleReport check_ineq(Ineq id, double p, int dim, long long n_samples, std::uint64_t seed) {
    const bool classic = id != Ineq::I3_pgt2;
    if (classic && !(1.0 < p && p <= 2.0))
        throw HypothesisError("check_ineq: this inequality needs 1 < p <= 2");
    if (!classic && !(p > 2.0))
        throw HypothesisError("check_ineq: the quadratic variant needs p > 2");
    if (dim < 1 || dim > kMaxDim) throw ConfigError("check_ineq: dim must lie in [1, 8]");
    if (n_samples < 1) throw ConfigError("check_ineq: need at least one sample");

    std::vector<ShardAccum> shards(kShards);
    const long long base = n_samples / kShards;
    const long long rem = n_samples % kShards;
    for (int s = 0; s < kShards; ++s) {
        std::mt19937_64 rng(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (s + 1)));
        const long long count = base + (s < rem ? 1 : 0);
        ShardAccum& acc = shards[s];
        Vec ux{}, uy{}, uz{};
        for (long long i = 0; i < count; ++i) {
            const double mx = draw_magnitude(rng);
            const double my = draw_magnitude(rng);
            draw_direction(rng, dim, ux);
            draw_direction(rng, dim, uy);
            const double cxy = clamp_cos(dot(ux, uy, dim));
            double ratio = 0.0;
            if (id == Ineq::I1) {
                ratio = ineq1_remainder_rel(p, mx / my, cxy);
                if (ratio < 0.0) ++acc.violations;
            } else if (id == Ineq::I3_pgt2) {
                const double rho = mx / my;
                const double r_rel = ineq1_remainder_rel(p, rho, cxy);
                if (r_rel < 0.0) ++acc.violations;
                ratio = std::abs(r_rel) / (1.0 + std::pow(rho, p - 2.0));
            } else {
                const double mz = draw_magnitude(rng);
                draw_direction(rng, dim, uz);
                const double cxz = clamp_cos(dot(ux, uz, dim));
                const double ry = ineq1_remainder_rel(p, mx / my, cxy) * std::pow(my, p);
                const double rz = ineq1_remainder_rel(p, mx / mz, cxz) * std::pow(mz, p);
                double dsq = 0.0, xd = 0.0;
                for (int k = 0; k < dim; ++k) {
                    const double dk = my * uy[k] - mz * uz[k];
                    dsq += dk * dk;
                    xd += ux[k] * dk;
                }
                const double dist = std::sqrt(dsq);
                if (dist == 0.0) continue; // y = z: both sides vanish identically
                double lhs, scale;
                if (id == Ineq::I2) {
                    lhs = std::abs(ry - rz);
                    scale = std::pow(my, p - 1.0) + std::pow(mz, p - 1.0);
                } else {
                    lhs = std::abs(ry - rz + p * std::pow(mx, p - 1.0) * xd);
                    scale = std::pow(my, p - 1.0) + std::pow(mz, p - 1.0) + std::pow(mx, p - 1.0);
                }
                ratio = lhs / (scale * dist);
            }
            if (!std::isfinite(ratio)) {
                ++acc.violations;
                continue;
            }
            acc.max_ratio = std::max(acc.max_ratio, ratio);
        }
    }

    OracleReport rep;
    rep.id = id;
    rep.p = p;
    rep.dim = dim;
    rep.n_samples = n_samples;
    rep.seed = seed;
    for (const ShardAccum& acc : shards) {
        rep.violations += acc.violations;
        rep.C_estimate = std::max(rep.C_estimate, acc.max_ratio);
    }
    return rep;
}

namespace {

// Smooth random test field on [r_lo, 1]: a low-order trigonometric profile
// v(s) in s = ln r carried on the weight r^{-sigma}, so the X-norm reads
// directly off v and v' and the gradient stays comparable to the field.
struct TestField {
    std::vector<double> value;  // phi at the sample nodes
    std::vector<double> slope;  // phi' at the sample nodes
    double norm_X = 0.0;
};

constexpr int kFieldModes = 6;

TestField draw_field(std::mt19937_64& rng, const std::vector<double>& r, double sigma,
                     double radius) {
    const double L = -std::log(r.front());
    std::array<double, kFieldModes> A{}, B{};
    for (int j = 0; j < kFieldModes; ++j) {
        const GaussianPair g = gaussian_pair(rng);
        A[j] = g.a / (j + 1.0);
        B[j] = g.b / (j + 1.0);
    }
    const double fill = 0.5 + 0.5 * unit_uniform(rng);
    TestField f;
    f.value.resize(r.size());
    f.slope.resize(r.size());
    double sup = 0.0;
    std::vector<double> v(r.size()), dv(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = std::log(r[i]);
        double vv = 0.0, dd = 0.0;
        for (int j = 0; j < kFieldModes; ++j) {
            const double w = (j + 1.0) * M_PI / L;
            vv += A[j] * std::cos(w * s) + B[j] * std::sin(w * s);
            dd += w * (-A[j] * std::sin(w * s) + B[j] * std::cos(w * s));
        }
        v[i] = vv;
        dv[i] = dd;
        sup = std::max(sup, std::abs(vv) + std::abs(dd - sigma * vv));
    }
    const double scale = sup > 0.0 ? fill * radius / sup : 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double wr = std::pow(r[i], -sigma);
        f.value[i] = scale * v[i] * wr;
        f.slope[i] = scale * (dv[i] - sigma * v[i]) * wr / r[i];
    }
    f.norm_X = scale * sup;
    return f;
}

double remainder_1d(double p, double x, double y) {
    if (y == 0.0) return 0.0;
    const double ay = std::abs(y);
    const double c = (x >= 0.0) == (y >= 0.0) ? 1.0 : -1.0;
    return ineq1_remainder_rel(p, std::abs(x) / ay, c) * std::pow(ay, p);
}

} // namespace

LemmaConstantReport estimate_lemma_constants(const Params& params, double t, double delta,
                                             double R, int n_fields, std::uint64_t seed) {
    if (params.regime != Regime::Ball)
        throw RegimeError("estimate_lemma_constants: ball regime only");
    if (!(t > 1.0)) throw DomainError("estimate_lemma_constants: need t > 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("estimate_lemma_constants: delta must lie in (0,1)");
    if (!(R >= 0.0)) throw DomainError("estimate_lemma_constants: radius must be nonnegative");
    if (n_fields < 1) throw ConfigError("estimate_lemma_constants: need at least one field");
    const double q = (params.N - 1) * params.p - params.sigma - 2.0;
    if (!(q > 0.0))
        throw HypothesisError("estimate_lemma_constants: (N-1)p - sigma - 2 must be positive");

    const double p = params.p;
    const double sigma = params.sigma;
    const int n_r = 2048;
    const double r_lo = 1e-6;
    std::vector<double> r(n_r), dut(n_r), gv(n_r);
    for (int i = 0; i < n_r; ++i) {
        r[i] = std::exp(std::log(r_lo) * (1.0 - static_cast<double>(i) / (n_r - 1)));
        dut[i] = du_ball(params, t, r[i]);
        gv[i] = 0.5 * r[i]; // reference perturbation g(x) = |x|/2
    }

    LemmaConstantReport rep;
    rep.t = t;
    rep.delta = delta;
    rep.R = R;
    rep.n_fields = n_fields;
    rep.summand_Rp = std::pow(R, p);
    rep.summand_g_sup = 0.5 * delta;
    rep.summand_tail = std::pow(t, -p / (p - 1.0)) * std::pow(delta, -q);
    rep.contraction_Rp1 = std::pow(R, p - 1.0);
    rep.contraction_tail = 1.0 / (t * std::pow(delta, params.alpha - 1.0));

    const double into_denom = rep.summand_Rp + rep.summand_g_sup + rep.summand_tail;
    const double contract_denom = rep.summand_g_sup + rep.contraction_Rp1 + rep.contraction_tail;

    std::mt19937_64 rng(splitmix64(seed));
    for (int n = 0; n < n_fields; ++n) {
        const TestField f1 = draw_field(rng, r, sigma, R);
        const TestField f2 = draw_field(rng, r, sigma, R);

        double y_full = 0.0, y_rem = 0.0, y_I = 0.0, y_J = 0.0, diff_X = 0.0;
        for (int i = 0; i < n_r; ++i) {
            const double w = std::pow(r[i], sigma + 2.0);
            const double rem1 = remainder_1d(p, dut[i], f1.slope[i]);
            const double rem2 = remainder_1d(p, dut[i], f2.slope[i]);
            const double dslope = f2.slope[i] - f1.slope[i];
            const double lin = dut[i] == 0.0
                                   ? 0.0
                                   : p * std::pow(std::abs(dut[i]), p - 1.0) *
                                         (dut[i] > 0.0 ? 1.0 : -1.0) * dslope;
            y_full = std::max(y_full,
                              w * std::abs(gv[i]) * std::pow(std::abs(dut[i] + f1.slope[i]), p));
            y_rem = std::max(y_rem, w * rem1);
            y_I = std::max(y_I, w * std::abs(rem2 - rem1));
            y_J = std::max(y_J, w * std::abs(gv[i]) * std::abs(rem2 - rem1 + lin));
            const double dv = f2.value[i] - f1.value[i];
            diff_X = std::max(diff_X, std::pow(r[i], sigma) * std::abs(dv) +
                                          std::pow(r[i], sigma + 1.0) * std::abs(dslope));
        }
        rep.into_full_C = std::max(rep.into_full_C, y_full / into_denom);
        if (rep.summand_Rp > 0.0)
            rep.into_remainder_C = std::max(rep.into_remainder_C, y_rem / rep.summand_Rp);
        if (diff_X > 0.0) {
            if (rep.contraction_Rp1 > 0.0)
                rep.contraction_I_C =
                    std::max(rep.contraction_I_C, y_I / (rep.contraction_Rp1 * diff_X));
            rep.contraction_J_C =
                std::max(rep.contraction_J_C, y_J / (contract_denom * diff_X));
        }
    }
    return rep;
}

} // namespace singrad
