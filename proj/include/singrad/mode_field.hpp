#pragma once

#include <array>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "singrad/angular.hpp"
#include "singrad/grid.hpp"
#include "singrad/params.hpp"

namespace singrad {

/// Measured weighted sup-norms over grid x angular nodes. The field norm is
/// sup of r^sigma|phi| + r^(sigma+1)|grad phi| taken pointwise (ball regime);
/// the exterior regime drops the zero-order term, which the weight sigma =
/// N-2+eps cannot control there. norm_Y weighs the same samples as a
/// right-hand side, sup of r^(sigma+2)|f|.
struct WeightedNormReport {
    double norm_X = 0.0;
    double norm_Y = 0.0;
    double sup_zero_order = 0.0;
    double sup_gradient = 0.0;
    double argmax_r_X = 0.0;
    double argmax_r_Y = 0.0;
};

/// Function on the ball or exterior domain as spherical-harmonic coefficient
/// profiles over a shared radial grid. Coefficients are stored w.r.t. the
/// orthonormal basis of the attached AngularSet; an inactive (k,m) slot holds
/// an empty vector and reads as identically zero. The angular set may be
/// absent for radial-only fields (any N); pointwise synthesis requires it.
struct ModeField {
    std::shared_ptr<const RadialGrid> grid;
    std::shared_ptr<const AngularSet> angular;
    Params params;
    int K_max = 0;
    std::vector<std::vector<double>> coeffs; // flat (k,m) index -> profile

    bool active(int idx) const {
        return idx < static_cast<int>(coeffs.size()) && !coeffs[idx].empty();
    }
    bool radial_only() const;
    std::vector<double>& profile(int idx);            // activates the slot
    const std::vector<double>& profile(int idx) const; // must be active
    std::size_t n_radial() const { return grid->size(); }
};

/// Empty field (identically zero) with K_max slots of headroom.
ModeField make_mode_field(std::shared_ptr<const RadialGrid> grid,
                          std::shared_ptr<const AngularSet> angular, const Params& params,
                          int K_max);

/// Radial function f(r) as a k=0 field: a_0 = sqrt(4*pi) * f under the
/// orthonormal-zonal convention, so pointwise synthesis returns f again.
ModeField make_radial_field(std::shared_ptr<const RadialGrid> grid,
                            std::shared_ptr<const AngularSet> angular, const Params& params,
                            std::vector<double> values);

/// Project pointwise samples onto harmonics of degree <= K_max. Exact for
/// band-limited input within the set's exactness; K_max beyond the set's
/// build degree raises BandLimitError. N=3 only.
ModeField decompose(std::shared_ptr<const RadialGrid> grid,
                    std::shared_ptr<const AngularSet> angular, const Params& params, int K_max,
                    const std::function<double(double, const std::array<double, 3>&)>& sampler);

/// Project node-sampled values (row per grid node, column per angular node)
/// onto harmonics of degree <= K_max. N=3 only.
ModeField decompose_nodal(std::shared_ptr<const RadialGrid> grid,
                          std::shared_ptr<const AngularSet> angular, const Params& params,
                          int K_max, const std::vector<std::vector<double>>& values);

/// Pointwise values along one direction, one entry per grid node. N=3 only.
std::vector<double> synthesize(const ModeField& field, const std::array<double, 3>& dir);

/// Field value at (grid node i, angular node j).
double value_at(const ModeField& field, std::size_t i, std::size_t j);

/// Radial derivative profiles a_k'(r) for every active slot (empty otherwise).
std::vector<std::vector<double>> radial_derivatives(const ModeField& field);

/// |grad phi|^2 at (grid node i, angular node j), from precomputed derivative
/// profiles: grad phi = sum_k [a_k' psi_k theta + (a_k/r) grad_S psi_k].
/// Full gradient vector at (grid node i, angular node j); needs the angular
/// set even for radial-only fields (for the node direction).
std::array<double, 3> gradient_at(const ModeField& field,
                                  const std::vector<std::vector<double>>& derivs,
                                  std::size_t i, std::size_t j);

double gradient_sq_at(const ModeField& field, const std::vector<std::vector<double>>& derivs,
                      std::size_t i, std::size_t j);

/// Sup over the angular set of |grad phi|^2 at grid node i. For a radial-only
/// field this is the squared radial derivative of the synthesized profile.
double mode_gradient_sq(const ModeField& field, std::size_t i);

/// Weighted sup-norms of the field over all grid x angular samples.
WeightedNormReport norms(const ModeField& field);

/// X-distance between two fields on the same grid (norm of the difference).
double diff_norm_X(const ModeField& a, const ModeField& b);

/// y += c * x (profiles added slotwise; grids must match).
void add_scaled(ModeField& y, const ModeField& x, double c);

/// CSV rows (k, m, r, a) for active slots; m signed: cos orders positive,
/// sin orders negative, zonal 0.
void write_mode_field_csv(const ModeField& field, std::ostream& out);

} // namespace singrad
