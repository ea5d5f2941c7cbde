#pragma once

// The total space of controlled paths: flat metric, tubes around
// Gamma-sections, tube pseudometrics and truncated Nagata-Smirnov sums.
//
// Sections of the bundle are always of the form X -> Gamma_X(f); that is the
// set of sections the construction actually provides. The full
// Nagata-Smirnov metric needs an infinite tube enumeration, so only finite
// truncations are computed, as diagnostics.

#include <memory>
#include <stdexcept>
#include <vector>

#include "brp/approximation.hpp"

namespace brp {

struct BundlePoint {
    std::shared_ptr<const BranchedRoughPath> base;
    ControlledPath fiber;

    BundlePoint(std::shared_ptr<const BranchedRoughPath> b, ControlledPath f)
        : base(std::move(b)), fiber(std::move(f)) {
        if (fiber.ref_ptr() != base)
            throw std::invalid_argument("BundlePoint: fiber is not attached to the base");
    }
};

// d_flat(x,y) = rho_alpha(p(x), p(y)) + ||x ; y||_alpha
inline double flat_distance(const BundlePoint& x, const BundlePoint& y,
                            const NormOptions& opts = {}) {
    return x.base->distance(*y.base, opts) + x.fiber.distance(y.fiber, opts);
}

struct TubeSpec {
    SmoothControlData section;                     // f with gamma(X) = Gamma_X(f)
    std::shared_ptr<const BranchedRoughPath> center;  // ball center in the base
    double radius = 0.5;    // r_i in (0,1)
    double epsilon = 0.5;   // the tube width delta in (0,1)

    void validate() const {
        if (!(radius > 0.0) || !(radius < 1.0))
            throw std::invalid_argument("TubeSpec: radius must lie in (0,1)");
        if (!(epsilon > 0.0) || !(epsilon < 1.0))
            throw std::invalid_argument("TubeSpec: epsilon must lie in (0,1)");
    }
};

// evaluate the section at the base point of b and measure the fiber gap
inline double tube_fiber_gap(const TubeSpec& spec, const BundlePoint& b,
                             const PrimitiveBasis& basis, const NormOptions& opts = {}) {
    auto on_section = gamma(b.base, spec.section, basis);
    return b.fiber.distance(on_section, opts);
}

inline bool tube_contains(const TubeSpec& spec, const BundlePoint& b, const PrimitiveBasis& basis,
                          const NormOptions& opts = {}) {
    spec.validate();
    if (!(b.base->distance(*spec.center, opts) < spec.radius)) return false;
    return tube_fiber_gap(spec, b, basis, opts) < spec.epsilon;
}

// f_(gamma,i,delta)(b) = (r_i - rho(p(b), t_i)) (delta - ||b - gamma(p(b))||)
// inside the tube, 0 outside; both factors lie in (0,1)
inline double tube_function(const TubeSpec& spec, const BundlePoint& b,
                            const PrimitiveBasis& basis, const NormOptions& opts = {}) {
    spec.validate();
    double base_gap = b.base->distance(*spec.center, opts);
    if (!(base_gap < spec.radius)) return 0.0;
    double fiber_gap = tube_fiber_gap(spec, b, basis, opts);
    if (!(fiber_gap < spec.epsilon)) return 0.0;
    return (spec.radius - base_gap) * (spec.epsilon - fiber_gap);
}

inline double tube_pseudometric(const TubeSpec& spec, const BundlePoint& x, const BundlePoint& y,
                                const PrimitiveBasis& basis, const NormOptions& opts = {}) {
    return std::abs(tube_function(spec, x, basis, opts) - tube_function(spec, y, basis, opts));
}

// partial sum sum_m 2^{-m} min(1, d_(gamma_m, i_m, delta_m)(x,y)) over the
// supplied finite spec family, weights starting at 2^{-1}
inline double truncated_ns_distance(const std::vector<TubeSpec>& specs, const BundlePoint& x,
                                    const BundlePoint& y, const PrimitiveBasis& basis,
                                    const NormOptions& opts = {}) {
    double acc = 0.0;
    double weight = 0.5;
    for (const TubeSpec& spec : specs) {
        double d = tube_pseudometric(spec, x, y, basis, opts);
        acc += weight * std::min(1.0, d);
        weight *= 0.5;
    }
    return acc;
}

}  // namespace brp
