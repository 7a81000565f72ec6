#pragma once

#include <stdexcept>
#include <utility>

namespace gelsim {

// Elastic constants plus the von Mises yield stress. yield_stress lives in
// Hencky-strain space: flow starts once the deviatoric strain norm exceeds
// yield_stress / (2 mu).
struct Material {
    double youngs_modulus = 1e4;
    double poisson_ratio = 0.3;
    double lambda = 0;  // first Lame parameter, derived
    double mu = 0;      // shear modulus, derived
    double yield_stress = 100.0;
    double density = 1000.0;

    static Material make(double youngs, double poisson, double yield_stress,
                         double density);
};

// lambda = E nu / ((1+nu)(1-2nu)), mu = E / (2(1+nu))
std::pair<double, double> lame_from_elastic_constants(double youngs,
                                                      double poisson);

// Yield-stress presets matching the three press-demo regimes.
inline constexpr double kYieldPlastic = 1.0;
inline constexpr double kYieldElastoplastic = 100.0;
inline constexpr double kYieldElastic = 1e6;

}  // namespace gelsim
