#include "gelsim/material.hpp"

namespace gelsim {

std::pair<double, double> lame_from_elastic_constants(double youngs,
                                                      double poisson) {
    if (youngs <= 0) {
        throw std::domain_error("Young's modulus must be positive");
    }
    if (poisson < 0 || poisson >= 0.5) {
        throw std::domain_error(
            "Poisson ratio must lie in [0, 0.5); 0.5 is the incompressible "
            "limit");
    }
    double lambda =
        youngs * poisson / ((1 + poisson) * (1 - 2 * poisson));
    double mu = youngs / (2 * (1 + poisson));
    return {lambda, mu};
}

Material Material::make(double youngs, double poisson, double yield_stress,
                        double density) {
    if (yield_stress < 0) {
        throw std::domain_error("yield stress must be non-negative");
    }
    if (density <= 0) {
        throw std::domain_error("density must be positive");
    }
    Material m;
    m.youngs_modulus = youngs;
    m.poisson_ratio = poisson;
    auto [lambda, mu] = lame_from_elastic_constants(youngs, poisson);
    m.lambda = lambda;
    m.mu = mu;
    m.yield_stress = yield_stress;
    m.density = density;
    return m;
}

}  // namespace gelsim
