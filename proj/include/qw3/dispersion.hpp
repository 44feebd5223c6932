#pragma once

namespace qw3 {

/// Parameters of the dispersion relation cos ω(k) = ρ cos(k − γ) − μ.
/// ρ is kept non-negative; a negative amplitude is folded into γ as a shift by π.
struct DispersionParams {
    double rho = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
};

} // namespace qw3
