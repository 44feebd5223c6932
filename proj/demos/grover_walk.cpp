// Builds the Grover coin from its first-family angles, predicts its trapping
// probability and front velocity, and compares them with a direct simulation.

#include <cmath>
#include <cstdio>

#include "qw3/qw3.hpp"

int main() {
    using namespace qw3;
    const C1Params p{0.0, 0.0, 0.0, std::asin(2.0 / 3.0), std::acos(-1.0 / std::sqrt(5.0))};
    const UnitaryCoin coin = build_c1(p);

    const CoinClass cls = classify_coin(coin);
    std::printf("class            %s\n", std::string(to_string(cls.kind)).c_str());

    const DispersionParams d = c1_dispersion_params(p.theta13, p.theta23, p.gamma2 + p.gamma4);
    const PeakVelocityResult v = peak_velocity(d);
    const TrappingResult tr = limiting_amplitudes(p);
    std::printf("rho, mu          %.6f, %.6f\n", d.rho, d.mu);
    std::printf("peak velocity    %.9f (%s)\n", v.v_peak, std::string(to_string(v.method)).c_str());
    std::printf("P_infinity       %.9f\n", tr.P_infinity);

    const SimulationSummary s = simulate(coin, MixedInitial{}, 1000);
    std::printf("simulated P(0)   %.6f over t in [500, 1000]\n", s.tail_average_trapping);
    std::printf("simulated front  %.4f\n", s.front_velocity_estimate);
    return 0;
}
