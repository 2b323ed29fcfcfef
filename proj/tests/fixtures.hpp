#pragma once

// Small scenarios with frozen reference values from independent 30-digit
// evaluations (adaptive quadrature of the defining integrals).

#include <zfaging/scenario.hpp>

namespace fixtures {

// Two cells, one user, three antennas: C = 0.09, hat_beta = 1/1.8.
inline zfaging::Scenario two_cell_single_user() {
  zfaging::Scenario s;
  s.topology = zfaging::CellTopology{2, 1, 3, 10, 1};
  s.fading = zfaging::FadingProfile(2, 1, {1.0, 0.3});
  s.aging = zfaging::AgingSpec::direct(0.8);
  s.power = zfaging::PowerSpec::fixed_snr(2.0);
  return s;
}
inline constexpr double kRateS1 = 0.80465638437782744906;

// Two cells, two users, five antennas, simple profile a = 0.2: C = 0.04, hat_beta = 1/2.2.
inline zfaging::Scenario two_cell_two_user() {
  zfaging::Scenario s;
  s.topology = zfaging::CellTopology{2, 2, 5, 10, 2};
  s.fading = zfaging::build_simple_profile(2, 2, 0.2);
  s.aging = zfaging::AgingSpec::direct(0.7);
  s.power = zfaging::PowerSpec::fixed_snr(0.5);
  return s;
}
inline constexpr double kRateS2 = 0.3019897742512509168;

struct OutagePoint {
  double gamma_th, outage, high_power;
};
inline constexpr OutagePoint kOutageS1[] = {
    {0.3, 0.14181150550789460415, 0.074101142642541784935},
    {0.8, 0.5823594866042340932, 0.34461130842549999197},
};
inline constexpr OutagePoint kOutageS2[] = {
    {0.05, 0.016546984504469393772, 0.0032387830364812291431},
    {0.15, 0.28152296844280136499, 0.074033930956914600461},
};

}  // namespace fixtures
