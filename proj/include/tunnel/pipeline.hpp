#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tunnel/observables.hpp"

namespace tunnel {

/// Sign that maps raw momentum orders onto the oriented frame in which +1 is
/// the direction the cloud first moves after the quench (packet B). A lattice
/// shift theta0 > 0 pushes the atoms towards negative K first.
int orientation_for(double theta0);
/// Population of oriented order n.
double oriented_population(const MomentumSnapshot& snap, int n, int orientation);

struct PeriodEstimate {
  double period = 0.0;
  double sigma = 0.0;
  double guess = 0.0;        // from the spacing of <P^2> minima
  double amplitude = 0.0;    // of the fitted <P^2> oscillation
  double residual_rms = 0.0;
  double window = 0.0;       // fit window length
  std::size_t points = 0;
};

struct PeriodFitOptions {
  double window_periods = 4.0;  // fit window, in units of the guess
  double search_lo = 0.8;       // period search range, relative to the guess
  double search_hi = 1.25;
  std::size_t search_points = 181;
};

/// Dipole period from the kinetic moment <P^2>(t). Packets oscillating at the
/// dipole frequency give <P^2> = c + a cos(4 pi t / T) + b sin(4 pi t / T);
/// the guess is twice the median spacing of the <P^2> minima, refined by a
/// least-squares fit over window_periods guesses. sigma is the standard error
/// of T from the fit covariance. Throws NumericalError when no oscillation is
/// found or the series is shorter than 1.25 periods.
PeriodEstimate extract_period(std::span<const double> t, std::span<const double> p2,
                              const PeriodFitOptions& options = {});
PeriodEstimate extract_period(const std::vector<MomentumSnapshot>& series, const PeriodFitOptions& options = {});

struct CalibrationPoint {
  double depth_s = 0.0;
  double period = 0.0;
};
struct DepthEstimate {
  double depth_s = 0.0;
  double sigma = 0.0;
  double slope = 0.0;  // dT/ds of the bracketing table segment
};
/// Inverse linear interpolation of a simulated period-vs-depth table, which
/// may be increasing or decreasing but must be monotone on the bracketing
/// segment. sigma = period_sigma / |dT/ds|. Throws ParameterError when the
/// period lies outside the table.
DepthEstimate calibrate_depth(double period, double period_sigma, std::vector<CalibrationPoint> table);

struct DelayEstimate {
  bool resolvable = false;
  double delay_us = 0.0;
  double t_reflected = 0.0;  // dimensionless
  double t_tunneled = 0.0;
  double valley_ratio = 0.0;  // tunneled-trace valley between B and D2, over the D2 peak
};

/// Largest valley-to-peak ratio at which D2 still counts as separated from B.
inline constexpr double kResolvableValleyRatio = 1.0 / 3.0;

/// Delay between the maxima of the tunneled (D2) and reflected (D1) traces in
/// the D window (T/2, T). Each maximum is refined by a Gaussian fit of the
/// trace around it. D2 is unresolvable when it has no interior maximum or when
/// the tunneled trace does not dip below kResolvableValleyRatio of the D2 peak
/// between the B maximum (in [0, T/2]) and D2.
DelayEstimate extract_delay(std::span<const double> t, std::span<const double> tunneled,
                            std::span<const double> reflected, double period, double time_unit);
/// Series form: tunneled is oriented order +1, reflected oriented order -1.
DelayEstimate extract_delay(const std::vector<MomentumSnapshot>& series, double period, double time_unit,
                            int orientation);

struct MziReadout {
  bool defined = false;
  double ratio = 0.0;
  double phi = 0.0;
  double time = 0.0;
  double order_sum = 0.0;  // (Pi_1 + Pi_-1) / total at the readout time
};
inline constexpr double kMziPopulationThreshold = 0.1;

/// ratio = Pi_-1 / (Pi_1 + Pi_-1) (oriented) at the snapshot maximizing
/// Pi_1 + Pi_-1 inside the F window [9T/8, 11T/8]; phi = asin(sqrt(ratio)) / 2.
/// Undefined when the summed population is below 10% of the snapshot total.
MziReadout mzi_readout(const std::vector<MomentumSnapshot>& series, double period, int orientation);
double mzi_phase(double ratio);

/// Beam splitter [[cos phi, i sin phi], [i sin phi, cos phi]] applied twice to (1, 0).
std::array<Complex, 2> two_mode_mzi(double phi);
std::array<Complex, 2> apply_splitter(double phi, const std::array<Complex, 2>& in);

/// Time window of each labelled packet, in units of the period, and its oriented order.
struct PacketWindow {
  std::string label;
  int order = 0;
  double begin = 0.0;
  double end = 0.0;
};
const std::vector<PacketWindow>& packet_windows();

struct PacketTrack {
  std::string label;
  int order = 0;
  std::vector<double> times;
  std::vector<double> populations;
  std::vector<double> centers;     // fitted peak centre (oriented), NaN without a fit
  std::vector<double> amplitudes;  // fitted peak height, 0 without a fit
};
std::vector<PacketTrack> track_packets(const std::vector<MomentumSnapshot>& series, double period, int orientation);

}  // namespace tunnel
