#pragma once

namespace beamplan {

inline constexpr double kSpeedOfLightMps = 299792458.0;

/// dB value reported where the beam pattern is exactly zero, so metric
/// pipelines stay total instead of producing -inf.
inline constexpr double kNullFloorDb = -400.0;

/// Physical constants of the downlink model. Defaults reproduce the
/// reference MEO configuration used by the bundled scenarios.
struct LinkBudgetParams {
    double carrier_freq_hz = 18.05e9;
    double aperture_radius_over_lambda = 5.0;  // beta / lambda
    double antenna_diameter_m = 0.6;
    double antenna_efficiency = 0.6;
    double max_beam_gain_db = 50.0;
    double atmospheric_loss_db = 0.5;
    double noise_power_dbw = -118.0;
    double total_power_dbw = 23.5;
    double half_beamwidth_deg = 1.6;  // half of the HPBW cone angle

    double wavelength_m() const { return kSpeedOfLightMps / carrier_freq_hz; }
};

/// Throws std::invalid_argument on any out-of-range field.
void validate(const LinkBudgetParams& p);

/// Bessel function of the first kind, order one, for x in [0, 200].
double bessel_j1(double x);

/// Normalized circular-aperture pattern 4|J1(u)/u|^2 with
/// u = 2*pi*(beta/lambda)*sin(theta). Equals 1 at theta = 0; range [0, 1].
/// theta outside [0, 90] degrees is a domain error.
double normalized_gain(double theta_deg, const LinkBudgetParams& p);

/// Peak gain plus the pattern roll-off, dB. Pattern nulls map to kNullFloorDb.
double beam_gain_db(double theta_deg, const LinkBudgetParams& p);

/// 10*log10(16*pi^2*S^2/lambda^2) with S converted to meters.
double free_space_path_loss_db(double slant_range_km, const LinkBudgetParams& p);

/// Receive antenna gain 10*log10(eff*pi^2*d^2/lambda^2), dB.
double receive_gain_db(const LinkBudgetParams& p);

/// Aggregate deterministic link gain: Grx + beam gain - FSPL - atmospheric
/// loss, all in dB.
double statistical_channel_gain_db(double theta_deg, double slant_range_km,
                                   const LinkBudgetParams& p);

/// Carrier-to-noise ratio in dB for the given per-user transmit power.
double cnr_db(double theta_deg, double slant_range_km, double power_dbw,
              const LinkBudgetParams& p);

struct LinkMetrics {
    double gain_pattern = 0.0;  // normalized, [0, 1]
    double scg_db = 0.0;
    double scgnr_db = 0.0;
    double cnr_db = 0.0;
};

LinkMetrics link_metrics(double theta_deg, double slant_range_km, double power_dbw,
                         const LinkBudgetParams& p);

/// Off-axis angle at which the pattern drops to half power, degrees.
/// Solved by bisection on the main lobe.
double half_power_angle_deg(const LinkBudgetParams& p);

/// First pattern null (first positive root of J1 mapped through the
/// aperture geometry), degrees.
double first_null_angle_deg(const LinkBudgetParams& p);

}  // namespace beamplan
