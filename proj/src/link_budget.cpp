#include "beamplan/link_budget.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beamplan {

namespace {

// Chebyshev series evaluation (Clenshaw recurrence), x in [-1, 1].
double chebyshev_eval(double x, const double* cs, int n) {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    const double twox = 2.0 * x;
    for (int i = n - 1; i >= 0; --i) {
        b2 = b1;
        b1 = b0;
        b0 = twox * b1 - b2 + cs[i];
    }
    return 0.5 * (b0 - b2);
}

// Coefficient sets from the SLATEC FNLIB DBESJ1/D9B1MP routines (Fullerton),
// truncated to double precision. Small-argument Chebyshev series on x <= 4,
// asymptotic amplitude/phase expansions beyond.
constexpr double kBj1Series[12] = {
    -0.117261415133327865606240574524003,
    -0.253615218307906395623030884554698,
    0.0501270809844695685053656363203743,
    -0.00463151480962508191842619728789772,
    2.47996229415914024539124064592364e-4,
    -8.67894868627882584521246435176416e-6,
    2.14293917143793691502766250991292e-7,
    -3.93609307918317979229322764073061e-9,
    5.59118231794688004018248059864032e-11,
    -6.3276164046613930247769527401488e-13,
    5.84099161085724700326945563268266e-15,
    -4.48253381870125819039135059199999e-17,
};

constexpr double kAmpl1Series[15] = {
    0.1069845452618063014969985308538,
    0.003274915039715964900729055143445,
    -2.987783266831698592030445777938e-5,
    8.331237177991974531393222669023e-7,
    -4.112665690302007304896381725498e-8,
    2.855344228789215220719757663161e-9,
    -2.485408305415623878060026596055e-10,
    2.543393338072582442742484397174e-11,
    -2.941045772822967523489750827909e-12,
    3.743392025493903309265056153626e-13,
    -5.149118293821167218720548243527e-14,
    7.552535949865143908034040764199e-15,
    -1.169409706828846444166290622464e-15,
    1.89656244943479157172182460506e-16,
    -3.201955368693286420664775316394e-17,
};

constexpr double kPhase1Series[16] = {
    0.73823860128742974662620839792764,
    -0.0033361113174483906384470147681189,
    6.1463454888046964698514899420186e-5,
    -2.4024585161602374264977635469568e-6,
    1.4663555577509746153210591997204e-7,
    -1.1841917305589180567005147504983e-8,
    1.1574198963919197052125466303055e-9,
    -1.3001161129439187449366007794571e-10,
    1.6245391141361731937742166273667e-11,
    -2.2089636821403188752155441770128e-12,
    3.2180304258553177090474358653778e-13,
    -4.9653147932768480785552021135381e-14,
    8.0438900432847825985558882639317e-15,
    -1.3589121310161291384694712682282e-15,
    2.3810504397147214869676529605973e-16,
    -4.3081466363849106724471241420799e-17,
};

constexpr double kAmpl2Series[13] = {
    0.09807979156233050027272093546937,
    0.001150961189504685306175483484602,
    -4.312482164338205409889358097732e-6,
    5.951839610088816307813029801832e-8,
    -1.704844019826909857400701586478e-9,
    7.798265413611109508658173827401e-11,
    -4.958986126766415809491754951865e-12,
    4.038432416421141516838202265144e-13,
    -3.993046163725175445765483846645e-14,
    4.619886183118966494313342432775e-15,
    -6.089208019095383301345472619333e-16,
    8.960930916433876482157048041249e-17,
    -1.449629423942023122916518918925e-17,
};

constexpr double kPhase2Series[14] = {
    0.74749957203587276055443483969695,
    -0.0012400777144651711252545777541384,
    9.9252442404424527376641497689592e-6,
    -2.0303690737159711052419375375608e-7,
    7.5359617705690885712184017583629e-9,
    -4.1661612715343550107630023856228e-10,
    3.0701618070834890481245102091216e-11,
    -2.8178499637605213992324008883924e-12,
    3.0790696739040295476028146821647e-13,
    -3.8803300262803434112787347554781e-14,
    5.5096039608630904934561726208562e-15,
    -8.6590060768383779940103398953994e-16,
    1.4856049141536749003423689060683e-16,
    -2.7519529815904085805371212125009e-17,
};

double normalized_gain_from_u(double u) {
    if (u == 0.0) return 1.0;
    const double ratio = bessel_j1(u) / u;
    const double g = 4.0 * ratio * ratio;
    return (g > 1.0) ? 1.0 : g;
}

// Pattern argument u = 2*pi*(beta/lambda)*sin(theta).
double pattern_argument(double theta_deg, const LinkBudgetParams& p) {
    const double theta_rad = theta_deg * (std::numbers::pi / 180.0);
    return 2.0 * std::numbers::pi * p.aperture_radius_over_lambda * std::sin(theta_rad);
}

}  // namespace

void validate(const LinkBudgetParams& p) {
    auto bad = [](const std::string& what) {
        throw std::invalid_argument("LinkBudgetParams: " + what);
    };
    if (!(p.carrier_freq_hz > 0.0)) bad("carrier frequency must be > 0");
    if (!(p.aperture_radius_over_lambda > 0.0)) bad("aperture radius ratio must be > 0");
    if (!(p.antenna_diameter_m > 0.0)) bad("antenna diameter must be > 0");
    if (!(p.antenna_efficiency > 0.0 && p.antenna_efficiency <= 1.0))
        bad("antenna efficiency must be in (0, 1]");
    if (!(p.half_beamwidth_deg > 0.0 && p.half_beamwidth_deg < 90.0))
        bad("half beamwidth must be in (0, 90) degrees");
    if (!std::isfinite(p.max_beam_gain_db) || !std::isfinite(p.atmospheric_loss_db) ||
        !std::isfinite(p.noise_power_dbw) || !std::isfinite(p.total_power_dbw))
        bad("dB fields must be finite");
}

double bessel_j1(double x) {
    if (!(x >= 0.0 && x <= 200.0))
        throw std::invalid_argument("bessel_j1: x outside [0, 200]");
    if (x <= 4.0) {
        const double xsml = std::sqrt(std::numeric_limits<double>::epsilon() * 8.0);
        if (x <= xsml) return 0.5 * x;
        return x * (chebyshev_eval(0.125 * x * x - 1.0, kBj1Series, 12) + 0.25);
    }
    double ampl, theta;
    if (x <= 8.0) {
        const double z = (128.0 / (x * x) - 5.0) / 3.0;
        ampl = (chebyshev_eval(z, kAmpl1Series, 15) + 0.75) / std::sqrt(x);
        theta = x - 2.356194490192344929 + chebyshev_eval(z, kPhase1Series, 16) / x;
    } else {
        const double z = 128.0 / (x * x) - 1.0;
        ampl = (chebyshev_eval(z, kAmpl2Series, 13) + 0.75) / std::sqrt(x);
        theta = x - 2.356194490192344929 + chebyshev_eval(z, kPhase2Series, 14) / x;
    }
    return ampl * std::cos(theta);
}

double normalized_gain(double theta_deg, const LinkBudgetParams& p) {
    if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
        throw std::invalid_argument("normalized_gain: theta " + std::to_string(theta_deg) +
                                    " outside [0, 90] degrees");
    if (theta_deg == 0.0) return 1.0;
    return normalized_gain_from_u(pattern_argument(theta_deg, p));
}

double beam_gain_db(double theta_deg, const LinkBudgetParams& p) {
    const double g = normalized_gain(theta_deg, p);
    if (g <= 0.0) return kNullFloorDb;
    const double db = p.max_beam_gain_db + 10.0 * std::log10(g);
    return (db < kNullFloorDb) ? kNullFloorDb : db;
}

double free_space_path_loss_db(double slant_range_km, const LinkBudgetParams& p) {
    if (!(slant_range_km > 0.0))
        throw std::invalid_argument("free_space_path_loss_db: slant range must be > 0");
    const double s_m = slant_range_km * 1000.0;
    const double ratio = 4.0 * std::numbers::pi * s_m / p.wavelength_m();
    return 20.0 * std::log10(ratio);
}

double receive_gain_db(const LinkBudgetParams& p) {
    const double lambda = p.wavelength_m();
    const double g = p.antenna_efficiency * std::numbers::pi * std::numbers::pi *
                     p.antenna_diameter_m * p.antenna_diameter_m / (lambda * lambda);
    return 10.0 * std::log10(g);
}

double statistical_channel_gain_db(double theta_deg, double slant_range_km,
                                   const LinkBudgetParams& p) {
    return receive_gain_db(p) + beam_gain_db(theta_deg, p) -
           free_space_path_loss_db(slant_range_km, p) - p.atmospheric_loss_db;
}

double cnr_db(double theta_deg, double slant_range_km, double power_dbw,
              const LinkBudgetParams& p) {
    return power_dbw + statistical_channel_gain_db(theta_deg, slant_range_km, p) -
           p.noise_power_dbw;
}

LinkMetrics link_metrics(double theta_deg, double slant_range_km, double power_dbw,
                         const LinkBudgetParams& p) {
    LinkMetrics m;
    m.gain_pattern = normalized_gain(theta_deg, p);
    m.scg_db = statistical_channel_gain_db(theta_deg, slant_range_km, p);
    m.scgnr_db = m.scg_db - p.noise_power_dbw;
    m.cnr_db = power_dbw + m.scg_db - p.noise_power_dbw;
    return m;
}

double half_power_angle_deg(const LinkBudgetParams& p) {
    // The pattern decreases from 1 through 1/2 before its first null; bisect
    // on the argument u, then map back through the aperture geometry.
    double lo = 0.0, hi = 3.8317059702075123;  // first root of J1
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normalized_gain_from_u(mid) > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    const double u = 0.5 * (lo + hi);
    const double s = u / (2.0 * std::numbers::pi * p.aperture_radius_over_lambda);
    if (s >= 1.0) return 90.0;  // pattern never reaches half power within range
    return std::asin(s) * (180.0 / std::numbers::pi);
}

double first_null_angle_deg(const LinkBudgetParams& p) {
    const double s = 3.8317059702075123 / (2.0 * std::numbers::pi * p.aperture_radius_over_lambda);
    if (s >= 1.0) return 90.0;
    return std::asin(s) * (180.0 / std::numbers::pi);
}

}  // namespace beamplan
