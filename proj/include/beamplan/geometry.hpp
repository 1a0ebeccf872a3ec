#pragma once

#include <cmath>
#include <vector>

namespace beamplan {

// Spherical Earth model shared by every geometric computation.
inline constexpr double kEarthRadiusKm = 6371.0;

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Normalize a longitude into (-180, 180].
double normalize_lon_deg(double lon_deg);

/// Geographic position on the spherical Earth. Latitude in [-90, 90] degrees,
/// longitude normalized into (-180, 180]. Elevation is implicitly zero.
class GeoPoint {
public:
    GeoPoint() = default;

    /// Throws std::invalid_argument if lat is outside [-90, 90] or either
    /// coordinate is non-finite. Longitude is normalized on construction;
    /// at the poles it collapses to the 0-meridian convention.
    GeoPoint(double lat_deg, double lon_deg);

    double lat_deg() const { return lat_deg_; }
    double lon_deg() const { return lon_deg_; }

private:
    double lat_deg_ = 0.0;
    double lon_deg_ = 0.0;
};

/// Earth-centered Earth-fixed Cartesian coordinates in kilometers.
struct EcefVector {
    double x_km = 0.0;
    double y_km = 0.0;
    double z_km = 0.0;

    double norm() const { return std::sqrt(x_km * x_km + y_km * y_km + z_km * z_km); }
};

EcefVector operator+(const EcefVector& a, const EcefVector& b);
EcefVector operator-(const EcefVector& a, const EcefVector& b);
EcefVector operator*(const EcefVector& a, double s);
double dot(const EcefVector& a, const EcefVector& b);

/// Satellite location: sub-satellite ground point plus altitude above the
/// spherical surface. Altitude must be strictly positive.
class SatellitePose {
public:
    SatellitePose() = default;
    SatellitePose(GeoPoint position, double altitude_km);

    const GeoPoint& position() const { return position_; }
    double altitude_km() const { return altitude_km_; }

private:
    GeoPoint position_{0.0, 0.0};
    double altitude_km_ = 1.0;
};

/// Geographic -> Cartesian on a sphere of the given radius.
EcefVector geo_to_ecef(const GeoPoint& p, double radius_km);

/// Cartesian -> geographic. Longitude uses the quadrant-correct two-argument
/// arctangent; at the poles longitude is defined as 0. Throws on the zero
/// vector.
GeoPoint ecef_to_geo(const EcefVector& v);

/// Great-circle distance by the spherical law of cosines. The arccos argument
/// is clamped to [-1, 1] to absorb floating-point drift near coincident or
/// antipodal points.
double great_circle_distance_km(const GeoPoint& a, const GeoPoint& b,
                                double radius_km = kEarthRadiusKm);

/// Satellite position in ECEF, on the sphere of radius R + altitude.
EcefVector satellite_ecef(const SatellitePose& sat);

/// Angle in degrees between two ground points as seen from the satellite.
/// Symmetric in (a, b); range [0, 180].
double view_angle_deg(const SatellitePose& sat, const GeoPoint& a, const GeoPoint& b);

/// Line-of-sight distance from the satellite to a ground point, km.
double slant_range_km(const SatellitePose& sat, const GeoPoint& u);

/// Mean of the members' ECEF images, renormalized back onto the sphere and
/// reprojected to geographic coordinates. Falls back to the first member if
/// the mean degenerates to the origin.
GeoPoint centroid_on_sphere(const std::vector<GeoPoint>& users,
                            const std::vector<int>& members);

}  // namespace beamplan
