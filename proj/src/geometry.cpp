#include "beamplan/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beamplan {

double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

double normalize_lon_deg(double lon_deg) {
    double lon = std::fmod(lon_deg, 360.0);
    if (lon <= -180.0) lon += 360.0;
    if (lon > 180.0) lon -= 360.0;
    return lon;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) {
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg))
        throw std::invalid_argument("GeoPoint: coordinates must be finite");
    if (lat_deg < -90.0 || lat_deg > 90.0)
        throw std::invalid_argument("GeoPoint: latitude " + std::to_string(lat_deg) +
                                    " outside [-90, 90]");
    lat_deg_ = lat_deg;
    lon_deg_ = (std::abs(lat_deg) == 90.0) ? 0.0 : normalize_lon_deg(lon_deg);
}

EcefVector operator+(const EcefVector& a, const EcefVector& b) {
    return {a.x_km + b.x_km, a.y_km + b.y_km, a.z_km + b.z_km};
}

EcefVector operator-(const EcefVector& a, const EcefVector& b) {
    return {a.x_km - b.x_km, a.y_km - b.y_km, a.z_km - b.z_km};
}

EcefVector operator*(const EcefVector& a, double s) {
    return {a.x_km * s, a.y_km * s, a.z_km * s};
}

double dot(const EcefVector& a, const EcefVector& b) {
    return a.x_km * b.x_km + a.y_km * b.y_km + a.z_km * b.z_km;
}

SatellitePose::SatellitePose(GeoPoint position, double altitude_km)
    : position_(position), altitude_km_(altitude_km) {
    if (!(altitude_km > 0.0))
        throw std::invalid_argument("SatellitePose: altitude must be > 0 km");
}

EcefVector geo_to_ecef(const GeoPoint& p, double radius_km) {
    if (!(radius_km > 0.0))
        throw std::invalid_argument("geo_to_ecef: radius must be > 0");
    const double lat = deg_to_rad(p.lat_deg());
    const double lon = deg_to_rad(p.lon_deg());
    const double cos_lat = std::cos(lat);
    return {radius_km * cos_lat * std::cos(lon),
            radius_km * cos_lat * std::sin(lon),
            radius_km * std::sin(lat)};
}

GeoPoint ecef_to_geo(const EcefVector& v) {
    const double r = v.norm();
    if (!(r > 0.0))
        throw std::invalid_argument("ecef_to_geo: zero-length vector");
    const double sin_lat = std::clamp(v.z_km / r, -1.0, 1.0);
    const double lat = rad_to_deg(std::asin(sin_lat));
    if (std::abs(lat) >= 90.0 || (v.x_km == 0.0 && v.y_km == 0.0))
        return GeoPoint(std::clamp(lat, -90.0, 90.0), 0.0);
    return GeoPoint(lat, rad_to_deg(std::atan2(v.y_km, v.x_km)));
}

double great_circle_distance_km(const GeoPoint& a, const GeoPoint& b, double radius_km) {
    const double la = deg_to_rad(a.lat_deg());
    const double lb = deg_to_rad(b.lat_deg());
    const double dlon = deg_to_rad(b.lon_deg() - a.lon_deg());
    const double c = std::sin(la) * std::sin(lb) + std::cos(la) * std::cos(lb) * std::cos(dlon);
    return radius_km * std::acos(std::clamp(c, -1.0, 1.0));
}

EcefVector satellite_ecef(const SatellitePose& sat) {
    return geo_to_ecef(sat.position(), kEarthRadiusKm + sat.altitude_km());
}

double view_angle_deg(const SatellitePose& sat, const GeoPoint& a, const GeoPoint& b) {
    const EcefVector s = satellite_ecef(sat);
    const EcefVector u = geo_to_ecef(a, kEarthRadiusKm) - s;
    const EcefVector v = geo_to_ecef(b, kEarthRadiusKm) - s;
    const double c = dot(u, v) / (u.norm() * v.norm());
    return rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

double slant_range_km(const SatellitePose& sat, const GeoPoint& u) {
    return (geo_to_ecef(u, kEarthRadiusKm) - satellite_ecef(sat)).norm();
}

GeoPoint centroid_on_sphere(const std::vector<GeoPoint>& users,
                            const std::vector<int>& members) {
    if (members.empty())
        throw std::invalid_argument("centroid_on_sphere: empty member set");
    EcefVector sum{};
    for (int idx : members)
        sum = sum + geo_to_ecef(users.at(static_cast<std::size_t>(idx)), kEarthRadiusKm);
    const double n = sum.norm();
    if (n < 1e-9)
        return users.at(static_cast<std::size_t>(members.front()));
    return ecef_to_geo(sum * (kEarthRadiusKm / n));
}

}  // namespace beamplan
