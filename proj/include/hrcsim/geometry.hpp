/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <cmath>

namespace hrcsim {

/// Position in the workspace frame, meters. Origin at table center, z up.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Point3&, const Point3&) = default;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Point3& a, const Point3& b) {
    return (a - b).norm();
}

/// Distance projected onto the table plane.
inline double planar_distance(const Point3& a, const Point3& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Axis-aligned box.
struct Box {
    Point3 min;
    Point3 max;

    friend bool operator==(const Box&, const Box&) = default;

    bool contains(const Point3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
};

/// Constant-speed step from `from` toward `to` covering at most `max_step`; lands exactly on `to`
/// when it is within reach.
inline Point3 step_toward(const Point3& from, const Point3& to, double max_step) {
    const Point3 delta = to - from;
    const double len = delta.norm();
    if (len <= max_step || len == 0.0) {
        return to;
    }
    return from + delta * (max_step / len);
}

} // namespace hrcsim
