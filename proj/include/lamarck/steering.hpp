#pragma once

// Target-directed steering on top of the CPG outputs. theta is the heading
// error towards the current target: negative when the target is on the left,
// positive when it is on the right.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lamarck {

enum class Side { left, right, centre };

/// Which joints are slowed for a given target side.
///  as_printed: theta < 0 slows the left joints, theta >= 0 the right ones.
///  as_prose:   the side opposite the target is slowed.
enum class SteeringConvention { as_printed, as_prose };

inline std::string_view to_string(SteeringConvention c) {
    return c == SteeringConvention::as_printed ? "as-printed" : "as-prose";
}

inline SteeringConvention steering_convention_from_string(std::string_view s) {
    if (s == "as-printed") return SteeringConvention::as_printed;
    if (s == "as-prose") return SteeringConvention::as_prose;
    throw std::invalid_argument("unknown steering convention: " + std::string(s));
}

/// Wraps an angle into [-pi, pi].
inline double wrap_angle(double a) {
    if (a >= -std::numbers::pi && a <= std::numbers::pi) return a;
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a;
}

/// g(theta) = ((pi - |theta|) / pi)^n, in [0, 1].
inline double steering_gain(double theta, int exponent = 7) {
    const double t = std::abs(wrap_angle(theta));
    return std::pow((std::numbers::pi - t) / std::numbers::pi, exponent);
}

/// Side of a joint from the sign of its lateral grid coordinate.
inline Side side_of(int lateral) { return lateral < 0 ? Side::left : (lateral > 0 ? Side::right : Side::centre); }

inline void apply_steering(std::span<double> signal, double theta, std::span<const Side> sides, int exponent = 7,
                           SteeringConvention convention = SteeringConvention::as_printed) {
    if (signal.size() != sides.size()) throw std::invalid_argument("one side label per joint required");
    const double g = steering_gain(theta, exponent);
    Side slowed = wrap_angle(theta) < 0.0 ? Side::left : Side::right;
    if (convention == SteeringConvention::as_prose) slowed = slowed == Side::left ? Side::right : Side::left;
    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (sides[i] == slowed) signal[i] *= g;
    }
}

/// Copying form of apply_steering.
inline std::vector<double> steered(std::vector<double> out, double theta, const std::vector<Side>& sides,
                                          int exponent = 7,
                                          SteeringConvention convention = SteeringConvention::as_printed) {
    apply_steering(std::span<double>(out), theta, std::span<const Side>(sides), exponent, convention);
    return out;
}

}  // namespace lamarck
