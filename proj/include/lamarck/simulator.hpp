#pragma once

// Locomotion backends. The surrogate backend is a kinematic stand-in for a
// rigid-body simulator: the robot is a planar unicycle whose forward speed
// comes from how vigorously its joints move and whose turn rate comes from the
// left/right imbalance of that vigour.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lamarck/cpg.hpp"
#include "lamarck/environment.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/steering.hpp"

namespace lamarck {

struct Trajectory {
    std::vector<Vec2> positions;  // sampled at the task's sample rate, t = 0 included
    std::vector<double> heading;  // radians, counter-clockwise from +x
};

struct SurrogateParams {
    double thrust = 0.25;        // m/s per unit of mean joint speed
    double drag = 3.0;           // speed factor is 1 / (1 + drag * |slope|)
    double turning = 0.6;        // rad/s per unit of right-minus-left joint speed
    double dt = 0.005;           // control and integration step, seconds
    double initial_heading = std::numbers::pi / 2;  // robot front (+y of the body grid) along world +y
    int steering_exponent = 7;
    SteeringConvention steering = SteeringConvention::as_printed;
};

inline void validate(const SurrogateParams& p) {
    if (!(p.thrust > 0 && p.drag > 0 && p.turning > 0 && p.dt > 0)) {
        throw std::invalid_argument("surrogate coefficients must be positive");
    }
}

class LocomotionBackend {
public:
    virtual ~LocomotionBackend() = default;
    /// Closed-loop rollout of `brain` (weights as given, state reset) on `body`.
    virtual Trajectory evaluate(const ModuleTree& body, const CpgNetwork& brain, const Terrain& terrain,
                                const TaskSpec& task) const = 0;
};

class SurrogateBackend final : public LocomotionBackend {
public:
    explicit SurrogateBackend(SurrogateParams params = {}) : params_(params) { validate(params_); }

    const SurrogateParams& params() const { return params_; }

    /// Speed multiplier from the local slope; exactly 1 on flat ground.
    double drag_factor(const Terrain& terrain, Vec2 p) const {
        return 1.0 / (1.0 + params_.drag * terrain.slope(p.x, p.y));
    }

    Trajectory evaluate(const ModuleTree& body, const CpgNetwork& brain, const Terrain& terrain,
                        const TaskSpec& task) const override {
        (void)body;
        CpgNetwork net = brain;
        net.reset_state();
        const std::size_t n = net.size();
        std::vector<Side> sides;
        sides.reserve(n);
        for (const auto& o : net.oscillators()) sides.push_back(side_of(o.cell.x));

        const int samples = task.sample_count();
        const int steps_per_sample = static_cast<int>(std::lround(1.0 / (task.sample_rate * params_.dt)));
        const double dt = params_.dt;

        Trajectory traj;
        traj.positions.reserve(static_cast<std::size_t>(samples));
        traj.heading.reserve(static_cast<std::size_t>(samples));

        Vec2 pos = task.start;
        double heading = params_.initial_heading;
        TargetTracker tracker(task);
        tracker.start(pos);
        traj.positions.push_back(pos);
        traj.heading.push_back(heading);

        auto heading_error = [&] {
            const Vec2 target = task.targets[std::min(tracker.next_target(), task.targets.size() - 1)];
            return wrap_angle(heading - std::atan2(target.y - pos.y, target.x - pos.x));
        };

        std::vector<double> signal(n);
        std::vector<double> previous(n);
        net.outputs(previous);
        apply_steering(std::span<double>(previous), heading_error(), std::span<const Side>(sides), params_.steering_exponent, params_.steering);

        for (int s = 1; s < samples; ++s) {
            if (n > 0) {
                for (int k = 0; k < steps_per_sample; ++k) {
                    const double theta = heading_error();
                    net.step(dt);
                    net.outputs(signal);
                    apply_steering(std::span<double>(signal), theta, std::span<const Side>(sides), params_.steering_exponent, params_.steering);
                    double total = 0.0;
                    double lateral = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double speed = std::abs(signal[j] - previous[j]) / dt;
                        total += speed;
                        if (sides[j] == Side::right) lateral += speed;
                        if (sides[j] == Side::left) lateral -= speed;
                        previous[j] = signal[j];
                    }
                    const double count = static_cast<double>(n);
                    const double v = params_.thrust * (total / count) * drag_factor(terrain, pos);
                    heading = wrap_angle(heading + params_.turning * (lateral / count) * dt);
                    pos.x = std::clamp(pos.x + v * dt * std::cos(heading), -kArenaHalfWidth, kArenaHalfWidth);
                    pos.y = std::clamp(pos.y + v * dt * std::sin(heading), -kArenaHalfWidth, kArenaHalfWidth);
                }
            }
            tracker.advance(pos, s);
            traj.positions.push_back(pos);
            traj.heading.push_back(heading);
        }
        return traj;
    }

private:
    SurrogateParams params_;
};

}  // namespace lamarck
