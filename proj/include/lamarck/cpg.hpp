#pragma once

// Central pattern generator network built from a body and a brain genome.
//
// Every hinge carries one oscillator (x, y) with internal weight w:
//   dx_i/dt =  w_i y_i + sum_{j in N_i} w_ji x_j
//   dy_i/dt = -w_i x_i
// with w_ji = -w_ij. N_i holds the joints within tree distance 2 of joint i.
// The joint command is tanh(x_i).

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamarck/brain_genotype.hpp"
#include "lamarck/morphology.hpp"

namespace lamarck {

struct CpgParameter {
    BrainAddress address;
    double value = 0.0;
    friend bool operator==(const CpgParameter&, const CpgParameter&) = default;
};

struct Oscillator {
    int module = 0;
    Cell cell;
    std::size_t weight = 0;  // index into parameters
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Oscillator&, const Oscillator&) = default;
};

/// Coupling between oscillators `owner` and `other`; parameter p is w_{owner,other},
/// so x_other receives +p * x_owner and x_owner receives -p * x_other.
struct Coupling {
    std::size_t owner = 0;
    std::size_t other = 0;
    std::size_t weight = 0;
    friend bool operator==(const Coupling&, const Coupling&) = default;
};

inline constexpr double kCpgInitialState = std::numbers::sqrt2 / 2.0;

class CpgNetwork {
public:
    const std::vector<CpgParameter>& parameters() const { return params_; }
    const std::vector<Oscillator>& oscillators() const { return osc_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    std::size_t size() const { return osc_.size(); }

    /// Learnable weight vector, one entry per distinct genome address.
    std::vector<double> weights() const {
        std::vector<double> w;
        w.reserve(params_.size());
        for (const auto& p : params_) w.push_back(p.value);
        return w;
    }

    void set_weights(std::span<const double> w) {
        if (w.size() != params_.size()) {
            throw std::invalid_argument("weight vector has " + std::to_string(w.size()) + " entries, network has " +
                                        std::to_string(params_.size()));
        }
        for (std::size_t i = 0; i < w.size(); ++i) params_[i].value = w[i];
    }

    void reset_state() {
        for (auto& o : osc_) o.x = o.y = kCpgInitialState;
    }

    double internal_weight(std::size_t i) const { return params_[osc_[i].weight].value; }

    /// One classical Runge-Kutta step of size dt.
    void step(double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("cpg step needs dt > 0");
        const std::size_t n = osc_.size();
        if (n == 0) return;
        s0_.resize(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            s0_[2 * i] = osc_[i].x;
            s0_[2 * i + 1] = osc_[i].y;
        }
        k1_.resize(2 * n);
        k2_.resize(2 * n);
        k3_.resize(2 * n);
        k4_.resize(2 * n);
        tmp_.resize(2 * n);
        derivative(s0_, k1_);
        for (std::size_t i = 0; i < 2 * n; ++i) tmp_[i] = s0_[i] + 0.5 * dt * k1_[i];
        derivative(tmp_, k2_);
        for (std::size_t i = 0; i < 2 * n; ++i) tmp_[i] = s0_[i] + 0.5 * dt * k2_[i];
        derivative(tmp_, k3_);
        for (std::size_t i = 0; i < 2 * n; ++i) tmp_[i] = s0_[i] + dt * k3_[i];
        derivative(tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = 2 * i;
            const std::size_t b = a + 1;
            osc_[i].x = s0_[a] + dt / 6.0 * (k1_[a] + 2.0 * k2_[a] + 2.0 * k3_[a] + k4_[a]);
            osc_[i].y = s0_[b] + dt / 6.0 * (k1_[b] + 2.0 * k2_[b] + 2.0 * k3_[b] + k4_[b]);
            if (!std::isfinite(osc_[i].x) || !std::isfinite(osc_[i].y)) {
                std::ostringstream msg;
                msg << "cpg state diverged at oscillator " << i << " (module " << osc_[i].module
                    << ", w=" << internal_weight(i) << ")";
                throw std::runtime_error(msg.str());
            }
        }
    }

    /// Joint commands tanh(x_i), written as 2 / (1 + e^(-2x)) - 1.
    std::vector<double> outputs() const {
        std::vector<double> out;
        out.reserve(osc_.size());
        for (const auto& o : osc_) out.push_back(std::tanh(o.x));
        return out;
    }

    void outputs(std::span<double> out) const {
        for (std::size_t i = 0; i < osc_.size(); ++i) out[i] = std::tanh(osc_[i].x);
    }

    friend bool operator==(const CpgNetwork& a, const CpgNetwork& b) {
        return a.params_ == b.params_ && a.osc_ == b.osc_ && a.couplings_ == b.couplings_;
    }

private:
    friend CpgNetwork build_network(const ModuleTree&, const BrainGenotype&);

    void derivative(const std::vector<double>& s, std::vector<double>& d) const {
        const std::size_t n = osc_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double w = params_[osc_[i].weight].value;
            d[2 * i] = w * s[2 * i + 1];
            d[2 * i + 1] = -w * s[2 * i];
        }
        for (const auto& c : couplings_) {
            const double p = params_[c.weight].value;
            d[2 * c.other] += p * s[2 * c.owner];
            d[2 * c.owner] -= p * s[2 * c.other];
        }
    }

    std::size_t intern(BrainAddress a, const BrainGenotype& g) {
        auto [it, inserted] = index_.try_emplace(a, params_.size());
        if (inserted) params_.push_back({a, g[a]});
        return it->second;
    }

    std::vector<CpgParameter> params_;
    std::vector<Oscillator> osc_;
    std::vector<Coupling> couplings_;
    std::map<BrainAddress, std::size_t> index_;
    std::vector<double> s0_, k1_, k2_, k3_, k4_, tmp_;
};

/// Builds the CPG network of a body from the brain genome.
///
/// - Joint i reads its internal weight at (row of its cell, (0,0) column).
/// - Joints within tree distance 2 are coupled. The pair's weight sits in the row
///   of the joint that comes first in breadth-first order, at the column of the
///   other joint's relative cell offset.
/// - Joints projected onto the same cell use the same-cell column instead; when
///   three or more share a cell only consecutive ones (breadth-first order) are
///   linked, all through that single entry.
/// Joints landing on the same genome address share one parameter.
inline CpgNetwork build_network(const ModuleTree& tree, const BrainGenotype& g) {
    CpgNetwork net;
    const std::vector<int> joints = tree.joints();
    for (int id : joints) {
        const Cell c = tree.at(id).cell();
        Oscillator o;
        o.module = id;
        o.cell = c;
        o.weight = net.intern({row_of(c), kInternalColumn}, g);
        o.x = o.y = kCpgInitialState;
        net.osc_.push_back(o);
    }
    for (std::size_t i = 0; i < joints.size(); ++i) {
        for (std::size_t j = i + 1; j < joints.size(); ++j) {
            if (tree_distance(tree, joints[i], joints[j]) > 2) continue;
            const Cell ci = net.osc_[i].cell;
            const Cell cj = net.osc_[j].cell;
            if (ci == cj) {
                // Only link to the next joint sharing this cell.
                bool consecutive = true;
                for (std::size_t k = i + 1; k < j; ++k) {
                    if (net.osc_[k].cell == ci) consecutive = false;
                }
                if (!consecutive) continue;
                net.couplings_.push_back({i, j, net.intern({row_of(ci), kSameCellColumn}, g)});
                continue;
            }
            const int col = column_of({cj.x - ci.x, cj.y - ci.y});
            if (col < 0) {
                throw std::logic_error("joints within tree distance 2 are more than 2 cells apart");
            }
            net.couplings_.push_back({i, j, net.intern({row_of(ci), static_cast<std::size_t>(col)}, g)});
        }
    }
    return net;
}

inline CpgNetwork step_dynamics(CpgNetwork n, double dt) {
    n.step(dt);
    return n;
}

/// Copies the network's current weights back into the genome entries they were
/// read from. Every other entry is left untouched.
inline BrainGenotype writeback(const CpgNetwork& n, const BrainGenotype& g) {
    BrainGenotype out = g;
    std::map<BrainAddress, bool> seen;
    for (const auto& p : n.parameters()) {
        if (p.address.row >= kBrainRows || p.address.column >= kBrainColumns) {
            throw std::invalid_argument("network parameter has an address outside the brain genome");
        }
        if (!seen.emplace(p.address, true).second) {
            throw std::invalid_argument("network parameters do not have unique genome addresses");
        }
        if (!std::isfinite(p.value)) throw std::invalid_argument("learned weight is not finite");
        out[p.address] = p.value;
    }
    return out;
}

}  // namespace lamarck
