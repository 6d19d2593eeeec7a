#pragma once

// Summary statistics, correlation, similarity measures and PCA.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

namespace lamarck {

inline double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double stddev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Two-sided 95% critical value of Student's t with `dof` degrees of freedom.
inline double t_critical(double dof, double confidence = 0.95) {
    if (!(dof > 0)) throw std::invalid_argument("t distribution needs dof > 0");
    const boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
    double sd = 0.0;
    double ci_half_width = 0.0;  // t-value x standard error; 0 when n < 2
};

inline Summary summarize(std::span<const double> v, double confidence = 0.95) {
    Summary s;
    s.n = v.size();
    s.mean = mean(v);
    s.max = *std::max_element(v.begin(), v.end());
    s.min = *std::min_element(v.begin(), v.end());
    s.sd = stddev(v);
    if (v.size() >= 2) {
        const double se = s.sd / std::sqrt(static_cast<double>(v.size()));
        s.ci_half_width = t_critical(static_cast<double>(v.size() - 1), confidence) * se;
    }
    return s;
}

struct Correlation {
    std::size_t n = 0;
    std::optional<double> r;        // undefined when either variable is constant
    std::optional<double> p_value;  // two-sided, t test with n - 2 dof
};

inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: samples differ in length");
    if (x.size() < 3) throw std::invalid_argument("pearson needs at least 3 paired observations");
    Correlation c;
    c.n = x.size();
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return c;
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    c.r = r;
    const double dof = static_cast<double>(x.size() - 2);
    if (std::abs(r) >= 1.0) {
        c.p_value = 0.0;
    } else {
        const double t = r * std::sqrt(dof / (1.0 - r * r));
        const boost::math::students_t dist(dof);
        c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
    return c;
}

/// Cosine of the angle between two vectors; 0 if either is the zero vector.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine similarity: vectors differ in length");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double learning_delta(double before, double after) { return after - before; }

/// mean(new) / mean(old); undefined when the old mean is not positive.
inline std::optional<double> transferability(std::span<const double> old_fitness, std::span<const double> new_fitness) {
    if (old_fitness.size() != new_fitness.size() || old_fitness.empty()) {
        throw std::invalid_argument("transferability needs paired, non-empty fitness lists");
    }
    const double mo = mean(old_fitness);
    if (!(mo > 0.0)) return std::nullopt;
    return mean(new_fitness) / mo;
}

/// (max - d) / max with max the largest distance in the dataset; all 1 when max is 0.
inline std::vector<double> normalized_similarity(std::span<const double> distances) {
    std::vector<double> out(distances.size(), 1.0);
    if (distances.empty()) return out;
    const double mx = *std::max_element(distances.begin(), distances.end());
    if (mx <= 0.0) return out;
    for (std::size_t i = 0; i < distances.size(); ++i) out[i] = (mx - distances[i]) / mx;
    return out;
}

struct PcaResult {
    Eigen::MatrixXd loadings;            // columns are components (unit eigenvectors), descending variance
    Eigen::MatrixXd scores;              // samples x components
    Eigen::VectorXd explained_variance;  // fraction of total variance per component
    Eigen::VectorXd eigenvalues;
    Eigen::VectorXd center;
    Eigen::VectorXd scale;               // per-column sd; constant columns get 1
    Eigen::MatrixXd standardized;
};

/// PCA of the column-standardized data matrix (rows are samples).
inline PcaResult pca(const Eigen::MatrixXd& data) {
    if (data.rows() < 2) throw std::invalid_argument("pca needs at least 2 samples");
    PcaResult r;
    const auto n = static_cast<double>(data.rows());
    r.center = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - r.center.transpose();
    r.scale = ((centered.array().square().colwise().sum()) / (n - 1.0)).sqrt();
    for (Eigen::Index j = 0; j < r.scale.size(); ++j) {
        if (r.scale(j) == 0.0) r.scale(j) = 1.0;
    }
    r.standardized = centered.array().rowwise() / r.scale.transpose().array();
    const Eigen::MatrixXd cov = (r.standardized.transpose() * r.standardized) / (n - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("pca eigen decomposition failed");
    // Eigen sorts ascending; flip to descending.
    const Eigen::Index k = cov.rows();
    r.eigenvalues.resize(k);
    r.loadings.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        r.eigenvalues(i) = std::max(0.0, es.eigenvalues()(k - 1 - i));
        Eigen::VectorXd v = es.eigenvectors().col(k - 1 - i);
        // Sign convention: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        r.loadings.col(i) = v;
    }
    const double total = r.eigenvalues.sum();
    r.explained_variance = total > 0 ? Eigen::VectorXd(r.eigenvalues / total) : Eigen::VectorXd::Zero(k);
    r.scores = r.standardized * r.loadings;
    return r;
}

}  // namespace lamarck
