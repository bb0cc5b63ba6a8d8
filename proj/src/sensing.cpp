#include "mirage/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <set>
#include <sstream>

#include "mirage/random.hpp"

namespace mirage {

void IrModel::validate() const {
    if (!(falloff > 0.0)) throw ValidationError("IR falloff must be positive");
    if (!(reflectivity > 0.0) || reflectivity > 1.0)
        throw ValidationError("IR reflectivity must lie in (0, 1]");
    if (!(threshold > floor))
        throw ValidationError("tracking threshold must exceed the noise floor");
    if (!std::isfinite(floor)) throw ValidationError("IR floor is non-finite");
}

double ir_intensity(const IrModel& m, double distance_m, bool reflected) {
    if (!(distance_m > 0.0))
        throw DomainError("IR intensity is undefined for non-positive distance");
    const double gain = reflected ? m.reflectivity * m.falloff : m.falloff;
    return gain / (distance_m * distance_m) + m.floor;
}

IrFit fit_ir_model(std::span<const IrSample> samples, double threshold) {
    std::set<double> direct_d, reflected_d;
    for (const IrSample& s : samples) {
        if (!(s.distance_m > 0.0))
            throw ValidationError("IR sample with non-positive distance");
        (s.reflected ? reflected_d : direct_d).insert(s.distance_m);
    }
    if (direct_d.size() < 3 || reflected_d.size() < 3)
        throw ValidationError(
            "IR fit needs at least 3 direct and 3 reflected samples at "
            "distinct distances");

    // I = a * x + b (direct), I = c * x + b (reflected), x = 1/d^2;
    // then reflectivity = c / a.
    Eigen::MatrixXd design(samples.size(), 3);
    Eigen::VectorXd rhs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = 1.0 / (samples[i].distance_m * samples[i].distance_m);
        design(static_cast<Eigen::Index>(i), 0) = samples[i].reflected ? 0.0 : x;
        design(static_cast<Eigen::Index>(i), 1) = samples[i].reflected ? x : 0.0;
        design(static_cast<Eigen::Index>(i), 2) = 1.0;
        rhs(static_cast<Eigen::Index>(i)) = samples[i].intensity;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(2) < 1e-12 * svd.singularValues()(0))
        throw ValidationError(
            "IR sample design is rank deficient (distances too clustered)");
    const Eigen::Vector3d sol = svd.solve(rhs);

    IrFit fit;
    fit.model.falloff = sol(0);
    fit.model.floor = sol(2);
    if (!(sol(0) > 0.0))
        throw ValidationError("fitted IR falloff is not positive");
    fit.model.reflectivity = std::clamp(sol(1) / sol(0), 1e-12, 1.0);
    fit.model.threshold = threshold;
    fit.model.validate();
    fit.rms = std::sqrt((design * sol - rhs).squaredNorm() /
                        static_cast<double>(samples.size()));
    return fit;
}

double max_tracking_distance(const IrModel& m, bool reflected) {
    if (!(m.threshold > m.floor))
        throw UnboundedRangeError(
            "threshold at or below the floor gives unbounded range");
    const double gain = reflected ? m.reflectivity * m.falloff : m.falloff;
    return std::sqrt(gain / (m.threshold - m.floor));
}

double max_mirror_distance(const IrModel& m) {
    return 0.5 * max_tracking_distance(m, true);
}

void DepthSensorSpec::validate() const {
    if (width <= 0 || height <= 0)
        throw ValidationError("sensor resolution must be positive");
    if (!(frame_rate_hz > 0.0))
        throw ValidationError("sensor frame rate must be positive");
    if (joint_sigma_m < 0.0 || !std::isfinite(joint_sigma_m))
        throw ValidationError("joint noise sigma must be nonnegative");
}

Skeleton perturb_skeleton(const Skeleton& s, const DepthSensorSpec& spec,
                          std::uint64_t seed) {
    spec.validate();
    if (spec.joint_sigma_m == 0.0) return s;
    Rng rng(seed);
    Skeleton out = s;
    for (auto& p : out.joints) p += rng.normal3(spec.joint_sigma_m);
    return out;
}

PerturbedSample sample_skeleton(const Skeleton& s, const DepthSensorSpec& spec,
                                std::uint64_t seed) {
    return {perturb_skeleton(s, spec, seed), spec.head_saturation};
}

std::vector<IrSample> ir_samples_from_csv(std::istream& in) {
    std::vector<IrSample> samples;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty IR sample CSV");
    // tolerate an optional UTF-8 BOM before the header
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.rfind("distance_m", 0) != 0)
        throw ParseError("IR sample CSV must start with the header "
                         "'distance_m,intensity,reflected'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string d, i, r;
        if (!std::getline(row, d, ',') || !std::getline(row, i, ',') ||
            !std::getline(row, r))
            throw ParseError("IR sample CSV line " + std::to_string(lineno) +
                             " does not have 3 columns");
        try {
            samples.push_back(
                {std::stod(d), std::stod(i), std::stoi(r) != 0});
        } catch (const std::exception&) {
            throw ParseError("IR sample CSV line " + std::to_string(lineno) +
                             " is not numeric");
        }
    }
    return samples;
}

std::string ir_samples_to_csv(std::span<const IrSample> samples) {
    std::string out = "distance_m,intensity,reflected\n";
    char buf[96];
    for (const IrSample& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", s.distance_m,
                      s.intensity, s.reflected ? 1 : 0);
        out += buf;
    }
    return out;
}

nlohmann::json ir_model_to_json(const IrModel& m) {
    return {{"falloff", m.falloff},
            {"floor", m.floor},
            {"reflectivity", m.reflectivity},
            {"threshold", m.threshold}};
}

IrModel ir_model_from_json(const nlohmann::json& j) {
    try {
        IrModel m;
        m.falloff = j.at("falloff").get<double>();
        m.floor = j.at("floor").get<double>();
        m.reflectivity = j.at("reflectivity").get<double>();
        m.threshold = j.at("threshold").get<double>();
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad IR model JSON: ") + e.what());
    }
}

} // namespace mirage
