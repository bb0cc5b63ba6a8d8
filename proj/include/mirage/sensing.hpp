#ifndef MIRAGE_SENSING_HPP
#define MIRAGE_SENSING_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "mirage/skeleton.hpp"

namespace mirage {

/// Inverse-square IR intensity with a noise floor:
///   direct     I(d) = falloff / d^2 + floor
///   reflected  I(d) = reflectivity * falloff / d^2 + floor
/// with d measured to the virtual image (twice the mirror distance).
/// Intensity units are arbitrary; only ratios and the threshold matter.
struct IrModel {
    double falloff = 1.0;      // intensity * m^2
    double floor = 0.0;        // asymptote where no signal is measurable
    double reflectivity = 1.0; // mirror IR reflectivity in (0, 1]
    double threshold = 0.5;    // minimum intensity for reliable tracking

    void validate() const; // throws ValidationError
};

/// Throws DomainError for d <= 0.
double ir_intensity(const IrModel& m, double distance_m, bool reflected);

struct IrSample {
    double distance_m = 0.0;
    double intensity = 0.0;
    bool reflected = false;
};

struct IrFit {
    IrModel model;
    double rms = 0.0; // residual intensity RMS
};

/// Linear least squares in (falloff, reflectivity*falloff, floor) over
/// 1/d^2. Needs at least 3 direct and 3 reflected samples at distinct
/// distances; the threshold is a tracker property supplied by the caller.
IrFit fit_ir_model(std::span<const IrSample> samples, double threshold);

/// Largest distance still tracked: sqrt(falloff / (threshold - floor)),
/// scaled by sqrt(reflectivity) for reflections. Distance to the virtual
/// image; halve for the mirror distance. Throws UnboundedRangeError when
/// the threshold does not exceed the floor.
double max_tracking_distance(const IrModel& m, bool reflected);

/// Largest camera-to-mirror distance with working reflected tracking.
double max_mirror_distance(const IrModel& m);

struct DepthSensorSpec {
    int width = 320;
    int height = 240;
    double frame_rate_hz = 30.0;
    double joint_sigma_m = 0.0; // isotropic per-joint position noise
    /// Direct reflection of the IR pattern can saturate the sensor and hide
    /// the head region; modeled as a flag on the sample, not in image space.
    bool head_saturation = false;

    void validate() const;
};

/// Adds iid zero-mean isotropic Gaussian noise to every joint. Deterministic
/// for a given seed, bit for bit.
Skeleton perturb_skeleton(const Skeleton& s, const DepthSensorSpec& spec,
                          std::uint64_t seed);

/// A perturbed skeleton plus the saturation verdict for its head region.
struct PerturbedSample {
    Skeleton skeleton;
    bool head_occluded = false;
};

PerturbedSample sample_skeleton(const Skeleton& s, const DepthSensorSpec& spec,
                                std::uint64_t seed);

/// CSV columns: distance_m,intensity,reflected (0/1). Header required.
std::vector<IrSample> ir_samples_from_csv(std::istream& in);
std::string ir_samples_to_csv(std::span<const IrSample> samples);

nlohmann::json ir_model_to_json(const IrModel& m);
IrModel ir_model_from_json(const nlohmann::json& j);

} // namespace mirage

#endif
