#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "mirage/random.hpp"
#include "mirage/sensing.hpp"

using namespace mirage;

namespace {

// Reference-style synthetic curves: generation side of the fit oracle.
std::vector<IrSample> synth_samples(const IrModel& m, int count_per_branch,
                                    double noise_sigma, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<IrSample> samples;
    for (int i = 0; i < count_per_branch; ++i) {
        const double d =
            0.8 + (4.0 - 0.8) * static_cast<double>(i) / (count_per_branch - 1);
        for (bool reflected : {false, true}) {
            double intensity = ir_intensity(m, d, reflected);
            if (noise_sigma > 0.0) intensity += rng.normal(noise_sigma);
            samples.push_back({d, intensity, reflected});
        }
    }
    return samples;
}

const IrModel kReferenceModel{1600.0, 200.0, 0.45, 300.0};

} // namespace

TEST_SUITE("sensing") {

TEST_CASE("ir_intensity: inverse square law and reflectivity") {
    IrModel m{1.0, 0.0, 1.0, 0.25};
    CHECK(ir_intensity(m, 1.0, false) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ir_intensity(m, 2.0, false) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ir_intensity(m, 2.0, true) == ir_intensity(m, 2.0, false));

    IrModel dim = kReferenceModel;
    for (double d = 0.5; d < 6.0; d += 0.25)
        CHECK(ir_intensity(dim, d, true) < ir_intensity(dim, d, false));

    CHECK_THROWS_AS(ir_intensity(m, 0.0, false), DomainError);
    CHECK_THROWS_AS(ir_intensity(m, -1.0, true), DomainError);
}

TEST_CASE("ir_intensity: monotone in distance and reflectivity") {
    IrModel m = kReferenceModel;
    double prev = ir_intensity(m, 0.5, true);
    for (double d = 0.6; d < 5.0; d += 0.1) {
        const double cur = ir_intensity(m, d, true);
        CHECK(cur < prev);
        prev = cur;
    }
    IrModel lo = m, hi = m;
    lo.reflectivity = 0.3;
    hi.reflectivity = 0.6;
    for (double d = 0.5; d < 5.0; d += 0.5)
        CHECK(ir_intensity(lo, d, true) < ir_intensity(hi, d, true));
}

TEST_CASE("fit_ir_model: noiseless recovery to 1e-6 relative error") {
    const auto samples = synth_samples(kReferenceModel, 16, 0.0, 0);
    const IrFit fit = fit_ir_model(samples, kReferenceModel.threshold);
    CHECK(std::abs(fit.model.falloff / kReferenceModel.falloff - 1.0) < 1e-6);
    CHECK(std::abs(fit.model.reflectivity / kReferenceModel.reflectivity - 1.0) <
          1e-6);
    CHECK(std::abs(fit.model.floor - kReferenceModel.floor) <
          1e-6 * kReferenceModel.floor);
    CHECK(fit.rms < 1e-9);
}

TEST_CASE("fit_ir_model: 1%-of-peak noise keeps parameters within 5%") {
    double peak = 0.0;
    for (const IrSample& s : synth_samples(kReferenceModel, 16, 0.0, 0))
        peak = std::max(peak, s.intensity);
    const double sigma = 0.01 * peak;

    std::vector<double> err_a, err_b, err_r;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto samples =
            synth_samples(kReferenceModel, 16, sigma, derive_seed(77, "irfit", seed));
        const IrFit fit = fit_ir_model(samples, kReferenceModel.threshold);
        err_a.push_back(std::abs(fit.model.falloff / kReferenceModel.falloff - 1.0));
        err_b.push_back(std::abs(fit.model.floor / kReferenceModel.floor - 1.0));
        err_r.push_back(
            std::abs(fit.model.reflectivity / kReferenceModel.reflectivity - 1.0));
    }
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    };
    CHECK(mean(err_a) < 0.05);
    CHECK(mean(err_b) < 0.05);
    CHECK(mean(err_r) < 0.05);
}

TEST_CASE("fit_ir_model: degenerate designs are rejected") {
    std::vector<IrSample> clustered;
    for (int i = 0; i < 6; ++i)
        clustered.push_back({2.0, 420.0, i % 2 == 1}); // one distance only
    CHECK_THROWS_AS(fit_ir_model(clustered, 120.0), ValidationError);

    std::vector<IrSample> too_few = {{1.0, 1620.0, false}, {2.0, 420.0, false},
                                     {3.0, 197.0, false},  {1.0, 740.0, true},
                                     {2.0, 200.0, true}};
    CHECK_THROWS_AS(fit_ir_model(too_few, 120.0), ValidationError);
}

TEST_CASE("max_tracking_distance: algebraic examples") {
    IrModel m{1.0, 0.0, 1.0, 0.25};
    CHECK(max_tracking_distance(m, false) == doctest::Approx(2.0).epsilon(1e-12));
    m.reflectivity = 0.25;
    CHECK(max_tracking_distance(m, true) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_mirror_distance(m) == doctest::Approx(0.5).epsilon(1e-12));

    IrModel unbounded{1.0, 0.5, 1.0, 0.75};
    unbounded.threshold = 0.5; // equal to the floor
    CHECK_THROWS_AS(max_tracking_distance(unbounded, false), UnboundedRangeError);
}

TEST_CASE("max_tracking_distance: intensity at the limit equals the threshold") {
    Rng rng(61);
    for (int i = 0; i < 100; ++i) {
        IrModel m;
        m.falloff = rng.uniform(10.0, 5000.0);
        m.floor = rng.uniform(0.0, 50.0);
        m.reflectivity = rng.uniform(0.05, 1.0);
        m.threshold = m.floor + rng.uniform(1.0, 500.0);
        for (bool reflected : {false, true}) {
            const double limit = max_tracking_distance(m, reflected);
            CHECK(ir_intensity(m, limit, reflected) ==
                  doctest::Approx(m.threshold).epsilon(1e-9));
        }
    }
}

TEST_CASE("fitted reference curves keep the mirror workspace beyond 1 m") {
    const auto samples = synth_samples(kReferenceModel, 16, 0.0, 0);
    const IrFit fit = fit_ir_model(samples, kReferenceModel.threshold);
    CHECK(max_mirror_distance(fit.model) >= 1.0);
}

TEST_CASE("perturb_skeleton: zero sigma, seed determinism") {
    BodyDimensions dims;
    const Skeleton base = synth_skeleton(PoseParams{}, dims, 0.0);

    DepthSensorSpec quiet;
    quiet.joint_sigma_m = 0.0;
    const Skeleton same = perturb_skeleton(base, quiet, 123);
    for (int k = 0; k < kJointCount; ++k) CHECK(same.joints[k] == base.joints[k]);

    DepthSensorSpec noisy;
    noisy.joint_sigma_m = 0.01;
    const Skeleton a = perturb_skeleton(base, noisy, 42);
    const Skeleton b = perturb_skeleton(base, noisy, 42);
    const Skeleton c = perturb_skeleton(base, noisy, 43);
    bool all_equal = true, any_diff_seed = false;
    for (int k = 0; k < kJointCount; ++k) {
        if (a.joints[k] != b.joints[k]) all_equal = false;
        if (a.joints[k] != c.joints[k]) any_diff_seed = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_seed);
    CHECK(a.timestamp_ms == base.timestamp_ms);
    CHECK(a.chirality == base.chirality);
}

TEST_CASE("perturb_skeleton: empirical per-joint spread matches sigma") {
    BodyDimensions dims;
    const Skeleton base = synth_skeleton(PoseParams{}, dims, 0.0);
    DepthSensorSpec spec;
    spec.joint_sigma_m = 0.013;

    const int draws = 10000;
    std::vector<double> acc(kJointCount, 0.0);
    for (int i = 0; i < draws; ++i) {
        const Skeleton p = perturb_skeleton(base, spec, derive_seed(5, "mc", i));
        for (int k = 0; k < kJointCount; ++k)
            acc[k] += (p.joints[k] - base.joints[k]).squaredNorm();
    }
    for (int k = 0; k < kJointCount; ++k) {
        const double est = std::sqrt(acc[k] / (3.0 * draws)); // pooled per axis
        CHECK(std::abs(est / spec.joint_sigma_m - 1.0) < 0.05);
    }
}

TEST_CASE("sensor spec validation") {
    DepthSensorSpec bad;
    bad.width = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    DepthSensorSpec neg;
    neg.joint_sigma_m = -0.1;
    BodyDimensions dims;
    CHECK_THROWS_AS(
        perturb_skeleton(synth_skeleton(PoseParams{}, dims, 0.0), neg, 1),
        ValidationError);
}

TEST_CASE("IR sample CSV round trip and model JSON") {
    const auto samples = synth_samples(kReferenceModel, 4, 0.0, 0);
    const std::string csv = ir_samples_to_csv(samples);
    std::istringstream in(csv);
    const auto back = ir_samples_from_csv(in);
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(back[i].distance_m == samples[i].distance_m);
        CHECK(back[i].intensity == samples[i].intensity);
        CHECK(back[i].reflected == samples[i].reflected);
    }

    std::istringstream empty("");
    CHECK_THROWS_AS(ir_samples_from_csv(empty), ParseError);
    std::istringstream headerless("1.0,2.0,0\n");
    CHECK_THROWS_AS(ir_samples_from_csv(headerless), ParseError);
    std::istringstream short_row("distance_m,intensity,reflected\n1.0,2.0\n");
    CHECK_THROWS_AS(ir_samples_from_csv(short_row), ParseError);

    const IrModel back_model = ir_model_from_json(ir_model_to_json(kReferenceModel));
    CHECK(back_model.falloff == kReferenceModel.falloff);
    CHECK(back_model.reflectivity == kReferenceModel.reflectivity);

    nlohmann::json bad = ir_model_to_json(kReferenceModel);
    bad["reflectivity"] = 1.5;
    CHECK_THROWS_AS(ir_model_from_json(bad), ValidationError);
}


TEST_CASE("sample_skeleton carries the saturation verdict") {
    BodyDimensions dims;
    const Skeleton base = synth_skeleton(PoseParams{}, dims, 0.0);
    DepthSensorSpec spec;
    spec.joint_sigma_m = 0.005;
    spec.head_saturation = true;
    const PerturbedSample sample = sample_skeleton(base, spec, 9);
    CHECK(sample.head_occluded);
    CHECK(sample.skeleton.joints ==
          perturb_skeleton(base, spec, 9).joints);
    spec.head_saturation = false;
    CHECK_FALSE(sample_skeleton(base, spec, 9).head_occluded);
}

} // TEST_SUITE
