// Command-line front end: scenario runs, calibration utilities, IR model
// fitting, and plane-reflection helpers.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mirage/pipeline.hpp"

namespace {

using nlohmann::json;

Eigen::Vector3d parse_vec3(const std::string& text) {
    Eigen::Vector3d v;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> v.x() >> c1 >> v.y() >> c2 >> v.z()) || c1 != ',' || c2 != ',')
        throw mirage::ParseError("expected 'x,y,z', got '" + text + "'");
    return v;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mirage::IoError("cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw mirage::ParseError(path + ": " + e.what());
    }
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw mirage::IoError("cannot write " + path);
    out << text;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            const std::vector<double>& snapshot_ms,
            const std::string& rig_mesh, const std::string& rig_sidecar,
            const std::string& emit_rig_dir) {
    mirage::Scenario sc = mirage::scenario_from_json(load_json(scenario_path));
    mirage::RunOptions options;
    options.snapshot_times_ms = snapshot_ms;

    mirage::RunResult result = [&] {
        if (!rig_mesh.empty()) {
            auto [armature, mesh] = mirage::load_rig(rig_mesh, rig_sidecar);
            return mirage::run_pipeline(sc, armature, mesh, options);
        }
        return mirage::run_pipeline(sc, options);
    }();

    mirage::write_report(result, out_dir);

    if (!emit_rig_dir.empty()) {
        auto [armature, mesh] = mirage::build_reference_rig({sc.body, 12, 6});
        std::filesystem::create_directories(emit_rig_dir);
        mirage::save_rig(emit_rig_dir + "/avatar.ply",
                         emit_rig_dir + "/avatar_rig.json", armature, mesh);
    }

    std::cout << mirage::metrics_summary_json(result.metrics).dump(2) << '\n';
    return 0;
}

int cmd_calibrate(const std::string& observations_path,
                  const std::string& report_path, const std::string& csv_path,
                  double sync_tolerance_ms,
                  const std::string& correspondences_path,
                  const std::string& out_path) {
    if (!correspondences_path.empty()) {
        const auto [source, target] =
            mirage::correspondences_from_json(load_json(correspondences_path));
        const mirage::RigidTransform t = mirage::rigid_register(source, target);
        const json j = mirage::to_json(t);
        if (!out_path.empty()) save_text(out_path, j.dump(2) + "\n");
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    const json log = load_json(observations_path);
    if (!log.contains("pairs") || !log["pairs"].is_array() ||
        log["pairs"].empty())
        throw mirage::ParseError(
            "observation log needs a non-empty 'pairs' array");

    std::vector<mirage::RigidTransform> extrinsics;
    for (const auto& pair : log["pairs"]) {
        extrinsics.push_back(mirage::marker_extrinsic(
            mirage::observation_from_json(pair.at("hmd")),
            mirage::observation_from_json(pair.at("tracker")),
            sync_tolerance_ms));
    }
    if (extrinsics.size() < 2)
        throw mirage::ValidationError(
            "repeatability needs an initial pair plus at least one sample");

    const std::span<const mirage::RigidTransform> samples{
        extrinsics.data() + 1, extrinsics.size() - 1};
    const mirage::CalibrationReport report =
        mirage::repeatability(extrinsics.front(), samples);

    const json j = mirage::report_to_json(report);
    if (!report_path.empty()) save_text(report_path, j.dump(2) + "\n");
    if (!csv_path.empty()) save_text(csv_path, mirage::report_to_csv(report));
    std::cout << j["translation_stats"].dump() << '\n'
              << j["rotation_stats"].dump() << '\n';
    return 0;
}

int cmd_ir_fit(const std::string& samples_path, double threshold,
               const std::string& out_path) {
    std::ifstream in(samples_path);
    if (!in) throw mirage::IoError("cannot open " + samples_path);
    const auto samples = mirage::ir_samples_from_csv(in);
    const mirage::IrFit fit = mirage::fit_ir_model(samples, threshold);

    json j = mirage::ir_model_to_json(fit.model);
    j["fit_rms"] = fit.rms;
    j["max_distance_direct_m"] = mirage::max_tracking_distance(fit.model, false);
    j["max_distance_reflected_m"] =
        mirage::max_tracking_distance(fit.model, true);
    j["max_mirror_distance_m"] = mirage::max_mirror_distance(fit.model);
    if (!out_path.empty()) save_text(out_path, j.dump(2) + "\n");
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_reflect(const std::string& normal_text, double offset,
                const std::string& frame_name_text,
                const std::vector<std::string>& points,
                const std::string& marker_text,
                const std::string& detections_path, double now_ms) {
    const mirage::FrameId frame = mirage::frame_from_name(frame_name_text);
    json out;

    if (!marker_text.empty()) {
        const mirage::MirrorEstimate est =
            mirage::estimate_mirror(parse_vec3(marker_text), frame, 0.0);
        out["mirror_estimate"] = mirage::mirror_estimate_to_json(est);
    }

    if (!detections_path.empty()) {
        const auto detections =
            mirage::detections_from_json(load_json(detections_path));
        const mirage::SceneClassification c =
            mirage::classify_scene(detections, now_ms);
        json jc;
        jc["scene"] = c.kind == mirage::SceneKind::ReflectedScene
                          ? "ReflectedScene"
                          : "RealScene";
        if (c.evidence)
            jc["evidence"] = mirage::mirror_estimate_to_json(*c.evidence);
        out["classification"] = jc;
    }

    const Eigen::Vector3d n = parse_vec3(normal_text);
    if (n.norm() < 1e-12) throw mirage::ValidationError("zero plane normal");
    const mirage::MirrorPlane plane{n.normalized(), offset, frame};
    const mirage::ReflectionTransform refl = mirage::reflection_about(plane);

    json mat = json::array();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) mat.push_back(refl.matrix()(r, c));
    out["plane"] = {{"normal", {plane.normal.x(), plane.normal.y(), plane.normal.z()}},
                    {"offset_m", plane.offset},
                    {"frame", std::string(mirage::frame_name(frame))}};
    out["reflection"] = mat;

    json reflected = json::array();
    for (const std::string& p : points) {
        const Eigen::Vector3d in = parse_vec3(p);
        const Eigen::Vector3d r = mirage::apply_point(refl, in);
        reflected.push_back({{"input", {in.x(), in.y(), in.z()}},
                             {"reflected", {r.x(), r.y(), r.z()}}});
    }
    out["points"] = reflected;

    std::cout << out.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mirror-based self-augmentation simulator"};
    app.require_subcommand(1);

    // run
    std::string scenario_path, out_dir, rig_mesh, rig_sidecar, emit_rig_dir;
    std::vector<double> snapshot_ms;
    auto* run = app.add_subcommand("run", "simulate a scenario and write metrics");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--snapshot-ms", snapshot_ms, "posed-mesh PLY snapshot times");
    auto* rig_mesh_opt = run->add_option("--rig-mesh", rig_mesh,
                                         "avatar mesh (ASCII PLY)");
    auto* rig_sidecar_opt =
        run->add_option("--rig-sidecar", rig_sidecar, "rig sidecar JSON");
    rig_mesh_opt->needs(rig_sidecar_opt);
    rig_sidecar_opt->needs(rig_mesh_opt);
    run->add_option("--emit-rig", emit_rig_dir,
                    "also write the built-in reference rig to this directory");

    // calibrate
    std::string observations_path, report_path, csv_path, correspondences_path,
        register_out;
    double sync_tolerance_ms = 33.0;
    auto* calibrate = app.add_subcommand(
        "calibrate", "marker-pair repeatability report or point registration");
    calibrate->add_option("--observations", observations_path,
                          "marker observation pair log (JSON)");
    calibrate->add_option("--report", report_path, "report JSON output");
    calibrate->add_option("--csv", csv_path, "report CSV output");
    calibrate->add_option("--sync-tolerance-ms", sync_tolerance_ms,
                          "pair synchronization tolerance");
    calibrate->add_option("--correspondences", correspondences_path,
                          "3D-3D correspondence set (JSON)");
    calibrate->add_option("--out", register_out,
                          "registered transform JSON output");

    // ir-fit
    std::string ir_samples_path, ir_out;
    double ir_threshold = 0.0;
    auto* irfit = app.add_subcommand("ir-fit", "fit the IR falloff model");
    irfit->add_option("--samples", ir_samples_path, "CSV of IR samples")->required();
    irfit->add_option("--threshold", ir_threshold, "tracking intensity threshold")
        ->required();
    irfit->add_option("--out", ir_out, "fitted model JSON output");

    // reflect
    std::string normal_text = "0,0,1", marker_text, frame_text = "HmdRgb";
    std::string detections_path;
    double offset = 0.0, now_ms = 0.0;
    std::vector<std::string> point_texts;
    auto* reflect = app.add_subcommand("reflect", "plane reflection utility");
    reflect->add_option("--normal", normal_text, "plane normal 'x,y,z'");
    reflect->add_option("--offset", offset, "plane offset (meters)");
    reflect->add_option("--frame", frame_text, "frame label");
    reflect->add_option("--point", point_texts, "point 'x,y,z' to reflect");
    reflect->add_option("--marker", marker_text,
                        "marker center 'x,y,z'; prints the mirror estimate");
    reflect->add_option("--detections", detections_path,
                        "marker detection log (JSON list); prints the scene "
                        "classification");
    reflect->add_option("--now", now_ms, "classification time (ms)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, out_dir, snapshot_ms, rig_mesh,
                           rig_sidecar, emit_rig_dir);
        if (calibrate->parsed()) {
            if (observations_path.empty() && correspondences_path.empty())
                throw mirage::ValidationError(
                    "calibrate needs --observations or --correspondences");
            return cmd_calibrate(observations_path, report_path, csv_path,
                                 sync_tolerance_ms, correspondences_path,
                                 register_out);
        }
        if (irfit->parsed())
            return cmd_ir_fit(ir_samples_path, ir_threshold, ir_out);
        if (reflect->parsed())
            return cmd_reflect(normal_text, offset, frame_text, point_texts,
                               marker_text, detections_path, now_ms);
    } catch (const mirage::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
