// androcon command-line tool: synthetic scenario generation, GnssLogger
// parsing, UKF filtering, classifier training/evaluation, permutation
// importance and indoor floor-map reconstruction.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "androcon/common.hpp"
#include "androcon/evaluate.hpp"
#include "androcon/floormap.hpp"
#include "androcon/log_ingest.hpp"
#include "androcon/pipeline.hpp"
#include "androcon/synth.hpp"

namespace {

using namespace androcon;
namespace fs = std::filesystem;
using nlohmann::json;

json read_json_file(const std::string& path) {
    std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, path + ": " + e.what());
    }
}

LabeledDataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + path);
    return dataset_from_csv(in);
}

/// Reorder/select dataset columns to match a trained model's inputs.
LabeledDataset select_columns(const LabeledDataset& ds, const std::vector<std::string>& names) {
    LabeledDataset out;
    out.labels = ds.labels;
    out.class_names = ds.class_names;
    out.epoch_time_ms = ds.epoch_time_ms;
    out.feature_names = names;
    out.x.resize(ds.rows(), static_cast<Eigen::Index>(names.size()));
    for (size_t j = 0; j < names.size(); ++j) {
        auto it = std::find(ds.feature_names.begin(), ds.feature_names.end(), names[j]);
        if (it == ds.feature_names.end())
            throw Error(ErrorCode::MissingField, "dataset lacks feature " + names[j]);
        out.x.col(static_cast<Eigen::Index>(j)) =
            ds.x.col(std::distance(ds.feature_names.begin(), it));
    }
    return out;
}

struct CommonFlags {
    uint64_t seed = 0;
    bool no_ukf = false;
    bool no_lda = false;
    double drop_threshold = 0.95;

    PipelineOptions pipeline() const {
        PipelineOptions opts;
        opts.use_ukf = !no_ukf;
        opts.use_lda = !no_lda;
        opts.drop_threshold = drop_threshold;
        return opts;
    }
};

int cmd_parse(const std::string& in_path, const std::string& out_path,
              const std::string& label, const std::string& impute, bool include_bb,
              double svid_fraction, uint64_t seed) {
    std::ifstream in(in_path);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + in_path);
    ParseResult parsed = parse_gnss_log(in);

    std::vector<Measurement> ms = std::move(parsed.measurements);
    if (svid_fraction < 1.0) ms = filter_svid_subset(ms, svid_fraction, seed);

    BuildOptions opts;
    opts.label = label;
    opts.include_bb_cn0 = include_bb;
    if (impute == "zero")
        opts.policy = ImputationPolicy::Zero;
    else if (impute == "dataset-mean")
        opts.policy = ImputationPolicy::DatasetMean;
    else if (impute == "reject")
        opts.policy = ImputationPolicy::Reject;
    else
        throw Error(ErrorCode::InvalidArgument, "unknown imputation policy " + impute);

    std::vector<std::string> warnings;
    LabeledDataset ds = build_dataset(group_into_epochs(ms), opts, &warnings);
    write_file_atomic(out_path, dataset_to_csv(ds));

    std::cout << "parsed " << parsed.diagnostics.raw_lines << " raw lines: "
              << parsed.diagnostics.accepted << " accepted, " << parsed.diagnostics.skipped
              << " skipped -> " << ds.rows() << " epochs\n";
    for (const auto& s : parsed.diagnostics.skipped_lines)
        std::cerr << "  line " << s.line_number << ": " << s.reason << "\n";
    for (const auto& w : parsed.diagnostics.warnings) std::cerr << "  " << w << "\n";
    for (const auto& w : warnings) std::cerr << "  " << w << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& layout_path, bool use_default,
              uint64_t seed, bool seed_set, const std::string& out_dir) {
    fs::create_directories(out_dir);
    bool did_work = false;

    if (!spec_path.empty() || use_default) {
        ScenarioSpec spec = ScenarioSpec::default_profile();
        if (!spec_path.empty()) spec = read_json_file(spec_path).get<ScenarioSpec>();
        if (seed_set) spec.seed = seed;
        SynthDataset synth = generate_labeled_dataset(spec);
        write_file_atomic(fs::path(out_dir) / "raw_log.txt", synth.raw_log);
        write_file_atomic(fs::path(out_dir) / "dataset.csv", dataset_to_csv(synth.dataset));
        write_file_atomic(fs::path(out_dir) / "scenario.json", json(spec).dump(2) + "\n");
        std::cout << "scenario: " << synth.dataset.rows() << " epochs x "
                  << synth.dataset.dims() << " features, " << synth.measurements.size()
                  << " raw measurements -> " << out_dir << "\n";
        did_work = true;
    }
    if (!layout_path.empty()) {
        LayoutSpec layout = read_json_file(layout_path).get<LayoutSpec>();
        if (seed_set) layout.seed = seed;
        SynthTrajectories synth = generate_trajectories(layout);
        write_file_atomic(fs::path(out_dir) / "trajectories.csv",
                          trajectories_to_csv(synth.trajectories));
        write_file_atomic(fs::path(out_dir) / "truth_map.json",
                          floor_map_to_json(synth.truth).dump(2) + "\n");
        write_file_atomic(fs::path(out_dir) / "truth_map.svg", floor_map_to_svg(synth.truth));
        std::cout << "layout: " << synth.trajectories.size() << " trajectories, "
                  << synth.truth.landmarks.size() << " landmarks -> " << out_dir << "\n";
        did_work = true;
    }
    if (!did_work)
        throw Error(ErrorCode::InvalidArgument,
                    "nothing to generate: pass --spec, --layout or --default-scenario");
    return 0;
}

int cmd_filter(const std::string& in_path, const std::string& out_path) {
    LabeledDataset ds = read_dataset(in_path);
    write_file_atomic(out_path, dataset_to_csv(apply_ukf_to_dataset(ds)));
    std::cout << "filtered " << ds.rows() << " rows -> " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& model_name, const std::string& in_path,
              const std::string& out_path, const CommonFlags& flags, const json& hp_json) {
    ModelKind kind = model_kind_from_name(model_name);
    LabeledDataset ds = read_dataset(in_path);
    Hyperparams hp;
    if (!hp_json.empty()) from_json(hp_json, hp);

    PipelineOptions opts = flags.pipeline();
    PreparedDataset prepared = prepare_dataset(ds, opts);
    PipelineModel pm = train_pipeline(kind, prepared.dataset, hp, flags.seed, opts);
    write_file_atomic(out_path, pipeline_model_to_json(pm).dump() + "\n");

    std::cout << "trained " << model_name << " on " << prepared.dataset.rows() << " rows";
    if (!prepared.dropped_features.empty()) {
        std::cout << " (dropped";
        for (const auto& d : prepared.dropped_features) std::cout << " " << d;
        std::cout << ")";
    }
    std::cout << " -> " << out_path << "\n";
    return 0;
}

void write_report_artifacts(const json& report, const EvalReport& metrics,
                            const std::vector<std::string>& class_names,
                            const std::string& report_path, const std::string& confusion_path,
                            const std::string& title) {
    std::cout << eval_report_to_table(metrics, class_names, title);
    if (!report_path.empty()) {
        write_file_atomic(report_path, report.dump(2) + "\n");
        std::cout << "report -> " << report_path << "\n";
    }
    if (!confusion_path.empty()) {
        write_file_atomic(confusion_path, confusion_to_csv(metrics, class_names));
        std::cout << "confusion -> " << confusion_path << "\n";
    }
}

int cmd_eval(const std::string& model_name, const std::string& model_file,
             const std::string& in_path, int cv_k, double split_ratio, bool ablate_ukf,
             double svid_fraction, const CommonFlags& flags, const std::string& report_path,
             const std::string& confusion_path) {
    LabeledDataset raw = read_dataset(in_path);
    if (svid_fraction < 1.0)
        throw Error(ErrorCode::InvalidArgument,
                    "--svid-subset applies to raw logs; use `parse --svid-subset` first");

    if (!model_file.empty()) {
        // Evaluate a pre-trained pipeline model on a labeled dataset.
        PipelineModel pm = pipeline_model_from_json(read_json_file(model_file));
        LabeledDataset ds = select_columns(raw, pm.feature_names);
        if (!flags.no_ukf) ds = apply_ukf_to_dataset(ds);
        std::vector<int> preds;
        preds.reserve(static_cast<size_t>(ds.rows()));
        for (Eigen::Index i = 0; i < ds.rows(); ++i)
            preds.push_back(pm.predict(ds.x.row(i)).label);
        EvalReport metrics =
            eval_metrics(preds, ds.labels, static_cast<int>(ds.class_names.size()));
        json report;
        report["schema"] = kReportSchema;
        report["command"] = "eval";
        report["model_file"] = model_file;
        report["params"] = {{"use_ukf", !flags.no_ukf}};
        report["result"] = eval_report_to_json(metrics, ds.class_names);
        write_report_artifacts(report, metrics, ds.class_names, report_path, confusion_path,
                               "evaluation of " + model_file);
        return 0;
    }

    ModelKind kind = model_kind_from_name(model_name);
    Hyperparams hp;

    auto evaluate_with = [&](const PipelineOptions& opts) {
        PreparedDataset prepared = prepare_dataset(raw, opts);
        if (cv_k > 0) {
            CvRunResult run = run_cv_eval(kind, prepared.dataset, hp, cv_k, flags.seed, opts);
            return std::make_pair(run.cv.mean, run.report);
        }
        SplitRunResult run =
            run_split_eval(kind, prepared.dataset, hp, split_ratio, flags.seed, opts);
        return std::make_pair(run.report, run.json);
    };

    PipelineOptions opts = flags.pipeline();
    auto [metrics, report] = evaluate_with(opts);

    if (ablate_ukf) {
        PipelineOptions ablated = opts;
        ablated.use_ukf = !opts.use_ukf;
        auto [metrics_ab, report_ab] = evaluate_with(ablated);
        report["ablation"] = {
            {"use_ukf", ablated.use_ukf},
            {"overall_accuracy", metrics_ab.overall_accuracy},
            {"accuracy_delta", metrics.overall_accuracy - metrics_ab.overall_accuracy}};
        std::cout << "UKF ablation: " << format_g9(metrics.overall_accuracy) << "% with vs "
                  << format_g9(metrics_ab.overall_accuracy) << "% without (delta "
                  << format_g9(metrics.overall_accuracy - metrics_ab.overall_accuracy)
                  << " points)\n";
    }
    std::string title = cv_k > 0 ? model_name + " " + std::to_string(cv_k) + "-fold CV"
                                 : model_name + " split " + format_g9(split_ratio);
    write_report_artifacts(report, metrics, raw.class_names, report_path, confusion_path,
                           title);
    return 0;
}

int cmd_importance(const std::string& model_file, const std::string& in_path, int repeats,
                   const CommonFlags& flags, const std::string& report_path) {
    PipelineModel pm = pipeline_model_from_json(read_json_file(model_file));
    LabeledDataset raw = read_dataset(in_path);
    LabeledDataset ds = select_columns(raw, pm.feature_names);
    if (!flags.no_ukf) ds = apply_ukf_to_dataset(ds);

    Eigen::VectorXd scores = permutation_importance(
        [&](const Eigen::RowVectorXd& row) { return pm.predict(row).label; }, ds.x, ds.labels,
        repeats, flags.seed);

    json report;
    report["schema"] = kReportSchema;
    report["command"] = "importance";
    report["seed"] = flags.seed;
    report["params"] = {{"n_repeats", repeats}, {"model_file", model_file}};
    json per_feature;
    std::cout << "permutation importance (error increase):\n";
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
        per_feature[pm.feature_names[static_cast<size_t>(j)]] = scores(j);
        std::printf("  %-24s %+.4f\n", pm.feature_names[static_cast<size_t>(j)].c_str(),
                    scores(j));
    }
    report["scores"] = per_feature;
    if (!report_path.empty()) {
        write_file_atomic(report_path, report.dump(2) + "\n");
        std::cout << "report -> " << report_path << "\n";
    }
    return 0;
}

int cmd_map(const std::string& in_path, const std::string& out_dir,
            const std::string& truth_path, double sigma, int samples_per_edge,
            bool segment_correction) {
    std::ifstream in(in_path);
    if (!in) throw Error(ErrorCode::MissingInput, "cannot open " + in_path);
    std::vector<Trajectory> trajectories = trajectories_from_csv(in);

    AlignOptions align_opts;
    align_opts.segment_correction = segment_correction;
    AlignmentResult aligned = align_trajectories(trajectories, align_opts);
    LandmarkGraph graph = build_landmark_graph(aligned, {sigma});
    OptimizeResult opt = optimize_graph(graph);
    FloorMap fm = extract_floor_map(opt.graph);

    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "floor_map.json",
                      floor_map_to_json(fm).dump(2) + "\n");
    write_file_atomic(fs::path(out_dir) / "floor_map.svg", floor_map_to_svg(fm));
    std::cout << "aligned " << trajectories.size() << " trajectories, " << fm.landmarks.size()
              << " landmarks; optimization cost " << format_g9(opt.initial_cost) << " -> "
              << format_g9(opt.final_cost) << "\n";

    if (!truth_path.empty()) {
        FloorMap truth = floor_map_from_json(read_json_file(truth_path));
        DiscrepancyReport g = gdm(fm, truth);
        DiscrepancyReport s = sdm(fm, truth, samples_per_edge);
        json report;
        report["schema"] = kReportSchema;
        report["command"] = "map";
        report["optimization"] = {{"initial_cost", opt.initial_cost},
                                  {"final_cost", opt.final_cost},
                                  {"iterations", opt.iterations}};
        auto summarize = [](const DiscrepancyReport& r) {
            return json{{"distances", r.distances},
                        {"max", r.summary.max},
                        {"p90", r.summary.p90},
                        {"mean", r.summary.mean},
                        {"unmatched_generated", r.unmatched_generated},
                        {"unmatched_truth", r.unmatched_truth}};
        };
        report["gdm"] = summarize(g);
        report["sdm"] = summarize(s);
        write_file_atomic(fs::path(out_dir) / "discrepancy.json", report.dump(2) + "\n");
        std::cout << "GDM: max " << format_g9(g.summary.max) << " m, p90 "
                  << format_g9(g.summary.p90) << " m, mean " << format_g9(g.summary.mean)
                  << " m\n";
        std::cout << "SDM: max " << format_g9(s.summary.max) << " m, p90 "
                  << format_g9(s.summary.p90) << " m\n";
    }
    std::cout << "wrote " << out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& confusion_path) {
    json report = read_json_file(in_path);
    if (report.value("schema", "") != kReportSchema)
        throw Error(ErrorCode::InvalidSpec, "not an androcon-report/1 document");

    auto print_section = [&](const json& section, const std::string& title) {
        if (!section.contains("per_class")) return;
        std::cout << title << "\n";
        std::printf("  %-16s %7s %7s %7s %7s\n", "class", "acc", "sen", "spe", "f");
        for (auto& [name, metrics] : section.at("per_class").items())
            std::printf("  %-16s %7.1f %7.1f %7.1f %7.1f\n", name.c_str(),
                        metrics.at("acc").get<double>(), metrics.at("sen").get<double>(),
                        metrics.at("spe").get<double>(), metrics.at("f_score").get<double>());
        std::printf("  overall accuracy: %.2f%%\n",
                    section.at("overall_accuracy").get<double>());
        if (!confusion_path.empty() && section.contains("confusion")) {
            std::string csv = "confusion\n";
            for (auto& row : section.at("confusion")) {
                std::string line;
                for (auto& v : row) line += std::to_string(v.get<int>()) + ",";
                if (!line.empty()) line.pop_back();
                csv += line + "\n";
            }
            write_file_atomic(confusion_path, csv);
        }
    };
    if (report.contains("mean")) print_section(report.at("mean"), "mean over folds");
    if (report.contains("result")) print_section(report.at("result"), "result");
    if (report.contains("scores")) {
        std::cout << "permutation importance:\n";
        for (auto& [name, v] : report.at("scores").items())
            std::printf("  %-24s %+.4f\n", name.c_str(), v.get<double>());
    }
    if (report.contains("gdm"))
        std::cout << "GDM max " << report["gdm"]["max"].get<double>() << " m, p90 "
                  << report["gdm"]["p90"].get<double>() << " m\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"androcon: ambient sensing and floor mapping from semi-processed GNSS data"};
    app.require_subcommand(1);

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "parse a GnssLogger log into a feature CSV");
    std::string parse_in, parse_out, parse_label = "unlabeled", parse_impute = "dataset-mean";
    bool parse_bb = false;
    double parse_svid = 1.0;
    uint64_t parse_seed = 0;
    parse_cmd->add_option("--in", parse_in, "input GnssLogger log")->required();
    parse_cmd->add_option("--out,-o", parse_out, "output dataset CSV")->required();
    parse_cmd->add_option("--label", parse_label, "class label for all epochs");
    parse_cmd->add_option("--impute", parse_impute, "zero | dataset-mean | reject");
    parse_cmd->add_flag("--include-bb-cn0", parse_bb, "emit the 9-feature dataset");
    parse_cmd->add_option("--svid-subset", parse_svid, "keep this fraction of satellites");
    parse_cmd->add_option("--seed", parse_seed, "seed for the satellite subset");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic scenarios");
    std::string synth_spec, synth_layout, synth_out = "data";
    bool synth_default = false;
    uint64_t synth_seed = 0;
    synth_cmd->add_option("--spec", synth_spec, "scenario spec JSON");
    synth_cmd->add_option("--layout", synth_layout, "floor layout spec JSON");
    synth_cmd->add_flag("--default-scenario", synth_default,
                        "use the built-in five-environment scenario");
    auto* synth_seed_opt = synth_cmd->add_option("--seed", synth_seed, "override spec seed");
    synth_cmd->add_option("--out,-o", synth_out, "output directory")->required();

    // filter
    auto* filter_cmd = app.add_subcommand("filter", "UKF-denoise a dataset CSV");
    std::string filter_in, filter_out;
    filter_cmd->add_option("--in", filter_in, "input dataset CSV")->required();
    filter_cmd->add_option("--out,-o", filter_out, "output dataset CSV")->required();

    auto add_common = [](CLI::App* cmd, CommonFlags& flags) {
        cmd->add_option("--seed", flags.seed, "root seed for all stochastic steps");
        cmd->add_flag("--no-ukf", flags.no_ukf, "skip UKF denoising");
        cmd->add_flag("--no-lda", flags.no_lda, "skip the LDA projection");
        cmd->add_option("--drop-threshold", flags.drop_threshold,
                        "correlation threshold for feature dropping");
    };

    // train
    auto* train_cmd = app.add_subcommand("train", "train a classifier pipeline");
    std::string train_model = "gb", train_in, train_out = "model.json";
    CommonFlags train_flags;
    std::vector<std::string> train_hp;
    train_cmd->add_option("--model", train_model, "dt | rf | gb | knn | nb");
    train_cmd->add_option("--in", train_in, "training dataset CSV")->required();
    train_cmd->add_option("--out,-o", train_out, "output model JSON");
    train_cmd->add_option("--hp", train_hp, "hyperparameter override, e.g. rf.max_depth=8");
    add_common(train_cmd, train_flags);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a classifier");
    std::string eval_model = "gb", eval_model_file, eval_in, eval_report, eval_confusion;
    int eval_cv = 0;
    double eval_split = 0.8, eval_svid = 1.0;
    bool eval_ablate = false;
    CommonFlags eval_flags;
    eval_cmd->add_option("--model", eval_model, "dt | rf | gb | knn | nb");
    eval_cmd->add_option("--model-file", eval_model_file, "pre-trained pipeline model JSON");
    eval_cmd->add_option("--in", eval_in, "dataset CSV")->required();
    eval_cmd->add_option("--cv", eval_cv, "k-fold cross-validation (0 = use --split)");
    eval_cmd->add_option("--split", eval_split, "train fraction for a single split");
    eval_cmd->add_flag("--ablate-ukf", eval_ablate, "also run with UKF toggled off");
    eval_cmd->add_option("--svid-subset", eval_svid, "(raw logs only; see parse)");
    eval_cmd->add_option("--report", eval_report, "write the JSON report here");
    eval_cmd->add_option("--confusion-csv", eval_confusion, "write the confusion matrix CSV");
    add_common(eval_cmd, eval_flags);

    // importance
    auto* imp_cmd = app.add_subcommand("importance", "permutation feature importance");
    std::string imp_model_file, imp_in, imp_report;
    int imp_repeats = 20;
    CommonFlags imp_flags;
    imp_cmd->add_option("--model-file", imp_model_file, "pipeline model JSON")->required();
    imp_cmd->add_option("--in", imp_in, "held-out dataset CSV")->required();
    imp_cmd->add_option("--repeats", imp_repeats, "shuffles per feature");
    imp_cmd->add_option("--report", imp_report, "write the JSON report here");
    add_common(imp_cmd, imp_flags);

    // map
    auto* map_cmd = app.add_subcommand("map", "reconstruct a floor map from trajectories");
    std::string map_in, map_out = "map", map_truth;
    double map_sigma = 1.0;
    int map_samples = 10;
    bool map_segment = false;
    map_cmd->add_option("--in", map_in, "trajectory CSV")->required();
    map_cmd->add_option("--out,-o", map_out, "output directory");
    map_cmd->add_option("--truth", map_truth, "ground-truth floor map JSON for GDM/SDM");
    map_cmd->add_option("--sigma", map_sigma, "odometry noise sigma, meters");
    map_cmd->add_option("--samples-per-edge", map_samples, "SDM samples per edge");
    map_cmd->add_flag("--segment-correction", map_segment,
                      "per-segment rigid warp between shared landmarks");

    // report
    auto* report_cmd = app.add_subcommand("report", "pretty-print a JSON report");
    std::string report_in, report_confusion;
    report_cmd->add_option("--in", report_in, "report JSON")->required();
    report_cmd->add_option("--confusion-csv", report_confusion, "export confusion CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    try {
        if (parse_cmd->parsed())
            return cmd_parse(parse_in, parse_out, parse_label, parse_impute, parse_bb,
                             parse_svid, parse_seed);
        if (synth_cmd->parsed())
            return cmd_synth(synth_spec, synth_layout, synth_default, synth_seed,
                             synth_seed_opt->count() > 0, synth_out);
        if (filter_cmd->parsed()) return cmd_filter(filter_in, filter_out);
        if (train_cmd->parsed()) {
            json hp_json;
            for (const auto& kv : train_hp) {
                auto eq = kv.find('=');
                auto dot = kv.find('.');
                if (eq == std::string::npos || dot == std::string::npos || dot > eq)
                    throw Error(ErrorCode::InvalidArgument,
                                "--hp expects model.param=value, got " + kv);
                std::string model = kv.substr(0, dot);
                std::string param = kv.substr(dot + 1, eq - dot - 1);
                hp_json[model][param] = json::parse(kv.substr(eq + 1), nullptr, false);
            }
            return cmd_train(train_model, train_in, train_out, train_flags, hp_json);
        }
        if (eval_cmd->parsed())
            return cmd_eval(eval_model, eval_model_file, eval_in, eval_cv, eval_split,
                            eval_ablate, eval_svid, eval_flags, eval_report, eval_confusion);
        if (imp_cmd->parsed())
            return cmd_importance(imp_model_file, imp_in, imp_repeats, imp_flags, imp_report);
        if (map_cmd->parsed())
            return cmd_map(map_in, map_out, map_truth, map_sigma, map_samples, map_segment);
        if (report_cmd->parsed()) return cmd_report(report_in, report_confusion);
    } catch (const androcon::Error& e) {
        std::cerr << "androcon: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "androcon: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
