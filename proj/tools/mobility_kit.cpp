// Command-line front end over the library: simulate sessions, analyze pose
// logs, evaluate tracking, run statistics, generate synthetic streams, and
// emit consolidated session reports.
//
// Exit codes: 0 success, 1 validation error (including bad flags), 2 I/O
// error. Diagnostics go to stderr; data artifacts go where the flags say.
#include "mobility/config.hpp"
#include "mobility/format.hpp"
#include "mobility/game.hpp"
#include "mobility/kinematics.hpp"
#include "mobility/pose_log.hpp"
#include "mobility/report.hpp"
#include "mobility/stats.hpp"
#include "mobility/synthgen.hpp"
#include "mobility/tracking.hpp"
#include "mobility/trajectory.hpp"
#include "mobility/types.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mobility;

namespace {

std::uint64_t parse_seed_text(const std::string& text, const std::string& origin) {
    try {
        std::size_t used = 0;
        std::uint64_t v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(origin + ": not an unsigned integer: " + text);
    }
}

// --seed wins, then MOBILITY_KIT_SEED, then 1.
std::uint64_t resolve_seed(const std::string& flag_text) {
    if (!flag_text.empty()) return parse_seed_text(flag_text, "--seed");
    if (const char* env = std::getenv("MOBILITY_KIT_SEED"))
        return parse_seed_text(env, "MOBILITY_KIT_SEED");
    return 1;
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw IoError("cannot create output directory: " + path);
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out << bytes;
    out.flush();
    if (!out) throw IoError("cannot write: " + path);
}

std::vector<LevelSpec> resolve_specs(const std::string& config_path) {
    if (config_path.empty()) return LevelSpec::standard_four();
    return load_level_config(config_path);
}

MovementBoundary resolve_boundary(const std::string& boundary_path) {
    if (boundary_path.empty()) return default_boundary();
    return load_boundary(boundary_path);
}

std::size_t spec_index(const std::vector<LevelSpec>& specs, const std::string& id) {
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].id == id) return i;
    std::string known;
    for (const LevelSpec& spec : specs) {
        if (!known.empty()) known += ", ";
        known += spec.id;
    }
    throw ValidationError("unknown level: " + id + " (configured: " + known + ")");
}

// ---- simulate ----

struct SimulateOpts {
    std::string level;
    std::string seed_text;
    std::string boundary;
    std::string pose_log;
    std::string config;
    std::string out;
    double capture_radius = 0.10;
};

void run_simulate(const SimulateOpts& o) {
    const std::vector<LevelSpec> specs = resolve_specs(o.config);
    const MovementBoundary boundary = resolve_boundary(o.boundary);
    const std::size_t idx = spec_index(specs, o.level);
    const std::uint64_t seed = resolve_seed(o.seed_text);
    const PoseLog log = load_pose_log(o.pose_log);

    const TargetScript script = population_charts(specs, boundary, seed)[idx];
    GameSession session(script, boundary, o.capture_radius);
    for (const PoseSample& sample : log.samples) session.step(sample);
    session.finish();

    ensure_dir(o.out);
    {
        std::ostringstream bytes;
        serialize_script(script, bytes);
        write_file(o.out + "/script.jsonl", bytes.str());
    }
    {
        std::ostringstream bytes;
        serialize_events(session.events(), bytes);
        write_file(o.out + "/events.jsonl", bytes.str());
    }
    write_file(o.out + "/summary.csv", completion_csv({summarize(session.events(), script)}));
    std::cerr << "simulate: wrote script.jsonl, events.jsonl, summary.csv under " << o.out << "\n";
}

// ---- analyze ----

struct AnalyzeOpts {
    std::string pose_log;
    std::string segments;
    std::string out;
    double max_gap = 0.2;
};

void run_analyze(const AnalyzeOpts& o) {
    const PoseLog log = load_pose_log(o.pose_log);
    const LevelSegmentation seg = load_segmentation(o.segments);
    seg.validate();

    const MetricsTable table = level_metrics(log.samples, seg, JointId::core(), o.max_gap);

    GapReport gaps;
    for (const LevelWindow& window : seg.windows) {
        for (const JointId& joint : JointId::core()) {
            try {
                JointTrajectory traj = extract_trajectory(log.samples, joint, window.start_t,
                                                          window.end_t, log.header.rate_hz);
                FillResult filled = fill_gaps(traj, o.max_gap);
                gaps.splits.insert(gaps.splits.end(), filled.report.splits.begin(),
                                   filled.report.splits.end());
                gaps.interpolated_samples += filled.report.interpolated_samples;
            } catch (const ValidationError&) {
                // absent joint or empty window: already flagged in the metrics table
            }
        }
    }

    ensure_dir(o.out);
    write_file(o.out + "/metrics.csv", metrics_csv(table));
    write_file(o.out + "/gaps.csv", gap_report_csv(gaps));
    std::cerr << "analyze: wrote metrics.csv, gaps.csv under " << o.out << "\n";
}

// ---- eval-tracking ----

struct EvalOpts {
    std::string est;
    std::string ref;
    std::string segments;
    std::string mode = "none";
    std::string group_by = "task";
    double assoc_tol = 0.010;
    std::string out;
};

void run_eval_tracking(const EvalOpts& o) {
    const PoseLog est = load_pose_log(o.est);
    const PoseLog ref = load_pose_log(o.ref);
    const RegisterMode mode = register_mode_from_string(o.mode);
    if (o.group_by != "task" && o.group_by != "none")
        throw ValidationError("unknown --group-by: " + o.group_by + " (expected task or none)");

    LevelSegmentation tasks;
    if (o.group_by == "task" && !o.segments.empty()) {
        tasks = load_segmentation(o.segments);
        tasks.validate();
    } else {
        // One window covering the estimated stream.
        if (est.samples.empty()) throw ValidationError("estimated stream has no samples");
        tasks.windows.push_back({"all", est.samples.front().t, est.samples.back().t + 1.0});
    }

    const ApeReport report =
        ape_report(est.samples, ref.samples, tasks, JointId::core(), mode, o.assoc_tol);

    ensure_dir(o.out);
    write_file(o.out + "/ape.csv", ape_report_csv(report));
    std::cerr << "eval-tracking: wrote ape.csv under " << o.out << "\n";
}

// ---- stats ----

struct StatsOpts {
    std::string data;
    std::string test = "both";
    std::string posthoc = "none";
    std::string out;
};

std::string human_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string summary_line(const StatTestResult& r) {
    std::string line;
    if (r.test == "rm_anova") {
        line = "rm_anova: F(" + human_number(r.df1) + ", " + human_number(r.df2) +
               ") = " + human_number(r.statistic) + ", p = " + human_number(r.p) +
               ", η²_p = " + human_number(r.effect);
    } else {
        line = r.test + ": χ²(" + human_number(r.df1) + ") = " +
               human_number(r.statistic) + ", p = " + human_number(r.p) +
               ", W = " + human_number(r.effect);
    }
    return line;
}

void run_stats(const StatsOpts& o) {
    const RepeatedMeasures data = load_long_csv(o.data);

    std::vector<StatTestResult> results;
    if (o.test == "rm-anova" || o.test == "both") results.push_back(rm_anova(data));
    if (o.test == "friedman" || o.test == "both") results.push_back(friedman(data));
    if (results.empty())
        throw ValidationError("unknown --test: " + o.test + " (expected rm-anova, friedman, both)");

    std::string csv = "test,statistic,df1,df2,p,effect,effect_name\n";
    std::string summary;
    for (const StatTestResult& r : results) {
        csv += r.test + "," + format_double(r.statistic) + "," + format_double(r.df1) + "," +
               format_double(r.df2) + "," + format_double(r.p) + "," + format_double(r.effect) +
               "," + r.effect_name + "\n";
        summary += summary_line(r) + "\n";
    }

    ensure_dir(o.out);
    write_file(o.out + "/stats.csv", csv);

    if (o.posthoc != "none") {
        PairwiseFamily family;
        if (o.posthoc == "paired-t") {
            family = PairwiseFamily::paired_t;
        } else if (o.posthoc == "wilcoxon") {
            family = PairwiseFamily::wilcoxon;
        } else {
            throw ValidationError("unknown --posthoc: " + o.posthoc +
                                  " (expected none, paired-t, wilcoxon)");
        }
        write_file(o.out + "/posthoc.csv", posthoc_csv(posthoc_bonferroni(data, family)));
    }

    write_file(o.out + "/summary.txt", summary);
    std::cout << summary;
}

// ---- gen ----

struct GenOpts {
    std::string profile = "healthy";
    std::string seed_text;
    std::string config;
    std::string boundary;
    std::string out;
    std::string segmentation;
};

PatientProfile resolve_profile(const std::string& name_or_path, std::uint64_t seed) {
    if (name_or_path == "healthy") return PatientProfile::healthy(seed);
    if (name_or_path == "perfect") return PatientProfile::perfect();
    return load_profile(name_or_path);
}

void run_gen(const GenOpts& o) {
    const std::uint64_t seed = resolve_seed(o.seed_text);
    const PatientProfile profile = resolve_profile(o.profile, seed);
    const std::vector<LevelSpec> specs = resolve_specs(o.config);
    const MovementBoundary boundary = resolve_boundary(o.boundary);

    const Population pop = generate_population({profile}, specs, boundary, seed);

    // One log: the levels back to back, each window holding the samples with
    // t < duration so the next level starts exactly where the previous ends.
    PoseLog log;
    LevelSegmentation seg;
    double offset = 0.0;
    for (const PopulationEntry& entry : pop.entries) {
        const double duration = entry.stream.level.duration_s;
        for (const PoseSample& sample : entry.stream.samples) {
            if (sample.t >= duration) continue;
            PoseSample shifted = sample;
            shifted.t = sample.t + offset;
            log.samples.push_back(std::move(shifted));
        }
        seg.windows.push_back({entry.level_id, offset, offset + duration});
        offset += duration;
    }
    seg.validate();

    save_pose_log(log, o.out);
    std::cerr << "gen: wrote pose log " << o.out << "\n";
    if (!o.segmentation.empty()) {
        write_file(o.segmentation, segmentation_csv(seg));
        std::cerr << "gen: wrote segmentation " << o.segmentation << "\n";
    }
}

// ---- report ----

struct ReportOpts {
    std::string pose_log;
    std::string segments;
    std::string seed_text;
    std::string config;
    std::string boundary;
    std::string ref;
    std::string mode = "none";
    double assoc_tol = 0.010;
    std::string physio;
    std::string out;
    double capture_radius = 0.10;
};

void run_report(const ReportOpts& o) {
    ReportInputs inputs;
    inputs.pose_log = load_pose_log(o.pose_log);
    inputs.segmentation = load_segmentation(o.segments);
    inputs.specs = resolve_specs(o.config);
    inputs.boundary = resolve_boundary(o.boundary);
    inputs.seed = resolve_seed(o.seed_text);
    inputs.capture_radius = o.capture_radius;
    inputs.mode = register_mode_from_string(o.mode);
    inputs.assoc_tol = o.assoc_tol;
    if (!o.ref.empty()) inputs.reference = load_pose_log(o.ref);
    if (!o.physio.empty()) inputs.physio = load_physio_csv(o.physio);

    const SessionReport report = build_session_report(inputs);

    ensure_dir(o.out);
    write_file(o.out + "/report.json", report_json(report));
    write_file(o.out + "/completion.csv", completion_csv(report.completion));
    write_file(o.out + "/metrics.csv", metrics_csv(report.metrics));
    if (report.tracking) write_file(o.out + "/ape.csv", ape_report_csv(*report.tracking));
    if (report.physio_change)
        write_file(o.out + "/physio_change.csv", physio_change_csv(*report.physio_change));
    std::cerr << "report: wrote report.json and plot CSVs under " << o.out << "\n";
}

CLI::App* deepest(CLI::App* app) {
    while (!app->get_subcommands().empty()) app = app->get_subcommands().front();
    return app;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exergame session engine and movement-analysis toolkit"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Replay a recorded pose log against one level's target schedule");
    simulate->add_option("--level", sim.level, "Level id to play, e.g. L1")->required();
    simulate->add_option("--seed", sim.seed_text,
                         "Schedule seed (unsigned integer); falls back to MOBILITY_KIT_SEED, then 1");
    simulate->add_option("--boundary", sim.boundary,
                         "Boundary file (key = value, meters); default: reference seated reach");
    simulate->add_option("--pose-log", sim.pose_log, "Input pose log to replay (JSONL, meters)")
        ->required();
    simulate->add_option("--config", sim.config, "Level config file overriding the stock levels");
    simulate->add_option("--capture-radius", sim.capture_radius,
                         "Hit-detection radius in meters (default 0.10)");
    simulate->add_option("--out", sim.out, "Output directory for script/events/summary")
        ->required();
    simulate->callback([&sim]() { run_simulate(sim); });

    AnalyzeOpts ana;
    CLI::App* analyze =
        app.add_subcommand("analyze", "Compute movement metrics from a pose log");
    analyze->add_option("--pose-log", ana.pose_log, "Input pose log (JSONL, meters)")->required();
    analyze->add_option("--segments", ana.segments,
                        "Segmentation CSV label,start_t,end_t (seconds)")
        ->required();
    analyze->add_option("--max-gap", ana.max_gap,
                        "Longest dropout to interpolate, seconds (default 0.2)");
    analyze->add_option("--out", ana.out, "Output directory for metrics/gap CSVs")->required();
    analyze->callback([&ana]() { run_analyze(ana); });

    EvalOpts ev;
    CLI::App* eval = app.add_subcommand(
        "eval-tracking", "Score an estimated pose stream against a reference stream");
    eval->add_option("--est", ev.est, "Estimated pose log (JSONL, meters)")->required();
    eval->add_option("--ref", ev.ref, "Reference pose log (JSONL, meters)")->required();
    eval->add_option("--segments", ev.segments,
                     "Task segmentation CSV (seconds); omitted: whole stream is one task");
    eval->add_option("--mode", ev.mode, "Registration before scoring: none, translation, rigid");
    eval->add_option("--assoc-tol", ev.assoc_tol,
                     "Timestamp association tolerance, seconds (default 0.010)");
    eval->add_option("--group-by", ev.group_by,
                     "Report rows per task window or the whole stream: task, none");
    eval->add_option("--out", ev.out, "Output directory for the error CSV")->required();
    eval->callback([&ev]() { run_eval_tracking(ev); });

    StatsOpts st;
    CLI::App* stats = app.add_subcommand(
        "stats", "Within-subject tests over a long-format CSV subject,condition,value");
    stats->add_option("--data", st.data, "Long-format CSV (values in the measure's own units)")
        ->required();
    stats->add_option("--test", st.test, "Which test to run: rm-anova, friedman, both");
    stats->add_option("--posthoc", st.posthoc,
                      "Pairwise follow-up with Bonferroni correction: none, paired-t, wilcoxon");
    stats->add_option("--out", st.out, "Output directory for result CSVs")->required();
    stats->callback([&st]() { run_stats(st); });

    GenOpts gen;
    CLI::App* generate = app.add_subcommand(
        "gen", "Generate a synthetic playthrough of the level progression");
    generate->add_option("--profile", gen.profile,
                         "Player profile: healthy, perfect, or a profile file (default healthy)");
    generate->add_option("--seed", gen.seed_text,
                         "Corpus seed (unsigned integer); falls back to MOBILITY_KIT_SEED, then 1");
    generate->add_option("--config", gen.config, "Level config file overriding the stock levels");
    generate->add_option("--boundary", gen.boundary,
                         "Boundary file (key = value, meters); default: reference seated reach");
    generate->add_option("--out", gen.out, "Output pose log path (JSONL)")->required();
    generate->add_option("--segmentation", gen.segmentation,
                         "Also write the level windows as a segmentation CSV here");
    generate->callback([&gen]() { run_gen(gen); });

    ReportOpts rep;
    CLI::App* report = app.add_subcommand(
        "report", "Consolidated session report with plot-ready CSVs");
    report->add_option("--pose-log", rep.pose_log, "Input pose log (JSONL, meters)")->required();
    report->add_option("--segments", rep.segments, "Segmentation CSV label,start_t,end_t (seconds)")
        ->required();
    report->add_option("--seed", rep.seed_text,
                       "Schedule seed used for the session (falls back to MOBILITY_KIT_SEED, then 1)");
    report->add_option("--config", rep.config, "Level config file overriding the stock levels");
    report->add_option("--boundary", rep.boundary,
                       "Boundary file (key = value, meters); default: reference seated reach");
    report->add_option("--capture-radius", rep.capture_radius,
                       "Hit-detection radius in meters (default 0.10)");
    report->add_option("--ref", rep.ref, "Reference pose log; adds the tracking-error table");
    report->add_option("--mode", rep.mode, "Registration before scoring: none, translation, rigid");
    report->add_option("--assoc-tol", rep.assoc_tol,
                       "Timestamp association tolerance, seconds (default 0.010)");
    report->add_option("--physio", rep.physio,
                       "Bedside measurements CSV measure,baseline,<level>,... (measure units)");
    report->add_option("--out", rep.out, "Output directory for the report and CSVs")->required();
    report->callback([&rep]() { run_report(rep); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << deepest(&app)->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << deepest(&app)->help();
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
