// Command-line front end: simulate | fit | cluster | diagnose | report.
// All randomness flows from --seed; every JSON artifact embeds the fully
// resolved configuration so a run can be reproduced from its outputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "json.hpp"

#include "acl/bench_metrics.hpp"
#include "acl/csv.hpp"
#include "acl/rng.hpp"
#include "acl/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Flat-JSON configuration files: {"scenario": "e1.1", "sigma": 3}. Keys
// match the long option names.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
        // flat keys are fanned out to every subcommand scope; only options
        // of the subcommand actually invoked take effect
        static const std::vector<std::string> scopes = {"",        "simulate", "fit",
                                                        "cluster", "diagnose", "report"};
        std::vector<CLI::ConfigItem> out;
        for (const auto& [key, value] : j.items()) {
            for (const auto& scope : scopes) {
                CLI::ConfigItem item;
                if (!scope.empty()) item.parents = {scope};
                item.name = key;
                if (value.is_array()) {
                    for (const auto& e : value) item.inputs.push_back(scalar(e));
                } else {
                    item.inputs.push_back(scalar(value));
                }
                out.push_back(std::move(item));
            }
        }
        return out;
    }

private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    }
};

struct CliOptions {
    // shared
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    // scenario
    std::string scenario;
    double sigma = 3.0;
    int replicates = 50;
    int n_train = 100;
    int n_val = 100;
    std::vector<std::string> methods{"acgl", "cglcor"};
    bool export_data = false;
    // data
    std::string x_csv, y_csv, y_col, x_val_csv, y_val_csv;
    double val_fraction = 0.25;
    std::string method = "acgl";
    // pipeline
    double rho = 0.7;
    std::string variant = "plain";
    double stage1_threshold = 0.0;
    double cut_height = 0.5;
    int clusters = 0; // 0: cut by height
    std::string linkage = "average";
    int lambda_grid = 50;
    double lambda_ratio = 1e-3;
    // pseudo-real
    int top_k = 1000;
    int s0 = 10;
    // diagnose
    std::string set_spec;
    std::string partition_csv;
    std::string active_groups;
    // report
    std::string replicates_csv;
};

acl::PipelineConfig pipeline_from(const CliOptions& o) {
    acl::PipelineConfig cfg;
    cfg.lambda_grid = o.lambda_grid;
    cfg.lambda_ratio = o.lambda_ratio;
    cfg.stage1.screen.rho = o.rho;
    cfg.stage1.threshold = o.stage1_threshold;
    if (o.variant == "plain")
        cfg.stage1.variant = acl::Stage1Variant::plain;
    else if (o.variant == "adaptive")
        cfg.stage1.variant = acl::Stage1Variant::adaptive;
    else if (o.variant == "thresholded")
        cfg.stage1.variant = acl::Stage1Variant::thresholded;
    else
        throw acl::IncompatibleConfig("unknown stage-1 variant '" + o.variant +
                                      "'; valid: plain, adaptive, thresholded");
    if (o.linkage == "average")
        cfg.linkage = acl::Linkage::average;
    else if (o.linkage == "complete")
        cfg.linkage = acl::Linkage::complete;
    else
        throw acl::IncompatibleConfig("unknown linkage '" + o.linkage +
                                      "'; valid: average, complete");
    cfg.cut_rule = o.clusters > 0 ? acl::CutRule::by_count(o.clusters)
                                  : acl::CutRule::by_height(o.cut_height);
    return cfg;
}

json cli_config_json(const CliOptions& o, const std::string& command) {
    json j = acl::to_json(pipeline_from(o));
    j["command"] = command;
    j["version"] = kVersion;
    j["seed"] = o.seed;
    j["threads"] = o.threads;
    j["out"] = o.out_dir;
    return j;
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty()) throw acl::IncompatibleConfig("--out is required");
    fs::create_directories(dir);
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw acl::Error("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- simulate

void export_dataset(const fs::path& dir, const acl::GeneratedDataset& ds) {
    fs::create_directories(dir);
    acl::write_matrix_csv((dir / "x_train.csv").string(), ds.x_train, ds.column_ids);
    acl::write_vector_csv((dir / "y_train.csv").string(), ds.y_train, "y");
    acl::write_matrix_csv((dir / "x_val.csv").string(), ds.x_val, ds.column_ids);
    acl::write_vector_csv((dir / "y_val.csv").string(), ds.y_val, "y");
    json truth;
    truth["support"] = acl::one_based(ds.true_support);
    truth["beta"] = std::vector<double>(ds.true_beta.values.data(),
                                        ds.true_beta.values.data() + ds.true_beta.values.size());
    json blocks = json::array();
    for (const auto& g : ds.true_blocks.groups) blocks.push_back(acl::one_based(g));
    truth["blocks"] = blocks;
    truth["seed_used"] = ds.seed_used;
    write_json(dir / "truth.json", truth);
}

int cmd_simulate(const CliOptions& o) {
    acl::ScenarioConfig cfg = acl::ScenarioConfig::from_scenario_id(o.scenario);
    cfg.sigma = o.sigma;
    cfg.replicates = o.replicates;
    cfg.n_train = o.n_train;
    cfg.n_val = o.n_val;
    cfg.master_seed = o.seed;
    cfg.x_csv = o.x_csv;
    cfg.top_k = o.top_k;
    cfg.s0 = o.s0;
    cfg.validate();
    ensure_out_dir(o.out_dir);

    acl::BenchOptions opts;
    opts.threads = o.threads;
    opts.pipeline = pipeline_from(o);
    const acl::BenchResult res = acl::run_benchmark(cfg, o.methods, opts);

    const fs::path dir(o.out_dir);
    acl::write_replicates_csv((dir / "replicates.csv").string(), res.records);
    acl::write_aggregate_csv((dir / "aggregate.csv").string(), res.aggregate);
    acl::write_curves_csv((dir / "tpr_curve.csv").string(), cfg.beta_config, res.curves);

    json summary = cli_config_json(o, "simulate");
    summary["scenario"] = acl::to_json(cfg);
    summary["methods"] = o.methods;
    json rows = json::array();
    for (const auto& a : res.aggregate) rows.push_back(acl::to_json(a));
    summary["aggregate"] = rows;
    write_json(dir / "summary.json", summary);

    if (o.export_data) {
        const acl::Simulator sim(cfg);
        for (int r = 0; r < cfg.replicates; ++r)
            export_dataset(dir / "data" / ("rep_" + std::to_string(r)), sim.generate(r));
    }
    return 0;
}

// --------------------------------------------------------------------- fit

struct LoadedData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> ids;
};

LoadedData load_xy(const CliOptions& o) {
    const acl::CsvTable xt = acl::read_csv(o.x_csv);
    LoadedData out;
    if (!o.y_col.empty()) {
        out.y = acl::column_by_name(xt, o.y_col);
        out.x = acl::drop_column(xt, o.y_col);
        for (const auto& h : xt.header)
            if (h != o.y_col) out.ids.push_back(h);
    } else {
        if (o.y_csv.empty())
            throw acl::IncompatibleConfig("fit needs --y or --y-col for the response");
        const acl::CsvTable yt = acl::read_csv(o.y_csv);
        if (yt.header.size() != 1)
            throw acl::CsvError("response CSV must have exactly one column", 1);
        out.y = acl::column_by_name(yt, yt.header[0]);
        out.x = acl::to_matrix(xt);
        out.ids = xt.header;
    }
    if (out.y.size() != out.x.rows())
        throw acl::IncompatibleConfig("x and y row counts differ");
    return out;
}

int cmd_fit(const CliOptions& o) {
    ensure_out_dir(o.out_dir);
    const LoadedData data = load_xy(o);

    Eigen::MatrixXd x_train, x_val;
    Eigen::VectorXd y_train, y_val;
    if (!o.x_val_csv.empty()) {
        if (o.y_val_csv.empty()) throw acl::IncompatibleConfig("--x-val requires --y-val");
        const acl::CsvTable xv = acl::read_csv(o.x_val_csv);
        const acl::CsvTable yv = acl::read_csv(o.y_val_csv);
        x_train = data.x;
        y_train = data.y;
        x_val = acl::to_matrix(xv);
        y_val = acl::column_by_name(yv, yv.header[0]);
    } else {
        if (!(o.val_fraction > 0.0 && o.val_fraction < 1.0))
            throw acl::IncompatibleConfig("--val-fraction must be in (0, 1)");
        const auto n = static_cast<int>(data.x.rows());
        const int n_val = std::max(1, static_cast<int>(o.val_fraction * n));
        const int n_train = n - n_val;
        if (n_train < 2) throw acl::IncompatibleConfig("not enough rows for a training split");
        std::vector<int> rows(static_cast<std::size_t>(n));
        std::iota(rows.begin(), rows.end(), 0);
        acl::NormalSampler rng(acl::mix_seed(o.seed, 0, 11));
        for (std::size_t i = rows.size(); i > 1; --i)
            std::swap(rows[i - 1], rows[static_cast<std::size_t>(rng.below(i))]);
        x_train.resize(n_train, data.x.cols());
        x_val.resize(n_val, data.x.cols());
        y_train.resize(n_train);
        y_val.resize(n_val);
        for (int i = 0; i < n_train; ++i) {
            x_train.row(i) = data.x.row(rows[static_cast<std::size_t>(i)]);
            y_train[i] = data.y[rows[static_cast<std::size_t>(i)]];
        }
        for (int i = 0; i < n_val; ++i) {
            x_val.row(i) = data.x.row(rows[static_cast<std::size_t>(n_train + i)]);
            y_val[i] = data.y[rows[static_cast<std::size_t>(n_train + i)]];
        }
    }

    const acl::SplitData split = acl::prepare_data(x_train, y_train, x_val, y_val, data.ids);
    const acl::FitResult result = acl::fit_method(o.method, split, pipeline_from(o));

    json out = acl::to_json(result);
    out["config"] = cli_config_json(o, "fit");
    out["config"]["method"] = o.method;
    out["config"]["val_fraction"] = o.val_fraction;
    write_json(fs::path(o.out_dir) / "fit_result.json", out);

    std::vector<std::vector<std::string>> rows;
    for (int j : result.selected_vars)
        rows.push_back(
            {split.x_train.column_ids[static_cast<std::size_t>(j)], std::to_string(j + 1)});
    acl::write_csv((fs::path(o.out_dir) / "selected.csv").string(), {"column_id", "index"}, rows);
    return 0;
}

// ----------------------------------------------------------------- cluster

int cmd_cluster(const CliOptions& o) {
    ensure_out_dir(o.out_dir);
    const acl::CsvTable xt = acl::read_csv(o.x_csv);
    const Eigen::MatrixXd x = acl::to_matrix(xt);
    const acl::StandardizedData std_data =
        acl::standardize(x, Eigen::VectorXd::Zero(x.rows()), xt.header);
    const Eigen::MatrixXd d = acl::corr_distance_matrix(std_data.x);
    const acl::PipelineConfig cfg = pipeline_from(o);
    const acl::Dendrogram dendro = acl::hier_cluster(d, cfg.linkage);
    const acl::GroupPartition part = acl::cut(dendro, cfg.cut_rule);

    std::vector<std::vector<std::string>> rows;
    const std::vector<int> member = part.membership(static_cast<int>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        rows.push_back({xt.header[static_cast<std::size_t>(j)],
                        std::to_string(member[static_cast<std::size_t>(j)] + 1)});
    acl::write_csv((fs::path(o.out_dir) / "partition.csv").string(), {"column_id", "cluster_id"},
                   rows);
    write_json(fs::path(o.out_dir) / "run_config.json", cli_config_json(o, "cluster"));
    return 0;
}

// ---------------------------------------------------------------- diagnose

std::vector<int> parse_set(const std::string& spec) {
    json j;
    if (!spec.empty() && spec[0] == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw acl::Error("cannot open set file: " + spec.substr(1));
        in >> j;
    } else if (!spec.empty() && spec[0] == '[') {
        j = json::parse(spec);
    } else {
        j = json::array();
        std::size_t pos = 0;
        while (pos < spec.size()) {
            std::size_t comma = spec.find(',', pos);
            if (comma == std::string::npos) comma = spec.size();
            j.push_back(std::stoi(spec.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    std::vector<int> out;
    for (const auto& e : j) out.push_back(e.get<int>() - 1); // 1-based externally
    return out;
}

int cmd_diagnose(const CliOptions& o) {
    ensure_out_dir(o.out_dir);
    const acl::CsvTable xt = acl::read_csv(o.x_csv);
    const Eigen::MatrixXd x = acl::to_matrix(xt);
    const acl::StandardizedData std_data =
        acl::standardize(x, Eigen::VectorXd::Zero(x.rows()), xt.header);

    const std::vector<int> s = parse_set(o.set_spec);
    const acl::GramMatrix g = acl::gram(std_data.x);
    const acl::IrReport ir = acl::ir_theta_exact(g, s);
    json ir_json = acl::to_json(ir);
    ir_json["set"] = acl::one_based(s);
    ir_json["config"] = cli_config_json(o, "diagnose");
    write_json(fs::path(o.out_dir) / "ir_report.json", ir_json);

    if (!o.partition_csv.empty()) {
        if (o.active_groups.empty())
            throw acl::IncompatibleConfig("--partition requires --active-groups");
        const acl::PartitionCsv pt = acl::read_partition_csv(o.partition_csv);
        std::map<int, std::vector<int>> by_cluster;
        for (std::size_t i = 0; i < pt.cluster_ids.size(); ++i)
            by_cluster[pt.cluster_ids[i]].push_back(static_cast<int>(i));
        acl::GroupPartition part;
        for (auto& [id, members] : by_cluster) part.groups.push_back(members);
        const std::vector<int> w = parse_set(o.active_groups);
        const acl::GirReport gir = acl::gir_check(std_data.x, part, w);
        json gir_json = acl::to_json(gir);
        gir_json["active_groups"] = acl::one_based(w);
        gir_json["config"] = cli_config_json(o, "diagnose");
        write_json(fs::path(o.out_dir) / "gir_report.json", gir_json);
    }
    return 0;
}

// ------------------------------------------------------------------ report

int cmd_report(const CliOptions& o) {
    ensure_out_dir(o.out_dir);
    const std::vector<acl::ReplicateRecord> records = acl::read_replicates_csv(o.replicates_csv);
    if (records.empty()) throw acl::CsvError("no replicate rows", 1);
    const std::vector<acl::AggregateRow> rows = acl::aggregate_records(records);
    acl::write_aggregate_csv((fs::path(o.out_dir) / "aggregate.csv").string(), rows);
    const std::vector<acl::MeanCurve> curves = acl::mean_curves(records);
    acl::write_curves_csv((fs::path(o.out_dir) / "tpr_curve.csv").string(),
                          records.front().scenario, curves);
    write_json(fs::path(o.out_dir) / "run_config.json", cli_config_json(o, "report"));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse regression with screening, variable clustering and group-wise selection"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "JSON configuration file (flat keys, flags override)");
    app.config_formatter(std::make_shared<JsonConfig>());
    app.require_subcommand(1);

    CliOptions o;

    auto add_pipeline_flags = [&](CLI::App* cmd) {
        cmd->add_option("--rho", o.rho, "correlation screening threshold");
        cmd->add_option("--variant", o.variant, "stage-1 selector: plain|adaptive|thresholded");
        cmd->add_option("--stage1-threshold", o.stage1_threshold,
                        "coefficient threshold for the thresholded variant");
        cmd->add_option("--cut-height", o.cut_height, "dendrogram cut height");
        cmd->add_option("--clusters", o.clusters, "cut to a fixed number of clusters");
        cmd->add_option("--linkage", o.linkage, "average|complete");
        cmd->add_option("--lambda-grid", o.lambda_grid, "penalty grid size");
        cmd->add_option("--lambda-ratio", o.lambda_ratio, "smallest/largest penalty ratio");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run a synthetic benchmark scenario");
    sim->add_option("--scenario", o.scenario, "e1.1..e1.4, e2.1..e2.4, e3, pseudo")->required();
    sim->add_option("--sigma", o.sigma, "noise standard deviation");
    sim->add_option("--replicates", o.replicates, "number of replicates");
    sim->add_option("--seed", o.seed, "master seed (required: no silent nondeterminism)")
        ->required();
    sim->add_option("--n-train", o.n_train, "training rows");
    sim->add_option("--n-val", o.n_val, "validation rows");
    sim->add_option("--methods", o.methods, "methods to run")->delimiter(',');
    sim->add_option("--threads", o.threads, "replicate-level parallelism (0: all cores)");
    sim->add_option("--out", o.out_dir, "output directory")->required();
    sim->add_option("--x", o.x_csv, "predictor CSV for the pseudo scenario");
    sim->add_option("--top-k", o.top_k, "variance filter width (pseudo scenario)");
    sim->add_option("--s0", o.s0, "active set size (pseudo scenario)");
    sim->add_flag("--export-data", o.export_data, "also write per-replicate datasets");
    add_pipeline_flags(sim);

    CLI::App* fit = app.add_subcommand("fit", "fit one method to user data");
    fit->add_option("--x", o.x_csv, "predictor CSV")->required();
    fit->add_option("--y", o.y_csv, "response CSV (single column)");
    fit->add_option("--y-col", o.y_col, "response column inside --x");
    fit->add_option("--x-val", o.x_val_csv, "explicit validation predictors");
    fit->add_option("--y-val", o.y_val_csv, "explicit validation response");
    fit->add_option("--val-fraction", o.val_fraction, "held-out fraction when no --x-val");
    fit->add_option("--method", o.method, "acgl|acrl|cglcor|crlcor|lasso");
    fit->add_option("--seed", o.seed, "seed for the train/validation split");
    fit->add_option("--out", o.out_dir, "output directory")->required();
    add_pipeline_flags(fit);

    CLI::App* clu = app.add_subcommand("cluster", "cluster predictor columns by correlation");
    clu->add_option("--x", o.x_csv, "predictor CSV")->required();
    clu->add_option("--out", o.out_dir, "output directory")->required();
    add_pipeline_flags(clu);

    CLI::App* dia = app.add_subcommand("diagnose", "support-recovery condition reports");
    dia->add_option("--x", o.x_csv, "predictor CSV")->required();
    dia->add_option("--set", o.set_spec, "active set: \"1,2,3\", \"[1,2,3]\" or @file.json")
        ->required();
    dia->add_option("--partition", o.partition_csv, "partition CSV for the group-level report");
    dia->add_option("--active-groups", o.active_groups, "active group ids (1-based)");
    dia->add_option("--out", o.out_dir, "output directory")->required();

    CLI::App* rep = app.add_subcommand("report", "recompute aggregates from a replicate CSV");
    rep->add_option("--replicates", o.replicates_csv, "replicates.csv from a simulate run")
        ->required();
    rep->add_option("--out", o.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (fit->parsed()) return cmd_fit(o);
        if (clu->parsed()) return cmd_cluster(o);
        if (dia->parsed()) return cmd_diagnose(o);
        if (rep->parsed()) return cmd_report(o);
    } catch (const acl::IncompatibleConfig& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const acl::CsvError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const acl::ZeroVarianceColumn& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const acl::DimensionMismatch& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const acl::EmptyStage1& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
