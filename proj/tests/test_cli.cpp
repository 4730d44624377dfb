#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "acl/bench_metrics.hpp"
#include "acl/csv.hpp"
#include "acl/pipeline.hpp"
#include "acl/serialize.hpp"
#include "acl/simgen.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = ACL_CLI_BIN;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// timing columns vary run to run; blank them for comparisons
std::string strip_timing_columns(const fs::path& csv_path) {
    acl::CsvTable dummy; // not numeric-parsable (strings); do a manual pass
    std::ifstream in(csv_path);
    std::string line, out;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) header.push_back(f);
    }
    out = line + "\n";
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string f, rebuilt;
        std::size_t idx = 0;
        bool quoted_carry = false;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == '"') quoted_carry = !quoted_carry;
            if (c == ',' && !quoted_carry) {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        for (idx = 0; idx < fields.size(); ++idx) {
            if (idx) rebuilt += ',';
            if (idx < header.size() && header[idx].rfind("time", 0) == 0)
                rebuilt += "T";
            else if (idx < header.size() && header[idx].rfind("mean_time", 0) == 0)
                rebuilt += "T";
            else
                rebuilt += fields[idx];
        }
        out += rebuilt + "\n";
    }
    return out;
}

} // namespace

TEST_CASE("simulate writes the four artifacts and is reproducible across thread counts") {
    const fs::path a = fresh_dir("acl_cli_sim_a");
    const fs::path b = fresh_dir("acl_cli_sim_b");
    const std::string base =
        " simulate --scenario e1.1 --sigma 2 --replicates 3 --seed 99 --n-train 60 --n-val 60"
        " --methods acgl,cglcor";
    REQUIRE(run(base + " --threads 1 --out " + a.string()) == 0);
    REQUIRE(run(base + " --threads 4 --out " + b.string()) == 0);
    for (const char* f : {"replicates.csv", "aggregate.csv", "tpr_curve.csv", "summary.json"}) {
        CAPTURE(f);
        CHECK(fs::exists(a / f));
    }
    CHECK(strip_timing_columns(a / "replicates.csv") == strip_timing_columns(b / "replicates.csv"));
    CHECK(strip_timing_columns(a / "aggregate.csv") == strip_timing_columns(b / "aggregate.csv"));
    CHECK(slurp(a / "tpr_curve.csv") == slurp(b / "tpr_curve.csv"));

    // summary embeds the resolved configuration
    const json summary = json::parse(slurp(a / "summary.json"));
    CHECK(summary["scenario"]["seed"] == 99);
    CHECK(summary["lambda_grid"] == 50);
    CHECK(summary["screen_rho"] == 0.7);
}

TEST_CASE("unknown scenario exits 2 and names the valid ids") {
    const fs::path dir = fresh_dir("acl_cli_bad");
    const std::string cmd = cli + " simulate --scenario e7.7 --seed 1 --out " + dir.string() +
                            " 2> " + (dir / "err.txt").string();
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    const std::string err = slurp(dir / "err.txt");
    CHECK(err.find("e1.1") != std::string::npos);
}

TEST_CASE("missing required flags exit 2") {
    CHECK(run("simulate --scenario e1.1 --out /tmp/nope_no_seed") == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("malformed CSV exits 2 with a line number") {
    const fs::path dir = fresh_dir("acl_cli_malformed");
    {
        std::ofstream x(dir / "x.csv");
        x << "a,b\n1,2\n3,oops\n";
        std::ofstream y(dir / "y.csv");
        y << "y\n1\n2\n";
    }
    const std::string cmd = cli + " fit --x " + (dir / "x.csv").string() + " --y " +
                            (dir / "y.csv").string() + " --method lasso --seed 3 --out " +
                            dir.string() + " 2> " + (dir / "err.txt").string();
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(slurp(dir / "err.txt").find("line 3") != std::string::npos);
}

TEST_CASE("fit on exported data reproduces the library result") {
    const fs::path dir = fresh_dir("acl_cli_fit");
    REQUIRE(run("simulate --scenario e1.1 --sigma 1 --replicates 1 --seed 41 --n-train 80"
                " --n-val 80 --methods acgl --export-data --out " +
                dir.string()) == 0);
    const fs::path rep0 = dir / "data" / "rep_0";
    REQUIRE(fs::exists(rep0 / "x_train.csv"));

    const fs::path out = fresh_dir("acl_cli_fit_out");
    REQUIRE(run("fit --x " + (rep0 / "x_train.csv").string() + " --y " +
                (rep0 / "y_train.csv").string() + " --x-val " + (rep0 / "x_val.csv").string() +
                " --y-val " + (rep0 / "y_val.csv").string() + " --method acgl --seed 0 --out " +
                out.string()) == 0);

    const json fit = json::parse(slurp(out / "fit_result.json"));

    // the same fit through the library on the same files
    const acl::CsvTable xt = acl::read_csv((rep0 / "x_train.csv").string());
    const acl::CsvTable yt = acl::read_csv((rep0 / "y_train.csv").string());
    const acl::CsvTable xv = acl::read_csv((rep0 / "x_val.csv").string());
    const acl::CsvTable yv = acl::read_csv((rep0 / "y_val.csv").string());
    const acl::SplitData split =
        acl::prepare_data(acl::to_matrix(xt), acl::column_by_name(yt, "y"), acl::to_matrix(xv),
                          acl::column_by_name(yv, "y"), xt.header);
    const acl::FitResult direct = acl::fit_acgl(split, {});
    const std::vector<int> expect = acl::one_based(direct.selected_vars);
    CHECK(fit["selected_vars"].get<std::vector<int>>() == expect);

    // and the simulate-side record agrees on the selected set
    const auto records = acl::read_replicates_csv((dir / "replicates.csv").string());
    REQUIRE(records.size() == 1);
    CHECK(acl::one_based(records[0].selected) == expect);
}

TEST_CASE("cluster subcommand recovers planted blocks") {
    const fs::path dir = fresh_dir("acl_cli_cluster");
    acl::ScenarioConfig cfg;
    cfg.design = "sigma1";
    cfg.beta_config = "e1.1";
    cfg.num_blocks = 3;
    cfg.block_size = 10;
    cfg.n_train = 150;
    cfg.n_val = 10;
    cfg.sigma = 1.0;
    cfg.master_seed = 5;
    const acl::GeneratedDataset ds = acl::generate(cfg, 0);
    acl::write_matrix_csv((dir / "x.csv").string(), ds.x_train, ds.column_ids);

    REQUIRE(run("cluster --x " + (dir / "x.csv").string() + " --out " + dir.string()) == 0);
    const acl::PartitionCsv pt = acl::read_partition_csv((dir / "partition.csv").string());
    REQUIRE(pt.cluster_ids.size() == 30);
    for (int b = 0; b < 3; ++b) {
        const int cluster_id = pt.cluster_ids[static_cast<std::size_t>(10 * b)];
        for (int j = 0; j < 10; ++j)
            CHECK(pt.cluster_ids[static_cast<std::size_t>(10 * b + j)] == cluster_id);
    }

    // by-count cut: all singletons
    REQUIRE(run("cluster --x " + (dir / "x.csv").string() + " --clusters 30 --out " +
                dir.string()) == 0);
    const acl::PartitionCsv singles = acl::read_partition_csv((dir / "partition.csv").string());
    std::set<int> ids(singles.cluster_ids.begin(), singles.cluster_ids.end());
    CHECK(ids.size() == 30);
}

TEST_CASE("diagnose: identity design, equicorrelated oracle value and singular exit") {
    const fs::path dir = fresh_dir("acl_cli_diag");
    // orthonormal design -> theta = 0
    const Eigen::MatrixXd x = test::orthonormal_design(60, 6, 9101);
    std::vector<std::string> ids;
    for (int j = 0; j < 6; ++j) ids.push_back("V" + std::to_string(j + 1));
    acl::write_matrix_csv((dir / "x.csv").string(), x, ids);
    REQUIRE(run("diagnose --x " + (dir / "x.csv").string() + " --set 1,3 --out " + dir.string()) ==
            0);
    json ir = json::parse(slurp(dir / "ir_report.json"));
    CHECK(ir["theta_exact"].get<double>() == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(ir["holds_strict"] == true);

    // equicorrelated rho = 0.5 sample at large n: theta close to 0.5
    const Eigen::MatrixXd sigma =
        Eigen::MatrixXd::Constant(3, 3, 0.5) + 0.5 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd xe = acl::sample_gaussian(sigma, 20000, 11);
    acl::write_matrix_csv((dir / "xe.csv").string(), xe, {"a", "b", "c"});
    REQUIRE(run("diagnose --x " + (dir / "xe.csv").string() + " --set 1 --out " + dir.string()) ==
            0);
    ir = json::parse(slurp(dir / "ir_report.json"));
    CHECK(ir["theta_exact"].get<double>() == doctest::Approx(0.5).epsilon(0.05));

    // duplicated active columns -> singular Sigma11 -> exit 3
    Eigen::MatrixXd xdup(60, 3);
    xdup.col(0) = x.col(0);
    xdup.col(1) = x.col(0);
    xdup.col(2) = x.col(1);
    acl::write_matrix_csv((dir / "xdup.csv").string(), xdup, {"a", "b", "c"});
    CHECK(run("diagnose --x " + (dir / "xdup.csv").string() + " --set 1,2 --out " + dir.string()) ==
          3);
}

TEST_CASE("config file supplies defaults, flags override") {
    const fs::path dir = fresh_dir("acl_cli_config");
    {
        std::ofstream cfg(dir / "config.json");
        cfg << R"({"scenario": "e1.1", "sigma": 2.0, "replicates": 2, "seed": 77,)"
            << R"( "n-train": 60, "n-val": 60, "methods": ["lasso"]})";
    }
    REQUIRE(run("--config " + (dir / "config.json").string() + " simulate --out " +
                dir.string()) == 0);
    json summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary["scenario"]["sigma"] == 2.0);
    CHECK(summary["scenario"]["replicates"] == 2);

    // a flag beats the file
    REQUIRE(run("--config " + (dir / "config.json").string() + " simulate --sigma 4 --out " +
                dir.string()) == 0);
    summary = json::parse(slurp(dir / "summary.json"));
    CHECK(summary["scenario"]["sigma"] == 4.0);
}

TEST_CASE("report recomputes the aggregate table from replicates.csv") {
    const fs::path dir = fresh_dir("acl_cli_report");
    REQUIRE(run("simulate --scenario e1.1 --sigma 2 --replicates 3 --seed 13 --n-train 60"
                " --n-val 60 --methods acgl --out " +
                dir.string()) == 0);
    const fs::path out = fresh_dir("acl_cli_report_out");
    REQUIRE(run("report --replicates " + (dir / "replicates.csv").string() + " --out " +
                out.string()) == 0);
    const std::string a = slurp(dir / "aggregate.csv");
    const std::string b = slurp(out / "aggregate.csv");
    // identical up to the timing means (recomputed from the same rows)
    CHECK(strip_timing_columns(dir / "aggregate.csv") == strip_timing_columns(out / "aggregate.csv"));
}

TEST_CASE("empty stage 1 surfaces as a runtime failure in fit") {
    const fs::path dir = fresh_dir("acl_cli_empty");
    // an absurd coefficient threshold empties the stage-1 support at every
    // grid point
    const Eigen::MatrixXd x = test::random_matrix(50, 8, 9301);
    const Eigen::VectorXd y = test::random_vector(50, 9302);
    std::vector<std::string> ids;
    for (int j = 0; j < 8; ++j) ids.push_back("V" + std::to_string(j + 1));
    acl::write_matrix_csv((dir / "x.csv").string(), x, ids);
    acl::write_vector_csv((dir / "y.csv").string(), y, "y");
    const std::string cmd = cli + " fit --x " + (dir / "x.csv").string() + " --y " +
                            (dir / "y.csv").string() +
                            " --method acgl --seed 3 --variant thresholded"
                            " --stage1-threshold 1e9 --out " +
                            dir.string() + " 2> " + (dir / "err.txt").string();
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 3);
    CHECK(slurp(dir / "err.txt").find("lambda1") != std::string::npos);
}
