#include "acl/bench_metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "acl/csv.hpp"

namespace acl {

double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() != y_hat.size()) throw DimensionMismatch("mse inputs have different lengths");
    return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

double tpr(const std::vector<int>& s_hat, const std::vector<int>& s0) {
    if (s0.empty()) throw EmptyTruth("true active set is empty");
    std::vector<int> a(s_hat), b(s0);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return static_cast<double>(sorted_intersection(a, b).size()) / static_cast<double>(b.size());
}

std::vector<CurvePoint> tpr_curve(const std::vector<std::vector<int>>& path_supports,
                                  const std::vector<int>& s0) {
    std::map<int, double> best;
    for (const auto& s : path_supports) {
        const int size = static_cast<int>(s.size());
        const double t = tpr(s, s0);
        auto it = best.find(size);
        if (it == best.end() || t > it->second) best[size] = t;
    }
    std::vector<CurvePoint> out;
    out.reserve(best.size());
    for (const auto& [size, t] : best) out.push_back({size, t});
    return out;
}

namespace {

ReplicateRecord run_one(const ScenarioConfig& cfg, const GeneratedDataset& ds,
                        const std::string& method, int replicate, const PipelineConfig& pipeline) {
    ReplicateRecord rec;
    rec.scenario = cfg.beta_config;
    rec.method = method;
    rec.replicate = replicate;
    rec.sigma = cfg.sigma;
    rec.n_train = cfg.n_train;
    rec.n_val = cfg.n_val;
    try {
        const SplitData split = prepare_data(ds.x_train, ds.y_train, ds.x_val, ds.y_val, ds.column_ids);
        const FitResult fit = fit_method(method, split, pipeline);
        rec.ok = true;
        rec.mse_val = fit.validation_mse;
        rec.tpr_val = tpr(fit.selected_vars, ds.true_support);
        rec.s_hat_size = static_cast<int>(fit.selected_vars.size());
        rec.selected = fit.selected_vars;
        rec.lambda1 = fit.lambda1;
        rec.lambda3 = fit.lambda_stage3;
        rec.timings = fit.timings;
        if (fit.has_stage1) {
            rec.stage1_size = static_cast<int>(fit.stage1.s1.size());
            rec.stage1_s_lasso = fit.stage1.s_lasso;
            rec.stage1_s1 = fit.stage1.s1;
        }
        std::vector<std::vector<int>> supports;
        supports.reserve(fit.path_supports.size());
        for (const auto& [lambda, s] : fit.path_supports) supports.push_back(s);
        rec.curve = tpr_curve(supports, ds.true_support);
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

} // namespace

BenchResult run_benchmark(const ScenarioConfig& config, const std::vector<std::string>& methods,
                          const BenchOptions& options) {
    config.validate();
    if (methods.empty()) throw IncompatibleConfig("no methods requested");
    for (const auto& m : methods) {
        const auto known = known_methods();
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw IncompatibleConfig("unknown method '" + m + "'");
    }

    const Simulator sim(config);
    BenchResult out;
    out.config = config;
    out.records.resize(static_cast<std::size_t>(config.replicates) * methods.size());

    int threads = options.threads > 0 ? options.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, config.replicates));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int rep = next.fetch_add(1);
            if (rep >= config.replicates) break;
            const GeneratedDataset ds = sim.generate(rep);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                out.records[static_cast<std::size_t>(rep) * methods.size() + m] =
                    run_one(config, ds, methods[m], rep, options.pipeline);
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    out.aggregate = aggregate_records(out.records);
    out.curves = mean_curves(out.records);
    return out;
}

std::vector<AggregateRow> aggregate_records(const std::vector<ReplicateRecord>& records) {
    // group by (scenario, method) preserving first-appearance order
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.scenario, r.method);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::vector<AggregateRow> rows;
    for (const auto& [scenario, method] : keys) {
        AggregateRow row;
        row.scenario = scenario;
        row.method = method;
        std::vector<double> mses;
        for (const auto& r : records) {
            if (r.scenario != scenario || r.method != method) continue;
            if (row.replicates == 0) {
                row.sigma = r.sigma;
                row.n_train = r.n_train;
                row.n_val = r.n_val;
            }
            ++row.replicates;
            if (!r.ok) {
                ++row.failures;
                continue;
            }
            mses.push_back(r.mse_val);
            row.mean_tpr += r.tpr_val;
            row.mean_s_hat += r.s_hat_size;
            row.mean_stage1 += r.stage1_size;
            row.mean_time_screen += r.timings.screen;
            row.mean_time_cluster += r.timings.cluster;
            row.mean_time_fit += r.timings.fit;
            row.mean_time_total += r.timings.total();
        }
        const auto k = static_cast<double>(mses.size());
        if (k > 0) {
            for (double v : mses) row.mean_mse += v;
            row.mean_mse /= k;
            if (k > 1) {
                double acc = 0.0;
                for (double v : mses) acc += (v - row.mean_mse) * (v - row.mean_mse);
                row.sd_mse = std::sqrt(acc / (k - 1));
            }
            row.mean_tpr /= k;
            row.mean_s_hat /= k;
            row.mean_stage1 /= k;
            row.mean_time_screen /= k;
            row.mean_time_cluster /= k;
            row.mean_time_fit /= k;
            row.mean_time_total /= k;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MeanCurve> mean_curves(const std::vector<ReplicateRecord>& records) {
    std::vector<std::string> methods;
    for (const auto& r : records)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);

    int global_max = 0;
    for (const auto& r : records)
        if (r.ok && !r.curve.empty()) global_max = std::max(global_max, r.curve.back().size);

    std::vector<MeanCurve> out;
    for (const auto& method : methods) {
        MeanCurve mc;
        mc.method = method;
        std::vector<double> sums(static_cast<std::size_t>(global_max) + 1, 0.0);
        int count = 0;
        for (const auto& r : records) {
            if (r.method != method || !r.ok) continue;
            ++count;
            if (!r.curve.empty()) mc.max_observed_size = std::max(mc.max_observed_size, r.curve.back().size);
            // step function through the curve points, starting at (0, 0)
            double value = 0.0;
            std::size_t next_pt = 0;
            for (int s = 0; s <= global_max; ++s) {
                while (next_pt < r.curve.size() && r.curve[next_pt].size <= s)
                    value = r.curve[next_pt++].tpr;
                sums[static_cast<std::size_t>(s)] += value;
            }
        }
        if (count == 0) continue;
        for (int s = 0; s <= global_max; ++s) {
            mc.sizes.push_back(s);
            mc.mean_tpr.push_back(sums[static_cast<std::size_t>(s)] / static_cast<double>(count));
        }
        out.push_back(std::move(mc));
    }
    return out;
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i] + 1); // external artifacts are 1-based
    }
    return out;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        out.push_back(std::stoi(s.substr(i, j - i)) - 1);
        i = j;
    }
    return out;
}

} // namespace

void write_replicates_csv(const std::string& path, const std::vector<ReplicateRecord>& records) {
    const std::vector<std::string> header = {
        "scenario",     "method",       "replicate",  "sigma",     "n_train",
        "n_val",        "status",       "error",      "mse_val",   "tpr",
        "s_hat_size",   "stage1_size",  "lambda1",    "lambda3",   "time_screen",
        "time_cluster", "time_fit",     "time_total", "curve_sizes", "curve_tpr",
        "stage1_s_lasso", "stage1_s1",  "selected"};
    std::vector<std::vector<std::string>> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        std::string curve_sizes, curve_tpr;
        for (std::size_t i = 0; i < r.curve.size(); ++i) {
            if (i) {
                curve_sizes += ' ';
                curve_tpr += ' ';
            }
            curve_sizes += std::to_string(r.curve[i].size);
            curve_tpr += format_double(r.curve[i].tpr);
        }
        rows.push_back({r.scenario, r.method, std::to_string(r.replicate), format_double(r.sigma),
                        std::to_string(r.n_train), std::to_string(r.n_val),
                        r.ok ? "ok" : "failed", "\"" + r.error + "\"",
                        format_double(r.mse_val), format_double(r.tpr_val),
                        std::to_string(r.s_hat_size), std::to_string(r.stage1_size),
                        format_double(r.lambda1), format_double(r.lambda3),
                        format_double(r.timings.screen), format_double(r.timings.cluster),
                        format_double(r.timings.fit), format_double(r.timings.total()),
                        "\"" + curve_sizes + "\"", "\"" + curve_tpr + "\"",
                        "\"" + join_ints(r.stage1_s_lasso) + "\"", "\"" + join_ints(r.stage1_s1) + "\"",
                        "\"" + join_ints(r.selected) + "\""});
    }
    write_csv(path, header, rows);
}

std::vector<ReplicateRecord> read_replicates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw CsvError("missing header row", 1);
    std::vector<ReplicateRecord> out;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        // reuse the quoted-field splitter from the csv module via a tiny
        // local parse: fields are comma separated, quotes shield spaces
        std::vector<std::string> f;
        std::string cur;
        bool quoted = false;
        for (char c : line) {
            if (quoted) {
                if (c == '"')
                    quoted = false;
                else
                    cur.push_back(c);
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        f.push_back(cur);
        if (f.size() < 23) throw CsvError("replicate rows need 23 fields", line_no);
        ReplicateRecord r;
        r.scenario = f[0];
        r.method = f[1];
        r.replicate = std::stoi(f[2]);
        r.sigma = std::stod(f[3]);
        r.n_train = std::stoi(f[4]);
        r.n_val = std::stoi(f[5]);
        r.ok = f[6] == "ok";
        r.error = f[7];
        r.mse_val = std::stod(f[8]);
        r.tpr_val = std::stod(f[9]);
        r.s_hat_size = std::stoi(f[10]);
        r.stage1_size = std::stoi(f[11]);
        r.lambda1 = std::stod(f[12]);
        r.lambda3 = std::stod(f[13]);
        r.timings.screen = std::stod(f[14]);
        r.timings.cluster = std::stod(f[15]);
        r.timings.fit = std::stod(f[16]);
        {
            std::vector<int> sizes;
            std::vector<double> tprs;
            std::istringstream ss(f[18]);
            int v;
            while (ss >> v) sizes.push_back(v);
            std::istringstream st(f[19]);
            double t;
            while (st >> t) tprs.push_back(t);
            for (std::size_t i = 0; i < sizes.size() && i < tprs.size(); ++i)
                r.curve.push_back({sizes[i], tprs[i]});
        }
        r.stage1_s_lasso = parse_ints(f[20]);
        r.stage1_s1 = parse_ints(f[21]);
        r.selected = parse_ints(f[22]);
        out.push_back(std::move(r));
    }
    return out;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    const std::vector<std::string> header = {
        "scenario",      "method",        "sigma",       "n_train",       "n_val",
        "replicates",    "failures",      "mean_mse",    "sd_mse",        "mean_tpr",
        "mean_s_hat",    "mean_stage1",   "mean_time_screen", "mean_time_cluster",
        "mean_time_fit", "mean_time_total"};
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows) {
        out.push_back({r.scenario, r.method, format_double(r.sigma), std::to_string(r.n_train),
                       std::to_string(r.n_val), std::to_string(r.replicates),
                       std::to_string(r.failures), format_double(r.mean_mse), format_double(r.sd_mse),
                       format_double(r.mean_tpr), format_double(r.mean_s_hat),
                       format_double(r.mean_stage1), format_double(r.mean_time_screen),
                       format_double(r.mean_time_cluster), format_double(r.mean_time_fit),
                       format_double(r.mean_time_total)});
    }
    write_csv(path, header, out);
}

void write_curves_csv(const std::string& path, const std::string& scenario,
                      const std::vector<MeanCurve>& curves) {
    const std::vector<std::string> header = {"scenario", "method", "s_hat_size", "mean_tpr"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.sizes.size(); ++i)
            rows.push_back({scenario, c.method, std::to_string(c.sizes[i]),
                            format_double(c.mean_tpr[i])});
    write_csv(path, header, rows);
}

} // namespace acl
