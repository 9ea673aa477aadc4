#include "pragmarank/evalrep/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace prk {

using nlohmann::json;

double rmse(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.empty() || predicted.size() != truth.size())
        throw ContractError("rmse: lists must be non-empty and of equal length");
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = predicted[i] - truth[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(predicted.size()));
}

double kendall_tau(std::span<const double> predicted, std::span<const double> truth) {
    if (predicted.size() != truth.size() || predicted.size() < 2)
        throw ContractError("kendall_tau: need equal lengths >= 2");
    double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        for (std::size_t j = i + 1; j < predicted.size(); ++j) {
            const double dx = predicted[i] - predicted[j];
            const double dy = truth[i] - truth[j];
            if (dx == 0.0 && dy == 0.0) continue;  // tied in both, dropped
            if (dx == 0.0)
                ties_x += 1;
            else if (dy == 0.0)
                ties_y += 1;
            else if ((dx > 0) == (dy > 0))
                concordant += 1;
            else
                discordant += 1;
        }
    const double denom = std::sqrt((concordant + discordant + ties_x) *
                                   (concordant + discordant + ties_y));
    if (denom == 0.0) return 0.0;
    return (concordant - discordant) / denom;
}

EvalReport evaluate(RankModel& model, const Dataset& ds, Split split) {
    EvalReport r;

    std::vector<double> all_pred, all_true;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> degree_hits;  // degree → (correct, total)
    std::size_t all_correct = 0, all_total = 0;
    std::vector<double> taus;

    for (const auto& kid : ds.kernel_ids()) {
        auto records = ds.of(kid, split);
        std::vector<double> pred, truth;
        for (const auto* rec : records) {
            pred.push_back(model.predict_point(rec->graph));
            truth.push_back(rec->y);
        }
        all_pred.insert(all_pred.end(), pred.begin(), pred.end());
        all_true.insert(all_true.end(), truth.begin(), truth.end());
        if (records.size() >= 2) {
            const double tau = kendall_tau(pred, truth);
            r.tau_per_kernel[kid] = tau;
            taus.push_back(tau);
        }

        for (std::size_t i = 0; i < records.size(); ++i)
            for (std::size_t j = i + 1; j < records.size(); ++j) {
                const double p1 = model.pair_probability(records[i]->graph, records[j]->graph);
                // p1 == 0.5 predicts the second class
                const bool correct = (p1 > 0.5) == (records[i]->y > records[j]->y);
                const std::size_t degree =
                    pragma_difference_degree(records[i]->graph, records[j]->graph);
                auto& [hit, total] = degree_hits[degree];
                hit += correct ? 1 : 0;
                ++total;
                all_correct += correct ? 1 : 0;
                ++all_total;
            }
    }

    if (!all_pred.empty()) {
        r.rmse = rmse(all_pred, all_true);
        r.rmse_count = all_pred.size();
    }
    for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        auto it = degree_hits.find(d);
        if (it == degree_hits.end()) continue;
        r.acc_by_degree[d] = {static_cast<double>(it->second.first) /
                                  static_cast<double>(it->second.second),
                              it->second.second};
    }
    if (all_total > 0)
        r.acc_all = {static_cast<double>(all_correct) / static_cast<double>(all_total), all_total};
    if (all_pred.size() >= 2) r.tau_pooled = kendall_tau(all_pred, all_true);
    if (!taus.empty()) {
        double s = 0.0;
        for (double t : taus) s += t;
        r.tau_kernel_mean = s / static_cast<double>(taus.size());
    }
    return r;
}

json report_to_json(const EvalReport& r) {
    json by_degree = json::object();
    for (const auto& [d, acc] : r.acc_by_degree)
        by_degree["d" + std::to_string(d)] = {{"accuracy", acc.accuracy}, {"count", acc.count}};
    json per_kernel = json::object();
    for (const auto& [k, tau] : r.tau_per_kernel) per_kernel[k] = tau;
    return {{"rmse", r.rmse},
            {"rmse_count", r.rmse_count},
            {"acc_by_degree", by_degree},
            {"acc_all", {{"accuracy", r.acc_all.accuracy}, {"count", r.acc_all.count}}},
            {"kendall_tau", {{"per_kernel", per_kernel},
                             {"pooled", r.tau_pooled},
                             {"kernel_mean", r.tau_kernel_mean}}}};
}

namespace {
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_metrics_csv(const std::filesystem::path& path, const EvalReport& r) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "metric,value,count\n";
    out << "rmse," << fmt(r.rmse) << "," << r.rmse_count << "\n";
    for (const auto& [d, acc] : r.acc_by_degree)
        out << "acc_d" << d << "," << fmt(acc.accuracy) << "," << acc.count << "\n";
    out << "acc_all," << fmt(r.acc_all.accuracy) << "," << r.acc_all.count << "\n";
    for (const auto& [k, tau] : r.tau_per_kernel) out << "tau_" << k << "," << fmt(tau) << ",\n";
    out << "tau_pooled," << fmt(r.tau_pooled) << ",\n";
    out << "tau_kernel_mean," << fmt(r.tau_kernel_mean) << ",\n";
}

double geometric_mean(std::span<const double> xs) {
    if (xs.empty()) throw ContractError("geometric_mean: empty input");
    double acc = 0.0;
    for (double x : xs) {
        if (x <= 0.0) throw ContractError("geometric_mean: inputs must be positive");
        acc += std::log(x);
    }
    return std::exp(acc / static_cast<double>(xs.size()));
}

void write_dse_latency_csv(const std::filesystem::path& path,
                           const std::vector<DseLatencyRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "kernel,two_stage,stage1_only,random_baseline\n";
    std::vector<double> two, one, rnd;
    for (const auto& r : rows) {
        out << r.kernel << "," << fmt(r.two_stage) << "," << fmt(r.stage1_only) << ","
            << fmt(r.random_baseline) << "\n";
        two.push_back(r.two_stage);
        one.push_back(r.stage1_only);
        rnd.push_back(r.random_baseline);
    }
    if (!rows.empty())
        out << "geomean," << fmt(geometric_mean(two)) << "," << fmt(geometric_mean(one)) << ","
            << fmt(geometric_mean(rnd)) << "\n";
}

void write_alpha_sweep_csv(const std::filesystem::path& path,
                           const std::vector<AlphaSweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "alpha,rmse,acc_all,tau_pooled\n";
    for (const auto& r : rows)
        out << fmt(r.alpha) << "," << fmt(r.rmse) << "," << fmt(r.acc_all) << ","
            << fmt(r.tau_pooled) << "\n";
}

}  // namespace prk
