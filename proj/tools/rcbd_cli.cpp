// Command-line surface: rank tests on CSV data, power and sample-size
// calculations, exact null distributions, Monte Carlo studies, and the
// table-reproduction recipes. Reports are JSON envelopes on stdout; the
// reproduce command writes TSV files.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcbd/errors.hpp"
#include "rcbd/exact_null.hpp"
#include "rcbd/mc_sim.hpp"
#include "rcbd/power.hpp"
#include "rcbd/rank_core.hpp"
#include "rcbd/reproduce.hpp"

using nlohmann::json;
using namespace rcbd;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kSchema = "rcbd-report-v1";

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

json envelope(const std::string& command, json config, json results,
              std::optional<uint64_t> seed = std::nullopt) {
    json j;
    j["meta"] = {{"schema", kSchema},
                 {"tool", "rcbd"},
                 {"version", kVersion},
                 {"command", command},
                 {"timestamp", iso_now()}};
    if (seed) j["seed"] = *seed;
    j["config"] = std::move(config);
    j["results"] = std::move(results);
    return j;
}

void emit(const json& j) { std::printf("%s\n", j.dump(2).c_str()); }

// ---------------------------------------------------------------------------
// CSV input
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> read_csv(const std::string& path, bool header,
                                          bool transpose) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open input file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty()) continue;
        if (first && header) {
            first = false;
            continue;
        }
        first = false;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw FormatError("non-numeric cell '" + cell + "' in " + path);
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size()) throw FormatError("malformed cell '" + cell + "' in " + path);
            row.push_back(v);
        }
        if (row.empty()) throw FormatError("empty data row in " + path);
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError("ragged rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("no data rows in " + path);
    if (transpose) {
        std::vector<std::vector<double>> t(rows.front().size(),
                                           std::vector<double>(rows.size()));
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < rows[i].size(); ++j) t[j][i] = rows[i][j];
        rows = std::move(t);
    }
    return rows;
}

RankTable ranks_from_rows(const std::vector<std::vector<double>>& rows) {
    const int b = static_cast<int>(rows.size());
    const int k = static_cast<int>(rows.front().size());
    if (b < 2 || k < 2) throw DimensionError("need at least 2 blocks and 2 treatments");
    RankTable table;
    table.blocks = b;
    table.treatments = k;
    table.ranks.assign(static_cast<size_t>(b) * k, 0);
    table.rank_sums.assign(k, 0);
    for (int j = 0; j < b; ++j) {
        std::vector<bool> seen(k + 1, false);
        for (int i = 0; i < k; ++i) {
            double v = rows[j][i];
            int r = static_cast<int>(std::lround(v));
            if (std::fabs(v - r) > 1e-9 || r < 1 || r > k || seen[r]) {
                throw DomainError("row " + std::to_string(j + 1) +
                                  " is not a permutation of 1.." + std::to_string(k));
            }
            seen[r] = true;
            table.ranks[static_cast<size_t>(j) * k + i] = r;
            table.rank_sums[i] += r;
        }
    }
    return table;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw FormatError(std::string("bad ") + what + " value '" + cell + "'");
        }
    }
    if (values.empty()) throw FormatError(std::string("empty ") + what + " list");
    return values;
}

std::vector<double> parse_shift_list(const std::string& text) {
    auto shifts = parse_double_list(text, "shift");
    if (shifts.size() < 2) throw FormatError("need at least two shifts");
    return shifts;
}

int default_workers() {
    if (const char* env = std::getenv("RCBD_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

json report_json(const TestReport& rep, int blocks, int treatments) {
    json p = {{"chisq", rep.p_chisq}, {"f_r", rep.p_r}, {"f_m", rep.p_m}, {"f_l", rep.p_l}};
    json rej = {{"chisq", rep.reject_chisq},
                {"f_r", rep.reject_r},
                {"f_m", rep.reject_m},
                {"f_l", rep.reject_l}};
    json j = {{"blocks", blocks},
              {"treatments", treatments},
              {"t", rep.t},
              {"f_statistic", rep.f_infinite ? json() : json(rep.f_statistic)},
              {"f_infinite", rep.f_infinite},
              {"f_l", rep.f_l},
              {"df",
               {{"r", {rep.df_r.d1, rep.df_r.d2}},
                {"m", {rep.df_m.d1, rep.df_m.d2}},
                {"l", {rep.df_l.d1, rep.df_l.d2}}}},
              {"p_values", p},
              {"alpha", rep.alpha},
              {"reject", rej}};
    return j;
}

std::vector<Variant> parse_methods(const std::string& name) {
    if (name == "all") {
        return {Variant::H, Variant::MA, Variant::MB, Variant::LA, Variant::LB};
    }
    return {variant_from_string(name)};
}

std::string format_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string opt_g6(const std::optional<double>& v, const char* missing = "*") {
    return v ? format_g6(*v) : missing;
}

// ---------------------------------------------------------------------------
// reproduce output
// ---------------------------------------------------------------------------

std::string write_table_tsv(int n, const std::string& dir, bool with_sim, long reps,
                            uint64_t seed, int workers) {
    std::string path = dir + "/table" + std::to_string(n) + ".tsv";
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    if (n <= 3) {
        out << "B\talpha_exact\talpha_published\tc\terr_T\terr_FR\terr_FM\terr_FL"
            << "\tpct_T\tpct_FR\tpct_FM\tpct_FL\n";
        for (const auto& r : repro::exact_error_table(n)) {
            out << r.blocks << '\t' << format_g6(r.alpha) << '\t'
                << format_g6(r.alpha_published) << '\t' << format_g6(r.c) << '\t'
                << opt_g6(r.err_t) << '\t' << opt_g6(r.err_r) << '\t' << opt_g6(r.err_m)
                << '\t' << opt_g6(r.err_l) << '\t' << opt_g6(r.pct_t) << '\t'
                << opt_g6(r.pct_r) << '\t' << opt_g6(r.pct_m) << '\t' << opt_g6(r.pct_l)
                << '\n';
        }
    } else if (n <= 6) {
        out << "B\talpha\terr_T\terr_FR\terr_FM\terr_FL\n";
        for (const auto& r : repro::sim_error_table(n, with_sim, reps, seed, workers)) {
            out << r.blocks << '\t' << format_g6(r.alpha) << '\t' << opt_g6(r.err_t, "NA")
                << '\t' << opt_g6(r.err_r, "NA") << '\t' << opt_g6(r.err_m, "NA") << '\t'
                << opt_g6(r.err_l, "NA") << '\n';
        }
    } else {
        out << "shifts\tprocedure\tB\testimated_power\tsimulated_power\tdifference\n";
        for (const auto& r : repro::power_table(n, with_sim, reps, seed, workers)) {
            out << r.shifts << '\t' << to_string(r.method) << '\t' << r.min_b << '\t'
                << format_g6(r.estimated) << '\t' << opt_g6(r.simulated, "NA") << '\t'
                << opt_g6(r.difference, "NA") << '\n';
        }
    }
    return path;
}

std::string write_figure_tsv(int n, const std::string& dir) {
    std::string path = dir + "/figure" + std::to_string(n) + ".tsv";
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << "family\tprocedure\tB\testimated_power\n";
    for (const auto& p : repro::figure_curves(n)) {
        out << to_string(p.family) << '\t' << to_string(p.method) << '\t' << p.blocks
            << '\t' << format_g6(p.power) << '\n';
    }
    return path;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Friedman rank tests, F-transformations, exact null distributions, "
                 "and power/sample-size procedures for randomized complete block designs"};
    app.require_subcommand(1);
    std::string command_echo = join_args(argc, argv);

    // ---- test ----
    auto* cmd_test = app.add_subcommand("test", "Run the rank tests on a CSV data set");
    std::string test_input;
    double test_alpha = 0.05;
    bool test_header = false, test_transpose = false, test_ranks = false;
    cmd_test->add_option("--input", test_input, "CSV file, rows = blocks")->required();
    cmd_test->add_option("--alpha", test_alpha, "significance level");
    cmd_test->add_flag("--header", test_header, "skip a header row");
    cmd_test->add_flag("--transpose", test_transpose, "input has rows = treatments");
    cmd_test->add_flag("--ranks", test_ranks, "input already contains within-block ranks");

    // ---- power ----
    auto* cmd_power = app.add_subcommand("power", "Approximate power at a given design size");
    std::string pw_dist = "normal", pw_shifts, pw_method = "all";
    double pw_scale = 1.0, pw_alpha = 0.05;
    int pw_b = 0;
    cmd_power->add_option("--dist", pw_dist, "uniform|normal|laplace|exponential");
    cmd_power->add_option("--shifts", pw_shifts, "comma-separated location shifts")->required();
    cmd_power->add_option("--scale", pw_scale, "multiplier applied to the shifts");
    cmd_power->add_option("--b", pw_b, "number of blocks")->required();
    cmd_power->add_option("--alpha", pw_alpha, "significance level");
    cmd_power->add_option("--method", pw_method, "H|MA|MB|LA|LB|all");

    // ---- samplesize ----
    auto* cmd_ss = app.add_subcommand("samplesize", "Minimum blocks reaching a power target");
    std::string ss_dist = "normal", ss_shifts, ss_method = "all";
    double ss_scale = 1.0, ss_alpha = 0.05, ss_target = 0.9;
    int ss_bmin = 3, ss_bmax = 5000;
    cmd_ss->add_option("--dist", ss_dist, "uniform|normal|laplace|exponential");
    cmd_ss->add_option("--shifts", ss_shifts, "comma-separated location shifts")->required();
    cmd_ss->add_option("--scale", ss_scale, "multiplier applied to the shifts");
    cmd_ss->add_option("--target", ss_target, "power target");
    cmd_ss->add_option("--alpha", ss_alpha, "significance level");
    cmd_ss->add_option("--method", ss_method, "H|MA|MB|LA|LB|all");
    cmd_ss->add_option("--bmin", ss_bmin, "smallest block count scanned");
    cmd_ss->add_option("--bmax", ss_bmax, "largest block count scanned");

    // ---- exact ----
    auto* cmd_exact = app.add_subcommand("exact", "Exact null distribution of the statistic");
    int ex_k = 0, ex_b = 0;
    std::string ex_alphas = "0.1,0.05,0.01", ex_format = "json";
    cmd_exact->add_option("--k", ex_k, "treatments")->required();
    cmd_exact->add_option("--b", ex_b, "blocks")->required();
    cmd_exact->add_option("--alpha-list", ex_alphas, "comma-separated target levels");
    cmd_exact->add_option("--format", ex_format, "json|tsv");

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo rejection rates");
    std::string sim_dist = "normal", sim_shifts;
    int sim_k = 0, sim_b = 0, sim_workers = default_workers();
    double sim_alpha = 0.05;
    long sim_reps = 100000;
    uint64_t sim_seed = 1;
    cmd_sim->add_option("--k", sim_k, "treatments (with all-zero shifts)");
    cmd_sim->add_option("--b", sim_b, "blocks")->required();
    cmd_sim->add_option("--dist", sim_dist, "uniform|normal|laplace|exponential");
    cmd_sim->add_option("--shifts", sim_shifts, "comma-separated location shifts");
    cmd_sim->add_option("--alpha", sim_alpha, "significance level");
    cmd_sim->add_option("--reps", sim_reps, "replications");
    cmd_sim->add_option("--seed", sim_seed, "RNG seed");
    cmd_sim->add_option("--workers", sim_workers, "worker threads");

    // ---- reproduce ----
    auto* cmd_rep = app.add_subcommand("reproduce", "Regenerate study tables as TSV");
    int rep_table = 0, rep_figure = 0, rep_workers = default_workers();
    std::string rep_out = ".";
    bool rep_sim = false;
    long rep_reps = 100000;
    uint64_t rep_seed = 1;
    cmd_rep->add_option("--table", rep_table, "table number 1-14");
    cmd_rep->add_option("--figure", rep_figure, "figure number 1-2");
    cmd_rep->add_option("--out", rep_out, "output directory");
    cmd_rep->add_flag("--with-sim", rep_sim, "include simulated columns");
    cmd_rep->add_option("--reps", rep_reps, "simulation replications");
    cmd_rep->add_option("--seed", rep_seed, "RNG seed");
    cmd_rep->add_option("--workers", rep_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_test) {
            auto rows = read_csv(test_input, test_header, test_transpose);
            TestReport rep;
            int b, k;
            if (test_ranks) {
                auto table = ranks_from_rows(rows);
                b = table.blocks;
                k = table.treatments;
                rep = run_tests(table, test_alpha);
            } else {
                const int nb = static_cast<int>(rows.size());
                const int nk = static_cast<int>(rows.front().size());
                std::vector<double> flat;
                flat.reserve(static_cast<size_t>(nb) * nk);
                for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
                BlockData data(nb, nk, std::move(flat));
                b = nb;
                k = nk;
                rep = run_tests(data, test_alpha);
            }
            json config = {{"input", test_input}, {"alpha", test_alpha},
                           {"header", test_header}, {"transpose", test_transpose},
                           {"ranks", test_ranks}};
            emit(envelope(command_echo, config, report_json(rep, b, k)));
        } else if (*cmd_power || *cmd_ss) {
            bool is_power = static_cast<bool>(*cmd_power);
            std::string dist = is_power ? pw_dist : ss_dist;
            double scale = is_power ? pw_scale : ss_scale;
            double alpha = is_power ? pw_alpha : ss_alpha;
            auto shifts = parse_shift_list(is_power ? pw_shifts : ss_shifts);
            for (auto& s : shifts) s *= scale;
            ShiftModel model(family_from_string(dist), shifts);
            json results;
            if (is_power) {
                for (Variant v : parse_methods(pw_method)) {
                    results[to_string(v)] = power({model, pw_b, alpha, v});
                }
                json config = {{"dist", dist},    {"shifts", shifts}, {"scale", scale},
                               {"b", pw_b},       {"alpha", alpha},   {"method", pw_method},
                               {"k", model.treatments()}};
                emit(envelope(command_echo, config, results));
            } else {
                for (Variant v : parse_methods(ss_method)) {
                    auto res = min_blocks(model, alpha, ss_target, v, ss_bmin, ss_bmax);
                    results[to_string(v)] = {{"min_b", res.min_blocks},
                                             {"power", res.achieved_power},
                                             {"total_n", res.total_n}};
                }
                json config = {{"dist", dist},        {"shifts", shifts},
                               {"scale", scale},      {"target", ss_target},
                               {"alpha", alpha},      {"method", ss_method},
                               {"bmin", ss_bmin},     {"bmax", ss_bmax},
                               {"k", model.treatments()}};
                emit(envelope(command_echo, config, results));
            }
        } else if (*cmd_exact) {
            auto dist = exact::ExactNullDist::compute(ex_k, ex_b);
            auto alphas = parse_double_list(ex_alphas, "alpha");
            json crit = json::array();
            for (double a : alphas) {
                if (!(a > 0.0 && a < 1.0)) throw DomainError("alpha targets must lie in (0,1)");
                auto cv = exact::critical_value(dist, a);
                auto row = exact::approx_tail_row(dist, cv.key);
                auto err = [&](std::optional<double> p) {
                    return p ? json(*p - cv.attained) : json();
                };
                crit.push_back({{"target", a},
                                {"c", cv.c},
                                {"attained", cv.attained},
                                {"p_t", row.p_t},
                                {"p_r", row.p_r ? json(*row.p_r) : json()},
                                {"p_m", row.p_m ? json(*row.p_m) : json()},
                                {"p_l", row.p_l},
                                {"err_t", err(row.p_t)},
                                {"err_r", err(row.p_r)},
                                {"err_m", err(row.p_m)},
                                {"err_l", err(row.p_l)}});
            }
            json pmf = json::array();
            for (const auto& atom : dist.atoms()) {
                pmf.push_back({{"key", atom.key},
                               {"t", atom.t},
                               {"count", atom.count.str()},
                               {"probability", atom.probability}});
            }
            json results = {
                {"k", ex_k},
                {"b", ex_b},
                {"support_size", dist.atoms().size()},
                {"total_sequences", dist.total().str()},
                {"mean_t", static_cast<double>(dist.mean_t_exact())},
                {"var_t", static_cast<double>(dist.var_t_exact())},
                {"critical_values", crit},
                {"pmf", pmf}};
            if (ex_format == "tsv") {
                std::printf("t\tkey\tcount\tprobability\n");
                for (const auto& atom : dist.atoms()) {
                    std::printf("%s\t%lld\t%s\t%s\n", format_g6(atom.t).c_str(), atom.key,
                                atom.count.str().c_str(), format_g6(atom.probability).c_str());
                }
            } else {
                json config = {{"k", ex_k}, {"b", ex_b}, {"alpha_list", alphas}};
                emit(envelope(command_echo, config, results));
            }
        } else if (*cmd_sim) {
            std::vector<double> shifts;
            if (!sim_shifts.empty()) {
                shifts = parse_shift_list(sim_shifts);
                if (sim_k != 0 && sim_k != static_cast<int>(shifts.size())) {
                    throw DomainError("--k disagrees with the shift count");
                }
            } else {
                if (sim_k < 2) throw DomainError("need --k >= 2 or an explicit shift list");
                shifts.assign(sim_k, 0.0);
            }
            ShiftModel model(family_from_string(sim_dist), shifts);
            mc::SimConfig cfg{model, sim_b, sim_alpha, sim_reps, sim_seed, sim_workers};
            auto res = mc::simulate_rejections(cfg);
            json results = {{"rates", {{"t", res.rate_t}, {"f_r", res.rate_r},
                                       {"f_m", res.rate_m}, {"f_l", res.rate_l}}},
                            {"standard_errors", {{"t", res.se_t}, {"f_r", res.se_r},
                                                 {"f_m", res.se_m}, {"f_l", res.se_l}}},
                            {"reps", res.reps}};
            json config = {{"dist", sim_dist}, {"shifts", shifts},  {"k", model.treatments()},
                           {"b", sim_b},       {"alpha", sim_alpha}, {"reps", sim_reps},
                           {"seed", sim_seed}, {"workers", sim_workers}};
            emit(envelope(command_echo, config, results, sim_seed));
        } else if (*cmd_rep) {
            if ((rep_table == 0) == (rep_figure == 0)) {
                std::fprintf(stderr, "reproduce: give exactly one of --table or --figure\n");
                return 5;
            }
            if (rep_table && (rep_table < 1 || rep_table > 14)) {
                std::fprintf(stderr, "reproduce: unknown table %d\n", rep_table);
                return 5;
            }
            if (rep_figure && (rep_figure < 1 || rep_figure > 2)) {
                std::fprintf(stderr, "reproduce: unknown figure %d\n", rep_figure);
                return 5;
            }
            std::string path = rep_table
                                   ? write_table_tsv(rep_table, rep_out, rep_sim, rep_reps,
                                                     rep_seed, rep_workers)
                                   : write_figure_tsv(rep_figure, rep_out);
            json config = {{"table", rep_table},   {"figure", rep_figure},
                           {"out", rep_out},       {"with_sim", rep_sim},
                           {"reps", rep_reps},     {"workers", rep_workers}};
            json results = {{"written", path}};
            if (rep_sim) {
                emit(envelope(command_echo, config, results, rep_seed));
            } else {
                emit(envelope(command_echo, config, results));
            }
        }
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 4;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
