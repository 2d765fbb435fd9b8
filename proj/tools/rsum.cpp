// rsum: run summation algorithms on generated series or dataset files,
// compare them against the exact-sum oracle, and emit text/CSV/JSON reports.
//
// Exit codes: 0 success; 2 bad usage, unknown series/algorithm, or
// unreadable input file.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rsum/accumulators.hpp"
#include "rsum/generators.hpp"
#include "rsum/io.hpp"
#include "rsum/oracle.hpp"
#include "rsum/report.hpp"
#include "rsum/signsum.hpp"

namespace {

struct order_spec {
    enum { forward, reverse, shuffled } kind = forward;
    std::uint64_t seed = 1;
    std::string label = "forward";
};

order_spec parse_order(const std::string& s) {
    order_spec o;
    if (s == "forward") return o;
    if (s == "reverse") {
        o.kind = order_spec::reverse;
        o.label = "reverse";
        return o;
    }
    if (s.rfind("shuffled", 0) == 0) {
        o.kind = order_spec::shuffled;
        if (const char* env = std::getenv("RSUM_SEED")) o.seed = std::strtoull(env, nullptr, 10);
        if (s.size() > 8 && s[8] == ':') o.seed = std::strtoull(s.c_str() + 9, nullptr, 10);
        o.label = "shuffled:" + std::to_string(o.seed);
        return o;
    }
    throw CLI::ValidationError("--order", "expected forward, reverse or shuffled[:seed]");
}

template <class T>
void apply_order(std::vector<T>& v, const order_spec& o) {
    if (o.kind == order_spec::reverse) {
        std::reverse(v.begin(), v.end());
    } else if (o.kind == order_spec::shuffled) {
        std::mt19937_64 rng(o.seed);
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng() % i]);
    }
}

struct source_opts {
    std::string series;
    std::uint64_t n = 0;
    std::string file;
    std::vector<double> point;  // rosenbrock coordinates
};

// materialize the input at double carrier precision; single-precision runs
// narrow afterwards so both precisions see the same mathematical input
std::vector<double> materialize(const source_opts& src, const std::string& precision) {
    if (!src.file.empty()) return rsum::load_dataset(src.file);
    if (src.series.empty())
        throw std::runtime_error("no input: pass --series or --file");
    if (src.series == "rosenbrock" && !src.point.empty()) {
        if (precision == "single") {
            auto s = rsum::make_rosenbrock<float>(src.point);
            auto t = rsum::series_terms(s);
            return std::vector<double>(t.begin(), t.end());
        }
        return rsum::series_terms(rsum::make_rosenbrock<double>(src.point));
    }
    if (src.n == 0) throw std::runtime_error("--series needs --n");
    if (precision == "single") {
        auto t = rsum::series_terms(rsum::make_series<float>(src.series, src.n));
        return std::vector<double>(t.begin(), t.end());
    }
    return rsum::series_terms(rsum::make_series<double>(src.series, src.n));
}

std::string source_label(const source_opts& src) {
    return src.file.empty() ? src.series : src.file;
}

const std::vector<std::string> sum_algos = {
    "naive", "compensated", "bucket-recursive", "bucket-nonrec",
    "bucket-nonrec-corrected", "oracle"};
const std::vector<std::string> sign_algos = {"essa-sign", "hash-sign", "oracle"};

std::string canonical_sign_algo(std::string a) {
    if (a == "essa") return "essa-sign";
    if (a == "hash") return "hash-sign";
    return a;
}

template <class F>
rsum::report_row run_sum_once(const std::string& algo, std::span<const F> terms) {
    rsum::report_row row;
    row.algorithm = algo;
    row.n = terms.size();
    rsum::sum_report<F> rep;
    if (algo == "naive")
        rep = rsum::naive_sum<F>(terms);
    else if (algo == "compensated")
        rep = rsum::compensated_sum<F>(terms);
    else if (algo == "bucket-recursive")
        rep = rsum::bucket_sum_recursive<F>(terms);
    else if (algo == "bucket-nonrec")
        rep = rsum::bucket_sum_nonrecursive<F>(terms, false);
    else if (algo == "bucket-nonrec-corrected")
        rep = rsum::bucket_sum_nonrecursive<F>(terms, true);
    else if (algo == "oracle") {
        std::vector<double> wide(terms.begin(), terms.end());
        row.result = rsum::exact_sum(wide).rounded;
        return row;
    } else {
        throw std::runtime_error("unknown sum algorithm: " + algo);
    }
    row.result = double(rep.sum);
    row.overflow = rep.overflow;
    row.saw_nan = rep.saw_nan;
    if (rep.level_histogram) {
        row.histogram = *rep.level_histogram;
        row.max_recursion_level = int(row.histogram.size()) - 1;
    }
    return row;
}

template <class F>
rsum::report_row run_sign_once(const std::string& algo, std::span<const F> terms) {
    rsum::report_row row;
    row.algorithm = algo;
    row.n = terms.size();
    if (algo == "essa-sign") {
        row.result = double(rsum::essa_sign<F>(terms).sign);
    } else if (algo == "hash-sign") {
        row.result = double(rsum::hash_sign<F>(terms).sign);
    } else if (algo == "oracle") {
        std::vector<double> wide(terms.begin(), terms.end());
        row.result = double(rsum::exact_sign(wide));
    } else {
        throw std::runtime_error("unknown sign algorithm: " + algo);
    }
    return row;
}

// run with timing: median wall time of `repeat` runs of the algorithm only
template <class F>
rsum::report_row timed_run(const std::string& algo, bool sign_mode,
                           std::span<const F> terms, int repeat) {
    rsum::report_row row;
    std::vector<std::uint64_t> times;
    for (int i = 0; i < std::max(repeat, 1); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        row = sign_mode ? run_sign_once<F>(algo, terms) : run_sum_once<F>(algo, terms);
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::uint64_t(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
    }
    std::sort(times.begin(), times.end());
    row.wall_time_ns = times[times.size() / 2];
    return row;
}

rsum::report_row run_config(const std::string& algo, bool sign_mode,
                            const std::vector<double>& wide,
                            const std::string& precision, const order_spec& ord,
                            int repeat) {
    rsum::report_row row;
    if (precision == "single") {
        std::vector<float> narrow(wide.begin(), wide.end());
        apply_order(narrow, ord);
        row = timed_run<float>(algo, sign_mode, narrow, repeat);
        std::vector<double> rewidened(narrow.begin(), narrow.end());
        if (sign_mode) {
            row.oracle_result = double(rsum::exact_sign(rewidened));
            row.relative_error = row.result == row.oracle_result ? 0.0 : 1.0;
        } else {
            row.oracle_result = rsum::exact_sum(rewidened).rounded;
            row.relative_error = rsum::relative_error(row.result, rewidened);
        }
    } else {
        std::vector<double> data = wide;
        apply_order(data, ord);
        row = timed_run<double>(algo, sign_mode, data, repeat);
        if (sign_mode) {
            row.oracle_result = double(rsum::exact_sign(data));
            row.relative_error = row.result == row.oracle_result ? 0.0 : 1.0;
        } else {
            row.oracle_result = rsum::exact_sum(data).rounded;
            row.relative_error = rsum::relative_error(row.result, data);
        }
    }
    row.precision = precision;
    row.order = ord.label;
    return row;
}

void emit(const std::vector<rsum::report_row>& rows, const std::string& format,
          const std::string& out_path) {
    std::string text;
    if (format == "csv") {
        text = rsum::to_csv(rows);
    } else if (format == "json") {
        text = rsum::to_json(rows);
    } else {
        std::ostringstream os;
        for (const auto& r : rows) {
            os << r.algorithm << "  " << r.series << "  n=" << r.n << "  "
               << r.precision << "  " << r.order
               << "  result=" << rsum::detail::shortest(r.result) << " ("
               << rsum::detail::hexfloat(r.result) << ")"
               << "  oracle=" << rsum::detail::shortest(r.oracle_result)
               << "  rel_err=" << rsum::detail::shortest(r.relative_error)
               << "  time=" << r.wall_time_ns << "ns";
            if (r.max_recursion_level >= 0)
                os << "  max_level=" << r.max_recursion_level;
            if (r.overflow) os << "  [overflow]";
            if (r.saw_nan) os << "  [nan]";
            os << '\n';
        }
        text = os.str();
    }
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open for writing: " + out_path);
        f << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"floating-point summation toolbench"};

    std::string algo, algos_csv, precision = "double", order_str = "forward";
    std::string format = "text", out_path;
    source_opts src;
    int repeat = 1;

    auto add_common = [&](CLI::App* cmd, bool sign_mode) {
        cmd->add_option("--series", src.series, "series name (see --list)");
        cmd->add_option("--n", src.n, "term count for --series");
        cmd->add_option("--file", src.file, "dataset file (text or raw)");
        cmd->add_option("--point", src.point, "rosenbrock coordinates")->delimiter(',');
        cmd->add_option("--precision", precision, "single | double")
            ->check(CLI::IsMember({"single", "double"}));
        cmd->add_option("--order", order_str, "forward | reverse | shuffled[:seed]");
        cmd->add_option("--repeat", repeat, "timing repetitions (median reported)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--format", format, "text | csv | json")
            ->check(CLI::IsMember({"text", "csv", "json"}));
        cmd->add_option("--out", out_path, "write report to file instead of stdout");
        (void)sign_mode;
    };

    auto* sum_cmd = app.add_subcommand("sum", "sum a series or dataset");
    sum_cmd->add_option("--algo", algo, "summation algorithm")->required();
    add_common(sum_cmd, false);

    auto* sign_cmd = app.add_subcommand("sign", "exact or fast sign of a sum");
    sign_cmd->add_option("--algo", algo, "essa | hash | oracle")->required();
    add_common(sign_cmd, true);

    auto* cmp_cmd = app.add_subcommand("compare", "run several algorithms on one input");
    cmp_cmd->add_option("--algos", algos_csv, "comma-separated algorithm list")->required();
    add_common(cmp_cmd, false);

    auto* gen_cmd = app.add_subcommand("gen", "write a dataset file");
    bool ill_cond = false;
    double ratio = 1.0;
    std::uint64_t seed = 0;
    std::string encoding = "auto";
    gen_cmd->add_option("--series", src.series, "series to materialize");
    gen_cmd->add_option("--n", src.n, "term count")->required();
    gen_cmd->add_flag("--ill-cond", ill_cond, "generate an ill-conditioned set");
    gen_cmd->add_option("--ratio", ratio, "target condition ratio (with --ill-cond)");
    gen_cmd->add_option("--seed", seed, "generator seed (with --ill-cond)");
    gen_cmd->add_option("--point", src.point, "rosenbrock coordinates")->delimiter(',');
    gen_cmd->add_option("--out", out_path, "output path")->required();
    gen_cmd->add_option("--encoding", encoding, "text | raw | auto (by extension)")
        ->check(CLI::IsMember({"text", "raw", "auto"}));

    bool list_series = false;
    app.add_flag("--list", list_series, "list available series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list_series) {
        for (const auto& name : rsum::series_names()) std::cout << name << '\n';
        return 0;
    }

    if (app.get_subcommands().empty()) {
        std::cerr << "error: a subcommand is required (sum | sign | compare | gen)\n"
                  << "run with --help for usage\n";
        return 2;
    }

    try {
        if (gen_cmd->parsed()) {
            std::vector<double> data;
            if (ill_cond) {
                data = rsum::make_ill_conditioned({src.n, ratio, seed});
            } else {
                source_opts gsrc = src;
                data = materialize(gsrc, "double");
            }
            bool raw = encoding == "raw" ||
                       (encoding == "auto" && out_path.size() >= 4 &&
                        out_path.substr(out_path.size() - 4) == ".f64");
            if (raw)
                rsum::write_raw(out_path, data);
            else
                rsum::write_text(out_path, data);
            std::cerr << "wrote " << data.size() << " values to " << out_path << '\n';
            return 0;
        }

        order_spec ord = parse_order(order_str);
        std::vector<double> wide = materialize(src, precision);
        std::vector<rsum::report_row> rows;

        if (sum_cmd->parsed()) {
            if (std::find(sum_algos.begin(), sum_algos.end(), algo) == sum_algos.end())
                throw std::runtime_error("unknown sum algorithm: " + algo);
            auto row = run_config(algo, false, wide, precision, ord, repeat);
            row.series = source_label(src);
            rows.push_back(std::move(row));
        } else if (sign_cmd->parsed()) {
            std::string a = canonical_sign_algo(algo);
            if (std::find(sign_algos.begin(), sign_algos.end(), a) == sign_algos.end())
                throw std::runtime_error("unknown sign algorithm: " + algo);
            auto row = run_config(a, true, wide, precision, ord, repeat);
            row.series = source_label(src);
            rows.push_back(std::move(row));
        } else if (cmp_cmd->parsed()) {
            std::vector<std::string> algos;
            std::stringstream ss(algos_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) algos.push_back(tok);
            if (algos.empty()) throw std::runtime_error("--algos is empty");
            for (const auto& a : algos) {
                if (std::find(sum_algos.begin(), sum_algos.end(), a) == sum_algos.end())
                    throw std::runtime_error("unknown sum algorithm: " + a);
                auto row = run_config(a, false, wide, precision, ord, repeat);
                row.series = source_label(src);
                rows.push_back(std::move(row));
            }
            auto best = std::min_element(rows.begin(), rows.end(),
                                         [](const auto& x, const auto& y) {
                                             return x.relative_error < y.relative_error;
                                         });
            auto worst = std::max_element(rows.begin(), rows.end(),
                                          [](const auto& x, const auto& y) {
                                              return x.relative_error < y.relative_error;
                                          });
            std::cerr << "best: " << best->algorithm << " rel_err="
                      << rsum::detail::shortest(best->relative_error)
                      << "  worst: " << worst->algorithm << " rel_err="
                      << rsum::detail::shortest(worst->relative_error) << '\n';
        }

        emit(rows, format, out_path);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n'
                  << "run with --help for usage\n";
        return 2;
    }
}
