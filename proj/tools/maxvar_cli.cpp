// Command-line surface: exact evaluation, certified variation enclosures,
// the full verification trace, ratio search, and the discrete operator.
// All rationals are read and printed as exact "p/q" strings.

#include "maxvar/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace maxvar;

StepFunction load_step(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return step_from_json(parse_json_text(buf.str()));
}

DiscreteSignal load_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return signal_from_json(parse_json_text(buf.str()));
}

std::vector<Rational> parse_point_list(const std::string& text) {
    std::vector<Rational> pts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) pts.push_back(rat_parse(item));
    }
    return pts;
}

int run_eval(const std::string& fn, const std::string& point, const std::string& op) {
    StepFunction f = load_step(fn);
    Rational x = rat_parse(point);
    MaxEval ev;
    if (op == "centered") {
        ev = centered_max(f, x);
    } else if (op == "noncentered") {
        ev = noncentered_max(f, x);
    } else if (op.rfind("truncated:", 0) == 0) {
        ev = truncated_max(f, x, rat_parse(op.substr(10)));
    } else if (op.rfind("local:", 0) == 0) {
        ev = local_max(f, x, rat_parse(op.substr(6)));
    } else {
        throw ParseError("unknown operator '" + op + "'");
    }
    std::cout << maxeval_to_json(ev).dump(2) << "\n";
    return 0;
}

int run_variation(const std::string& fn, const std::string& op, const std::string& eps_text) {
    StepFunction f = load_step(fn);
    Rational eps = rat_parse(eps_text);
    Envelope env;
    if (op == "centered")
        env = centered_envelope(f);
    else if (op == "noncentered")
        env = noncentered_envelope(f);
    else
        throw ParseError("unknown operator '" + op + "'");
    VariationEnclosure enc = variation_enclosure(env, eps);
    Json out;
    out["lo"] = rat_str(enc.lo);
    out["hi"] = rat_str(enc.hi);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_trace(const std::string& fn, const std::string& points) {
    StepFunction f = load_step(fn);
    std::vector<Rational> pts =
        points.empty() ? default_trace_points(f) : parse_point_list(points);
    ChainReport rep = theorem_trace(f, pts);
    std::cout << report_to_json(rep).dump(2) << "\n";
    return rep.all_ok() ? 0 : 3;
}

int run_search(std::uint64_t seed, int iters, const std::string& mode, int max_pieces,
               int value_den, int break_den, const std::string& eps_text,
               const std::string& history_path) {
    SearchConfig cfg;
    cfg.seed = seed;
    cfg.iterations = iters;
    cfg.max_pieces = max_pieces;
    cfg.value_den = value_den;
    cfg.break_den = break_den;
    cfg.eps = rat_parse(eps_text);
    if (mode == "anneal")
        cfg.mode = SearchConfig::Mode::Anneal;
    else if (mode == "random")
        cfg.mode = SearchConfig::Mode::Random;
    else if (mode == "exhaustive-discrete")
        cfg.mode = SearchConfig::Mode::ExhaustiveDiscrete;
    else
        throw ParseError("unknown mode '" + mode + "'");
    SearchResult res = search_ratio(cfg);
    if (!history_path.empty()) {
        std::ofstream out(history_path);
        if (!out) throw ParseError("cannot write '" + history_path + "'");
        out << history_csv(res);
    }
    std::cout << search_result_to_json(res).dump(2) << "\n";
    return 0;
}

int run_discrete(const std::string& sn) {
    DiscreteSignal f = load_signal(sn);
    DiscreteSignal m = discrete_max(f);
    Json out;
    out["max"] = signal_to_json(m);
    out["var_signal"] = rat_str(discrete_variation(f));
    out["var_max"] = rat_str(discrete_variation(m));
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact maximal-function toolbox for rational step functions"};
    app.require_subcommand(1);

    std::string fn, point, op = "centered", eps = "1/1000", points, sn, history_path;
    std::uint64_t seed = 42;
    int iters = 100, max_pieces = 6, value_den = 8, break_den = 8;
    std::string mode = "anneal";

    auto* eval = app.add_subcommand("eval", "pointwise maximal-operator value");
    eval->add_option("--function", fn, "step function JSON file")->required();
    eval->add_option("--point", point, "evaluation point")->required();
    eval->add_option("--operator", op, "centered | noncentered | truncated:R | local:D");

    auto* var = app.add_subcommand("variation", "certified variation enclosure of Mf");
    var->add_option("--function", fn, "step function JSON file")->required();
    var->add_option("--operator", op, "centered | noncentered");
    var->add_option("--eps", eps, "enclosure width bound");

    auto* trace = app.add_subcommand("trace", "run the verification chain");
    trace->add_option("--function", fn, "step function JSON file")->required();
    trace->add_option("--points", points, "comma-separated sample points");

    auto* search = app.add_subcommand("search", "variation-ratio search");
    search->add_option("--seed", seed, "RNG seed");
    search->add_option("--iters", iters, "iterations");
    search->add_option("--mode", mode, "anneal | random | exhaustive-discrete");
    search->add_option("--max-pieces", max_pieces, "piece bound (or top support index)");
    search->add_option("--value-den", value_den, "value grid denominator bound (or top value)");
    search->add_option("--break-den", break_den, "breakpoint denominator bound");
    search->add_option("--eps", eps, "enclosure width bound");
    search->add_option("--history", history_path, "CSV history output path");

    auto* discrete = app.add_subcommand("discrete", "discrete maximal operator");
    discrete->add_option("--signal", sn, "signal JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(eval)) return run_eval(fn, point, op);
        if (app.got_subcommand(var)) return run_variation(fn, op, eps);
        if (app.got_subcommand(trace)) return run_trace(fn, points);
        if (app.got_subcommand(search))
            return run_search(seed, iters, mode, max_pieces, value_den, break_den, eps,
                              history_path);
        if (app.got_subcommand(discrete)) return run_discrete(sn);
    } catch (const InternalCheckFailed& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
