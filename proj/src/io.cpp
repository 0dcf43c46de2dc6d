#include "maxvar/io.hpp"

namespace maxvar {

namespace {

Rational rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
    if (!j.is_string()) throw ParseError("expected a rational as a \"p/q\" string");
    return rat_parse(j.get<std::string>());
}

std::string abscissa_str(const Abscissa& a) {
    switch (a.kind()) {
        case Abscissa::Kind::NegInf: return "-inf";
        case Abscissa::Kind::PosInf: return "+inf";
        case Abscissa::Kind::Finite: return rat_str(a.rational());
        default: return "";
    }
}

}  // namespace

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

Json step_to_json(const StepFunction& f) {
    Json j;
    j["breakpoints"] = Json::array();
    for (const auto& b : f.breakpoints) j["breakpoints"].push_back(rat_str(b));
    j["values"] = Json::array();
    for (const auto& v : f.values) j["values"].push_back(rat_str(v));
    return j;
}

StepFunction step_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values"))
        throw ParseError("step function needs \"breakpoints\" and \"values\"");
    std::vector<Rational> bps, vals;
    for (const auto& b : j.at("breakpoints")) bps.push_back(rat_from_json(b));
    for (const auto& v : j.at("values")) vals.push_back(rat_from_json(v));
    return make_step(std::move(bps), std::move(vals));
}

Json signal_to_json(const DiscreteSignal& s) {
    Json j;
    j["support"] = Json::object();
    for (std::size_t i = 0; i < s.vals.size(); ++i)
        j["support"][std::to_string(s.lo + static_cast<long>(i))] = rat_str(s.vals[i]);
    j["left"] = rat_str(s.left);
    j["right"] = rat_str(s.right);
    return j;
}

DiscreteSignal signal_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("support") || !j.contains("left") || !j.contains("right"))
        throw ParseError("signal needs \"support\", \"left\" and \"right\"");
    std::map<long, Rational> support;
    for (const auto& [key, value] : j.at("support").items()) {
        std::size_t pos = 0;
        long n = 0;
        try {
            n = std::stol(key, &pos);
        } catch (const std::exception&) {
            throw ParseError("bad support index: '" + key + "'");
        }
        if (pos != key.size()) throw ParseError("bad support index: '" + key + "'");
        support[n] = rat_from_json(value);
    }
    return make_discrete(support, rat_from_json(j.at("left")), rat_from_json(j.at("right")));
}

Json maxeval_to_json(const MaxEval& ev) {
    auto cand = [](const RadiusCandidate& c) {
        Json j;
        switch (c.kind) {
            case RadiusCandidate::Kind::Kink: j["kind"] = "kink"; break;
            case RadiusCandidate::Kind::ZeroLimit: j["kind"] = "zero-limit"; break;
            default: j["kind"] = "infinity-limit"; break;
        }
        if (c.kind == RadiusCandidate::Kind::Kink) j["radius"] = rat_str(c.radius);
        j["value"] = rat_str(c.value);
        if (c.window) j["window"] = {rat_str(c.window->first), rat_str(c.window->second)};
        return j;
    };
    Json j;
    j["value"] = rat_str(ev.value);
    j["achieved_by"] = cand(ev.achieved_by);
    j["candidates"] = Json::array();
    for (const auto& c : ev.all_candidates) j["candidates"].push_back(cand(c));
    return j;
}

Json envelope_to_json(const Envelope& env) {
    Json pieces = Json::array();
    for (const auto& pc : env.pieces) {
        Json j;
        auto endpoint = [](const Abscissa& a) -> Json {
            if (a.kind() == Abscissa::Kind::Root) {
                const QuadRoot& r = a.root();
                Json q;
                q["quadratic"] = {r.a.str(), r.b.str(), r.c.str()};
                q["isolating"] = {rat_str(r.lo), rat_str(r.hi)};
                q["side"] = r.side;
                return q;
            }
            return abscissa_str(a);
        };
        j["lo"] = endpoint(pc.lo);
        j["hi"] = endpoint(pc.hi);
        j["coefficients"] = {rat_str(pc.m.p), rat_str(pc.m.q), rat_str(pc.m.s), rat_str(pc.m.t)};
        j["source"] = pc.source;
        pieces.push_back(std::move(j));
    }
    Json boundaries = Json::array();
    for (const auto& eb : env.boundaries) {
        if (!eb.has_point_data) continue;
        Json j;
        j["at"] = abscissa_str(eb.at);
        j["left_limit"] = rat_str(eb.left_limit);
        j["point_value"] = rat_str(eb.point_value);
        j["right_limit"] = rat_str(eb.right_limit);
        boundaries.push_back(std::move(j));
    }
    Json out;
    out["pieces"] = std::move(pieces);
    out["boundaries"] = std::move(boundaries);
    return out;
}

Json report_to_json(const ChainReport& rep) {
    Json stages = Json::array();
    for (const auto& s : rep.stages) {
        Json j;
        j["stage"] = s.stage;
        j["required"] = rat_str(s.required);
        j["achieved"] = rat_str(s.achieved);
        j["margin"] = rat_str(s.margin);
        j["ok"] = s.ok;
        if (!s.note.empty()) j["note"] = s.note;
        stages.push_back(std::move(j));
    }
    Json out;
    out["stages"] = std::move(stages);
    out["var_f"] = rat_str(rep.var_f);
    out["sum_abs_dM"] = rat_str(rep.sum_abs_dM);
    out["ok"] = rep.all_ok();
    if (rep.var_f > 0) out["ratio"] = rat_str(rep.sum_abs_dM / rep.var_f);
    return out;
}

Json search_result_to_json(const SearchResult& res) {
    Json out;
    out["best_ratio_lo"] = rat_str(res.best_ratio_lo);
    if (res.argmax) out["argmax"] = step_to_json(*res.argmax);
    if (res.argmax_signal) out["argmax_signal"] = signal_to_json(*res.argmax_signal);
    out["evaluated"] = res.evaluated;
    out["skipped"] = res.skipped;
    out["iterations"] = res.history.empty() ? 0 : res.history.back().iteration;
    if (!res.history.empty())
        out["final_ratio_lo"] = rat_str(res.history.back().ratio_lo);
    return out;
}

}  // namespace maxvar
