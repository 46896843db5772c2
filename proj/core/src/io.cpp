#include "riskshare/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "riskshare/errors.hpp"

namespace riskshare::io {

using nlohmann::json;

namespace {

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(std::string("config: missing numeric field '") + key +
                          "'");
    return j.at(key).get<double>();
}

}  // namespace

Weighting parse_weighting(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw ConfigError("weighting config: expected an object with 'family'");
    const std::string family = j.at("family").get<std::string>();
    if (family == "linear") return Weighting::linear();
    if (family == "prelec") return Weighting::prelec(require_number(j, "alpha"));
    if (family == "tk" || family == "tversky-kahneman")
        return Weighting::tversky_kahneman(require_number(j, "gamma"));
    if (family == "heu" || family == "hurwicz")
        return Weighting::hurwicz(require_number(j, "gamma"),
                                  require_number(j, "kappa"));
    if (family == "mixture") {
        if (!j.contains("base"))
            throw ConfigError("mixture weighting: missing 'base'");
        return Weighting::mixture(parse_weighting(j.at("base")),
                                  require_number(j, "weight"));
    }
    throw ConfigError("weighting config: unknown family '" + family + "'");
}

Economy parse_economy(const json& j) {
    if (!j.is_object()) throw ConfigError("economy config: expected an object");
    if (!j.contains("rdu") || !j.at("rdu").contains("weighting"))
        throw ConfigError("economy config: missing rdu.weighting");
    Economy econ{
        parse_weighting(j.at("rdu").at("weighting")),
        Utility::cara(require_number(j.at("rdu"), "beta")),
        {},
        {},
        0.0,
    };
    if (!j.contains("eu") || !j.at("eu").is_array() || j.at("eu").empty())
        throw ConfigError("economy config: need a nonempty 'eu' agent array");
    for (const auto& agent : j.at("eu"))
        econ.eu_agents.push_back(Utility::cara(require_number(agent, "beta")));
    econ.endowment = j.value("w", 0.0);

    if (j.contains("lambda") && j.at("lambda").is_string()) {
        const std::string mode = j.at("lambda").get<std::string>();
        if (mode != "auto_no_side_payment")
            throw ConfigError("economy config: unknown lambda mode '" + mode + "'");
        if (econ.eu_agents.size() != 2)
            throw ConfigError(
                "economy config: auto_no_side_payment needs exactly two EU agents");
        econ.lambda = no_side_payment_weights(econ.eu_agents[0].cara_beta(),
                                              econ.eu_agents[1].cara_beta());
    } else if (j.contains("lambda")) {
        econ.lambda = j.at("lambda").get<std::vector<double>>();
    } else {
        econ.lambda.assign(econ.eu_agents.size(), 1.0);
    }
    econ.validate();
    return econ;
}

json weighting_to_json(const Weighting& w) {
    json j;
    if (const auto* p = std::get_if<Weighting::Prelec>(&w.params())) {
        j["family"] = "prelec";
        j["alpha"] = p->alpha;
    } else if (const auto* t = std::get_if<Weighting::TverskyKahneman>(&w.params())) {
        j["family"] = "tk";
        j["gamma"] = t->gamma;
    } else if (const auto* h = std::get_if<Weighting::Hurwicz>(&w.params())) {
        j["family"] = "heu";
        j["gamma"] = h->gamma;
        j["kappa"] = h->kappa;
    } else if (const auto* m = std::get_if<Weighting::Mixture>(&w.params())) {
        j["family"] = "mixture";
        j["base"] = weighting_to_json(*m->base);
        j["weight"] = m->weight;
    } else if (std::holds_alternative<Weighting::Linear>(w.params())) {
        j["family"] = "linear";
    } else {
        j["family"] = "custom";
        j["label"] = w.describe();
    }
    if (w.is_conjugated()) j["conjugated"] = true;
    return j;
}

json envelope_summary(const Envelope& env) {
    json j;
    j["shape"] = shape_name(env.source_shape());
    j["kind"] = envelope_kind_name(env.kind());
    j["pstar"] = env.pstar();
    j["fi_mass"] = env.fi_mass();
    j["contact"] = env.contact_description();
    return j;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += header[i];
    }
    buffer_ += '\n';
}

std::string CsvWriter::format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw ConfigError("csv: row width mismatch");
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::add_row_raw(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw ConfigError("csv: row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("csv: cannot open '" + path + "' for writing");
    out << buffer_;
}

}  // namespace riskshare::io
