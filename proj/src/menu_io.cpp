#include "qosc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "qosc/errors.hpp"

namespace qosc::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError(fmt::format("missing numeric field '{}'", key));
    return j.at(key).get<double>();
}

ComponentShape shape_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return Uniform{};
    if (kind == "exponential") return Exponential{number(j, "rate")};
    if (kind == "gamma") return Gamma{number(j, "shape"), number(j, "rate")};
    if (kind == "weibull") return Weibull{number(j, "shape"), number(j, "rate")};
    if (kind == "truncated_normal" || kind == "normal")
        return TruncatedNormal{number(j, "mean"), number(j, "stddev")};
    throw ConfigError("unknown distribution kind: " + kind);
}

json shape_to_json(const ComponentShape& s) {
    json j;
    if (std::holds_alternative<Uniform>(s)) j["kind"] = "uniform";
    if (const auto* e = std::get_if<Exponential>(&s)) { j["kind"] = "exponential"; j["rate"] = e->rate; }
    if (const auto* g = std::get_if<Gamma>(&s)) { j["kind"] = "gamma"; j["shape"] = g->shape; j["rate"] = g->rate; }
    if (const auto* w = std::get_if<Weibull>(&s)) { j["kind"] = "weibull"; j["shape"] = w->shape; j["rate"] = w->rate; }
    if (const auto* n = std::get_if<TruncatedNormal>(&s)) { j["kind"] = "truncated_normal"; j["mean"] = n->mean; j["stddev"] = n->stddev; }
    return j;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(fmt::format("{}:{}: bad number '{}'", path.string(), line, s));
    return v;
}

}  // namespace

TypeDistribution dist_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ConfigError("distribution config must be an object");
        const auto kind = j.at("kind").get<std::string>();
        const auto& sup = j.at("support");
        if (!sup.is_array() || sup.size() != 2)
            throw ConfigError("support must be [lo, hi]");
        const double lo = sup[0].get<double>(), hi = sup[1].get<double>();
        const bool renorm = j.value("renormalize", false);
        if (kind == "empirical") {
            return TypeDistribution(
                EmpiricalPiecewise{j.at("breakpoints").get<std::vector<double>>(),
                                   j.at("densities").get<std::vector<double>>()},
                lo, hi, renorm);
        }
        if (kind == "mixture") {
            Mixture m;
            for (const auto& c : j.at("components"))
                m.components.push_back({number(c, "weight"), shape_from_json(c)});
            return TypeDistribution(std::move(m), lo, hi, renorm);
        }
        return std::visit([&](const auto& s) { return TypeDistribution(s, lo, hi, renorm); },
                          shape_from_json(j));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("distribution config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("distribution config: ") + e.what());
    }
}

json dist_to_json(const TypeDistribution& d) {
    json j;
    const auto& k = d.kind();
    if (const auto* e = std::get_if<EmpiricalPiecewise>(&k)) {
        j["kind"] = "empirical";
        j["breakpoints"] = e->breakpoints;
        j["densities"] = e->densities;
    } else if (const auto* m = std::get_if<Mixture>(&k)) {
        j["kind"] = "mixture";
        j["components"] = json::array();
        for (const auto& c : m->components) {
            json cj = shape_to_json(c.shape);
            cj["weight"] = c.weight;
            j["components"].push_back(cj);
        }
    } else {
        j = std::visit(
            [](const auto& s) -> json {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, EmpiricalPiecewise> || std::is_same_v<T, Mixture>)
                    return json{};
                else
                    return shape_to_json(ComponentShape{s});
            },
            k);
    }
    j["support"] = {d.lo(), d.hi()};
    j["renormalize"] = d.renormalized();
    return j;
}

ModelParams params_from_json(const json& j, const TypeDistribution* dist) {
    if (!j.is_object()) throw ConfigError("params must be an object");
    ModelParams p;
    p.a = number(j, "a");
    p.sigma = number(j, "sigma");
    p.q_bar = j.contains("q_bar") ? number(j, "q_bar") : number(j, "qbar");
    p.delta_lo = j.contains("delta_lo") ? number(j, "delta_lo") : (dist ? dist->lo() : 0.0);
    p.delta_hi = j.contains("delta_hi") ? number(j, "delta_hi") : (dist ? dist->hi() : 0.0);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    return p;
}

json params_to_json(const ModelParams& p) {
    return json{{"a", p.a}, {"sigma", p.sigma}, {"q_bar", p.q_bar},
                {"delta_lo", p.delta_lo}, {"delta_hi", p.delta_hi}};
}

json report_to_json(const VerificationReport& r) {
    return json{{"max_ic_regret", r.max_ic_regret},
                {"min_ir_slack", r.min_ir_slack},
                {"reputation_residual", r.reputation_residual},
                {"monotone", r.monotone},
                {"expected_profit", r.expected_profit},
                {"support_mass", r.support_mass}};
}

json menu_meta(const ContractMenu& menu) {
    json iv = json::array();
    for (const auto& p : menu.pooling_intervals)
        iv.push_back(json{{"start", p.start}, {"end", p.end}, {"level", p.level}});
    return json{{"beta", menu.beta},
                {"pooling_intervals", iv},
                {"provenance", to_string(menu.provenance)},
                {"grid_points", menu.grid.size()}};
}

void write_menu_csv(const fs::path& path, const ContractMenu& menu, bool pooled_column) {
    std::string out = pooled_column ? "delta,q,p,pooled\n" : "delta,q,p\n";
    for (std::size_t i = 0; i < menu.grid.size(); ++i) {
        out += format_double(menu.grid[i]) + ',' + format_double(menu.q[i]) + ',' +
               format_double(menu.p[i]);
        if (pooled_column) out += menu.pooled_at(menu.grid[i]) ? ",1" : ",0";
        out += '\n';
    }
    write_text(path, out);
}

fs::path meta_path_for(const fs::path& menu_csv) {
    fs::path p = menu_csv;
    p.replace_extension(".meta.json");
    return p;
}

ContractMenu read_menu_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open menu file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty menu file " + path.string());
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "delta" || header[1] != "q" || header[2] != "p")
        throw ConfigError("menu header must start with delta,q,p");
    ContractMenu menu;
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() < 3) throw ConfigError(fmt::format("{}:{}: expected 3 columns", path.string(), ln));
        menu.grid.push_back(parse_double(cells[0], path, ln));
        menu.q.push_back(parse_double(cells[1], path, ln));
        menu.p.push_back(parse_double(cells[2], path, ln));
    }
    const auto meta = meta_path_for(path);
    if (fs::exists(meta)) {
        const auto j = read_json_file(meta);
        menu.beta = j.value("beta", 0.0);
        if (j.contains("provenance"))
            menu.provenance = provenance_from_string(j.at("provenance").get<std::string>());
        if (j.contains("pooling_intervals"))
            for (const auto& iv : j.at("pooling_intervals"))
                menu.pooling_intervals.push_back({iv.at("start").get<double>(),
                                                  iv.at("end").get<double>(),
                                                  iv.at("level").get<double>()});
    }
    try {
        menu.validate();
    } catch (const DomainError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return menu;
}

std::vector<HistogramBin> read_histogram_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open histogram " + path.string());
    std::string line;
    std::getline(in, line);
    const auto header = split(line);
    if (header.size() < 2 || header[0] != "bin_center" || header[1] != "count")
        throw ConfigError("histogram header must be bin_center,count");
    std::vector<HistogramBin> bins;
    std::size_t ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() < 2) throw ConfigError(fmt::format("{}:{}: expected 2 columns", path.string(), ln));
        bins.push_back({parse_double(cells[0], path, ln), parse_double(cells[1], path, ln)});
    }
    return bins;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace qosc::io
