// JSON ingestion of model/fibration/polytope specs, canonical report
// emission (fixed key order, 17 significant digits), and CSV export of
// Bohr-Sommerfeld records.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gq/model.hpp"
#include "gq/quantisation.hpp"

namespace gq {

struct parse_error : error {
    parse_error(const std::string& path, const std::string& reason)
        : error("parse error at " + path + ": " + reason), json_path(path) {}
    std::string json_path;
};

/// Full run configuration; the seed determines every random sample drawn.
struct RunConfig {
    NumericsConfig numerics;
    uint64_t seed = 42;
    int samples = 100;
    DiskConvention disk_convention = DiskConvention::TransportOracle;
    std::string output;
    bool csv = false;
};

struct ParsedSpec {
    FibrationDescriptor descriptor;
    Window window;
};

namespace detail {

using nlohmann::json;

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(path + "/" + key, "missing required field");
    return *it;
}

inline int require_int(const json& j, const std::string& key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number_integer()) throw parse_error(path + "/" + key, "expected an integer");
    return v.get<int>();
}

inline ModelSpec parse_model_spec(const json& j, const std::string& path) {
    if (!j.is_object()) throw parse_error(path, "expected an object");
    const std::string kind = require_field(j, "kind", path).get<std::string>();
    if (kind == "cylinder") return ModelSpec::cylinder();
    if (kind == "disk") return ModelSpec::disk();
    if (kind == "focus_focus") return ModelSpec::focus_focus();
    if (kind == "linear") return ModelSpec::linear(require_int(j, "n", path));
    if (kind == "liouville" || kind == "elliptic") {
        const int n = require_int(j, "n", path);
        const int k = require_int(j, "k", path);
        if (k < 0 || k > n || n < 1)
            throw parse_error(path, "invalid (n,k) = (" + std::to_string(n) + "," + std::to_string(k) +
                                        "): need 1 <= n and 0 <= k <= n");
        return kind == "liouville" ? ModelSpec::liouville(n, k) : ModelSpec::elliptic(n, k);
    }
    if (kind == "product") {
        return ModelSpec::product(parse_model_spec(require_field(j, "left", path), path + "/left"),
                                  parse_model_spec(require_field(j, "right", path), path + "/right"));
    }
    throw parse_error(path + "/kind", "unknown model kind '" + kind + "'");
}

inline Polytope parse_polytope(const json& j, const std::string& path) {
    const json& hs = require_field(j, "halfspaces", path);
    if (!hs.is_array() || hs.empty()) throw parse_error(path + "/halfspaces", "expected a nonempty array");
    Polytope poly;
    poly.dim = static_cast<int>(hs[0].size()) - 1;
    if (poly.dim < 1) throw parse_error(path + "/halfspaces/0", "row must be [normal..., offset]");
    for (size_t r = 0; r < hs.size(); ++r) {
        const std::string rp = path + "/halfspaces/" + std::to_string(r);
        if (!hs[r].is_array() || static_cast<int>(hs[r].size()) != poly.dim + 1)
            throw parse_error(rp, "row length must be dim + 1");
        Halfspace h;
        for (int c = 0; c < poly.dim; ++c) {
            if (!hs[r][c].is_number_integer())
                throw parse_error(rp + "/" + std::to_string(c), "normal entries must be integers");
            h.normal.push_back(hs[r][c].get<long long>());
        }
        if (!hs[r][poly.dim].is_number()) throw parse_error(rp, "offset must be a number");
        h.offset = hs[r][poly.dim].get<double>();
        poly.halfspaces.push_back(std::move(h));
    }
    poly.validate();
    return poly;
}

inline Window parse_window(const json& j, const std::string& path, const FibrationDescriptor& desc) {
    Window w;
    auto interval_of = [&](const json& v, const std::string& p) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw parse_error(p, "expected [lo, hi]");
        return Interval{v[0].get<double>(), v[1].get<double>()};
    };
    if (j.is_object()) {
        // Named single-interval shorthands: x (cylinder), F (disk), f2 (focus-focus).
        if (j.contains("x")) {
            w.comp = {interval_of(j["x"], path + "/x")};
        } else if (j.contains("F")) {
            w.comp = {interval_of(j["F"], path + "/F")};
        } else if (j.contains("f2")) {
            w.comp = {std::nullopt, interval_of(j["f2"], path + "/f2")};
        } else {
            throw parse_error(path, "expected one of the keys x, F, f2 or an array of intervals");
        }
        return w;
    }
    if (!j.is_array()) throw parse_error(path, "expected an object or array window");
    for (size_t c = 0; c < j.size(); ++c) {
        if (j[c].is_null()) w.comp.push_back(std::nullopt);
        else w.comp.push_back(interval_of(j[c], path + "/" + std::to_string(c)));
    }
    (void)desc;
    return w;
}

inline void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Parses a spec document into a fibration descriptor plus window. Errors
/// carry the JSON path of the offending field.
inline ParsedSpec parse_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error("/", e.what());
    }
    if (!j.is_object()) throw parse_error("/", "top level must be an object");

    ParsedSpec out;
    const std::string kind = detail::require_field(j, "kind", "").get<std::string>();

    if (kind == "toric_polytope" || kind == "almost_toric4") {
        out.descriptor.base = kind == "toric_polytope" ? FibrationDescriptor::Base::ToricPolytope
                                                       : FibrationDescriptor::Base::AlmostToric4;
        out.descriptor.polytope = detail::parse_polytope(j, "");
        out.descriptor.compact = j.value("compact", true);
        if (kind == "almost_toric4") {
            if (j.contains("ff_points")) {
                const auto& marks = j["ff_points"];
                if (!marks.is_array()) throw parse_error("/ff_points", "expected an array");
                for (size_t m = 0; m < marks.size(); ++m) {
                    const std::string mp = "/ff_points/" + std::to_string(m);
                    FFMark mark;
                    const auto& pt = detail::require_field(marks[m], "point", mp);
                    if (!pt.is_array() || pt.size() != 2) throw parse_error(mp + "/point", "expected [a, b]");
                    mark.point = {pt[0].get<double>(), pt[1].get<double>()};
                    mark.multiplicity = marks[m].value("multiplicity", 1);
                    out.descriptor.ff_marks.push_back(std::move(mark));
                }
            }
        }
    } else if (kind == "lagrangian_bundle") {
        out.descriptor.base = FibrationDescriptor::Base::LagrangianBundle;
        out.descriptor.bundle_rank_k = detail::require_int(j, "k", "");
        out.descriptor.bundle_base_dim = detail::require_int(j, "base_dim", "");
        out.descriptor.compact = j.value("compact", false);
    } else {
        out.descriptor.base = FibrationDescriptor::Base::ModelChart;
        out.descriptor.model = detail::parse_model_spec(j, "");
        make_model(*out.descriptor.model);  // surfaces invalid (n,k) and chartless kinds at parse time
    }

    out.descriptor.zero_fibre_bs = j.value("zero_fibre_bs", true);
    if (j.contains("lattice_offset")) {
        for (const auto& v : j["lattice_offset"]) out.descriptor.lattice_offset.push_back(v.get<double>());
        if (!out.descriptor.zero_fibre_bs && out.descriptor.lattice_offset.empty())
            throw parse_error("/lattice_offset", "empty offset with zero_fibre_bs = false");
    } else if (!out.descriptor.zero_fibre_bs) {
        throw parse_error("/zero_fibre_bs",
                          "zero_fibre_bs = false requires an explicit lattice_offset; it is never guessed");
    }
    if (j.contains("window")) out.window = detail::parse_window(j["window"], "/window", out.descriptor);
    out.descriptor.validate();
    return out;
}

inline const char* regularity_name(BSFibreRecord::Regularity r) {
    switch (r) {
        case BSFibreRecord::Regularity::Regular: return "regular";
        case BSFibreRecord::Regularity::EllipticSingular: return "elliptic_singular";
        case BSFibreRecord::Regularity::FocusFocusSingular: return "focus_focus_singular";
    }
    return "?";
}

/// Canonical report serialisation: insertion-ordered keys, reals at 17
/// significant digits, no whitespace variance. parse/emit round-trips to
/// identical bytes.
inline std::string emit_report(const QuantisationReport& rep, const RunConfig& cfg) {
    using detail::append_escaped;
    using detail::format_real;
    std::string s = "{\"schema_version\":1,\"per_degree\":{";
    bool first = true;
    for (const auto& [d, e] : rep.per_degree) {
        if (!first) s += ',';
        first = false;
        s += '"' + std::to_string(d) + "\":{";
        bool inner_first = true;
        auto sep = [&] {
            if (!inner_first) s += ',';
            inner_first = false;
        };
        if (e.finite) {
            sep();
            s += "\"finite\":" + std::to_string(*e.finite);
        }
        if (e.function_space) {
            sep();
            s += "\"function_space\":{\"base_dim\":" + std::to_string(e.function_space->base_dim) +
                 ",\"copies\":" + std::to_string(e.function_space->copies) + "}";
        }
        if (!e.unresolved.empty()) {
            sep();
            s += "\"unresolved\":[";
            for (size_t i = 0; i < e.unresolved.size(); ++i) {
                if (i) s += ',';
                append_escaped(s, e.unresolved[i]);
            }
            s += ']';
        }
        if (e.is_zero()) {
            sep();
            s += "\"zero\":true";
        }
        s += '}';
    }
    s += "},\"bs_fibres\":[";
    for (size_t i = 0; i < rep.bs_fibres.size(); ++i) {
        const auto& f = rep.bs_fibres[i];
        if (i) s += ',';
        s += "{\"label\":[";
        for (size_t c = 0; c < f.label.size(); ++c) {
            if (c) s += ',';
            s += f.label[c] ? format_real(*f.label[c]) : "null";
        }
        s += "],\"regularity\":";
        append_escaped(s, regularity_name(f.regularity));
        if (f.regularity == BSFibreRecord::Regularity::EllipticSingular)
            s += ",\"singular_rank\":" + std::to_string(f.singular_rank);
        s += ",\"fibre_dim\":" + std::to_string(f.fibre_dim) + "}";
    }
    s += "],\"convention_notes\":[";
    for (size_t i = 0; i < rep.convention_notes.size(); ++i) {
        if (i) s += ',';
        append_escaped(s, rep.convention_notes[i]);
    }
    s += "],\"config_echo\":{\"seed\":" + std::to_string(cfg.seed) +
         ",\"samples\":" + std::to_string(cfg.samples) + ",\"fd_step\":" + format_real(cfg.numerics.fd_step) +
         ",\"quadrature_steps\":" + std::to_string(cfg.numerics.quadrature_steps) +
         ",\"ode_tol\":" + format_real(cfg.numerics.ode_tol) +
         ",\"eq_tol\":" + format_real(cfg.numerics.eq_tol) + ",\"disk_convention\":";
    append_escaped(s, cfg.disk_convention == DiskConvention::TransportOracle ? "transport" : "paper_printed");
    s += "}}";
    return s;
}

/// Parses a report back; together with emit_report this is the byte-identical
/// round trip.
inline QuantisationReport parse_report(const std::string& text, RunConfig* cfg_out = nullptr) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error("/", e.what());
    }
    QuantisationReport rep;
    for (const auto& [key, e] : detail::require_field(j, "per_degree", "").items()) {
        DegreeEntry entry;
        if (e.contains("finite")) entry.finite = e["finite"].get<long long>();
        if (e.contains("function_space"))
            entry.function_space = FunctionSpaceEntry{e["function_space"]["base_dim"].get<int>(),
                                                      e["function_space"]["copies"].get<long long>()};
        if (e.contains("unresolved"))
            for (const auto& u : e["unresolved"]) entry.unresolved.push_back(u.get<std::string>());
        rep.per_degree[std::stoi(key)] = std::move(entry);
    }
    for (const auto& f : detail::require_field(j, "bs_fibres", "")) {
        BSFibreRecord rec;
        for (const auto& v : f["label"]) {
            if (v.is_null()) rec.label.push_back(std::nullopt);
            else rec.label.push_back(v.get<double>());
        }
        const std::string reg = f["regularity"].get<std::string>();
        rec.regularity = reg == "regular" ? BSFibreRecord::Regularity::Regular
                         : reg == "elliptic_singular" ? BSFibreRecord::Regularity::EllipticSingular
                                                      : BSFibreRecord::Regularity::FocusFocusSingular;
        rec.singular_rank = f.value("singular_rank", 0);
        rec.fibre_dim = f["fibre_dim"].get<int>();
        rep.bs_fibres.push_back(std::move(rec));
    }
    for (const auto& n : detail::require_field(j, "convention_notes", ""))
        rep.convention_notes.push_back(n.get<std::string>());
    if (cfg_out && j.contains("config_echo")) {
        const auto& c = j["config_echo"];
        cfg_out->seed = c["seed"].get<uint64_t>();
        cfg_out->samples = c["samples"].get<int>();
        cfg_out->numerics.fd_step = c["fd_step"].get<double>();
        cfg_out->numerics.quadrature_steps = c["quadrature_steps"].get<int>();
        cfg_out->numerics.ode_tol = c["ode_tol"].get<double>();
        cfg_out->numerics.eq_tol = c["eq_tol"].get<double>();
        cfg_out->disk_convention = c["disk_convention"].get<std::string>() == "transport"
                                       ? DiskConvention::TransportOracle
                                       : DiskConvention::PaperPrinted;
    }
    return rep;
}

/// CSV of Bohr-Sommerfeld records: label components (free slots print as
/// "free"), regularity, fibre dimension.
inline std::string bs_to_csv(const std::vector<BSFibreRecord>& records) {
    std::string s;
    for (const auto& r : records) {
        for (const auto& c : r.label) {
            s += c ? detail::format_real(*c) : "free";
            s += ',';
        }
        s += regularity_name(r.regularity);
        s += ',' + std::to_string(r.fibre_dim) + '\n';
    }
    return s;
}

struct QuantiseRun {
    QuantisationReport report;
    std::string json;
    std::string csv;
};

/// Dispatches the descriptor and packages the canonical artifacts.
inline QuantiseRun run_quantise(const ParsedSpec& spec, const RunConfig& cfg) {
    QuantiseRun out;
    out.report = quantise(spec.descriptor, spec.window, cfg.disk_convention, cfg.seed);
    out.json = emit_report(out.report, cfg);
    if (cfg.csv) out.csv = bs_to_csv(out.report.bs_fibres);
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path);
    out << content;
}

}  // namespace gq
