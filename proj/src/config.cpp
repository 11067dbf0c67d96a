#include "frods/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace frods {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct RawConfig {
    // section -> key -> value, plus insertion order for diagnostics
    std::map<std::string, std::map<std::string, std::string>> sections;
};

RawConfig parse_raw(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        raw.sections[section][key] = value;
    }
    return raw;
}

class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& section, const std::string& key) const {
        auto s = raw_.sections.find(section);
        return s != raw_.sections.end() && s->second.count(key) > 0;
    }

    std::string str(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        auto s = raw_.sections.find(section);
        if (s == raw_.sections.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double num(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = str(section, key, "");
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("trailing characters");
            return x;
        } catch (const std::exception&) {
            throw ConfigError(section + "." + key + ": not a number: '" + v + "'");
        }
    }

    int integer(const std::string& section, const std::string& key, int fallback) const {
        const double x = num(section, key, fallback);
        if (x != std::floor(x))
            throw ConfigError(section + "." + key + ": expected an integer");
        return static_cast<int>(x);
    }

private:
    const RawConfig& raw_;
};

// Matrix syntax: rows separated by ';', entries '[re, im]' separated by ','.
// Example 2x2 identity: [1,0],[0,0] ; [0,0],[1,0]
ComplexMatrix parse_matrix(const std::string& field, const std::string& text, int dim) {
    std::vector<std::vector<cd>> rows;
    std::istringstream rows_in(text);
    std::string row;
    while (std::getline(rows_in, row, ';')) {
        row = trim(row);
        if (row.empty()) continue;
        std::vector<cd> entries;
        std::size_t pos = 0;
        while (pos < row.size()) {
            const std::size_t open = row.find('[', pos);
            if (open == std::string::npos) break;
            const std::size_t close = row.find(']', open);
            if (close == std::string::npos)
                throw ConfigError(field + ": unterminated [re,im] pair");
            const std::string pair = row.substr(open + 1, close - open - 1);
            const std::size_t comma = pair.find(',');
            if (comma == std::string::npos)
                throw ConfigError(field + ": entry must be [re,im]");
            try {
                entries.emplace_back(std::stod(trim(pair.substr(0, comma))),
                                     std::stod(trim(pair.substr(comma + 1))));
            } catch (const std::exception&) {
                throw ConfigError(field + ": bad number in entry '" + pair + "'");
            }
            pos = close + 1;
        }
        if (!entries.empty()) rows.push_back(std::move(entries));
    }
    if (static_cast<int>(rows.size()) != dim)
        throw ConfigError(field + ": expected " + std::to_string(dim) + " rows, got " +
                          std::to_string(rows.size()));
    ComplexMatrix m(dim);
    for (int r = 0; r < dim; ++r) {
        if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != dim)
            throw ConfigError(field + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(rows[static_cast<std::size_t>(r)].size()) +
                              " entries, expected " + std::to_string(dim));
        for (int c = 0; c < dim; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return m;
}

std::string format_matrix(const ComplexMatrix& m) {
    std::ostringstream out;
    out.precision(17);
    for (int r = 0; r < m.dim(); ++r) {
        if (r) out << " ; ";
        for (int c = 0; c < m.dim(); ++c) {
            if (c) out << ", ";
            out << '[' << m(r, c).real() << ',' << m(r, c).imag() << ']';
        }
    }
    return out.str();
}

std::string rho0_name(Rho0Kind k) {
    switch (k) {
        case Rho0Kind::First: return "first";
        case Rho0Kind::Symmetric: return "symmetric";
        case Rho0Kind::Mixed: return "mixed";
        case Rho0Kind::Explicit: return "explicit";
    }
    return "first";
}

Rho0Kind parse_rho0(const std::string& v) {
    if (v == "first") return Rho0Kind::First;
    if (v == "symmetric") return Rho0Kind::Symmetric;
    if (v == "mixed") return Rho0Kind::Mixed;
    if (v == "explicit") return Rho0Kind::Explicit;
    throw ConfigError("model.rho0: unknown selector '" + v +
                      "' (expected first|symmetric|mixed|explicit)");
}

} // namespace

SystemModel RunConfig::build_model() const {
    SystemModel m;
    if (model.kind == "spin_boson") {
        m = spin_boson(model.epsilon, model.delta);
    } else if (model.kind == "multilevel") {
        m = multilevel(model.m, model.omega);
    } else {
        m.kind = ModelKind::Custom;
        m.dim = model.h_s->dim();
        m.h_s = *model.h_s;
        m.w_s = *model.w_s;
        m.rho0 = ComplexMatrix(m.dim); // overwritten below
    }
    const int dim = m.dim;
    switch (model.rho0) {
        case Rho0Kind::First: {
            ComplexMatrix r(dim);
            r(0, 0) = 1.0;
            m.rho0 = r;
            break;
        }
        case Rho0Kind::Symmetric: {
            ComplexMatrix r(dim);
            r(0, 0) = 0.5;
            r(dim - 1, dim - 1) += 0.5;
            m.rho0 = r;
            break;
        }
        case Rho0Kind::Mixed: {
            ComplexMatrix r(dim);
            for (int i = 0; i < dim; ++i) r(i, i) = 1.0 / dim;
            m.rho0 = r;
            break;
        }
        case Rho0Kind::Explicit:
            m.rho0 = *model.rho0_matrix;
            break;
    }
    m.validate();
    return m;
}

void RunConfig::validate() const {
    std::vector<std::string> errors;
    auto err = [&](const std::string& e) { errors.push_back(e); };

    if (model.kind != "spin_boson" && model.kind != "multilevel" && model.kind != "custom")
        err("model.kind: must be spin_boson, multilevel or custom");
    if (model.kind == "multilevel" && model.m < 2) err("model.m: must be >= 2");
    if (model.kind == "custom") {
        if (!model.h_s || !model.w_s) err("model.h_s/model.w_s: required for custom models");
        else if (model.h_s->dim() != model.w_s->dim())
            err("model.w_s: dimension differs from model.h_s");
        if (model.rho0 == Rho0Kind::Explicit && !model.rho0_matrix)
            err("model.rho0_matrix: required when model.rho0 = explicit");
    }
    try {
        bath.validate();
    } catch (const std::exception& e) {
        err(e.what());
    }
    if (!(numerics.dt > 0.0)) err("numerics.dt: must be > 0");
    if (numerics.n_steps < 1) err("numerics.n_steps: must be >= 1");
    if (numerics.order != 1 && numerics.order != 2) err("numerics.order: must be 1 or 2");
    if (numerics.k_max < 0) err("numerics.k_max: must be >= 0");
    if (numerics.d_max < 0) err("numerics.d_max: must be >= 0");
    if (numerics.k_max > 0 && numerics.d_max > 2 * numerics.k_max + 1)
        err("numerics.d_max: must be <= 2*k_max + 1 when k_max > 0");
    if (output.path.empty()) err("output.path: must not be empty");
    for (const auto& obs : output.observables) {
        if (obs != "sigma_z" && obs != "populations")
            err("output.observables: unknown observable '" + obs + "'");
        if (obs == "sigma_z") {
            const bool two_level = model.kind == "spin_boson" ||
                                   (model.kind == "multilevel" && model.m == 2) ||
                                   (model.kind == "custom" && model.h_s && model.h_s->dim() == 2);
            if (!two_level) err("output.observables: sigma_z requires a two-level model");
        }
    }
    if (errors.empty()) {
        try {
            build_model();
        } catch (const std::exception& e) {
            err(e.what());
        }
    }
    if (!errors.empty()) {
        std::ostringstream msg;
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (i) msg << "\n";
            msg << errors[i];
        }
        throw ConfigError(msg.str());
    }
}

RunConfig parse_config(const std::string& text) {
    const RawConfig raw = parse_raw(text);
    const Reader r(raw);
    RunConfig cfg;

    cfg.model.kind = r.str("model", "kind", cfg.model.kind);
    cfg.model.epsilon = r.num("model", "epsilon", cfg.model.epsilon);
    cfg.model.delta = r.num("model", "delta", cfg.model.delta);
    cfg.model.m = r.integer("model", "m", cfg.model.m);
    cfg.model.omega = r.num("model", "omega", cfg.model.omega);
    cfg.model.rho0 = parse_rho0(r.str("model", "rho0", "first"));
    if (cfg.model.kind == "custom") {
        const int dim = r.integer("model", "dim", 0);
        if (dim < 1) throw ConfigError("model.dim: required (>= 1) for custom models");
        if (r.has("model", "h_s"))
            cfg.model.h_s = parse_matrix("model.h_s", r.str("model", "h_s", ""), dim);
        if (r.has("model", "w_s"))
            cfg.model.w_s = parse_matrix("model.w_s", r.str("model", "w_s", ""), dim);
        if (r.has("model", "rho0_matrix"))
            cfg.model.rho0_matrix =
                parse_matrix("model.rho0_matrix", r.str("model", "rho0_matrix", ""), dim);
    }

    cfg.bath.xi = r.num("bath", "xi", cfg.bath.xi);
    cfg.bath.omega_c = r.num("bath", "omega_c", cfg.bath.omega_c);
    cfg.bath.beta = r.num("bath", "beta", cfg.bath.beta);
    cfg.bath.n_modes = r.integer("bath", "n_modes", cfg.bath.n_modes);
    cfg.bath.omega_max = r.num("bath", "omega_max", 10.0 * cfg.bath.omega_c);

    cfg.numerics.dt = r.num("numerics", "dt", cfg.numerics.dt);
    cfg.numerics.n_steps = r.integer("numerics", "n_steps", cfg.numerics.n_steps);
    cfg.numerics.order = r.integer("numerics", "order", cfg.numerics.order);
    cfg.numerics.k_max = r.integer("numerics", "k_max", cfg.numerics.k_max);
    cfg.numerics.d_max = r.integer("numerics", "d_max", cfg.numerics.d_max);

    cfg.output.path = r.str("output", "path", cfg.output.path);
    if (r.has("output", "observables")) {
        cfg.output.observables.clear();
        std::istringstream in(r.str("output", "observables", ""));
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.output.observables.push_back(item);
        }
    }

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[model]\n";
    out << "kind = " << cfg.model.kind << "\n";
    if (cfg.model.kind == "spin_boson") {
        out << "epsilon = " << cfg.model.epsilon << "\n";
        out << "delta = " << cfg.model.delta << "\n";
    } else if (cfg.model.kind == "multilevel") {
        out << "m = " << cfg.model.m << "\n";
        out << "omega = " << cfg.model.omega << "\n";
    } else {
        out << "dim = " << cfg.model.h_s->dim() << "\n";
        out << "h_s = " << format_matrix(*cfg.model.h_s) << "\n";
        out << "w_s = " << format_matrix(*cfg.model.w_s) << "\n";
        if (cfg.model.rho0_matrix)
            out << "rho0_matrix = " << format_matrix(*cfg.model.rho0_matrix) << "\n";
    }
    out << "rho0 = " << rho0_name(cfg.model.rho0) << "\n";
    out << "\n[bath]\n";
    out << "xi = " << cfg.bath.xi << "\n";
    out << "omega_c = " << cfg.bath.omega_c << "\n";
    out << "beta = " << cfg.bath.beta << "\n";
    out << "n_modes = " << cfg.bath.n_modes << "\n";
    out << "omega_max = " << cfg.bath.omega_max << "\n";
    out << "\n[numerics]\n";
    out << "dt = " << cfg.numerics.dt << "\n";
    out << "n_steps = " << cfg.numerics.n_steps << "\n";
    out << "order = " << cfg.numerics.order << "\n";
    out << "k_max = " << cfg.numerics.k_max << "\n";
    out << "d_max = " << cfg.numerics.d_max << "\n";
    out << "\n[output]\n";
    out << "path = " << cfg.output.path << "\n";
    out << "observables = ";
    for (std::size_t i = 0; i < cfg.output.observables.size(); ++i) {
        if (i) out << ", ";
        out << cfg.output.observables[i];
    }
    out << "\n";
    return out.str();
}

} // namespace frods
