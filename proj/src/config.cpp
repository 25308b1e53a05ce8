#include "crowtune/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace crowtune {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

class Reader {
public:
    explicit Reader(const KeyValueFile& file) : file_(file) {}

    // Returns the entry under the canonical key or any of its aliases.
    const KeyValueFile::Entry* find(const std::string& key, std::initializer_list<const char*> aliases = {}) {
        const KeyValueFile::Entry* hit = nullptr;
        std::string hit_key;
        auto probe = [&](const std::string& k) {
            const auto it = file_.entries().find(k);
            if (it == file_.entries().end()) return;
            used_.push_back(k);
            if (hit != nullptr) {
                throw ConfigError(fmt::format("{}:{}: '{}' repeats '{}'", file_.origin(), it->second.line, k, hit_key));
            }
            hit = &it->second;
            hit_key = k;
        };
        probe(key);
        for (const char* a : aliases) probe(a);
        return hit;
    }

    [[noreturn]] void fail(const KeyValueFile::Entry& e, const std::string& key, const std::string& what) const {
        throw ConfigError(fmt::format("{}:{}: field '{}': {}", file_.origin(), e.line, key, what));
    }

    template <class T>
    void get(const std::string& key, T& out, std::initializer_list<const char*> aliases = {}) {
        const auto* e = find(key, aliases);
        if (e == nullptr) return;
        out = convert<T>(*e, key);
    }

    template <class T>
    T convert(const KeyValueFile::Entry& e, const std::string& key) const {
        std::istringstream ss(e.value);
        T v{};
        if constexpr (std::is_same_v<T, std::string>) {
            return e.value;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
            if (e.value == "false" || e.value == "0" || e.value == "no") return false;
            fail(e, key, "expected true/false");
        } else {
            if constexpr (std::is_unsigned_v<T>) {
                if (!e.value.empty() && e.value.front() == '-') fail(e, key, "expected a non-negative integer");
            }
            ss >> v;
            if (!ss || !(ss >> std::ws).eof()) fail(e, key, fmt::format("cannot parse '{}'", e.value));
            return v;
        }
    }

    void reject_unknown() const {
        for (const auto& [k, e] : file_.entries()) {
            if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
                throw ConfigError(fmt::format("{}:{}: unknown field '{}'", file_.origin(), e.line, k));
            }
        }
    }

    void mark_used(const std::string& k) { used_.push_back(k); }

private:
    const KeyValueFile& file_;
    std::vector<std::string> used_;
};

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
    KeyValueFile f;
    f.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const auto t = trim(std::string_view(line).substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, lineno));
        }
        const auto key = trim(std::string_view(t).substr(0, eq));
        const auto value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, lineno));
        if (f.entries_.count(key)) throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", origin, lineno, key));
        f.entries_[key] = {value, lineno};
    }
    return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

ParameterSpace RunConfig::space() const {
    if (!custom_space.empty()) return ParameterSpace(custom_space);
    return preset_space(recon);
}

RunConfig RunConfig::from_file(const KeyValueFile& file, const std::filesystem::path& base_dir) {
    RunConfig c;
    Reader r(file);

    r.get("name", c.name, {"experiment"});
    std::string out_dir;
    r.get("output_dir", out_dir, {"output.dir"});
    if (!out_dir.empty()) c.output_dir = out_dir;
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;

    auto parse_enum = [&](const std::string& key, std::initializer_list<const char*> aliases, auto parser,
                          auto& out) {
        if (const auto* e = r.find(key, aliases)) {
            const auto v = parser(e->value);
            if (!v) r.fail(*e, key, fmt::format("unknown value '{}'", e->value));
            out = *v;
        }
    };

    parse_enum("phantom.kind", {}, parse_phantom_kind, c.phantom.kind);
    r.get("phantom.size", c.phantom.n, {"geometry.n"});
    if (const auto* e = r.find("phantom.intensity")) c.phantom.intensity = r.convert<double>(*e, "phantom.intensity");
    r.get("phantom.seed", c.phantom.seed);
    r.get("phantom.insert", c.phantom.insert);
    parse_enum("noise.model", {"phantom.noise"}, parse_noise_kind, c.phantom.noise.kind);
    r.get("noise.sigma", c.phantom.noise.sigma, {"phantom.sigma"});
    r.get("noise.i0", c.phantom.noise.i0, {"phantom.i0"});
    r.get("noise.seed", c.noise_seed);

    r.get("geometry.n_angles", c.n_angles);
    r.get("geometry.n_detectors", c.n_detectors);
    r.get("geometry.keep_fraction", c.keep_fraction);

    parse_enum("recon.algorithm", {}, parse_recon_algorithm, c.recon);
    r.get("recon.rho", c.rho, {"rho"});

    r.get("fitness.eta", c.fitness.eta, {"eta"});
    r.get("fitness.xi", c.fitness.xi, {"xi"});
    r.get("fitness.gamma", c.fitness.gamma, {"gamma"});

    auto& o = c.optimizer;
    parse_enum("optimizer.algorithm", {"algorithm"}, parse_optimizer_algorithm, c.algorithm);
    parse_enum("optimizer.init", {"init"}, parse_init_scheme, c.init);
    r.get("optimizer.population", o.population, {"population"});
    r.get("optimizer.iterations", o.iterations, {"iterations"});
    r.get("optimizer.flight_length", o.flight_length, {"flight_length"});
    r.get("optimizer.ap0", o.ap0, {"ap0"});
    if (const auto* e = r.find("optimizer.ap_inc", {"ap_inc"})) o.ap_inc = r.convert<double>(*e, "optimizer.ap_inc");
    r.get("optimizer.kappa0", o.kappa0, {"kappa0"});
    r.get("optimizer.omega_inc", o.omega_inc, {"omega_inc"});
    r.get("optimizer.k0", o.k0, {"k0"});
    r.get("optimizer.weight_floor", o.weight_floor, {"weight_floor"});
    r.get("optimizer.neighborhood", o.neighborhood, {"neighborhood"});
    r.get("optimizer.csa_awareness", o.csa_awareness, {"csa_awareness"});
    r.get("optimizer.seed", o.seed, {"seed"});
    r.get("optimizer.threads", o.threads, {"threads"});

    for (const auto& [key, e] : file.entries()) {
        if (key.rfind("space.", 0) != 0) continue;
        r.mark_used(key);
        const auto name = key.substr(6);
        std::vector<double> row;
        std::istringstream ss(e.value);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(trim(cell)));
            } catch (const std::exception&) {
                r.fail(e, key, fmt::format("'{}' is not a number", trim(cell)));
            }
        }
        if (row.size() != 3) r.fail(e, key, "expected 'min, max, step'");
        try {
            c.custom_space.emplace_back(name, row[0], row[1], row[2]);
        } catch (const std::invalid_argument& ex) {
            r.fail(e, key, ex.what());
        }
    }
    r.reject_unknown();

    try {
        c.phantom.validate();
        c.fitness.validate();
        o.validate();
        if (c.n_angles < 1) throw std::invalid_argument("geometry.n_angles must be >= 1");
        if (c.n_detectors != 0 && c.n_detectors < c.phantom.n) {
            throw std::invalid_argument("geometry.n_detectors must be >= phantom.size");
        }
        if (!(c.keep_fraction > 0.0 && c.keep_fraction <= 1.0)) {
            throw std::invalid_argument("geometry.keep_fraction must lie in (0, 1]");
        }
        if (!(c.rho >= 0.0 && c.rho <= 1.0)) throw std::invalid_argument("recon.rho must lie in [0, 1]");
        const auto sp = c.space();
        ReconParams probe;
        for (const auto& s : sp.specs()) {
            if (probe.field(s.name) == nullptr) {
                throw std::invalid_argument("space parameter '" + s.name + "' is not a reconstruction parameter");
            }
        }
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(fmt::format("{}: {}", file.origin(), ex.what()));
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    return from_file(KeyValueFile::load(path), path.parent_path());
}

}  // namespace crowtune
