#include "crowtune/io.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace crowtune {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(fmt::format("{}:{}: '{}' is not a number", path.string(), line, s));
    }
}

std::size_t to_size(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    std::size_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(fmt::format("{}:{}: '{}' is not a non-negative integer", path.string(), line, s));
    }
    return v;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    return out;
}

void write_rows(std::ostream& os, const Array2D& a) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            fmt::print(os, "{:.9g}", row[c]);
        }
        os << '\n';
    }
}

std::vector<std::vector<double>> read_rows(std::istream& in, const std::filesystem::path& path,
                                           std::size_t first_line) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = first_line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<double> row;
        for (const auto& cell : split(t, ',')) row.push_back(to_double(cell, path, lineno));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(fmt::format("{}:{}: ragged row", path.string(), lineno));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Array2D to_array(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return Array2D(rows.size(), rows.front().size(), std::move(flat));
}

}  // namespace

std::string fixed6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.6f}", v);
}

// ---------------------------------------------------------------------------
// PGM

void write_pgm(const std::filesystem::path& path, const Image2D& image) {
    auto out = open_out(path, true);
    const double peak = image.size() ? max_value(image.data()) : 0.0;
    const double scale = peak > 0.0 ? peak : 1.0;
    out << "P5\n# crowtune scale " << fmt::format("{:.17g}", scale) << '\n'
        << image.cols() << ' ' << image.rows() << "\n65535\n";
    for (double v : image.data()) {
        const double q = std::clamp(std::round(v / scale * 65535.0), 0.0, 65535.0);
        const auto u = static_cast<unsigned>(q);
        const char bytes[2] = {static_cast<char>((u >> 8) & 0xFF), static_cast<char>(u & 0xFF)};
        out.write(bytes, 2);
    }
}

Image2D read_pgm(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw ParseError(fmt::format("{}: not a binary PGM", path.string()));
    double scale = 0.0;
    std::vector<std::size_t> fields;
    while (fields.size() < 3) {
        in >> std::ws;
        if (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            std::istringstream cs(comment);
            std::string hash, tag, key;
            if (cs >> hash >> tag >> key && tag == "crowtune" && key == "scale") cs >> scale;
            continue;
        }
        std::size_t v = 0;
        if (!(in >> v)) throw ParseError(fmt::format("{}: malformed PGM header", path.string()));
        fields.push_back(v);
    }
    in.get();
    const std::size_t cols = fields[0];
    const std::size_t rows = fields[1];
    const std::size_t maxval = fields[2];
    if (maxval == 0 || maxval > 65535) throw ParseError(fmt::format("{}: bad PGM maxval", path.string()));
    const bool wide = maxval > 255;
    if (scale <= 0.0) scale = static_cast<double>(maxval);
    Image2D img(rows, cols);
    for (auto& v : img.data()) {
        unsigned u = 0;
        unsigned char b[2] = {0, 0};
        if (wide) {
            in.read(reinterpret_cast<char*>(b), 2);
            u = (static_cast<unsigned>(b[0]) << 8) | b[1];
        } else {
            in.read(reinterpret_cast<char*>(b), 1);
            u = b[0];
        }
        if (!in) throw ParseError(fmt::format("{}: truncated PGM data", path.string()));
        v = static_cast<double>(u) / static_cast<double>(maxval) * scale;
    }
    return img;
}

// ---------------------------------------------------------------------------
// CSV images and sinograms

void write_image_csv(const std::filesystem::path& path, const Image2D& image) {
    auto out = open_out(path);
    write_rows(out, image);
}

Image2D read_image_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    auto rows = read_rows(in, path, 0);
    if (rows.empty()) throw ParseError(fmt::format("{}: empty image", path.string()));
    return Image2D(to_array(rows));
}

void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& sinogram) {
    auto out = open_out(path);
    out << "n_angles," << sinogram.n_angles() << "\nn_detectors," << sinogram.n_detectors() << '\n';
    write_rows(out, sinogram);
}

Sinogram read_sinogram_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::size_t dims[2] = {0, 0};
    const char* keys[2] = {"n_angles", "n_detectors"};
    for (std::size_t k = 0; k < 2; ++k) {
        std::string line;
        if (!std::getline(in, line)) throw ParseError(fmt::format("{}: missing header", path.string()));
        const auto cells = split(trim(line), ',');
        if (cells.size() != 2 || cells[0] != keys[k]) {
            throw ParseError(fmt::format("{}:{}: expected '{},<count>'", path.string(), k + 1, keys[k]));
        }
        dims[k] = to_size(cells[1], path, k + 1);
    }
    auto rows = read_rows(in, path, 2);
    if (rows.size() != dims[0] || (!rows.empty() && rows.front().size() != dims[1])) {
        throw ParseError(fmt::format("{}: data does not match the {}x{} header", path.string(), dims[0], dims[1]));
    }
    return Sinogram(to_array(rows));
}

Image2D read_image(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".csv") return read_image_csv(path);
    throw ParseError(fmt::format("{}: unsupported image format (expected .pgm or .csv)", path.string()));
}

// ---------------------------------------------------------------------------
// Parameter files

std::vector<std::pair<std::string, double>> read_params_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<std::pair<std::string, double>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const auto t = trim(std::string_view(line).substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(fmt::format("{}:{}: expected 'name = value'", path.string(), lineno));
        }
        const auto name = trim(std::string_view(t).substr(0, eq));
        const auto value = trim(std::string_view(t).substr(eq + 1));
        if (name.empty()) throw ParseError(fmt::format("{}:{}: empty parameter name", path.string(), lineno));
        out.emplace_back(name, to_double(value, path, lineno));
    }
    return out;
}

void write_params_file(const std::filesystem::path& path, const ParameterSpace& space, const Position& pos) {
    auto out = open_out(path);
    const auto values = space.values(pos);
    for (std::size_t d = 0; d < space.dimension(); ++d) out << space[d].name << " = " << fixed6(values[d]) << '\n';
}

// ---------------------------------------------------------------------------
// Run records

void write_convergence_csv(std::ostream& os, const RunRecord& rec, const ParameterSpace& space) {
    const auto& c = rec.config;
    os << "# algorithm=" << to_string(rec.algorithm) << " init=" << to_string(rec.init)
       << " population=" << c.population << " iterations=" << c.iterations << '\n';
    os << "# flight_length=" << fixed6(c.flight_length) << " ap0=" << fixed6(c.ap0)
       << " ap_inc=" << fmt::format("{:.9f}", c.effective_ap_inc()) << " kappa0=" << fixed6(c.kappa0)
       << " kappa_red=" << fmt::format("{:.9f}", c.kappa_red()) << " omega_inc=" << fixed6(c.omega_inc)
       << " k0=" << fixed6(c.k0) << " weight_floor=" << fixed6(c.weight_floor)
       << " neighborhood=" << fixed6(c.neighborhood) << " csa_awareness=" << fixed6(c.csa_awareness)
       << " seed=" << c.seed << '\n';
    os << "iteration,best_fitness,mean_fitness,superior_size,explorations,memory_updates\n";
    for (const auto& s : rec.iterations) {
        os << s.iteration << ',' << fixed6(s.best_fitness) << ',' << fixed6(s.mean_fitness) << ','
           << s.superior_size << ',' << s.explorations << ',' << s.memory_updates << '\n';
    }
    os << "final," << fixed6(rec.best_report.fitness) << ",,,," << rec.total_evaluations << '\n';
    const auto values = space.values(rec.best_position);
    os << "# best";
    for (std::size_t d = 0; d < space.dimension(); ++d) os << ' ' << space[d].name << '=' << fixed6(values[d]);
    os << " snr=" << fixed6(rec.best_report.snr) << " hfer=" << fixed6(rec.best_report.hfer) << '\n';
}

void write_evaluations_csv(std::ostream& os, const RunRecord& rec, const ParameterSpace& space) {
    os << "iteration,crow";
    for (const auto& s : space.specs()) os << ',' << s.name;
    os << ",fitness,snr,hfer,inv_snr,hfer_deficit,psnr,penalized\n";
    for (const auto& e : rec.evaluations) {
        os << e.iteration << ',' << e.crow;
        for (double v : space.values(e.position)) os << ',' << fixed6(v);
        os << ',' << fixed6(e.report.fitness) << ',' << fixed6(e.report.snr) << ',' << fixed6(e.report.hfer) << ','
           << fixed6(e.report.objectives.inv_snr) << ',' << fixed6(e.report.objectives.hfer_deficit) << ','
           << (e.report.psnr ? fixed6(*e.report.psnr) : std::string{}) << ',' << (e.penalized ? 1 : 0) << '\n';
    }
}

void write_weightmap_csv(std::ostream& os, const WeightMap& map, const ParameterSpace& space) {
    os << "parameter,index,value,weight\n";
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        const auto w = map.weights(d);
        for (std::size_t k = 0; k < w.size(); ++k) {
            os << space[d].name << ',' << k << ',' << fixed6(space[d].value(k)) << ',' << fixed6(w[k]) << '\n';
        }
    }
}

std::vector<std::filesystem::path> write_weightmap_per_dimension(const std::filesystem::path& dir,
                                                                 const WeightMap& map,
                                                                 const ParameterSpace& space) {
    std::vector<std::filesystem::path> files;
    for (std::size_t d = 0; d < space.dimension(); ++d) {
        const auto path = dir / ("weightmap_" + space[d].name + ".csv");
        auto out = open_out(path);
        out << "value,weight\n";
        const auto w = map.weights(d);
        for (std::size_t k = 0; k < w.size(); ++k) out << fixed6(space[d].value(k)) << ',' << fixed6(w[k]) << '\n';
        files.push_back(path);
    }
    return files;
}

std::vector<std::filesystem::path> write_weightmap_per_dimension(const std::filesystem::path& dir,
                                                                 const WeightMapTable& table) {
    std::vector<std::filesystem::path> files;
    for (std::size_t d = 0; d < table.names.size(); ++d) {
        const auto path = dir / ("weightmap_" + table.names[d] + ".csv");
        auto out = open_out(path);
        out << "value,weight\n";
        for (std::size_t k = 0; k < table.values[d].size(); ++k) {
            out << fixed6(table.values[d][k]) << ',' << fixed6(table.weights[d][k]) << '\n';
        }
        files.push_back(path);
    }
    return files;
}

WeightMapTable read_weightmap_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "parameter,index,value,weight") {
        throw ParseError(fmt::format("{}: missing weight-map header", path.string()));
    }
    WeightMapTable t;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = trim(line);
        if (s.empty()) continue;
        const auto cells = split(s, ',');
        if (cells.size() != 4) throw ParseError(fmt::format("{}:{}: expected 4 columns", path.string(), lineno));
        if (t.names.empty() || t.names.back() != cells[0]) {
            t.names.push_back(cells[0]);
            t.values.emplace_back();
            t.weights.emplace_back();
        }
        const auto idx = to_size(cells[1], path, lineno);
        if (idx != t.values.back().size()) {
            throw ParseError(fmt::format("{}:{}: grid indices must be consecutive", path.string(), lineno));
        }
        t.values.back().push_back(to_double(cells[2], path, lineno));
        t.weights.back().push_back(to_double(cells[3], path, lineno));
    }
    return t;
}

ConvergenceTable read_convergence_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    ConvergenceTable t;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    bool final_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '#') {
            std::istringstream ss(s.substr(1));
            std::string kv;
            while (ss >> kv) {
                const auto eq = kv.find('=');
                if (eq != std::string::npos) t.header[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            if (s != "iteration,best_fitness,mean_fitness,superior_size,explorations,memory_updates") {
                throw ParseError(fmt::format("{}:{}: unexpected column header", path.string(), lineno));
            }
            header_seen = true;
            continue;
        }
        const auto cells = split(s, ',');
        if (cells.size() != 6) throw ParseError(fmt::format("{}:{}: expected 6 columns", path.string(), lineno));
        if (cells[0] == "final") {
            t.final_best_fitness = to_double(cells[1], path, lineno);
            final_seen = true;
            continue;
        }
        ConvergenceRow r;
        r.iteration = to_size(cells[0], path, lineno);
        r.best_fitness = to_double(cells[1], path, lineno);
        r.mean_fitness = to_double(cells[2], path, lineno);
        r.superior_size = to_size(cells[3], path, lineno);
        r.explorations = to_size(cells[4], path, lineno);
        r.memory_updates = to_size(cells[5], path, lineno);
        t.rows.push_back(r);
    }
    if (!header_seen || !final_seen) throw ParseError(fmt::format("{}: incomplete convergence file", path.string()));
    return t;
}

}  // namespace crowtune
