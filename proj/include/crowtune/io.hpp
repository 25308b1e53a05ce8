#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "crowtune/image.hpp"
#include "crowtune/optimizer.hpp"
#include "crowtune/param_space.hpp"

namespace crowtune {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 16-bit binary PGM (P5), scaled so the maximum maps to 65535. The scale is
/// kept in a header comment so read_pgm restores physical units up to
/// quantization.
void write_pgm(const std::filesystem::path& path, const Image2D& image);
Image2D read_pgm(const std::filesystem::path& path);

/// One image row per line, 9 significant digits.
void write_image_csv(const std::filesystem::path& path, const Image2D& image);
Image2D read_image_csv(const std::filesystem::path& path);

/// `n_angles,<a>` and `n_detectors,<d>` header lines, then one row per angle.
void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& sinogram);
Sinogram read_sinogram_csv(const std::filesystem::path& path);

/// Dispatches on the extension (.pgm or .csv).
Image2D read_image(const std::filesystem::path& path);

/// `name = value` lines; `#` starts a comment.
std::vector<std::pair<std::string, double>> read_params_file(const std::filesystem::path& path);
void write_params_file(const std::filesystem::path& path, const ParameterSpace& space, const Position& pos);

/// Fixed-point with 6 decimals, the precision of every CSV metric column.
std::string fixed6(double v);

void write_convergence_csv(std::ostream& os, const RunRecord& record, const ParameterSpace& space);
void write_evaluations_csv(std::ostream& os, const RunRecord& record, const ParameterSpace& space);

/// Combined weight-map export: parameter,index,value,weight.
void write_weightmap_csv(std::ostream& os, const WeightMap& map, const ParameterSpace& space);
/// Per-parameter export (value,weight) as weightmap_<name>.csv in `dir`.
std::vector<std::filesystem::path> write_weightmap_per_dimension(const std::filesystem::path& dir,
                                                                 const WeightMap& map,
                                                                 const ParameterSpace& space);

struct WeightMapTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> weights;
};
WeightMapTable read_weightmap_csv(const std::filesystem::path& path);
std::vector<std::filesystem::path> write_weightmap_per_dimension(const std::filesystem::path& dir,
                                                                 const WeightMapTable& table);

struct ConvergenceRow {
    std::size_t iteration = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::size_t superior_size = 0;
    std::size_t explorations = 0;
    std::size_t memory_updates = 0;
};
struct ConvergenceTable {
    std::map<std::string, std::string> header;
    std::vector<ConvergenceRow> rows;
    double final_best_fitness = 0.0;
};
ConvergenceTable read_convergence_csv(const std::filesystem::path& path);

}  // namespace crowtune
