#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "crowtune/fitness.hpp"
#include "crowtune/init.hpp"
#include "crowtune/optimizer.hpp"
#include "crowtune/param_space.hpp"
#include "crowtune/phantoms.hpp"
#include "crowtune/recon.hpp"

namespace crowtune {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` file with `#` comments. Keys may carry dotted section
/// prefixes (`optimizer.population`).
class KeyValueFile {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    static KeyValueFile load(const std::filesystem::path& path);
    static KeyValueFile parse(const std::string& text, const std::string& origin = "<config>");

    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
    const std::string& origin() const noexcept { return origin_; }

private:
    std::string origin_;
    std::map<std::string, Entry> entries_;
};

struct RunConfig {
    std::string name = "experiment";
    std::filesystem::path output_dir = "crowtune_out";

    PhantomSpec phantom;
    std::uint64_t noise_seed = 7;
    std::size_t n_angles = 30;
    std::size_t n_detectors = 0;  ///< 0 means phantom.n
    double keep_fraction = 1.0;

    ReconAlgorithm recon = ReconAlgorithm::AsdPocs;
    double rho = 0.5;
    /// Replaces the algorithm's preset grids when non-empty.
    std::vector<ParameterSpec> custom_space;

    FitnessConfig fitness;
    OptimizerConfig optimizer;
    OptimizerAlgorithm algorithm = OptimizerAlgorithm::SsaCsa;
    InitScheme init = InitScheme::Cdlu;

    ParameterSpace space() const;

    /// Relative output directories resolve against `base_dir`.
    static RunConfig from_file(const KeyValueFile& file, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& path);
};

}  // namespace crowtune
