// Run configuration: one flat record shared by every CLI operation.
//
// Precedence (lowest to highest): built-in defaults, config file
// (key=value lines), environment variables (prefix SUBFRAC_), CLI flags.
// The loader applies the first three; the CLI applies its flags on top.
// A run report embeds the digest of the exact configuration so any result
// can be replayed bitwise.

#pragma once

#include <cstdint>
#include <string>

#include "subfrac/fraclap.hpp"
#include "subfrac/heatkernel.hpp"
#include "subfrac/riesz.hpp"

namespace subfrac {

struct RunConfig {
    int n = 1;                    // group index (H^n)
    int quad_nodes = 16;          // Gauss nodes per panel
    double quad_rho_max = 16.0;   // volume-grid tail cutoff (gauge radius)
    double quad_tol = 1e-12;      // relative stop for marched quadratures
    std::int64_t paths = 200000;  // diffusion paths
    int steps = 2000;             // time steps per path
    std::uint64_t seed = 20260816;
    std::string cache_dir;        // empty = cache disabled
    std::string format = "csv";  // table output: "csv" (default) | "json"
    bool force = false;           // lift the n > 2 cost guard

    // Canonical key=value serialization (fixed key order) and its FNV-1a
    // digest; the digest is what reports embed.
    std::string serialized() const;
    std::uint64_t digest() const;
    std::string digest_hex() const;
};

// Apply one key=value setting; throws std::invalid_argument on unknown keys
// or unparseable values.  Keys match the field names above.
void config_apply(RunConfig& cfg, const std::string& key, const std::string& value);

// Defaults -> config file (if path nonempty; missing file is an error) ->
// SUBFRAC_* environment.
RunConfig load_config(const std::string& config_path);

// Adapters into the module option records.
HkOptions hk_options(const RunConfig& cfg);
GaugeGridOptions grid_options(const RunConfig& cfg);
RadialOptions radial_options(const RunConfig& cfg);
SamplerSpec sampler_spec(const RunConfig& cfg);
PsiOptions psi_options(const RunConfig& cfg);

}  // namespace subfrac
