#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "snrlab/correction.hpp"
#include "snrlab/denoiser.hpp"
#include "snrlab/grid.hpp"
#include "snrlab/sampler.hpp"
#include "snrlab/schedule.hpp"

namespace snrlab {

// Flat typed key-value file: one `key = value` per line, `#` comments.
// Unknown or malformed keys fail fast with the offending key path.
class Config {
  public:
    static Config load(const std::filesystem::path& path);
    static Config from_string(const std::string& text, std::string name = "<inline>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    const std::string& name() const { return name_; }

  private:
    std::map<std::string, std::string> kv_;
    std::string name_;
};

enum class ExperimentKind {
    sample,
    sliding_window,
    forward_vs_reverse,
    recon_norms,
    theory_curves,
    metrics,
};

enum class DenoiserKind { exact, biased, assumption };

// Fully validated experiment setup built from a Config.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::sample;
    NoiseSchedule sched = NoiseSchedule::desk_default();
    GridShape grid{1, 8, 8};
    GaussianMixture data;
    DenoiserKind denoiser_kind = DenoiserKind::exact;
    BiasProfile profile;
    CorrectionConfig correction;
    int n_chains = 1000;
    std::uint64_t seed = 0;
    std::uint64_t data_seed = 0;  // independent draws for metric references
    RecordFlags record;
    std::vector<int> sliding_s;
    std::vector<int> sliding_t;
    int theory_t = 0;            // estimate step for gamma_psi output (0 = skip)
    int metrics_n_proj = 64;
    // two-stage search controls
    double search_coarse_max_l = 0.20;
    double search_coarse_max_h = 0.10;
    double search_coarse_step = 0.01;
    double search_fine_step = 0.001;
    int search_batches = 20;

    std::shared_ptr<const Denoiser> make_denoiser() const;
};

ExperimentSpec parse_experiment(const Config& cfg);

}  // namespace snrlab
