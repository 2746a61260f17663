#include "snrlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace snrlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "experiment",
        "schedule.kind", "schedule.T", "schedule.beta_start", "schedule.beta_end",
        "schedule.cosine_s", "schedule.sigma_mode", "schedule.beta_csv",
        "grid.channels", "grid.height", "grid.width",
        "data.modes",
        "denoiser.kind", "denoiser.gamma", "denoiser.phi",
        "run.n_chains", "run.seed", "run.data_seed", "run.record",
        "correction.mode", "correction.weight_kind", "correction.lambda_l",
        "correction.lambda_h", "correction.t_s", "correction.w_l", "correction.w_h",
        "diag.s_list", "diag.t_list", "diag.estimate_t",
        "metrics.n_proj",
        "search.coarse_max_l", "search.coarse_max_h", "search.coarse_step",
        "search.fine_step", "search.batches",
    };
    return keys;
}

bool is_mode_key(const std::string& key) {
    static const std::regex re(R"(^data\.mode\.\d+\.(weight|mean|var)$)");
    return std::regex_match(key, re);
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path.stem().string());
}

Config Config::from_string(const std::string& text, std::string name) {
    Config c;
    c.name_ = std::move(name);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        }
        if (c.kv_.count(key)) {
            bad_key(key, "duplicate entry");
        }
        c.kv_[key] = value;
    }
    return c;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
        bad_key(key, "missing required key");
    }
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const long long r = std::stoll(v, &pos);
        if (pos != v.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return r;
    } catch (const std::exception&) {
        bad_key(key, "not an integer: '" + v + "'");
    }
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return r;
    } catch (const std::exception&) {
        bad_key(key, "not a number: '" + v + "'");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::vector<int> Config::get_int_list(const std::string& key, std::vector<int> fallback) const {
    if (!has(key)) {
        return fallback;
    }
    std::vector<int> out;
    std::istringstream in(get_string(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            bad_key(key, "not an integer list entry: '" + item + "'");
        }
    }
    if (out.empty()) {
        bad_key(key, "empty list");
    }
    return out;
}

namespace {

Grid parse_mean_spec(const std::string& key, const std::string& spec, GridShape shape) {
    const auto colon = spec.find(':');
    const std::string head = colon == std::string::npos ? spec : spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "constant") {
        double v = 0.0;
        try {
            v = std::stod(arg);
        } catch (const std::exception&) {
            bad_key(key, "constant mean needs a number, got '" + arg + "'");
        }
        return Grid(shape, v);
    }
    if (head == "checker") {
        double v = 0.0;
        try {
            v = std::stod(arg);
        } catch (const std::exception&) {
            bad_key(key, "checker mean needs an amplitude, got '" + arg + "'");
        }
        Grid g(shape);
        for (int c = 0; c < shape.channels; ++c) {
            for (int h = 0; h < shape.height; ++h) {
                for (int w = 0; w < shape.width; ++w) {
                    g.at(c, h, w) = ((h + w) % 2 == 0) ? v : -v;
                }
            }
        }
        return g;
    }
    if (head == "csv") {
        Grid g = read_grid_csv(arg);
        if (!(g.shape() == shape)) {
            bad_key(key, "csv mean shape does not match grid.{channels,height,width}");
        }
        return g;
    }
    bad_key(key, "mean must be constant:<v>, checker:<v>, or csv:<path>");
}

std::vector<double> parse_per_t(const Config& cfg, const std::string& key, int T) {
    const std::string v = cfg.get_string(key);
    if (v.rfind("csv:", 0) == 0) {
        std::ifstream in(v.substr(4));
        if (!in) {
            bad_key(key, "cannot open per-step csv '" + v.substr(4) + "'");
        }
        std::vector<double> out;
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            out.push_back(std::stod(line));
        }
        if (static_cast<int>(out.size()) != T) {
            bad_key(key, "per-step csv must have exactly T values");
        }
        return out;
    }
    try {
        std::size_t pos = 0;
        const double scalar = std::stod(v, &pos);
        if (pos != v.size()) {
            throw std::invalid_argument("trailing");
        }
        return std::vector<double>(static_cast<std::size_t>(T), scalar);
    } catch (const std::exception&) {
        bad_key(key, "expected a scalar or csv:<path>, got '" + v + "'");
    }
}

}  // namespace

std::shared_ptr<const Denoiser> ExperimentSpec::make_denoiser() const {
    switch (denoiser_kind) {
        case DenoiserKind::exact:
            return std::make_shared<ExactDenoiser>(data, sched);
        case DenoiserKind::biased:
            return std::make_shared<BiasedDenoiser>(
                std::make_shared<ExactDenoiser>(data, sched), profile);
        case DenoiserKind::assumption:
            return std::make_shared<AssumptionDenoiser>(data, profile);
    }
    throw std::invalid_argument("unknown denoiser kind");
}

ExperimentSpec parse_experiment(const Config& cfg) {
    // reject unknown keys first so typos fail loudly
    for (const auto& [key, value] : cfg.entries()) {
        if (!known_keys().count(key) && !is_mode_key(key)) {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }

    const std::string kind = cfg.get_string("experiment", "sample");
    ExperimentKind ek;
    if (kind == "sample") {
        ek = ExperimentKind::sample;
    } else if (kind == "sliding-window") {
        ek = ExperimentKind::sliding_window;
    } else if (kind == "forward-vs-reverse") {
        ek = ExperimentKind::forward_vs_reverse;
    } else if (kind == "recon-norms") {
        ek = ExperimentKind::recon_norms;
    } else if (kind == "theory-curves") {
        ek = ExperimentKind::theory_curves;
    } else if (kind == "metrics") {
        ek = ExperimentKind::metrics;
    } else {
        bad_key("experiment", "unknown experiment '" + kind + "'");
    }

    const int T = static_cast<int>(cfg.get_int("schedule.T", 100));
    if (T < 1) {
        bad_key("schedule.T", "must be >= 1");
    }
    const std::string smode_s = cfg.get_string("schedule.sigma_mode", "small");
    SigmaMode smode;
    if (smode_s == "small") {
        smode = SigmaMode::small;
    } else if (smode_s == "large") {
        smode = SigmaMode::large;
    } else {
        bad_key("schedule.sigma_mode", "must be 'small' or 'large'");
    }
    const std::string skind = cfg.get_string("schedule.kind", "linear");
    NoiseSchedule sched = NoiseSchedule::desk_default(T, smode);
    if (skind == "linear") {
        const double scale = 1000.0 / static_cast<double>(T);
        const double b1 =
            cfg.get_double("schedule.beta_end", std::min(0.02 * scale, 0.999));
        const double b0 =
            cfg.get_double("schedule.beta_start", std::min(1e-4 * scale, b1));
        sched = NoiseSchedule::linear(T, b0, b1, smode);
    } else if (skind == "cosine") {
        sched = NoiseSchedule::cosine(T, cfg.get_double("schedule.cosine_s", 0.008), smode);
    } else if (skind == "csv") {
        std::ifstream in(cfg.get_string("schedule.beta_csv"));
        if (!in) {
            bad_key("schedule.beta_csv", "cannot open beta csv");
        }
        std::vector<double> betas;
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (!line.empty()) {
                betas.push_back(std::stod(line));
            }
        }
        if (static_cast<int>(betas.size()) != T) {
            bad_key("schedule.beta_csv", "must list exactly schedule.T beta values");
        }
        sched = NoiseSchedule::from_betas(std::move(betas), smode);
    } else {
        bad_key("schedule.kind", "must be 'linear', 'cosine', or 'csv'");
    }

    GridShape shape{static_cast<int>(cfg.get_int("grid.channels", 1)),
                    static_cast<int>(cfg.get_int("grid.height", 8)),
                    static_cast<int>(cfg.get_int("grid.width", 8))};
    if (shape.channels < 1) {
        bad_key("grid.channels", "must be >= 1");
    }
    if (shape.height < 2 || shape.height % 2 != 0) {
        bad_key("grid.height", "must be a positive even integer");
    }
    if (shape.width < 2 || shape.width % 2 != 0) {
        bad_key("grid.width", "must be a positive even integer");
    }

    const int n_modes = static_cast<int>(cfg.get_int("data.modes", 1));
    if (n_modes < 1) {
        bad_key("data.modes", "must be >= 1");
    }
    std::vector<GmmMode> modes;
    for (int k = 0; k < n_modes; ++k) {
        const std::string prefix = "data.mode." + std::to_string(k) + ".";
        GmmMode m;
        m.weight = cfg.get_double(prefix + "weight", n_modes == 1 ? 1.0 : 0.0);
        m.mean = parse_mean_spec(prefix + "mean", cfg.get_string(prefix + "mean", "constant:0"),
                                 shape);
        m.var = cfg.get_double(prefix + "var", 1.0);
        modes.push_back(std::move(m));
    }

    const std::string dkind = cfg.get_string("denoiser.kind", "exact");
    DenoiserKind dk;
    if (dkind == "exact") {
        dk = DenoiserKind::exact;
    } else if (dkind == "biased") {
        dk = DenoiserKind::biased;
    } else if (dkind == "assumption") {
        dk = DenoiserKind::assumption;
    } else {
        bad_key("denoiser.kind", "must be 'exact', 'biased', or 'assumption'");
    }
    BiasProfile profile = BiasProfile::identity(T);
    if (dk != DenoiserKind::exact) {
        if (cfg.has("denoiser.gamma") || cfg.has("denoiser.phi")) {
            std::vector<double> g = cfg.has("denoiser.gamma")
                                        ? parse_per_t(cfg, "denoiser.gamma", T)
                                        : std::vector<double>(static_cast<std::size_t>(T), 1.0);
            std::vector<double> p = cfg.has("denoiser.phi")
                                        ? parse_per_t(cfg, "denoiser.phi", T)
                                        : std::vector<double>(static_cast<std::size_t>(T), 0.0);
            profile = BiasProfile(std::move(g), std::move(p));
        }
    }

    CorrectionConfig corr;
    const std::string cmode = cfg.get_string("correction.mode", "none");
    if (cmode == "none") {
        corr.mode = CorrectionMode::none;
    } else if (cmode == "dc") {
        corr.mode = CorrectionMode::dc;
    } else if (cmode == "dh") {
        corr.mode = CorrectionMode::dh;
    } else if (cmode == "dl") {
        corr.mode = CorrectionMode::dl;
    } else if (cmode == "dcw") {
        corr.mode = CorrectionMode::dcw;
    } else {
        bad_key("correction.mode", "must be one of none, dc, dh, dl, dcw");
    }
    const std::string wkind = cfg.get_string("correction.weight_kind", "variance");
    if (wkind == "variance") {
        corr.weight_kind = WeightKind::variance;
    } else if (wkind == "piecewise") {
        corr.weight_kind = WeightKind::piecewise;
    } else if (wkind == "constant") {
        corr.weight_kind = WeightKind::constant;
    } else {
        bad_key("correction.weight_kind", "must be variance, piecewise, or constant");
    }
    corr.lambda_l = cfg.get_double("correction.lambda_l", 0.0);
    corr.lambda_h = cfg.get_double("correction.lambda_h", 1.0);
    corr.t_s = static_cast<int>(cfg.get_int("correction.t_s", 0));
    if (corr.t_s < 0 || corr.t_s > T) {
        bad_key("correction.t_s", "must lie in [0, schedule.T]");
    }
    corr.w_l = cfg.get_double("correction.w_l", 0.0);
    corr.w_h = cfg.get_double("correction.w_h", 0.0);
    corr.validate();

    ExperimentSpec spec{
        .kind = ek,
        .sched = std::move(sched),
        .grid = shape,
        .data = GaussianMixture(std::move(modes)),
        .denoiser_kind = dk,
        .profile = std::move(profile),
        .correction = corr,
        .n_chains = static_cast<int>(cfg.get_int("run.n_chains", 1000)),
        .seed = static_cast<std::uint64_t>(cfg.get_int("run.seed", 0)),
        .data_seed = 0,
        .record = {},
        .sliding_s = {},
        .sliding_t = {},
        .theory_t = static_cast<int>(cfg.get_int("diag.estimate_t", 0)),
        .metrics_n_proj = static_cast<int>(cfg.get_int("metrics.n_proj", 64)),
        .search_coarse_max_l = cfg.get_double("search.coarse_max_l", 0.20),
        .search_coarse_max_h = cfg.get_double("search.coarse_max_h", 0.10),
        .search_coarse_step = cfg.get_double("search.coarse_step", 0.01),
        .search_fine_step = cfg.get_double("search.fine_step", 0.001),
        .search_batches = static_cast<int>(cfg.get_int("search.batches", 20)),
    };
    if (spec.n_chains < 1) {
        bad_key("run.n_chains", "must be >= 1");
    }
    spec.data_seed = static_cast<std::uint64_t>(
        cfg.get_int("run.data_seed", static_cast<long long>(spec.seed) + 1));

    const std::string record = cfg.get_string("run.record", "");
    std::istringstream rs(record);
    std::string flag;
    while (std::getline(rs, flag, ',')) {
        flag = trim(flag);
        if (flag.empty()) {
            continue;
        }
        if (flag == "states") {
            spec.record.states = true;
        } else if (flag == "x0_hat") {
            spec.record.x0_hat = true;
        } else if (flag == "eps_hat") {
            spec.record.eps_hat = true;
        } else {
            bad_key("run.record", "unknown record flag '" + flag + "'");
        }
    }

    std::vector<int> default_t(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
        default_t[static_cast<std::size_t>(t - 1)] = t;
    }
    spec.sliding_s = cfg.get_int_list("diag.s_list", {T / 2 > 0 ? T / 2 : 1});
    spec.sliding_t = cfg.get_int_list("diag.t_list", default_t);

    return spec;
}

}  // namespace snrlab
