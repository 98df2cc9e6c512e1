#include "kwnr/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kwnr {

WeightSpec RunConfig::weight_spec() const {
    WeightSpec w;
    w.q = q;
    w.theta = theta;
    w.model_kind =
        (model_kind == "boltzmann") ? ModelKind::Boltzmann : ModelKind::Landau;
    w.gamma = gamma;
    w.s = s;
    return w;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) {
        throw std::invalid_argument("config: " + msg);
    };
    if (model_kind != "landau" && model_kind != "boltzmann")
        fail("model_kind must be landau or boltzmann");
    if (domain != "torus" && domain != "channel")
        fail("domain must be torus or channel");
    if (model_kind == "landau") {
        if (gamma < -3.0 || gamma > 1.0) fail("landau gamma outside [-3, 1]");
    } else {
        if (gamma <= -3.0 || gamma > 1.0)
            fail("boltzmann gamma outside (-3, 1]");
        if (s <= 0.0 || s >= 1.0) fail("boltzmann s outside (0, 1)");
        if (theta_min <= 0.0) fail("theta_min must be positive");
    }
    weight_spec().validate();
    bool soft = weight_spec().is_soft();
    if (soft && q <= 0.0)
        fail("soft-range runs need an exponential weight (q > 0)");
    if (n_per_dim < 8 || n_per_dim % 2 != 0)
        fail("n_per_dim must be even and >= 8");
    if (v_max <= 0.0) fail("v_max must be positive");
    if (ball_radius < 0.0) fail("ball_radius must be >= 0");
    if (dt <= 0.0 || t_final <= 0.0) fail("dt and t_final must be positive");
    if (scheme != "explicit_rk2" && scheme != "imex_euler" &&
        scheme != "imex_strang")
        fail("unknown scheme: " + scheme);
    if (model_kind == "boltzmann" && scheme != "explicit_rk2")
        fail("implicit schemes need the Landau dense operator; boltzmann "
             "runs are explicit only");
    if (domain == "torus") {
        if (k_max < 0) fail("k_max must be >= 0");
    } else {
        if (n_x1 < 4) fail("n_x1 must be >= 4");
        if (kbar_max < 0) fail("kbar_max must be >= 0");
        if (bc != "specular" && bc != "inflow")
            fail("bc must be specular or inflow");
        if (model_kind != "landau")
            fail("channel runs use the Landau collision backend");
    }
    if (amplitude < 0.0) fail("amplitude must be >= 0");
    if (record_every < 1) fail("record_every must be >= 1");
    if (checkpoint_every < 0) fail("checkpoint_every must be >= 0");
    if (workers < 1) fail("workers must be >= 1");
    if (high_order_m < 0) fail("high_order_m must be >= 0");
}

namespace {

RunConfig apply_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    RunConfig cfg;
    std::set<std::string> seen;
    auto as_int = [](const std::string& k, const std::string& v) {
        std::size_t pos = 0;
        int r = std::stoi(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("config: bad integer for " + k);
        return r;
    };
    auto as_double = [](const std::string& k, const std::string& v) {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("config: bad number for " + k);
        return r;
    };
    auto as_bool = [](const std::string& k, const std::string& v) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw std::invalid_argument("config: bad boolean for " + k);
    };
    for (const auto& [key, val] : pairs) {
        if (!seen.insert(key).second)
            throw std::invalid_argument("config: duplicate key " + key);
        if (key == "model.kind") cfg.model_kind = val;
        else if (key == "model.gamma") cfg.gamma = as_double(key, val);
        else if (key == "model.s") cfg.s = as_double(key, val);
        else if (key == "model.theta_min") cfg.theta_min = as_double(key, val);
        else if (key == "domain.kind") cfg.domain = val;
        else if (key == "domain.k_max") cfg.k_max = as_int(key, val);
        else if (key == "domain.n_x1") cfg.n_x1 = as_int(key, val);
        else if (key == "domain.kbar_max") cfg.kbar_max = as_int(key, val);
        else if (key == "domain.bc") cfg.bc = val;
        else if (key == "domain.boundary_preset") cfg.boundary_preset = val;
        else if (key == "domain.boundary_amplitude")
            cfg.boundary_amplitude = as_double(key, val);
        else if (key == "grid.n_per_dim") cfg.n_per_dim = as_int(key, val);
        else if (key == "grid.v_max") cfg.v_max = as_double(key, val);
        else if (key == "grid.ball_radius")
            cfg.ball_radius = as_double(key, val);
        else if (key == "weight.q") cfg.q = as_double(key, val);
        else if (key == "weight.theta") cfg.theta = as_double(key, val);
        else if (key == "time.dt") cfg.dt = as_double(key, val);
        else if (key == "time.t_final") cfg.t_final = as_double(key, val);
        else if (key == "time.scheme") cfg.scheme = val;
        else if (key == "time.nonlinear") cfg.nonlinear = as_bool(key, val);
        else if (key == "time.conserve_correction")
            cfg.conserve_correction = as_bool(key, val);
        else if (key == "init.preset") cfg.preset = val;
        else if (key == "init.amplitude") cfg.amplitude = as_double(key, val);
        else if (key == "output.dir") cfg.out_dir = val;
        else if (key == "output.record_every")
            cfg.record_every = as_int(key, val);
        else if (key == "output.checkpoint_every")
            cfg.checkpoint_every = as_int(key, val);
        else if (key == "run.seed")
            cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "run.workers") cfg.workers = as_int(key, val);
        else if (key == "run.high_order_m")
            cfg.high_order_m = as_int(key, val);
        else if (key == "fit.t_lo") cfg.fit_t_lo = as_double(key, val);
        else if (key == "fit.t_hi") cfg.fit_t_hi = as_double(key, val);
        else
            throw std::invalid_argument("config: unknown key " + key);
    }
    if (!seen.count("model.kind"))
        throw std::invalid_argument("config: missing required key model.kind");
    cfg.validate();
    return cfg;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " +
                                        std::to_string(lineno) +
                                        " is not `key = value`");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config: empty key or value at line " +
                                        std::to_string(lineno));
        pairs.emplace_back(key, val);
    }
    return apply_pairs(pairs);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace kwnr
