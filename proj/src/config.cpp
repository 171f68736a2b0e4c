#include "dnls/config.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace dnls {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "gamma",      "nonlin_sign", "nonlinearity", "f",          "f_profile",
    "u0",         "u0_profile",  "u0_scale",     "M",          "N",
    "pad",        "method",      "dt",           "horizon",    "store_every",
    "experiment", "n_list",      "ensemble",     "burn_in",    "tail_list",
    "hs_list",    "probes_kmax", "a0",           "trials",     "L",
    "window",     "eps",         "N_list",       "seed",       "out_dir",
    "formats",    "checkpoint_every"};

bool parse_mode_list(const json& j, std::vector<ModeAmp>& out, const std::string& key,
                     std::vector<std::string>& errors) {
    if (!j.is_array()) {
        errors.push_back(key + ": expected a list of [k, amplitude] entries");
        return false;
    }
    for (const json& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer()) {
            errors.push_back(key + ": each entry must be [k, amplitude]");
            return false;
        }
        ModeAmp m;
        m.k = e[0].get<int>();
        if (e[1].is_number()) {
            m.amp = cplx{e[1].get<double>(), 0.0};
        } else if (e[1].is_array() && e[1].size() == 2 && e[1][0].is_number() &&
                   e[1][1].is_number()) {
            m.amp = cplx{e[1][0].get<double>(), e[1][1].get<double>()};
        } else {
            errors.push_back(key + ": amplitude must be a number or [re, im]");
            return false;
        }
        out.push_back(m);
    }
    return true;
}

bool parse_profile(const json& j, ProfileSpec& out, const std::string& key,
                   std::vector<std::string>& errors) {
    if (!j.is_object()) {
        errors.push_back(key + ": expected {exponent, kmax, amplitude}");
        return false;
    }
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (k != "exponent" && k != "kmax" && k != "amplitude") {
            errors.push_back(key + ": unknown key '" + k + "'");
            return false;
        }
    }
    if (!j.contains("exponent") || !j["exponent"].is_number() || !j.contains("kmax") ||
        !j["kmax"].is_number_integer()) {
        errors.push_back(key + ": needs numeric 'exponent' and integer 'kmax'");
        return false;
    }
    out.exponent = j["exponent"].get<double>();
    out.kmax = j["kmax"].get<int>();
    out.amplitude = j.value("amplitude", 1.0);
    return true;
}

template <typename T>
bool grab(const json& j, const char* key, T& out, const char* what,
          std::vector<std::string>& errors) {
    try {
        out = j.at(key).get<T>();
        return true;
    } catch (const json::exception&) {
        errors.push_back(std::string(key) + ": expected " + what);
        return false;
    }
}

}  // namespace

SchemeSpec SimConfig::scheme() const {
    SchemeSpec s;
    s.method = method;
    s.dt = dt_value();
    s.horizon = horizon;
    s.store_every = store_every;
    return s;
}

ParseResult parse_config(const std::string& text) {
    ParseResult res;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        res.errors.push_back(std::string("not valid JSON: ") + e.what());
        return res;
    }
    if (!j.is_object()) {
        res.errors.push_back("config must be a JSON object");
        return res;
    }

    std::vector<std::string>& errors = res.errors;
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!kKnownKeys.count(key)) errors.push_back("unknown key '" + key + "'");
    }

    SimConfig c;
    if (!j.contains("gamma"))
        errors.push_back("gamma: required");
    else if (grab(j, "gamma", c.gamma, "a number", errors) && !(c.gamma > 0.0))
        errors.push_back("gamma: must be positive");

    if (!j.contains("M"))
        errors.push_back("M: required");
    else if (grab(j, "M", c.M, "an integer", errors)) {
        if (c.M <= 0 || c.M % 2 != 0) errors.push_back("M: must be a positive even integer");
    }

    if (j.contains("N")) {
        grab(j, "N", c.N, "an integer", errors);
    } else if (c.M > 0) {
        c.N = c.M / 4;
    }
    if (c.M > 0 && (c.N < 0 || c.N >= c.M / 2))
        errors.push_back("N: cutoff exceeds resolved band (need 0 <= N < M/2)");

    if (j.contains("pad") && grab(j, "pad", c.pad, "an integer", errors) && c.pad < 2)
        errors.push_back("pad: must be >= 2");

    if (j.contains("nonlin_sign") &&
        grab(j, "nonlin_sign", c.nonlin_sign, "an integer", errors) &&
        c.nonlin_sign != 1 && c.nonlin_sign != -1)
        errors.push_back("nonlin_sign: must be +1 or -1");

    if (j.contains("nonlinearity")) grab(j, "nonlinearity", c.nonlinearity, "a bool", errors);

    if (j.contains("f")) parse_mode_list(j["f"], c.f_modes, "f", errors);
    if (j.contains("f_profile")) {
        ProfileSpec p;
        if (parse_profile(j["f_profile"], p, "f_profile", errors)) c.f_profile = p;
    }
    if (j.contains("u0")) parse_mode_list(j["u0"], c.u0_modes, "u0", errors);
    if (j.contains("u0_profile")) {
        ProfileSpec p;
        if (parse_profile(j["u0_profile"], p, "u0_profile", errors)) c.u0_profile = p;
    }
    if (j.contains("u0_scale")) {
        double v = 0.0;
        if (grab(j, "u0_scale", v, "a number", errors)) {
            c.u0_scale = v;
            if (!(v >= 0.0)) errors.push_back("u0_scale: must be >= 0");
        }
    }

    if (j.contains("method")) {
        std::string m;
        if (grab(j, "method", m, "a string", errors)) {
            if (m == "strang_split")
                c.method = Method::strang_split;
            else if (m == "etd_rk2")
                c.method = Method::etd_rk2;
            else if (m == "rk4_reference")
                c.method = Method::rk4_reference;
            else
                errors.push_back("method: must be strang_split, etd_rk2 or rk4_reference");
        }
    }

    if (j.contains("dt")) {
        double v = 0.0;
        if (grab(j, "dt", v, "a number", errors)) {
            c.dt = v;
            if (!(v > 0.0)) errors.push_back("dt: must be positive");
        }
    }

    if (!j.contains("horizon"))
        errors.push_back("horizon: required");
    else if (grab(j, "horizon", c.horizon, "a number", errors) && !(c.horizon > 0.0))
        errors.push_back("horizon: must be positive");
    if (c.horizon > 0.0 && c.horizon < c.dt_value())
        errors.push_back("horizon: must be >= dt");

    if (j.contains("store_every") &&
        grab(j, "store_every", c.store_every, "an integer", errors) && c.store_every < 1)
        errors.push_back("store_every: must be >= 1");

    if (j.contains("experiment")) grab(j, "experiment", c.experiment, "a string", errors);
    if (j.contains("n_list")) {
        grab(j, "n_list", c.n_list, "a list of integers", errors);
        for (int n : c.n_list)
            if (c.M > 0 && (n <= 0 || n >= c.M / 2))
                errors.push_back("n_list: entries must satisfy 0 < n < M/2 (aliasing)");
    }
    if (j.contains("ensemble") && grab(j, "ensemble", c.ensemble, "an integer", errors) &&
        c.ensemble < 1)
        errors.push_back("ensemble: must be >= 1");
    if (j.contains("burn_in") && grab(j, "burn_in", c.burn_in, "a number", errors) &&
        c.burn_in < 0.0)
        errors.push_back("burn_in: must be >= 0");
    if (j.contains("tail_list")) {
        grab(j, "tail_list", c.tail_list, "a list of integers", errors);
        for (int n : c.tail_list)
            if (c.M > 0 && (n < 0 || n >= c.M / 2))
                errors.push_back("tail_list: cutoff exceeds resolved band");
    }
    if (j.contains("hs_list")) grab(j, "hs_list", c.hs_list, "a list of numbers", errors);
    if (j.contains("probes_kmax") &&
        grab(j, "probes_kmax", c.probes_kmax, "an integer", errors) && c.probes_kmax < 0)
        errors.push_back("probes_kmax: must be >= 0");
    if (j.contains("a0")) {
        double v = 0.0;
        if (grab(j, "a0", v, "a number", errors)) {
            c.a0 = v;
            if (v < 0.0) errors.push_back("a0: must be >= 0");
        }
    }

    if (j.contains("trials") && grab(j, "trials", c.trials, "an integer", errors) &&
        c.trials < 1)
        errors.push_back("trials: must be >= 1");
    if (j.contains("L") && grab(j, "L", c.L, "an integer", errors) &&
        (c.L <= 0 || c.L % 2 != 0))
        errors.push_back("L: must be a positive even integer");
    if (j.contains("window") && grab(j, "window", c.window, "a number", errors) &&
        !(c.window > 0.0))
        errors.push_back("window: must be positive");
    if (j.contains("eps") && grab(j, "eps", c.eps, "a number", errors) &&
        !(c.eps > 0.0 && c.eps < 0.5))
        errors.push_back("eps: must lie in (0, 0.5)");
    if (j.contains("N_list")) {
        grab(j, "N_list", c.N_list, "a list of integers", errors);
        for (int n : c.N_list)
            if (c.M > 0 && (n <= 0 || n >= c.M / 2))
                errors.push_back("N_list: cutoff exceeds resolved band");
    }

    if (j.contains("seed")) grab(j, "seed", c.seed, "an unsigned integer", errors);
    if (j.contains("out_dir")) grab(j, "out_dir", c.out_dir, "a string", errors);
    if (j.contains("formats")) {
        grab(j, "formats", c.formats, "a list of strings", errors);
        for (const std::string& f : c.formats)
            if (f != "csv" && f != "json") errors.push_back("formats: must be csv or json");
    }
    if (j.contains("checkpoint_every") &&
        grab(j, "checkpoint_every", c.checkpoint_every, "an integer", errors) &&
        c.checkpoint_every < 0)
        errors.push_back("checkpoint_every: must be >= 0");

    // mode lists must fit the grid
    if (c.M > 0) {
        for (const ModeAmp& m : c.f_modes)
            if (m.k <= -c.M / 2 || m.k >= c.M / 2)
                errors.push_back("f: mode outside resolved band");
        for (const ModeAmp& m : c.u0_modes)
            if (m.k <= -c.M / 2 || m.k >= c.M / 2)
                errors.push_back("u0: mode outside resolved band");
        if (c.f_profile && (c.f_profile->kmax < 0 || c.f_profile->kmax >= c.M / 2))
            errors.push_back("f_profile: kmax exceeds resolved band");
        if (c.u0_profile && (c.u0_profile->kmax < 0 || c.u0_profile->kmax >= c.M / 2))
            errors.push_back("u0_profile: kmax exceeds resolved band");
    }

    if (errors.empty()) res.config = std::move(c);
    return res;
}

namespace {

json mode_list_json(const std::vector<ModeAmp>& modes) {
    json a = json::array();
    for (const ModeAmp& m : modes) a.push_back({m.k, {m.amp.real(), m.amp.imag()}});
    return a;
}

json profile_json(const ProfileSpec& p) {
    return {{"exponent", p.exponent}, {"kmax", p.kmax}, {"amplitude", p.amplitude}};
}

const char* method_name(Method m) {
    switch (m) {
        case Method::strang_split: return "strang_split";
        case Method::etd_rk2: return "etd_rk2";
        case Method::rk4_reference: return "rk4_reference";
    }
    return "?";
}

}  // namespace

std::string canonical_config(const SimConfig& c) {
    json j;  // nlohmann objects keep keys sorted
    j["gamma"] = c.gamma;
    j["nonlin_sign"] = c.nonlin_sign;
    j["nonlinearity"] = c.nonlinearity;
    j["f"] = mode_list_json(c.f_modes);
    if (c.f_profile) j["f_profile"] = profile_json(*c.f_profile);
    j["u0"] = mode_list_json(c.u0_modes);
    if (c.u0_profile) j["u0_profile"] = profile_json(*c.u0_profile);
    if (c.u0_scale) j["u0_scale"] = *c.u0_scale;
    j["M"] = c.M;
    j["N"] = c.N;
    j["pad"] = c.pad;
    j["method"] = method_name(c.method);
    j["dt"] = c.dt_value();
    j["horizon"] = c.horizon;
    j["store_every"] = c.store_every;
    if (!c.experiment.empty()) j["experiment"] = c.experiment;
    if (!c.n_list.empty()) j["n_list"] = c.n_list;
    j["ensemble"] = c.ensemble;
    j["burn_in"] = c.burn_in;
    if (!c.tail_list.empty()) j["tail_list"] = c.tail_list;
    j["hs_list"] = c.hs_list;
    j["probes_kmax"] = c.probes_kmax;
    if (c.a0) j["a0"] = *c.a0;
    j["trials"] = c.trials;
    j["L"] = c.L;
    j["window"] = c.window;
    j["eps"] = c.eps;
    if (!c.N_list.empty()) j["N_list"] = c.N_list;
    j["seed"] = c.seed;
    j["checkpoint_every"] = c.checkpoint_every;
    // out_dir/formats deliberately excluded: they do not affect the dynamics
    return j.dump();
}

std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t config_hash(const SimConfig& cfg) {
    const std::string s = canonical_config(cfg);
    return fnv1a(s.data(), s.size());
}

namespace {

SpectralField realize(int M, const std::vector<ModeAmp>& modes,
                      const std::optional<ProfileSpec>& profile, std::uint64_t seed_stream) {
    SpectralField f(M);
    for (const ModeAmp& m : modes) f.at(m.k) += m.amp;
    if (profile) {
        Rng rng(seed_stream);
        for (int k = -profile->kmax; k <= profile->kmax; ++k) {
            const double mag =
                profile->amplitude * std::pow(1.0 + static_cast<double>(k) * k,
                                              profile->exponent / 2.0);
            const double phase = rng.uniform(0.0, two_pi);
            f.at(k) += mag * cplx{std::cos(phase), std::sin(phase)};
        }
    }
    return f;
}

}  // namespace

SpectralField build_forcing(const SimConfig& cfg) {
    return realize(cfg.M, cfg.f_modes, cfg.f_profile, derive_seed(cfg.seed, 101));
}

SpectralField build_initial(const SimConfig& cfg, std::uint64_t member) {
    SpectralField u =
        realize(cfg.M, cfg.u0_modes, cfg.u0_profile, derive_seed(cfg.seed, 202 + member));
    if (cfg.u0_scale) {
        const double n = std::sqrt(l2_norm_sq(u));
        if (n > 0.0) u *= (*cfg.u0_scale / n);
    }
    return u;
}

PhysParams build_phys(const SimConfig& cfg) {
    PhysParams p;
    p.gamma = cfg.gamma;
    p.forcing = build_forcing(cfg);
    p.nonlin_sign = cfg.nonlin_sign;
    p.cubic_enabled = cfg.nonlinearity;
    return p;
}

}  // namespace dnls
