#include "decospace/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace decospace {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw config_error("cli", "parse",
                       origin + ":" + std::to_string(line) + ": " + what);
}

struct Value {
    std::string raw;
    std::string origin;
    int line = 0;

    double number() const {
        std::string t = trim(raw);
        if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            fail(origin, line, "expected a number, got '" + t + "'");
        }
        // Allow simple fractions like 1/2 for the quasi-norm exponents.
        if (used < t.size() && t[used] == '/') {
            std::size_t used2 = 0;
            double den = std::stod(t.substr(used + 1), &used2);
            if (den == 0.0 || used + 1 + used2 != t.size())
                fail(origin, line, "malformed fraction '" + t + "'");
            return v / den;
        }
        if (used != t.size()) fail(origin, line, "trailing characters in number '" + t + "'");
        return v;
    }

    int integer() const {
        double v = number();
        if (v != std::floor(v)) fail(origin, line, "expected an integer, got '" + raw + "'");
        return static_cast<int>(v);
    }

    std::string word() const {
        std::string t = trim(raw);
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
            return t.substr(1, t.size() - 2);
        return t;
    }

    std::vector<double> numbers() const {
        std::string t = trim(raw);
        if (!t.empty() && t.front() == '[') {
            if (t.back() != ']') fail(origin, line, "unterminated array");
            t = t.substr(1, t.size() - 2);
        }
        std::vector<double> out;
        std::stringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ',')) {
            Value v{item, origin, line};
            out.push_back(v.number());
        }
        if (out.empty()) fail(origin, line, "expected at least one number");
        return out;
    }
};

void apply_prototype_key(PrototypeConfig& pc, const std::string& key, const Value& v) {
    if (key == "kind")
        pc.kind = v.word();
    else if (key == "a")
        pc.a = v.number();
    else if (key == "order")
        pc.order = v.integer();
    else if (key == "n")
        pc.N = v.integer();
    else if (key == "r")
        pc.R = v.number();
    else if (key == "s")
        pc.s = v.number();
    else
        fail(v.origin, v.line, "unknown key '" + key + "' in a prototype section");
}

} // namespace

PrototypeSpec PrototypeConfig::build() const {
    if (kind == "gaussian") return PrototypeSpec::gaussian(a);
    if (kind == "bspline") return PrototypeSpec::bspline(order);
    if (kind == "cutoff") return PrototypeSpec::cutoff_transform(N, R, s);
    throw config_error("cli", "prototype", "unknown prototype kind '" + kind + "'");
}

StructuredCovering ExperimentConfig::build_covering() const {
    if (covering_kind == "besov") return build_besov_covering(grid.d);
    if (covering_kind == "alpha") return build_alpha_covering(grid.d, alpha, r);
    if (covering_kind == "uniform") return build_uniform_covering(grid.d, r);
    throw config_error("cli", "covering", "unknown covering kind '" + covering_kind + "'");
}

TruncatedIndexSet ExperimentConfig::build_truncation() const {
    return truncate(build_covering(), Xi);
}

ModerateWeightSpec ExperimentConfig::build_weight() const {
    if (s == 0.0) return ModerateWeightSpec::one();
    if (covering_kind == "besov") return ModerateWeightSpec::dyadic(s);
    if (covering_kind == "alpha") return ModerateWeightSpec::alpha_power(s, alpha);
    return ModerateWeightSpec::alpha_power(s, 0.0);
}

WeightSpec ExperimentConfig::build_space_weight() const {
    return (mu == 0.0) ? WeightSpec::one() : WeightSpec::bracket(mu);
}

CriteriaParams ExperimentConfig::build_criteria() const {
    CriteriaParams c = criteria;
    c.p = p;
    c.q = q;
    c.mu = mu;
    return c;
}

void ExperimentConfig::validate() const {
    if (grid.d != 1 && grid.d != 2)
        throw config_error("cli", "grid", "d must be 1 or 2");
    if (grid.n < 8) throw config_error("cli", "grid", "n must be at least 8");
    if (!(grid.L > 0.0)) throw config_error("cli", "grid", "L must be positive");
    if (covering_kind != "besov" && covering_kind != "alpha" && covering_kind != "uniform")
        throw config_error("cli", "covering", "unknown covering kind '" + covering_kind + "'");
    if (covering_kind == "alpha" && !(alpha >= 0.0 && alpha < 1.0))
        throw config_error("cli", "covering", "alpha must lie in [0, 1)");
    if (!(r > 0.0)) throw config_error("cli", "covering", "r must be positive");
    if (!(Xi > 0.0)) throw config_error("cli", "covering", "Xi must be positive");
    if (partition_N < 1) throw config_error("cli", "partition", "N must be >= 1");
    if (!(plateau_blend >= 0.0 && plateau_blend <= 1.0))
        throw config_error("cli", "partition", "plateau_blend must lie in [0, 1]");
    if (!(p > 0.0) || !(q > 0.0))
        throw config_error("cli", "space", "p and q must be positive");
    if (deltas.empty()) throw config_error("cli", "frame", "need at least one delta");
    for (double d0 : deltas)
        if (!(d0 > 0.0 && d0 <= 1.0))
            throw config_error("cli", "frame", "each delta must lie in (0, 1]");
    if (!(dual_margin > 0.0 && dual_margin < 1.0))
        throw config_error("cli", "frame", "margin must lie in (0, 1)");
    if (quadrature_nodes < 2)
        throw config_error("cli", "criteria", "nodes must be at least 2");
    if (trials < 1) throw config_error("cli", "seeds", "trials must be >= 1");
    build_criteria().validate();
    if (wavelet && covering_kind != "besov")
        throw config_error("cli", "wavelet",
                           "a separate wavelet prototype applies to Besov coverings only");
}

ExperimentConfig parse_experiment_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    bool saw_wavelet = false;
    PrototypeConfig wavelet_cfg;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        // Strip comments; values never contain '#'.
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            const char* known[] = {"grid",  "covering", "partition", "space",  "prototype",
                                   "wavelet", "frame",  "criteria",  "seeds",  "output"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                fail(origin, lineno, "unknown section [" + section + "]");
            if (section == "wavelet") saw_wavelet = true;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        Value v{trim(line.substr(eq + 1)), origin, lineno};
        if (key.empty()) fail(origin, lineno, "empty key");
        if (section.empty()) fail(origin, lineno, "key outside any section");

        if (section == "grid") {
            if (key == "d")
                cfg.grid.d = v.integer();
            else if (key == "n")
                cfg.grid.n = v.integer();
            else if (key == "l")
                cfg.grid.L = v.number();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [grid]");
        } else if (section == "covering") {
            if (key == "kind")
                cfg.covering_kind = v.word();
            else if (key == "alpha")
                cfg.alpha = v.number();
            else if (key == "r")
                cfg.r = v.number();
            else if (key == "xi")
                cfg.Xi = v.number();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [covering]");
        } else if (section == "partition") {
            if (key == "n")
                cfg.partition_N = v.integer();
            else if (key == "plateau_blend")
                cfg.plateau_blend = v.number();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [partition]");
        } else if (section == "space") {
            if (key == "p")
                cfg.p = v.number();
            else if (key == "q")
                cfg.q = v.number();
            else if (key == "s")
                cfg.s = v.number();
            else if (key == "mu")
                cfg.mu = v.number();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [space]");
        } else if (section == "prototype") {
            apply_prototype_key(cfg.prototype, key, v);
        } else if (section == "wavelet") {
            apply_prototype_key(wavelet_cfg, key, v);
        } else if (section == "frame") {
            if (key == "delta" || key == "deltas")
                cfg.deltas = v.numbers();
            else if (key == "margin")
                cfg.dual_margin = v.number();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [frame]");
        } else if (section == "criteria") {
            if (key == "p0")
                cfg.criteria.p0 = v.number();
            else if (key == "q0")
                cfg.criteria.q0 = v.number();
            else if (key == "eps")
                cfg.criteria.eps = v.number();
            else if (key == "mu0")
                cfg.criteria.mu0 = v.number();
            else if (key == "s0")
                cfg.criteria.s0 = v.number();
            else if (key == "s1")
                cfg.criteria.s1 = v.number();
            else if (key == "nodes")
                cfg.quadrature_nodes = v.integer();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [criteria]");
        } else if (section == "seeds") {
            if (key == "seed")
                cfg.seed = static_cast<std::uint64_t>(v.integer());
            else if (key == "trials")
                cfg.trials = v.integer();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [seeds]");
        } else if (section == "output") {
            if (key == "dir")
                cfg.out_dir = v.word();
            else
                fail(origin, lineno, "unknown key '" + key + "' in [output]");
        }
    }

    if (saw_wavelet) cfg.wavelet = wavelet_cfg;
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cli", "config", "cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_text(buf.str(), path);
}

} // namespace decospace
