#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locinf/errors.hpp"
#include "locinf/experiment.hpp"
#include "locinf/graph_models.hpp"

// Plain-text configuration.
//
//   # comment
//   [section]
//   key = value
//
// Lists are whitespace- or comma-separated. Keys before the first section
// header belong to [model], so a bare model file is also a valid config.
//
// [model]
//   kind        sbm | chung_lu
//   n           vertex count
//   alpha       (sbm) S community proportions
//   K           (sbm) S*S kernel entries, row-major
//   w           (chung_lu) n explicit weights, or
//   w_generator (chung_lu) uniform | powerlaw
//   w_value     (uniform) common weight
//   w_exponent, w_min, w_max  (powerlaw) w_i = min(w_max, w_min ((i + 0.5) / n)^(-1/(exponent - 1)))
//
// [policy]        name = ducb_fixed_T | ducb_double | uniform_baseline; T; alpha; beta
// [ground_truth]  method = branching | monte_carlo; mc_samples
// [run]           seed; replicates; seeds (explicit per-replicate list); output_dir; threads
// [validation]    mc_samples
// [sweep]         parameter = alpha | T | beta; values

namespace locinf::config {

struct Entry {
    std::string value;
    std::size_t line = 0;
};

/// section -> key -> entry
class Document {
public:
    static Document parse(std::istream& in, const std::string& origin = "<config>") {
        Document doc;
        doc.origin_ = origin;
        std::string section = "model";
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            std::string line = trim(raw.substr(0, raw.find('#')));
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) {
                    throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
                }
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
            }
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            }
            auto& slot = doc.sections_[section][key];
            if (slot.line != 0) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate field " + section +
                                  "." + key);
            }
            slot = {trim(line.substr(eq + 1)), line_no};
        }
        return doc;
    }

    static Document load(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file " + path);
        }
        return parse(in, path);
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) != 0;
    }

    bool has_section(const std::string& section) const { return sections_.count(section) != 0; }

    std::string text(const std::string& section, const std::string& key) const {
        return entry(section, key).value;
    }

    std::optional<std::string> text_or(const std::string& section, const std::string& key) const {
        if (!has(section, key)) return std::nullopt;
        return text(section, key);
    }

    double real(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        return parse_real(e.value, where(section, key, e));
    }

    std::uint64_t integer(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        return parse_integer(e.value, where(section, key, e));
    }

    std::vector<double> reals(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        std::vector<double> out;
        for (const auto& tok : split(e.value)) {
            out.push_back(parse_real(tok, where(section, key, e)));
        }
        if (out.empty()) {
            throw ConfigError(where(section, key, e) + ": empty list");
        }
        return out;
    }

    std::vector<std::uint64_t> integers(const std::string& section, const std::string& key) const {
        const Entry& e = entry(section, key);
        std::vector<std::uint64_t> out;
        for (const auto& tok : split(e.value)) {
            out.push_back(parse_integer(tok, where(section, key, e)));
        }
        if (out.empty()) {
            throw ConfigError(where(section, key, e) + ": empty list");
        }
        return out;
    }

    /// "origin:line: field section.key" prefix for error messages.
    std::string where(const std::string& section, const std::string& key) const {
        return where(section, key, entry(section, key));
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
        if (has(section, key)) {
            throw ConfigError(where(section, key) + ": " + msg);
        }
        throw ConfigError(origin_ + ": field " + section + "." + key + ": " + msg);
    }

private:
    const Entry& entry(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        if (s == sections_.end() || s->second.count(key) == 0) {
            throw ConfigError(origin_ + ": missing field " + section + "." + key);
        }
        return s->second.at(key);
    }

    std::string where(const std::string& section, const std::string& key, const Entry& e) const {
        return origin_ + ":" + std::to_string(e.line) + ": field " + section + "." + key;
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& s) {
        std::string t = s;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream in(t);
        std::vector<std::string> out;
        std::string tok;
        while (in >> tok) out.push_back(tok);
        return out;
    }

    static double parse_real(const std::string& tok, const std::string& at) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || !std::isfinite(v)) {
            throw ConfigError(at + ": '" + tok + "' is not a finite number");
        }
        return v;
    }

    static std::uint64_t parse_integer(const std::string& tok, const std::string& at) {
        std::size_t used = 0;
        unsigned long long v = 0;
        bool ok = !tok.empty() && tok[0] != '-';
        if (ok) {
            try {
                v = std::stoull(tok, &used);
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok || used != tok.size()) {
            throw ConfigError(at + ": '" + tok + "' is not a non-negative integer");
        }
        return v;
    }

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

inline std::vector<double> powerlaw_weights(std::size_t n, double exponent, double w_min, double w_max) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        w[i] = std::min(w_max, w_min * std::pow(u, -1.0 / (exponent - 1.0)));
    }
    return w;
}

/// Builds and classifies the [model] section. Model validation errors are
/// reported as ConfigError naming the section.
inline GraphModel build_model(const Document& doc, const std::string& section = "model") {
    const std::string kind = doc.text(section, "kind");
    const std::uint64_t n = doc.integer(section, "n");
    if (n == 0) {
        doc.fail(section, "n", "must be positive");
    }
    try {
        if (kind == "sbm") {
            SbmParams p;
            p.n = n;
            p.alpha = doc.reals(section, "alpha");
            const auto k = doc.reals(section, "K");
            const std::size_t S = p.alpha.size();
            if (k.size() != S * S) {
                doc.fail(section, "K", "expected " + std::to_string(S * S) + " entries (S*S, row-major), got " +
                                           std::to_string(k.size()));
            }
            p.kernel.resize(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
            for (std::size_t l = 0; l < S; ++l) {
                for (std::size_t m = 0; m < S; ++m) {
                    p.kernel(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) = k[l * S + m];
                }
            }
            return classify_regime(std::move(p));
        }
        if (kind == "chung_lu") {
            ChungLuParams p;
            p.n = n;
            if (doc.has(section, "w")) {
                p.weights = doc.reals(section, "w");
                if (p.weights.size() != n) {
                    doc.fail(section, "w", "expected n = " + std::to_string(n) + " weights, got " +
                                               std::to_string(p.weights.size()));
                }
            } else {
                const std::string gen = doc.text(section, "w_generator");
                if (gen == "uniform") {
                    p.weights.assign(n, doc.real(section, "w_value"));
                } else if (gen == "powerlaw") {
                    const double exponent = doc.real(section, "w_exponent");
                    const double w_min = doc.real(section, "w_min");
                    const double w_max = doc.real(section, "w_max");
                    if (!(exponent > 1.0)) doc.fail(section, "w_exponent", "must be > 1");
                    if (!(w_min > 0.0)) doc.fail(section, "w_min", "must be > 0");
                    if (!(w_max >= w_min)) doc.fail(section, "w_max", "must be >= w_min");
                    p.weights = powerlaw_weights(n, exponent, w_min, w_max);
                } else {
                    doc.fail(section, "w_generator", "unknown generator '" + gen + "' (uniform | powerlaw)");
                }
            }
            return classify_regime(std::move(p));
        }
    } catch (const InvalidModel& e) {
        throw ConfigError("[" + section + "] " + e.what());
    }
    doc.fail(section, "kind", "unknown model kind '" + kind + "' (sbm | chung_lu)");
}

struct RunConfig {
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> replicate_seeds;
    std::string output_dir = "out";
    std::size_t threads = 1;
};

struct GroundTruthConfig {
    GroundTruthMethod method = GroundTruthMethod::BranchingPrediction;
    std::size_t mc_samples = 10000;
};

struct SweepConfig {
    std::string parameter;
    std::vector<double> values;
};

struct ExperimentConfig {
    PolicyConfig policy;
    GroundTruthConfig ground_truth;
    RunConfig run;
    std::size_t validation_samples = 100000;
    std::optional<SweepConfig> sweep;
};

/// Replicate r's seed: the explicit list entry if given, else derive_seed(seed, r).
inline std::vector<std::uint64_t> replicate_seeds(std::uint64_t seed, std::size_t replicates) {
    std::vector<std::uint64_t> out(replicates);
    for (std::size_t r = 0; r < replicates; ++r) {
        out[r] = derive_seed(seed, r);
    }
    return out;
}

inline ExperimentConfig parse_experiment(const Document& doc) {
    ExperimentConfig cfg;

    if (doc.has("policy", "name")) {
        const std::string name = doc.text("policy", "name");
        if (name == "ducb_fixed_T") {
            cfg.policy.kind = PolicyKind::DUcbFixedHorizon;
        } else if (name == "ducb_double") {
            cfg.policy.kind = PolicyKind::DUcbDouble;
        } else if (name == "uniform_baseline") {
            cfg.policy.kind = PolicyKind::UniformBaseline;
        } else {
            doc.fail("policy", "name", "unknown policy '" + name + "' (ducb_fixed_T | ducb_double | uniform_baseline)");
        }
    }
    if (doc.has("policy", "T")) {
        cfg.policy.horizon = doc.integer("policy", "T");
        if (cfg.policy.horizon < 1) doc.fail("policy", "T", "must be >= 1");
    }
    if (doc.has("policy", "alpha")) {
        cfg.policy.alpha = doc.real("policy", "alpha");
        if (!(cfg.policy.alpha > 0.0 && cfg.policy.alpha < 1.0)) doc.fail("policy", "alpha", "must lie in (0, 1)");
    }
    if (doc.has("policy", "beta")) {
        cfg.policy.beta = doc.real("policy", "beta");
        if (!(cfg.policy.beta >= 2.0)) doc.fail("policy", "beta", "must be >= 2");
    }

    if (doc.has("ground_truth", "method")) {
        const std::string m = doc.text("ground_truth", "method");
        if (m == "branching") {
            cfg.ground_truth.method = GroundTruthMethod::BranchingPrediction;
        } else if (m == "monte_carlo") {
            cfg.ground_truth.method = GroundTruthMethod::MonteCarlo;
        } else {
            doc.fail("ground_truth", "method", "unknown method '" + m + "' (branching | monte_carlo)");
        }
    }
    if (doc.has("ground_truth", "mc_samples")) {
        cfg.ground_truth.mc_samples = doc.integer("ground_truth", "mc_samples");
        if (cfg.ground_truth.mc_samples == 0) doc.fail("ground_truth", "mc_samples", "must be >= 1");
    }

    std::size_t replicates = 1;
    if (doc.has("run", "seed")) cfg.run.seed = doc.integer("run", "seed");
    if (doc.has("run", "replicates")) {
        replicates = doc.integer("run", "replicates");
        if (replicates == 0) doc.fail("run", "replicates", "must be >= 1");
    }
    if (doc.has("run", "seeds")) {
        cfg.run.replicate_seeds = doc.integers("run", "seeds");
    } else {
        cfg.run.replicate_seeds = replicate_seeds(cfg.run.seed, replicates);
    }
    if (doc.has("run", "output_dir")) cfg.run.output_dir = doc.text("run", "output_dir");
    if (doc.has("run", "threads")) {
        cfg.run.threads = doc.integer("run", "threads");
        if (cfg.run.threads == 0) doc.fail("run", "threads", "must be >= 1");
    }

    if (doc.has("validation", "mc_samples")) {
        cfg.validation_samples = doc.integer("validation", "mc_samples");
        if (cfg.validation_samples == 0) doc.fail("validation", "mc_samples", "must be >= 1");
    }

    if (doc.has_section("sweep")) {
        SweepConfig s;
        s.parameter = doc.text("sweep", "parameter");
        if (s.parameter != "alpha" && s.parameter != "T" && s.parameter != "beta") {
            doc.fail("sweep", "parameter", "must be alpha, T or beta");
        }
        s.values = doc.reals("sweep", "values");
        cfg.sweep = std::move(s);
    }
    return cfg;
}

} // namespace locinf::config
