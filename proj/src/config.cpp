#include "swapsim/config.hpp"

#include "swapsim/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace swapsim {

namespace {

constexpr double kDeg = M_PI / 180.0;

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value, int line)
{
    const std::string v = trim(value);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
        throw ConfigError(key + ": expected a real number, got '" + v + "'", line);
    return x;
}

int parse_int_or_auto(const std::string& key, const std::string& value, int line)
{
    const std::string v = trim(value);
    if (v == "auto")
        return 0;
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || x < 0 || x > 1000000)
        throw ConfigError(key + ": expected a non-negative integer or 'auto', got '" + v + "'", line);
    return static_cast<int>(x);
}

// "bell.eta.3" -> bank, field, index 2; "bell.eta" -> all four.
bool bank_key(const std::string& key, ExperimentConfig& cfg, DetectorBank*& bank, bool& is_eta, int& index)
{
    std::string rest;
    if (key.rfind("bell.", 0) == 0) {
        bank = &cfg.bell_bank;
        rest = key.substr(5);
    } else if (key.rfind("analysis.", 0) == 0) {
        bank = &cfg.analysis_bank;
        rest = key.substr(9);
    } else {
        return false;
    }
    std::string field = rest;
    index = -1;
    const auto dot = rest.find('.');
    if (dot != std::string::npos) {
        field = rest.substr(0, dot);
        const std::string idx = rest.substr(dot + 1);
        if (idx.size() != 1 || idx[0] < '1' || idx[0] > '4')
            return false;
        index = idx[0] - '1';
    }
    if (field == "eta")
        is_eta = true;
    else if (field == "pdc")
        is_eta = false;
    else
        return false;
    return true;
}

} // namespace

std::string format_number(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

void ExperimentConfig::validate() const
{
    if (!std::isfinite(chi))
        throw ConfigError("chi is required");
    if (chi < 0.0)
        throw ConfigError("chi must be non-negative");
    auto check = [](const DetectorBank& bank, const char* name) {
        for (int k = 0; k < 4; ++k) {
            const DetectorSpec& s = bank[k];
            const std::string idx = std::to_string(k + 1);
            if (!(s.eta >= 0.0 && s.eta <= 1.0))
                throw ConfigError(std::string(name) + ".eta." + idx + " must lie in [0,1]");
            if (!(s.p_dc >= 0.0 && s.p_dc < 1.0))
                throw ConfigError(std::string(name) + ".pdc." + idx + " must lie in [0,1)");
        }
    };
    check(bell_bank, "bell");
    check(analysis_bank, "analysis");
    if (!(truncation.eps > 0.0 && truncation.eps < 1.0))
        throw ConfigError("truncation.eps must lie in (0,1)");
    if (truncation.n_max < 0 || truncation.n_max > 64)
        throw ConfigError("truncation.n_max must be 'auto' or an integer in [1,64]");
    if (!(truncation.prune >= 0.0 && truncation.prune < 1e-3))
        throw ConfigError("truncation.prune must lie in [0,1e-3)");
    if (threads < 0)
        throw ConfigError("threads must be non-negative");
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key_in, const std::string& value, int line)
{
    const std::string key = trim(key_in);
    DetectorBank* bank = nullptr;
    bool is_eta = false;
    int index = -1;
    if (key == "chi") {
        cfg.chi = parse_real(key, value, line);
        if (cfg.chi < 0.0)
            throw ConfigError("chi must be non-negative", line);
    } else if (key == "alpha") {
        cfg.alpha_real = parse_real(key, value, line) * kDeg;
    } else if (key == "bell.family") {
        const std::string v = trim(value);
        if (v == "threshold")
            cfg.bell_threshold = true;
        else if (v == "count")
            cfg.bell_threshold = false;
        else
            throw ConfigError("bell.family must be 'threshold' or 'count'", line);
    } else if (key == "truncation.n_max") {
        cfg.truncation.n_max = parse_int_or_auto(key, value, line);
    } else if (key == "truncation.eps") {
        cfg.truncation.eps = parse_real(key, value, line);
        if (!(cfg.truncation.eps > 0.0 && cfg.truncation.eps < 1.0))
            throw ConfigError("truncation.eps must lie in (0,1)", line);
    } else if (key == "truncation.prune") {
        cfg.truncation.prune = parse_real(key, value, line);
        if (!(cfg.truncation.prune >= 0.0 && cfg.truncation.prune < 1e-3))
            throw ConfigError("truncation.prune must lie in [0,1e-3)", line);
    } else if (key == "threads") {
        cfg.threads = parse_int_or_auto(key, value, line);
    } else if (bank_key(key, cfg, bank, is_eta, index)) {
        const double x = parse_real(key, value, line);
        if (is_eta && !(x >= 0.0 && x <= 1.0))
            throw ConfigError(key + " must lie in [0,1]", line);
        if (!is_eta && !(x >= 0.0 && x < 1.0))
            throw ConfigError(key + " must lie in [0,1)", line);
        for (int k = 0; k < 4; ++k) {
            if (index >= 0 && k != index)
                continue;
            (is_eta ? (*bank)[k].eta : (*bank)[k].p_dc) = x;
        }
    } else {
        throw ConfigError("unknown key '" + key + "'", line);
    }
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    apply_config_entry(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config_text(const std::string& text, bool require_chi)
{
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("empty key", lineno);
        apply_config_entry(cfg, key, line.substr(eq + 1), lineno);
    }
    if (require_chi)
        cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, bool require_chi)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), require_chi);
}

std::vector<std::pair<std::string, std::string>> describe_config(const ExperimentConfig& cfg)
{
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("chi", format_number(cfg.chi));
    out.emplace_back("alpha", format_number(cfg.alpha_real / kDeg));
    out.emplace_back("bell.family", cfg.bell_threshold ? "threshold" : "count");
    for (const auto& [name, bank] : {std::pair<const char*, const DetectorBank*>{"bell", &cfg.bell_bank},
                                     std::pair<const char*, const DetectorBank*>{"analysis", &cfg.analysis_bank}}) {
        for (int k = 0; k < 4; ++k)
            out.emplace_back(std::string(name) + ".eta." + std::to_string(k + 1), format_number((*bank)[k].eta));
        for (int k = 0; k < 4; ++k)
            out.emplace_back(std::string(name) + ".pdc." + std::to_string(k + 1), format_number((*bank)[k].p_dc));
    }
    out.emplace_back("truncation.n_max", cfg.truncation.n_max > 0 ? std::to_string(cfg.truncation.n_max) : "auto");
    out.emplace_back("truncation.eps", format_number(cfg.truncation.eps));
    out.emplace_back("truncation.prune", format_number(cfg.truncation.prune));
    out.emplace_back("threads", cfg.threads > 0 ? std::to_string(cfg.threads) : "auto");
    return out;
}

} // namespace swapsim
