#include "rankpref/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace rankpref {

namespace {

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + s + "' in " + what);
    }
    if (used != s.size()) throw ConfigError("bad number '" + s + "' in " + what);
    return v;
}

std::size_t to_count(const std::string& s, const std::string& what) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw ConfigError("expected a nonnegative integer for " + what + ", got '" + s + "'");
    return static_cast<std::size_t>(std::stoull(s));
}

bool to_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected true/false for " + what + ", got '" + s + "'");
}

}  // namespace

std::vector<RatingGap> parse_gaps(const std::string& text) {
    std::vector<RatingGap> out;
    std::string norm = text;
    std::replace(norm.begin(), norm.end(), ';', ' ');
    std::istringstream ss(norm);
    std::string item;
    while (ss >> item) {
        std::replace(item.begin(), item.end(), ':', ',');
        auto comma = item.find(',');
        if (comma == std::string::npos || item.find(',', comma + 1) != std::string::npos)
            throw ConfigError("gap '" + item + "' must look like hi,lo");
        out.push_back({to_real(item.substr(0, comma), "gap"), to_real(item.substr(comma + 1), "gap")});
    }
    if (out.empty()) throw ConfigError("no gaps given");
    return out;
}

std::vector<double> parse_fractions(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = strip(tok);
        if (tok.empty()) continue;
        double f = to_real(tok, "svd_fractions");
        if (!(f > 0 && f <= 1)) throw ConfigError("SVD fraction " + tok + " outside (0, 1]");
        out.push_back(f);
    }
    if (out.empty()) throw ConfigError("no SVD fractions given");
    return out;
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    std::map<std::string, std::pair<std::string, std::size_t>> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        auto key = strip(line.substr(0, eq));
        auto value = strip(line.substr(eq + 1));
        if (!kv.emplace(key, std::pair{value, lineno}).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    std::vector<double> fractions = default_svd_fractions;
    std::string methods = "uc,sc,svd";
    for (const auto& [key, entry] : kv) {
        const auto& [value, ln] = entry;
        const auto where = "line " + std::to_string(ln) + ": ";
        try {
            if (key == "dataset") cfg.dataset = resolve(value);
            else if (key == "format") {
                if (value == "movielens") cfg.format = DataFormat::movielens;
                else if (value == "csv") cfg.format = DataFormat::csv;
                else throw ConfigError("format must be movielens or csv");
            } else if (key == "csv_header") cfg.csv_header = to_bool(value, key);
            else if (key == "dataset_name") cfg.dataset_name = value;
            else if (key == "methods") methods = value;
            else if (key == "svd_fractions") fractions = parse_fractions(value);
            else if (key == "gaps") cfg.gaps = parse_gaps(value);
            else if (key == "seed") cfg.seed = to_count(value, key);
            else if (key == "max_pairs") {
                if (value != "all") cfg.max_pairs = to_count(value, key);
            } else if (key == "max_users") cfg.max_users = to_count(value, key);
            else if (key == "max_items") cfg.max_items = to_count(value, key);
            else if (key == "tol") cfg.options.balance.tol = to_real(value, key);
            else if (key == "max_iter") cfg.options.balance.max_iter = to_count(value, key);
            else if (key == "clamp") cfg.clamp = to_bool(value, key);
            else if (key == "out_csv") cfg.out_csv = resolve(value);
            else if (key == "out_svg") cfg.out_svg = resolve(value);
            else throw ConfigError("unknown key '" + key + "'");
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    try {
        cfg.methods = parse_methods(methods, fractions);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.dataset.empty()) throw ConfigError("missing required key 'dataset'");
    if (!(cfg.options.balance.tol > 0)) throw ConfigError("tol must be positive");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.parent_path());
}

}  // namespace rankpref
