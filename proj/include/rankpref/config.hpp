#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankpref/harness.hpp"

namespace rankpref {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gaps as "hi,lo" or "hi:lo" items separated by ';' or whitespace.
std::vector<RatingGap> parse_gaps(const std::string& text);

std::vector<double> parse_fractions(const std::string& text);

/// Key-value experiment file. One `key = value` per line, `#` starts a comment.
///
///   dataset        path (relative paths resolve against the config file)
///   format         movielens | csv
///   csv_header     true | false
///   dataset_name   label used in the report
///   methods        e.g. uc,sc,svd   (svd expands to svd_fractions)
///   svd_fractions  e.g. 0.1,0.3,0.6
///   gaps           e.g. 5,1; 5,2; 5,3; 5,4
///   seed, max_pairs (or "all"), max_users, max_items
///   tol, max_iter, clamp
///   out_csv, out_svg
///
/// Throws ConfigError with the offending line on any problem.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace rankpref
