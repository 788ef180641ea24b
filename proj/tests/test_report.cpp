#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "rankpref/config.hpp"
#include "rankpref/report.hpp"

using namespace rankpref;

namespace {

std::vector<DiscordanceReport> sample_table(std::size_t methods, std::size_t gaps) {
    std::vector<DiscordanceReport> t;
    const char* names[] = {"UC", "SC", "SVD(0.1)", "SVD(0.3)", "SVD(0.6)", "SVD(0.9)"};
    for (std::size_t g = 0; g < gaps; ++g)
        for (std::size_t m = 0; m < methods; ++m) {
            DiscordanceReport r;
            r.dataset = "ml-100k";
            r.method = names[m % 6];
            r.r_hi = 5;
            r.r_lo = static_cast<double>(g + 1);
            r.n_pairs = 700 + 10 * g;
            r.discordant = 100 + 7 * m + 31 * g;
            r.skipped = m % 2;
            r.ties = g;
            r.concordant = r.n_pairs - r.discordant - r.ties - r.skipped;
            const double n = static_cast<double>(r.concordant + r.discordant + r.ties);
            r.kendall_tau = (static_cast<double>(r.concordant) - static_cast<double>(r.discordant)) / n;
            r.rmse_withheld = 1.0 / 3.0 + static_cast<double>(m);
            t.push_back(r);
        }
    return t;
}

}  // namespace

TEST_CASE("csv report: header, cardinality and exact round trip") {
    auto table = sample_table(6, 4);
    std::stringstream ss;
    write_report_csv(table, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "dataset,method,r_hi,r_lo,n_pairs,discordant,concordant,ties,skipped,kendall_tau,rmse_withheld");
    std::size_t rows = 0;
    for (std::string line; std::getline(ss, line);) rows += !line.empty();
    CHECK(rows == 24);

    ss.clear();
    ss.seekg(0);
    auto back = read_report_csv(ss);
    CHECK(back == table);
}

TEST_CASE("csv fields with commas are quoted") {
    auto table = sample_table(1, 1);
    table[0].dataset = "douban, converted";
    std::stringstream ss;
    write_report_csv(table, ss);
    auto back = read_report_csv(ss);
    CHECK(back[0].dataset == "douban, converted");
}

TEST_CASE("svg with a single row") {
    auto table = sample_table(1, 1);
    std::stringstream ss;
    write_report_svg(table, ss);
    const auto svg = ss.str();
    CHECK(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    CHECK(svg.ends_with("</svg>\n"));
    std::regex bar("<rect x=\"[0-9.]+\" y=\"[0-9.]+\" width=\"30\"");
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), bar), std::sregex_iterator()) == 1);
    // Balanced groups.
    auto count = [&](const std::string& s) {
        std::size_t n = 0;
        for (auto p = svg.find(s); p != std::string::npos; p = svg.find(s, p + 1)) ++n;
        return n;
    };
    CHECK(count("<g>") == count("</g>"));
}

TEST_CASE("svg panels and bars") {
    std::stringstream ss;
    write_report_svg(sample_table(5, 4), ss);
    const auto svg = ss.str();
    std::regex bar("width=\"30\"");
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), bar), std::sregex_iterator()) == 20);
    CHECK(svg.find("rating 5 vs 4") != std::string::npos);
}

TEST_CASE("emit_report errors") {
    std::vector<DiscordanceReport> empty;
    CHECK_THROWS_AS(emit_report(empty, ReportFormat::csv, "/tmp/never.csv"), std::invalid_argument);
    CHECK_THROWS_AS(emit_report(sample_table(1, 1), ReportFormat::csv, "/nonexistent-dir/x.csv"),
                    DataError);
    auto path = std::filesystem::temp_directory_path() / "rankpref_report_test.csv";
    emit_report(sample_table(2, 2), ReportFormat::csv, path);
    std::ifstream in(path);
    CHECK(read_report_csv(in).size() == 4);
    std::filesystem::remove(path);
}

TEST_CASE("config parsing") {
    std::istringstream in(R"(# experiment
dataset = ratings.csv
format = csv
dataset_name = ml-100k
methods = uc, sc, svd
svd_fractions = 0.2, 0.4
gaps = 5,1; 5,2
seed = 7
max_pairs = 500
max_users = 1500
tol = 1e-9
max_iter = 100
clamp = true
out_csv = out/report.csv
)");
    auto c = parse_config(in, "/data");
    CHECK(c.dataset == std::filesystem::path("/data/ratings.csv"));
    CHECK(c.format == DataFormat::csv);
    CHECK(c.methods.size() == 4);
    CHECK(c.methods[3].fraction == 0.4);
    REQUIRE(c.gaps.size() == 2);
    CHECK(c.gaps[1] == RatingGap{5, 2});
    CHECK(c.seed == 7);
    CHECK(c.max_pairs == 500u);
    CHECK(c.max_users == 1500u);
    CHECK(c.options.balance.tol == 1e-9);
    CHECK(c.options.balance.max_iter == 100);
    CHECK(c.clamp);
    CHECK(*c.out_csv == std::filesystem::path("/data/out/report.csv"));
    CHECK_FALSE(c.out_svg);
}

TEST_CASE("config defaults and errors") {
    std::istringstream minimal("dataset = /abs/ratings.dat\n");
    auto c = parse_config(minimal);
    CHECK(c.methods.size() == 5);
    CHECK(c.gaps == default_gaps);
    CHECK(c.seed == 42);
    CHECK_FALSE(c.max_pairs);

    auto fails = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    };
    fails("format = csv\n");                      // no dataset
    fails("dataset = x\nbogus = 1\n");            // unknown key
    fails("dataset = x\nseed = -3\n");            // not a count
    fails("dataset = x\nmethods = uc,foo\n");     // unknown method
    fails("dataset = x\ngaps = 5\n");             // malformed gap
    fails("dataset = x\ndataset = y\n");          // duplicate key
    fails("dataset = x\nsvd_fractions = 0\n");    // out of range
    fails("dataset x\n");                         // not key = value

    // A gap with a rating outside the scale parses but fails validation.
    std::istringstream out_of_scale("dataset = x\ngaps = 5,6\n");
    auto bad = parse_config(out_of_scale);
    CHECK_THROWS_WITH_AS(validate(bad, RatingScale{}), doctest::Contains("outside scale"),
                         std::invalid_argument);
}
