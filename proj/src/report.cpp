#include "rankpref/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rankpref {

namespace {

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_report_csv(std::span<const DiscordanceReport> table, std::ostream& out) {
    out << report_csv_header << '\n';
    for (const auto& r : table) {
        out << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << short_real(r.r_hi) << ','
            << short_real(r.r_lo) << ',' << r.n_pairs << ',' << r.discordant << ',' << r.concordant
            << ',' << r.ties << ',' << r.skipped << ',' << real(r.kendall_tau) << ','
            << real(r.rmse_withheld) << '\n';
    }
}

void write_report_svg(std::span<const DiscordanceReport> table, std::ostream& out) {
    // Panels in first-seen gap order, bars in first-seen method order.
    std::vector<std::pair<double, double>> gaps;
    std::vector<std::string> methods;
    for (const auto& r : table) {
        if (std::find(gaps.begin(), gaps.end(), std::pair{r.r_hi, r.r_lo}) == gaps.end())
            gaps.emplace_back(r.r_hi, r.r_lo);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
    }
    std::size_t peak = 1;
    for (const auto& r : table) peak = std::max(peak, r.discordant);

    static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const double panel_w = 60.0 + 40.0 * static_cast<double>(methods.size());
    const double panel_h = 260.0, plot_h = 180.0, top = 40.0;
    const double width = panel_w * static_cast<double>(gaps.size()) + 20.0;
    const double height = panel_h + 20.0 * static_cast<double>(methods.size()) + 20.0;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << short_real(width)
        << "\" height=\"" << short_real(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        const double x0 = 10.0 + panel_w * static_cast<double>(g);
        out << "<g>\n<text x=\"" << short_real(x0 + panel_w / 2) << "\" y=\"20\" text-anchor=\"middle\">"
            << "rating " << short_real(gaps[g].first) << " vs " << short_real(gaps[g].second)
            << "</text>\n";
        out << "<line x1=\"" << short_real(x0 + 30) << "\" y1=\"" << short_real(top + plot_h)
            << "\" x2=\"" << short_real(x0 + panel_w - 10) << "\" y2=\"" << short_real(top + plot_h)
            << "\" stroke=\"black\"/>\n";
        for (std::size_t m = 0; m < methods.size(); ++m) {
            auto it = std::find_if(table.begin(), table.end(), [&](const DiscordanceReport& r) {
                return r.method == methods[m] && r.r_hi == gaps[g].first && r.r_lo == gaps[g].second;
            });
            if (it == table.end()) continue;
            const double h = plot_h * static_cast<double>(it->discordant) / static_cast<double>(peak);
            const double x = x0 + 35.0 + 40.0 * static_cast<double>(m);
            out << "<rect x=\"" << short_real(x) << "\" y=\"" << short_real(top + plot_h - h)
                << "\" width=\"30\" height=\"" << short_real(h) << "\" fill=\""
                << palette[m % std::size(palette)] << "\"><title>" << xml_escape(it->method) << ": "
                << it->discordant << " discordant of " << it->n_pairs << "</title></rect>\n";
            out << "<text x=\"" << short_real(x + 15) << "\" y=\"" << short_real(top + plot_h - h - 3)
                << "\" text-anchor=\"middle\">" << it->discordant << "</text>\n";
        }
        out << "</g>\n";
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const double y = panel_h + 20.0 * static_cast<double>(m);
        out << "<rect x=\"10\" y=\"" << short_real(y - 10) << "\" width=\"12\" height=\"12\" fill=\""
            << palette[m % std::size(palette)] << "\"/>\n";
        out << "<text x=\"28\" y=\"" << short_real(y) << "\">" << xml_escape(methods[m]) << "</text>\n";
    }
    out << "</svg>\n";
}

void emit_report(std::span<const DiscordanceReport> table, ReportFormat format,
                 const std::filesystem::path& path) {
    if (table.empty()) throw std::invalid_argument("report table is empty");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    if (format == ReportFormat::csv)
        write_report_csv(table, out);
    else
        write_report_svg(table, out);
    out.flush();
    if (!out) throw DataError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::vector<DiscordanceReport> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.substr(0, line.find_last_not_of('\r') + 1) != report_csv_header)
        throw DataError("report CSV: unexpected header");
    std::vector<DiscordanceReport> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 11) throw DataError("report CSV: expected 11 fields", lineno);
        try {
            DiscordanceReport r;
            r.dataset = f[0];
            r.method = f[1];
            r.r_hi = std::stod(f[2]);
            r.r_lo = std::stod(f[3]);
            r.n_pairs = std::stoull(f[4]);
            r.discordant = std::stoull(f[5]);
            r.concordant = std::stoull(f[6]);
            r.ties = std::stoull(f[7]);
            r.skipped = std::stoull(f[8]);
            r.kendall_tau = std::stod(f[9]);
            r.rmse_withheld = std::stod(f[10]);
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw DataError("report CSV: bad number", lineno);
        }
    }
    return out;
}

}  // namespace rankpref
