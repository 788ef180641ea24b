#include "rankpref/methods.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rankpref {

std::string MethodSpec::label() const {
    switch (kind) {
        case MethodKind::uc: return "UC";
        case MethodKind::sc: return "SC";
        case MethodKind::svd: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "SVD(%g)", fraction);
            return buf;
        }
    }
    return "?";
}

FittedMethod fit_method(const MethodSpec& spec, const SparseRatingMatrix& matrix,
                        const MethodOptions& opts) {
    FittedMethod out;
    switch (spec.kind) {
        case MethodKind::uc: {
            auto m = std::make_unique<ConsistencyModel>(fit_uc(matrix, opts.balance));
            out.balance_stats = m->fit_stats();
            out.model = std::move(m);
            break;
        }
        case MethodKind::sc: {
            auto m = std::make_unique<ConsistencyModel>(fit_sc(matrix, opts.balance));
            out.balance_stats = m->fit_stats();
            out.model = std::move(m);
            break;
        }
        case MethodKind::svd:
            out.model = std::make_unique<SvdModel>(fit_svd(matrix, spec.fraction, opts.svd));
            break;
    }
    return out;
}

std::vector<MethodSpec> parse_methods(const std::string& list,
                                      const std::vector<double>& svd_fractions) {
    std::vector<MethodSpec> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }),
                  tok.end());
        std::transform(tok.begin(), tok.end(), tok.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (tok.empty()) continue;
        if (tok == "uc") {
            out.push_back({MethodKind::uc});
        } else if (tok == "sc") {
            out.push_back({MethodKind::sc});
        } else if (tok == "svd") {
            for (double f : svd_fractions) {
                retained_rank(f, 1, 1);  // validates the range
                out.push_back({MethodKind::svd, f});
            }
        } else if (tok.starts_with("svd:")) {
            double f;
            try {
                f = std::stod(tok.substr(4));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad SVD fraction in '" + tok + "'");
            }
            retained_rank(f, 1, 1);
            out.push_back({MethodKind::svd, f});
        } else {
            throw std::invalid_argument("unknown method '" + tok + "'");
        }
    }
    return out;
}

}  // namespace rankpref
