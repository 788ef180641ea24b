#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "rankpref/audit.hpp"
#include "rankpref/components.hpp"
#include "rankpref/config.hpp"
#include "rankpref/consistency.hpp"
#include "rankpref/harness.hpp"
#include "rankpref/report.hpp"
#include "rankpref/svd.hpp"

namespace py = pybind11;
using namespace rankpref;

namespace {

MethodSpec method_from_name(const std::string& name, double fraction) {
    if (name == "uc") return {MethodKind::uc};
    if (name == "sc") return {MethodKind::sc};
    if (name == "svd") return {MethodKind::svd, fraction};
    throw std::invalid_argument("unknown method '" + name + "'");
}

py::dict report_dict(const DiscordanceReport& r) {
    py::dict d;
    d["dataset"] = r.dataset;
    d["method"] = r.method;
    d["r_hi"] = r.r_hi;
    d["r_lo"] = r.r_lo;
    d["n_pairs"] = r.n_pairs;
    d["discordant"] = r.discordant;
    d["concordant"] = r.concordant;
    d["ties"] = r.ties;
    d["skipped"] = r.skipped;
    d["kendall_tau"] = r.kendall_tau;
    d["rmse_withheld"] = r.rmse_withheld;
    return d;
}

template <class Model>
void save_to(const Model& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    m.save(out);
}

template <class Model>
Model load_from(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return Model::load(in);
}

}  // namespace

PYBIND11_MODULE(_rankpref, m) {
    m.doc() = "C++ core of the rankpref package";

    auto data_error = py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<PredictionError>(m, "PredictionError", PyExc_LookupError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    (void)data_error;

    py::class_<SparseRatingMatrix>(m, "SparseRatingMatrix")
        .def(py::init([](std::size_t n_users, std::size_t n_items,
                         const std::vector<std::tuple<Index, Index, double>>& triples) {
                 std::vector<Rating> entries;
                 entries.reserve(triples.size());
                 for (auto [u, i, r] : triples) entries.push_back({u, i, r});
                 return SparseRatingMatrix(n_users, n_items, std::move(entries));
             }),
             py::arg("n_users"), py::arg("n_items"), py::arg("triples"))
        .def_property_readonly("n_users", &SparseRatingMatrix::n_users)
        .def_property_readonly("n_items", &SparseRatingMatrix::n_items)
        .def_property_readonly("nnz", &SparseRatingMatrix::nnz)
        .def_property_readonly("sparsity", &SparseRatingMatrix::sparsity)
        .def("triples",
             [](const SparseRatingMatrix& s) {
                 std::vector<std::tuple<Index, Index, double>> out;
                 for (const auto& e : s.entries()) out.emplace_back(e.user, e.item, e.value);
                 return out;
             })
        .def("get",
             [](const SparseRatingMatrix& s, Index u, Index i) -> std::optional<double> {
                 if (u >= s.n_users() || i >= s.n_items()) throw py::index_error();
                 auto p = s.find(u, i);
                 return p ? std::optional<double>(*p) : std::nullopt;
             })
        .def("user_id", &SparseRatingMatrix::user_label)
        .def("item_id", &SparseRatingMatrix::item_label)
        .def("__repr__", [](const SparseRatingMatrix& s) {
            return "<SparseRatingMatrix " + std::to_string(s.n_users()) + "x" +
                   std::to_string(s.n_items()) + ", nnz=" + std::to_string(s.nnz()) + ">";
        });

    m.def("load_movielens", [](const std::filesystem::path& p) { return load_movielens(p); },
          py::arg("path"));
    m.def("load_csv", [](const std::filesystem::path& p, bool header) { return load_csv(p, header); },
          py::arg("path"), py::arg("has_header") = true);
    m.def("write_csv", &write_csv, py::arg("matrix"), py::arg("path"));
    m.def("remove_entries",
          [](const SparseRatingMatrix& s, const std::vector<std::pair<Index, Index>>& cells) {
              return remove_entries(s, cells);
          },
          py::arg("matrix"), py::arg("cells"));
    m.def("connected_components",
          [](const SparseRatingMatrix& s) {
              auto c = connected_components(s);
              return py::make_tuple(c.n_components, c.component_of_user, c.component_of_item);
          },
          py::arg("matrix"), "Returns (n_components, component_of_user, component_of_item).");

    py::class_<ConsistencyModel>(m, "ConsistencyModel")
        .def_property_readonly("kind",
                               [](const ConsistencyModel& c) {
                                   return c.kind() == ConsistencyKind::shift ? "shift" : "unit";
                               })
        .def_property_readonly("row_param", &ConsistencyModel::row_param)
        .def_property_readonly("col_param", &ConsistencyModel::col_param)
        .def_property_readonly("iterations", [](const ConsistencyModel& c) { return c.fit_stats().iterations; })
        .def_property_readonly("final_residual",
                               [](const ConsistencyModel& c) { return c.fit_stats().final_residual; })
        .def_property_readonly("converged", [](const ConsistencyModel& c) { return c.fit_stats().converged; })
        .def("predict", &ConsistencyModel::predict, py::arg("user"), py::arg("item"))
        .def("save", &save_to<ConsistencyModel>, py::arg("path"))
        .def_static("load", &load_from<ConsistencyModel>, py::arg("path"));

    m.def("fit_sc",
          [](const SparseRatingMatrix& s, double tol, std::size_t max_iter) {
              return fit_sc(s, {tol, max_iter});
          },
          py::arg("matrix"), py::arg("tol") = 1e-10, py::arg("max_iter") = 5000);
    m.def("fit_uc",
          [](const SparseRatingMatrix& s, double tol, std::size_t max_iter) {
              return fit_uc(s, {tol, max_iter});
          },
          py::arg("matrix"), py::arg("tol") = 1e-10, py::arg("max_iter") = 5000);

    py::class_<SvdModel>(m, "SvdModel")
        .def_property_readonly("rank", &SvdModel::rank)
        .def_property_readonly("singular_values", &SvdModel::singular_values)
        .def_property_readonly("left_factors", &SvdModel::left_factors)
        .def_property_readonly("right_factors", &SvdModel::right_factors)
        .def_property_readonly("global_mean", [](const SvdModel& s) { return s.baseline().global_mean; })
        .def("predict", &SvdModel::predict, py::arg("user"), py::arg("item"))
        .def("save", &save_to<SvdModel>, py::arg("path"))
        .def_static("load", &load_from<SvdModel>, py::arg("path"));

    m.def("fit_svd",
          [](const SparseRatingMatrix& s, double fraction, std::uint64_t seed) {
              SvdOptions o;
              o.seed = seed;
              return fit_svd(s, fraction, o);
          },
          py::arg("matrix"), py::arg("fraction"), py::arg("seed") = 42);

    py::class_<WithholdingPlan>(m, "WithholdingPlan")
        .def_readonly("r_hi", &WithholdingPlan::r_hi)
        .def_readonly("r_lo", &WithholdingPlan::r_lo)
        .def_readonly("seed", &WithholdingPlan::seed)
        .def_property_readonly("triples",
                               [](const WithholdingPlan& p) {
                                   std::vector<std::tuple<Index, Index, Index>> out;
                                   for (const auto& t : p.triples)
                                       out.emplace_back(t.user, t.item_hi, t.item_lo);
                                   return out;
                               })
        .def("removals", &WithholdingPlan::removals)
        .def("__len__", [](const WithholdingPlan& p) { return p.triples.size(); });

    m.def("select_pairs", &select_pairs, py::arg("matrix"), py::arg("r_hi"), py::arg("r_lo"),
          py::arg("seed") = 42, py::arg("max_users") = py::none());

    py::class_<DiscordanceReport>(m, "DiscordanceReport")
        .def_readonly("dataset", &DiscordanceReport::dataset)
        .def_readonly("method", &DiscordanceReport::method)
        .def_readonly("r_hi", &DiscordanceReport::r_hi)
        .def_readonly("r_lo", &DiscordanceReport::r_lo)
        .def_readonly("n_pairs", &DiscordanceReport::n_pairs)
        .def_readonly("discordant", &DiscordanceReport::discordant)
        .def_readonly("concordant", &DiscordanceReport::concordant)
        .def_readonly("ties", &DiscordanceReport::ties)
        .def_readonly("skipped", &DiscordanceReport::skipped)
        .def_readonly("kendall_tau", &DiscordanceReport::kendall_tau)
        .def_readonly("rmse_withheld", &DiscordanceReport::rmse_withheld)
        .def("as_dict", &report_dict);

    m.def("count_discordant",
          [](const std::vector<std::optional<std::pair<double, double>>>& preds,
             const WithholdingPlan& plan) {
              std::vector<PairPrediction> pp;
              pp.reserve(preds.size());
              for (const auto& p : preds)
                  pp.push_back(p ? PairPrediction{p->first, p->second, false}
                                 : PairPrediction{0, 0, true});
              return count_discordant(pp, plan);
          },
          py::arg("predictions"), py::arg("plan"),
          "predictions: list of (pred_hi, pred_lo) tuples, or None for a skipped pair.");

    m.def("run_experiment",
          [](const SparseRatingMatrix& s, const std::string& methods,
             const std::vector<double>& svd_fractions, const std::vector<std::pair<double, double>>& gaps,
             std::uint64_t seed, std::optional<std::size_t> max_pairs, const std::string& dataset_name) {
              ExperimentConfig c;
              c.dataset_name = dataset_name;
              c.methods = parse_methods(methods, svd_fractions);
              c.gaps.clear();
              for (auto [hi, lo] : gaps) c.gaps.push_back({hi, lo});
              c.seed = seed;
              c.max_pairs = max_pairs;
              py::gil_scoped_release release;
              return run_experiment(s, c).reports();
          },
          py::arg("matrix"), py::arg("methods") = "uc,sc,svd",
          py::arg("svd_fractions") = default_svd_fractions,
          py::arg("gaps") = std::vector<std::pair<double, double>>{{5, 1}, {5, 2}, {5, 3}, {5, 4}},
          py::arg("seed") = 42, py::arg("max_pairs") = py::none(), py::arg("dataset_name") = "dataset");

    m.def("run_experiment_config",
          [](const std::filesystem::path& path) {
              auto c = load_config(path);
              auto matrix = load_dataset(c);
              auto table = run_experiment(matrix, c).reports();
              if (c.out_csv) emit_report(table, ReportFormat::csv, *c.out_csv);
              if (c.out_svg) emit_report(table, ReportFormat::svg, *c.out_svg);
              return table;
          },
          py::arg("config_path"));

    m.def("audit_consensus_order",
          [](const std::string& method, std::size_t trials, std::uint64_t seed, double fraction) {
              auto r = audit_consensus_order(method_from_name(method, fraction), trials, seed);
              py::dict d;
              d["trials"] = r.trials;
              d["violations"] = r.violations;
              d["ties"] = r.ties;
              d["regenerated"] = r.regenerated;
              return d;
          },
          py::arg("method"), py::arg("trials") = 1000, py::arg("seed") = 42, py::arg("fraction") = 0.3);
}
