#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "tmeval/alignment.hpp"
#include "tmeval/cli.hpp"
#include "tmeval/coffee.hpp"
#include "tmeval/corpusstats.hpp"
#include "tmeval/error.hpp"
#include "tmeval/interchange.hpp"
#include "tmeval/linstat.hpp"
#include "tmeval/synthgen.hpp"
#include "tmeval/topicmetrics.hpp"
#include "tmeval/version.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace tmeval;

namespace {

py::list diagnostics(const std::vector<Diagnostic>& ds) {
  py::list out;
  for (const auto& d : ds) out.append(py::dict(py::arg("code") = d.code, py::arg("message") = d.message));
  return out;
}

std::vector<Topic> topics_from_words(const std::vector<std::vector<std::string>>& words) {
  std::vector<Topic> topics;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Topic t;
    t.topic_index = static_cast<int>(i);
    for (const auto& w : words[i]) t.keywords.push_back({w, std::nullopt});
    topics.push_back(std::move(t));
  }
  return topics;
}

py::dict bundle_dict(const Bundle& b) {
  py::dict covariates;
  for (const auto& [name, values] : b.covariates.columns) covariates[py::str(name)] = values;
  return py::dict(py::arg("model_id") = b.theta.model_id, py::arg("doc_ids") = b.theta.doc_ids,
                  py::arg("topic_indices") = b.theta.topic_indices,
                  py::arg("theta") = b.theta.values, py::arg("covariates") = covariates,
                  py::arg("has_embeddings") = b.embeddings.has_value());
}

py::list effect_rows(const EffectTable& table) {
  py::list rows;
  for (const auto& r : table.rows) {
    rows.append(py::dict(py::arg("topic_index") = r.topic_index,
                         py::arg("topic_label") = r.topic_label, py::arg("term") = r.term,
                         py::arg("estimate") = r.estimate, py::arg("std_error") = r.std_error,
                         py::arg("t_value") = r.t_value, py::arg("p_value") = r.p_value,
                         py::arg("p_display") = format_p_value(r.p_value), py::arg("df") = r.df,
                         py::arg("samples_used") = r.samples_used,
                         py::arg("implied_reference") = r.implied_reference));
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topic-model evaluation and bootstrapped covariate effects";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  m.def("t_sf", &t_sf, py::arg("t"), py::arg("df"));
  m.def("format_p_value", &format_p_value, py::arg("p"));

  m.def(
      "npmi_from_counts",
      [](long long total, long long df_a, long long df_b, long long df_ab, double epsilon) {
        const auto s = CooccurrenceStats::from_counts(total, {{"a", df_a}, {"b", df_b}},
                                                      {{"a", "b", df_ab}});
        return npmi(s, "a", "b", epsilon);
      },
      py::arg("total_docs"), py::arg("df_a"), py::arg("df_b"), py::arg("df_ab"),
      py::arg("epsilon") = kDefaultEpsilon);

  m.def(
      "uniqueness",
      [](const std::vector<std::vector<std::string>>& words, int top_n) {
        const auto r = uniqueness(topics_from_words(words), top_n);
        return py::make_tuple(r.per_topic, r.model_avg);
      },
      py::arg("topics"), py::arg("top_n") = 10);
  m.def(
      "diversity",
      [](const std::vector<std::vector<std::string>>& words, int top_n) {
        return diversity(topics_from_words(words), top_n);
      },
      py::arg("topics"), py::arg("top_n") = 10);

  m.def(
      "build_design",
      [](const std::vector<std::string>& labels) {
        const auto d = build_design(labels);
        return py::dict(py::arg("values") = d.values, py::arg("columns") = d.columns,
                        py::arg("categories") = d.categories,
                        py::arg("reference") = d.reference_category);
      },
      py::arg("labels"));
  m.def(
      "ols_fit",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
        const auto f = ols_fit(x, y);
        return py::dict(py::arg("coefficients") = f.coefficients, py::arg("df_resid") = f.df_resid,
                        py::arg("rank") = f.rank,
                        py::arg("residual_sum_squares") = f.residual_sum_squares);
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "load_bundle",
      [](const fs::path& manifest, bool renormalize) {
        LoadOptions opts;
        opts.renormalize = renormalize;
        return bundle_dict(load_bundle(manifest, opts));
      },
      py::arg("manifest"), py::arg("renormalize") = false);
  m.def(
      "validate_bundle",
      [](const fs::path& manifest) {
        const auto b = load_bundle(manifest);
        const auto r = validate_bundle(b.topics, b.theta, b.covariates);
        return py::dict(py::arg("ok") = r.ok(), py::arg("errors") = diagnostics(r.errors),
                        py::arg("warnings") = diagnostics(r.warnings),
                        py::arg("doc_count") = r.doc_count,
                        py::arg("matched_doc_count") = r.matched_doc_count);
      },
      py::arg("manifest"));

  m.def(
      "effects",
      [](const fs::path& manifest, const std::string& covariate, int n_bootstrap,
         std::uint64_t seed, int min_feasible, long long merge_threshold, bool renormalize,
         int jobs) {
        CoffeeConfig config;
        config.covariate = covariate;
        config.n_bootstrap = n_bootstrap;
        config.seed = seed;
        config.min_feasible_samples = min_feasible;
        config.merge_threshold = merge_threshold;
        config.renormalize_theta = renormalize;
        config.jobs = jobs;
        const auto b = load_bundle(manifest);
        Warnings warnings;
        EffectTable table;
        {
          py::gil_scoped_release release;
          table = coffee_run(b.theta, b.covariates, config, &warnings);
        }
        attach_topic_labels(table, b.topics);
        return py::make_tuple(effect_rows(table), diagnostics(warnings));
      },
      py::arg("manifest"), py::arg("covariate"), py::arg("n_bootstrap") = 25, py::arg("seed") = 0,
      py::arg("min_feasible") = 5, py::arg("merge_threshold") = 0, py::arg("renormalize") = false,
      py::arg("jobs") = 1);

  m.def(
      "synth",
      [](const fs::path& out_dir, int n_docs, int n_topics,
         const std::vector<std::pair<std::string, double>>& categories,
         std::vector<double> base_mean, const std::map<std::pair<std::string, int>, double>& effects,
         double concentration, std::uint64_t seed) {
        SynthSpec spec;
        spec.n_docs = n_docs;
        spec.n_topics = n_topics;
        for (const auto& [label, p] : categories) spec.categories.push_back({label, p});
        if (base_mean.empty()) base_mean.assign(static_cast<std::size_t>(n_topics), 1.0 / n_topics);
        spec.base_mean = std::move(base_mean);
        spec.effects = effects;
        spec.concentration = concentration;
        spec.seed = seed;
        return write_synthetic_bundle(generate_synthetic(spec), out_dir);
      },
      py::arg("out_dir"), py::arg("n_docs"), py::arg("n_topics"), py::arg("categories"),
      py::arg("base_mean") = std::vector<double>{},
      py::arg("effects") = std::map<std::pair<std::string, int>, double>{},
      py::arg("concentration") = 50.0, py::arg("seed") = 0);

  m.def(
      "align",
      [](const std::vector<fs::path>& topic_files, const fs::path& embeddings_file, double tau,
         int top_k) {
        AlignmentConfig config;
        config.tau = tau;
        config.top_k_keywords = top_k;
        config.validate();
        const auto embeddings = read_embeddings(embeddings_file);
        std::vector<TopicSet> sets;
        std::vector<TopicVector> vectors;
        for (const auto& p : topic_files) {
          sets.push_back(read_topic_set(p));
          for (const auto& t : sets.back().topics) {
            vectors.push_back(topic_vector(sets.back().model_id, t, embeddings, config));
          }
        }
        auto report = group_topics(vectors, config);
        attach_group_labels(report, sets);
        py::list groups;
        for (const auto& g : report.groups) {
          py::list members;
          for (const auto& ref : g.members) members.append(py::make_tuple(ref.model_id, ref.topic_index));
          groups.append(py::dict(py::arg("category") = to_string(g.category),
                                 py::arg("members") = members,
                                 py::arg("avg_similarity") = g.avg_similarity,
                                 py::arg("label") = g.label));
        }
        return groups;
      },
      py::arg("topic_files"), py::arg("embeddings"), py::arg("tau") = 0.82,
      py::arg("top_k") = 30);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
  m.def("sha256_file", &cli::sha256_file, py::arg("path"));
}
