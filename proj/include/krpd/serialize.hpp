#pragma once

// Model files. A detector is stored as one JSON document:
//
//   {
//     "format": "krpd-model", "version": 1,
//     "detector": "rpd" | "krpd" | "krpd-rff" | "kpca" | "knn",
//     "params": {"gamma": g, "size": M|D|k, "directions": L},
//     "input_dim": d,
//     "depth": {"seed": s, "directions": [[...] x L], "medians": [...], "mads": [...], "active": [...]},
//     "kpca":  {"kernel": {"family": "rbf", "gamma": g}, "requested_components": M,
//               "eigenvalues": [...], "coefficients": [[...] x N], "row_means": [...],
//               "grand_mean": m, "train_features": [[...] x N]},
//     "rff":   {"gamma": g, "seed": s, "frequencies": [[...] x D], "phases": [...]},
//     "knn":   {"k": k, "train_features": [[...] x N]}
//   }
//
// Only the blocks the detector needs are present. Doubles are written with
// round-trip precision, so a loaded model scores bit-identically.

#include "krpd/detector.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>

namespace krpd {

namespace detail {

using nlohmann::json;

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <typename M>
M matrix_from_json(const json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw DataError("model file: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

inline Vector vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json kpca_to_json(const KpcaModel& k) {
  const auto& g = k.gram_model();
  return {{"kernel", {{"family", std::string(to_string(k.spec().family))}, {"gamma", k.spec().gamma}}},
          {"requested_components", k.requested_components()},
          {"eigenvalues", vector_to_json(k.eigenvalues())},
          {"coefficients", matrix_to_json(k.coefficients())},
          {"row_means", vector_to_json(g.row_means())},
          {"grand_mean", g.grand_mean()},
          {"train_features", matrix_to_json(g.train_features())}};
}

inline KpcaModel kpca_from_json(const json& j) {
  const auto family = parse_kernel_family(j.at("kernel").at("family").get<std::string>());
  if (!family) throw DataError("model file: unknown kernel family");
  KernelSpec spec{*family, j.at("kernel").at("gamma").get<double>()};
  auto train = matrix_from_json<RowMatrix>(j.at("train_features"));
  // The Gram matrix is re-evaluated (deterministically) to rebuild the training
  // embedding; the stored centring statistics are used as-is.
  GramModel fresh = fit_gram(spec, train);
  GramModel gram(spec, std::move(train), fresh.gram(), vector_from_json(j.at("row_means")),
                 j.at("grand_mean").get<double>());
  return KpcaModel(std::move(gram), vector_from_json(j.at("eigenvalues")), matrix_from_json<Matrix>(j.at("coefficients")),
                   j.at("requested_components").get<Eigen::Index>());
}

inline json rff_to_json(const RffMap& r) {
  return {{"gamma", r.gamma},
          {"seed", r.seed},
          {"frequencies", matrix_to_json(r.frequencies)},
          {"phases", vector_to_json(r.phases)}};
}

inline RffMap rff_from_json(const json& j) {
  RffMap r;
  r.gamma = j.at("gamma").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.frequencies = matrix_from_json<Matrix>(j.at("frequencies"));
  r.phases = vector_from_json(j.at("phases"));
  return r;
}

}  // namespace detail

inline nlohmann::json detector_to_json(const Detector& det) {
  using detail::json;
  const auto& p = det.params();
  json out = {{"format", "krpd-model"},
              {"version", 1},
              {"detector", std::string(to_string(det.kind()))},
              {"params", {{"gamma", p.gamma}, {"size", p.size}, {"directions", p.directions}}}};
  if (const auto* s = std::get_if<DepthScorer>(&det.model())) {
    out["input_dim"] = s->input_dim();
    out["depth"] = {{"seed", s->directions().seed},
                    {"directions", detail::matrix_to_json(s->directions().directions)},
                    {"medians", detail::vector_to_json(s->medians())},
                    {"mads", detail::vector_to_json(s->mads())},
                    {"active", s->active()}};
    if (const auto* k = s->kpca()) out["kpca"] = detail::kpca_to_json(*k);
    if (const auto* r = s->rff()) out["rff"] = detail::rff_to_json(*r);
  } else if (const auto* k = std::get_if<KpcaModel>(&det.model())) {
    out["input_dim"] = k->n_dims();
    out["kpca"] = detail::kpca_to_json(*k);
  } else if (const auto* n = std::get_if<KnnModel>(&det.model())) {
    out["input_dim"] = n->train().cols();
    out["knn"] = {{"k", n->k()}, {"train_features", detail::matrix_to_json(n->train())}};
  }
  return out;
}

inline Detector detector_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "krpd-model" || j.at("version") != 1) throw DataError("not a krpd model file (version 1)");
    const auto kind = parse_detector_kind(j.at("detector").get<std::string>());
    if (!kind) throw DataError("model file: unknown detector");
    const auto& jp = j.at("params");
    HyperParams p{jp.at("gamma").get<double>(), jp.at("size").get<Eigen::Index>(), jp.at("directions").get<Eigen::Index>()};
    const auto input_dim = j.at("input_dim").get<Eigen::Index>();

    switch (*kind) {
      case DetectorKind::Kpca:
        return {*kind, p, detail::kpca_from_json(j.at("kpca"))};
      case DetectorKind::Knn:
        return {*kind, p, KnnModel(detail::matrix_from_json<RowMatrix>(j.at("knn").at("train_features")),
                                   j.at("knn").at("k").get<Eigen::Index>())};
      default: break;
    }
    const auto& jd = j.at("depth");
    DirectionSet dirs{detail::matrix_from_json<RowMatrix>(jd.at("directions")), jd.at("seed").get<std::uint64_t>()};
    DepthScorer::Embedding emb;
    if (*kind == DetectorKind::Krpd) emb = detail::kpca_from_json(j.at("kpca"));
    if (*kind == DetectorKind::KrpdRff) emb = detail::rff_from_json(j.at("rff"));
    return {*kind, p,
            DepthScorer(std::move(dirs), detail::vector_from_json(jd.at("medians")), detail::vector_from_json(jd.at("mads")),
                        jd.at("active").get<std::vector<bool>>(), std::move(emb), input_dim)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_detector(const Detector& det, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << detector_to_json(det).dump(1) << '\n';
  if (!out) throw DataError("I/O error writing " + path.string());
}

inline Detector load_detector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return detector_from_json(j);
}

}  // namespace krpd
