#include "barrier/classifiers.hpp"
#include "barrier/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace barrier {

namespace {

using nlohmann::json;

constexpr std::string_view kFormatTag = "barrier-model";
constexpr int kFormatVersion = 1;

json to_array(const vector_t& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

vector_t from_array(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const vector_t>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json matrix_to_json(const matrix_t& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_array(m.row(i).transpose()));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

matrix_t matrix_from_json(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>();
  const auto c = j.at("cols").get<Eigen::Index>();
  matrix_t m(r, c);
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != r) throw Error(Errc::BadModelFile, "matrix rows");
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto row = from_array(data.at(static_cast<std::size_t>(i)));
    if (row.size() != c) throw Error(Errc::BadModelFile, "matrix cols");
    m.row(i) = row.transpose();
  }
  return m;
}

json tree_to_json(const TreeParams& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label, n.n_true, n.n_false});
  }
  return nodes;
}

TreeParams tree_from_json(const json& j) {
  TreeParams tree;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.label = n.at(4).get<bool>();
    node.n_true = n.at(5).get<std::size_t>();
    node.n_false = n.at(6).get<std::size_t>();
    tree.nodes.push_back(node);
  }
  const auto count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw Error(Errc::BadModelFile, "empty tree");
  for (const auto& n : tree.nodes) {
    if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
      throw Error(Errc::BadModelFile, "tree child index out of range");
    }
  }
  return tree;
}

struct ParamsToJson {
  json operator()(const ConstantParams& p) const { return {{"label", p.label}}; }
  json operator()(const RandomParams& p) const { return {{"p_true", p.p_true}, {"seed", p.seed}}; }
  json operator()(const LinearParams& p) const {
    return {{"weights", to_array(p.weights)}, {"bias", p.bias}};
  }
  json operator()(const KnnParams& p) const {
    std::vector<bool> labels(p.labels.begin(), p.labels.end());
    return {{"k", p.k}, {"points", matrix_to_json(p.points)}, {"labels", labels}};
  }
  json operator()(const TreeParams& p) const { return {{"nodes", tree_to_json(p)}}; }
  json operator()(const ForestParams& p) const {
    json trees = json::array();
    for (const auto& t : p.trees) trees.push_back(tree_to_json(t));
    return {{"trees", trees}};
  }
  json operator()(const NaiveBayesParams& p) const {
    return {{"means_false", to_array(p.means.row(0).transpose())},
            {"means_true", to_array(p.means.row(1).transpose())},
            {"variances_false", to_array(p.variances.row(0).transpose())},
            {"variances_true", to_array(p.variances.row(1).transpose())},
            {"log_prior", {p.log_prior[0], p.log_prior[1]}}};
  }
};

ModelParams params_from_json(ModelFamily family, const json& j) {
  switch (family) {
    case ModelFamily::MostFrequent:
      return ConstantParams{j.at("label").get<bool>()};
    case ModelFamily::Uniform:
    case ModelFamily::Stratified:
      return RandomParams{j.at("p_true").get<double>(), j.at("seed").get<std::uint64_t>()};
    case ModelFamily::SVM:
      return LinearParams{from_array(j.at("weights")), j.at("bias").get<double>()};
    case ModelFamily::KNN: {
      KnnParams p;
      p.k = j.at("k").get<int>();
      p.points = matrix_from_json(j.at("points"));
      const auto labels = j.at("labels").get<std::vector<bool>>();
      if (static_cast<Eigen::Index>(labels.size()) != p.points.rows()) {
        throw Error(Errc::BadModelFile, "knn labels/points mismatch");
      }
      p.labels.resize(static_cast<Eigen::Index>(labels.size()));
      for (std::size_t i = 0; i < labels.size(); ++i) p.labels[static_cast<Eigen::Index>(i)] = labels[i];
      return p;
    }
    case ModelFamily::DecisionTree:
      return tree_from_json(j.at("nodes"));
    case ModelFamily::RandomForest: {
      ForestParams p;
      for (const auto& t : j.at("trees")) p.trees.push_back(tree_from_json(t));
      return p;
    }
    case ModelFamily::NaiveBayes: {
      NaiveBayesParams p;
      const auto mf = from_array(j.at("means_false"));
      const auto mt = from_array(j.at("means_true"));
      const auto vf = from_array(j.at("variances_false"));
      const auto vt = from_array(j.at("variances_true"));
      if (mt.size() != mf.size() || vf.size() != mf.size() || vt.size() != mf.size()) {
        throw Error(Errc::BadModelFile, "naive-bayes parameter widths differ");
      }
      p.means.resize(2, mf.size());
      p.variances.resize(2, mf.size());
      p.means.row(0) = mf.transpose();
      p.means.row(1) = mt.transpose();
      p.variances.row(0) = vf.transpose();
      p.variances.row(1) = vt.transpose();
      const auto lp = j.at("log_prior").get<std::vector<double>>();
      if (lp.size() != 2) throw Error(Errc::BadModelFile, "log_prior must have two entries");
      p.log_prior << lp[0], lp[1];
      return p;
    }
  }
  throw Error(Errc::BadModelFile, "unknown family");
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["family"] = family_tag(model.spec.family);
  json hp = json::object();
  for (const auto& [k, v] : model.spec.hyperparameters) hp[k] = v;
  doc["hyperparameters"] = hp;
  doc["seed"] = model.spec.seed;
  doc["n_features"] = model.n_features;
  if (model.standardization.empty()) {
    doc["standardization"] = nullptr;
  } else {
    doc["standardization"] = {{"mean", to_array(model.standardization.mean)},
                              {"scale", to_array(model.standardization.scale)}};
  }
  doc["params"] = std::visit(ParamsToJson{}, model.params);
  return doc.dump(1) + "\n";
}

TrainedModel deserialize_model(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw Error(Errc::BadModelFile, "not a barrier model file");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw Error(Errc::BadModelFile,
                  "unsupported model version " + std::to_string(doc.at("version").get<int>()));
    }
    const auto family = parse_family(doc.at("family").get<std::string>());
    if (!family) throw Error(Errc::BadModelFile, "unknown family");
    TrainedModel model;
    model.spec.family = *family;
    for (const auto& [k, v] : doc.at("hyperparameters").items()) {
      model.spec.hyperparameters[k] = v.get<double>();
    }
    model.spec.seed = doc.at("seed").get<std::uint64_t>();
    model.n_features = doc.at("n_features").get<std::size_t>();
    if (const auto& s = doc.at("standardization"); !s.is_null()) {
      model.standardization.mean = from_array(s.at("mean"));
      model.standardization.scale = from_array(s.at("scale"));
      if (static_cast<std::size_t>(model.standardization.mean.size()) != model.n_features ||
          model.standardization.scale.size() != model.standardization.mean.size()) {
        throw Error(Errc::BadModelFile, "standardization width mismatch");
      }
    }
    model.params = params_from_json(*family, doc.at("params"));
    return model;
  } catch (const json::exception& e) {
    throw Error(Errc::BadModelFile, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, path.string() + ": cannot write");
  out << serialize_model(model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, path.string() + ": not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace barrier
