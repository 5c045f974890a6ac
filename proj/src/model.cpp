#include "cebread/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cebread/csv.hpp"
#include "cebread/unicode.hpp"

namespace cebread {

using nlohmann::json;
using models::ForestParams;
using models::Kernel;
using models::LogRegParams;
using models::MaxFeatures;
using models::Penalty;
using models::Solver;
using models::SvmParams;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view penalty_name(Penalty p) { return p == Penalty::l1 ? "l1" : "l2"; }
std::string_view solver_name(Solver s) { return s == Solver::proximal ? "proximal" : "gd"; }
std::string_view kernel_name(Kernel k) { return k == Kernel::rbf ? "rbf" : "linear"; }

std::string_view max_features_name(MaxFeatures m) {
  switch (m) {
    case MaxFeatures::sqrt: return "sqrt";
    case MaxFeatures::log2: return "log2";
    case MaxFeatures::all: return "all";
  }
  return "sqrt";
}

Penalty parse_penalty(std::string_view s) {
  if (s == "l1") return Penalty::l1;
  if (s == "l2") return Penalty::l2;
  throw ModelError("unknown penalty '" + std::string(s) + "' (expected l1 or l2)");
}

Solver parse_solver(std::string_view s) {
  if (s == "gd" || s == "gradient-descent" || s == "gradient_descent") {
    return Solver::gradient_descent;
  }
  if (s == "proximal" || s == "prox") return Solver::proximal;
  throw ModelError("unknown solver '" + std::string(s) + "' (expected gd or proximal)");
}

Kernel parse_kernel(std::string_view s) {
  if (s == "linear") return Kernel::linear;
  if (s == "rbf") return Kernel::rbf;
  throw ModelError("unknown kernel '" + std::string(s) + "' (expected linear or rbf)");
}

MaxFeatures parse_max_features(std::string_view s) {
  if (s == "sqrt" || s == "auto") return MaxFeatures::sqrt;
  if (s == "log2") return MaxFeatures::log2;
  if (s == "all" || s == "none") return MaxFeatures::all;
  throw ModelError("unknown max_features '" + std::string(s) + "' (expected sqrt, log2, all)");
}

double parse_double(std::string_view key, std::string_view s) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ModelError("hyperparameter " + std::string(key) + ": '" + std::string(s) +
                     "' is not a number");
  }
}

std::size_t parse_count(std::string_view key, std::string_view s) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(std::string(s), &used);
    if (used != s.size() || s.starts_with('-')) throw std::invalid_argument("bad");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ModelError("hyperparameter " + std::string(key) + ": '" + std::string(s) +
                     "' is not a non-negative integer");
  }
}

std::string num(double v) { return csv::format_number(v); }

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::svm: return "svm";
    case ModelKind::rforest: return "rforest";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logreg" || name == "lr") return ModelKind::logreg;
  if (name == "svm") return ModelKind::svm;
  if (name == "rforest" || name == "rf" || name == "forest") return ModelKind::rforest;
  throw ModelError("unknown model kind '" + std::string(name) + "' (expected logreg, svm, rforest)");
}

void Hyperparameters::validate() const {
  std::visit(overloaded{
                 [](const LogRegParams& p) {
                   if (!(p.C > 0.0) || !std::isfinite(p.C)) throw ModelError("logreg C must be > 0");
                   if (p.penalty == Penalty::l1 && p.solver != Solver::proximal) {
                     throw ModelError("logreg l1 penalty requires solver=proximal");
                   }
                   if (p.max_iterations == 0) throw ModelError("logreg max_iter must be >= 1");
                 },
                 [](const SvmParams& p) {
                   if (!(p.C > 0.0) || !std::isfinite(p.C)) throw ModelError("svm C must be > 0");
                   if (p.gamma && !(*p.gamma > 0.0)) throw ModelError("svm gamma must be > 0");
                   if (p.max_iterations == 0) throw ModelError("svm max_iter must be >= 1");
                 },
                 [](const ForestParams& p) {
                   if (p.n_estimators == 0) throw ModelError("rforest n_estimators must be >= 1");
                   if (p.max_depth && *p.max_depth == 0) {
                     throw ModelError("rforest max_depth must be >= 1 or unlimited");
                   }
                 },
             },
             params_);
}

std::string Hyperparameters::describe() const {
  return std::visit(
      overloaded{
          [](const LogRegParams& p) {
            return "penalty=" + std::string(penalty_name(p.penalty)) + ",C=" + num(p.C) +
                   ",solver=" + std::string(solver_name(p.solver)) +
                   ",max_iter=" + std::to_string(p.max_iterations);
          },
          [](const SvmParams& p) {
            std::string s = "kernel=" + std::string(kernel_name(p.kernel)) + ",C=" + num(p.C);
            if (p.gamma) s += ",gamma=" + num(*p.gamma);
            return s + ",max_iter=" + std::to_string(p.max_iterations);
          },
          [](const ForestParams& p) {
            return "n_estimators=" + std::to_string(p.n_estimators) +
                   ",max_features=" + std::string(max_features_name(p.max_features)) +
                   ",max_depth=" + (p.max_depth ? std::to_string(*p.max_depth) : "none") +
                   ",seed=" + std::to_string(p.seed);
          },
      },
      params_);
}

json to_json(const Hyperparameters& hp) {
  return std::visit(
      overloaded{
          [](const LogRegParams& p) {
            return json{{"kind", "logreg"},
                        {"penalty", penalty_name(p.penalty)},
                        {"C", p.C},
                        {"solver", solver_name(p.solver)},
                        {"max_iter", p.max_iterations},
                        {"tolerance", p.tolerance}};
          },
          [](const SvmParams& p) {
            return json{{"kind", "svm"},
                        {"kernel", kernel_name(p.kernel)},
                        {"C", p.C},
                        {"gamma", p.gamma ? json(*p.gamma) : json(nullptr)},
                        {"max_iter", p.max_iterations},
                        {"tolerance", p.tolerance}};
          },
          [](const ForestParams& p) {
            return json{{"kind", "rforest"},
                        {"n_estimators", p.n_estimators},
                        {"max_features", max_features_name(p.max_features)},
                        {"max_depth", p.max_depth ? json(*p.max_depth) : json(nullptr)},
                        {"seed", p.seed}};
          },
      },
      hp.params());
}

Hyperparameters hyperparameters_from_json(const json& j) {
  try {
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    switch (kind) {
      case ModelKind::logreg: {
        LogRegParams p;
        p.penalty = parse_penalty(j.at("penalty").get<std::string>());
        p.C = j.at("C").get<double>();
        p.solver = parse_solver(j.at("solver").get<std::string>());
        p.max_iterations = j.at("max_iter").get<std::size_t>();
        p.tolerance = j.at("tolerance").get<double>();
        return p;
      }
      case ModelKind::svm: {
        SvmParams p;
        p.kernel = parse_kernel(j.at("kernel").get<std::string>());
        p.C = j.at("C").get<double>();
        if (!j.at("gamma").is_null()) p.gamma = j.at("gamma").get<double>();
        p.max_iterations = j.at("max_iter").get<std::size_t>();
        p.tolerance = j.at("tolerance").get<double>();
        return p;
      }
      case ModelKind::rforest: {
        ForestParams p;
        p.n_estimators = j.at("n_estimators").get<std::size_t>();
        p.max_features = parse_max_features(j.at("max_features").get<std::string>());
        if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<std::size_t>();
        p.seed = j.at("seed").get<std::uint64_t>();
        return p;
      }
    }
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed hyperparameters: ") + e.what());
  }
  throw ModelError("malformed hyperparameters");
}

Hyperparameters default_hyperparameters(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg: return LogRegParams{};
    case ModelKind::svm: return SvmParams{};
    case ModelKind::rforest: {
      ForestParams p;
      p.max_depth = 20;
      return p;
    }
  }
  throw ModelError("unknown model kind");
}

Hyperparameters parse_hyperparameters(ModelKind kind, std::string_view text) {
  Hyperparameters hp = default_hyperparameters(kind);
  LogRegParams lr = kind == ModelKind::logreg ? hp.get<LogRegParams>() : LogRegParams{};
  SvmParams sv = kind == ModelKind::svm ? hp.get<SvmParams>() : SvmParams{};
  ForestParams rf = kind == ModelKind::rforest ? hp.get<ForestParams>() : ForestParams{};
  bool solver_given = false;

  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unicode::trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ModelError("hyperparameter '" + item + "' needs key=value");
    const std::string key = unicode::trim(item.substr(0, eq));
    const std::string value = unicode::trim(item.substr(eq + 1));
    bool known = true;
    switch (kind) {
      case ModelKind::logreg:
        if (key == "penalty") lr.penalty = parse_penalty(value);
        else if (key == "C") lr.C = parse_double(key, value);
        else if (key == "solver") { lr.solver = parse_solver(value); solver_given = true; }
        else if (key == "max_iter") lr.max_iterations = parse_count(key, value);
        else if (key == "tolerance") lr.tolerance = parse_double(key, value);
        else known = false;
        break;
      case ModelKind::svm:
        if (key == "kernel") sv.kernel = parse_kernel(value);
        else if (key == "C") sv.C = parse_double(key, value);
        else if (key == "gamma") {
          if (value == "scale" || value == "auto") sv.gamma.reset();
          else sv.gamma = parse_double(key, value);
        }
        else if (key == "max_iter") sv.max_iterations = parse_count(key, value);
        else if (key == "tolerance") sv.tolerance = parse_double(key, value);
        else known = false;
        break;
      case ModelKind::rforest:
        if (key == "n_estimators") rf.n_estimators = parse_count(key, value);
        else if (key == "max_features") rf.max_features = parse_max_features(value);
        else if (key == "max_depth") {
          if (value == "none" || value == "unlimited") rf.max_depth.reset();
          else rf.max_depth = parse_count(key, value);
        }
        else if (key == "seed") rf.seed = parse_count(key, value);
        else known = false;
        break;
    }
    if (!known) {
      throw ModelError("unknown " + std::string(to_string(kind)) + " hyperparameter '" + key + "'");
    }
  }
  if (kind == ModelKind::logreg && !solver_given) {
    lr.solver = lr.penalty == Penalty::l1 ? Solver::proximal : Solver::gradient_descent;
  }
  Hyperparameters out = kind == ModelKind::logreg ? Hyperparameters(lr)
                        : kind == ModelKind::svm  ? Hyperparameters(sv)
                                                  : Hyperparameters(rf);
  out.validate();
  return out;
}

TrainedModel::TrainedModel(Hyperparameters hp, std::vector<std::string> schema,
                           std::vector<Label> classes, std::optional<StandardizationStats> stats,
                           Fitted fitted)
    : hp_(std::move(hp)), schema_(std::move(schema)), classes_(std::move(classes)),
      stats_(std::move(stats)), fitted_(std::move(fitted)) {
  if (static_cast<std::size_t>(hp_.kind()) != fitted_.index()) {
    throw ModelError("hyperparameters and fitted parameters disagree on model kind");
  }
}

Label TrainedModel::predict_row(std::span<const double> row) const {
  if (row.size() != schema_.size()) throw ModelError("feature vector width does not match schema");
  std::vector<double> x(row.begin(), row.end());
  if (stats_) apply_standardization(*stats_, x);
  const int idx = std::visit([&](const auto& m) { return m.predict(x); }, fitted_);
  return classes_.at(static_cast<std::size_t>(idx));
}

bool TrainedModel::operator==(const TrainedModel& o) const {
  return to_json(*this) == to_json(o);
}

TrainedModel train(const FeatureMatrix& matrix, const Hyperparameters& hp,
                   const TrainOptions& options) {
  hp.validate();
  if (matrix.rows() == 0) throw ModelError("cannot train on an empty feature matrix");
  if (matrix.cols() == 0) throw ModelError("cannot train without features");
  for (double v : matrix.values()) {
    if (!std::isfinite(v)) throw ModelError("feature matrix contains NaN or infinite values");
  }
  std::set<Label> seen(matrix.labels().begin(), matrix.labels().end());
  if (seen.size() < 2) throw ModelError("training set contains a single class");
  std::vector<Label> classes(seen.begin(), seen.end());
  std::vector<int> class_index(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    class_index[i] = static_cast<int>(
        std::lower_bound(classes.begin(), classes.end(), matrix.labels()[i]) - classes.begin());
  }

  std::optional<StandardizationStats> stats;
  const FeatureMatrix* source = &matrix;
  Standardized standardized;
  if (hp.kind() != ModelKind::rforest) {
    standardized = standardize(matrix);
    stats = standardized.stats;
    source = &standardized.matrix;
  }
  const models::TrainingView view{source->values(), source->cols(), class_index, classes.size()};

  TrainedModel::Fitted fitted = std::visit(
      overloaded{
          [&](const LogRegParams& p) -> TrainedModel::Fitted {
            return models::train_logreg(view, p).model;
          },
          [&](const SvmParams& p) -> TrainedModel::Fitted {
            return models::train_svm(view, p, options.jobs);
          },
          [&](const ForestParams& p) -> TrainedModel::Fitted {
            return models::train_forest(view, p, options.jobs);
          },
      },
      hp.params());
  return TrainedModel(hp, matrix.schema(), std::move(classes), std::move(stats), std::move(fitted));
}

Label predict(const TrainedModel& model, const FeatureVector& x) {
  if (x.names != model.schema()) {
    throw ModelError("schema mismatch: model expects " + std::to_string(model.schema().size()) +
                     " features in its training order");
  }
  return model.predict_row(x.values);
}

std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& matrix) {
  if (matrix.schema() != model.schema()) {
    throw ModelError("schema mismatch: matrix columns differ from the model's feature schema");
  }
  std::vector<Label> out(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) out[r] = model.predict_row(matrix.row(r));
  return out;
}

FeatureVector mdi_importance(const TrainedModel& model) {
  const auto* forest = std::get_if<models::RandomForest>(&model.fitted());
  if (forest == nullptr) {
    throw ModelError("MDI importance needs a random forest (model is " +
                     std::string(to_string(model.kind())) + ")");
  }
  return FeatureVector{model.schema(), forest->mdi_importance()};
}

namespace {

json fitted_to_json(const TrainedModel::Fitted& fitted) {
  return std::visit(
      overloaded{
          [](const models::LogisticRegression& m) {
            return json{{"n_classes", m.n_classes()},
                        {"n_features", m.n_features()},
                        {"weights", m.weights()},
                        {"bias", m.bias()}};
          },
          [](const models::Svm& m) {
            json machines = json::array();
            for (const auto& b : m.machines()) {
              machines.push_back({{"weights", b.weights},
                                  {"support_vectors", b.support_vectors},
                                  {"coefficients", b.coefficients},
                                  {"bias", b.bias},
                                  {"converged", b.converged},
                                  {"iterations", b.iterations}});
            }
            return json{{"kernel", kernel_name(m.kernel())},
                        {"gamma", m.gamma()},
                        {"n_features", m.n_features()},
                        {"machines", machines}};
          },
          [](const models::RandomForest& m) {
            json trees = json::array();
            for (const auto& t : m.trees()) {
              json nodes = json::array();
              for (const auto& n : t.nodes()) {
                nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.samples,
                                             n.weighted_decrease, n.counts}));
              }
              trees.push_back(std::move(nodes));
            }
            return json{{"n_features", m.n_features()},
                        {"n_classes", m.n_classes()},
                        {"trees", trees}};
          },
      },
      fitted);
}

TrainedModel::Fitted fitted_from_json(ModelKind kind, const json& j) {
  switch (kind) {
    case ModelKind::logreg:
      return models::LogisticRegression(j.at("n_classes").get<std::size_t>(),
                                        j.at("n_features").get<std::size_t>(),
                                        j.at("weights").get<std::vector<double>>(),
                                        j.at("bias").get<std::vector<double>>());
    case ModelKind::svm: {
      std::vector<models::BinarySvm> machines;
      for (const auto& b : j.at("machines")) {
        models::BinarySvm m;
        m.weights = b.at("weights").get<std::vector<double>>();
        m.support_vectors = b.at("support_vectors").get<std::vector<double>>();
        m.coefficients = b.at("coefficients").get<std::vector<double>>();
        m.bias = b.at("bias").get<double>();
        m.converged = b.at("converged").get<bool>();
        m.iterations = b.at("iterations").get<std::size_t>();
        machines.push_back(std::move(m));
      }
      return models::Svm(parse_kernel(j.at("kernel").get<std::string>()),
                         j.at("gamma").get<double>(), j.at("n_features").get<std::size_t>(),
                         std::move(machines));
    }
    case ModelKind::rforest: {
      const auto n_features = j.at("n_features").get<std::size_t>();
      const auto n_classes = j.at("n_classes").get<std::size_t>();
      std::vector<models::DecisionTree> trees;
      for (const auto& t : j.at("trees")) {
        std::vector<models::TreeNode> nodes;
        for (const auto& n : t) {
          models::TreeNode node;
          node.feature = n.at(0).get<int>();
          node.threshold = n.at(1).get<double>();
          node.left = n.at(2).get<int>();
          node.right = n.at(3).get<int>();
          node.samples = n.at(4).get<std::size_t>();
          node.weighted_decrease = n.at(5).get<double>();
          node.counts = n.at(6).get<std::vector<std::size_t>>();
          nodes.push_back(std::move(node));
        }
        trees.emplace_back(std::move(nodes), n_features, n_classes);
      }
      return models::RandomForest(std::move(trees), n_features, n_classes);
    }
  }
  throw ModelError("unknown model kind");
}

}  // namespace

json to_json(const TrainedModel& model) {
  json stats = nullptr;
  if (model.standardization()) {
    stats = {{"mean", model.standardization()->mean}, {"stddev", model.standardization()->stddev}};
  }
  return json{{"format", "cebread-model"},
              {"version", kModelFormatVersion},
              {"kind", to_string(model.kind())},
              {"hyperparameters", to_json(model.hyperparameters())},
              {"schema", model.schema()},
              {"classes", model.classes()},
              {"standardization", stats},
              {"parameters", fitted_to_json(model.fitted())}};
}

TrainedModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "cebread-model") {
      throw ModelError("not a model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelError("unsupported model format version " + std::to_string(version));
    }
    Hyperparameters hp = hyperparameters_from_json(j.at("hyperparameters"));
    auto schema = j.at("schema").get<std::vector<std::string>>();
    std::optional<StandardizationStats> stats;
    if (!j.at("standardization").is_null()) {
      stats = StandardizationStats{schema, j["standardization"].at("mean").get<std::vector<double>>(),
                                   j["standardization"].at("stddev").get<std::vector<double>>()};
    }
    auto fitted = fitted_from_json(hp.kind(), j.at("parameters"));
    return TrainedModel(std::move(hp), std::move(schema), j.at("classes").get<std::vector<Label>>(),
                        std::move(stats), std::move(fitted));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file: " + path.string());
  out << to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open model file: " + path.string());
  try {
    return model_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ModelError("model file is not valid JSON: " + std::string(e.what()));
  }
}

}  // namespace cebread
