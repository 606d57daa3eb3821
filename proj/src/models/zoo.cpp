#include "gencp/models/bagging.hpp"
#include "gencp/models/lasso.hpp"
#include "gencp/models/model.hpp"
#include "gencp/models/smoothers.hpp"
#include "gencp/models/tree.hpp"
#include "gencp/rng.hpp"

#include <iomanip>
#include <sstream>

namespace gencp {

std::string to_string(RefitMode mode) { return mode == RefitMode::y ? "y" : "w"; }

RefitMode parse_refit_mode(const std::string& text) {
  if (text == "y" || text == "Y") return RefitMode::y;
  if (text == "w" || text == "W" || text == "general" || text == "g") return RefitMode::w;
  throw ConfigError("unknown refit mode '" + text + "' (expected y, w or general)");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

class ZeroModel final : public Model {
 public:
  explicit ZeroModel(const ModelContext& ctx)
      : n_(ctx.size()), rows_(ctx.fit_rows()), m_(static_cast<Index>(rows_.size())) {}
  std::string name() const override { return "zero"; }
  bool linear_smoother() const override { return true; }
  bool adaptive() const override { return false; }
  Fit fit(const Vector&, std::uint64_t, bool want_smoother) const override {
    Fit f;
    f.prediction = Vector::Zero(n_);
    if (want_smoother) {
      f.smoother = Matrix::Zero(n_, m_);
      f.rows = rows_;
    }
    return f;
  }

 private:
  Index n_;
  IndexList rows_;
  Index m_;
};

class FixedModel final : public Model {
 public:
  explicit FixedModel(Vector v) : v_(std::move(v)) {}
  std::string name() const override { return "fixed"; }
  Fit fit(const Vector& response, std::uint64_t, bool) const override {
    require(response.size() == v_.size(), "fixed model: response dimension mismatch");
    return {v_, {}, {}, {}};
  }

 private:
  Vector v_;
};

// OLS (lambda = 0) and ridge: fixed weights computed once.
class RidgeModel final : public Model {
 public:
  RidgeModel(std::string name, const ModelContext& ctx, double lambda, bool intercept)
      : name_(std::move(name)), rows_(ctx.fit_rows()) {
    require(lambda >= 0.0, "ridge: lambda must be >= 0");
    RidgePath path(gather_rows(ctx.x, rows_), ctx.x, intercept);
    weights_ = path.weights(lambda);
    if (lambda == 0.0 && path.rank_deficient()) flags_.push_back("pseudo_inverse");
  }
  std::string name() const override { return name_; }
  bool linear_smoother() const override { return true; }
  bool adaptive() const override { return false; }
  Fit fit(const Vector& response, std::uint64_t, bool want_smoother) const override {
    Fit f;
    f.prediction = weights_ * gather(response, rows_);
    if (want_smoother) {
      f.smoother = weights_;
      f.rows = rows_;
    }
    f.flags = flags_;
    return f;
  }

 private:
  std::string name_;
  IndexList rows_;
  Matrix weights_;
  Flags flags_;
};

class TreeModel final : public Model {
 public:
  TreeModel(std::string name, const ModelContext& ctx, int depth)
      : name_(std::move(name)), rows_(ctx.fit_rows()), x_(ctx.x), fitter_(gather_rows(ctx.x, rows_), depth) {}
  std::string name() const override { return name_; }
  bool linear_smoother() const override { return true; }
  Fit fit(const Vector& response, std::uint64_t, bool want_smoother) const override {
    RegressionTree tree = fitter_.fit(gather(response, rows_));
    Fit f;
    f.prediction = tree.predict(x_);
    if (want_smoother) {
      f.smoother = tree.smoother(x_);
      f.rows = rows_;
    }
    return f;
  }

 private:
  std::string name_;
  IndexList rows_;
  Matrix x_;
  TreeFitter fitter_;
};

class RelaxedLassoModel final : public Model {
 public:
  RelaxedLassoModel(std::string name, const ModelContext& ctx, double lambda, bool intercept)
      : name_(std::move(name)),
        rows_(ctx.fit_rows()),
        x_(ctx.x),
        x_fit_(gather_rows(ctx.x, rows_)),
        lambda_(lambda),
        intercept_(intercept),
        solver_(x_fit_, intercept) {}
  std::string name() const override { return name_; }
  bool linear_smoother() const override { return true; }
  Fit fit(const Vector& response, std::uint64_t, bool want_smoother) const override {
    Vector y_fit = gather(response, rows_);
    IndexList support = solver_.solve(y_fit, lambda_).support();
    const Index n = x_.rows(), m = x_fit_.rows();
    Fit f;
    Matrix weights;
    if (support.empty()) {
      f.flags.push_back("empty_support");
      weights = intercept_ ? Matrix::Constant(n, m, 1.0 / static_cast<double>(m)) : Matrix::Zero(n, m);
    } else {
      Matrix xa(m, static_cast<Index>(support.size())), xp(n, static_cast<Index>(support.size()));
      for (std::size_t j = 0; j < support.size(); ++j) {
        xa.col(static_cast<Index>(j)) = x_fit_.col(support[j]);
        xp.col(static_cast<Index>(j)) = x_.col(support[j]);
      }
      RidgePath path(xa, xp, intercept_);
      if (path.rank_deficient()) f.flags.push_back("pseudo_inverse");
      weights = path.weights(0.0);
    }
    f.prediction = weights * y_fit;
    if (want_smoother) {
      f.smoother = std::move(weights);
      f.rows = rows_;
    }
    return f;
  }

 private:
  std::string name_;
  IndexList rows_;
  Matrix x_;
  Matrix x_fit_;
  double lambda_;
  bool intercept_;
  LassoSolver solver_;
};

class LassoModel final : public Model {
 public:
  LassoModel(std::string name, const ModelContext& ctx, double lambda, bool intercept, double l1_ratio)
      : name_(std::move(name)), rows_(ctx.fit_rows()), x_(ctx.x), lambda_(lambda),
        solver_(gather_rows(ctx.x, rows_), intercept, l1_ratio) {}
  std::string name() const override { return name_; }
  Fit fit(const Vector& response, std::uint64_t, bool) const override {
    LassoResult r = solver_.solve(gather(response, rows_), lambda_);
    return {solver_.predict(x_, r), {}, {}, {}};
  }

 private:
  std::string name_;
  IndexList rows_;
  Matrix x_;
  double lambda_;
  LassoSolver solver_;
};

class CvModel final : public Model {
 public:
  CvModel(std::string name, const ModelContext& ctx, PenaltyFamily family, const ModelSpec& spec)
      : name_(std::move(name)),
        rows_(ctx.fit_rows()),
        cv_(family, gather_rows(ctx.x, rows_), ctx.x, spec.grid.empty() ? log_grid(0.01, 10.0, 10) : spec.grid,
            spec.folds, derive_seed(spec.seed, Stream::cv_folds), spec.intercept, spec.l1_ratio) {}
  std::string name() const override { return name_; }
  Fit fit(const Vector& response, std::uint64_t, bool) const override {
    return {cv_.predict(gather(response, rows_)), {}, {}, {}};
  }

 private:
  std::string name_;
  IndexList rows_;
  PenalizedCv cv_;
};

class BaggedModel final : public Model {
 public:
  BaggedModel(std::string name, BagConfig config) : name_(std::move(name)), config_(std::move(config)) {
    require(config_.base != nullptr, "bagged model: missing base model");
    require(config_.noise != nullptr, "bagged model: missing noise covariance");
    require(config_.size >= 1, "bagged model: bag size must be >= 1");
    require(config_.alpha > 0.0, "bagged model: alpha must be > 0");
    require(config_.refit == RefitMode::w || config_.base->linear_smoother(),
            "bagged model: refit on Y needs a linear smoother base");
  }
  std::string name() const override { return name_; }
  const BagConfig* bag() const override { return &config_; }
  Fit fit(const Vector& response, std::uint64_t seed, bool) const override {
    BagPredictions bag =
        bagged_fit(*config_.base, response, *config_.noise, config_.alpha, config_.size, config_.refit, seed);
    return {bag.mean(), {}, {}, {}};
  }

 private:
  std::string name_;
  BagConfig config_;
};

// Classical bagging: trees fit on multinomial resamples of the training rows.
class NpBaggedModel final : public Model {
 public:
  NpBaggedModel(std::string name, const ModelContext& ctx, int depth, int size)
      : name_(std::move(name)), rows_(ctx.fit_rows()), x_(ctx.x), size_(size), fitter_(gather_rows(ctx.x, rows_), depth) {
    require(size >= 1, "np_bagged: bag size must be >= 1");
  }
  std::string name() const override { return name_; }
  Fit fit(const Vector& response, std::uint64_t seed, bool) const override {
    const Index m = static_cast<Index>(rows_.size());
    Vector y_fit = gather(response, rows_);
    Vector total = Vector::Zero(x_.rows());
    for (int k = 0; k < size_; ++k) {
      Rng rng(derive_seed(seed, Stream::bag, {static_cast<std::uint64_t>(k)}));
      Vector w = Vector::Zero(m);
      for (Index i = 0; i < m; ++i) w(uniform_index(rng, m)) += 1.0;
      total += fitter_.fit(y_fit, &w).predict(x_);
    }
    return {total / static_cast<double>(size_), {}, {}, {}};
  }

 private:
  std::string name_;
  IndexList rows_;
  Matrix x_;
  int size_;
  TreeFitter fitter_;
};

}  // namespace

std::string ModelSpec::display_name() const {
  if (!label.empty()) return label;
  if (kind == "tree") return "tree" + std::to_string(depth);
  if (kind == "ridge" || kind == "lasso" || kind == "relaxed_lasso") return kind + "(" + fmt(lambda) + ")";
  if (kind == "bagged" || kind == "np_bagged") {
    std::string b = base ? base->display_name() : "tree" + std::to_string(depth);
    std::string out = kind + "(" + b + ",K=" + std::to_string(bag_size);
    if (kind == "bagged") out += ",a=" + fmt(bag_alpha) + ",refit=" + to_string(bag_refit);
    return out + ")";
  }
  return kind;
}

ModelPtr make_model(const ModelSpec& spec, const ModelContext& ctx) {
  require(ctx.x.rows() >= 1, "make_model: empty design");
  for (Index i : ctx.train) require(i >= 0 && i < ctx.x.rows(), "make_model: training index out of range");
  const std::string name = spec.display_name();
  const std::string& k = spec.kind;
  if (k == "zero") return std::make_shared<ZeroModel>(ctx);
  if (k == "ols") return std::make_shared<RidgeModel>(name, ctx, 0.0, spec.intercept);
  if (k == "ridge") return std::make_shared<RidgeModel>(name, ctx, spec.lambda, spec.intercept);
  if (k == "tree") return std::make_shared<TreeModel>(name, ctx, spec.depth);
  if (k == "relaxed_lasso") return std::make_shared<RelaxedLassoModel>(name, ctx, spec.lambda, spec.intercept);
  if (k == "lasso") return std::make_shared<LassoModel>(name, ctx, spec.lambda, spec.intercept, 1.0);
  if (k == "ridge_cv") return std::make_shared<CvModel>(name, ctx, PenaltyFamily::ridge, spec);
  if (k == "lasso_cv") return std::make_shared<CvModel>(name, ctx, PenaltyFamily::lasso, spec);
  if (k == "enet_cv") return std::make_shared<CvModel>(name, ctx, PenaltyFamily::elastic_net, spec);
  if (k == "bagged") {
    ModelSpec base_spec;
    if (spec.base) {
      base_spec = *spec.base;
    } else {
      base_spec.kind = "tree";
      base_spec.depth = spec.depth;
    }
    require(base_spec.kind != "bagged" && base_spec.kind != "np_bagged", "bagged model: nested bags are not supported");
    BagConfig config;
    config.base = make_model(base_spec, ctx);
    config.noise = ctx.noise;
    config.alpha = spec.bag_alpha;
    config.size = spec.bag_size;
    config.refit = spec.bag_refit;
    return std::make_shared<BaggedModel>(name, std::move(config));
  }
  if (k == "np_bagged") {
    int depth = spec.base ? spec.base->depth : spec.depth;
    require(!spec.base || spec.base->kind == "tree", "np_bagged: only tree base models are supported");
    return std::make_shared<NpBaggedModel>(name, ctx, depth, spec.bag_size);
  }
  throw ConfigError("unknown model kind '" + k + "'");
}

ModelPtr fixed_prediction_model(Vector prediction) { return std::make_shared<FixedModel>(std::move(prediction)); }

}  // namespace gencp
