#include "altreg/losses.hpp"

#include <cmath>

#include <json.hpp>

namespace altreg {

namespace {

double operator_norm(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Largest point norm over the domain, for the quadratic gradient bound.
double max_point_norm(const Domain& dom) {
  switch (dom.kind()) {
    case DomainKind::Simplex:
      return 1.0;
    case DomainKind::Ball:
      return dom.radius();
    case DomainKind::Interval:
      return std::max(std::abs(dom.lo()), std::abs(dom.hi()));
    case DomainKind::Box:
      return std::sqrt(static_cast<double>(dom.dimension())) *
             std::max(std::abs(dom.lo()), std::abs(dom.hi()));
  }
  return 0.0;
}

}  // namespace

LossFn LossFn::linear(Vector ell) {
  if (ell.size() < 1) throw DimensionError("linear loss: empty vector");
  LossFn f;
  f.kind_ = LossKind::Linear;
  f.dim_ = static_cast<int>(ell.size());
  f.ell_ = std::move(ell);
  return f;
}

LossFn LossFn::quadratic(Matrix A, Vector b, double c) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw DimensionError("quadratic loss: shape mismatch");
  LossFn f;
  f.kind_ = LossKind::Quadratic;
  f.dim_ = static_cast<int>(b.size());
  f.A_ = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.A_);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw ValidationError("A", "quadratic loss must be convex");
  f.b_ = std::move(b);
  f.c_ = c;
  return f;
}

LossFn LossFn::black_box(std::function<double(const Vector&)> value,
                         std::function<Vector(const Vector&)> grad, int dim,
                         std::optional<Certified> certified) {
  if (dim < 1) throw DimensionError("black-box loss: dim >= 1 required");
  if (!value || !grad) throw ValidationError("black_box", "value and grad required");
  LossFn f;
  f.kind_ = LossKind::BlackBox;
  f.dim_ = dim;
  f.value_fn_ = std::move(value);
  f.grad_fn_ = std::move(grad);
  f.certified_ = certified;
  return f;
}

double LossFn::eval(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("loss eval: dimension mismatch");
  switch (kind_) {
    case LossKind::Linear:
      return ell_.dot(x);
    case LossKind::Quadratic:
      return x.dot(A_ * x) + b_.dot(x) + c_;
    case LossKind::BlackBox:
      return value_fn_(x);
  }
  return 0.0;
}

Vector LossFn::grad(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("loss grad: dimension mismatch");
  switch (kind_) {
    case LossKind::Linear:
      return ell_;
    case LossKind::Quadratic:
      return 2.0 * A_ * x + b_;
    case LossKind::BlackBox:
      return grad_fn_(x);
  }
  return Vector::Zero(dim_);
}

Matrix LossFn::hess(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("loss hess: dimension mismatch");
  switch (kind_) {
    case LossKind::Linear:
      return Matrix::Zero(dim_, dim_);
    case LossKind::Quadratic:
      return 2.0 * A_;
    case LossKind::BlackBox: {
      const double h = 1e-5;
      Matrix H(dim_, dim_);
      for (int j = 0; j < dim_; ++j) {
        Vector xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        H.col(j) = (grad_fn_(xp) - grad_fn_(xm)) / (2.0 * h);
      }
      return 0.5 * (H + H.transpose());
    }
  }
  return Matrix::Zero(dim_, dim_);
}

const Vector& LossFn::ell() const {
  if (kind_ != LossKind::Linear) throw Error("ell(): not a linear loss");
  return ell_;
}

const Matrix& LossFn::quad_matrix() const {
  if (kind_ != LossKind::Quadratic) throw Error("quad_matrix(): not quadratic");
  return A_;
}

const Vector& LossFn::quad_linear() const {
  if (kind_ != LossKind::Quadratic) throw Error("quad_linear(): not quadratic");
  return b_;
}

double LossFn::quad_constant() const {
  if (kind_ != LossKind::Quadratic) throw Error("quad_constant(): not quadratic");
  return c_;
}

Certified LossFn::certify(const Domain& dom) const {
  if (dom.dimension() != dim_)
    throw DimensionError("certify: domain dimension mismatch");
  switch (kind_) {
    case LossKind::Linear:
      return Certified{ell_.norm(), 0.0, 0.0};
    case LossKind::Quadratic: {
      double op = operator_norm(A_);
      // |grad f| = |2Ax + b| <= 2|A|_op R + |b| over the domain.
      return Certified{2.0 * op * max_point_norm(dom) + b_.norm(), 2.0 * op, 0.0};
    }
    case LossKind::BlackBox:
      if (!certified_)
        throw ValidationError("certified",
                              "black-box loss requires user-supplied constants");
      return *certified_;
  }
  return Certified{};
}

bool LossFn::bounded_by(const Domain& dom, double bound, int samples,
                        std::uint64_t seed) const {
  SplitMix64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    if (std::abs(eval(dom.sample(rng))) > bound) return false;
  }
  return true;
}

std::string losses_to_json(const std::vector<LossFn>& losses) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : losses) {
    nlohmann::json rec;
    switch (f.kind()) {
      case LossKind::Linear: {
        rec["kind"] = "linear";
        rec["ell"] = std::vector<double>(f.ell().data(), f.ell().data() + f.dim());
        break;
      }
      case LossKind::Quadratic: {
        rec["kind"] = "quadratic";
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < f.dim(); ++i) {
          std::vector<double> row(f.dim());
          for (int j = 0; j < f.dim(); ++j) row[j] = f.quad_matrix()(i, j);
          rows.push_back(row);
        }
        rec["A"] = rows;
        rec["b"] = std::vector<double>(f.quad_linear().data(),
                                       f.quad_linear().data() + f.dim());
        rec["c"] = f.quad_constant();
        break;
      }
      case LossKind::BlackBox:
        throw ValidationError("losses", "black-box losses are not serializable");
    }
    arr.push_back(std::move(rec));
  }
  return arr.dump();
}

std::vector<LossFn> losses_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("losses", std::string("invalid JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ValidationError("losses", "expected a JSON array");
  std::vector<LossFn> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& rec = arr[i];
    const std::string where = "losses[" + std::to_string(i) + "]";
    if (!rec.contains("kind")) throw ValidationError(where + ".kind", "missing");
    const std::string kind = rec.at("kind").get<std::string>();
    if (kind == "linear") {
      auto v = rec.at("ell").get<std::vector<double>>();
      out.push_back(LossFn::linear(Eigen::Map<Vector>(v.data(), v.size())));
    } else if (kind == "quadratic") {
      auto rows = rec.at("A").get<std::vector<std::vector<double>>>();
      const int d = static_cast<int>(rows.size());
      Matrix A(d, d);
      for (int r = 0; r < d; ++r) {
        if (static_cast<int>(rows[r].size()) != d)
          throw ValidationError(where + ".A", "ragged matrix");
        for (int c = 0; c < d; ++c) A(r, c) = rows[r][c];
      }
      auto bv = rec.at("b").get<std::vector<double>>();
      out.push_back(LossFn::quadratic(
          A, Eigen::Map<Vector>(bv.data(), bv.size()), rec.at("c").get<double>()));
    } else {
      throw ValidationError(where + ".kind", "unknown kind '" + kind + "'");
    }
  }
  return out;
}

}  // namespace altreg
