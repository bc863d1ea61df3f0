#include "largenoise/spectral.hpp"

#include <cmath>
#include <ostream>

#include "largenoise/errors.hpp"
#include "numeric_io.hpp"

namespace largenoise {

BasisSpec::BasisSpec(int dimension, std::size_t mode_count)
    : dimension_(dimension), mode_count_(mode_count) {
  if (dimension != 1 && dimension != 2)
    throw InvalidArgument("BasisSpec: dimension must be 1 or 2");
  if (mode_count < 1) throw InvalidArgument("BasisSpec: mode_count must be >= 1");
}

double BasisSpec::weight(std::size_t mode) const {
  if (mode < 1 || mode > mode_count_)
    throw InvalidArgument("BasisSpec::weight: mode out of range");
  if (dimension_ == 1) return static_cast<double>(mode);
  return std::pow(static_cast<double>(mode), 1.0 / dimension_);
}

std::vector<double> BasisSpec::weights() const {
  std::vector<double> w(mode_count_);
  for (std::size_t l = 1; l <= mode_count_; ++l) w[l - 1] = weight(l);
  return w;
}

std::string to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::X: return "X";
    case SpaceTag::Y: return "Y";
    case SpaceTag::Zdual: return "Zdual";
  }
  return "Y";
}

SpaceTag space_tag_from_string(const std::string& name) {
  if (name == "X") return SpaceTag::X;
  if (name == "Y") return SpaceTag::Y;
  if (name == "Zdual") return SpaceTag::Zdual;
  throw InvalidArgument("unknown space tag '" + name + "'");
}

CoefficientField::CoefficientField(BasisSpec basis, std::vector<double> coeffs,
                                   SpaceTag tag)
    : basis_(basis), coeffs_(std::move(coeffs)), tag_(tag) {
  if (coeffs_.size() != basis_.mode_count())
    throw InvalidArgument("CoefficientField: length does not match basis");
  for (double c : coeffs_)
    if (!std::isfinite(c))
      throw InvalidArgument("CoefficientField: non-finite coefficient");
}

CoefficientField CoefficientField::zeros(const BasisSpec& basis, SpaceTag tag) {
  return {basis, std::vector<double>(basis.mode_count(), 0.0), tag};
}

CoefficientField CoefficientField::unit(const BasisSpec& basis,
                                        std::size_t mode, double value,
                                        SpaceTag tag) {
  if (mode < 1 || mode > basis.mode_count())
    throw InvalidArgument("CoefficientField::unit: mode out of range");
  std::vector<double> c(basis.mode_count(), 0.0);
  c[mode - 1] = value;
  return {basis, std::move(c), tag};
}

CoefficientField CoefficientField::with_tag(SpaceTag tag) const {
  CoefficientField copy = *this;
  copy.tag_ = tag;
  return copy;
}

void require_same_basis(const BasisSpec& a, const BasisSpec& b,
                        const char* context) {
  if (!(a == b))
    throw BasisMismatch(std::string(context) + ": basis mismatch");
}

CoefficientField operator+(const CoefficientField& a,
                           const CoefficientField& b) {
  require_same_basis(a.basis_, b.basis_, "operator+");
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeffs_[i] + b.coeffs_[i];
  return {a.basis_, std::move(c), a.tag_};
}

CoefficientField operator-(const CoefficientField& a,
                           const CoefficientField& b) {
  require_same_basis(a.basis_, b.basis_, "operator-");
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeffs_[i] - b.coeffs_[i];
  return {a.basis_, std::move(c), a.tag_};
}

CoefficientField operator*(double scale, const CoefficientField& a) {
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = scale * a.coeffs_[i];
  return {a.basis_, std::move(c), a.tag_};
}

double sobolev_norm(const CoefficientField& u, double order) {
  const auto& basis = u.basis();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double c = u[i];
    if (c == 0.0) continue;
    const double w = order == 0.0 ? 1.0 : std::pow(basis.weight(i + 1), 2.0 * order);
    sum += w * c * c;
  }
  return std::sqrt(sum);
}

double besov1_norm(const CoefficientField& u, double s) {
  if (u.basis().dimension() != 1)
    throw InvalidArgument("besov1_norm: only one-dimensional bases are supported");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    sum += std::pow(static_cast<double>(i + 1), s - 0.5) * std::abs(u[i]);
  return sum;
}

double dual_pairing(const CoefficientField& q, const CoefficientField& u) {
  require_same_basis(q.basis(), u.basis(), "dual_pairing");
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += q[i] * u[i];
  return sum;
}

double l2_norm(const CoefficientField& u) {
  double sum = 0.0;
  for (double c : u.coeffs()) sum += c * c;
  return std::sqrt(sum);
}

nlohmann::json to_json(const CoefficientField& u) {
  nlohmann::json j;
  j["basis"] = {{"d", u.basis().dimension()}, {"N", u.basis().mode_count()}};
  j["space"] = to_string(u.tag());
  j["coeffs"] = std::vector<double>(u.coeffs().begin(), u.coeffs().end());
  return j;
}

CoefficientField field_from_json(const nlohmann::json& j) {
  try {
    const auto& b = j.at("basis");
    BasisSpec basis(b.at("d").get<int>(), b.at("N").get<std::size_t>());
    auto tag = j.contains("space")
                   ? space_tag_from_string(j.at("space").get<std::string>())
                   : SpaceTag::Y;
    return {basis, j.at("coeffs").get<std::vector<double>>(), tag};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("field_from_json: ") + e.what());
  }
}

void write_csv(std::ostream& out, const CoefficientField& u) {
  out << "mode,value\n";
  for (std::size_t i = 0; i < u.size(); ++i)
    out << (i + 1) << ',' << detail::format_double(u[i]) << '\n';
}

}  // namespace largenoise
