#pragma once

// Truncated orthonormal bases and the coefficient fields that live on them.
//
// Every element of X, Y, Z or Z* is represented by its first N coefficients
// in one fixed real orthonormal basis {psi_l}, l = 1..N. Mode indices are
// 1-based in the public API (they carry meaning through the weights) and
// 0-based when indexing the coefficient storage.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace largenoise {

/// Dimension and truncation level of the basis. Frequency weights follow the
/// global-index rule w_l = l^{1/d}.
class BasisSpec {
 public:
  BasisSpec() = default;
  BasisSpec(int dimension, std::size_t mode_count);

  int dimension() const noexcept { return dimension_; }
  std::size_t mode_count() const noexcept { return mode_count_; }

  /// Weight of the 1-based mode l.
  double weight(std::size_t mode) const;
  std::vector<double> weights() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  int dimension_ = 1;
  std::size_t mode_count_ = 1;
};

/// Which space a field is meant to represent. Bookkeeping only; no operation
/// changes behaviour based on the tag.
enum class SpaceTag { X, Y, Zdual };

std::string to_string(SpaceTag tag);
SpaceTag space_tag_from_string(const std::string& name);

/// Immutable coefficient vector on a basis.
class CoefficientField {
 public:
  CoefficientField(BasisSpec basis, std::vector<double> coeffs,
                   SpaceTag tag = SpaceTag::Y);

  static CoefficientField zeros(const BasisSpec& basis,
                                SpaceTag tag = SpaceTag::Y);
  /// value * e_mode, mode is 1-based.
  static CoefficientField unit(const BasisSpec& basis, std::size_t mode,
                               double value = 1.0, SpaceTag tag = SpaceTag::Y);

  const BasisSpec& basis() const noexcept { return basis_; }
  SpaceTag tag() const noexcept { return tag_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  /// 0-based coefficient access.
  double operator[](std::size_t index) const { return coeffs_[index]; }

  CoefficientField with_tag(SpaceTag tag) const;

  friend CoefficientField operator+(const CoefficientField& a,
                                    const CoefficientField& b);
  friend CoefficientField operator-(const CoefficientField& a,
                                    const CoefficientField& b);
  friend CoefficientField operator*(double scale, const CoefficientField& a);
  CoefficientField operator-() const { return -1.0 * *this; }

 private:
  BasisSpec basis_;
  std::vector<double> coeffs_;
  SpaceTag tag_;
};

/// Throws BasisMismatch when the two bases differ.
void require_same_basis(const BasisSpec& a, const BasisSpec& b,
                        const char* context);

/// ||u||_{H^r}^2 = sum_l w_l^{2r} u_l^2.
double sobolev_norm(const CoefficientField& u, double order);

/// sum_l l^{s-1/2} |u_l|; one-dimensional bases only.
double besov1_norm(const CoefficientField& u, double s);

/// Coefficient dot product; all pairings coincide on a truncated basis.
double dual_pairing(const CoefficientField& q, const CoefficientField& u);

/// Plain Euclidean norm of the coefficient vector (the Y = L^2 norm).
double l2_norm(const CoefficientField& u);

// Serialization: {"basis": {"d": .., "N": ..}, "space": "Y", "coeffs": [..]}
nlohmann::json to_json(const CoefficientField& u);
CoefficientField field_from_json(const nlohmann::json& j);

/// Two-column CSV (mode, value) with a header line.
void write_csv(std::ostream& out, const CoefficientField& u);

}  // namespace largenoise
