#pragma once

// Two-sample data containers and the h-transform that turns raw
// observations into the pooled design consumed by the likelihood.

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace drm {

using Observation = std::vector<double>;

struct TwoSampleData {
  std::vector<Observation> sample1;
  std::vector<Observation> sample2;

  std::size_t n1() const noexcept { return sample1.size(); }
  std::size_t n2() const noexcept { return sample2.size(); }
  // Raw covariate dimension m. Zero for an empty dataset.
  std::size_t dim() const noexcept;

  // Throws EmptyGroupError / DimensionError / DomainError.
  void validate() const;
};

class HTransform {
 public:
  enum class Kind { identity, log, quadratic, selected_columns };

  static HTransform identity() { return HTransform(Kind::identity, {}); }
  static HTransform log() { return HTransform(Kind::log, {}); }
  // Scalar x -> (x, x^2); applied per column, output is (x_1..x_m, x_1^2..x_m^2).
  static HTransform quadratic() { return HTransform(Kind::quadratic, {}); }
  static HTransform columns(std::vector<std::size_t> cols);

  // Parses the CLI spellings: identity | log | quad | cols=0,2,...
  static HTransform parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& selected() const noexcept { return cols_; }

  // Output dimension d for raw dimension m.
  std::size_t output_dim(std::size_t raw_dim) const;

  // h(x). Throws DomainError for nonpositive input under log, DimensionError
  // for an out-of-range selected column.
  Eigen::VectorXd apply(const Observation& x) const;

  std::string name() const;

 private:
  HTransform(Kind kind, std::vector<std::size_t> cols)
      : kind_(kind), cols_(std::move(cols)) {}

  Kind kind_;
  std::vector<std::size_t> cols_;
};

// Pooled design: rows of t are h(x) with the sample-1 block first.
struct DesignData {
  Eigen::MatrixXd t;    // n x d
  Eigen::MatrixXd raw;  // n x m, untransformed, same row order as t
  std::vector<int> group;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double rho1 = 0.0;

  std::size_t n() const noexcept { return n1 + n2; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(t.cols()); }
};

DesignData apply_h(const TwoSampleData& data, const HTransform& h);

// Builds a design directly from transformed values, one row per observation.
// Used by tests and by callers that already hold h(x).
DesignData make_design(const Eigen::MatrixXd& t1, const Eigen::MatrixXd& t2);
DesignData make_design(const std::vector<double>& t1, const std::vector<double>& t2);

// The model is identifiable when some x0 has h(x0) = 0. For a concrete design
// the usable proxy is that the origin lies inside the bounding box of the
// pooled t-values. Returns false (and the caller may warn) otherwise.
bool origin_within_design_range(const DesignData& design);

// CSV with a header row; `sample_column` holds 1 or 2, every other column is a
// numeric covariate in file order.
TwoSampleData load_two_sample_csv(std::istream& in,
                                  std::string_view sample_column = "sample");

// Writes the schema read by load_two_sample_csv using shortest round-trip
// formatting, so write-then-load is bit exact.
void write_two_sample_csv(std::ostream& out, const TwoSampleData& data,
                          const std::vector<std::string>& covariate_names = {});

}  // namespace drm
