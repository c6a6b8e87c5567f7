#include "drm/data.hpp"

#include "drm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace drm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  // from_chars rejects a leading '+', which some writers emit.
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  return ec == std::errc() && ptr == end;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

std::size_t TwoSampleData::dim() const noexcept {
  if (!sample1.empty()) return sample1.front().size();
  if (!sample2.empty()) return sample2.front().size();
  return 0;
}

void TwoSampleData::validate() const {
  if (sample1.empty()) throw EmptyGroupError("sample 1 has no observations");
  if (sample2.empty()) throw EmptyGroupError("sample 2 has no observations");
  const auto m = dim();
  if (m == 0) throw DimensionError("observations must have at least one value");
  auto check = [m](const std::vector<Observation>& sample, int label) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      if (sample[j].size() != m) {
        throw DimensionError("sample " + std::to_string(label) + " observation " +
                             std::to_string(j) + " has dimension " +
                             std::to_string(sample[j].size()) + ", expected " +
                             std::to_string(m));
      }
      for (double v : sample[j]) {
        if (!std::isfinite(v)) {
          throw DomainError("sample " + std::to_string(label) + " observation " +
                            std::to_string(j) + " has a non-finite value");
        }
      }
    }
  };
  check(sample1, 1);
  check(sample2, 2);
}

HTransform HTransform::columns(std::vector<std::size_t> cols) {
  if (cols.empty()) throw InvalidArgument("selected-columns transform needs at least one column");
  return HTransform(Kind::selected_columns, std::move(cols));
}

HTransform HTransform::parse(std::string_view text) {
  text = trim(text);
  if (text == "identity") return identity();
  if (text == "log") return log();
  if (text == "quad" || text == "quadratic") return quadratic();
  if (text.starts_with("cols=")) {
    std::vector<std::size_t> cols;
    for (auto part : split_commas(text.substr(5))) {
      std::size_t c = 0;
      const auto* end = part.data() + part.size();
      const auto [ptr, ec] = std::from_chars(part.data(), end, c);
      if (part.empty() || ec != std::errc() || ptr != end) {
        throw InvalidArgument("bad column index '" + std::string(part) + "' in h spec");
      }
      cols.push_back(c);
    }
    return columns(std::move(cols));
  }
  throw InvalidArgument("unknown h transform '" + std::string(text) +
                        "' (expected identity|log|quad|cols=...)");
}

std::size_t HTransform::output_dim(std::size_t raw_dim) const {
  switch (kind_) {
    case Kind::identity:
    case Kind::log:
      return raw_dim;
    case Kind::quadratic:
      return 2 * raw_dim;
    case Kind::selected_columns:
      return cols_.size();
  }
  return raw_dim;
}

Eigen::VectorXd HTransform::apply(const Observation& x) const {
  const auto m = x.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(output_dim(m)));
  switch (kind_) {
    case Kind::identity:
      for (std::size_t k = 0; k < m; ++k) out[k] = x[k];
      break;
    case Kind::log:
      for (std::size_t k = 0; k < m; ++k) {
        if (!(x[k] > 0.0)) {
          throw DomainError("log transform needs positive input, got " + std::to_string(x[k]));
        }
        out[k] = std::log(x[k]);
      }
      break;
    case Kind::quadratic:
      for (std::size_t k = 0; k < m; ++k) {
        out[k] = x[k];
        out[m + k] = x[k] * x[k];
      }
      break;
    case Kind::selected_columns:
      for (std::size_t k = 0; k < cols_.size(); ++k) {
        if (cols_[k] >= m) {
          throw DimensionError("selected column " + std::to_string(cols_[k]) +
                               " out of range for dimension " + std::to_string(m));
        }
        out[k] = x[cols_[k]];
      }
      break;
  }
  return out;
}

std::string HTransform::name() const {
  switch (kind_) {
    case Kind::identity:
      return "identity";
    case Kind::log:
      return "log";
    case Kind::quadratic:
      return "quad";
    case Kind::selected_columns: {
      std::string s = "cols=";
      for (std::size_t k = 0; k < cols_.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(cols_[k]);
      }
      return s;
    }
  }
  return {};
}

DesignData apply_h(const TwoSampleData& data, const HTransform& h) {
  data.validate();
  const auto m = data.dim();
  const auto d = h.output_dim(m);
  DesignData design;
  design.n1 = data.n1();
  design.n2 = data.n2();
  design.rho1 = static_cast<double>(design.n1) / static_cast<double>(design.n2);
  const auto n = static_cast<Eigen::Index>(design.n());
  design.t.resize(n, static_cast<Eigen::Index>(d));
  design.raw.resize(n, static_cast<Eigen::Index>(m));
  design.group.reserve(design.n());

  Eigen::Index row = 0;
  auto fill = [&](const std::vector<Observation>& sample, int label) {
    for (std::size_t j = 0; j < sample.size(); ++j, ++row) {
      try {
        design.t.row(row) = h.apply(sample[j]).transpose();
      } catch (const DomainError& e) {
        throw DomainError("sample " + std::to_string(label) + " observation " +
                          std::to_string(j) + ": " + e.what());
      }
      for (std::size_t k = 0; k < m; ++k) design.raw(row, static_cast<Eigen::Index>(k)) = sample[j][k];
      design.group.push_back(label);
    }
  };
  fill(data.sample1, 1);
  fill(data.sample2, 2);
  if (!design.t.allFinite()) throw DomainError("h produced non-finite design values");
  return design;
}

DesignData make_design(const Eigen::MatrixXd& t1, const Eigen::MatrixXd& t2) {
  if (t1.rows() == 0 || t2.rows() == 0) throw EmptyGroupError("both samples need observations");
  if (t1.cols() != t2.cols() || t1.cols() == 0) {
    throw DimensionError("samples must share a positive design dimension");
  }
  DesignData design;
  design.n1 = static_cast<std::size_t>(t1.rows());
  design.n2 = static_cast<std::size_t>(t2.rows());
  design.rho1 = static_cast<double>(design.n1) / static_cast<double>(design.n2);
  design.t.resize(t1.rows() + t2.rows(), t1.cols());
  design.t << t1, t2;
  if (!design.t.allFinite()) throw DomainError("design values must be finite");
  design.raw = design.t;
  design.group.assign(design.n1, 1);
  design.group.insert(design.group.end(), design.n2, 2);
  return design;
}

DesignData make_design(const std::vector<double>& t1, const std::vector<double>& t2) {
  const Eigen::Map<const Eigen::VectorXd> a(t1.data(), static_cast<Eigen::Index>(t1.size()));
  const Eigen::Map<const Eigen::VectorXd> b(t2.data(), static_cast<Eigen::Index>(t2.size()));
  return make_design(Eigen::MatrixXd(a), Eigen::MatrixXd(b));
}

bool origin_within_design_range(const DesignData& design) {
  for (Eigen::Index k = 0; k < design.t.cols(); ++k) {
    if (design.t.col(k).minCoeff() > 0.0 || design.t.col(k).maxCoeff() < 0.0) return false;
  }
  return true;
}

TwoSampleData load_two_sample_csv(std::istream& in, std::string_view sample_column) {
  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines before the header.
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError("missing header row", line_no == 0 ? 1 : line_no);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  const auto header = split_commas(line);
  std::ptrdiff_t label_col = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (unquote(header[k]) == sample_column) {
      label_col = static_cast<std::ptrdiff_t>(k);
      break;
    }
  }
  if (label_col < 0) {
    throw ParseError("header has no column named '" + std::string(sample_column) + "'", line_no);
  }
  if (header.size() < 2) throw ParseError("header has no covariate columns", line_no);

  TwoSampleData data;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    Observation obs;
    obs.reserve(header.size() - 1);
    int label = 0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double v = 0.0;
      const bool ok = parse_double(cells[k], v);
      if (static_cast<std::ptrdiff_t>(k) == label_col) {
        if (!ok || (v != 1.0 && v != 2.0)) {
          throw ParseError("invalid sample label '" + std::string(cells[k]) + "' (expected 1 or 2)",
                           line_no);
        }
        label = static_cast<int>(v);
      } else {
        if (!ok || !std::isfinite(v)) {
          throw ParseError("non-numeric value '" + std::string(cells[k]) + "' in column '" +
                               std::string(unquote(header[k])) + "'",
                           line_no);
        }
        obs.push_back(v);
      }
    }
    (label == 1 ? data.sample1 : data.sample2).push_back(std::move(obs));
  }
  if (data.sample1.empty()) throw EmptyGroupError("no rows with sample = 1");
  if (data.sample2.empty()) throw EmptyGroupError("no rows with sample = 2");
  return data;
}

void write_two_sample_csv(std::ostream& out, const TwoSampleData& data,
                          const std::vector<std::string>& covariate_names) {
  const auto m = data.dim();
  if (!covariate_names.empty() && covariate_names.size() != m) {
    throw DimensionError("covariate name count does not match data dimension");
  }
  std::string buf = "sample";
  for (std::size_t k = 0; k < m; ++k) {
    buf += ',';
    buf += covariate_names.empty() ? "x" + std::to_string(k + 1) : covariate_names[k];
  }
  buf += '\n';
  auto rows = [&](const std::vector<Observation>& sample, char label) {
    for (const auto& obs : sample) {
      buf += label;
      for (double v : obs) {
        buf += ',';
        append_double(buf, v);
      }
      buf += '\n';
    }
  };
  rows(data.sample1, '1');
  rows(data.sample2, '2');
  out << buf;
}

}  // namespace drm
