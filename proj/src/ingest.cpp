#include "implquad/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include "implquad/error.hpp"

namespace implquad {

namespace {

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t' || text[b] == '\r' || text[b] == '"')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r' || text[e - 1] == '"')) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<ColumnScaling> min_max(const Eigen::MatrixXd& points) {
  std::vector<ColumnScaling> out(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    if (points.rows() == 0) break;
    out[static_cast<std::size_t>(c)] = {points.col(c).minCoeff(), points.col(c).maxCoeff()};
  }
  return out;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char separator) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, separator)) out.push_back(trim(field));
  if (!text.empty() && text.back() == separator) out.emplace_back();
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string fingerprint(const Eigen::MatrixXd& points, const std::vector<std::string>& column_names) {
  std::string bytes;
  for (const auto& name : column_names) bytes += name + '\n';
  const Eigen::MatrixXd row_major = points;
  for (Eigen::Index r = 0; r < row_major.rows(); ++r) {
    for (Eigen::Index c = 0; c < row_major.cols(); ++c) {
      const double v = row_major(r, c);
      bytes.append(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  return sha256_hex(bytes);
}

SampleSet::SampleSet(Eigen::MatrixXd points, std::vector<std::string> column_names, std::string source_hash)
    : points_(std::move(points)), column_names_(std::move(column_names)), source_hash_(std::move(source_hash)) {
  scaling_ = min_max(points_);
  validate_and_scale();
}

SampleSet::SampleSet(Eigen::MatrixXd points, std::vector<std::string> column_names,
                     std::vector<ColumnScaling> scaling, std::string source_hash)
    : points_(std::move(points)),
      column_names_(std::move(column_names)),
      scaling_(std::move(scaling)),
      source_hash_(std::move(source_hash)) {
  validate_and_scale();
}

void SampleSet::validate_and_scale() {
  if (points_.rows() == 0) throw Error(ErrorKind::EmptyData, "sample set has no rows");
  if (points_.cols() == 0) throw Error(ErrorKind::Schema, "sample set has no columns");
  if (column_names_.size() != static_cast<std::size_t>(points_.cols())) {
    throw Error(ErrorKind::Schema, "column name count does not match the data");
  }
  if (scaling_.size() != column_names_.size()) {
    throw Error(ErrorKind::Schema, "scaling count does not match the data");
  }
  if (!points_.allFinite()) throw Error(ErrorKind::Parse, "sample set contains non-finite values");
  for (std::size_t c = 0; c < scaling_.size(); ++c) {
    if (!(scaling_[c].lo < scaling_[c].hi)) {
      throw Error(ErrorKind::Schema, "column '" + column_names_[c] + "' is constant; degenerate scaling");
    }
  }
  scaled_ = scale(points_, scaling_, true);
  if (source_hash_.empty()) source_hash_ = fingerprint(points_, column_names_);
}

SampleSet parse_samples(const std::string& content, const std::vector<std::string>& columns,
                        std::string source_hash) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyData, "CSV input is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_list(line);
  if (columns.empty()) throw Error(ErrorKind::Schema, "no columns selected");
  std::vector<std::size_t> positions;
  for (const auto& name : columns) {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        found = i;
        break;
      }
    }
    if (found == header.size()) throw Error(ErrorKind::Schema, "missing column '" + name + "'");
    positions.push_back(found);
  }

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split_list(line);
    for (std::size_t c = 0; c < positions.size(); ++c) {
      const std::size_t p = positions[c];
      if (p >= fields.size()) {
        throw Error(ErrorKind::Parse, "row " + std::to_string(line_number) + ": missing field for column '" +
                                          columns[c] + "'");
      }
      const std::string& cell = fields[p];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::Parse, "row " + std::to_string(line_number) + ": cannot parse '" + cell +
                                          "' in column '" + columns[c] + "' as a finite number");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::EmptyData, "CSV contains no data rows");
  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * columns.size() + c];
    }
  }
  if (source_hash.empty()) source_hash = sha256_hex(content);
  return SampleSet(std::move(points), columns, std::move(source_hash));
}

SampleSet load_samples(const std::filesystem::path& path, const std::vector<std::string>& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  return parse_samples(content, columns, sha256_hex(content));
}

void write_samples_csv(const std::filesystem::path& path, const Eigen::MatrixXd& points,
                       const std::vector<std::string>& column_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  for (std::size_t c = 0; c < column_names.size(); ++c) out << (c ? "," : "") << column_names[c];
  out << '\n';
  char buffer[32];
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      std::snprintf(buffer, sizeof buffer, "%.17g", points(r, c));
      out << (c ? "," : "") << buffer;
    }
    out << '\n';
  }
}

Eigen::MatrixXd scale(const Eigen::MatrixXd& raw, const std::vector<ColumnScaling>& scaling, bool strict) {
  if (static_cast<std::size_t>(raw.cols()) != scaling.size()) {
    throw Error(ErrorKind::Schema, "coordinate dimension does not match the scaling");
  }
  Eigen::MatrixXd out(raw.rows(), raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const auto [lo, hi] = scaling[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
      const double x = raw(r, c);
      if (strict && (x < lo || x > hi)) {
        throw Error(ErrorKind::OutOfRange, "coordinate outside the scaling range in column " + std::to_string(c));
      }
      out(r, c) = (x - lo) / (hi - lo);
    }
  }
  return out;
}

Eigen::MatrixXd unscale(const Eigen::MatrixXd& scaled, const std::vector<ColumnScaling>& scaling) {
  if (static_cast<std::size_t>(scaled.cols()) != scaling.size()) {
    throw Error(ErrorKind::Schema, "coordinate dimension does not match the scaling");
  }
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    const auto [lo, hi] = scaling[static_cast<std::size_t>(c)];
    out.col(c) = (lo + (hi - lo) * scaled.col(c).array()).matrix();
  }
  return out;
}

MomentVector empirical_moments(const SampleSet& samples, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::Argument, "moment count must be at least 1");
  const BasisSpec spec = BasisSpec::graded_lex(samples.dimension(), count);
  const Eigen::MatrixXd v = vandermonde(samples.scaled(), spec);
  MomentVector out;
  out.multi_indices = spec.indices;
  out.values.resize(count);
  out.values[0] = 1.0;
  for (std::size_t j = 1; j < count; ++j) out.values[j] = v.row(static_cast<Eigen::Index>(j)).mean();
  return out;
}

}  // namespace implquad
