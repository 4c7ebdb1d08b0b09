#include "vfsl/csv.hpp"

#include <charconv>
#include <cmath>

#include "vfsl/vfeb.hpp"

namespace vfsl {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

float parse_float(std::string_view field, std::size_t record) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  float value = 0.0f;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec == std::errc::invalid_argument || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseFailure, "record " + std::to_string(record) +
                                             ": cannot parse '" + std::string(field) +
                                             "' as a number");
  }
  if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteEntry,
                "record " + std::to_string(record) + ": non-finite value " + std::string(field));
  }
  return value;
}

std::string format_float(float v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && !record_has_content;
    if (!blank) records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !trim(field).empty()) {
          throw Error(ErrorCode::ParseFailure, "stray quote inside an unquoted field");
        }
        field.clear();
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += ch;
        field_started = true;
        if (ch != ' ' && ch != '\t') record_has_content = true;
        break;
    }
  }
  if (in_quotes) throw Error(ErrorCode::ParseFailure, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

EmbeddingMatrix parse_csv(std::string_view text, bool has_header) {
  auto records = parse_csv_records(text);
  bool named = false;
  std::size_t first = 0;
  if (has_header) {
    if (records.empty()) throw Error(ErrorCode::EmptyMatrix, "CSV has no header row");
    named = !records[0].empty() && trim(records[0][0]) == "name";
    first = 1;
  }
  if (records.size() <= first) throw Error(ErrorCode::EmptyMatrix, "CSV has no data rows");

  const std::size_t width = records[first].size();
  const std::size_t cols = named ? width - 1 : width;
  if (cols == 0) throw Error(ErrorCode::EmptyMatrix, "CSV has no numeric columns");
  if (has_header && records[0].size() != width) {
    throw Error(ErrorCode::RaggedRows, "header width differs from data width");
  }

  const std::size_t rows = records.size() - first;
  std::vector<float> data;
  data.reserve(rows * cols);
  std::vector<std::string> names;
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width) {
      throw Error(ErrorCode::RaggedRows, "record " + std::to_string(r + 1) + " has " +
                                             std::to_string(rec.size()) + " fields, expected " +
                                             std::to_string(width));
    }
    std::size_t c = 0;
    if (named) names.push_back(rec[c++]);
    for (; c < rec.size(); ++c) data.push_back(parse_float(rec[c], r + 1));
  }

  EmbeddingMatrix out;
  out.matrix = DenseMatrix(rows, cols, std::move(data));
  if (named) out.names = std::move(names);
  out.validate();
  return out;
}

EmbeddingMatrix read_csv(const std::filesystem::path& path, bool has_header) {
  return parse_csv(read_file(path), has_header);
}

std::string format_csv(const EmbeddingMatrix& matrix) {
  matrix.validate();
  const auto& m = matrix.matrix;
  std::string out;
  if (matrix.names) out += "name,";
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) out += ',';
    out += 'c';
    out += std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (matrix.names) {
      out += csv_escape((*matrix.names)[r]);
      out += ',';
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_float(m(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  write_file(path, format_csv(matrix));
}

LabelVector parse_labels(std::string_view text, std::size_t num_classes) {
  std::vector<std::uint32_t> labels;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto end = text.find('\n');
    auto line = trim(text.substr(0, end));
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (line.empty()) continue;
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw Error(ErrorCode::ParseFailure, "labels line " + std::to_string(line_no) +
                                               ": '" + std::string(line) +
                                               "' is not a class index");
    }
    labels.push_back(value);
  }
  if (labels.empty()) throw Error(ErrorCode::EmptyMatrix, "labels file is empty");
  auto out = LabelVector::from_labels(std::move(labels));
  if (num_classes != 0) {
    out.num_classes = num_classes;
    out.validate();
  }
  return out;
}

LabelVector read_labels(const std::filesystem::path& path, std::size_t num_classes) {
  return parse_labels(read_file(path), num_classes);
}

std::string format_labels(const LabelVector& labels) {
  std::string out;
  for (auto label : labels.labels) {
    out += std::to_string(label);
    out += '\n';
  }
  return out;
}

void write_labels(const LabelVector& labels, const std::filesystem::path& path) {
  write_file(path, format_labels(labels));
}

}  // namespace vfsl
