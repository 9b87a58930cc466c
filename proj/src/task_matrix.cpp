#include "fscil/task_matrix.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

namespace fscil {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

double parse_number(std::string_view token) {
  token = trim(token);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    raise(ErrorCode::MalformedHeader, "not a number: '" + std::string(token) + "'");
  }
  return value;
}

int parse_int(std::string_view token) {
  token = trim(token);
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    raise(ErrorCode::MalformedHeader, "not an integer: '" + std::string(token) + "'");
  }
  return value;
}

void check_entry_range(double value) {
  if (!(value >= 0.0 && value <= 100.0)) {
    raise(ErrorCode::ValueOutOfRange,
          "accuracy " + format_double(value) + " outside [0,100]");
  }
}

AccuracyMatrix parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  if (lines.empty()) raise(ErrorCode::MalformedHeader, "empty input");

  auto header = split(lines[0], ',');
  if (header.size() != 4 || trim(header[0]) != "layout") {
    raise(ErrorCode::MalformedHeader,
          "expected 'layout,<n_tasks>,<base_classes>,<novel_classes>'");
  }
  TaskLayout layout;
  layout.n_tasks = parse_int(header[1]);
  layout.base_classes = parse_int(header[2]);
  layout.novel_classes = parse_int(header[3]);
  validate_layout(layout);

  if (static_cast<int>(lines.size()) - 1 != layout.n_tasks) {
    raise(ErrorCode::MalformedHeader,
          "expected " + std::to_string(layout.n_tasks) + " data rows, got " +
              std::to_string(lines.size() - 1));
  }

  AccuracyMatrix m(layout);
  for (int i = 1; i <= layout.n_tasks; ++i) {
    auto fields = split(lines[i], ',');
    if (parse_int(fields[0]) != i) {
      raise(ErrorCode::MalformedHeader, "row " + std::to_string(i) + " out of order");
    }
    if (static_cast<int>(fields.size()) - 1 != i) {
      raise(ErrorCode::RowLengthMismatch,
            "row " + std::to_string(i) + " needs " + std::to_string(i) + " values, got " +
                std::to_string(fields.size() - 1));
    }
    for (int j = 1; j <= i; ++j) {
      double value = parse_number(fields[j]);
      check_entry_range(value);
      m.set(i, j, value);
    }
  }
  return m;
}

AccuracyMatrix parse_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::MalformedHeader, std::string("bad JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layout") || !doc.contains("rows")) {
    raise(ErrorCode::MalformedHeader, "expected object with 'layout' and 'rows'");
  }
  const auto& jl = doc["layout"];
  if (!jl.is_object() || !jl.contains("n_tasks") || !jl.contains("base_classes") ||
      !jl.contains("novel_classes")) {
    raise(ErrorCode::MalformedHeader, "layout needs n_tasks/base_classes/novel_classes");
  }
  TaskLayout layout;
  try {
    layout.n_tasks = jl["n_tasks"].get<int>();
    layout.base_classes = jl["base_classes"].get<int>();
    layout.novel_classes = jl["novel_classes"].get<int>();
    if (jl.contains("shots")) layout.shots = jl["shots"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::MalformedHeader, std::string("bad layout field: ") + e.what());
  }
  validate_layout(layout);

  const auto& rows = doc["rows"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != layout.n_tasks) {
    raise(ErrorCode::MalformedHeader,
          "'rows' must hold " + std::to_string(layout.n_tasks) + " arrays");
  }
  AccuracyMatrix m(layout);
  for (int i = 1; i <= layout.n_tasks; ++i) {
    const auto& row = rows[i - 1];
    if (!row.is_array()) raise(ErrorCode::MalformedHeader, "row is not an array");
    if (static_cast<int>(row.size()) != i) {
      raise(ErrorCode::RowLengthMismatch,
            "row " + std::to_string(i) + " needs " + std::to_string(i) + " values, got " +
                std::to_string(row.size()));
    }
    for (int j = 1; j <= i; ++j) {
      if (!row[j - 1].is_number()) raise(ErrorCode::MalformedHeader, "non-numeric entry");
      double value = row[j - 1].get<double>();
      check_entry_range(value);
      m.set(i, j, value);
    }
  }
  return m;
}

}  // namespace

void validate_layout(const TaskLayout& layout) {
  if (layout.n_tasks < 1 || layout.base_classes < 1 || layout.novel_classes < 1 ||
      layout.shots < 1) {
    raise(ErrorCode::NonPositiveLayout, "layout counts must be positive");
  }
}

AccuracyMatrix::AccuracyMatrix(TaskLayout layout) : layout_(layout) {
  validate_layout(layout_);
  std::size_t n = static_cast<std::size_t>(layout_.n_tasks);
  values_.assign(n * (n + 1) / 2, 0.0);
}

std::size_t AccuracyMatrix::index(int i, int j) const {
  if (i < 1 || i > layout_.n_tasks || j < 1 || j > i) {
    raise(ErrorCode::SessionOutOfRange,
          "A(" + std::to_string(i) + "," + std::to_string(j) + ") outside layout");
  }
  std::size_t row = static_cast<std::size_t>(i - 1);
  return row * (row + 1) / 2 + static_cast<std::size_t>(j - 1);
}

void AccuracyMatrix::set(int i, int j, double value) {
  check_entry_range(value);
  values_[index(i, j)] = value;
}

void AccuracyMatrix::validate() const {
  validate_layout(layout_);
  for (double v : values_) check_entry_range(v);
}

AccuracyMatrix parse_matrix(std::string_view text, MatrixFormat format) {
  return format == MatrixFormat::Csv ? parse_csv(text) : parse_json(text);
}

std::string emit_matrix(const AccuracyMatrix& m, MatrixFormat format) {
  const TaskLayout& layout = m.layout();
  if (format == MatrixFormat::Csv) {
    std::string out = "layout," + std::to_string(layout.n_tasks) + "," +
                      std::to_string(layout.base_classes) + "," +
                      std::to_string(layout.novel_classes) + "\n";
    for (int i = 1; i <= layout.n_tasks; ++i) {
      out += std::to_string(i);
      for (int j = 1; j <= i; ++j) {
        out += ',';
        out += format_double(m.at(i, j));
      }
      out += '\n';
    }
    return out;
  }
  ordered_json doc;
  doc["layout"] = {{"n_tasks", layout.n_tasks},
                   {"base_classes", layout.base_classes},
                   {"novel_classes", layout.novel_classes}};
  doc["rows"] = ordered_json::array();
  for (int i = 1; i <= layout.n_tasks; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 1; j <= i; ++j) row.push_back(m.at(i, j));
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace fscil
