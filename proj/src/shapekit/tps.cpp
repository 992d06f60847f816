#include "shapekit/tps.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shapekit {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_fail(int line_number, const std::string& message) {
  raise(ErrorCode::parse_error,
        "TPS parse error at line " + std::to_string(line_number) + ": " + message);
}

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// "KEY=value" -> key uppercase-matched; returns false for non key lines.
bool split_key(const std::string& line, std::string& key, std::string& value) {
  const std::size_t eq = line.find('=');
  if (eq == std::string::npos) return false;
  key = trim(line.substr(0, eq));
  for (char c : key)
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  for (char& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  value = trim(line.substr(eq + 1));
  return !key.empty();
}

void format_coordinate(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::vector<TpsRecord> parse_tps(const std::string& text,
                                 std::vector<std::string>* warnings) {
  std::vector<TpsRecord> records;
  struct Pending {
    int declared = 0;
    std::vector<std::pair<double, double>> coords;
    std::string image, id;
    std::optional<double> scale;
    bool open = false;
  } current;

  auto finish = [&](int line_number) {
    if (!current.open) return;
    if (static_cast<int>(current.coords.size()) != current.declared)
      parse_fail(line_number, "record declares LM=" + std::to_string(current.declared) +
                                  " but has " + std::to_string(current.coords.size()) +
                                  " coordinate lines");
    TpsRecord record;
    record.points.resize(current.declared, 2);
    const double scale = current.scale.value_or(1.0);
    for (int l = 0; l < current.declared; ++l) {
      record.points(l, 0) = current.coords[l].first * scale;
      record.points(l, 1) = current.coords[l].second * scale;
    }
    record.image = current.image;
    record.id = current.id;
    records.push_back(std::move(record));
    current = Pending{};
  };

  std::istringstream stream(text);
  std::string raw_line;
  int line_number = 0;
  while (std::getline(stream, raw_line)) {
    ++line_number;
    const std::string line = trim(raw_line);
    if (line.empty()) continue;

    std::string key, value;
    if (split_key(line, key, value)) {
      if (key == "LM") {
        finish(line_number);
        int count = 0;
        if (!(std::from_chars(value.data(), value.data() + value.size(), count).ec ==
              std::errc()) ||
            count < 1)
          parse_fail(line_number, "malformed LM count '" + value + "'");
        current.open = true;
        current.declared = count;
      } else if (!current.open) {
        parse_fail(line_number, "'" + key + "=' before any LM= header");
      } else if (key == "IMAGE") {
        current.image = value;
      } else if (key == "ID") {
        current.id = value;
      } else if (key == "SCALE") {
        double scale = 0.0;
        if (!parse_double(value, scale) || scale <= 0.0)
          parse_fail(line_number, "malformed SCALE '" + value + "'");
        current.scale = scale;
      } else {
        if (warnings)
          warnings->push_back("line " + std::to_string(line_number) +
                              ": unsupported key '" + key + "=' skipped");
      }
      continue;
    }

    // Coordinate line: two whitespace-separated decimal numbers.
    if (!current.open) parse_fail(line_number, "coordinates before any LM= header");
    if (static_cast<int>(current.coords.size()) >= current.declared)
      parse_fail(line_number, "more coordinate lines than LM=" +
                                  std::to_string(current.declared));
    std::istringstream fields(line);
    std::string a, b, extra;
    fields >> a >> b;
    if (fields >> extra)
      parse_fail(line_number, "expected two coordinates, got more");
    double x = 0.0, y = 0.0;
    if (b.empty() || !parse_double(a, x) || !parse_double(b, y))
      parse_fail(line_number, "malformed coordinate line '" + line + "'");
    current.coords.emplace_back(x, y);
  }
  finish(line_number + 1);
  if (records.empty())
    raise(ErrorCode::parse_error, "TPS input contains no LM= records");
  return records;
}

std::string serialize_tps(const std::vector<TpsRecord>& records) {
  std::string out;
  for (const auto& record : records) {
    out += "LM=" + std::to_string(record.points.rows()) + "\n";
    for (int l = 0; l < record.points.rows(); ++l) {
      format_coordinate(out, record.points(l, 0));
      out += ' ';
      format_coordinate(out, record.points(l, 1));
      out += '\n';
    }
    if (!record.image.empty()) out += "IMAGE=" + record.image + "\n";
    if (!record.id.empty()) out += "ID=" + record.id + "\n";
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io_error, "cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) raise(ErrorCode::io_error, "failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    raise(ErrorCode::io_error,
          "failed to move '" + tmp + "' into place: " + std::strerror(errno));
}

std::vector<TpsRecord> read_tps_file(const std::string& path,
                                     std::vector<std::string>* warnings) {
  return parse_tps(read_text_file(path), warnings);
}

void write_tps_file(const std::vector<TpsRecord>& records, const std::string& path) {
  write_text_file(path, serialize_tps(records));
}

LabelTable read_labels_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line))
    raise(ErrorCode::parse_error, "labels file '" + path + "' is empty");

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(s);
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };

  const std::vector<std::string> header = split(trim(line));
  if (header.size() < 2 || header[0] != "id" || header[1] != "label")
    raise(ErrorCode::parse_error,
          "labels file must start with header 'id,label[,<covariate>...]'");

  LabelTable table;
  int line_number = 1;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::vector<std::string> cells = split(trimmed);
    if (cells.size() < 2)
      raise(ErrorCode::parse_error, "labels file line " + std::to_string(line_number) +
                                        ": expected at least id and label");
    std::map<std::string, std::string> covariates;
    for (std::size_t c = 2; c < cells.size() && c < header.size(); ++c)
      if (!cells[c].empty()) covariates[header[c]] = cells[c];
    table.rows[cells[0]] = {cells[1], std::move(covariates)};
  }
  return table;
}

ShapeSample sample_from_records(const std::vector<TpsRecord>& records,
                                const LabelTable* labels) {
  ShapeSample sample;
  sample.state = AlignmentState::raw;
  sample.members.reserve(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    LandmarkConfiguration config;
    config.points = records[r].points;
    if (!records[r].id.empty()) config.id = records[r].id;
    else if (!records[r].image.empty()) config.id = records[r].image;
    else config.id = "record-" + std::to_string(r + 1);
    if (labels) {
      auto hit = labels->rows.find(config.id);
      if (hit == labels->rows.end())
        raise(ErrorCode::invalid_input,
              "labels file has no entry for specimen '" + config.id + "'");
      config.label = hit->second.first;
      config.covariates = hit->second.second;
    }
    sample.members.push_back(std::move(config));
  }
  validate_sample(sample);
  return sample;
}

std::vector<TpsRecord> records_from_sample(const ShapeSample& sample) {
  std::vector<TpsRecord> records;
  records.reserve(sample.members.size());
  for (const auto& member : sample.members) {
    TpsRecord record;
    record.points = member.points;
    record.id = member.id;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace shapekit
