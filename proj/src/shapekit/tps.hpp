#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapekit/geometry.hpp"

namespace shapekit {

/// One record of a tpsDig-style landmark file. Coordinates are stored with
/// any SCALE factor already applied; serialization writes the pre-scaled
/// coordinates and never emits a SCALE line.
struct TpsRecord {
  Eigen::MatrixX2d points;
  std::string image;
  std::string id;
};

/// Parses records introduced by "LM=<count>" lines, followed by <count>
/// coordinate lines and optional IMAGE= / ID= / SCALE= lines. Blank lines
/// are ignored; unknown KEY= lines are skipped (collected as warnings).
std::vector<TpsRecord> parse_tps(const std::string& text,
                                 std::vector<std::string>* warnings = nullptr);

std::string serialize_tps(const std::vector<TpsRecord>& records);

std::vector<TpsRecord> read_tps_file(const std::string& path,
                                     std::vector<std::string>* warnings = nullptr);
void write_tps_file(const std::vector<TpsRecord>& records, const std::string& path);

/// Sidecar label table: a CSV with header "id,label[,<covariate>...]".
struct LabelTable {
  // id -> (label, covariates)
  std::map<std::string, std::pair<std::string, std::map<std::string, std::string>>> rows;
};

LabelTable read_labels_csv(const std::string& path);

/// Builds a raw sample from parsed records; ids default to the record's ID,
/// then IMAGE, then the 1-based record index. When labels are provided,
/// every record must be present in the table.
ShapeSample sample_from_records(const std::vector<TpsRecord>& records,
                                const LabelTable* labels = nullptr);

std::vector<TpsRecord> records_from_sample(const ShapeSample& sample);

/// Writes a file atomically (temp file + rename).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace shapekit
