#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgpad/manifest.hpp"
#include "sgpad/saliency.hpp"

namespace sgpad {

enum class Decision { Genuine, Fake };

struct StrokePoint {
  double x = 0.0;  // column, image pixels
  double y = 0.0;  // row, image pixels
  friend bool operator==(const StrokePoint&, const StrokePoint&) = default;
};

struct Stroke {
  std::vector<StrokePoint> points;
  double brush_width = 1.0;
  std::int64_t t_start_ms = 0;
  std::int64_t t_end_ms = 0;
  friend bool operator==(const Stroke&, const Stroke&) = default;
};

// One annotator's session on one sample. JSON keys mirror the field names;
// points are [x, y] pairs and image_dims is {"width": w, "height": h}.
struct AnnotationExport {
  std::string sample_id;
  std::string annotator_id;
  Decision decision = Decision::Genuine;
  std::optional<std::string> text_description;
  std::vector<Stroke> strokes;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const AnnotationExport&, const AnnotationExport&) = default;
};

// Schema violation, carrying the JSON path of the offending field
// (e.g. "strokes[2].t_end_ms").
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(ErrorCode::Parse, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

AnnotationExport annotation_from_json(const nlohmann::json& j);
AnnotationExport parse_annotation(const std::string& text);
nlohmann::json annotation_to_json(const AnnotationExport& a);

// Binary union of brush disks (diameter brush_width) swept along each
// stroke polyline; FOI granularity, human source.
SaliencyMap rasterize_annotation(const AnnotationExport& a);

struct IngestResult {
  Manifest manifest;
  std::vector<std::string> warnings;
  std::vector<std::string> written_maps;
};

// Rasterizes, fuses per sample (mean over annotators), writes
// `<map_dir>/<sample_id>__human.png` and attaches it to the manifest record.
// Samples with fewer than min_annotators distinct annotators are skipped
// with a warning.
IngestResult ingest_annotations(const std::vector<AnnotationExport>& exports,
                                const Manifest& manifest, const std::string& map_dir,
                                std::size_t min_annotators = 2);

}  // namespace sgpad
