#include "sgpad/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "sgpad/image_io.hpp"

namespace sgpad {

using nlohmann::json;

namespace {

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
  auto it = j.find(key);
  const std::string p = path.empty() ? key : path + "." + key;
  if (it == j.end()) throw SchemaError(p, "missing required field");
  return *it;
}

std::string string_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw SchemaError(path.empty() ? key : path + "." + key, "expected a string");
  return v.get<std::string>();
}

double number(const json& v, const std::string& p) {
  if (!v.is_number()) throw SchemaError(p, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& p) {
  if (!v.is_number_integer()) throw SchemaError(p, "expected an integer");
  return v.get<std::int64_t>();
}

}  // namespace

AnnotationExport annotation_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  AnnotationExport a;
  a.sample_id = string_field(j, "sample_id", "");
  a.annotator_id = string_field(j, "annotator_id", "");
  if (a.sample_id.empty()) throw SchemaError("sample_id", "must be non-empty");
  if (a.annotator_id.empty()) throw SchemaError("annotator_id", "must be non-empty");
  const std::string decision = string_field(j, "decision", "");
  if (decision == "genuine") a.decision = Decision::Genuine;
  else if (decision == "fake") a.decision = Decision::Fake;
  else throw SchemaError("decision", "must be \"genuine\" or \"fake\"");
  if (auto it = j.find("text_description"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("text_description", "expected a string or null");
    a.text_description = it->get<std::string>();
  }
  const json& dims = field(j, "image_dims", "");
  const auto w = integer(field(dims, "width", "image_dims"), "image_dims.width");
  const auto h = integer(field(dims, "height", "image_dims"), "image_dims.height");
  if (w <= 0) throw SchemaError("image_dims.width", "must be positive");
  if (h <= 0) throw SchemaError("image_dims.height", "must be positive");
  a.width = static_cast<std::size_t>(w);
  a.height = static_cast<std::size_t>(h);

  const json& strokes = field(j, "strokes", "");
  if (!strokes.is_array()) throw SchemaError("strokes", "expected an array");
  for (std::size_t s = 0; s < strokes.size(); ++s) {
    const std::string sp = "strokes[" + std::to_string(s) + "]";
    const json& sj = strokes[s];
    if (!sj.is_object()) throw SchemaError(sp, "expected an object");
    Stroke st;
    st.brush_width = number(field(sj, "brush_width", sp), sp + ".brush_width");
    if (!(st.brush_width > 0.0)) throw SchemaError(sp + ".brush_width", "must be positive");
    st.t_start_ms = integer(field(sj, "t_start_ms", sp), sp + ".t_start_ms");
    st.t_end_ms = integer(field(sj, "t_end_ms", sp), sp + ".t_end_ms");
    if (st.t_start_ms > st.t_end_ms)
      throw SchemaError(sp + ".t_end_ms", "must not precede t_start_ms");
    const json& pts = field(sj, "points", sp);
    if (!pts.is_array()) throw SchemaError(sp + ".points", "expected an array");
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::string pp = sp + ".points[" + std::to_string(k) + "]";
      if (!pts[k].is_array() || pts[k].size() != 2) throw SchemaError(pp, "expected [x, y]");
      StrokePoint p{number(pts[k][0], pp + "[0]"), number(pts[k][1], pp + "[1]")};
      if (p.x < 0.0 || p.y < 0.0 || p.x >= static_cast<double>(a.width) ||
          p.y >= static_cast<double>(a.height))
        throw SchemaError(pp, "point lies outside image_dims");
      st.points.push_back(p);
    }
    if (st.points.empty()) throw SchemaError(sp + ".points", "stroke has no points");
    a.strokes.push_back(std::move(st));
  }
  return a;
}

AnnotationExport parse_annotation(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return annotation_from_json(j);
}

json annotation_to_json(const AnnotationExport& a) {
  json strokes = json::array();
  for (const auto& s : a.strokes) {
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back({p.x, p.y});
    strokes.push_back({{"points", pts},
                       {"brush_width", s.brush_width},
                       {"t_start_ms", s.t_start_ms},
                       {"t_end_ms", s.t_end_ms}});
  }
  json j = {{"sample_id", a.sample_id},
            {"annotator_id", a.annotator_id},
            {"decision", a.decision == Decision::Fake ? "fake" : "genuine"},
            {"text_description", a.text_description ? json(*a.text_description) : json(nullptr)},
            {"strokes", strokes},
            {"image_dims", {{"width", a.width}, {"height", a.height}}}};
  return j;
}

namespace {

double segment_distance(double px, double py, const StrokePoint& a, const StrokePoint& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(px - (a.x + t * dx), py - (a.y + t * dy));
}

void paint_segment(Grid& g, const StrokePoint& a, const StrokePoint& b, double radius) {
  const auto rlo = std::max(0L, static_cast<long>(std::floor(std::min(a.y, b.y) - radius)));
  const auto rhi = std::min(static_cast<long>(g.rows()) - 1,
                            static_cast<long>(std::ceil(std::max(a.y, b.y) + radius)));
  const auto clo = std::max(0L, static_cast<long>(std::floor(std::min(a.x, b.x) - radius)));
  const auto chi = std::min(static_cast<long>(g.cols()) - 1,
                            static_cast<long>(std::ceil(std::max(a.x, b.x) + radius)));
  for (long r = rlo; r <= rhi; ++r)
    for (long c = clo; c <= chi; ++c)
      if (segment_distance(static_cast<double>(c), static_cast<double>(r), a, b) <= radius)
        g(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 1.0;
}

}  // namespace

SaliencyMap rasterize_annotation(const AnnotationExport& a) {
  require(a.width > 0 && a.height > 0, ErrorCode::Dimension, "annotation image dims must be > 0");
  Grid g(a.height, a.width);
  for (const auto& s : a.strokes) {
    for (const auto& p : s.points)
      require(p.x >= 0.0 && p.y >= 0.0 && p.x < static_cast<double>(a.width) &&
                  p.y < static_cast<double>(a.height),
              ErrorCode::InvalidArgument, "stroke point outside image bounds");
    const double radius = s.brush_width / 2.0;
    if (s.points.size() == 1) paint_segment(g, s.points[0], s.points[0], radius);
    for (std::size_t k = 1; k < s.points.size(); ++k)
      paint_segment(g, s.points[k - 1], s.points[k], radius);
  }
  return SaliencyMap(std::move(g), Granularity::FOI, SaliencySource::Human);
}

IngestResult ingest_annotations(const std::vector<AnnotationExport>& exports,
                                const Manifest& manifest, const std::string& map_dir,
                                std::size_t min_annotators) {
  require(min_annotators >= 1, ErrorCode::InvalidArgument, "min_annotators must be >= 1");
  for (const auto& e : exports)
    require(manifest.find(e.sample_id) != nullptr, ErrorCode::NotFound,
            "annotation for unknown sample '" + e.sample_id + "'");

  // sample -> annotator -> export (later duplicates replace earlier ones)
  std::map<std::string, std::map<std::string, const AnnotationExport*>> grouped;
  for (const auto& e : exports) grouped[e.sample_id][e.annotator_id] = &e;

  IngestResult res{manifest, {}, {}};
  for (const auto& [sample, by_annotator] : grouped) {
    if (by_annotator.size() < min_annotators) {
      res.warnings.push_back("sample '" + sample + "' has " + std::to_string(by_annotator.size()) +
                             " annotator(s), fewer than the minimum " +
                             std::to_string(min_annotators) + "; skipped");
      continue;
    }
    std::vector<SaliencyMap> maps;
    for (const auto& [annotator, e] : by_annotator) maps.push_back(rasterize_annotation(*e));
    const SaliencyMap fused = fuse_annotations(maps);
    const std::string path =
        (std::filesystem::path(map_dir) / (sample + "__human.png")).string();
    save_saliency_png(fused, path);
    SampleRecord* rec = res.manifest.find(sample);
    rec->saliency_path = path;
    rec->saliency_source = SaliencySource::Human;
    res.manifest.saliency_granularity[sample] = Granularity::FOI;
    res.written_maps.push_back(path);
  }
  return res;
}

}  // namespace sgpad
