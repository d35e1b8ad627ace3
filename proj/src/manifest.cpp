#include "sgpad/manifest.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sgpad/image_io.hpp"

namespace sgpad {

std::string_view to_string(Label l) { return l == Label::Spoof ? "spoof" : "bonafide"; }

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unassigned: return "unassigned";
  }
  return "unassigned";
}

Label parse_label(std::string_view s) {
  if (s == "bonafide") return Label::Bonafide;
  if (s == "spoof") return Label::Spoof;
  fail(ErrorCode::Parse, "unknown label '" + std::string(s) + "'");
}

Split parse_split(std::string_view s) {
  if (s.empty() || s == "unassigned") return Split::Unassigned;
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  fail(ErrorCode::Parse, "unknown split '" + std::string(s) + "'");
}

const SampleRecord* Manifest::find(std::string_view id) const {
  for (const auto& r : records)
    if (r.sample_id == id) return &r;
  return nullptr;
}

SampleRecord* Manifest::find(std::string_view id) {
  for (auto& r : records)
    if (r.sample_id == id) return &r;
  return nullptr;
}

void Manifest::validate() const {
  std::set<std::string> seen;
  for (const auto& r : records) {
    require(!r.sample_id.empty(), ErrorCode::InvalidArgument, "empty sample_id");
    require(seen.insert(r.sample_id).second, ErrorCode::InvalidArgument,
            "duplicate sample_id '" + r.sample_id + "'");
    require((r.label == Label::Spoof) == r.attack_type.has_value(), ErrorCode::InvalidArgument,
            "sample '" + r.sample_id + "': attack_type must be present exactly for spoofs");
    require(!r.saliency_path || r.saliency_source, ErrorCode::InvalidArgument,
            "sample '" + r.sample_id + "': saliency_path without saliency_source");
  }
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"': quoted = true; any = true; break;
      case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default: field += ch; any = true;
    }
  }
  require(!quoted, ErrorCode::Parse, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string manifest_to_csv(const Manifest& m) {
  std::ostringstream os;
  os << kManifestHeader << '\n';
  for (const auto& r : m.records) {
    os << csv_escape(r.sample_id) << ',' << csv_escape(r.image_path) << ',' << to_string(r.label)
       << ',' << csv_escape(r.attack_type.value_or("")) << ',' << csv_escape(r.sensor) << ','
       << csv_escape(r.source_dataset) << ',' << csv_escape(r.saliency_path.value_or("")) << ','
       << (r.saliency_source ? to_string(*r.saliency_source) : "") << ',' << to_string(r.split)
       << '\n';
  }
  return os.str();
}

Manifest manifest_from_csv(const std::string& text) {
  auto rows = parse_csv(text);
  require(!rows.empty(), ErrorCode::Parse, "manifest is empty (missing header)");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (!header.empty() && header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
  require(header == kManifestHeader, ErrorCode::Parse, "unexpected manifest header: " + header);
  Manifest m;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    require(f.size() == 9, ErrorCode::Parse,
            "manifest line " + std::to_string(i + 1) + " has " + std::to_string(f.size()) +
                " fields, expected 9");
    SampleRecord r;
    r.sample_id = f[0];
    r.image_path = f[1];
    r.label = parse_label(f[2]);
    if (!f[3].empty()) r.attack_type = f[3];
    r.sensor = f[4];
    r.source_dataset = f[5];
    if (!f[6].empty()) r.saliency_path = f[6];
    if (!f[7].empty()) r.saliency_source = parse_saliency_source(f[7]);
    r.split = parse_split(f[8]);
    m.records.push_back(std::move(r));
  }
  m.validate();
  return m;
}

namespace {

std::string sidecar_path(const std::string& csv) { return csv + ".meta.json"; }

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path fp(p);
  return fp.is_absolute() ? p : (base / fp).lexically_normal().string();
}

}  // namespace

Manifest load_manifest(const std::string& path, bool check_files) {
  namespace fs = std::filesystem;
  Manifest m = manifest_from_csv(read_file(path));
  const fs::path base = fs::path(path).parent_path();
  for (auto& r : m.records) {
    r.image_path = resolve(base, r.image_path);
    if (r.saliency_path) r.saliency_path = resolve(base, *r.saliency_path);
    if (check_files) {
      require(fs::exists(r.image_path), ErrorCode::NotFound,
              "sample '" + r.sample_id + "': image not found: " + r.image_path);
      if (r.saliency_path)
        require(fs::exists(*r.saliency_path), ErrorCode::NotFound,
                "sample '" + r.sample_id + "': saliency not found: " + *r.saliency_path);
    }
  }
  if (fs::exists(sidecar_path(path))) {
    try {
      const auto j = nlohmann::json::parse(read_file(sidecar_path(path)));
      m.schema_version = j.value("schema_version", Manifest::kSchemaVersion);
      if (j.contains("saliency_granularity"))
        for (const auto& [id, g] : j["saliency_granularity"].items())
          m.saliency_granularity[id] = parse_granularity(g.get<std::string>());
      if (j.contains("quality_max_level")) m.quality_max_level = j["quality_max_level"].get<int>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Parse, std::string("bad manifest sidecar: ") + e.what());
    }
  }
  require(m.schema_version == Manifest::kSchemaVersion, ErrorCode::Parse,
          "unsupported manifest schema version " + std::to_string(m.schema_version));
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  m.validate();
  write_file_atomic(path, manifest_to_csv(m));
  nlohmann::json j;
  j["schema_version"] = m.schema_version;
  j["saliency_granularity"] = nlohmann::json::object();
  for (const auto& [id, g] : m.saliency_granularity)
    j["saliency_granularity"][id] = std::string(to_string(g));
  if (m.quality_max_level) j["quality_max_level"] = *m.quality_max_level;
  write_file_atomic(sidecar_path(path), j.dump(2) + "\n");
}

}  // namespace sgpad
