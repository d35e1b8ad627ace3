#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgpad/saliency.hpp"

namespace sgpad {

enum class Label { Bonafide = 0, Spoof = 1 };
enum class Split { Unassigned, Train, Val, Test };

std::string_view to_string(Label l);
std::string_view to_string(Split s);
Label parse_label(std::string_view s);
Split parse_split(std::string_view s);

struct SampleRecord {
  std::string sample_id;
  std::string image_path;
  Label label = Label::Bonafide;
  std::optional<std::string> attack_type;  // present iff spoof
  std::string sensor;
  std::string source_dataset;
  std::optional<std::string> saliency_path;
  std::optional<SaliencySource> saliency_source;
  Split split = Split::Unassigned;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct Manifest {
  static constexpr int kSchemaVersion = 1;

  std::vector<SampleRecord> records;
  int schema_version = kSchemaVersion;
  // Sidecar metadata, persisted next to the CSV as `<csv>.meta.json`.
  std::map<std::string, Granularity> saliency_granularity;  // default FOI
  std::optional<int> quality_max_level;

  const SampleRecord* find(std::string_view sample_id) const;
  SampleRecord* find(std::string_view sample_id);
  void validate() const;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline constexpr std::string_view kManifestHeader =
    "sample_id,image_path,label,attack_type,sensor,source_dataset,saliency_path,"
    "saliency_source,split";

std::string manifest_to_csv(const Manifest& m);
Manifest manifest_from_csv(const std::string& text);

// Relative image/saliency paths in the file are resolved against the CSV's
// directory. With check_files, every referenced file must exist.
Manifest load_manifest(const std::string& path, bool check_files = true);
// Atomic write (temp file + rename) of the CSV and its sidecar.
void save_manifest(const Manifest& m, const std::string& path);

// Minimal RFC-4180 field splitting shared by the CSV readers.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

}  // namespace sgpad
