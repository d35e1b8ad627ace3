#include <filesystem>
#include <map>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "sgpad/annotation.hpp"
#include "sgpad/assignment.hpp"
#include "sgpad/image_io.hpp"
#include "sgpad/pipeline.hpp"
#include "sgpad/server.hpp"
#include "sgpad/synthetic.hpp"
#include "test_util.hpp"

using namespace sgpad;
using nlohmann::json;

namespace {

Manifest pool(std::size_t per_type, std::size_t bonafide) {
  Manifest m;
  auto add = [&](Label l, std::optional<std::string> t, std::size_t i) {
    SampleRecord r;
    r.sample_id = (t ? *t : std::string("bona")) + "-" + std::to_string(i);
    r.label = l;
    r.attack_type = t;
    r.sensor = "s";
    r.source_dataset = "d";
    r.image_path = r.sample_id + ".png";
    m.records.push_back(r);
  };
  for (std::size_t i = 0; i < bonafide; ++i) add(Label::Bonafide, std::nullopt, i);
  for (const auto& t : kDefaultAttackTypes)
    for (std::size_t i = 0; i < per_type; ++i) add(Label::Spoof, t, i);
  return m;
}

std::vector<std::string> annotators(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("ann" + std::to_string(i));
  return v;
}

void check_composition(const Manifest& m, const AssignmentPlan& p) {
  for (const auto& [a, ids] : p.by_annotator) {
    CHECK(ids.size() == 32);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
    std::map<std::string, std::size_t> sub;
    for (const auto& id : ids) {
      const auto* r = m.find(id);
      sub[r->label == Label::Bonafide ? "bonafide" : *r->attack_type]++;
    }
    CHECK(sub["bonafide"] == 16);
    for (const auto& t : kDefaultAttackTypes) CHECK(sub[t] == 2);
  }
}

}  // namespace

TEST_CASE("assignment quotas and coverage") {
  const Manifest full = pool(50, 400);
  const auto plan = build_assignment(full, annotators(50));
  check_composition(full, plan);
  const auto counts = plan.sample_counts();
  CHECK(counts.size() == 800);
  for (const auto& [id, c] : counts) CHECK(c == 2);

  const auto solo = build_assignment(full, annotators(1));
  CHECK(solo.by_annotator.at("ann0").size() == 32);
  for (const auto& [id, c] : solo.sample_counts()) CHECK(c == 1);

  const Manifest small = pool(2, 16);
  const auto pair = build_assignment(small, annotators(2));
  check_composition(small, pair);
  CHECK(pair.sample_counts().size() == 32);
  for (const auto& [id, c] : pair.sample_counts()) CHECK(c == 2);

  // coverage never exceeds the target, and lower counts are filled first
  const auto partial = build_assignment(full, annotators(7), {.seed = 3});
  std::size_t lo = 9, hi = 0;
  for (const auto& r : full.records)
    if (r.label == Label::Bonafide) {
      const auto c = partial.sample_counts().count(r.sample_id) ? partial.sample_counts().at(r.sample_id) : 0;
      lo = std::min(lo, c), hi = std::max(hi, c);
    }
  CHECK(hi - lo <= 1);

  CHECK(build_assignment(full, annotators(5), {.seed = 4}).by_annotator ==
        build_assignment(full, annotators(5), {.seed = 4}).by_annotator);
  const auto back = assignment_from_json(to_json(plan));
  CHECK(back.by_annotator == plan.by_annotator);
}

TEST_CASE("assignment rejects short subclasses") {
  Manifest m = pool(2, 16);
  std::erase_if(m.records, [](const SampleRecord& r) { return r.attack_type == "woodglue"; });
  try {
    build_assignment(m, annotators(1));
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("woodglue") != std::string::npos);
  }
  CHECK_THROWS_AS(build_assignment(pool(2, 16), annotators(3)), Error);
  CHECK_THROWS_AS(build_assignment(pool(2, 16), {"a", "a"}), Error);
}

TEST_CASE("annotation service routes") {
  testutil::TempDir dir;
  SyntheticSpec spec;
  spec.samples = 32;
  spec.size = 32;
  spec.patch_top = 8;
  spec.patch_size = 16;
  const Manifest m = generate_synthetic_corpus(spec, dir.file("corpus"));
  const auto plan = build_assignment(m, {"alice", "bob"});
  auto svc = std::make_shared<AnnotationService>(m, plan, dir.file("store"));
  AnnotationServer server(svc);
  const int port = server.start();
  httplib::Client cli("127.0.0.1", port);

  auto res = cli.Get("/assignment/alice");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto body = json::parse(res->body);
  REQUIRE(body["samples"].size() == 32);
  for (const auto& s : body["samples"]) {
    CHECK(!s.contains("label"));
    CHECK(!s.contains("attack_type"));
  }
  CHECK(res->body.find("spoof") == std::string::npos);
  CHECK(res->body.find("bonafide") == std::string::npos);
  CHECK(cli.Get("/assignment/mallory")->status == 404);

  const std::string sid = body["samples"][0]["sample_id"];
  res = cli.Get("/image/" + sid);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "image/png");
  CHECK(res->body == read_file(m.find(sid)->image_path));
  CHECK(cli.Get("/image/unknown")->status == 404);

  AnnotationExport a;
  a.sample_id = sid;
  a.annotator_id = "alice";
  a.decision = Decision::Fake;
  a.width = a.height = 32;
  a.strokes.push_back({{{3, 3}, {10, 12}}, 3.0, 5, 90});
  const std::string doc = annotation_to_json(a).dump();
  res = cli.Post("/annotation", doc, "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(read_file(svc->export_path(sid, "alice")) == doc);
  CHECK(!std::filesystem::exists(svc->audit_log_path()));

  a.text_description = "second thoughts";
  const std::string doc2 = annotation_to_json(a).dump();
  res = cli.Post("/annotation", doc2, "application/json");
  CHECK(res->status == 200);
  CHECK(read_file(svc->export_path(sid, "alice")) == doc2);
  const std::string log = read_file(svc->audit_log_path());
  CHECK(log.find(sid) != std::string::npos);
  CHECK(std::count(log.begin(), log.end(), '\n') == 1);

  json missing = annotation_to_json(a);
  missing.erase("decision");
  res = cli.Post("/annotation", missing.dump(), "application/json");
  CHECK(res->status == 400);
  CHECK(json::parse(res->body)["field"] == "decision");

  std::string unassigned;
  for (const auto& r : m.records)
    if (!plan.assigned("alice", r.sample_id)) unassigned = r.sample_id;
  if (!unassigned.empty()) {
    a.sample_id = unassigned;
    CHECK(cli.Post("/annotation", annotation_to_json(a).dump(), "application/json")->status == 403);
  }
  a.sample_id = sid;
  a.annotator_id = "bob";
  const bool bob_has = plan.assigned("bob", sid);
  CHECK(cli.Post("/annotation", annotation_to_json(a).dump(), "application/json")->status == (bob_has ? 201 : 403));

  CHECK(json::parse(cli.Get("/assignment/alice")->body)["samples"][0]["submitted"] == true);
  server.stop();

  // every stored export is accepted by ingestion
  std::vector<AnnotationExport> stored;
  for (const auto& e : std::filesystem::directory_iterator(dir.file("store/annotations")))
    if (e.path().extension() == ".json") stored.push_back(parse_annotation(read_file(e.path().string())));
  CHECK(!stored.empty());
  ingest_annotations(stored, m, dir.file("maps"), 1);
}

TEST_CASE("concurrent submissions stay atomic") {
  testutil::TempDir dir;
  const Manifest m = pool(2, 16);
  const auto plan = build_assignment(m, {"a1", "a2"});
  AnnotationService svc(m, plan, dir.file("store"));
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&, t] {
      for (int k = 0; k < 10; ++k) {
        AnnotationExport a;
        a.sample_id = plan.by_annotator.at("a1")[0];
        a.annotator_id = "a1";
        a.width = a.height = 8;
        a.text_description = std::to_string(t * 100 + k);
        svc.submit(annotation_to_json(a).dump());
      }
    });
  for (auto& th : threads) th.join();
  const auto a = parse_annotation(read_file(svc.export_path(plan.by_annotator.at("a1")[0], "a1")));
  CHECK(a.text_description.has_value());
  const std::string log = read_file(svc.audit_log_path());
  CHECK(std::count(log.begin(), log.end(), '\n') == 39);
}
