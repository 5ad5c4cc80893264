#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include "crisis/corpus/ops.hpp"
#include "crisis/service/service.hpp"
#include "generators.hpp"
#include "service_fixture.hpp"
#include "temp_dir.hpp"

using namespace crisis;
using namespace crisis::service;
namespace ct = crisis::testing;
namespace fs = std::filesystem;
using corpus::ReviewStatus;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() : dir_("crisis_service"), cfg_(ct::service_config(dir_.path() / "store")) {}

  CorpusService& svc() {
    if (!svc_) svc_ = std::make_unique<CorpusService>(cfg_);
    return *svc_;
  }
  void restart() {
    svc_.reset();
    svc();
  }
  Principal contributor() { return svc().authenticate("tok-contrib"); }
  Principal reviewer() { return svc().authenticate("tok-review"); }
  Principal coordinator() { return svc().authenticate("tok-coord"); }

  std::string submit(std::string src, std::string tgt, std::string_view pair = "en-ga") {
    return svc().submit_segment(contributor(), pair, SubmitRequest{std::move(src), std::move(tgt)});
  }

  int status_of(auto&& fn) {
    try {
      fn();
    } catch (const ApiError& e) {
      return e.status();
    }
    return 200;
  }

  ct::ScopedTempDir dir_;
  ServiceConfig cfg_;
  std::unique_ptr<CorpusService> svc_;
};

}  // namespace

TEST_F(ServiceTest, Authentication) {
  EXPECT_EQ(contributor().name, "alice");
  EXPECT_EQ(coordinator().role, Role::coordinator);
  EXPECT_EQ(status_of([&] { svc().authenticate("nope"); }), 401);
  EXPECT_EQ(status_of([&] { svc().authenticate(""); }), 401);
}

TEST_F(ServiceTest, SubmitStoresPendingWithCurrentPhase) {
  const auto id = submit("Wash your hands", "Nigh do lámha");
  const auto entry = svc().get_segment(id);
  EXPECT_EQ(entry.segment.status, ReviewStatus::pending);
  EXPECT_EQ(entry.segment.phase.ordinal(), 1);
  EXPECT_EQ(entry.segment.contributor, "alice");
  EXPECT_EQ(svc().stats("en-ga").counts.count(ReviewStatus::pending), 1u);
  svc().advance_phase(coordinator(), "en-ga");
  const auto id2 = submit("Stay home", "Fan sa bhaile");
  EXPECT_EQ(svc().get_segment(id2).segment.phase.ordinal(), 2);
}

TEST_F(ServiceTest, SubmitNormalizesText) {
  const auto id = submit("  Wash   your\thands ", "Nigh do lámha");
  EXPECT_EQ(svc().get_segment(id).segment.source_text, "Wash your hands");
}

TEST_F(ServiceTest, SubmitRejectsEmptyTextAndUnknownPair) {
  EXPECT_EQ(status_of([&] { submit("Wash your hands", " \t\n "); }), 422);
  EXPECT_EQ(status_of([&] { submit("", "x"); }), 422);
  EXPECT_EQ(status_of([&] { submit("a", "b", "en-xx"); }), 422);
  EXPECT_EQ(status_of([&] { submit("a", "b", "english"); }), 422);
  EXPECT_EQ(status_of([&] { submit("a\xff", "b"); }), 422);
  EXPECT_EQ(svc().snapshot().last_seq(), 0u);
}

TEST_F(ServiceTest, DuplicateOfAcceptedConflictsWithOriginalId) {
  const auto id = submit("Wash your hands", "Nigh do lámha");
  svc().review_segment(reviewer(), id, "accepted", "");
  try {
    submit("wash  YOUR hands", "nigh do LÁMHA");
    FAIL();
  } catch (const ApiError& e) {
    EXPECT_EQ(e.status(), 409);
    EXPECT_EQ(e.details()["existing_id"], id);
  }
}

TEST_F(ServiceTest, DuplicateAcrossPairsIsAllowedAndRejectedFreesKey) {
  const auto id = submit("a b", "c d");
  EXPECT_NO_THROW(submit("a b", "c d", "ga-en"));
  svc().review_segment(reviewer(), id, "rejected", "typo");
  EXPECT_NO_THROW(submit("a b", "c d"));
}

TEST_F(ServiceTest, ReviewTransitions) {
  const auto id = submit("a", "b");
  auto entry = svc().review_segment(reviewer(), id, "accepted", "");
  EXPECT_EQ(entry.segment.status, ReviewStatus::accepted);
  const auto s = svc().stats("en-ga");
  EXPECT_EQ(s.counts.count(ReviewStatus::accepted), 1u);
  EXPECT_EQ(s.counts.count(ReviewStatus::pending), 0u);
  EXPECT_EQ(status_of([&] { svc().review_segment(reviewer(), id, "rejected", ""); }), 409);
  EXPECT_EQ(status_of([&] { svc().review_segment(reviewer(), "seg-999", "accepted", ""); }), 404);
  EXPECT_EQ(status_of([&] { svc().review_segment(contributor(), id, "accepted", ""); }), 403);
  const auto id2 = submit("c", "d");
  EXPECT_EQ(status_of([&] { svc().review_segment(reviewer(), id2, "pending", ""); }), 422);
  EXPECT_EQ(status_of([&] { svc().review_segment(reviewer(), id2, "maybe", ""); }), 422);
  EXPECT_EQ(status_of([&] { svc().review_segment(coordinator(), id2, "accepted", ""); }), 200);
}

TEST_F(ServiceTest, RejectNoteIsRetrievable) {
  const auto id = submit("a", "b");
  svc().review_segment(reviewer(), id, "rejected", "wrong register");
  const auto entry = svc().get_segment(id);
  EXPECT_EQ(entry.segment.status, ReviewStatus::rejected);
  EXPECT_EQ(entry.note, "wrong register");
  EXPECT_EQ(entry.reviewer, "bob");
  EXPECT_TRUE(entry.reviewed_at);
}

TEST_F(ServiceTest, PhaseAdvance) {
  EXPECT_EQ(svc().advance_phase(coordinator(), "en-ga").ordinal(), 2);
  EXPECT_EQ(svc().advance_phase(coordinator(), "en-ga").ordinal(), 3);
  EXPECT_EQ(status_of([&] { svc().advance_phase(coordinator(), "en-ga"); }), 409);
  EXPECT_EQ(status_of([&] { svc().advance_phase(contributor(), "ga-en"); }), 403);
  EXPECT_EQ(status_of([&] { svc().advance_phase(reviewer(), "ga-en"); }), 403);
  EXPECT_EQ(status_of([&] { svc().advance_phase(coordinator(), "xx-yy"); }), 404);
  EXPECT_EQ(svc().stats("ga-en").phase.ordinal(), 1);
}

TEST_F(ServiceTest, StatsFreshAndAfterActivity) {
  const auto fresh = svc().stats("en-mr");
  EXPECT_EQ(fresh.counts, corpus::CorpusStats{});
  EXPECT_EQ(fresh.contributors, 0u);
  EXPECT_FALSE(fresh.last_submission_at);
  EXPECT_EQ(status_of([&] { svc().stats("fr-de"); }), 404);

  const auto a = submit("a", "1");
  submit("b", "2");
  svc().submit_segment(svc().authenticate("tok-contrib2"), "en-ga", SubmitRequest{"c", "3", corpus::Stream::expert});
  svc().review_segment(reviewer(), a, "accepted", "");
  const auto s = svc().stats("en-ga");
  EXPECT_EQ(s.counts.count(ReviewStatus::pending), 2u);
  EXPECT_EQ(s.counts.count(ReviewStatus::accepted), 1u);
  EXPECT_EQ(s.counts.count(corpus::Stream::expert), 1u);
  EXPECT_EQ(s.contributors, 2u);
  EXPECT_TRUE(s.last_submission_at);
  const auto j = s.to_json();
  EXPECT_EQ(j["by_status"]["pending"], 2);
  EXPECT_EQ(j["phase"]["label"], "custom_gpt");
}

TEST_F(ServiceTest, ListSegmentsByStatus) {
  const auto a = submit("a", "1");
  submit("b", "2");
  svc().review_segment(reviewer(), a, "accepted", "");
  EXPECT_EQ(svc().list_segments("en-ga", std::nullopt).size(), 2u);
  const auto accepted = svc().list_segments("en-ga", ReviewStatus::accepted);
  ASSERT_EQ(accepted.size(), 1u);
  EXPECT_EQ(accepted[0].id, a);
}

TEST_F(ServiceTest, ExportSplitsTenAcceptedEightOneOne) {
  for (int i = 0; i < 10; ++i) {
    svc().review_segment(reviewer(), submit("source " + std::to_string(i), "sprioc " + std::to_string(i)), "accepted", "");
  }
  ExportOptions opts;
  opts.ratios = corpus::SplitRatios{0.8, 0.1, 0.1};
  opts.seed = 42;
  opts.format = corpus::ExportFormat::bitext;
  const auto x = svc().create_export(coordinator(), "en-ga", opts);
  std::map<std::string, std::size_t> lines;
  for (const auto& f : x.receipt["files"]) lines[f["file"]] = f["lines"];
  EXPECT_EQ(lines["en-ga.train.en"], 8u);
  EXPECT_EQ(lines["en-ga.train.ga"], 8u);
  EXPECT_EQ(lines["en-ga.validation.en"], 1u);
  EXPECT_EQ(lines["en-ga.test.ga"], 1u);
  EXPECT_TRUE(lines.contains("manifest.json"));
  ASSERT_TRUE(x.receipt.contains("manifest_fingerprint"));

  const auto y = svc().create_export(coordinator(), "en-ga", opts);
  EXPECT_NE(x.receipt_id, y.receipt_id);
  EXPECT_EQ(x.receipt["manifest_fingerprint"], y.receipt["manifest_fingerprint"]);
  opts.seed = 43;
  const auto z = svc().create_export(coordinator(), "en-ga", opts);
  EXPECT_NE(x.receipt["manifest_fingerprint"], z.receipt["manifest_fingerprint"]);
}

TEST_F(ServiceTest, ExportDedupOverImportedDuplicates) {
  corpus::Corpus imported{corpus::LanguagePair("en", "ga"), {}};
  for (std::size_t i = 0; i < 10; ++i) {
    auto seg = ct::synthetic_segment(imported.pair, i < 8 ? i : i - 8, "imp");
    seg.id = "imp-" + std::to_string(i);
    imported.segments.push_back(seg);
  }
  EXPECT_EQ(svc().import_segments(imported), 10u);
  EXPECT_EQ(svc().stats("en-ga").counts.count(ReviewStatus::accepted), 10u);
  ExportOptions opts;
  opts.dedup = true;
  const auto x = svc().create_export(coordinator(), "en-ga", opts);
  EXPECT_EQ(x.receipt["segment_count"], 8);
  opts.dedup = false;
  EXPECT_EQ(svc().create_export(coordinator(), "en-ga", opts).receipt["segment_count"], 10);
  opts.ratios = corpus::SplitRatios{};
  EXPECT_EQ(status_of([&] { svc().create_export(coordinator(), "en-ga", opts); }), 422);
  EXPECT_THROW(svc().import_segments(imported), ValidationError);
}

TEST_F(ServiceTest, ExportErrors) {
  EXPECT_EQ(status_of([&] { svc().create_export(coordinator(), "en-ga", {}); }), 422);
  submit("a", "b");
  EXPECT_EQ(status_of([&] { svc().create_export(reviewer(), "en-ga", {}); }), 403);
  EXPECT_EQ(status_of([&] { svc().create_export(coordinator(), "en-ga", {}); }), 422);
  EXPECT_THROW(ExportOptions::from_json(nlohmann::ordered_json{{"ratios", "0.5,0.5,0.5"}}), ValidationError);
  EXPECT_THROW(ExportOptions::from_json(nlohmann::ordered_json{{"format", "xml"}}), ValidationError);
}

TEST_F(ServiceTest, ExportArtifactsAreImmutable) {
  for (int i = 0; i < 5; ++i) svc().review_segment(reviewer(), submit("s" + std::to_string(i), "t"), "accepted", "");
  const auto x = svc().create_export(coordinator(), "en-ga", {});
  const auto first = svc().export_file(x.receipt_id, "en-ga.jsonl");
  svc().review_segment(reviewer(), submit("later", "níos déanaí"), "accepted", "");
  EXPECT_EQ(svc().export_file(x.receipt_id, "en-ga.jsonl"), first);
  restart();
  EXPECT_EQ(svc().export_file(x.receipt_id, "en-ga.jsonl"), first);
  EXPECT_EQ(status_of([&] { svc().export_file(x.receipt_id, "nope.txt"); }), 404);
  EXPECT_EQ(status_of([&] { svc().get_export("exp-0"); }), 404);
  std::ofstream(cfg_.store_path / "exports" / x.receipt_id / "en-ga.jsonl", std::ios::app) << "tamper\n";
  EXPECT_EQ(status_of([&] { svc().export_file(x.receipt_id, "en-ga.jsonl"); }), 500);
}

TEST_F(ServiceTest, RandomizedOperationsMatchReplayAtEveryStep) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> pairs{"en-ga", "ga-en", "en-mr"};
  const std::vector<std::string> tokens{"tok-contrib", "tok-contrib2", "tok-review", "tok-coord"};
  const auto& vocab = ct::crisis_vocab();
  std::vector<std::string> ids;
  std::size_t applied = 0;
  for (int step = 0; step < 500; ++step) {
    const auto who = svc().authenticate(tokens[rng() % tokens.size()]);
    const auto& pair = pairs[rng() % pairs.size()];
    const int op = static_cast<int>(rng() % 10);
    try {
      if (op < 5) {
        ids.push_back(svc().submit_segment(
            who, pair, SubmitRequest{ct::random_sentence(rng, vocab, 1, 3), ct::random_sentence(rng, vocab, 1, 3),
                                     corpus::kAllStreams[rng() % 3]}));
      } else if (op < 8 && !ids.empty()) {
        svc().review_segment(who, ids[rng() % ids.size()], rng() % 3 ? "accepted" : "rejected", "n");
      } else if (op == 8) {
        svc().advance_phase(who, pair);
      } else {
        ExportOptions o;
        o.dedup = rng() % 2;
        if (rng() % 2) o.ratios = corpus::SplitRatios{};
        o.seed = rng() % 5;
        svc().create_export(who, pair, o);
      }
      ++applied;
    } catch (const ApiError& e) {
      ASSERT_TRUE(e.status() == 403 || e.status() == 404 || e.status() == 409 || e.status() == 422) << e.what();
    }
    const auto current = svc().snapshot();
    const auto log = svc().read_log();
    ASSERT_EQ(log.size(), current.last_seq());
    ASSERT_EQ(replay(cfg_.pairs, log), current) << "step " << step;
  }
  EXPECT_GT(applied, 200u);
  const auto before = svc().snapshot();
  std::map<std::string, PairStats> stats;
  for (const auto& p : pairs) stats[p] = svc().stats(p);
  restart();
  EXPECT_EQ(svc().snapshot(), before);
  EXPECT_GT(svc().recovery().snapshot_seq, 0u);
  for (const auto& p : pairs) EXPECT_EQ(svc().stats(p), stats[p]);
}

TEST_F(ServiceTest, RestartAfterHundredEventsKeepsStats) {
  cfg_.snapshot_interval = 0;
  for (int i = 0; i < 100; ++i) {
    const auto id = submit("source " + std::to_string(i), "sprioc " + std::to_string(i));
    (void)id;
  }
  const auto before = svc().stats("en-ga");
  restart();
  EXPECT_EQ(svc().stats("en-ga"), before);
  EXPECT_EQ(svc().recovery().events_replayed, 100u);
  EXPECT_EQ(svc().recovery().snapshot_seq, 0u);
}

TEST_F(ServiceTest, SnapshotAndFullReplayAgree) {
  for (int i = 0; i < 60; ++i) submit("s" + std::to_string(i), "t");
  const auto with_snapshot = svc().snapshot();
  svc_.reset();
  RecoveryInfo info;
  const auto via_snapshot = recover(cfg_.store_path, cfg_.pairs, &info);
  EXPECT_EQ(info.snapshot_seq, 50u);
  EXPECT_EQ(info.events_replayed, 10u);
  fs::remove(cfg_.store_path / "snapshot.json");
  EXPECT_EQ(recover(cfg_.store_path, cfg_.pairs), via_snapshot);
  EXPECT_EQ(via_snapshot, with_snapshot);
}

TEST_F(ServiceTest, CorruptSnapshotFallsBackToLog) {
  for (int i = 0; i < 30; ++i) submit("s" + std::to_string(i), "t");
  const auto before = svc().snapshot();
  svc_.reset();
  std::ofstream(cfg_.store_path / "snapshot.json") << "{not json";
  EXPECT_EQ(svc().snapshot(), before);
  EXPECT_FALSE(svc().recovery().snapshot_warning.empty());
}

TEST_F(ServiceTest, SecondServiceOnSameStoreIsRefused) {
  svc();
  try {
    CorpusService other(cfg_);
    FAIL() << "second service opened a locked store";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  restart();
  EXPECT_EQ(svc().snapshot().last_seq(), 0u);
}

TEST_F(ServiceTest, EmptyLogIsHealthy) {
  EXPECT_EQ(svc().snapshot().last_seq(), 0u);
  restart();
  EXPECT_EQ(svc().stats("en-ga").counts.total, 0u);
}

TEST_F(ServiceTest, TruncatedFinalLineRefusesStartup) {
  for (int i = 0; i < 5; ++i) submit("s" + std::to_string(i), "t");
  svc_.reset();
  const auto log = cfg_.store_path / "events.jsonl";
  auto content = corpus::read_file(log);
  content.resize(content.size() - 20);
  corpus::write_file(log, content);
  try {
    CorpusService again(cfg_);
    FAIL();
  } catch (const RecoveryError& e) {
    EXPECT_EQ(e.last_valid_seq(), 4u);
    EXPECT_EQ(e.first_bad_seq(), 5u);
    EXPECT_NE(std::string(e.what()).find("last valid sequence 4"), std::string::npos);
  }
}

TEST_F(ServiceTest, SequenceGapRefusesStartup) {
  for (int i = 0; i < 5; ++i) submit("s" + std::to_string(i), "t");
  svc_.reset();
  const auto log = cfg_.store_path / "events.jsonl";
  auto content = corpus::read_file(log);
  const auto second = content.find('\n') + 1;
  const auto third = content.find('\n', second) + 1;
  content.erase(second, third - second);
  corpus::write_file(log, content);
  try {
    CorpusService again(cfg_);
    FAIL();
  } catch (const RecoveryError& e) {
    EXPECT_EQ(e.first_bad_seq(), 2u);
    EXPECT_EQ(e.last_valid_seq(), 1u);
  }
}

TEST_F(ServiceTest, InconsistentEventRefusesStartup) {
  const auto id = submit("a", "b");
  svc().review_segment(reviewer(), id, "accepted", "");
  svc_.reset();
  const auto log = cfg_.store_path / "events.jsonl";
  auto content = corpus::read_file(log);
  const auto last = content.substr(content.find('\n') + 1);
  std::string dup = last;
  dup.replace(dup.find("\"seq\":2"), 7, "\"seq\":3");
  corpus::write_file(log, content + dup);
  try {
    CorpusService again(cfg_);
    FAIL();
  } catch (const RecoveryError& e) {
    EXPECT_EQ(e.first_bad_seq(), 3u);
  }
}

TEST_F(ServiceTest, ConcurrentDuplicateSubmissionsYieldOneSuccess) {
  for (int round = 0; round < 5; ++round) {
    std::atomic<int> created{0};
    std::atomic<int> conflicts{0};
    std::vector<std::string> winners(16);
    std::vector<std::thread> threads;
    const std::string src = "same source " + std::to_string(round);
    for (int t = 0; t < 16; ++t) {
      threads.emplace_back([&, t] {
        try {
          winners[t] = submit(src, "same target");
          ++created;
        } catch (const ApiError& e) {
          if (e.status() == 409) ++conflicts;
        }
      });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(created.load(), 1);
    EXPECT_EQ(conflicts.load(), 15);
  }
  EXPECT_EQ(svc().stats("en-ga").counts.total, 5u);
}

TEST_F(ServiceTest, LeaderboardFromBaselines) {
  const auto lb = svc().leaderboard("en-ga", "adaptNMT");
  EXPECT_EQ(lb.rows.front().record.system_name, "adaptMLLM");
  EXPECT_NEAR(lb.rows.front().delta, 5.2, 1e-9);
  const auto defaulted = svc().leaderboard("en-ga", std::nullopt);
  EXPECT_EQ(defaulted.reference_system, "GPT-3.5 baseline");
  EXPECT_EQ(status_of([&] { svc().leaderboard("fr-de", std::nullopt); }), 404);
  EXPECT_EQ(status_of([&] { svc().leaderboard("en-ga", std::string("nobody")); }), 422);
}
