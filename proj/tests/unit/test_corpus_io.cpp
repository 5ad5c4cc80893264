#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "crisis/common/error.hpp"
#include "crisis/common/hash.hpp"
#include "crisis/corpus/io.hpp"
#include "generators.hpp"

using namespace crisis;
using namespace crisis::corpus;
namespace fs = std::filesystem;

namespace {

const LanguagePair kEnGa("en", "ga");

class CorpusIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crisis_io_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const fs::path& p, const std::string& content) {
    std::ofstream(p, std::ios::binary) << content;
  }

  Corpus corpus_of(std::size_t n) {
    Corpus c{kEnGa, {}};
    for (std::size_t i = 0; i < n; ++i) c.segments.push_back(crisis::testing::synthetic_segment(kEnGa, i));
    return c;
  }

  IngestOptions options() const {
    IngestOptions o;
    o.pair = kEnGa;
    return o;
  }

  fs::path dir_;
};

std::vector<std::pair<std::string, std::string>> text_multiset(const Corpus& c) {
  std::vector<std::pair<std::string, std::string>> v;
  for (const auto& s : c.segments) v.emplace_back(s.source_text, s.target_text);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_F(CorpusIoTest, BitextWritesTwoAlignedFiles) {
  const ExportReceipt r = export_parallel(corpus_of(3), ExportFormat::bitext, {dir_, "corpus"});
  EXPECT_EQ(r.segment_count, 3u);
  ASSERT_EQ(r.files.size(), 2u);
  EXPECT_EQ(r.files[0].file_name, "corpus.en");
  EXPECT_EQ(r.files[1].file_name, "corpus.ga");
  EXPECT_EQ(r.files[0].lines, 3u);
  EXPECT_EQ(r.files[1].lines, 3u);
  EXPECT_EQ(r.files[0].sha256, hash::sha256_hex(read_file(dir_ / "corpus.en")));
}

TEST_F(CorpusIoTest, EmptyCorpusGivesEmptyFiles) {
  const ExportReceipt r = export_parallel(Corpus{kEnGa, {}}, ExportFormat::bitext, {dir_, "empty"});
  EXPECT_EQ(r.segment_count, 0u);
  EXPECT_TRUE(read_file(dir_ / "empty.en").empty());
  EXPECT_TRUE(read_file(dir_ / "empty.ga").empty());
}

TEST_F(CorpusIoTest, TabInTsvFieldIsAnError) {
  Corpus c = corpus_of(2);
  c.segments[1].target_text = "a\tb";
  try {
    export_parallel(c, ExportFormat::tsv, {dir_, "bad"});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(c.segments[1].id), std::string::npos);
  }
  c.segments[1].target_text = "a\nb";
  EXPECT_THROW(export_parallel(c, ExportFormat::bitext, {dir_, "bad"}), ValidationError);
  EXPECT_NO_THROW(export_parallel(c, ExportFormat::jsonl, {dir_, "fine"}));
}

TEST_F(CorpusIoTest, JsonlSchemaFieldOrder) {
  Segment s = crisis::testing::synthetic_segment(kEnGa, 1);
  EXPECT_EQ(segment_to_json(s).dump(),
            R"({"id":"seg-1","src_lang":"en","tgt_lang":"ga","source":"source sentence number 1",)"
            R"("target":"abairt sprice uimhir 1","contributor":"contributor-1","stream":"expert",)"
            R"("phase":1,"status":"accepted","created_at":"2023-11-14T22:13:21.000Z"})");
}

TEST_F(CorpusIoTest, RoundTripAllFormats) {
  std::mt19937_64 rng(21);
  Corpus c{kEnGa, {}};
  for (std::size_t i = 0; i < 60; ++i) {
    Segment s = crisis::testing::synthetic_segment(kEnGa, i);
    s.source_text = crisis::testing::random_sentence(rng, crisis::testing::crisis_vocab(), 1, 9);
    s.target_text = crisis::testing::random_sentence(rng, crisis::testing::crisis_vocab(), 1, 9);
    c.segments.push_back(s);
  }
  for (ExportFormat f : {ExportFormat::jsonl, ExportFormat::tsv, ExportFormat::bitext}) {
    const std::string name = "rt_" + std::string(to_string(f));
    export_parallel(c, f, {dir_, name});
    const fs::path in = f == ExportFormat::jsonl ? dir_ / (name + ".jsonl")
                        : f == ExportFormat::tsv ? dir_ / (name + ".tsv")
                                                 : dir_ / name;
    const Corpus back = ingest_file(in, f, options());
    EXPECT_EQ(back.size(), c.size()) << to_string(f);
    EXPECT_EQ(text_multiset(back), text_multiset(c)) << to_string(f);
    if (f == ExportFormat::jsonl) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        Segment expected = c.segments[i];
        expected.source_line = i + 1;
        EXPECT_EQ(back.segments[i], expected);
      }
    }
  }
}

TEST_F(CorpusIoTest, BitextIngestPreservesLineNumbers) {
  write(dir_ / "train.en", "hello\nworld\n");
  write(dir_ / "train.ga", "dia dhuit\ndomhan\n");
  const Corpus c = ingest_file(dir_ / "train", ExportFormat::bitext, options());
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.segments[1].id, "train:2");
  EXPECT_EQ(c.segments[1].source_line, 2u);
  EXPECT_EQ(c.segments[1].status, ReviewStatus::pending);
}

TEST_F(CorpusIoTest, EmptyBitextGivesEmptyCorpus) {
  write(dir_ / "e.en", "");
  write(dir_ / "e.ga", "");
  EXPECT_TRUE(ingest_file(dir_ / "e", ExportFormat::bitext, options()).empty());
}

TEST_F(CorpusIoTest, MisalignedBitextReportsDetectionPoint) {
  std::string src, tgt;
  for (int i = 0; i < 501; ++i) src += "s" + std::to_string(i) + "\n";
  for (int i = 0; i < 500; ++i) tgt += "t" + std::to_string(i) + "\n";
  write(dir_ / "m.en", src);
  write(dir_ / "m.ga", tgt);
  try {
    ingest_file(dir_ / "m", ExportFormat::bitext, options());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 501u);
  }
}

TEST_F(CorpusIoTest, MalformedRecordsCarryLineNumbers) {
  write(dir_ / "bad.tsv", "a\tb\nno tab here\n");
  try {
    ingest_file(dir_ / "bad.tsv", ExportFormat::tsv, options());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write(dir_ / "bad.jsonl", segment_to_json(crisis::testing::synthetic_segment(kEnGa, 0)).dump() +
                                "\n{\"id\": 3}\n");
  try {
    ingest_file(dir_ / "bad.jsonl", ExportFormat::jsonl, options());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write(dir_ / "blank.tsv", "a\t   \n");
  EXPECT_THROW(ingest_file(dir_ / "blank.tsv", ExportFormat::tsv, options()), ParseError);
  EXPECT_THROW(ingest_file(dir_ / "missing.tsv", ExportFormat::tsv, options()), IoError);
}

TEST_F(CorpusIoTest, ManifestExportWritesEachSplit) {
  const Corpus c = corpus_of(10);
  const SplitManifest m = split(c, {0.8, 0.1, 0.1}, 3);
  const ExportReceipt r = export_parallel(c, m, ExportFormat::bitext, {dir_, ""});
  EXPECT_EQ(r.segment_count, 10u);
  EXPECT_EQ(r.manifest_fingerprint, manifest_fingerprint(m));
  EXPECT_EQ(*r.manifest_fingerprint, hash::sha256_hex(manifest_to_json(m).dump()));
  ASSERT_EQ(r.files.size(), 6u);
  EXPECT_EQ(r.files[0].file_name, "train.en");
  EXPECT_EQ(r.files[0].lines, 8u);
  EXPECT_EQ(r.files[2].file_name, "validation.en");
  EXPECT_EQ(r.files[2].lines, 1u);
  EXPECT_EQ(r.files[4].file_name, "test.en");
  EXPECT_EQ(r.files[4].lines, 1u);
}

TEST_F(CorpusIoTest, ManifestJsonRoundTrip) {
  const SplitManifest m = split(corpus_of(30), {0.7, 0.2, 0.1}, 99);
  const SplitManifest back = manifest_from_json(manifest_to_json(m));
  EXPECT_EQ(back.assignments, m.assignments);
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_EQ(back.ratios, m.ratios);
  EXPECT_EQ(manifest_to_json(back).dump(), manifest_to_json(m).dump());
}
