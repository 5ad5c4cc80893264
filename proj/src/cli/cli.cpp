#include "crisis/cli/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <optional>

#include "crisis/backends/config.hpp"
#include "crisis/common/error.hpp"
#include "crisis/corpus/io.hpp"
#include "crisis/corpus/ops.hpp"
#include "crisis/eval/evaluate.hpp"
#include "crisis/eval/leaderboard.hpp"
#include "crisis/service/http.hpp"
#include "crisis/service/service.hpp"

namespace crisis::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct InputOptions {
  std::string path;
  std::string format;
  std::string pair;
  std::string stream;
  std::string phase;
  std::string contributor;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool json = false;
  std::string config_path;

  std::optional<service::ServiceConfig> config() const {
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("CRISIS_CORPUS_CONFIG"); env != nullptr) path = env;
    }
    if (path.empty()) return std::nullopt;
    return service::ServiceConfig::load(path);
  }

  void emit(const Json& j, const std::string& text) const {
    if (json) {
      out << j.dump(2) << "\n";
    } else {
      out << text;
      if (!text.empty() && text.back() != '\n') out << "\n";
    }
  }
};

corpus::ExportFormat infer_format(const std::string& path, const std::string& explicit_format) {
  if (!explicit_format.empty()) return corpus::parse_export_format(explicit_format);
  const auto ext = fs::path(path).extension().string();
  if (ext == ".jsonl") return corpus::ExportFormat::jsonl;
  if (ext == ".tsv") return corpus::ExportFormat::tsv;
  return corpus::ExportFormat::bitext;
}

corpus::Corpus load(const InputOptions& in) {
  corpus::IngestOptions opts;
  opts.pair = corpus::LanguagePair::parse(in.pair);
  opts.created_at = now_utc();
  if (!in.stream.empty()) opts.stream = corpus::parse_stream(in.stream);
  if (!in.phase.empty()) {
    const bool numeric = in.phase.find_first_not_of("0123456789") == std::string::npos;
    opts.phase = numeric ? corpus::CrisisPhase::from_ordinal(std::stoi(in.phase))
                         : corpus::CrisisPhase::from_label(std::string_view(in.phase));
  }
  if (!in.contributor.empty()) opts.contributor = in.contributor;
  return corpus::ingest_file(in.path, infer_format(in.path, in.format), opts);
}

void add_input(CLI::App* cmd, InputOptions& in, const std::string& flag = "--input") {
  cmd->add_option(flag, in.path, "Corpus file (bitext: shared path prefix)")->required();
  cmd->add_option("--input-format", in.format, "jsonl, tsv or bitext (default: from extension)");
  cmd->add_option("--pair", in.pair, "Language pair, e.g. en-ga")->required();
}

std::string counts_text(const corpus::SplitManifest& m) {
  std::string s;
  for (auto name : corpus::kAllSplits) {
    s += std::string(corpus::to_string(name)) + " " + std::to_string(m.count(name)) + "\n";
  }
  return s;
}

service::HttpServer* g_server = nullptr;

void handle_stop_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, false, {}};
  CLI::App app{"Crisis-response translation corpus toolkit", args.empty() ? "crisis-corpus" : args[0]};
  app.require_subcommand(1);
  app.add_option("--config", ctx.config_path, "Service config file (default: $CRISIS_CORPUS_CONFIG)");
  app.add_flag("--json", ctx.json, "Machine-readable output");
  app.set_help_all_flag("--help-all");

  auto json_flag = [&](CLI::App* cmd) { cmd->add_flag("--json", ctx.json, "Machine-readable output"); };

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_host;
  int serve_port = -1;
  serve->add_option("--host", serve_host, "Listen address (overrides config)");
  serve->add_option("--port", serve_port, "Listen port (overrides config; 0 picks one)");
  json_flag(serve);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a corpus file into the service store");
  InputOptions ingest_in;
  std::string ingest_store;
  add_input(ingest, ingest_in);
  ingest->add_option("--store", ingest_store, "Store directory (overrides config)");
  ingest->add_option("--stream", ingest_in.stream, "Stream for tsv/bitext input");
  ingest->add_option("--phase", ingest_in.phase, "Crisis phase label or ordinal for tsv/bitext input");
  ingest->add_option("--contributor", ingest_in.contributor, "Contributor for tsv/bitext input");
  json_flag(ingest);

  // dedup
  auto* dedup = app.add_subcommand("dedup", "Remove duplicate segments");
  InputOptions dedup_in;
  std::string dedup_output;
  std::string dedup_output_format = "jsonl";
  add_input(dedup, dedup_in);
  dedup->add_option("--output", dedup_output, "Directory for the deduplicated corpus");
  dedup->add_option("--output-format", dedup_output_format, "jsonl, tsv or bitext");
  json_flag(dedup);

  // split
  auto* split_cmd = app.add_subcommand("split", "Assign segments to train/validation/test");
  InputOptions split_in;
  std::string ratios_text = "0.8,0.1,0.1";
  std::uint64_t seed = 0;
  std::string manifest_out;
  add_input(split_cmd, split_in);
  split_cmd->add_option("--ratios", ratios_text, "train,validation,test");
  split_cmd->add_option("--seed", seed, "Split seed")->required();
  split_cmd->add_option("--output", manifest_out, "Write the manifest JSON here");
  json_flag(split_cmd);

  // check-contamination
  auto* contam = app.add_subcommand("check-contamination", "Report train/test overlap");
  InputOptions train_in;
  InputOptions test_in;
  bool fail_on_overlap = false;
  contam->add_option("--train", train_in.path, "Training corpus")->required();
  contam->add_option("--test", test_in.path, "Test corpus")->required();
  contam->add_option("--input-format", train_in.format, "jsonl, tsv or bitext (default: from extension)");
  contam->add_option("--pair", train_in.pair, "Language pair")->required();
  contam->add_flag("--fail-on-overlap", fail_on_overlap, "Exit 1 when any pair-level overlap is found");
  json_flag(contam);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Translate a testset and score it");
  std::string backend_config;
  InputOptions eval_in;
  std::string system_name;
  std::string runs_dir;
  evaluate->add_option("--backend-config", backend_config, "Backend config JSON")->required();
  add_input(evaluate, eval_in, "--testset");
  evaluate->add_option("--name", system_name, "System name")->required();
  evaluate->add_option("--runs-dir", runs_dir, "Where run artifacts go (default: config runs_dir or ./runs)");
  json_flag(evaluate);

  // leaderboard
  auto* leaderboard = app.add_subcommand("leaderboard", "Rank published baselines and local runs");
  std::string direction;
  std::string reference;
  std::string baselines_path;
  std::string lb_runs_dir;
  std::string lb_format = "markdown";
  leaderboard->add_option("--direction", direction, "e.g. en-ga")->required();
  leaderboard->add_option("--reference", reference, "Reference system for deltas")->required();
  leaderboard->add_option("--baselines", baselines_path, "Baseline TSV (default: shipped file)");
  leaderboard->add_option("--runs-dir", lb_runs_dir, "Include local runs from this directory");
  leaderboard->add_option("--format", lb_format, "markdown or json");
  json_flag(leaderboard);

  // export
  auto* export_cmd = app.add_subcommand("export", "Write a corpus as jsonl, tsv or bitext");
  InputOptions export_in;
  std::string export_format;
  std::string export_dir;
  std::string export_name = "corpus";
  std::string export_manifest;
  bool export_dedup = false;
  add_input(export_cmd, export_in);
  export_cmd->add_option("--format", export_format, "jsonl, tsv or bitext")->required();
  export_cmd->add_option("--output-dir", export_dir, "Destination directory")->required();
  export_cmd->add_option("--name", export_name, "File name stem");
  export_cmd->add_option("--manifest", export_manifest, "Split manifest JSON; writes one file set per split");
  export_cmd->add_flag("--dedup", export_dedup, "Deduplicate before exporting");
  json_flag(export_cmd);

  std::vector<std::string> argv_rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(argv_rest.begin(), argv_rest.end());
  try {
    app.parse(argv_rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  try {
    if (*serve) {
      auto cfg = ctx.config();
      if (!cfg) throw ValidationError("serve needs --config or CRISIS_CORPUS_CONFIG");
      if (!serve_host.empty()) cfg->listen_host = serve_host;
      if (serve_port >= 0) cfg->listen_port = serve_port;
      service::CorpusService svc(*cfg);
      service::HttpServer server(svc);
      const int port = server.bind(cfg->listen_host, cfg->listen_port);
      const auto info = svc.recovery();
      if (!info.snapshot_warning.empty()) err << "warning: " << info.snapshot_warning << "\n";
      ctx.emit(Json{{"listening", cfg->listen_host + ":" + std::to_string(port)}, {"last_seq", info.last_seq}},
               "listening on " + cfg->listen_host + ":" + std::to_string(port) + " (" +
                   std::to_string(info.last_seq) + " events recovered)");
      out.flush();
      g_server = &server;
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      server.serve();
      g_server = nullptr;
      return kSuccess;
    }

    if (*ingest) {
      auto cfg = ctx.config().value_or(service::ServiceConfig{});
      if (!ingest_store.empty()) cfg.store_path = ingest_store;
      if (ingest_store.empty() && !ctx.config()) throw ValidationError("ingest needs --store or a config file");
      const auto corpus = load(ingest_in);
      service::CorpusService svc(cfg);
      const auto n = svc.import_segments(corpus);
      const auto last = svc.snapshot().last_seq();
      ctx.emit(Json{{"ingested", n}, {"pair", corpus.pair.code()}, {"store", cfg.store_path.string()}, {"last_seq", last}},
               "ingested " + std::to_string(n) + " segments into " + cfg.store_path.string());
      return kSuccess;
    }

    if (*dedup) {
      const auto corpus = load(dedup_in);
      const auto [deduped, report] = corpus::deduplicate(corpus);
      Json j{{"input", corpus.size()}, {"survivors", deduped.size()}, {"report", corpus::dedup_report_to_json(report)}};
      if (!dedup_output.empty()) {
        const auto receipt = corpus::export_parallel(deduped, corpus::parse_export_format(dedup_output_format),
                                                     corpus::ExportTarget{dedup_output, "corpus"});
        j["export"] = receipt.to_json();
      }
      ctx.emit(j, std::to_string(corpus.size()) + " segments, " + std::to_string(report.removals.size()) +
                      " duplicates removed, " + std::to_string(deduped.size()) + " kept");
      return kSuccess;
    }

    if (*split_cmd) {
      const auto corpus = load(split_in);
      const auto manifest = corpus::split(corpus, corpus::SplitRatios::parse(ratios_text), seed);
      Json j = corpus::manifest_to_json(manifest);
      if (!manifest_out.empty()) corpus::write_file(manifest_out, j.dump(2) + "\n");
      ctx.emit(j, counts_text(manifest) + "fingerprint " + corpus::manifest_fingerprint(manifest));
      return kSuccess;
    }

    if (*contam) {
      test_in.format = train_in.format;
      test_in.pair = train_in.pair;
      const auto train = load(train_in);
      const auto test = load(test_in);
      const auto report = corpus::contamination_check(train.segments, test.segments);
      ctx.emit(corpus::overlap_report_to_json(report),
               std::to_string(report.pair_hits.size()) + " overlaps (" + std::to_string(report.source_hits.size()) +
                   " source-side matches)");
      return fail_on_overlap && !report.pair_hits.empty() ? kValidationError : kSuccess;
    }

    if (*evaluate) {
      Json cfg_json;
      try {
        cfg_json = Json::parse(corpus::read_file(backend_config));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(backend_config + ": " + e.what());
      }
      const auto cfg = backends::BackendConfig::from_json(cfg_json);
      const auto testset = load(eval_in);
      eval::EvaluationOptions opts;
      if (!runs_dir.empty()) {
        opts.output_dir = fs::path(runs_dir);
      } else if (auto sc = ctx.config(); sc && sc->runs_dir) {
        opts.output_dir = *sc->runs_dir;
      } else {
        opts.output_dir = fs::path("runs");
      }
      const auto ev = eval::evaluate_system(cfg, testset.segments, system_name, opts);
      for (const auto& r : ev.results) {
        if (r.error) err << "segment " << r.segment_id << " failed: " << *r.error << "\n";
      }
      Json j;
      j["record"] = eval::record_to_json(ev.record);
      j["scores"] = ev.report.to_json();
      j["failed_segments"] = ev.failed_ids;
      j["run_dir"] = ev.run_dir ? ev.run_dir->string() : "";
      char line[160];
      std::snprintf(line, sizeof line, "%s: BLEU %.2f  TER %.4f  ChrF3 %.4f  (%zu/%zu segments scored)",
                    system_name.c_str(), ev.record.bleu, ev.record.ter, ev.record.chrf3,
                    testset.size() - ev.failed_ids.size(), testset.size());
      ctx.emit(j, line);
      return kSuccess;
    }

    if (*leaderboard) {
      auto cfg = ctx.config();
      fs::path path = !baselines_path.empty() ? fs::path(baselines_path)
                      : cfg && cfg->baselines_path ? *cfg->baselines_path
                                                   : eval::default_baselines_path();
      auto records = eval::filter_direction(eval::load_baselines(path), direction);
      std::optional<fs::path> runs;
      if (!lb_runs_dir.empty()) {
        runs = fs::path(lb_runs_dir);
      } else if (cfg && cfg->runs_dir) {
        runs = cfg->runs_dir;
      }
      if (runs) {
        for (auto& r : eval::load_run_records(*runs)) {
          if (r.direction() == direction) records.push_back(std::move(r));
        }
      }
      const auto lb = eval::build_leaderboard(records, reference);
      if (ctx.json) {
        out << eval::leaderboard_to_json(lb).dump(2) << "\n";
      } else {
        out << eval::render_report(lb, eval::parse_report_format(lb_format));
      }
      return kSuccess;
    }

    if (*export_cmd) {
      auto corpus = load(export_in);
      if (export_dedup) corpus = corpus::deduplicate(corpus).first;
      const auto format = corpus::parse_export_format(export_format);
      const corpus::ExportTarget target{export_dir, export_name};
      std::error_code ec;
      fs::create_directories(export_dir, ec);
      if (ec) throw IoError("cannot create " + export_dir + ": " + ec.message());
      corpus::ExportReceipt receipt;
      if (!export_manifest.empty()) {
        Json mj;
        try {
          mj = Json::parse(corpus::read_file(export_manifest));
        } catch (const nlohmann::json::exception& e) {
          throw ParseError(export_manifest + ": " + e.what());
        }
        receipt = corpus::export_parallel(corpus, corpus::manifest_from_json(mj), format, target);
      } else {
        receipt = corpus::export_parallel(corpus, format, target);
      }
      std::string text = "exported " + std::to_string(receipt.segment_count) + " segments:\n";
      for (const auto& f : receipt.files) text += "  " + f.file_name + " (" + std::to_string(f.lines) + " lines)\n";
      ctx.emit(receipt.to_json(), text);
      return kSuccess;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::encoding:
      case ErrorKind::parse: return kValidationError;
      case ErrorKind::io: return kIoError;
      case ErrorKind::backend: return kBackendError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kSuccess;
}

}  // namespace crisis::cli
