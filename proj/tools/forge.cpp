// forge: command-line front end for every pipeline stage.
// Exit codes: 0 ok, 1 fatal error, 2 usage or configuration error.

#include "forge/annotation_server.hpp"
#include "forge/pipeline.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace forge;

namespace {

void print_warnings(const Warnings& w) {
  for (const auto& m : w.messages) std::cerr << "warning: " << m << "\n";
}

std::vector<LanguageCode> parse_langs(const std::string& csv) {
  std::vector<LanguageCode> out;
  for (const auto& part : split_on(csv, ',')) {
    const std::string code = trim(part);
    if (code.empty()) continue;
    if (!LanguageCode::valid(code)) throw ConfigError("invalid language code '" + code + "'");
    LanguageCode l(code);
    if (!default_scripts().knows(l)) throw ConfigError("unknown language '" + code + "'");
    if (!l.is_english()) out.push_back(l);
  }
  if (out.empty()) throw ConfigError("--langs needs at least one non-English language");
  return out;
}

void emit_json(const nlohmann::ordered_json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_file(out, j.dump(2) + "\n");
  }
}

nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(p.string() + ": " + e.what());
  }
}

AccuracyMode mode_or_throw(const std::string& s) {
  const auto m = parse_mode(s);
  if (!m) throw ConfigError("--mode must be conservative or liberal");
  return *m;
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: build sentence-aligned parallel corpora from a multilingual article archive"};
  app.require_subcommand(1);

  // crawl
  auto* crawl_cmd = app.add_subcommand("crawl", "List and fetch articles into a documents tree");
  std::string source, langs_csv, crawl_out;
  double title_threshold = 0.5;
  std::size_t delay_ms = 500, concurrency = 4, workers = 1;
  crawl_cmd->add_option("--source", source, "Archive URL or fixture directory")->required();
  crawl_cmd->add_option("--langs", langs_csv, "Comma-separated non-English languages")->required();
  crawl_cmd->add_option("--out", crawl_out, "Documents directory")->required();
  crawl_cmd->add_option("--title-threshold", title_threshold, "Script share a title needs to count as translated");
  crawl_cmd->add_option("--delay", delay_ms, "Politeness delay between requests (ms)");
  crawl_cmd->add_option("--concurrency", concurrency, "Maximum concurrent requests");
  crawl_cmd->add_option("--workers", workers, "Worker threads");

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Extract article bodies from fetched pages");
  std::string extract_in, extract_out, extract_langs;
  ExtractConfig extract_cfg;
  extract_cmd->add_option("--in", extract_in, "Documents directory written by crawl")->required();
  extract_cmd->add_option("--out", extract_out, "Output directory")->required();
  extract_cmd->add_option("--langs", extract_langs, "Languages to extract (default: all found)");
  extract_cmd->add_option("--max-link-density", extract_cfg.max_link_density);
  extract_cmd->add_option("--min-block-chars", extract_cfg.min_block_chars);
  extract_cmd->add_option("--workers", workers);

  // split: sentence mode, document mode, or corpus mode
  auto* split_cmd = app.add_subcommand("split", "Sentence-split text, or split a corpus into train/dev/test");
  std::string split_lang, split_docs, split_in, split_out;
  std::vector<std::string> split_prefixes;
  std::size_t n_dev = 0, n_test = 0;
  std::uint64_t split_seed = 0;
  auto* dev_opt = split_cmd->add_option("--dev", n_dev, "Dev pairs (corpus mode)");
  auto* test_opt = split_cmd->add_option("--test", n_test, "Test pairs (corpus mode)");
  split_cmd->add_option("--seed", split_seed, "Sampling seed (corpus mode)");
  split_cmd->add_option("--lang", split_lang, "Language (sentence mode)");
  split_cmd->add_option("--prefixes", split_prefixes, "Non-breaking prefix files replacing the defaults");
  split_cmd->add_option("--docs", split_docs, "Extracted documents directory (document mode)");
  split_cmd->add_option("--in", split_in, "Corpus TSV (corpus mode)");
  split_cmd->add_option("--out", split_out, "Output directory (document and corpus modes)");

  // align-length
  auto* al_cmd = app.add_subcommand("align-length", "Length-and-dictionary sentence alignment");
  std::string al_dict, al_src, al_tgt, al_out;
  LengthModel model;
  al_cmd->add_option("--dict", al_dict, "Bilingual dictionary TSV (english<TAB>foreign)");
  al_cmd->add_option("--src", al_src, "English sentences, one per line")->required();
  al_cmd->add_option("--tgt", al_tgt, "Foreign sentences, one per line")->required();
  al_cmd->add_option("--out", al_out, "Links TSV")->required();
  al_cmd->add_option("--c", model.mean_ratio, "Expected target/source length ratio");
  al_cmd->add_option("--s2", model.variance, "Length variance per character");
  al_cmd->add_option("--kappa", model.skip_penalty, "Cost per skipped sentence");
  al_cmd->add_option("--lambda", model.lex_weight, "Weight of the dictionary match score");

  // align-embed
  auto* ae_cmd = app.add_subcommand("align-embed", "Embedding-similarity sentence alignment");
  std::string ae_src, ae_tgt, ae_src_emb, ae_tgt_emb, ae_out;
  std::size_t stub_dim = 0;
  std::uint64_t stub_seed = 1;
  EmbedAlignParams eparams;
  ae_cmd->add_option("--src", ae_src)->required();
  ae_cmd->add_option("--tgt", ae_tgt)->required();
  ae_cmd->add_option("--src-emb", ae_src_emb, "Source embedding file");
  ae_cmd->add_option("--tgt-emb", ae_tgt_emb, "Target embedding file");
  ae_cmd->add_option("--out", ae_out)->required();
  ae_cmd->add_option("--stub-dim", stub_dim, "Use hashed n-gram stub embeddings of this dimension");
  ae_cmd->add_option("--stub-seed", stub_seed);
  ae_cmd->add_option("--max-block", eparams.max_block);
  ae_cmd->add_option("--skip-cost", eparams.skip_cost);
  ae_cmd->add_option("--window", eparams.window);
  ae_cmd->add_option("--norm-samples", eparams.norm_samples);
  ae_cmd->add_option("--seed", eparams.seed);

  // release
  auto* rel_cmd = app.add_subcommand("release", "Build released corpora from a links tree");
  std::string rel_links, rel_sentences, rel_out;
  rel_cmd->add_option("--links", rel_links)->required();
  rel_cmd->add_option("--sentences", rel_sentences, "Sentences directory (default: sibling of --links)");
  rel_cmd->add_option("--out", rel_out)->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluation measures");
  eval_cmd->require_subcommand(1);
  auto* agr_cmd = eval_cmd->add_subcommand("agreement", "Overlap of two corpora (a = hypothesis, b = gold)");
  std::string agr_a, agr_b, eval_out;
  agr_cmd->add_option("--a", agr_a)->required();
  agr_cmd->add_option("--b", agr_b)->required();
  agr_cmd->add_option("--out", eval_out, "Output JSON (default: stdout)");

  auto* prec_cmd = eval_cmd->add_subcommand("precision", "Per-aligner precision from agreement and tallies");
  std::string prec_agreement, prec_tallies, prec_mode, prec_method = "b";
  prec_cmd->add_option("--agreement", prec_agreement, "Agreement JSON")->required();
  prec_cmd->add_option("--tallies", prec_tallies, "Tally JSON (annotate export or per-stratum counts)")->required();
  prec_cmd->add_option("--mode", prec_mode, "conservative or liberal (default: both)");
  prec_cmd->add_option("--method", prec_method, "Evaluated aligner: a (hypothesis side) or b (gold side)")
      ->check(CLI::IsMember({"a", "b"}));
  prec_cmd->add_option("--out", eval_out);

  auto* bleu_cmd = eval_cmd->add_subcommand("bleu", "Corpus BLEU of tokenized text");
  std::string bleu_hyp, bleu_ref;
  bleu_cmd->add_option("--hyp", bleu_hyp)->required();
  bleu_cmd->add_option("--ref", bleu_ref)->required();

  auto* sample_cmd = eval_cmd->add_subcommand("sample", "Draw stratified annotation samples from two corpora");
  std::string sample_a, sample_b, sample_out;
  std::size_t sample_n = 100;
  std::uint64_t sample_seed = 0;
  sample_cmd->add_option("--a", sample_a)->required();
  sample_cmd->add_option("--b", sample_b)->required();
  sample_cmd->add_option("--n", sample_n, "Pairs per stratum");
  sample_cmd->add_option("--seed", sample_seed);
  sample_cmd->add_option("--out", sample_out, "Samples directory")->required();

  // annotate
  auto* ann_cmd = app.add_subcommand("annotate", "Serve the annotation API");
  AnnotationServerConfig ann;
  std::string ann_samples, ann_sessions, ann_ui;
  ann_cmd->add_option("--samples", ann_samples)->required();
  ann_cmd->add_option("--sessions", ann_sessions, "Session log directory (default: <samples>/sessions)");
  ann_cmd->add_option("--ui", ann_ui, "Static UI bundle directory");
  ann_cmd->add_option("--host", ann.host);
  ann_cmd->add_option("--port", ann.port);

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run crawl through release from a config file");
  std::string pipe_config, pipe_out;
  pipe_cmd->add_option("--config", pipe_config, "JSON config")->required();
  pipe_cmd->add_option("--out", pipe_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Warnings warnings;
    if (*crawl_cmd) {
      const auto langs = parse_langs(langs_csv);
      const auto fetcher = make_fetcher(parse_source(source, delay_ms, concurrency));
      const auto stats = crawl(*fetcher, langs, crawl_out, {title_threshold, workers, &default_scripts()}, warnings);
      print_warnings(warnings);
      std::cout << crawl_report(stats).dump(2) << "\n";
    } else if (*extract_cmd) {
      const auto langs = extract_langs.empty() ? languages_in(extract_in, "listing.json") : with_english(parse_langs(extract_langs));
      std::map<LanguageCode, CrawlStats> stats;
      extract(extract_in, extract_out, langs, extract_cfg, workers, warnings, &stats);
      print_warnings(warnings);
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [l, s] : stats) j[l.str()] = {{"extracted", s.extracted}, {"empty_body", s.empty_body}};
      std::cout << j.dump(2) << "\n";
    } else if (*split_cmd) {
      const bool corpus_mode = dev_opt->count() > 0 || test_opt->count() > 0;
      if (corpus_mode) {
        if (split_in.empty() || split_out.empty()) throw ConfigError("corpus mode needs --in and --out");
        const auto pairs = read_corpus(split_in);
        const auto parts = split_corpus(pairs, n_dev, n_test, split_seed);
        const std::string stem = fs::path(split_in).stem().string();
        write_corpus(parts.train, fs::path(split_out) / (stem + ".train.tsv"));
        write_corpus(parts.dev, fs::path(split_out) / (stem + ".dev.tsv"));
        write_corpus(parts.test, fs::path(split_out) / (stem + ".test.tsv"));
        std::cout << nlohmann::ordered_json{{"train", parts.train.size()}, {"dev", parts.dev.size()}, {"test", parts.test.size()}}.dump()
                  << "\n";
      } else {
        if (split_lang.empty()) throw ConfigError("split needs --lang, or --dev/--test for corpus mode");
        if (!LanguageCode::valid(split_lang)) throw ConfigError("invalid language code '" + split_lang + "'");
        const LanguageCode lang(split_lang);
        SplitterConfig cfg = SplitterConfig::for_language(lang);
        if (!split_prefixes.empty()) {
          cfg.prefixes.clear();
          for (const auto& p : split_prefixes) parse_prefixes(read_file(p), cfg.prefixes);
        }
        if (!split_docs.empty()) {
          if (split_out.empty()) throw ConfigError("document mode needs --out");
          split_documents(split_docs, split_out, lang, cfg, 1);
        } else {
          std::stringstream ss;
          ss << std::cin.rdbuf();
          const auto repaired = repair_utf8(ss.str());
          if (repaired.replaced > 0) std::cerr << "warning: " << repaired.replaced << " invalid UTF-8 bytes replaced\n";
          bool first = true;
          for (const auto& para : paragraphs_of(repaired.text)) {
            if (!first) std::cout << "\n";
            first = false;
            for (const auto& s : segment_text({para}, cfg)) std::cout << s << "\n";
          }
        }
      }
    } else if (*al_cmd) {
      std::optional<BilingualDictionary> dict;
      if (!al_dict.empty()) dict = read_dictionary(al_dict, &warnings);
      const std::optional<LexicalScorer> lex = dict ? std::optional<LexicalScorer>(LexicalScorer(*dict)) : std::nullopt;
      model.validate();
      const auto src = read_lines(al_src), tgt = read_lines(al_tgt);
      write_links(align_length(src, tgt, model, lex ? &*lex : nullptr), al_out);
      print_warnings(warnings);
    } else if (*ae_cmd) {
      const auto src = read_lines(ae_src), tgt = read_lines(ae_tgt);
      EmbeddingMatrix se, te;
      if (stub_dim > 0) {
        if (stub_dim < 8) throw ConfigError("--stub-dim must be >= 8");
        se = stub_embeddings(src, stub_dim, stub_seed);
        te = stub_embeddings(tgt, stub_dim, stub_seed);
      } else {
        if (ae_src_emb.empty() || ae_tgt_emb.empty()) throw ConfigError("align-embed needs --src-emb and --tgt-emb (or --stub-dim)");
        se = load_embeddings(ae_src, ae_src_emb);
        te = load_embeddings(ae_tgt, ae_tgt_emb);
      }
      write_links(align_embed(src, tgt, se, te, eparams), ae_out);
    } else if (*rel_cmd) {
      const fs::path links(rel_links);
      const fs::path sentences = rel_sentences.empty() ? links.parent_path() / "sentences" : fs::path(rel_sentences);
      const auto releases = release_all(links, sentences, rel_out);
      for (const auto& r : releases) print_warnings(r.warnings);
      std::cout << release_report(releases).dump(2) << "\n";
    } else if (*eval_cmd) {
      if (*agr_cmd) {
        const PairSet a(read_corpus(agr_a)), b(read_corpus(agr_b));
        const auto report = agreement(a, b, &warnings);
        print_warnings(warnings);
        emit_json(to_json(report), eval_out);
      } else if (*prec_cmd) {
        const auto overlap = agreement_from_json(read_json(prec_agreement));
        const auto tallies = tallies_from_export(read_json(prec_tallies));
        const Stratum only = prec_method == "a" ? Stratum::OnlyA : Stratum::OnlyB;
        const AgreementRole role = prec_method == "a" ? AgreementRole::Hypothesis : AgreementRole::Gold;
        if (!tallies.count(Stratum::Both) || !tallies.count(only)) {
          throw Error("tallies need the 'both' and '" + std::string(to_string(only)) + "' strata");
        }
        nlohmann::ordered_json j = {{"method", prec_method}, {"shared_fraction", shared_fraction(overlap, role)}};
        std::vector<AccuracyMode> modes = {AccuracyMode::Conservative, AccuracyMode::Liberal};
        if (!prec_mode.empty()) modes = {mode_or_throw(prec_mode)};
        for (const auto m : modes) {
          j[m == AccuracyMode::Conservative ? "conservative" : "liberal"] =
              method_precision(overlap, role, tallies.at(Stratum::Both), tallies.at(only), m);
        }
        emit_json(j, eval_out);
      } else if (*bleu_cmd) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", bleu(read_lines(bleu_hyp), read_lines(bleu_ref)));
        std::cout << "BLEU = " << buf << "\n";
      } else if (*sample_cmd) {
        const PairSet a(read_corpus(sample_a)), b(read_corpus(sample_b));
        const auto sample = stratify_sample(a, b, sample_n, sample_seed, &warnings);
        write_samples(sample, sample_out);
        print_warnings(warnings);
        std::cout << nlohmann::ordered_json{{"only_a", sample.only_a.size()}, {"only_b", sample.only_b.size()}, {"both", sample.both.size()}}
                         .dump()
                  << "\n";
      }
    } else if (*ann_cmd) {
      ann.samples_dir = ann_samples;
      ann.sessions_dir = ann_sessions;
      ann.ui_dir = ann_ui;
      AnnotationService service(ann);
      g_server = &service.server();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << service.samples().size() << " pairs on http://" << ann.host << ":" << ann.port << "/\n";
      if (!service.listen()) throw Error("cannot listen on " + ann.host + ":" + std::to_string(ann.port));
    } else if (*pipe_cmd) {
      const auto cfg = load_config(pipe_config);
      const auto res = run_pipeline(cfg, pipe_out);
      print_warnings(res.warnings);
      std::cout << nlohmann::ordered_json{{"articles", res.report["articles"]}, {"pairs", res.report["pairs"]}}.dump(2) << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
