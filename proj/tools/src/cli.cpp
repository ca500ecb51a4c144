#include "vocablab/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <list>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "vocablab/bpe.hpp"
#include "vocablab/datamix.hpp"
#include "vocablab/error.hpp"
#include "vocablab/io.hpp"
#include "vocablab/metrics.hpp"
#include "vocablab/miner.hpp"
#include "vocablab/overlap.hpp"
#include "vocablab/pipeline.hpp"
#include "vocablab/prefix.hpp"
#include "vocablab/vocab.hpp"

#ifndef VOCABLAB_VERSION
#define VOCABLAB_VERSION "0.0.0"
#endif

namespace vocablab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kWorkersEnv = "VOCABLAB_WORKERS";

struct Global {
  std::string log_level = "info";
  std::size_t workers = 1;
  bool workers_given = false;
  bool deterministic = false;
  std::optional<std::uint64_t> seed;
  bool overwrite = false;

  std::size_t effective_workers() const { return deterministic ? 1 : workers; }
};

std::string version_text() {
  return std::string("vocab-lab ") + VOCABLAB_VERSION + "\nbpe model format " +
         std::to_string(bpe::kModelFormatVersion) + "\nexperiment manifest format " +
         std::to_string(pipeline::kManifestFormatVersion) + "\nvocab formats: canonical (token\\tid\\tcount), compat (yml)\n";
}

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

void emit(const std::string& path, const std::string& content, const Global& g, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    io::write_file(path, content, g.overwrite);
  }
}

std::vector<std::string> read_all(const std::vector<std::string>& paths) {
  std::vector<std::string> lines;
  for (const auto& p : paths) {
    auto l = io::read_lines(p);
    lines.insert(lines.end(), std::make_move_iterator(l.begin()), std::make_move_iterator(l.end()));
  }
  return lines;
}

void configure_logging(const std::string& level, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("vocab-lab", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::from_str(level));
  spdlog::set_default_logger(logger);
}

struct TrainBpeArgs {
  std::vector<std::string> inputs;
  std::string model;
  std::size_t vocab_size = 32000;
  bool fallback = true;
  std::string normalization = "none";
};

struct EncodeArgs {
  std::string model, input, output, lang;
};

struct DecodeArgs {
  std::string model, input, output;
};

struct PrefixArgs {
  std::string input, output, pre, lang;
  std::vector<std::string> exempt;
  bool strip = false;
};

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string output, compat;
};

struct OverlapArgs {
  std::string a, b, joint, report, tsv;
  std::vector<std::size_t> sizes;
};

struct Overlap3Args {
  std::string base, aux1, aux2, report;
  std::vector<std::size_t> counts;
};

struct CompSizeArgs {
  std::string joint, base;
  std::vector<std::size_t> sizes;
};

struct MixArgs {
  std::string manifest, output;
};

struct CheckArgs {
  std::string src, trg;
};

struct ScoreArgs {
  std::string hyp, ref, metric = "both", model, report, per_sentence;
  bool chrf_eps = false, chrf_ws = false, bleu_eff = false;
  int char_order = 6, bleu_order = 4;
  double beta = 2.0;
  std::string tokenize = "13a", smooth = "exp";
};

struct ReportArgs {
  std::vector<std::string> reports;
  std::string table, plot, svg, svg_metric = "chrf";
};

struct MineArgs {
  std::string src, ref, hyp_a, hyp_b, output, table, label_a = "A", label_b = "B";
  double threshold = 50.0;
  bool symmetric = false;
  std::size_t limit = 0;
};

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return pipeline::stage_exit_code(s->stage());
  if (const auto* v = dynamic_cast<const Error*>(&e)) return 3 + static_cast<int>(v->kind());
  return kExitUnexpected;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corpus and vocabulary toolkit for joint/disjoint multilingual vocabularies", "vocab-lab"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", version_text());

  Global g;
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      g.workers = std::stoul(env);
    } catch (const std::exception&) {
      err << "vocab-lab: " << kWorkersEnv << " must be a positive integer\n";
      return kExitUsage;
    }
    g.workers_given = true;
  }
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  auto* workers_opt = app.add_option("--workers", g.workers, std::string("Worker threads (default $") + kWorkersEnv + " or 1)")
                          ->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic, "Run every stage single-threaded");
  app.add_option("--seed", g.seed, "Override the seed of mix/run manifests");
  app.add_flag("--overwrite", g.overwrite, "Allow replacing existing output files");

  TrainBpeArgs train_bpe_args;
  EncodeArgs encode_args;
  DecodeArgs decode_args;
  PrefixArgs prefix_args;
  ExtractArgs extract_args;
  OverlapArgs overlap_args;
  Overlap3Args overlap3_args;
  CompSizeArgs comp_size_args;
  MixArgs mix_args;
  CheckArgs check_args;
  ScoreArgs score_args;
  ReportArgs report_args;
  MineArgs mine_args;
  std::list<std::string> run_manifests;
  std::function<void()> action;
  int action_code = 0;

  // --- bpe
  {
    auto& o = train_bpe_args;
    auto* c = app.add_subcommand("train-bpe", "Train a BPE model");
    c->add_option("--input", o.inputs, "Training text (repeatable)")->required()->check(CLI::ExistingFile);
    c->add_option("--vocab-size", o.vocab_size, "Target piece count")->capture_default_str();
    c->add_flag("--byte-fallback,!--no-byte-fallback", o.fallback, "Byte pieces for unknown characters (default on)");
    c->add_option("--normalization", o.normalization, "none|nfkc")->check(CLI::IsMember({"none", "nfkc"}));
    c->add_option("--model,--model-out", o.model, "Output model file")->required();
    c->callback([&] {
      action = [&] {
        bpe::TrainOptions opt{o.vocab_size, o.fallback, bpe::parse_normalization(o.normalization), g.effective_workers()};
        const auto m = bpe::train(read_all(o.inputs), opt);
        m.save(o.model, g.overwrite);
        spdlog::info("trained {} pieces, {} merges -> {}", m.pieces().size(), m.merges().size(), o.model);
      };
    });
  }
  {
    auto& o = encode_args;
    auto* c = app.add_subcommand("encode", "Encode text into pieces");
    c->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
    c->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
    c->add_option("--output", o.output, "Token stream (- for stdout)")->required();
    c->add_option("--lang", o.lang, "Language tag");
    c->callback([&] {
      action = [&] {
        const auto m = bpe::Model::load(fs::path(o.model));
        const auto tok = bpe::encode_corpus(m, io::read_lines(o.input), o.lang, g.effective_workers());
        std::string text;
        for (const auto& l : tok.lines) text += bpe::format_tokens(l) + "\n";
        emit(o.output, text, g, out);
      };
    });
  }
  {
    auto& o = decode_args;
    auto* c = app.add_subcommand("decode", "Decode a token stream back to text");
    c->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
    c->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
    c->add_option("--output", o.output, "Text (- for stdout)")->required();
    c->callback([&] {
      action = [&] {
        const auto m = bpe::Model::load(fs::path(o.model));
        std::string text;
        for (const auto& l : bpe::decode_corpus(m, bpe::read_token_stream(o.input, ""))) text += l + "\n";
        emit(o.output, text, g, out);
      };
    });
  }
  // --- prefix
  {
    auto& o = prefix_args;
    auto* c = app.add_subcommand("prefix", "Add (or strip) a language prefix on every token");
    c->add_option("--input", o.input, "Token stream")->required()->check(CLI::ExistingFile);
    c->add_option("--output", o.output)->required();
    auto* p = c->add_option("--prefix", o.pre, "Prefix string");
    auto* l = c->add_option("--lang", o.lang, "Use the default prefix for this language (e.g. sv -> SV_)");
    p->excludes(l);
    c->add_option("--exempt", o.exempt, "Tokens left untouched (repeatable)");
    c->add_flag("--strip", o.strip, "Remove the prefix instead of adding it");
    c->callback([&] {
      if (o.pre.empty() && o.lang.empty()) throw CLI::ValidationError("prefix", "one of --prefix or --lang is required");
      action = [&] {
        prefix::PrefixRule rule{o.pre.empty() ? prefix::default_prefix(o.lang) : o.pre, {o.exempt.begin(), o.exempt.end()}};
        const auto tok = bpe::read_token_stream(o.input, o.lang);
        const auto res = o.strip ? prefix::strip_prefix(tok, rule, g.effective_workers())
                               : prefix::apply_prefix(tok, rule, g.effective_workers());
        bpe::write_token_stream(o.output, res, g.overwrite);
      };
    });
  }
  // --- vocab
  {
    auto& o = extract_args;
    auto* c = app.add_subcommand("extract-vocab", "Extract a frequency-ordered vocabulary from token streams");
    c->add_option("--input", o.inputs, "Token stream (repeatable; counted as one concatenated corpus)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--output,--out", o.output, "Canonical vocabulary file (- for stdout)")->required();
    c->add_option("--compat", o.compat, "Also write the YAML-style compat file");
    c->callback([&] {
      action = [&] {
        std::vector<bpe::TokenizedCorpus> corpora;
        for (const auto& p : o.inputs) corpora.push_back(bpe::read_token_stream(p, ""));
        const auto v = vocab::extract(corpora, g.effective_workers());
        emit(o.output, vocab::serialize(v, vocab::Format::kCanonical), g, out);
        if (!o.compat.empty()) vocab::write(v, o.compat, vocab::Format::kCompat, g.overwrite);
        spdlog::info("{} tokens", v.size());
      };
    });
  }
  // --- overlap
  {
    auto& o = overlap_args;
    auto* c = app.add_subcommand("overlap", "Overlap between two vocabularies");
    auto* oa = c->add_option("--a,--vocab-a", o.a, "First vocabulary")->check(CLI::ExistingFile);
    auto* ob = c->add_option("--b,--vocab-b", o.b, "Second vocabulary")->check(CLI::ExistingFile);
    c->add_option("--joint,--vocab-joint", o.joint, "Vocabulary of the concatenated corpora (checked)")->check(CLI::ExistingFile);
    auto* os = c->add_option("--sizes", o.sizes, "|V_a| |V_b| |V_joint| instead of vocabulary files")->expected(3);
    os->excludes(oa)->excludes(ob);
    c->add_option("--out,--report", o.report, "JSON report");
    c->add_option("--tsv", o.tsv, "Overlapping tokens with both ids");
    c->callback([&] {
      if (o.sizes.empty() && (o.a.empty() || o.b.empty()))
        throw CLI::ValidationError("overlap", "give --a and --b, or --sizes");
      action = [&] {
        overlap::Report r;
        if (!o.sizes.empty()) {
          r = overlap::compute_from_sizes(o.sizes[0], o.sizes[1], o.sizes[2]);
        } else {
          const auto va = vocab::read(o.a);
          const auto vb = vocab::read(o.b);
          std::optional<vocab::Vocabulary> vj;
          if (!o.joint.empty()) vj = vocab::read(o.joint);
          r = overlap::compute(va, vb, vj ? &*vj : nullptr);
          if (!o.tsv.empty()) io::write_file(o.tsv, overlap::overlap_tsv(r, va, vb), g.overwrite);
        }
        if (!o.report.empty()) io::write_file(o.report, dump(overlap::to_json(r)), g.overwrite);
        out << "|V_a|=" << r.size_a << " |V_b|=" << r.size_b << " |V_joint|=" << r.size_joint
            << " |O|=" << r.overlap_count << " (" << overlap::format_percentage(r.overlap_pct) << ")\n";
      };
    });
  }
  {
    auto& o = overlap3_args;
    auto* c = app.add_subcommand("overlap3", "Overlap of the overlaps for one base and two auxiliary vocabularies");
    auto* ob = c->add_option("--base", o.base)->check(CLI::ExistingFile);
    c->add_option("--aux1", o.aux1)->check(CLI::ExistingFile);
    c->add_option("--aux2", o.aux2)->check(CLI::ExistingFile);
    c->add_option("--counts", o.counts, "|o_ab| |o_ac| |oo| instead of vocabulary files")->expected(3)->excludes(ob);
    c->add_option("--out", o.report, "JSON report");
    c->callback([&] {
      if (o.counts.empty() && (o.base.empty() || o.aux1.empty() || o.aux2.empty()))
        throw CLI::ValidationError("overlap3", "give --base, --aux1 and --aux2, or --counts");
      action = [&] {
        const auto r = o.counts.empty()
                           ? overlap::compute_triple(vocab::read(o.base), vocab::read(o.aux1), vocab::read(o.aux2))
                           : overlap::compute_triple_from_counts(o.counts[0], o.counts[1], o.counts[2]);
        if (!o.report.empty()) io::write_file(o.report, dump(overlap::to_json(r)), g.overwrite);
        out << "|o_ab|=" << r.count_ab << " |o_ac|=" << r.count_ac << " |oo|=" << r.count_oo
            << " unique_ab=" << r.unique_ab << " unique_ac=" << r.unique_ac
            << " share_ab=" << overlap::format_share(r.share_ab) << " share_ac=" << overlap::format_share(r.share_ac)
            << "\n";
      };
    });
  }
  {
    auto& o = comp_size_args;
    auto* c = app.add_subcommand("comp-size", "Complementary tokenizer size |V_joint| - |V_base|");
    auto* oj = c->add_option("--joint", o.joint)->check(CLI::ExistingFile);
    c->add_option("--base", o.base)->check(CLI::ExistingFile);
    c->add_option("--sizes", o.sizes, "|V_joint| |V_base|")->expected(2)->excludes(oj);
    c->callback([&] {
      if (o.sizes.empty() && (o.joint.empty() || o.base.empty()))
        throw CLI::ValidationError("comp-size", "give --joint and --base, or --sizes");
      action = [&] {
        const auto n = o.sizes.empty() ? overlap::complementary_size(vocab::read(o.joint), vocab::read(o.base))
                                     : overlap::complementary_size(o.sizes[0], o.sizes[1]);
        out << n << "\n";
      };
    });
  }
  // --- datamix
  {
    auto& o = mix_args;
    auto* c = app.add_subcommand("mix", "Build mixed train/valid bitexts from a mix manifest");
    c->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
    c->add_option("--out,--out-dir", o.output, "Output directory")->required();
    c->callback([&] {
      action = [&] {
        auto m = datamix::load_manifest(o.manifest);
        if (g.seed) m.seed = *g.seed;
        const auto r = datamix::mix(m);
        datamix::write_mix(m, r, o.output, g.overwrite);
        spdlog::info("{} training and {} validation pairs -> {}", r.train.size(), r.valid.size(), o.output);
      };
    });
  }
  {
    auto& o = check_args;
    auto* c = app.add_subcommand("check-parallel", "Check that two files form a clean bitext");
    c->add_option("--src", o.src)->required()->check(CLI::ExistingFile);
    c->add_option("--trg", o.trg)->required()->check(CLI::ExistingFile);
    c->callback([&] {
      action = [&] {
        const auto d = datamix::check_parallel(datamix::BitextFiles{o.src, o.trg});
        for (const auto& item : d.items) {
          out << (item.severity == datamix::Diagnostic::Severity::kError ? "error" : "warning");
          if (!item.side.empty()) out << ' ' << item.side << ':' << item.line;
          out << ": " << item.message << "\n";
        }
        if (!d.ok()) {
          err << "vocab-lab: bitext check failed\n";
          action_code = kExitCheckFailed;
        } else {
          out << "ok\n";
        }
      };
    });
  }
  // --- metrics
  {
    auto& o = score_args;
    auto* c = app.add_subcommand("score", "Corpus BLEU/chrF and sentence chrF for one system output");
    c->add_option("--hyp", o.hyp)->required()->check(CLI::ExistingFile);
    c->add_option("--ref", o.ref)->required()->check(CLI::ExistingFile);
    c->add_option("--metric", o.metric, "bleu|chrf|both")->check(CLI::IsMember({"bleu", "chrf", "both"}));
    c->add_option("--model", o.model, "System name stored in the report");
    c->add_option("--out,--report", o.report, "JSON report");
    c->add_option("--per-sentence", o.per_sentence, "Sentence chrF, one value per line");
    c->add_option("--tokenize", o.tokenize, "BLEU tokenizer 13a|none")->check(CLI::IsMember({"13a", "none"}));
    c->add_option("--smooth", o.smooth, "BLEU smoothing exp|floor|add-k|none")
        ->check(CLI::IsMember({"exp", "floor", "add-k", "none"}));
    c->add_option("--bleu-order", o.bleu_order)->check(CLI::Range(1, 9));
    c->add_flag("--bleu-effective-order", o.bleu_eff);
    c->add_option("--chrf-order", o.char_order)->check(CLI::Range(1, 9));
    c->add_option("--chrf-beta", o.beta)->check(CLI::PositiveNumber);
    c->add_flag("--chrf-whitespace", o.chrf_ws);
    c->add_flag("--chrf-eps", o.chrf_eps, "Per-order eps smoothing instead of effective-order averaging");
    c->callback([&] {
      action = [&] {
        metrics::BleuParams bp;
        bp.max_order = o.bleu_order;
        bp.tokenizer = o.tokenize == "13a" ? metrics::BleuTokenizer::k13a : metrics::BleuTokenizer::kNone;
        bp.smoothing = o.smooth == "exp"     ? metrics::BleuSmoothing::kExp
                       : o.smooth == "floor" ? metrics::BleuSmoothing::kFloor
                       : o.smooth == "add-k" ? metrics::BleuSmoothing::kAddK
                                           : metrics::BleuSmoothing::kNone;
        bp.effective_order = o.bleu_eff;
        metrics::ChrfParams cp{o.char_order, o.beta, o.chrf_ws, o.chrf_eps};
        const auto pairs = metrics::make_pairs(io::read_lines(o.hyp), io::read_lines(o.ref));
        const auto r = metrics::score(pairs, metrics::parse_metric_set(o.metric), o.model, bp, cp, g.effective_workers());
        if (!o.report.empty()) io::write_file(o.report, dump(metrics::to_json(r)), g.overwrite);
        char buf[64];
        if (!o.per_sentence.empty()) {
          std::vector<std::string> lines;
          for (double v : r.sentence_chrf) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            lines.emplace_back(buf);
          }
          io::write_lines(o.per_sentence, lines, g.overwrite);
        }
        if (r.corpus_bleu) {
          std::snprintf(buf, sizeof buf, "%.2f", *r.corpus_bleu);
          out << "BLEU " << buf << "\n";
        }
        if (r.corpus_chrf) {
          std::snprintf(buf, sizeof buf, "%.2f", *r.corpus_chrf);
          out << "chrF " << buf << "\n";
        }
        out << r.signature << "\n";
      };
    });
  }
  {
    auto& o = report_args;
    auto* c = app.add_subcommand("report", "Aggregate score reports into mean/sd tables");
    c->add_option("--reports,--scores", o.reports, "Score report JSON files")->required()->check(CLI::ExistingFile);
    c->add_option("--out", o.table, "Results table TSV (- for stdout)");
    c->add_option("--plot", o.plot, "Plot-ready TSV");
    c->add_option("--svg", o.svg, "Bar chart");
    c->add_option("--svg-metric", o.svg_metric)->check(CLI::IsMember({"bleu", "chrf"}));
    c->callback([&] {
      action = [&] {
        std::vector<metrics::ScoreReport> rs;
        for (const auto& p : o.reports) {
          try {
            rs.push_back(metrics::score_report_from_json(json::parse(io::read_file(p))));
          } catch (const json::parse_error& e) {
            throw Error(ErrorKind::kParse, p + ": " + e.what());
          }
        }
        const auto rows = metrics::aggregate_by_model(rs);
        emit(o.table, metrics::results_table_tsv(rows), g, out);
        if (!o.plot.empty()) io::write_file(o.plot, metrics::plot_tsv(rows), g.overwrite);
        if (!o.svg.empty()) io::write_file(o.svg, metrics::bar_chart_svg(rows, o.svg_metric), g.overwrite);
      };
    });
  }
  // --- miner
  {
    auto& o = mine_args;
    auto* c = app.add_subcommand("mine", "Lines where system A beats system B by a chrF margin");
    c->add_option("--src", o.src)->required()->check(CLI::ExistingFile);
    c->add_option("--ref", o.ref)->required()->check(CLI::ExistingFile);
    c->add_option("--hyp-a", o.hyp_a)->required()->check(CLI::ExistingFile);
    c->add_option("--hyp-b", o.hyp_b)->required()->check(CLI::ExistingFile);
    c->add_option("--threshold", o.threshold)->capture_default_str();
    c->add_flag("--symmetric", o.symmetric, "Keep lines where either system wins by the margin");
    c->add_option("--out", o.output, "TSV of mined records")->required();
    c->add_option("--table", o.table, "Rendered example table (default <out>.txt)");
    c->add_option("--limit", o.limit, "Rows in the rendered table (0 = all)");
    c->add_option("--label-a", o.label_a);
    c->add_option("--label-b", o.label_b);
    c->callback([&] {
      action = [&] {
        miner::MineOptions opt;
        opt.threshold = o.threshold;
        opt.symmetric = o.symmetric;
        opt.workers = g.effective_workers();
        const auto recs = miner::mine_divergence_files(o.src, o.ref, o.hyp_a, o.hyp_b, opt);
        io::write_file(o.output, miner::to_tsv(recs), g.overwrite);
        io::write_file(o.table.empty() ? o.output + ".txt" : o.table, miner::render_examples(recs, o.limit, o.label_a, o.label_b),
                       g.overwrite);
        spdlog::info("{} lines with delta >= {}", recs.size(), o.threshold);
      };
    });
  }
  // --- pipeline
  for (const char* name : {"run", "comp-size-run"}) {
    const bool comp = std::string_view(name) == "comp-size-run";
    auto* c = app.add_subcommand(name, comp ? "Complementary-size experiment (joint run, retrain, disjoint run)"
                                            : "Run an experiment manifest end to end");
    auto& manifest = run_manifests.emplace_back();
    c->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
    c->callback([&, comp, &manifest = manifest] {
      action = [&, comp] {
        auto m = pipeline::load_manifest(manifest);
        if (g.seed) m.seed = *g.seed;
        if (g.workers_given || g.deterministic) m.workers = g.effective_workers();
        if (comp) {
          const auto r = pipeline::comp_size_experiment(m, g.overwrite);
          out << "joint=" << r.joint_size << " base=" << r.base_size << " target=" << r.target
              << " extracted=" << r.extracted << "\n";
        } else {
          const auto r = pipeline::run_experiment(m, g.overwrite);
          out << r.root.string() << ": src vocab " << r.src_vocab_size << ", trg vocab " << r.trg_vocab_size << "\n";
        }
      };
    });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(std::move(reversed));
    if (workers_opt->count() > 0) g.workers_given = true;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }
  if (!action) {
    err << app.help();
    return kExitUsage;
  }
  configure_logging(g.log_level, err);
  try {
    action();
  } catch (const std::exception& e) {
    err << "vocab-lab: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return action_code;
}

int dispatch(int argc, const char* const* argv) {
  return dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace vocablab::cli
