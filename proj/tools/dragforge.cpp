/*
 * Copyright 2026 The DragForge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// dragforge: command-line front end for the dataset and evaluation pipeline.
//
// Exit status: 0 success, 1 validation error, 2 I/O error, 3 embedding
// provider error. Logs go to stderr; data goes to files or stdout.

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dragforge/corpus.hpp"
#include "dragforge/dataset_builder.hpp"
#include "dragforge/dictionary.hpp"
#include "dragforge/error.hpp"
#include "dragforge/evaluation.hpp"
#include "dragforge/io.hpp"
#include "dragforge/prompting.hpp"
#include "dragforge/retrieval.hpp"

namespace fs = std::filesystem;
using namespace dragforge;

namespace {

struct CorpusFlags {
  std::string format;  // empty: infer from extension
  std::string src_lang = "zh";
  std::string tgt_lang = "en";
  std::string domain;

  void add(CLI::App* cmd) {
    cmd->add_option("--format", format, "Corpus format: tsv | jsonl (default: by extension)")
        ->check(CLI::IsMember({"tsv", "jsonl"}));
    cmd->add_option("--src-lang", src_lang, "Source language tag for TSV input")->capture_default_str();
    cmd->add_option("--tgt-lang", tgt_lang, "Target language tag for TSV input")->capture_default_str();
    cmd->add_option("--domain", domain, "Domain tag (IT, Law, Medical, ...)");
  }

  ParallelCorpus load(const fs::path& path) const {
    const auto fmt = format.empty() ? corpus_format_from_path(path) : parse_corpus_format(format);
    return load_parallel_corpus(path, fmt, LoadOptions{src_lang, tgt_lang, domain});
  }
};

struct DictFlags {
  bool whole_token = false;
  bool case_insensitive = false;

  void add(CLI::App* cmd) {
    cmd->add_flag("--whole-token", whole_token, "Match dictionary terms on token boundaries only");
    cmd->add_flag("--case-insensitive", case_insensitive, "Case-insensitive term matching");
  }

  SortedDictionary load(const fs::path& path) const {
    auto loaded = load_dictionary(path, MatchOptions{whole_token, case_insensitive});
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    return std::move(loaded.dictionary);
  }
};

void add_provider_flags(CLI::App* cmd, ProviderSettings& s) {
  cmd->add_option("--provider", s.kind, "Embedding provider: hash | http (http reads DRAGFORGE_EMBED_URL)")
      ->check(CLI::IsMember({"hash", "http"}))
      ->capture_default_str();
  cmd->add_option("--dim", s.dim, "Hash provider dimension")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--embed-seed", s.seed, "Hash provider seed")->capture_default_str();
  cmd->add_option("--ngram", s.max_ngram, "Hash provider max n-gram order")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--embed-batch", s.batch_size, "HTTP provider batch size")->capture_default_str();
  cmd->add_option("--max-retries", s.max_retries, "HTTP provider retries")->capture_default_str();
}

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    io::write_file_atomic(out_path, content);
  }
}

fs::path default_manifest(const std::string& out) { return fs::path(out + ".manifest.json"); }

// ------------------------------------------------------------------ commands

void add_filter(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("filter", "Drop pairs whose quality score is below a threshold");
  auto in = std::make_shared<std::string>();
  auto scores = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto rejected = std::make_shared<std::string>();
  auto threshold = std::make_shared<double>(80.0);
  auto corpus = std::make_shared<CorpusFlags>();
  cmd->add_option("--in", *in, "Input corpus")->required();
  cmd->add_option("--scores", *scores, "QE scores, JSONL {id, score}")->required();
  cmd->add_option("--out", *out, "Filtered corpus (JSONL)")->required();
  cmd->add_option("--rejected", *rejected, "Rejection report, JSONL {id, score, threshold}");
  cmd->add_option("--threshold", *threshold, "Keep pairs with score >= threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  corpus->add(cmd);
  cmd->callback([=, &action] {
    action = [=] {
      const auto c = corpus->load(*in);
      const auto result = quality_filter(c, io::read_score_jsonl(*scores), *threshold);
      io::OutputBatch batch;
      batch.add(*out, serialize_corpus(result.kept, corpus_format_from_path(*out)));
      if (!rejected->empty()) batch.add(*rejected, serialize_rejections(result.report));
      batch.commit();
      std::cerr << "kept " << result.kept.size() << " of " << c.size() << " pairs\n";
    };
  });
}

void add_split(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("split", "Seeded train / test / extra split");
  auto in = std::make_shared<std::string>();
  auto out_dir = std::make_shared<std::string>();
  auto train = std::make_shared<std::size_t>(0);
  auto test = std::make_shared<std::size_t>(0);
  auto seed = std::make_shared<std::uint64_t>(0);
  auto corpus = std::make_shared<CorpusFlags>();
  cmd->add_option("--in", *in, "Input corpus")->required();
  cmd->add_option("--train", *train, "Training pairs")->required();
  cmd->add_option("--test", *test, "Test pairs")->required();
  cmd->add_option("--seed", *seed, "Shuffle seed")->required();
  cmd->add_option("--out-dir", *out_dir, "Writes train.jsonl, test.jsonl, extra.jsonl")->required();
  corpus->add(cmd);
  cmd->callback([=, &action] {
    action = [=] {
      const auto splits = split_corpus(corpus->load(*in), *train, *test, *seed);
      const fs::path dir(*out_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create " + dir.string());
      io::OutputBatch batch;
      batch.add(dir / "train.jsonl", serialize_corpus(splits.train, CorpusFormat::kJsonl));
      batch.add(dir / "test.jsonl", serialize_corpus(splits.test, CorpusFormat::kJsonl));
      batch.add(dir / "extra.jsonl", serialize_corpus(splits.extra, CorpusFormat::kJsonl));
      batch.commit();
      std::cerr << "train " << splits.train.size() << ", test " << splits.test.size()
                << ", extra " << splits.extra.size() << "\n";
    };
  });
}

void add_rephrase(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("rephrase", "Replace source terms with dictionary target terms");
  auto dict = std::make_shared<std::string>();
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto stats = std::make_shared<std::string>();
  auto corpus = std::make_shared<CorpusFlags>();
  auto dflags = std::make_shared<DictFlags>();
  cmd->add_option("--dict", *dict, "Dictionary TSV")->required();
  cmd->add_option("--in", *in, "Input corpus")->required();
  cmd->add_option("--out", *out, "Rephrased corpus (.jsonl or .tsv)")->required();
  cmd->add_option("--stats", *stats, "Per-entry hit counts, JSONL {w_src, w_tgt, hits}");
  corpus->add(cmd);
  dflags->add(cmd);
  cmd->callback([=, &action] {
    action = [=] {
      const auto d = dflags->load(*dict);
      const auto result = rephrase_corpus(corpus->load(*in), d);
      io::OutputBatch batch;
      batch.add(*out, serialize_corpus(result.corpus, corpus_format_from_path(*out)));
      if (!stats->empty()) batch.add(*stats, serialize_rephrase_stats(result.stats, d));
      batch.commit();
      std::cerr << result.stats.total_replacements << " replacements in " << result.corpus.size()
                << " pairs\n";
    };
  });
}

void add_extract_prompt(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("extract-prompt", "Render the terminology-extraction prompt");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto limit = std::make_shared<std::size_t>(0);
  auto corpus = std::make_shared<CorpusFlags>();
  corpus->domain = "IT";
  cmd->add_option("--in", *in, "Input corpus")->required();
  cmd->add_option("--out", *out, "Output file (default: stdout)");
  cmd->add_option("--limit", *limit, "Use only the first N pairs (0 = all)");
  corpus->add(cmd);
  cmd->callback([=, &action] {
    action = [=] {
      const auto c = corpus->load(*in);
      std::vector<ParallelPair> pairs = c.pairs();
      if (*limit > 0 && pairs.size() > *limit) pairs.resize(*limit);
      write_or_print(*out, extraction_prompt(pairs, corpus->domain));
    };
  });
}

void add_build_index(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("build-index", "Embed a corpus into a vector index");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto side = std::make_shared<std::string>("source");
  auto batch_size = std::make_shared<std::size_t>(64);
  auto corpus = std::make_shared<CorpusFlags>();
  auto provider = std::make_shared<ProviderSettings>();
  cmd->add_option("--in", *in, "Corpus to index (normally the extra split)")->required();
  cmd->add_option("--out", *out, "Index file; pairs go to <out>.pairs.jsonl")->required();
  cmd->add_option("--side", *side, "Side to embed: source | target")
      ->check(CLI::IsMember({"source", "target"}))
      ->capture_default_str();
  cmd->add_option("--batch-size", *batch_size, "Texts per provider call")->capture_default_str();
  corpus->add(cmd);
  add_provider_flags(cmd, *provider);
  cmd->callback([=, &action] {
    action = [=] {
      const auto c = corpus->load(*in);
      auto p = make_provider(*provider);
      const auto index = build_index(c.pairs(), *p, parse_index_side(*side), *batch_size);
      save_index(index, *out);
      std::cerr << "indexed " << index.size() << " pairs, dim " << index.dim() << "\n";
    };
  });
}

void add_retrieve(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("retrieve", "Select few-shot examples for one query");
  auto index_path = std::make_shared<std::string>();
  auto query = std::make_shared<std::string>();
  auto exclude = std::make_shared<std::string>();
  auto k = std::make_shared<double>(0.7);
  auto n = std::make_shared<std::size_t>(2);
  auto provider = std::make_shared<ProviderSettings>();
  cmd->add_option("--index", *index_path, "Index file")->required();
  cmd->add_option("--query", *query, "Source sentence")->required();
  cmd->add_option("--k", *k, "Similarity threshold (strict)")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--n", *n, "Maximum number of examples")->capture_default_str();
  cmd->add_option("--exclude-id", *exclude, "Never return this pair id");
  add_provider_flags(cmd, *provider);
  cmd->callback([=, &action] {
    action = [=] {
      const auto index = load_index(*index_path);
      auto p = make_provider(*provider);
      SelectOptions opts{*k, *n, std::nullopt};
      if (!exclude->empty()) opts.exclude_id = *exclude;
      std::cout << example_set_to_json(select_examples(index, *query, *p, opts), index.provider_id());
    };
  });
}

struct DatasetFlags {
  std::string mode = "dict_none";
  std::string dict;
  std::string corpus;
  std::string index;
  std::string out;
  std::string manifest;
  std::string target_language;
  double k = 0.7;
  std::size_t n = 2;
  CorpusFlags corpus_flags;
  DictFlags dict_flags;
  ProviderSettings provider;

  void add(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "dict_none | dict_rephrasing | dict_instruction | dict_chain")
        ->check(CLI::IsMember({"dict_none", "dict_rephrasing", "dict_instruction", "dict_chain"}))
        ->capture_default_str();
    cmd->add_option("--dict", dict, "Dictionary TSV (required unless --mode dict_none)");
    cmd->add_option("--corpus", corpus, "Input corpus")->required();
    cmd->add_option("--out", out, "Output JSONL")->required();
    cmd->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");
    cmd->add_option("--target-language", target_language, "Override the instruction's target language");
    cmd->add_option("--k", k, "Similarity threshold (strict)")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--n", n, "Maximum number of few-shot examples")->capture_default_str();
    corpus_flags.add(cmd);
    dict_flags.add(cmd);
    add_provider_flags(cmd, provider);
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.mode = parse_dict_mode(mode);
    c.k = k;
    c.n = n;
    c.domain_tag = corpus_flags.domain;
    c.provider = provider;
    if (!target_language.empty()) c.target_language = target_language;
    return c;
  }

  void check_dict() const {
    if (dict.empty() && mode != "dict_none") {
      throw ValidationError("--dict is required for --mode " + mode);
    }
  }

  SortedDictionary load_dict() const {
    return dict.empty() ? SortedDictionary() : dict_flags.load(dict);
  }
};

void add_build_dataset(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("build-dataset", "Build the few-shot training dataset");
  auto f = std::make_shared<DatasetFlags>();
  auto exclude_self = std::make_shared<bool>(false);
  f->add(cmd);
  cmd->add_option("--index", f->index, "Vector index built from the extra split (required when --n > 0)");
  cmd->add_flag("--exclude-self", *exclude_self, "Never retrieve a pair as its own example");
  cmd->callback([=, &action] {
    f->check_dict();
    if (f->n > 0 && f->index.empty()) throw ValidationError("--index is required when --n > 0");
    action = [=] {
      auto config = f->config();
      config.exclude_self = *exclude_self;
      const auto corpus = f->corpus_flags.load(f->corpus);
      const auto dict = f->load_dict();
      std::optional<VectorIndex> index;
      std::unique_ptr<EmbeddingProvider> provider;
      if (config.n > 0) {
        index = load_index(f->index);
        provider = make_provider(config.provider);
      }
      const auto records = build_training_set(corpus, dict, index ? &*index : nullptr,
                                              provider.get(), config);
      const auto manifest = make_manifest("train", config, corpus, dict,
                                          index ? &*index : nullptr, records.size());
      io::OutputBatch batch;
      batch.add(f->out, serialize_records(records));
      batch.add(f->manifest.empty() ? default_manifest(f->out) : fs::path(f->manifest),
                manifest_to_json(manifest));
      batch.commit();
      std::cerr << "wrote " << records.size() << " records to " << f->out << "\n";
    };
  });
}

void add_build_testset(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("build-testset", "Build the test dataset with the training transformation");
  auto f = std::make_shared<DatasetFlags>();
  auto train_manifest = std::make_shared<std::string>();
  auto fewshot = std::make_shared<bool>(false);
  f->add(cmd);
  cmd->add_option("--train-manifest", *train_manifest, "Training manifest to check consistency against");
  cmd->add_flag("--fewshot", *fewshot, "Also retrieve few-shot examples for test prompts");
  cmd->add_option("--index", f->index, "Vector index (with --fewshot)");
  cmd->callback([=, &action] {
    f->check_dict();
    if (*fewshot && f->index.empty()) throw ValidationError("--index is required with --fewshot");
    action = [=] {
      auto config = f->config();
      config.test_fewshot = *fewshot;
      const auto corpus = f->corpus_flags.load(f->corpus);
      const auto dict = f->load_dict();
      std::optional<DatasetManifest> train;
      if (!train_manifest->empty()) train = read_manifest(*train_manifest);
      std::optional<VectorIndex> index;
      std::unique_ptr<EmbeddingProvider> provider;
      if (*fewshot && config.n > 0) {
        index = load_index(f->index);
        provider = make_provider(config.provider);
      }
      const auto records = build_test_set(corpus, dict, config, train ? &*train : nullptr,
                                          index ? &*index : nullptr, provider.get());
      const auto manifest = make_manifest("test", config, corpus, dict,
                                          index ? &*index : nullptr, records.size());
      io::OutputBatch batch;
      batch.add(f->out, serialize_records(records));
      batch.add(f->manifest.empty() ? default_manifest(f->out) : fs::path(f->manifest),
                manifest_to_json(manifest));
      batch.commit();
      std::cerr << "wrote " << records.size() << " test records to " << f->out << "\n";
    };
  });
}

void add_emit_config(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("emit-config", "Write the fine-tuning and inference run configuration");
  auto out = std::make_shared<std::string>();
  auto c = std::make_shared<TrainRunConfig>();
  cmd->add_option("--out", *out, "Output JSON")->required();
  cmd->add_option("--learning-rate", c->learning_rate)->capture_default_str();
  cmd->add_option("--batch-size", c->batch_size)->capture_default_str();
  cmd->add_option("--max-seq-len", c->max_seq_len)->capture_default_str();
  cmd->add_option("--weight-decay", c->weight_decay)->capture_default_str();
  cmd->add_option("--warmup-ratio", c->warmup_ratio)->capture_default_str();
  cmd->add_option("--lora-rank", c->lora_rank)->capture_default_str();
  cmd->add_option("--beam-width", c->beam_width)->capture_default_str();
  cmd->add_option("--temperature", c->temperature)->capture_default_str();
  cmd->add_option("--length-penalty", c->length_penalty)->capture_default_str();
  cmd->callback([=, &action] {
    c->validate();
    action = [=] { emit_train_config(*out, *c); };
  });
}

void add_evaluate(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("evaluate", "Score hypotheses against test-set references");
  struct Flags {
    std::string hyp, ref, dict, align, out, tokenizer, term_matching;
    std::string tgt_lang = "en";
    std::vector<std::string> external;
    bool smooth = false;
    bool strip_chain = false;
    std::size_t bin_width = 10;
    DictFlags dict_flags;
  };
  auto f = std::make_shared<Flags>();
  cmd->add_option("--hyp", f->hyp, "Hypotheses, JSONL {id, hypothesis}")->required();
  cmd->add_option("--ref", f->ref, "Test-set JSONL emitted by build-testset")->required();
  cmd->add_option("--dict", f->dict, "Dictionary for terminology success rate");
  cmd->add_option("--align", f->align, "Pharaoh alignments, one line per test record");
  cmd->add_option("--tgt-lang", f->tgt_lang, "Target language tag (selects defaults)")->capture_default_str();
  cmd->add_option("--tokenizer", f->tokenizer, "whitespace | char (default: by target language)")
      ->check(CLI::IsMember({"whitespace", "char"}));
  cmd->add_option("--term-matching", f->term_matching, "substring | whole_token (default: by target language)")
      ->check(CLI::IsMember({"substring", "whole_token"}));
  cmd->add_option("--external", f->external, "Extra per-id scores as name=path (JSONL {id, score})");
  cmd->add_flag("--smooth", f->smooth, "Add-one smoothing for higher-order BLEU precisions");
  cmd->add_flag("--strip-chain", f->strip_chain, "Strip chained term suffixes from hypotheses");
  cmd->add_option("--bin-width", f->bin_width, "Length histogram bin width")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--out", f->out, "Report JSON (default: stdout)");
  f->dict_flags.add(cmd);
  cmd->callback([=, &action] {
    for (const auto& e : f->external) {
      if (e.find('=') == std::string::npos) throw ValidationError("--external expects name=path, got '" + e + "'");
    }
    action = [=] {
      const auto refs = read_jsonl(f->ref);
      const auto hyps = read_hypotheses(f->hyp);
      const bool strip = f->strip_chain ||
                         (!refs.empty() && refs.front().meta.mode == DictMode::kChain);
      std::vector<EvalTriple> triples;
      triples.reserve(refs.size());
      for (const auto& r : refs) {
        const auto it = hyps.find(r.meta.id);
        if (it == hyps.end()) throw ValidationError("no hypothesis for id '" + r.meta.id + "'");
        triples.push_back({r.meta.id, r.meta.source.value_or(r.input),
                           strip ? strip_chain_suffix(it->second) : it->second,
                           strip_chain_suffix(r.output)});
      }
      const auto tok = f->tokenizer.empty() ? default_tokenizer_for(f->tgt_lang)
                                            : parse_tokenizer(f->tokenizer);
      EvalReport report;
      report.bleu = corpus_bleu(triples, tok, f->smooth);
      if (!f->dict.empty()) {
        const auto matching = f->term_matching.empty() ? default_term_matching_for(f->tgt_lang)
                                                       : parse_term_matching(f->term_matching);
        report.terms = term_success_rate(triples, f->dict_flags.load(f->dict), matching);
      }
      if (!f->align.empty()) {
        const auto links = parse_pharaoh(io::read_file(f->align));
        if (links.size() != triples.size()) {
          throw ValidationError(f->align + ": " + std::to_string(links.size()) +
                                " alignment lines for " + std::to_string(triples.size()) + " records");
        }
        std::map<std::string, Alignment> by_id;
        for (std::size_t i = 0; i < triples.size(); ++i) by_id[triples[i].id] = links[i];
        report.utw = utw_rate(triples, by_id);
      }
      std::vector<std::string> hyp_texts, ref_texts;
      for (const auto& t : triples) {
        hyp_texts.push_back(t.hypothesis);
        ref_texts.push_back(t.reference);
      }
      report.hyp_lengths = length_distribution(hyp_texts, tok, f->bin_width);
      report.ref_lengths = length_distribution(ref_texts, tok, f->bin_width);
      for (const auto& e : f->external) {
        const auto eq = e.find('=');
        report.external[e.substr(0, eq)] = ingest_external_scores(e.substr(eq + 1));
      }
      write_or_print(f->out, report_to_json(report));
    };
  });
}

void add_stats(CLI::App& app, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("stats", "Corpus statistics");
  auto in = std::make_shared<std::vector<std::string>>();
  auto out = std::make_shared<std::string>();
  auto corpus = std::make_shared<CorpusFlags>();
  cmd->add_option("--in", *in, "One or more corpora; exactly three are read as train, test, extra")->required();
  cmd->add_option("--out", *out, "Output JSON (default: stdout)");
  corpus->add(cmd);
  cmd->callback([=, &action] {
    action = [=] {
      if (in->size() == 3) {
        SplitResult s{corpus->load((*in)[0]), corpus->load((*in)[1]), corpus->load((*in)[2])};
        write_or_print(*out, stats_to_json(corpus_stats(s)));
        return;
      }
      std::vector<ParallelPair> all;
      for (const auto& p : *in) {
        const auto c = corpus->load(p);
        all.insert(all.end(), c.begin(), c.end());
      }
      write_or_print(*out, stats_to_json(corpus_stats(ParallelCorpus(std::move(all), corpus->domain))));
    };
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dragforge: dictionary- and retrieval-augmented MT dataset toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::function<void()> action;
  add_filter(app, action);
  add_split(app, action);
  add_rephrase(app, action);
  add_extract_prompt(app, action);
  add_build_index(app, action);
  add_retrieve(app, action);
  add_build_dataset(app, action);
  add_build_testset(app, action);
  add_emit_config(app, action);
  add_evaluate(app, action);
  add_stats(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }

  try {
    if (action) action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
