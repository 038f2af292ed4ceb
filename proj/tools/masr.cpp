// Copyright 2026 The masr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: corpus generation, the five-step modular training
// workflow, OOV extension, and reporting. Every command prints one
// machine-readable summary line and exits 0 on success, 2 on usage errors,
// 3 on data errors, 4 on stage violations, and 5 on numeric failures.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "masr/checkpoint.hpp"
#include "masr/config.hpp"
#include "masr/corpus.hpp"
#include "masr/error.hpp"
#include "masr/eval.hpp"
#include "masr/pipeline.hpp"
#include "masr/psd.hpp"
#include "masr/toygen.hpp"

namespace {

using namespace masr;

using KV = std::vector<std::pair<std::string, std::string>>;

std::string format_summary(const std::string& cmd, const std::string& status, const KV& kv) {
  std::ostringstream os;
  os << "masr-summary\tcmd=" << cmd << "\tstatus=" << status;
  for (const auto& [k, v] : kv) os << "\t" << k << "=" << v;
  return os.str();
}

// Printed to stdout and mirrored into the output directory so every artifact
// carries its seed and config hash.
void emit_summary(const std::string& cmd, const std::string& out_dir, const KV& kv) {
  const std::string line = format_summary(cmd, "ok", kv);
  std::cout << line << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir + "/" + cmd + ".summary.txt", std::ios::trunc);
    f << line << "\n";
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  int64_t seed_flag = -1;

  void attach(CLI::App* cmd, bool out_required = true) {
    cmd->add_option("--config", config_path, "key=value config file");
    cmd->add_option("--set", sets, "config override key=value (repeatable)")
        ->type_name("KEY=VALUE");
    cmd->add_option("--seed", seed_flag, "seed override");
    auto* o = cmd->add_option("--out", out_dir, "output directory");
    if (out_required) o->required();
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& s : sets) {
      const size_t eq = s.find('=');
      if (eq == std::string::npos) throw DataError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed_flag >= 0) cfg.seed = static_cast<uint64_t>(seed_flag);
    return cfg;
  }
};

TrainOptions to_opts(const RunConfig& cfg, const StageTrainConfig& stage) {
  TrainOptions o;
  o.epochs = stage.epochs;
  o.lr = stage.lr;
  o.clip_norm = cfg.clip_norm;
  o.dev_limit = cfg.dev_limit;
  o.seed = cfg.seed;
  o.max_decode_len = cfg.max_decode_len;
  o.require_tdi = cfg.require_tdi;
  return o;
}

KV base_kv(const RunConfig& cfg) {
  return {{"seed", std::to_string(cfg.seed)}, {"config", cfg.hash()}};
}

// ---------------------------------------------------------------------------

int cmd_gen_corpus(const CommonArgs& common) {
  RunConfig cfg = common.resolve();
  generate_toy_corpus(cfg, common.out_dir);
  KV kv = base_kv(cfg);
  kv.push_back({"dir", common.out_dir});
  kv.push_back({"train", std::to_string(cfg.gen.train_utterances)});
  kv.push_back({"test", std::to_string(cfg.gen.test_utterances)});
  emit_summary("gen-corpus", common.out_dir, kv);
  return 0;
}

int cmd_train_a2p(const CommonArgs& common, const std::string& corpus_dir) {
  RunConfig cfg = common.resolve();
  Lexicon lex = Lexicon::load(corpus_dir + "/lexicon.txt");
  CorpusBundle train = CorpusBundle::load(corpus_dir + "/train.feats", corpus_dir + "/train.txt");
  CorpusBundle dev = CorpusBundle::load(corpus_dir + "/dev.feats", corpus_dir + "/dev.txt");

  std::filesystem::create_directories(common.out_dir);
  TrainLog log(common.out_dir + "/a2p_train.log.tsv");
  A2pTrainResult r = train_a2p(train, dev, lex, cfg.a2p_arch, to_opts(cfg, cfg.train_a2p), log);

  CheckpointMeta meta{StageTag::kA2p, cfg.psd, cfg.seed, cfg.hash()};
  const std::string path = common.out_dir + "/a2p.ckpt";
  save_a2p_checkpoint(path, r.model, meta);

  KV kv = base_kv(cfg);
  kv.push_back({"checkpoint", path});
  kv.push_back({"epochs", std::to_string(r.stats.epochs)});
  kv.push_back({"skipped_infeasible", std::to_string(r.stats.skipped_infeasible)});
  kv.push_back({"train_loss", fmt(r.stats.final_train_loss)});
  kv.push_back({"dev_per", fmt(r.stats.final_dev_metric)});
  emit_summary("train-a2p", common.out_dir, kv);
  return 0;
}

int cmd_init_p2w(const CommonArgs& common, const std::string& corpus_dir,
                 const std::string& variant_name, const std::string& vocab_path,
                 int vocab_min_count, const std::string& text_path,
                 const std::string& text_dev_path, bool random_init) {
  RunConfig cfg = common.resolve();
  Lexicon lex = Lexicon::load(corpus_dir + "/lexicon.txt");
  const Corpus text =
      load_transcripts(text_path.empty() ? corpus_dir + "/text.txt" : text_path);
  const Corpus text_dev =
      load_transcripts(text_dev_path.empty() ? corpus_dir + "/text_dev.txt" : text_dev_path);

  Vocabulary word_vocab;
  if (!vocab_path.empty()) {
    word_vocab = Vocabulary::load(vocab_path);
  } else if (vocab_min_count >= 0) {
    word_vocab = cut_vocabulary(load_transcripts(corpus_dir + "/train.txt"), vocab_min_count);
  } else {
    word_vocab = Vocabulary::load(corpus_dir + "/vocab_word.txt");
  }

  std::filesystem::create_directories(common.out_dir);
  TrainLog log(common.out_dir + "/p2w_tdi.log.tsv");
  P2wTrainResult r =
      init_p2w_tdi(text, text_dev, lex, word_vocab, variant_from_string(variant_name),
                   cfg.p2w_arch, cfg.s2s_arch, to_opts(cfg, cfg.train_tdi), random_init, log);

  CheckpointMeta meta{r.stage, cfg.psd, cfg.seed, cfg.hash()};
  const std::string path = common.out_dir +
                           (r.stage == StageTag::kP2wFresh ? "/p2w_fresh.ckpt" : "/p2w_tdi.ckpt");
  save_p2w_checkpoint(path, r.model, meta);

  KV kv = base_kv(cfg);
  kv.push_back({"checkpoint", path});
  kv.push_back({"variant", variant_name});
  kv.push_back({"stage", to_string(r.stage)});
  kv.push_back({"vocab_size", std::to_string(r.model.word_vocab().size())});
  kv.push_back({"epochs", std::to_string(r.stats.epochs)});
  kv.push_back({"oracle_dev_wer", fmt(r.stats.final_dev_metric)});
  emit_summary("init-p2w", common.out_dir, kv);
  return 0;
}

int cmd_finetune_p2w(const CommonArgs& common, const std::string& corpus_dir,
                     const std::string& a2p_path, const std::string& p2w_path) {
  RunConfig cfg = common.resolve();
  Lexicon lex = Lexicon::load(corpus_dir + "/lexicon.txt");
  (void)lex;  // fine-tuning runs on acoustic transcripts only
  CorpusBundle train = CorpusBundle::load(corpus_dir + "/train.feats", corpus_dir + "/train.txt");
  CorpusBundle dev = CorpusBundle::load(corpus_dir + "/dev.feats", corpus_dir + "/dev.txt");

  CheckpointMeta a2p_meta;
  A2pModel a2p = load_a2p_checkpoint(a2p_path, &a2p_meta);
  CheckpointMeta p2w_meta;
  P2wModel p2w = load_p2w_checkpoint(p2w_path, &p2w_meta);

  std::filesystem::create_directories(common.out_dir);
  TrainLog log(common.out_dir + "/p2w_finetune.log.tsv");
  StageTag stage = p2w_meta.stage;
  TrainStats stats =
      finetune_p2w(p2w, stage, a2p, train, dev, cfg.psd, to_opts(cfg, cfg.train_ft), log);

  CheckpointMeta meta{stage, cfg.psd, cfg.seed, cfg.hash()};
  const std::string path = common.out_dir + "/p2w_finetuned.ckpt";
  save_p2w_checkpoint(path, p2w, meta);

  KV kv = base_kv(cfg);
  kv.push_back({"checkpoint", path});
  kv.push_back({"stage", to_string(stage)});
  kv.push_back({"epochs", std::to_string(stats.epochs)});
  kv.push_back({"skipped_infeasible", std::to_string(stats.skipped_infeasible)});
  kv.push_back({"dev_wer", fmt(stats.final_dev_metric)});
  emit_summary("finetune-p2w", common.out_dir, kv);
  return 0;
}

// The acoustic-to-word property holds by construction here: this command
// reads exactly two checkpoints and a feature archive. No lexicon, text
// corpus, or vocabulary file is accepted.
int cmd_decode(const CommonArgs& common, const std::string& a2p_path,
               const std::string& p2w_path, const std::string& feats_path,
               double lambda_flag) {
  RunConfig cfg = common.resolve();
  CheckpointMeta a2p_meta;
  A2pModel a2p = load_a2p_checkpoint(a2p_path, &a2p_meta);
  CheckpointMeta p2w_meta;
  P2wModel p2w = load_p2w_checkpoint(p2w_path, &p2w_meta);

  if (p2w_meta.stage == StageTag::kP2wFresh) {
    throw StageError("decode: p2w checkpoint is untrained (stage p2w-fresh); "
                     "expected p2w-tdi or later");
  }
  std::string warn;
  if (p2w_meta.stage == StageTag::kP2wTdi) {
    warn = "no-finetune";
    std::cerr << "masr: warning: decoding with a p2w-tdi checkpoint that was never "
                 "fine-tuned on acoustic posteriors\n";
  }
  if (p2w.phoneme_vocab().fingerprint() != a2p.phoneme_vocab.fingerprint()) {
    throw DataError("decode: phoneme vocabulary fingerprints differ; "
                    "checkpoints do not compose");
  }

  PsdConfig psd = p2w_meta.psd;  // recorded at fine-tuning time
  if (lambda_flag == lambda_flag && lambda_flag != -1.0) psd.lambda = lambda_flag;

  const std::vector<Utterance> utts = load_feature_archive(feats_path);
  Corpus hyps;
  hyps.reserve(utts.size());
  for (const auto& u : utts) {
    hyps.push_back(ids_to_words(
        decode_modular(a2p, p2w, u.feats, psd, cfg.max_decode_len), p2w.word_vocab()));
  }
  std::filesystem::create_directories(common.out_dir);
  const std::string hyp_path = common.out_dir + "/hyp.txt";
  save_transcripts(hyp_path, hyps);

  KV kv = base_kv(cfg);
  kv.push_back({"hyp", hyp_path});
  kv.push_back({"utterances", std::to_string(utts.size())});
  kv.push_back({"lambda", fmt(psd.lambda)});
  if (!warn.empty()) kv.push_back({"warning", warn});
  emit_summary("decode", common.out_dir, kv);
  return 0;
}

int cmd_eval(const CommonArgs& common, const std::string& refs_path,
             const std::string& hyps_path, const std::string& split_vocab_path) {
  RunConfig cfg = common.resolve();
  const Corpus refs = load_transcripts(refs_path);
  const Corpus hyps = load_transcripts(hyps_path);

  WerReport report;
  if (!split_vocab_path.empty()) {
    Vocabulary split = Vocabulary::load(split_vocab_path);
    report = score_corpus(refs, hyps, &split);
  } else {
    report = score_corpus(refs, hyps);
  }

  std::filesystem::create_directories(common.out_dir);
  {
    std::ofstream tsv(common.out_dir + "/wer.tsv", std::ios::trunc);
    tsv << report.to_tsv();
    std::ofstream table(common.out_dir + "/wer.txt", std::ios::trunc);
    table << report.to_table();
  }
  std::cout << report.to_table();

  KV kv = base_kv(cfg);
  kv.push_back({"wer", fmt(report.all.wer())});
  if (report.split_present) {
    kv.push_back({"ivs_wer", fmt(report.ivs.wer())});
    kv.push_back({"oovs_wer", fmt(report.oovs.wer())});
  }
  kv.push_back({"sentences", std::to_string(report.all.sentences)});
  emit_summary("eval", common.out_dir, kv);
  return 0;
}

int cmd_extend_oov(const CommonArgs& common, const std::string& corpus_dir,
                   const std::string& a2p_path, const std::string& p2w_path,
                   const std::string& strategy_name, const std::string& oov_text_path) {
  RunConfig cfg = common.resolve();
  Lexicon lex = Lexicon::load(corpus_dir + "/lexicon.txt");
  CorpusBundle train = CorpusBundle::load(corpus_dir + "/train.feats", corpus_dir + "/train.txt");
  const Corpus oov_text =
      load_transcripts(oov_text_path.empty() ? corpus_dir + "/text_oov.txt" : oov_text_path);

  CheckpointMeta a2p_meta;
  A2pModel a2p = load_a2p_checkpoint(a2p_path, &a2p_meta);
  CheckpointMeta p2w_meta;
  P2wModel p2w = load_p2w_checkpoint(p2w_path, &p2w_meta);

  std::filesystem::create_directories(common.out_dir);
  TrainLog log(common.out_dir + "/p2w_oov.log.tsv");
  StageTag stage = p2w_meta.stage;
  const OovStrategy strategy = strategy_from_string(strategy_name);

  TrainOptions opts = to_opts(cfg, cfg.train_oov);
  if (strategy == OovStrategy::kAlternative) opts.epochs = cfg.oov_rounds;
  TrainStats stats =
      extend_oov(p2w, stage, a2p, strategy, train, oov_text, lex, p2w_meta.psd, opts, log);

  CheckpointMeta meta{stage, p2w_meta.psd, cfg.seed, cfg.hash()};
  const std::string path = common.out_dir + "/p2w_oov.ckpt";
  save_p2w_checkpoint(path, p2w, meta);

  KV kv = base_kv(cfg);
  kv.push_back({"checkpoint", path});
  kv.push_back({"strategy", strategy_name});
  kv.push_back({"vocab_size", std::to_string(p2w.word_vocab().size())});
  kv.push_back({"stage", to_string(stage)});
  kv.push_back({"epochs", std::to_string(stats.epochs)});
  kv.push_back({"steps", std::to_string(stats.steps)});
  emit_summary("extend-oov", common.out_dir, kv);
  return 0;
}

int cmd_psd_report(const CommonArgs& common, const std::string& a2p_path,
                   const std::string& feats_path, std::vector<double> lambdas) {
  RunConfig cfg = common.resolve();
  if (lambdas.empty()) lambdas = {3.0, 8.0, 15.0};
  A2pModel a2p = load_a2p_checkpoint(a2p_path);

  const std::vector<Utterance> utts = load_feature_archive(feats_path);
  std::vector<Matrix> posts;
  int64_t total_frames = 0;
  posts.reserve(utts.size());
  for (const auto& u : utts) {
    posts.push_back(a2p.forward(u.feats));
    total_frames += u.feats.rows;
  }
  const std::vector<int64_t> kept =
      frame_retention_curve(posts, lambdas, cfg.psd.min_keep);

  std::filesystem::create_directories(common.out_dir);
  const std::string report = retention_report_tsv(lambdas, kept, total_frames);
  {
    std::ofstream f(common.out_dir + "/psd_report.tsv", std::ios::trunc);
    f << report;
  }
  std::cout << report;

  KV kv = base_kv(cfg);
  kv.push_back({"total_frames", std::to_string(total_frames)});
  for (size_t i = 0; i < lambdas.size(); ++i) {
    kv.push_back({"kept@" + fmt(lambdas[i]), std::to_string(kept[i])});
  }
  emit_summary("psd-report", common.out_dir, kv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modular acoustic-to-word speech recognition at toy scale"};
  app.require_subcommand(1);

  CommonArgs gen_args;
  auto* gen = app.add_subcommand("gen-corpus", "generate the synthetic toy corpus");
  gen_args.attach(gen);

  CommonArgs a2p_args;
  std::string a2p_corpus;
  auto* a2p = app.add_subcommand("train-a2p", "train the acoustic-to-phoneme network (CTC)");
  a2p_args.attach(a2p);
  a2p->add_option("--corpus", a2p_corpus, "corpus directory")->required();

  CommonArgs init_args;
  std::string init_corpus, init_variant = "ctc", init_vocab, init_text, init_text_dev;
  int init_vocab_min_count = -1;
  bool init_random = false;
  auto* init = app.add_subcommand("init-p2w", "text-data initialization of the P2W network");
  init_args.attach(init);
  init->add_option("--corpus", init_corpus, "corpus directory")->required();
  init->add_option("--variant", init_variant, "p2w criterion: ctc or s2s");
  init->add_option("--vocab", init_vocab, "word vocabulary file (default: corpus vocab)");
  init->add_option("--vocab-min-count", init_vocab_min_count,
                   "cut the vocabulary to words occurring more than N times in train.txt");
  init->add_option("--text", init_text, "text corpus (default: corpus text.txt)");
  init->add_option("--text-dev", init_text_dev, "held-out text (default: corpus text_dev.txt)");
  init->add_flag("--random-init", init_random, "skip TDI; emit an untrained p2w-fresh checkpoint");

  CommonArgs ft_args;
  std::string ft_corpus, ft_a2p, ft_p2w;
  auto* ft = app.add_subcommand("finetune-p2w", "fine-tune P2W on PSD-downsampled A2P posteriors");
  ft_args.attach(ft);
  ft->add_option("--corpus", ft_corpus, "corpus directory")->required();
  ft->add_option("--a2p", ft_a2p, "a2p checkpoint")->required();
  ft->add_option("--p2w", ft_p2w, "p2w checkpoint")->required();

  CommonArgs dec_args;
  std::string dec_a2p, dec_p2w, dec_feats;
  double dec_lambda = -1.0;
  auto* dec = app.add_subcommand("decode", "composed acoustic-to-word decoding");
  dec_args.attach(dec);
  dec->add_option("--a2p", dec_a2p, "a2p checkpoint")->required();
  dec->add_option("--p2w", dec_p2w, "p2w checkpoint")->required();
  dec->add_option("--features", dec_feats, "feature archive")->required();
  dec->add_option("--lambda", dec_lambda, "PSD threshold override");

  CommonArgs eval_args;
  std::string eval_refs, eval_hyps, eval_split;
  auto* eva = app.add_subcommand("eval", "word error rate scoring");
  eval_args.attach(eva);
  eva->add_option("--refs", eval_refs, "reference transcripts")->required();
  eva->add_option("--hyps", eval_hyps, "hypothesis transcripts")->required();
  eva->add_option("--split-vocab", eval_split, "vocabulary for the IVS/OOVS split");

  CommonArgs oov_args;
  std::string oov_corpus, oov_a2p, oov_p2w, oov_strategy = "alternative", oov_text;
  auto* oov = app.add_subcommand("extend-oov", "extend the vocabulary with P2W-only retraining");
  oov_args.attach(oov);
  oov->add_option("--corpus", oov_corpus, "corpus directory")->required();
  oov->add_option("--a2p", oov_a2p, "a2p checkpoint")->required();
  oov->add_option("--p2w", oov_p2w, "p2w checkpoint (p2w-finetuned)")->required();
  oov->add_option("--strategy", oov_strategy, "direct, alternative, or multimodal");
  oov->add_option("--oov-text", oov_text, "extension text (default: corpus text_oov.txt)");

  CommonArgs psd_args;
  std::string psd_a2p, psd_feats;
  std::vector<double> psd_lambdas;
  auto* psd = app.add_subcommand("psd-report", "frame retention counts per PSD threshold");
  psd_args.attach(psd);
  psd->add_option("--a2p", psd_a2p, "a2p checkpoint")->required();
  psd->add_option("--features", psd_feats, "feature archive")->required();
  psd->add_option("--lambdas", psd_lambdas, "ascending thresholds (default 3 8 15)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(masr::ExitCode::kUsage);
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (gen->parsed()) return cmd_gen_corpus(gen_args);
    if (a2p->parsed()) return cmd_train_a2p(a2p_args, a2p_corpus);
    if (init->parsed())
      return cmd_init_p2w(init_args, init_corpus, init_variant, init_vocab,
                          init_vocab_min_count, init_text, init_text_dev, init_random);
    if (ft->parsed()) return cmd_finetune_p2w(ft_args, ft_corpus, ft_a2p, ft_p2w);
    if (dec->parsed()) return cmd_decode(dec_args, dec_a2p, dec_p2w, dec_feats, dec_lambda);
    if (eva->parsed()) return cmd_eval(eval_args, eval_refs, eval_hyps, eval_split);
    if (oov->parsed())
      return cmd_extend_oov(oov_args, oov_corpus, oov_a2p, oov_p2w, oov_strategy, oov_text);
    if (psd->parsed()) return cmd_psd_report(psd_args, psd_a2p, psd_feats, psd_lambdas);
  } catch (const masr::Error& e) {
    std::cout << format_summary(cmd, "error",
                                {{"code", std::to_string(static_cast<int>(e.code()))},
                                 {"msg", e.what()}})
              << "\n";
    std::cerr << "masr: error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "masr: error: " << e.what() << "\n";
    return static_cast<int>(masr::ExitCode::kData);
  }
  return static_cast<int>(masr::ExitCode::kUsage);
}
