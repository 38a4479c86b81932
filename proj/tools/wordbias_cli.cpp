#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wordbias/bias_gradient.hpp"
#include "wordbias/error.hpp"
#include "wordbias/harness.hpp"
#include "wordbias/influence.hpp"
#include "wordbias/parallel.hpp"
#include "wordbias/ppmi.hpp"
#include "wordbias/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wordbias;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CorpusArgs {
  std::string path;
  std::string separator = "blank";
  std::size_t min_len = 1;
  std::size_t max_len = SIZE_MAX;

  void add_to(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--corpus", path, "corpus text file");
    if (required) opt->required();
    app->add_option("--separator", separator, "record separator: blank (blank lines) or line")
        ->check(CLI::IsMember({"blank", "line"}));
    app->add_option("--min-len", min_len, "drop documents with fewer tokens");
    app->add_option("--max-len", max_len, "drop documents with more tokens");
  }
  CorpusOptions options() const {
    return {min_len, max_len, separator == "line" ? RecordSeparator::kLine : RecordSeparator::kBlankLine};
  }
  Corpus load() const { return load_corpus(path, options()); }
  json to_json() const { return {{"corpus", path}, {"separator", separator}, {"min_len", min_len}}; }
};

struct HyperArgs {
  Hyperparams h;
  void add_to(CLI::App* app) {
    app->add_option("--dim", h.dim, "embedding dimension")->capture_default_str();
    app->add_option("--epochs", h.epochs, "training epochs")->capture_default_str();
    app->add_option("--seed", h.seed, "random seed")->capture_default_str();
    app->add_option("--alpha", h.alpha, "weighting exponent")->capture_default_str();
    app->add_option("--x-max", h.x_max, "weighting cutoff")->capture_default_str();
    app->add_option("--lr", h.learning_rate, "AdaGrad learning rate")->capture_default_str();
  }
  json to_json() const {
    return {{"dim", h.dim},     {"epochs", h.epochs},       {"seed", h.seed},        {"alpha", h.alpha},
            {"x_max", h.x_max}, {"learning_rate", h.learning_rate}, {"window", h.window}};
  }
};

std::vector<GloveModel> load_models(const std::vector<std::string>& paths, const Vocabulary& vocab) {
  std::vector<GloveModel> models;
  for (const auto& p : paths) models.push_back(load_embeddings(p, vocab));
  return models;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      sizes.push_back(std::stoul(item));
    } catch (const std::logic_error&) {
      throw Error("invalid size '" + item + "' in --sizes");
    }
  }
  if (sizes.empty()) throw Error("--sizes is empty");
  return sizes;
}

std::vector<PerturbationSet> load_sets(const std::vector<std::string>& paths) {
  std::vector<PerturbationSet> sets;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) sets.push_back(load_perturbation_set(f));
    } else {
      sets.push_back(load_perturbation_set(p));
    }
  }
  return sets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus-to-bias attribution for GloVe embeddings"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (0: all cores)")->capture_default_str();

  // vocab
  CorpusArgs vocab_corpus;
  std::uint64_t min_count = 5;
  std::string vocab_out, index_out;
  auto* vocab_cmd = app.add_subcommand("vocab", "build a vocabulary from a corpus");
  vocab_corpus.add_to(vocab_cmd);
  vocab_cmd->add_option("--min-count", min_count, "minimum token count")->capture_default_str();
  vocab_cmd->add_option("--out", vocab_out, "vocabulary file")->required();
  vocab_cmd->add_option("--index", index_out, "also write the document index here");

  // cooc
  CorpusArgs cooc_corpus;
  std::string cooc_vocab, cooc_out;
  std::uint32_t cooc_window = 8;
  auto* cooc_cmd = app.add_subcommand("cooc", "count windowed co-occurrences");
  cooc_corpus.add_to(cooc_cmd);
  cooc_cmd->add_option("--vocab", cooc_vocab, "vocabulary file")->required();
  cooc_cmd->add_option("--window", cooc_window, "symmetric window size")->capture_default_str();
  cooc_cmd->add_option("--out", cooc_out, "binary co-occurrence file")->required();

  // train
  HyperArgs train_hyper;
  std::string train_cooc, train_vocab, train_out;
  auto* train_cmd = app.add_subcommand("train", "train GloVe embeddings");
  train_cmd->add_option("--cooc", train_cooc, "co-occurrence file")->required();
  train_cmd->add_option("--vocab", train_vocab, "vocabulary file")->required();
  train_cmd->add_option("--out", train_out, "embedding text file (sidecar written next to it)")->required();
  train_hyper.add_to(train_cmd);
  train_cmd->add_option("--window", train_hyper.h.window, "window the co-occurrences were counted with")
      ->capture_default_str();

  // weat
  std::vector<std::string> weat_models;
  std::string weat_spec, weat_out, weat_cooc, weat_vocab;
  bool weat_population = false;
  auto* weat_cmd = app.add_subcommand("weat", "WEAT effect size of one or more models");
  weat_cmd->add_option("--models,--model", weat_models, "embedding files")->required();
  weat_cmd->add_option("--spec", weat_spec, "WEAT word lists")->required();
  weat_cmd->add_option("--vocab", weat_vocab, "bind models to this vocabulary");
  weat_cmd->add_option("--ppmi-cooc", weat_cooc, "also report the PPMI effect size of this co-occurrence file");
  weat_cmd->add_flag("--population-std", weat_population, "population instead of sample standard deviation");
  weat_cmd->add_option("--out", weat_out, "JSON output");

  // scan
  CorpusArgs scan_corpus;
  std::string scan_vocab, scan_cooc, scan_spec, scan_out, scan_method = "influence", scan_hist;
  std::vector<std::string> scan_models, scan_sets;
  std::uint32_t scan_window = 8;
  double scan_damping = 0.0, scan_ppmi_alpha = 1.0;
  std::size_t scan_bins = 50;
  auto* scan_cmd = app.add_subcommand("scan", "differential bias of removing each document (or each set)");
  scan_corpus.add_to(scan_cmd);
  scan_cmd->add_option("--vocab", scan_vocab, "vocabulary file")->required();
  scan_cmd->add_option("--cooc", scan_cooc, "co-occurrence file")->required();
  scan_cmd->add_option("--models", scan_models, "baseline embedding files (influence method)");
  scan_cmd->add_option("--spec", scan_spec, "WEAT word lists")->required();
  scan_cmd->add_option("--method", scan_method, "influence or ppmi")
      ->check(CLI::IsMember({"influence", "ppmi"}))
      ->capture_default_str();
  scan_cmd->add_option("--window", scan_window, "co-occurrence window")->capture_default_str();
  scan_cmd->add_option("--damping", scan_damping, "absolute Hessian damping")->capture_default_str();
  scan_cmd->add_option("--ppmi-alpha", scan_ppmi_alpha, "PPMI context smoothing exponent")->capture_default_str();
  scan_cmd->add_option("--sets", scan_sets, "approximate these perturbation sets instead of single documents");
  scan_cmd->add_option("--histogram", scan_hist, "also write a histogram CSV");
  scan_cmd->add_option("--bins", scan_bins, "histogram bins")->capture_default_str();
  scan_cmd->add_option("--out", scan_out, "CSV output")->required();

  // perturb
  std::string perturb_scan, perturb_sizes = "10,30,100", perturb_out;
  std::size_t perturb_random = 1;
  std::uint64_t perturb_seed = 7;
  auto* perturb_cmd = app.add_subcommand("perturb", "build increase/random/decrease perturbation sets");
  perturb_cmd->add_option("--scan", perturb_scan, "scan CSV")->required();
  perturb_cmd->add_option("--sizes", perturb_sizes, "comma-separated set sizes")->capture_default_str();
  perturb_cmd->add_option("--random", perturb_random, "random sets per size")->capture_default_str();
  perturb_cmd->add_option("--seed", perturb_seed, "random set seed")->capture_default_str();
  perturb_cmd->add_option("--out", perturb_out, "output directory")->required();

  // validate
  CorpusArgs validate_corpus;
  HyperArgs validate_hyper;
  std::string validate_vocab, validate_spec, validate_out;
  std::vector<std::string> validate_sets;
  std::size_t validate_seeds = 3;
  std::uint32_t validate_window = 8;
  auto* validate_cmd = app.add_subcommand("validate", "ground truth: retrain without each set");
  validate_corpus.add_to(validate_cmd);
  validate_cmd->add_option("--vocab", validate_vocab, "vocabulary (frozen across perturbations)")->required();
  validate_cmd->add_option("--set,--sets", validate_sets, "perturbation set files or directories")->required();
  validate_cmd->add_option("--spec", validate_spec, "WEAT word lists")->required();
  validate_cmd->add_option("--seeds", validate_seeds, "retraining seeds per set")->capture_default_str();
  validate_cmd->add_option("--window", validate_window, "co-occurrence window")->capture_default_str();
  validate_hyper.h.seed = 1000;
  validate_hyper.add_to(validate_cmd);
  validate_cmd->add_option("--out", validate_out, "JSON output")->required();

  // report
  std::string report_approx, report_baseline, report_out, report_csv;
  std::vector<std::string> report_truth;
  auto* report_cmd = app.add_subcommand("report", "compare approximations with ground truth");
  report_cmd->add_option("--approx", report_approx, "set approximation CSV from scan --sets")->required();
  report_cmd->add_option("--truth", report_truth, "ground-truth JSON files from validate")->required();
  report_cmd->add_option("--baseline", report_baseline, "baseline WEAT JSON from weat --out (default: from --approx)");
  report_cmd->add_option("--csv-dir", report_csv, "write means/differential CSVs here");
  report_cmd->add_option("--out", report_out, "JSON output")->required();

  // gradient
  std::string grad_cooc, grad_model, grad_spec, grad_vocab, grad_out;
  double grad_damping = 0.0;
  auto* grad_cmd = app.add_subcommand("gradient", "bias gradient with respect to the co-occurrences");
  grad_cmd->add_option("--cooc", grad_cooc, "co-occurrence file")->required();
  grad_cmd->add_option("--model", grad_model, "embedding file")->required();
  grad_cmd->add_option("--vocab", grad_vocab, "vocabulary file")->required();
  grad_cmd->add_option("--spec", grad_spec, "WEAT word lists")->required();
  grad_cmd->add_option("--damping", grad_damping, "absolute Hessian damping")->capture_default_str();
  grad_cmd->add_option("--out", grad_out, "CSV output")->required();

  // analogy
  std::string analogy_model, analogy_questions;
  auto* analogy_cmd = app.add_subcommand("analogy", "top-1 analogy accuracy");
  analogy_cmd->add_option("--model", analogy_model, "embedding file")->required();
  analogy_cmd->add_option("--questions", analogy_questions, "analogy questions")->required();

  // synth
  std::string synth_spec, synth_out;
  SyntheticOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with a planted WEAT association");
  synth_cmd->add_option("--spec", synth_spec, "WEAT word lists")->required();
  synth_cmd->add_option("--docs", synth.n_docs, "documents")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--stereotype", synth.p_stereotype, "stereotypical lean probability")->capture_default_str();
  synth_cmd->add_option("--counter", synth.p_counter, "counter-stereotypical lean probability")->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "corpus file")->required();

  CLI11_PARSE(app, argc, argv);
  if (threads == 0) threads = default_threads();

  try {
    if (*vocab_cmd) {
      const auto corpus = vocab_corpus.load();
      const auto vocab = build_vocabulary(corpus, min_count);
      save_vocabulary(vocab_out, vocab);
      if (!index_out.empty()) {
        auto out = open_out(index_out);
        write_document_index(out, corpus);
      }
      std::cout << "documents " << corpus.size() << ", tokens " << corpus.token_count() << ", vocabulary "
                << vocab.size() << '\n';
    } else if (*cooc_cmd) {
      const auto vocab = load_vocabulary(cooc_vocab);
      const auto x = extract_cooc(cooc_corpus.load(), vocab, cooc_window);
      save_cooc(cooc_out, x);
      auto config = cooc_corpus.to_json();
      config["vocab"] = cooc_vocab;
      config["window"] = cooc_window;
      config["vocab_hash"] = vocab.hash();
      config["nnz"] = x.nnz();
      write_json(cooc_out + ".json", config);
      std::cout << "nonzeros " << x.nnz() << ", total weight " << x.total_weight() << '\n';
    } else if (*train_cmd) {
      const auto vocab = load_vocabulary(train_vocab);
      const auto x = load_cooc(train_cooc);
      if (x.vocab_size() != vocab.size()) throw Error("co-occurrence matrix and vocabulary sizes differ");
      TrainOptions opts;
      opts.on_epoch = [](int epoch, double l) { std::cerr << "epoch " << epoch << " loss " << l << '\n'; };
      auto model = train(x, train_hyper.h, opts);
      model.vocab_hash = vocab.hash();
      save_embeddings(train_out, model, vocab);
      std::cout << "checksum " << checksum(model) << '\n';
    } else if (*weat_cmd) {
      const auto spec = load_weat_spec(weat_spec);
      const WeatOptions opts{weat_population ? StdDev::kPopulation : StdDev::kSample};
      std::vector<double> values;
      json models = json::array();
      std::optional<Vocabulary> vocab;
      if (!weat_vocab.empty()) vocab = load_vocabulary(weat_vocab);
      for (const auto& path : weat_models) {
        auto loaded = load_embeddings(path);
        if (vocab && loaded.vocab.hash() != vocab->hash()) throw Error(path + ": vocabulary hash mismatch");
        const double e = weat_effect_size(loaded.model.w, resolve(spec, loaded.vocab), opts);
        values.push_back(e);
        models.push_back({{"path", path}, {"effect_size", e}, {"checksum", checksum(loaded.model)}});
        std::cout << path << '\t' << fmt(e) << '\n';
      }
      const auto summary = SampleSummary::of(values);
      json out{{"spec", spec.name},
               {"spec_path", weat_spec},
               {"std_dev", weat_population ? "population" : "sample"},
               {"models", models},
               {"values", summary.values},
               {"mean", summary.mean},
               {"std", summary.std ? json(*summary.std) : json(nullptr)}};
      if (!weat_cooc.empty()) {
        if (!vocab) throw Error("--ppmi-cooc needs --vocab");
        const double p = ppmi_weat(build_ppmi(load_cooc(weat_cooc)), resolve(spec, *vocab), opts);
        out["ppmi_effect_size"] = p;
        std::cout << "ppmi\t" << fmt(p) << '\n';
      }
      std::cout << "mean " << fmt(summary.mean) << '\n';
      if (!weat_out.empty()) write_json(weat_out, out);
    } else if (*scan_cmd) {
      const auto corpus = scan_corpus.load();
      const auto vocab = load_vocabulary(scan_vocab);
      const auto x = load_cooc(scan_cooc);
      if (x.vocab_size() != vocab.size()) throw Error("co-occurrence matrix and vocabulary sizes differ");
      const auto spec = resolve(load_weat_spec(scan_spec), vocab);
      const auto docs = encode(corpus, vocab);
      json config = scan_corpus.to_json();
      config.update({{"vocab", scan_vocab},
                     {"cooc", scan_cooc},
                     {"spec", scan_spec},
                     {"method", scan_method},
                     {"window", scan_window},
                     {"models", scan_models},
                     {"damping", scan_damping}});
      if (scan_method == "ppmi") config["ppmi_alpha"] = scan_ppmi_alpha;

      std::vector<GloveModel> models;
      std::vector<WeatInfluence> influence;
      if (scan_method == "influence") {
        if (scan_models.empty()) throw Error("the influence method needs --models");
        models = load_models(scan_models, vocab);
        for (const auto& m : models) influence.emplace_back(x, m, spec, scan_damping);
      }
      const ScanOptions opts{scan_window, scan_damping, threads};
      auto out = open_out(scan_out);
      out << "# config: " << config.dump() << '\n';
      if (!scan_sets.empty()) {
        if (scan_method != "influence") throw Error("--sets is only supported by the influence method");
        const auto baseline = bias_summary(models, spec);
        out << "set,kind,size,delta_b_mean,delta_b_std,n_seeds,baseline_mean,approx_bias,large_perturbation\n";
        for (const auto& set : load_sets(scan_sets)) {
          const auto a = differential_bias_of_set(set.doc_ids, docs, influence, opts);
          out << set.name << ',' << to_string(set.kind) << ',' << set.doc_ids.size() << ',' << fmt(a.mean) << ','
              << (a.std ? fmt(*a.std) : "") << ',' << a.per_seed.size() << ',' << fmt(baseline.mean) << ','
              << fmt(baseline.mean - a.mean) << ',' << (a.large_perturbation ? 1 : 0) << '\n';
        }
      } else {
        const auto records = scan_method == "ppmi"
                                 ? ppmi_diff_scan(docs, x, spec, scan_window, {scan_ppmi_alpha}, threads)
                                 : differential_bias_scan(docs, influence, opts);
        write_scan_csv(out, records, scan_method);
        if (!scan_hist.empty()) {
          auto hist = open_out(scan_hist);
          write_histogram_csv(hist, records, scan_bins);
        }
        std::size_t errors = 0;
        for (const auto& r : records) errors += !r.ok();
        std::cout << "documents " << records.size() << ", errors " << errors << '\n';
      }
    } else if (*perturb_cmd) {
      std::ifstream in(perturb_scan);
      if (!in) throw Error("cannot read " + perturb_scan);
      const auto records = read_scan_csv(in);
      const auto sets = make_perturbation_sets(records, parse_sizes(perturb_sizes), perturb_random, perturb_seed);
      fs::create_directories(perturb_out);
      for (const auto& s : sets) {
        auto j = to_json(s);
        j["config"] = {{"scan", perturb_scan}, {"sizes", perturb_sizes}, {"random", perturb_random},
                       {"seed", perturb_seed}};
        write_json(fs::path(perturb_out) / (s.name + ".json"), j);
      }
      std::cout << sets.size() << " sets written to " << perturb_out << '\n';
    } else if (*validate_cmd) {
      const auto corpus = validate_corpus.load();
      const auto vocab = load_vocabulary(validate_vocab);
      const auto spec = resolve(load_weat_spec(validate_spec), vocab);
      Hyperparams h = validate_hyper.h;
      h.window = validate_window;
      json results = json::array();
      for (const auto& set : load_sets(validate_sets)) {
        const auto truth = ground_truth(corpus, vocab, set.doc_ids, spec, h, validate_seeds, h.seed, threads);
        results.push_back({{"name", set.name},
                           {"kind", to_string(set.kind)},
                           {"size", set.doc_ids.size()},
                           {"values", truth.values},
                           {"mean", truth.mean},
                           {"std", truth.std ? json(*truth.std) : json(nullptr)}});
        std::cout << set.name << '\t' << fmt(truth.mean) << '\n';
      }
      auto config = validate_corpus.to_json();
      config.update(validate_hyper.to_json());
      config.update({{"vocab", validate_vocab}, {"spec", validate_spec}, {"seeds", validate_seeds},
                     {"window", validate_window}});
      write_json(validate_out, {{"config", config}, {"sets", results}});
    } else if (*report_cmd) {
      ExperimentReport report;
      std::map<std::string, SetResult> by_name;
      std::vector<std::string> order;
      std::optional<double> baseline_from_approx;
      {
        std::ifstream in(report_approx);
        if (!in) throw Error("cannot read " + report_approx);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line.starts_with("#") || line.starts_with("set,")) continue;
          std::vector<std::string> f;
          std::stringstream ss(line);
          std::string field;
          while (std::getline(ss, field, ',')) f.push_back(field);
          if (f.size() < 9) throw Error(report_approx + ": expected 9 fields in '" + line + "'");
          SetResult r;
          r.set.name = f[0];
          r.set.kind = parse_set_kind(f[1]);
          r.set.doc_ids.resize(std::stoul(f[2]));
          r.approx_delta.mean = std::stod(f[3]);
          if (!f[4].empty()) r.approx_delta.std = std::stod(f[4]);
          r.approx_bias = std::stod(f[7]);
          r.large_perturbation = f[8] == "1";
          baseline_from_approx = std::stod(f[6]);
          order.push_back(r.set.name);
          by_name[r.set.name] = std::move(r);
        }
      }
      for (const auto& path : report_truth) {
        const auto truth = read_json(path);
        for (const auto& s : truth.at("sets")) {
          const auto it = by_name.find(s.at("name").get<std::string>());
          if (it == by_name.end()) throw Error(path + ": set '" + s.at("name").get<std::string>() + "' has no approximation");
          it->second.truth = SampleSummary::of(s.at("values").get<std::vector<double>>());
        }
      }
      if (!report_baseline.empty()) {
        const auto b = read_json(report_baseline);
        report.weat = b.value("spec", "");
        report.baseline = SampleSummary::of(b.at("values").get<std::vector<double>>());
      } else if (baseline_from_approx) {
        report.baseline = SampleSummary::of({*baseline_from_approx});
      }
      for (const auto& name : order) report.sets.push_back(by_name[name]);
      finalize_report(report);
      report.config = {{"approx", report_approx}, {"truth", report_truth}, {"baseline", report_baseline}};
      write_json(report_out, to_json(report));
      if (!report_csv.empty()) {
        fs::create_directories(report_csv);
        auto means = open_out(fs::path(report_csv) / "means.csv");
        auto diffs = open_out(fs::path(report_csv) / "differential.csv");
        means << "set,kind,approx_bias,truth_mean,truth_std,baseline_mean\n";
        diffs << "set,kind,approx_delta,truth_delta\n";
        for (const auto& s : report.sets) {
          if (!s.truth) continue;
          means << s.set.name << ',' << to_string(s.set.kind) << ',' << fmt(s.approx_bias) << ','
                << fmt(s.truth->mean) << ',' << (s.truth->std ? fmt(*s.truth->std) : "") << ','
                << fmt(report.baseline.mean) << '\n';
          diffs << s.set.name << ',' << to_string(s.set.kind) << ',' << fmt(s.approx_delta.mean) << ','
                << fmt(report.baseline.mean - s.truth->mean) << '\n';
        }
      }
      if (report.r2) std::cout << "r2 " << fmt(*report.r2) << '\n';
      for (const auto& s : report.sets) {
        if (s.welch) std::cout << s.set.name << "\tt " << fmt(s.welch->t) << "\tp " << fmt(s.welch->p) << '\n';
      }
    } else if (*grad_cmd) {
      const auto vocab = load_vocabulary(grad_vocab);
      const auto x = load_cooc(grad_cooc);
      const auto model = load_embeddings(grad_model, vocab);
      const auto spec = resolve(load_weat_spec(grad_spec), vocab);
      const WeatInfluence inf(x, model, spec, grad_damping);
      auto out = open_out(grad_out);
      out << "# config: "
          << json{{"cooc", grad_cooc}, {"model", grad_model}, {"spec", grad_spec}, {"damping", grad_damping}}.dump()
          << '\n';
      write_gradient_csv(out, bias_gradient(inf));
    } else if (*analogy_cmd) {
      const auto loaded = load_embeddings(analogy_model);
      std::ifstream in(analogy_questions);
      if (!in) throw Error("cannot read " + analogy_questions);
      const auto r = analogy_eval(loaded.model.w, loaded.vocab, in);
      std::cout << "accuracy " << fmt(r.accuracy) << " (" << r.correct << "/" << r.attempted << ", skipped "
                << r.skipped << ")\n";
    } else if (*synth_cmd) {
      open_out(synth_out) << synthetic_corpus(load_weat_spec(synth_spec), synth);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
