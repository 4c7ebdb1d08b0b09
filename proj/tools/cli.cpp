#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "vfsl/baselines.hpp"
#include "vfsl/csv.hpp"
#include "vfsl/harness.hpp"
#include "vfsl/interpret.hpp"
#include "vfsl/model_io.hpp"
#include "vfsl/report.hpp"
#include "vfsl/sim_mapper.hpp"
#include "vfsl/similarity.hpp"
#include "vfsl/threads.hpp"
#include "vfsl/vfeb.hpp"

namespace vfsl::cli {
namespace {

namespace fs = std::filesystem;

enum class FileKind { Vfeb, Csv };

FileKind kind_of(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".vfeb") return FileKind::Vfeb;
  if (ext == ".csv") return FileKind::Csv;
  throw Error(ErrorCode::InvalidArgument,
              "cannot infer format of '" + path.string() + "' (expected .vfeb or .csv)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty list '" + text + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    T value{};
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::InvalidArgument, std::string("bad ") + what + " '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  const auto text = read_file(path);
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

std::string format_scores_csv(const ScoreMatrix& scores) {
  std::string out = "item";
  for (std::size_t c = 0; c < scores.matrix.cols(); ++c) out += ",class_" + std::to_string(c);
  out += "\n";
  for (std::size_t i = 0; i < scores.matrix.rows(); ++i) {
    out += std::to_string(i);
    for (double v : scores.matrix.row(i)) {
      char buf[32];
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out += ',';
      out.append(buf, ptr);
    }
    out += "\n";
  }
  return out;
}

struct ConvertOptions {
  std::string input, output;
  bool header = false;
};

struct NormalizeOptions {
  std::string input, output;
};

struct SimOptions {
  std::string images, prompts, output;
};

struct FitOptions {
  std::string input, labels, method = "sim", out, prompts;
  double lambda = 1.0;
  double smoothing = 1.0;
  std::size_t num_classes = 0;
};

struct PredictOptions {
  std::string model, input, labels_out, scores_out;
};

struct EvalOptions {
  std::string features, labels, prompts, method = "sim", shots = "16", seeds = "1,2,3";
  std::string format = "csv", dataset, test_features, test_labels, output;
  double lambda = 1.0;
  double smoothing = 1.0;
};

struct InterpretOptions {
  std::string model, format = "markdown", class_names, prompts, output;
  std::size_t top_k = 4;
};

struct SynthOptions {
  SyntheticSpec spec;
  std::string out;
};

void do_convert(const ConvertOptions& o) {
  const auto from = kind_of(o.input);
  const auto to = kind_of(o.output);
  if (from == to) throw Error(ErrorCode::InvalidArgument, "convert needs one .csv and one .vfeb");
  if (from == FileKind::Csv) {
    write_vfeb(read_csv(o.input, o.header), o.output);
  } else {
    write_csv(read_vfeb(o.input), o.output);
  }
}

void do_normalize(const NormalizeOptions& o) { write_vfeb(l2_normalize(read_vfeb(o.input)), o.output); }

void do_sim(const SimOptions& o) {
  const auto sims = similarity_matrix(read_vfeb(o.images), read_vfeb(o.prompts));
  write_vfeb(to_embedding(sims), o.output);
}

void do_fit(const FitOptions& o) {
  const auto method = parse_method(o.method);
  const auto input = read_vfeb(o.input);
  const auto labels = read_labels(o.labels, o.num_classes);
  if (labels.size() != input.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(input.rows()) + " input rows but " +
                    std::to_string(labels.size()) + " labels");
  }

  std::string digest = "unknown";
  std::optional<std::vector<std::string>> prompt_names;
  if (!o.prompts.empty()) {
    const auto prompts = read_vfeb(o.prompts);
    digest = prompt_bank_digest(prompts);
    prompt_names = prompts.names;
    if (method != Method::Centroids && prompts.rows() != input.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "prompt bank has " + std::to_string(prompts.rows()) +
                      " rows but the similarity matrix has " + std::to_string(input.cols()) +
                      " columns");
    }
  }

  StoredModel stored;
  switch (method) {
    case Method::SiM: {
      auto sims = as_similarity(input);
      sims.prompt_names = prompt_names;
      stored = make_stored(fit(sims, labels, SolverConfig{o.lambda}), digest);
      break;
    }
    case Method::OneToOne:
      stored = make_stored(fit_flm(as_similarity(input), labels), digest);
      break;
    case Method::BLM:
      stored = make_stored(fit_blm(as_similarity(input), labels, o.smoothing), digest);
      break;
    case Method::Centroids: {
      ShotSet shots;
      shots.labels = labels;
      shots.indices.resize(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) shots.indices[i] = i;
      stored = make_stored(fit_centroids(input, shots), digest);
      break;
    }
  }
  save_model(stored, o.out);
}

void do_predict(const PredictOptions& o, std::ostream& out) {
  const auto stored = load_model(o.model);
  const auto scores = score_any(stored, read_vfeb(o.input));
  emit(o.labels_out, format_labels(predict(scores)), out);
  if (!o.scores_out.empty()) write_file(o.scores_out, format_scores_csv(scores));
}

void do_eval(const EvalOptions& o, std::ostream& out) {
  const auto features = read_vfeb(o.features);
  const auto labels = read_labels(o.labels);
  const auto prompts = read_vfeb(o.prompts);
  std::optional<EmbeddingMatrix> test_features;
  std::optional<LabelVector> test_labels;
  if (o.test_features.empty() != o.test_labels.empty()) {
    throw Error(ErrorCode::InvalidArgument, "--test-features and --test-labels go together");
  }
  if (!o.test_features.empty()) {
    test_features = read_vfeb(o.test_features);
    test_labels = read_labels(o.test_labels, labels.num_classes);
  }

  std::vector<EvalReport> reports;
  const auto shots = parse_list<std::size_t>(o.shots, "shot count");
  const auto seeds = parse_list<std::uint64_t>(o.seeds, "seed");
  for (std::size_t s : shots) {
    for (const auto& name : split_list(o.method)) {
      TaskSpec task;
      task.shots_per_class = s;
      task.seeds = seeds;
      task.method = parse_method(name);
      task.lambda = o.lambda;
      task.smoothing = o.smoothing;
      task.dataset = o.dataset.empty() ? fs::path(o.features).stem().string() : o.dataset;
      reports.push_back(test_features
                            ? evaluate(task, features, labels, prompts, *test_features, *test_labels)
                            : evaluate(task, features, labels, prompts));
    }
  }
  emit(o.output, emit_report(reports, parse_report_format(o.format)), out);
}

void do_interpret(const InterpretOptions& o, std::ostream& out) {
  const auto stored = load_model(o.model);
  const auto* mapping = std::get_if<MappingModel>(&stored.model);
  if (mapping == nullptr) {
    throw Error(ErrorCode::InvalidArgument,
                "interpret needs a sim model, got '" +
                    std::string(to_string(stored.meta.method)) + "'");
  }
  MappingModel model = *mapping;
  if (!o.prompts.empty()) {
    const auto prompts = read_vfeb(o.prompts);
    if (!prompts.names) throw Error(ErrorCode::InvalidArgument, "prompt bank has no row names");
    if (prompts.rows() != model.num_prompts()) {
      throw Error(ErrorCode::NameCountMismatch, "prompt bank size differs from the model's K");
    }
    model.prompt_names = prompts.names;
  }
  std::optional<std::vector<std::string>> class_names;
  if (!o.class_names.empty()) class_names = read_lines(o.class_names);
  const auto explanations = explain(model, o.top_k, class_names);
  emit(o.output, render_explanations(explanations, parse_explanation_format(o.format)), out);
}

void do_synth(const SynthOptions& o) {
  const auto data = generate_synthetic(o.spec);
  write_vfeb(data.features, o.out + ".features.vfeb");
  write_labels(data.labels, o.out + ".labels.txt");
  write_vfeb(data.prompts, o.out + ".prompts.vfeb");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vocabulary-free few-shot classification from similarity scores", "vfsl"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  ConvertOptions convert;
  auto* c = app.add_subcommand("convert", "Convert between CSV and VFEB (direction from extensions)");
  c->add_option("-i,--input", convert.input, "Input .csv or .vfeb")->required();
  c->add_option("-o,--output", convert.output, "Output .vfeb or .csv")->required();
  c->add_flag("--header", convert.header, "CSV input has a header row (a 'name' column holds row names)");

  NormalizeOptions normalize;
  auto* n = app.add_subcommand("normalize", "L2-normalize every row of a VFEB file");
  n->add_option("-i,--input", normalize.input, "Input .vfeb")->required();
  n->add_option("-o,--output", normalize.output, "Output .vfeb")->required();

  SimOptions sim;
  auto* s = app.add_subcommand("sim", "Similarity matrix between images and prompts");
  s->add_option("--images", sim.images, "Normalized image features (.vfeb)")->required();
  s->add_option("--prompts", sim.prompts, "Normalized prompt embeddings (.vfeb)")->required();
  s->add_option("-o,--output", sim.output, "Output N x K similarity matrix (.vfeb)")->required();

  FitOptions fit_opts;
  auto* f = app.add_subcommand("fit", "Fit a mapping on labelled shots");
  f->add_option("-i,--input", fit_opts.input,
                "Shot similarities (.vfeb); normalized features for --method centroids")
      ->required();
  f->add_option("-l,--labels", fit_opts.labels, "Labels file, one class index per line")->required();
  f->add_option("-m,--method", fit_opts.method, "sim | flm | blm | centroids")->capture_default_str();
  f->add_option("--lambda", fit_opts.lambda, "Ridge regularization weight (sim)")->capture_default_str();
  f->add_option("--smoothing", fit_opts.smoothing, "Laplace smoothing (blm)")->capture_default_str();
  f->add_option("--num-classes", fit_opts.num_classes, "Number of classes (default: max label + 1)");
  f->add_option("--prompts", fit_opts.prompts, "Prompt bank (.vfeb) for names and digest");
  f->add_option("-o,--out", fit_opts.out, "Model prefix; writes <prefix>.vfeb and <prefix>.json")
      ->required();

  PredictOptions predict_opts;
  auto* p = app.add_subcommand("predict", "Predict labels for test items");
  p->add_option("--model", predict_opts.model, "Model prefix")->required();
  p->add_option("-i,--input", predict_opts.input,
                "Test similarities (.vfeb); normalized features for centroid models")
      ->required();
  p->add_option("--labels-out", predict_opts.labels_out, "Predicted labels file (default: stdout)");
  p->add_option("--scores-out", predict_opts.scores_out, "Class scores CSV");

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "Few-shot evaluation protocol over seeds");
  e->add_option("--features", eval.features, "Normalized item features (.vfeb)")->required();
  e->add_option("--labels", eval.labels, "Labels file aligned with --features")->required();
  e->add_option("--prompts", eval.prompts, "Normalized prompt embeddings (.vfeb)")->required();
  e->add_option("-m,--method", eval.method, "Comma list of sim, flm, blm, centroids")
      ->capture_default_str();
  e->add_option("--shots", eval.shots, "Comma list of shots per class")->capture_default_str();
  e->add_option("--seeds", eval.seeds, "Comma list of seeds")->capture_default_str();
  e->add_option("--lambda", eval.lambda, "Ridge regularization weight (sim)")->capture_default_str();
  e->add_option("--smoothing", eval.smoothing, "Laplace smoothing (blm)")->capture_default_str();
  e->add_option("--format", eval.format, "csv | json | markdown")->capture_default_str();
  e->add_option("--dataset", eval.dataset, "Dataset tag (default: features file stem)");
  e->add_option("--test-features", eval.test_features, "Separate test features (.vfeb)");
  e->add_option("--test-labels", eval.test_labels, "Labels for --test-features");
  e->add_option("-o,--output", eval.output, "Report file (default: stdout)");

  InterpretOptions interpret;
  auto* t = app.add_subcommand("interpret", "Rank prompts by learned weight per class");
  t->add_option("--model", interpret.model, "SiM model prefix")->required();
  t->add_option("-k,--top-k", interpret.top_k, "Prompts kept per class")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  t->add_option("--format", interpret.format, "markdown | json")->capture_default_str();
  t->add_option("--class-names", interpret.class_names, "Class names, one per line");
  t->add_option("--prompts", interpret.prompts, "Prompt bank (.vfeb) supplying row names");
  t->add_option("-o,--output", interpret.output, "Report file (default: stdout)");

  SynthOptions synth;
  auto* y = app.add_subcommand("synth", "Generate a synthetic clustered dataset and prompt bank");
  y->add_option("--classes", synth.spec.num_classes, "Number of classes")->capture_default_str();
  y->add_option("--dim", synth.spec.dim, "Embedding dimension")->capture_default_str();
  y->add_option("--prompts", synth.spec.prompts, "Number of random prompts")->capture_default_str();
  y->add_option("--shots", synth.spec.shots, "Shot items per class")->capture_default_str();
  y->add_option("--test-per-class", synth.spec.test_per_class, "Test items per class")
      ->capture_default_str();
  y->add_option("--spread", synth.spec.cluster_spread, "Angular spread (radians)")
      ->capture_default_str();
  y->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
  y->add_option("-o,--out", synth.out,
                "Prefix; writes .features.vfeb, .labels.txt and .prompts.vfeb")
      ->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("vfsl");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: UsageError: " << ex.what() << "\n";
    return kUsageExit;
  }

  try {
    configure_threads_from_env();
    if (c->parsed()) do_convert(convert);
    else if (n->parsed()) do_normalize(normalize);
    else if (s->parsed()) do_sim(sim);
    else if (f->parsed()) do_fit(fit_opts);
    else if (p->parsed()) do_predict(predict_opts, out);
    else if (e->parsed()) do_eval(eval, out);
    else if (t->parsed()) do_interpret(interpret, out);
    else if (y->parsed()) do_synth(synth);
  } catch (const Error& ex) {
    err << "error: " << to_string(ex.code()) << ": " << ex.what() << "\n";
    return kErrorExitBase + static_cast<int>(ex.code());
  } catch (const std::exception& ex) {
    err << "error: Internal: " << ex.what() << "\n";
    return kInternalExit;
  }
  return 0;
}

}  // namespace vfsl::cli
