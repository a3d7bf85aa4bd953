// rsnlabel: label resting-state fMRI ICA components with a compact MLP.
//
// Subcommands: synth, ingest, train, predict, ablate, project, bench.
// Exit codes: 0 success, 2 usage/data error, 3 internal error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "rsn/ablation.hpp"
#include "rsn/dataset.hpp"
#include "rsn/error.hpp"
#include "rsn/eval.hpp"
#include "rsn/mlp.hpp"
#include "rsn/nifti_io.hpp"
#include "rsn/taxonomy.hpp"
#include "rsn/volume_ops.hpp"

namespace fs = std::filesystem;
using rsn::cli::RunManifest;

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::string lowercase(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string> list_nifti_files(const std::string& dir) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir))
    rsn::fail(rsn::errc::empty_input, "not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".nii") || name.ends_with(".nii.gz"))
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    rsn::fail(rsn::errc::empty_input, "no .nii/.nii.gz files in " + dir);
  return files;
}

struct SynthOptions {
  std::string taxonomy_path;
  std::string out_dir;
  int subjects = 20;
  std::string grid = "24,24,24";
  double blob_sigma = 1.5;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "synth";
  manifest.seed = opt.seed;
  manifest.inputs = {opt.taxonomy_path};
  manifest.config = {{"taxonomy", opt.taxonomy_path},
                     {"subjects", opt.subjects},
                     {"grid", opt.grid},
                     {"blob_sigma", opt.blob_sigma},
                     {"noise", opt.noise_sigma},
                     {"seed", opt.seed},
                     {"out", opt.out_dir}};

  const auto grid_values = parse_int_list(opt.grid);
  if (grid_values.size() != 3)
    rsn::fail(rsn::errc::bad_dims, "--grid expects nx,ny,nz");
  const std::array<int, 3> grid{grid_values[0], grid_values[1], grid_values[2]};

  const rsn::Taxonomy taxonomy = rsn::Taxonomy::from_file(opt.taxonomy_path);
  const auto stacks = rsn::synth_generate(taxonomy, grid, opt.subjects,
                                          opt.blob_sigma, opt.noise_sigma,
                                          opt.seed);
  fs::create_directories(opt.out_dir);
  for (const rsn::ComponentStack& stack : stacks) {
    const std::string path =
        (fs::path(opt.out_dir) / (stack.subject_id + ".nii")).string();
    rsn::nifti::write_stack(stack, path);
    manifest.outputs.push_back(path);
  }
  manifest.write((fs::path(opt.out_dir) / "manifest.json").string());
  std::cout << "wrote " << stacks.size() << " subject stacks ("
            << taxonomy.num_components() << " components each) to "
            << opt.out_dir << "\n";
  return 0;
}

struct IngestOptions {
  std::string in_dir;
  std::string taxonomy_path;
  std::string out_path;
  bool standardize = false;
};

int cmd_ingest(const IngestOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "ingest";
  manifest.config = {{"in", opt.in_dir},
                     {"taxonomy", opt.taxonomy_path},
                     {"out", opt.out_path},
                     {"standardize", opt.standardize}};
  manifest.format_versions["RSND"] = 1;

  const rsn::Taxonomy taxonomy = rsn::Taxonomy::from_file(opt.taxonomy_path);
  const std::vector<std::string> files = list_nifti_files(opt.in_dir);
  manifest.inputs = files;
  manifest.inputs.push_back(opt.taxonomy_path);

  std::vector<rsn::ComponentStack> stacks;
  stacks.reserve(files.size());
  for (const std::string& file : files)
    stacks.push_back(rsn::nifti::read_stack(file));

  const rsn::Dataset dataset =
      rsn::assemble(stacks, taxonomy, opt.standardize);
  rsn::save_dataset(dataset, opt.out_path);
  manifest.outputs = {opt.out_path};
  manifest.write(opt.out_path + ".manifest.json");

  std::printf("subjects=%zu, samples=%zu, classes=%d\n", stacks.size(),
              dataset.samples.size(), dataset.num_classes());
  return 0;
}

struct TrainOptions {
  std::string data_path;
  std::string out_path;
  std::string split = "0.72,0.08,0.20";
  std::optional<double> val_frac;
  int layers = 3;
  int nodes = 200;
  double dropout = 0.66;
  double lr = 1e-5;
  int epochs = 100;
  int batch_size = 32;
  std::optional<double> stop_loss;
  std::string weight_scheme = "inverse_frequency";
  std::uint64_t seed = 0;
};

rsn::WeightScheme parse_weight_scheme(const std::string& name) {
  if (name == "inverse_frequency") return rsn::WeightScheme::inverse_frequency;
  if (name == "uniform") return rsn::WeightScheme::uniform;
  rsn::fail(rsn::errc::bad_config, "unknown weight scheme '" + name + "'");
}

int cmd_train(const TrainOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "train";
  manifest.seed = opt.seed;
  manifest.inputs = {opt.data_path};
  manifest.format_versions["RSND"] = 1;
  manifest.format_versions["RSNM"] = 1;

  std::array<double, 3> fractions{0.72, 0.08, 0.20};
  if (opt.val_frac) {
    fractions = {1.0 - *opt.val_frac, *opt.val_frac, 0.0};
  } else {
    const auto values = parse_double_list(opt.split);
    if (values.size() != 3)
      rsn::fail(rsn::errc::bad_split, "--split expects train,val,test");
    fractions = {values[0], values[1], values[2]};
  }

  const rsn::Dataset dataset = rsn::load_dataset(opt.data_path);
  rsn::SplitSpec split_spec;
  split_spec.train_frac = fractions[0];
  split_spec.val_frac = fractions[1];
  split_spec.test_frac = fractions[2];
  split_spec.seed = opt.seed;
  const rsn::SubjectSplit split = rsn::split_by_subject(dataset, split_spec);

  rsn::MlpConfig config;
  config.input_dim = dataset.feature_dim;
  config.num_classes = dataset.num_classes();
  config.hidden_layers.assign(static_cast<std::size_t>(opt.layers), opt.nodes);
  config.dropout_rate = opt.dropout;
  config.dropout_after_layer = std::min(2, opt.layers);
  config.learning_rate = opt.lr;
  config.batch_size = opt.batch_size;
  config.max_epochs = opt.epochs;
  config.stop_loss_threshold = opt.stop_loss;
  config.weight_scheme = parse_weight_scheme(opt.weight_scheme);
  config.seed = opt.seed;

  manifest.config = {{"data", opt.data_path},
                     {"split", {fractions[0], fractions[1], fractions[2]}},
                     {"layers", opt.layers},
                     {"nodes", opt.nodes},
                     {"dropout", opt.dropout},
                     {"dropout_after_layer", config.dropout_after_layer},
                     {"lr", opt.lr},
                     {"epochs", opt.epochs},
                     {"batch_size", opt.batch_size},
                     {"stop_loss", opt.stop_loss ? nlohmann::json(*opt.stop_loss)
                                                 : nlohmann::json(nullptr)},
                     {"weight_scheme", opt.weight_scheme},
                     {"seed", opt.seed},
                     {"out", opt.out_path},
                     {"standardized_inputs", dataset.standardized}};

  const rsn::TrainResult result = rsn::train(config, split.train, split.val);
  rsn::save_model(result.model, opt.out_path);
  manifest.outputs = {opt.out_path};

  const std::string report_path = opt.out_path + ".train.csv";
  rsn::write_train_report_csv(result.report, report_path);
  manifest.outputs.push_back(report_path);

  std::printf("split: train=%zu val=%zu test=%zu samples\n",
              split.train.samples.size(), split.val.samples.size(),
              split.test.samples.size());
  std::printf("stopped: %s after %d epochs (best_epoch=%d)\n",
              rsn::stop_reason_name(result.report.stop_reason),
              result.report.epochs_run, result.report.best_epoch);
  if (!result.report.epochs.empty()) {
    const auto& last = result.report.epochs.back();
    std::printf("final: loss=%.6g train_accuracy=%.4f\n", last.mean_loss,
                last.train_accuracy);
  }

  if (!split.test.samples.empty()) {
    const rsn::EvalResult eval = rsn::evaluate(result.model, split.test);
    const std::string confusion_csv = opt.out_path + ".confusion.csv";
    const std::string confusion_ppm = opt.out_path + ".confusion.ppm";
    const std::string confusion_norm = opt.out_path + ".confusion_norm.csv";
    const std::string misclass_path = opt.out_path + ".misclass.txt";
    rsn::write_confusion_csv(eval.confusion, confusion_csv);
    rsn::write_confusion_heatmap(eval.confusion, confusion_ppm, confusion_norm);
    rsn::write_misclass_report(eval, dataset.class_labels, misclass_path);
    manifest.outputs.insert(manifest.outputs.end(),
                            {confusion_csv, confusion_ppm, confusion_norm,
                             misclass_path});
    std::printf("test_accuracy=%.4f misclassifications=%zu\n", eval.accuracy,
                eval.misclassified.size());
  }
  manifest.write(opt.out_path + ".manifest.json");
  return 0;
}

struct PredictOptions {
  std::string model_path;
  std::string in_path;
  std::string taxonomy_path;
  int topk = 3;
};

int cmd_predict(const PredictOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "predict";
  manifest.inputs = {opt.model_path, opt.in_path, opt.taxonomy_path};
  manifest.config = {{"model", opt.model_path},
                     {"in", opt.in_path},
                     {"taxonomy", opt.taxonomy_path},
                     {"topk", opt.topk}};
  manifest.format_versions["RSNM"] = 1;

  const rsn::MlpModel model = rsn::load_model(opt.model_path);
  const rsn::Taxonomy taxonomy = rsn::Taxonomy::from_file(opt.taxonomy_path);
  if (taxonomy.num_classes() != model.config().num_classes)
    rsn::fail(rsn::errc::dimension_mismatch,
              "taxonomy has " + std::to_string(taxonomy.num_classes()) +
                  " classes, model expects " +
                  std::to_string(model.config().num_classes));
  const rsn::ComponentStack stack = rsn::nifti::read_stack(opt.in_path);

  const auto& first = stack.volumes.front();
  const int dims = static_cast<int>(first.voxel_count());
  if (dims != model.config().input_dim)
    rsn::fail(rsn::errc::dimension_mismatch,
              "expected a volume of " +
                  std::to_string(model.config().input_dim) + " voxels, got " +
                  std::to_string(dims) + " (" + std::to_string(first.nx) + "x" +
                  std::to_string(first.ny) + "x" + std::to_string(first.nz) +
                  ")");

  for (std::size_t c = 0; c < stack.volumes.size(); ++c) {
    rsn::FeatureVector features = rsn::flatten(stack.volumes[c]);
    if (model.config().standardized_inputs)
      rsn::standardize_in_place(features.values);
    const rsn::Prediction p = rsn::predict(model, features.values);
    const std::string pairs = rsn::format_topk(
        std::span<const float>(p.probs.data(),
                               static_cast<std::size_t>(p.probs.size())),
        taxonomy.classes(), std::min(opt.topk, model.config().num_classes));
    std::printf("%zu\t%s\t%s\n", c,
                lowercase(taxonomy.class_label(p.class_id)).c_str(),
                pairs.c_str());
  }
  manifest.write(opt.in_path + ".predictions.manifest.json");
  return 0;
}

struct AblateOptions {
  std::string data_path;
  std::string out_prefix;
  std::string layers_list = "1,2,3";
  std::string nodes_list = "2,5,10,20,50,100,150,200";
  int k = 5;
  double lr = 1e-5;
  int epochs = 500;
  int batch_size = 32;
  double stop_loss = 0.0005;
  std::uint64_t seed = 0;
};

int cmd_ablate(const AblateOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "ablate";
  manifest.seed = opt.seed;
  manifest.inputs = {opt.data_path};
  manifest.config = {{"data", opt.data_path},
                     {"layers_list", opt.layers_list},
                     {"nodes_list", opt.nodes_list},
                     {"k", opt.k},
                     {"lr", opt.lr},
                     {"epochs", opt.epochs},
                     {"batch_size", opt.batch_size},
                     {"stop_loss", opt.stop_loss},
                     {"seed", opt.seed},
                     {"out", opt.out_prefix}};

  const rsn::Dataset dataset = rsn::load_dataset(opt.data_path);

  rsn::GridSpec spec;
  spec.layer_counts = parse_int_list(opt.layers_list);
  spec.node_counts = parse_int_list(opt.nodes_list);
  spec.k = opt.k;
  spec.seed = opt.seed;

  rsn::MlpConfig base;
  base.input_dim = dataset.feature_dim;
  base.num_classes = dataset.num_classes();
  base.learning_rate = opt.lr;
  base.batch_size = opt.batch_size;
  base.max_epochs = opt.epochs;
  base.stop_loss_threshold = opt.stop_loss;
  base.dropout_rate = 0.0;

  const rsn::AccuracyGrid grid = rsn::run_grid(dataset, spec, base);
  const std::string csv_path = opt.out_prefix + ".csv";
  const std::string ppm_path = opt.out_prefix + ".ppm";
  rsn::emit_grid(grid, csv_path, ppm_path);
  manifest.outputs = {csv_path, ppm_path};
  manifest.write(opt.out_prefix + ".manifest.json");

  std::printf("grid: %zu layer counts x %zu node counts, %d folds\n",
              spec.layer_counts.size(), spec.node_counts.size(), spec.k);
  for (std::size_t l = 0; l < grid.layer_counts.size(); ++l)
    for (std::size_t n = 0; n < grid.node_counts.size(); ++n)
      std::printf("layers=%d nodes=%d mean_accuracy=%.4f\n",
                  grid.layer_counts[l], grid.node_counts[n],
                  grid.cell(static_cast<int>(l), static_cast<int>(n)).mean_accuracy);
  return 0;
}

struct ProjectOptions {
  std::string in_path;
  std::string out_path;
  int component = 0;
};

int cmd_project(const ProjectOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "project";
  manifest.inputs = {opt.in_path};
  manifest.config = {{"in", opt.in_path},
                     {"component", opt.component},
                     {"out", opt.out_path}};

  const rsn::ComponentStack stack = rsn::nifti::read_stack(opt.in_path);
  if (opt.component < 0 ||
      opt.component >= static_cast<int>(stack.volumes.size()))
    rsn::fail(rsn::errc::bad_component_index,
              "component " + std::to_string(opt.component) + " of " +
                  std::to_string(stack.volumes.size()));
  const rsn::RgbImage image =
      rsn::rgb_composite(stack.volumes[static_cast<std::size_t>(opt.component)]);
  rsn::write_ppm(image, opt.out_path);
  manifest.outputs = {opt.out_path};
  manifest.write(opt.out_path + ".manifest.json");
  std::printf("wrote %dx%d projection image to %s\n", image.width, image.height,
              opt.out_path.c_str());
  return 0;
}

struct BenchOptions {
  std::string model_path;
  std::string shape;
  int n = 1000;
  int batch = 64;
  std::uint64_t seed = 0;
};

int cmd_bench(const BenchOptions& opt) {
  RunManifest manifest;
  manifest.start();
  manifest.command = "bench";
  manifest.seed = opt.seed;
  manifest.config = {{"model", opt.model_path},
                     {"shape", opt.shape},
                     {"n", opt.n},
                     {"batch", opt.batch},
                     {"seed", opt.seed}};

  rsn::MlpModel model = [&] {
    if (!opt.model_path.empty()) {
      manifest.inputs.push_back(opt.model_path);
      return rsn::load_model(opt.model_path);
    }
    const auto dims = parse_int_list(opt.shape);
    if (dims.size() < 2)
      rsn::fail(rsn::errc::bad_config, "--shape needs at least input,classes");
    rsn::MlpConfig config;
    config.input_dim = dims.front();
    config.num_classes = dims.back();
    config.hidden_layers.assign(dims.begin() + 1, dims.end() - 1);
    config.dropout_rate = 0.0;
    config.seed = opt.seed;
    return rsn::MlpModel::init(config);
  }();

  const rsn::BenchResult result =
      rsn::throughput_bench(model, opt.n, opt.seed, opt.batch);
  std::printf(
      "shape=%s samples=%d seconds=%.4f throughput=%.1f samples/sec batch=%d\n",
      result.model_shape.c_str(), result.samples, result.seconds,
      result.throughput, opt.batch);
  manifest.write("bench.manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resting-state network labeling for fMRI ICA component maps"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate synthetic per-subject component stacks");
  synth_cmd->add_option("--taxonomy", synth.taxonomy_path, "Taxonomy TSV file")
      ->required();
  synth_cmd->add_option("--subjects", synth.subjects, "Number of subjects");
  synth_cmd->add_option("--grid", synth.grid, "Grid as nx,ny,nz");
  synth_cmd->add_option("--blob-sigma", synth.blob_sigma, "Blob sigma (voxels)");
  synth_cmd->add_option("--noise", synth.noise_sigma, "Noise sigma");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Assemble a labeled dataset from per-subject NIfTI stacks");
  ingest_cmd->add_option("--in", ingest.in_dir, "Directory of .nii/.nii.gz")
      ->required();
  ingest_cmd->add_option("--taxonomy", ingest.taxonomy_path, "Taxonomy TSV file")
      ->required();
  ingest_cmd->add_option("--out", ingest.out_path, "Dataset cache path")
      ->required();
  ingest_cmd->add_flag("--standardize", ingest.standardize,
                       "z-score each feature vector");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train the classifier");
  train_cmd->add_option("--data", train.data_path, "Dataset cache")->required();
  train_cmd->add_option("--split", train.split, "train,val,test fractions");
  train_cmd->add_option("--val-frac", train.val_frac,
                        "Validation fraction (implies no test split)");
  train_cmd->add_option("--layers", train.layers, "Hidden layer count");
  train_cmd->add_option("--nodes", train.nodes, "Nodes per hidden layer");
  train_cmd->add_option("--dropout", train.dropout, "Dropout rate");
  train_cmd->add_option("--lr", train.lr, "Learning rate");
  train_cmd->add_option("--epochs", train.epochs, "Epoch cap");
  train_cmd->add_option("--batch-size", train.batch_size, "Mini-batch size");
  train_cmd->add_option("--stop-loss", train.stop_loss,
                        "Stop when epoch mean loss drops below this");
  train_cmd->add_option("--weight-scheme", train.weight_scheme,
                        "inverse_frequency or uniform");
  train_cmd->add_option("--seed", train.seed, "RNG seed");
  train_cmd->add_option("--out", train.out_path, "Model output path")
      ->required();

  PredictOptions predict;
  auto* predict_cmd =
      app.add_subcommand("predict", "Label the components of one stack");
  predict_cmd->add_option("--model", predict.model_path, "Model file")
      ->required();
  predict_cmd->add_option("--in", predict.in_path, "NIfTI stack")->required();
  predict_cmd->add_option("--taxonomy", predict.taxonomy_path, "Taxonomy TSV")
      ->required();
  predict_cmd->add_option("--topk", predict.topk, "Top-k labels per component");

  AblateOptions ablate;
  auto* ablate_cmd = app.add_subcommand(
      "ablate", "Grid search over layers x nodes with stratified k-fold CV");
  ablate_cmd->add_option("--data", ablate.data_path, "Dataset cache")
      ->required();
  ablate_cmd->add_option("--layers-list", ablate.layers_list, "Layer counts");
  ablate_cmd->add_option("--nodes-list", ablate.nodes_list, "Node counts");
  ablate_cmd->add_option("--k", ablate.k, "Fold count");
  ablate_cmd->add_option("--lr", ablate.lr, "Learning rate");
  ablate_cmd->add_option("--epochs", ablate.epochs, "Per-cell epoch cap");
  ablate_cmd->add_option("--batch-size", ablate.batch_size, "Mini-batch size");
  ablate_cmd->add_option("--stop-loss", ablate.stop_loss,
                         "Loss threshold stop");
  ablate_cmd->add_option("--seed", ablate.seed, "RNG seed");
  ablate_cmd->add_option("--out", ablate.out_prefix, "Output path prefix")
      ->required();

  ProjectOptions project;
  auto* project_cmd = app.add_subcommand(
      "project", "Write the RGB maximum-intensity projection of a component");
  project_cmd->add_option("--in", project.in_path, "NIfTI stack")->required();
  project_cmd->add_option("--component", project.component, "Component index");
  project_cmd->add_option("--out", project.out_path, "PPM output path")
      ->required();

  BenchOptions bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "Measure single-threaded inference throughput");
  bench_cmd->add_option("--model", bench.model_path, "Model file");
  bench_cmd->add_option("--shape", bench.shape,
                        "Layer widths, e.g. 109350,200,200,200,58");
  bench_cmd->add_option("--n", bench.n, "Sample count");
  bench_cmd->add_option("--batch", bench.batch, "Inference batch size");
  bench_cmd->add_option("--seed", bench.seed, "RNG seed");

  try {
    app.parse(argc, argv);
    if (*synth_cmd) return cmd_synth(synth);
    if (*ingest_cmd) return cmd_ingest(ingest);
    if (*train_cmd) return cmd_train(train);
    if (*predict_cmd) return cmd_predict(predict);
    if (*ablate_cmd) return cmd_ablate(ablate);
    if (*project_cmd) return cmd_project(project);
    if (*bench_cmd) {
      if (bench.model_path.empty() && bench.shape.empty())
        rsn::fail(rsn::errc::bad_config, "bench needs --model or --shape");
      return cmd_bench(bench);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rsn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
