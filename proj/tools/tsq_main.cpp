// Copyright 2026 The TSQ Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// tsq: command-line front end for the temporal saliency query library.
//
//   tsq synth-gen --out data/ --seed 7
//   tsq train --data data/dataset.json --vocab data/vocabulary.json --out ckpt.json
//   tsq sample --checkpoint ckpt.json --policy tsq --budget 5
//   tsq eval --checkpoint ckpt.json --out report
//   tsq flops --config configs/reference_flops.json
//   tsq gradcheck
//   tsq ablate --data ... --vocab ... --grid beta=0,0.6 --seeds 5
//
// Exit status: 0 on success, 1 on usage or validation errors, 2 on numeric
// failures (non-finite loss, divergence, gradcheck mismatch).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tsq/checkpoint.hpp"
#include "tsq/data_model.hpp"
#include "tsq/experiment.hpp"
#include "tsq/interaction.hpp"
#include "tsq/metrics.hpp"
#include "tsq/run_config.hpp"
#include "tsq/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

// Flags shared by the subcommands that build a RunConfig. Each optional value
// is applied on top of the --config file (or checkpoint echo) when present.
struct ConfigFlags {
  std::string config_path;
  std::string data;
  std::string vocab;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;  // raw key=value overrides
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app, bool with_data = true) {
    app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    if (with_data) {
      app->add_option("--data", data, "dataset manifest");
      app->add_option("--vocab", vocab, "vocabulary manifest");
    }
    app->add_option("--seed", seed, "master seed for every random stream");
    app->add_option("--set", sets, "extra override key=value (repeatable)");
  }

  // Registers a flag that maps onto an apply_override key.
  template <typename T>
  void option(CLI::App* app, const std::string& flag, const std::string& key,
              const std::string& help) {
    app->add_option_function<T>(
        flag, [this, key](const T& v) {
          std::ostringstream s;
          s << std::setprecision(17) << v;
          overrides[key] = s.str();
        },
        help);
  }

  void flag(CLI::App* app, const std::string& flag, const std::string& key,
            const std::string& value, const std::string& help) {
    app->add_flag_callback(flag, [this, key, value] { overrides[key] = value; }, help);
  }

  tsq::RunConfig resolve(const json* base = nullptr) const {
    tsq::RunConfig config;
    if (base) config = tsq::run_config_from_json(*base);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw tsq::ConfigError("cannot parse " + config_path + ": " + e.what());
      }
      config = tsq::run_config_from_json(j);
    }
    if (!data.empty()) config.dataset = data;
    if (!vocab.empty()) config.vocabulary = vocab;
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw tsq::ConfigError("--set expects key=value, got " + kv);
      tsq::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : overrides) tsq::apply_override(config, key, value);
    if (seed) config.seed = *seed;
    return config;
  }
};

struct LoadedData {
  tsq::Dataset train;
  tsq::Dataset test;
  tsq::Vocabulary vocabulary;
};

LoadedData load_data(tsq::RunConfig& config) {
  if (config.dataset.empty() || config.vocabulary.empty())
    throw tsq::ConfigError("a dataset (--data) and vocabulary (--vocab) are required");
  const tsq::Dataset all = tsq::read_manifest(config.dataset);
  LoadedData out;
  out.vocabulary = tsq::read_vocabulary(config.vocabulary);
  for (const auto& video : all.videos) tsq::validate_record(video, all.class_count);
  config.adopt_data_dims(all, out.vocabulary);
  config.validate();
  std::tie(out.train, out.test) = tsq::split_dataset(all, config.train_fraction);
  return out;
}

void write_json_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw tsq::ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- synth-gen

struct SynthArgs {
  tsq::SynthConfig config;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth_gen(const SynthArgs& args) {
  const tsq::SyntheticDataset synth = tsq::generate_synthetic_dataset(args.config, args.seed);
  const fs::path dir(args.out);
  fs::create_directories(dir);
  tsq::write_manifest(synth.dataset, dir / "dataset.json");
  tsq::write_vocabulary(synth.vocabulary, dir / "vocabulary.json");
  const auto& c = args.config;
  json echo = {{"command", "synth-gen"},
               {"seed", args.seed},
               {"classes", c.classes},
               {"frames", c.frames},
               {"dim", c.dim},
               {"objects", c.objects},
               {"embed_dim", c.embed_dim},
               {"per_class", c.per_class},
               {"salient", c.salient},
               {"noise", c.noise},
               {"noise_frame_fraction", c.noise_frame_fraction},
               {"object_boost", c.object_boost},
               {"objects_per_class", c.objects_per_class},
               {"class_name_jitter", c.class_name_jitter},
               {"dataset", (dir / "dataset.json").string()},
               {"vocabulary", (dir / "vocabulary.json").string()}};
  write_json_file(dir / "synth_config.json", echo);
  std::cout << echo.dump() << '\n';
  return 0;
}

// -------------------------------------------------------------------- train

int run_train(const ConfigFlags& flags, const std::string& out) {
  tsq::RunConfig config = flags.resolve();
  LoadedData data = load_data(config);
  const json echo = tsq::to_json(config);
  std::cout << json{{"config", echo}}.dump() << '\n';
  const tsq::Pipeline pipeline =
      tsq::build_pipeline(data.train, data.vocabulary, config, [](const tsq::EpochLog& log) {
        std::cout << json(log).dump() << '\n' << std::flush;
      });
  tsq::Checkpoint checkpoint{pipeline.model, pipeline.probe, pipeline.recognizer, echo};
  tsq::write_checkpoint(checkpoint, out);
  std::cout << json{{"checkpoint", out}}.dump() << '\n';
  return 0;
}

struct LoadedRun {
  tsq::RunConfig config;
  tsq::Pipeline pipeline;
  LoadedData data;
};

LoadedRun load_run(const ConfigFlags& flags, const std::string& checkpoint_path) {
  tsq::Checkpoint checkpoint = tsq::read_checkpoint(checkpoint_path);
  if (!checkpoint.probe || !checkpoint.recognizer)
    throw tsq::FormatError("checkpoint " + checkpoint_path + " lacks the probe or recognizer");
  LoadedRun run;
  run.config = flags.resolve(&checkpoint.run_config);
  run.data = load_data(run.config);
  if (run.config.sampler.presample > checkpoint.model.config.max_frames &&
      checkpoint.model.config.positional)
    throw tsq::ConfigError("presample exceeds the checkpoint's positional table");
  run.pipeline.model = std::move(checkpoint.model);
  run.pipeline.probe = *checkpoint.probe;
  run.pipeline.recognizer = *checkpoint.recognizer;
  return run;
}

// ------------------------------------------------------------------- sample

int run_sample(const ConfigFlags& flags, const std::string& checkpoint_path,
               const std::string& policy_name, const std::string& split) {
  LoadedRun run = load_run(flags, checkpoint_path);
  const tsq::Policy policy = tsq::parse_policy(policy_name);
  const tsq::Dataset& videos = split == "train" ? run.data.train : run.data.test;
  std::cout << json{{"config", tsq::to_json(run.config)}, {"policy", policy_name}}.dump()
            << '\n';
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const tsq::VideoRecord& raw = videos.videos[i];
    const std::vector<int> positions =
        tsq::presample_and_pad(raw.frame_count(), run.config.sampler.presample);
    const tsq::VideoRecord video = tsq::gather_frames(raw, positions);
    const tsq::FrameSelection sel =
        tsq::select_frames(policy, video, run.data.vocabulary, run.pipeline, run.config, i);
    std::vector<int> raw_indices;
    for (int p : sel.indices) raw_indices.push_back(positions[p]);
    json line = {{"video_id", raw.id()},
                 {"indices", sel.indices},
                 {"source_frames", raw_indices},
                 {"provenance", sel.provenance}};
    json scores = json::object();
    if (sel.visual_scores.size() > 0)
      scores["visual"] = std::vector<double>(sel.visual_scores.begin(), sel.visual_scores.end());
    if (sel.textual_scores.size() > 0)
      scores["textual"] =
          std::vector<double>(sel.textual_scores.begin(), sel.textual_scores.end());
    line["scores"] = scores;
    std::cout << line.dump() << '\n';
  }
  return 0;
}

// --------------------------------------------------------------------- eval

int run_eval(const ConfigFlags& flags, const std::string& checkpoint_path,
             const std::vector<std::string>& policy_names, std::vector<int> curve_budgets,
             const std::string& out_prefix) {
  LoadedRun run = load_run(flags, checkpoint_path);
  std::vector<tsq::Policy> policies;
  for (const auto& name : policy_names) policies.push_back(tsq::parse_policy(name));
  if (policies.empty()) policies = tsq::all_policies();
  const tsq::EvalReport report =
      tsq::compare_policies(run.data.test, run.data.vocabulary, policies, run.pipeline, run.config);
  const tsq::CoarseScores coarse =
      tsq::coarse_prediction_map(run.data.test, run.data.vocabulary, run.pipeline, run.config);

  json j = {{"config", tsq::to_json(run.config)},
            {"checkpoint", checkpoint_path},
            {"test_videos", run.data.test.size()},
            {"rows", report.rows},
            {"coarse", {{"visual_map", coarse.visual_map}, {"textual_map", coarse.textual_map}}}};

  // accuracy-vs-FLOPs curve over a sweep of budgets
  if (curve_budgets.empty())
    for (int k = 1; k <= run.config.sampler.presample; k = k < 4 ? k + 1 : k * 2)
      curve_budgets.push_back(k);
  std::ostringstream curve;
  curve << "policy,budget,gflops,map,top1\n";
  for (tsq::Policy p : policies) {
    if (p == tsq::Policy::Dense) continue;
    for (int k : curve_budgets) {
      if (k > run.config.sampler.presample) continue;
      tsq::RunConfig c = run.config;
      c.sampler.budget = k;
      const tsq::PolicyRow row =
          tsq::evaluate_policy(p, run.data.test, run.data.vocabulary, run.pipeline, c);
      curve << row.policy << ',' << row.budget << ',' << row.gflops << ',' << row.map << ','
            << row.top1 << '\n';
    }
  }

  std::ostringstream csv;
  csv << "policy,budget,gflops,map,top1,planted_recall\n";
  for (const auto& row : report.rows) {
    csv << row.policy << ',' << row.budget << ',' << row.gflops << ',' << row.map << ','
        << row.top1 << ',';
    if (row.recall >= 0.0) csv << row.recall;
    csv << '\n';
  }

  if (!out_prefix.empty()) {
    write_json_file(out_prefix + ".json", j);
    std::ofstream(out_prefix + ".csv") << "# config: " << tsq::to_json(run.config).dump() << '\n'
                                        << csv.str();
    std::ofstream(out_prefix + "_curve.csv")
        << "# config: " << tsq::to_json(run.config).dump() << '\n' << curve.str();
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

// -------------------------------------------------------------------- flops

int run_flops(const std::string& path, bool as_json) {
  std::ifstream in(path);
  if (!in) throw tsq::ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw tsq::ConfigError("cannot parse " + path + ": " + e.what());
  }
  const tsq::FlopsConfig config = j.get<tsq::FlopsConfig>();
  const tsq::FlopsBreakdown breakdown = tsq::flops_total(config);
  if (as_json) {
    json rows = json::array();
    for (const auto& r : breakdown.rows)
      rows.push_back({{"name", r.name}, {"gflops", r.flops}, {"rounded", r.rounded}});
    std::cout << json{{"config", j},
                      {"rows", rows},
                      {"raw_total", breakdown.raw_total},
                      {"rounded_total", breakdown.rounded_total}}
                     .dump(2)
              << '\n';
  } else {
    tsq::print_flops_table(std::cout, breakdown);
  }
  return 0;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  int classes = 4;
  int frames = 6;
  int dim = 8;
  int embed_dim = 6;
  int reduced_dim = 4;
  int objects = 5;
  int heads = 1;
  int layers = 1;
  bool self_attention = false;
  std::string attention = "cs";
  std::string classifier = "cs";
  double alpha = 0.6;
  double beta = 0.6;
  std::uint64_t seed = 0;
};

int run_gradcheck(const GradcheckArgs& a) {
  tsq::ModelConfig mc;
  mc.classes = a.classes;
  mc.visual_dim = a.dim;
  mc.text_dim = a.embed_dim;
  mc.reduced_dim = a.reduced_dim;
  mc.max_frames = a.frames;
  mc.heads = a.heads;
  mc.layers = a.layers;
  mc.self_attention = a.self_attention;
  json modes = {{"attention", a.attention}, {"classifier", a.classifier}};
  mc.attention = modes["attention"] == "ca" ? tsq::AttentionMode::ClassAgnostic
                                             : tsq::AttentionMode::ClassSpecific;
  mc.classifier = modes["classifier"] == "ca" ? tsq::ClassifierMode::ClassAgnostic
                                               : tsq::ClassifierMode::ClassSpecific;
  mc.validate();

  tsq::Rng rng(tsq::derive_seed(a.seed, 0));
  tsq::ModelParams params = tsq::init_model(mc, rng);
  // perturb every tensor so that zero-initialized ones (positional table,
  // biases) are exercised away from their symmetric starting point
  params.visit([&](const std::string&, tsq::Matrix& m) {
    m += tsq::gaussian_matrix(m.rows(), m.cols(), 0.3, rng);
  });
  tsq::TrainingSample sample;
  sample.id = "gradcheck";
  sample.label = static_cast<int>(rng() % static_cast<std::uint64_t>(a.classes));
  sample.visual = tsq::gaussian_matrix(a.frames, a.dim, 1.0, rng);
  sample.textual = tsq::gaussian_matrix(a.frames, a.embed_dim, 1.0, rng);

  const tsq::GradcheckReport report =
      tsq::gradcheck_objective(params, sample, tsq::LossWeights{a.alpha, a.beta});
  json j = report;
  j["config"] = mc;
  j["config"]["alpha"] = a.alpha;
  j["config"]["beta"] = a.beta;
  j["config"]["seed"] = a.seed;
  std::cout << j.dump(2) << '\n';
  return report.passed ? 0 : kExitNumeric;
}

// ------------------------------------------------------------------- ablate

int run_ablate(const ConfigFlags& flags, const std::vector<std::string>& grids, int seeds) {
  if (seeds < 1) throw tsq::ConfigError("--seeds must be at least 1");
  tsq::RunConfig base = flags.resolve();
  LoadedData data = load_data(base);
  std::vector<std::uint64_t> seed_list;
  for (int s = 0; s < seeds; ++s) seed_list.push_back(base.seed + static_cast<std::uint64_t>(s));

  std::cout << json{{"config", tsq::to_json(base)}, {"seeds", seed_list}}.dump() << '\n';
  for (const auto& grid : grids) {
    const auto [key, values] = tsq::parse_grid(grid);
    for (const auto& value : values) {
      tsq::RunConfig config = base;
      tsq::apply_override(config, key, value);
      config.validate();
      const tsq::AblationResult r = tsq::median_over_seeds(
          data.train, data.test, data.vocabulary, config, key + "=" + value, seed_list);
      json row = r;
      row["key"] = key;
      row["value"] = value;
      row["config"] = tsq::to_json(config);
      std::cout << row.dump() << '\n' << std::flush;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal saliency query frame sampler", "tsq"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-gen", "generate a planted-saliency dataset");
  synth_cmd->add_option("--classes", synth.config.classes);
  synth_cmd->add_option("--frames", synth.config.frames);
  synth_cmd->add_option("--dim", synth.config.dim);
  synth_cmd->add_option("--objects", synth.config.objects);
  synth_cmd->add_option("--embed-dim", synth.config.embed_dim);
  synth_cmd->add_option("--per-class", synth.config.per_class);
  synth_cmd->add_option("--salient", synth.config.salient);
  synth_cmd->add_option("--noise", synth.config.noise, "sigma of the per-frame noise");
  synth_cmd->add_option("--noise-frames", synth.config.noise_frame_fraction,
                        "fraction of distractors that are pure noise");
  synth_cmd->add_option("--object-boost", synth.config.object_boost);
  synth_cmd->add_option("--objects-per-class", synth.config.objects_per_class);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth.out, "output directory")->required();

  ConfigFlags train_flags;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "train both query branches");
  train_flags.attach(train_cmd);
  train_flags.option<int>(train_cmd, "--epochs", "epochs", "training epochs");
  train_flags.option<int>(train_cmd, "--batch", "batch", "mini-batch size");
  train_flags.option<double>(train_cmd, "--lr", "lr", "base learning rate");
  train_flags.option<double>(train_cmd, "--alpha", "alpha", "weight of the t->v swap loss");
  train_flags.option<double>(train_cmd, "--beta", "beta", "weight of the v->t swap loss");
  train_flags.option<double>(train_cmd, "--m-percent", "m_percent",
                             "share of frames kept per video for prototypes");
  train_flags.option<int>(train_cmd, "--reduced-dim", "reduced_dim", "query space width d'");
  train_flags.option<int>(train_cmd, "--top-objects", "top_objects", "objects kept per frame");
  train_flags.option<int>(train_cmd, "--presample", "presample", "frames per video T");
  train_flags.option<std::string>(train_cmd, "--variant", "variant",
                                  "attention+classifier, e.g. cs+cs or ca+ca");
  train_flags.option<std::string>(train_cmd, "--init", "init", "prototype|random");
  train_flags.flag(train_cmd, "--no-positional", "positional", "false",
                   "drop the positional table");
  train_flags.flag(train_cmd, "--long-schedule", "schedule", "long",
                   "100 epochs, batch 64, decay at 25/50/75");
  train_cmd->add_option("--out", train_out, "checkpoint manifest path")->required();

  auto add_sampler_flags = [](ConfigFlags& flags, CLI::App* cmd) {
    flags.option<int>(cmd, "--budget", "budget", "frames selected per video K");
    flags.option<int>(cmd, "--presample", "presample", "frames per video T");
    flags.option<double>(cmd, "--lambda-v", "lambda_v", "visual share of the budget");
    flags.option<int>(cmd, "--top-classes", "top_classes", "classes aggregated per video");
    flags.option<int>(cmd, "--top-objects", "top_objects", "objects kept per frame");
  };

  ConfigFlags sample_flags;
  std::string sample_ckpt, sample_policy = "tsq", sample_split = "test";
  auto* sample_cmd = app.add_subcommand("sample", "select frames for every video of a split");
  sample_flags.attach(sample_cmd);
  add_sampler_flags(sample_flags, sample_cmd);
  sample_cmd->add_option("--checkpoint", sample_ckpt)->required();
  sample_cmd->add_option("--policy", sample_policy)
      ->check(CLI::IsMember({"tsq", "uniform", "random", "dense", "maxconf", "maxconf-l"}));
  sample_cmd->add_option("--split", sample_split)->check(CLI::IsMember({"train", "test"}));

  ConfigFlags eval_flags;
  std::string eval_ckpt, eval_out;
  std::vector<std::string> eval_policies;
  std::vector<int> eval_budgets;
  auto* eval_cmd = app.add_subcommand("eval", "compare sampling policies on the test split");
  eval_flags.attach(eval_cmd);
  add_sampler_flags(eval_flags, eval_cmd);
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
  eval_cmd->add_option("--policies", eval_policies, "subset of policies (default: all)")
      ->delimiter(',');
  eval_cmd->add_option("--curve-budgets", eval_budgets, "budgets for the FLOPs curve")
      ->delimiter(',');
  eval_cmd->add_option("--out", eval_out, "prefix for .json, .csv and _curve.csv");

  std::string flops_config;
  bool flops_json = false;
  auto* flops_cmd = app.add_subcommand("flops", "print a FLOPs breakdown");
  flops_cmd->add_option("--config", flops_config)->required()->check(CLI::ExistingFile);
  flops_cmd->add_flag("--json", flops_json);

  GradcheckArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of the objective");
  grad_cmd->add_option("--classes", grad.classes);
  grad_cmd->add_option("--frames", grad.frames);
  grad_cmd->add_option("--dim", grad.dim);
  grad_cmd->add_option("--embed-dim", grad.embed_dim);
  grad_cmd->add_option("--reduced-dim", grad.reduced_dim);
  grad_cmd->add_option("--heads", grad.heads);
  grad_cmd->add_option("--layers", grad.layers);
  grad_cmd->add_flag("--self-attention", grad.self_attention);
  grad_cmd->add_option("--attention", grad.attention)->check(CLI::IsMember({"cs", "ca"}));
  grad_cmd->add_option("--classifier", grad.classifier)->check(CLI::IsMember({"cs", "ca"}));
  grad_cmd->add_option("--alpha", grad.alpha);
  grad_cmd->add_option("--beta", grad.beta);
  grad_cmd->add_option("--seed", grad.seed);

  ConfigFlags ablate_flags;
  std::vector<std::string> grids;
  int seeds = 1;
  auto* ablate_cmd = app.add_subcommand("ablate", "sweep one setting, median over seeds");
  ablate_flags.attach(ablate_cmd);
  ablate_flags.option<int>(ablate_cmd, "--epochs", "epochs", "training epochs");
  ablate_cmd->add_option("--grid", grids, "key=v1,v2,... (repeatable)")->required();
  ablate_cmd->add_option("--seeds", seeds, "seeds per grid point");

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitValidation;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*synth_cmd) return run_synth_gen(synth);
    if (*train_cmd) return run_train(train_flags, train_out);
    if (*sample_cmd) return run_sample(sample_flags, sample_ckpt, sample_policy, sample_split);
    if (*eval_cmd) return run_eval(eval_flags, eval_ckpt, eval_policies, eval_budgets, eval_out);
    if (*flops_cmd) return run_flops(flops_config, flops_json);
    if (*grad_cmd) return run_gradcheck(grad);
    if (*ablate_cmd) return run_ablate(ablate_flags, grids, seeds);
  } catch (const tsq::NumericError& e) {
    std::cerr << "tsq: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const tsq::Error& e) {
    std::cerr << "tsq: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    std::cerr << "tsq: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "tsq: malformed input: " << e.what() << '\n';
    return kExitValidation;
  }
  std::cerr << app.help();
  return kExitValidation;
}
