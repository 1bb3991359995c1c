#include "mtcpp/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace mtcpp;

  CLI::App app{"Coalescence in multitype branching forests"};
  app.require_subcommand(1);

  std::string task_name;
  std::string config_path, lf_path, spec_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  std::optional<int> horizon;
  std::string init_mode;

  for (const char* name : {"simulate", "laws", "validate", "compare-two-type", "dchain"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->callback([&task_name, name] { task_name = name; });
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed);
    sub->add_option("--samples", samples);
    sub->add_option("--horizon", horizon, "depth T of the forest");
    sub->add_option("--init", init_mode, "rejection, conditioned_spine or sizebiased_spine");
    sub->add_option("--out", out_dir, "output directory");
    auto* lf = sub->add_option("--model-lf", lf_path, "linear-fractional parameters (JSON)");
    auto* spec = sub->add_option("--model-spec", spec_path, "offspring law (JSON)");
    lf->excludes(spec);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      const std::filesystem::path p = config_path;
      config = config_from_json(read_json_file(p), p.parent_path());
    }
    config.task = parse_task(task_name);
    if (!lf_path.empty()) {
      config.lf = read_lfparams(lf_path);
      config.spec.reset();
      if (config.model_id == "model") config.model_id = std::filesystem::path(lf_path).stem().string();
    }
    if (!spec_path.empty()) {
      config.spec = read_modelspec(spec_path);
      config.lf.reset();
      if (config.model_id == "model") config.model_id = std::filesystem::path(spec_path).stem().string();
    }
    if (seed) config.seed = *seed;
    if (samples) config.samples = *samples;
    if (horizon) config.horizon = *horizon;
    if (!init_mode.empty()) config.init_mode = parse_init_mode(init_mode);
    config.out_dir = out_dir;
    config.threads = threads_from_env();
    return run(config, std::cerr);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitSchema;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}
