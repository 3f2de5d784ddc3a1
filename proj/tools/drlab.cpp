// drlab: batch front-end. Each subcommand writes CSV/JSON data plus manifest.json.

#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "commands.hpp"
#include "drlab/error.hpp"
#include "drlab/util.hpp"

int main(int argc, char** argv) {
  using drlab::cli::RunConfig;

  CLI::App app{"Dual-rail cluster-state generation, tomography and entanglement analysis"};
  app.require_subcommand(1);

  std::string config_path, preset, out, channel, channel_path, device_path, shots_file;
  std::uint64_t seed = 0;
  int n_max = 0, n_logical = 0, draws = 0, max_distance = 0;
  std::int64_t shots = 0;
  double threshold = 0.0;
  bool save_shots = false;

  app.add_option("--config", config_path, "JSON config file");
  auto* o_seed = app.add_option("--seed", seed, "master RNG seed");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_preset = app.add_option("--preset", preset, "device preset")
                       ->check(CLI::IsMember({"paper-device"}));
  auto* o_channel = app.add_option("--channel", channel, "channel source")
                        ->check(CLI::IsMember({"fit", "ideal", "explicit", "file"}));
  auto* o_channel_path = app.add_option("--channel-file", channel_path, "channel JSON")
                             ->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("generate", "chain fidelities and states");
  auto* o_nmax = gen->add_option("--n-max", n_max, "largest chain length")->check(CLI::PositiveNumber);

  auto* tomo = app.add_subcommand("tomo", "heterodyne tomography");
  auto* o_nlog = tomo->add_option("--n-logical", n_logical, "logical qubits")->check(CLI::Range(1, 3));
  auto* o_shots = tomo->add_option("--shots", shots, "synthesized shot count");
  auto* o_shots_file = tomo->add_option("--shots-file", shots_file, "DRSHOT1 record")
                           ->check(CLI::ExistingFile);
  auto* o_save = tomo->add_flag("--save-shots", save_shots, "write the synthesized record");

  auto* le = app.add_subcommand("le", "localizable entanglement");
  auto* o_thr = le->add_option("--threshold", threshold, "LE threshold")->check(CLI::PositiveNumber);
  auto* o_dist = le->add_option("--max-distance", max_distance, "largest LE distance")
                    ->check(CLI::PositiveNumber);

  auto* cmp = app.add_subcommand("compare", "dual-rail vs single-rail");
  auto* o_dist_cmp = cmp->add_option("--max-distance", max_distance, "largest LE distance")
                         ->check(CLI::PositiveNumber);

  auto* dev = app.add_subcommand("device", "Stark shifts, spectra, coherence limit");
  auto* o_device = dev->add_option("--device", device_path, "device JSON")->check(CLI::ExistingFile);
  auto* o_draws = dev->add_option("--draws", draws, "decoherence draws")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw drlab::FormatError("cannot open " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      drlab::cli::apply_config_text(cfg, ss.str(), config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  // Flags given on the command line override the config file.
  if (o_seed->count()) cfg.seed = seed;
  if (o_out->count()) cfg.out = out;
  if (o_preset->count()) cfg.preset = preset;
  if (o_channel->count()) cfg.channel = channel;
  if (o_channel_path->count()) {
    cfg.channel_path = channel_path;
    if (!o_channel->count()) cfg.channel = "file";
  }
  if (o_nmax->count()) cfg.n_max = n_max;
  if (o_nlog->count()) cfg.n_logical = n_logical;
  if (o_shots->count()) cfg.shots = shots;
  if (o_shots_file->count()) cfg.shots_file = shots_file;
  if (o_save->count()) cfg.save_shots = save_shots;
  if (o_thr->count()) cfg.threshold = threshold;
  if (o_dist->count() || o_dist_cmp->count()) cfg.max_distance = max_distance;
  if (o_device->count()) cfg.device_path = device_path;
  if (o_draws->count()) cfg.draws = draws;

  if (const int t = drlab::configured_threads(); t > 0) omp_set_num_threads(t);
  return drlab::cli::run(cfg);
}
