#pragma once

// Experiment configuration: flat "section.key = value" text, one entry per line,
// '#' starts a comment.  Every key has a default; unknown or repeated keys are
// parse errors.  serialize() writes every key in a fixed order, so a config and
// its serialization parse to the same object.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vflip/kernels.hpp"
#include "vflip/model.hpp"
#include "vflip/renewal.hpp"

namespace vflip {

struct ModelConfig {
  std::string kind = "nearest_neighbor";  // nearest_neighbor | next_nearest_degenerate | custom
  double omega0 = 1.0;
  double gamma = 6.0;
  int L = 16;
  std::vector<double> phi;  // custom: Phi(x) for x = -r..r

  bool operator==(const ModelConfig&) const = default;
};

struct InitConfig {
  std::string kind = "point_momentum";  // point_momentum | deterministic | sample_set
  double amplitude = 0.0;               // 0: sqrt(2L) for point_momentum, 1 for sample_set
  std::vector<double> q, p;             // deterministic: full lattice, site order -..+
  int samples = 3;                      // sample_set: number of Gaussian momentum draws
  int width = 1;                        // sample_set: momenta on |x| <= width
  std::uint64_t seed = 7;

  bool operator==(const InitConfig&) const = default;
};

struct SolverConfig {
  double h = 0.0;        // 0: h_max of the model
  double t_max = 100.0;
  double record_every = 1.0;
  std::string scheme = "trapezoid";  // trapezoid | midpoint
  double t_cut = 0.0;    // 0: 40 / delta0
  double memory_tol = 1e-17;

  bool operator==(const SolverConfig&) const = default;
};

struct McConfig {
  bool enabled = false;  // compare: include the Monte Carlo cross-check
  std::uint64_t realizations = 10000;
  std::uint64_t seed = 1;
  std::vector<double> times{5.0, 20.0, 80.0};

  bool operator==(const McConfig&) const = default;
};

struct NondegConfig {
  double epsilon = 0.02;
  double threshold = 1e-6;
  int samples = 97;
  double k0_min = 0.0;
  double k0_max = 0.5;
  int k0_points = 51;

  bool operator==(const NondegConfig&) const = default;
};

struct ScanConfig {
  int L_min = 2;
  int L_max = 20;

  bool operator==(const ScanConfig&) const = default;
};

struct KernelConfig {
  std::vector<double> times{0.0, 0.5, 1.0, 2.0, 5.0};

  bool operator==(const KernelConfig&) const = default;
};

struct CompareConfig {
  std::vector<double> t0_factors{1.0, 2.0, 4.0, 8.0};  // t0 = factor * L^(2/3)
  std::string smearing = "bandlimited_bump";           // bandlimited_bump | gaussian
  double smearing_width = 1.0;
  double window = 0.0;  // sup over t in [0, window]; 0: L^2 / 2
  double t_step = 0.25;
  std::vector<double> lattice_times;  // empty: {L^(2/3)/2, L^(2/3), 2 L^(2/3)}

  bool operator==(const CompareConfig&) const = default;
};

struct OutputConfig {
  std::string dir = ".";
  std::string format = "csv";  // csv | json

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ModelConfig model;
  InitConfig init;
  SolverConfig solver;
  McConfig mc;
  NondegConfig nondeg;
  ScanConfig scan;
  KernelConfig kernel;
  CompareConfig compare;
  OutputConfig output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError with the offending line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text: every key, fixed order, shortest round-trip numbers.
std::string serialize(const ExperimentConfig& config);

/// All recognized keys in canonical order.
std::vector<std::string> config_keys();

/// FNV-1a 64 of the canonical text with the output section at its defaults, as 16
/// hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

InteractionModel build_model(const ExperimentConfig& config);
InteractionModel build_model(const ExperimentConfig& config, int L);
InitialCondition build_initial(const ExperimentConfig& config, const InteractionModel& model);
SolverOptions build_solver_options(const ExperimentConfig& config, int workers);
/// Time step of the solve: solver.h, or h_max of the model when 0.
double solver_step(const ExperimentConfig& config, const InteractionModel& model);

}  // namespace vflip
