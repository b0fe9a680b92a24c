#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "micromorph/assembly.hpp"
#include "micromorph/dynamic_solver.hpp"
#include "micromorph/static_solver.hpp"

namespace micromorph {

/// Fully validated run configuration parsed from the flat INI-style config
/// text (dotted sections, `key = value` lines, `#` comments). Unknown keys
/// are hard errors; material parameters are validated at parse time.
struct RunConfig {
  std::string command;  // empty when the config leaves the command to the CLI
  std::uint64_t seed = 0;

  // [box]
  double lx = 1.0, ly = 1.0, lz = 1.0;
  int nx = 2, ny = 2, nz = 2;

  // [material]
  MaterialParams material;

  // [static]
  std::string static_case = "zero";  // zero | affine | poly3 | inline
  std::string lifting = "direct";    // direct | constructive
  std::array<double, 3> inline_g_const{0.0, 0.0, 0.0};
  std::array<double, 9> inline_g_linear{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};

  // [dynamic]
  std::string dynamic_case = "zero";  // zero | harmonic-bc
  std::string integrator = "midpoint";
  std::string dynamic_init = "from-boundary";  // from-boundary | zero | random
  double dt = 0.01;
  int steps = 100;
  int output_every = 10;
  double omega = 3.0;

  // [extension]
  std::vector<int> extension_levels{2, 4, 8};
  int ensemble_random = 2;

  // [korn]
  std::vector<int> korn_levels{2, 3, 4};
  std::vector<int> coercivity_levels{2, 3};

  // [convergence]
  std::string convergence_case = "poly3";
  std::vector<int> convergence_levels{2, 4, 8};

  // [output]
  bool dump_matrix = false;
  bool write_vtk = true;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  BoxSpec box() const { return BoxSpec{lx, ly, lz, nx, ny, nz}; }
  LiftingPath lifting_path() const {
    return lifting == "constructive" ? LiftingPath::constructive : LiftingPath::direct;
  }
  Integrator integrator_kind() const {
    return integrator == "newmark" ? Integrator::newmark : Integrator::implicit_midpoint;
  }
};

/// Parse and validate. Throws std::runtime_error with a line number on parse
/// errors and with the violated inequality name on invalid parameters.
RunConfig parse_config(const std::string& text);

/// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

const std::vector<std::string>& known_commands();

}  // namespace micromorph
