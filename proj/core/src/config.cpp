#include "micromorph/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "micromorph/cases.hpp"
#include "micromorph/io.hpp"

namespace micromorph {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config parse error at line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::invalid_argument&) {
    fail(line, "expected a number, got '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(line, "number out of range: '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  const double d = to_double(v, line);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) fail(line, "expected an integer, got '" + v + "'");
  return i;
}

std::uint64_t to_u64(const std::string& v, int line) {
  try {
    return std::stoull(v);
  } catch (...) {
    fail(line, "expected an unsigned integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, "expected true/false, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& v, int line) {
  std::string cleaned = v;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::vector<int> out;
  int value;
  while (in >> value) out.push_back(value);
  if (!in.eof()) fail(line, "expected a list of integers, got '" + v + "'");
  if (out.empty()) fail(line, "empty integer list");
  return out;
}

std::vector<double> to_double_list(const std::string& v, int line, std::size_t count) {
  std::string cleaned = v;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::vector<double> out;
  double value;
  while (in >> value) out.push_back(value);
  if (out.size() != count)
    fail(line, "expected " + std::to_string(count) + " numbers, got " +
                   std::to_string(out.size()));
  return out;
}

template <typename T>
bool contains(const std::vector<T>& v, const T& x) {
  for (const auto& e : v)
    if (e == x) return true;
  return false;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::string join(const double* v, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + format_double(v[i]);
  return out;
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands = {
      "mesh", "solve-static", "solve-dynamic", "verify-extension", "korn", "convergence"};
  return commands;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;

  using Handler = std::function<void(const std::string&, int)>;
  const std::map<std::string, Handler> handlers = {
      {"command", [&](const std::string& v, int line) {
         if (!contains(known_commands(), v)) fail(line, "unknown command '" + v + "'");
         config.command = v;
       }},
      {"seed", [&](const std::string& v, int line) { config.seed = to_u64(v, line); }},
      {"box.lx", [&](const std::string& v, int line) { config.lx = to_double(v, line); }},
      {"box.ly", [&](const std::string& v, int line) { config.ly = to_double(v, line); }},
      {"box.lz", [&](const std::string& v, int line) { config.lz = to_double(v, line); }},
      {"box.nx", [&](const std::string& v, int line) { config.nx = to_int(v, line); }},
      {"box.ny", [&](const std::string& v, int line) { config.ny = to_int(v, line); }},
      {"box.nz", [&](const std::string& v, int line) { config.nz = to_int(v, line); }},
      {"material.mu_e",
       [&](const std::string& v, int line) { config.material.mu_e = to_double(v, line); }},
      {"material.lambda_e",
       [&](const std::string& v, int line) { config.material.lambda_e = to_double(v, line); }},
      {"material.mu_c",
       [&](const std::string& v, int line) { config.material.mu_c = to_double(v, line); }},
      {"material.mu_micro",
       [&](const std::string& v, int line) { config.material.mu_micro = to_double(v, line); }},
      {"material.lambda_micro",
       [&](const std::string& v, int line) { config.material.lambda_micro = to_double(v, line); }},
      {"material.mu_macro",
       [&](const std::string& v, int line) { config.material.mu_macro = to_double(v, line); }},
      {"material.l_c",
       [&](const std::string& v, int line) { config.material.l_c = to_double(v, line); }},
      {"static.case", [&](const std::string& v, int line) {
         if (v != "inline" && !contains(manufactured_case_names(), v))
           fail(line, "unknown static case '" + v + "'");
         config.static_case = v;
       }},
      {"static.lifting", [&](const std::string& v, int line) {
         if (v != "direct" && v != "constructive") fail(line, "unknown lifting path '" + v + "'");
         config.lifting = v;
       }},
      {"static.g_const", [&](const std::string& v, int line) {
         const auto vals = to_double_list(v, line, 3);
         for (int i = 0; i < 3; ++i) config.inline_g_const[i] = vals[i];
       }},
      {"static.g_linear", [&](const std::string& v, int line) {
         const auto vals = to_double_list(v, line, 9);
         for (int i = 0; i < 9; ++i) config.inline_g_linear[i] = vals[i];
       }},
      {"dynamic.case", [&](const std::string& v, int line) {
         if (!contains(dynamic_case_names(), v)) fail(line, "unknown dynamic case '" + v + "'");
         config.dynamic_case = v;
       }},
      {"dynamic.integrator", [&](const std::string& v, int line) {
         if (v != "midpoint" && v != "newmark") fail(line, "unknown integrator '" + v + "'");
         config.integrator = v;
       }},
      {"dynamic.init", [&](const std::string& v, int line) {
         if (v != "from-boundary" && v != "zero" && v != "random")
           fail(line, "unknown initial-data mode '" + v + "'");
         config.dynamic_init = v;
       }},
      {"dynamic.dt", [&](const std::string& v, int line) { config.dt = to_double(v, line); }},
      {"dynamic.steps", [&](const std::string& v, int line) { config.steps = to_int(v, line); }},
      {"dynamic.output_every",
       [&](const std::string& v, int line) { config.output_every = to_int(v, line); }},
      {"dynamic.omega", [&](const std::string& v, int line) { config.omega = to_double(v, line); }},
      {"extension.levels",
       [&](const std::string& v, int line) { config.extension_levels = to_int_list(v, line); }},
      {"extension.ensemble_random",
       [&](const std::string& v, int line) { config.ensemble_random = to_int(v, line); }},
      {"korn.levels",
       [&](const std::string& v, int line) { config.korn_levels = to_int_list(v, line); }},
      {"korn.coercivity_levels",
       [&](const std::string& v, int line) { config.coercivity_levels = to_int_list(v, line); }},
      {"convergence.case", [&](const std::string& v, int line) {
         if (!contains(manufactured_case_names(), v))
           fail(line, "unknown convergence case '" + v + "'");
         config.convergence_case = v;
       }},
      {"convergence.levels",
       [&](const std::string& v, int line) { config.convergence_levels = to_int_list(v, line); }},
      {"output.dump_matrix",
       [&](const std::string& v, int line) { config.dump_matrix = to_bool(v, line); }},
      {"output.write_vtk",
       [&](const std::string& v, int line) { config.write_vtk = to_bool(v, line); }},
  };

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (key.find('.') == std::string::npos && !section.empty()) key = section + "." + key;

    const auto it = handlers.find(key);
    if (it == handlers.end()) fail(line_no, "unknown key '" + key + "'");
    it->second(value, line_no);
  }

  // Validation beyond syntax.
  const auto violations = validate_params(config.material);
  if (!violations.empty()) {
    std::string msg = "config validation error: material parameters invalid:";
    for (const auto& v : violations) msg += " {" + v + "}";
    throw std::runtime_error(msg);
  }
  if (!(config.lx > 0.0) || !(config.ly > 0.0) || !(config.lz > 0.0) || config.nx < 1 ||
      config.ny < 1 || config.nz < 1)
    throw std::runtime_error("config validation error: box spec must be positive");
  if (!(config.dt > 0.0) || config.steps < 1 || config.output_every < 1)
    throw std::runtime_error("config validation error: dynamic settings must be positive");
  for (const auto& levels :
       {config.extension_levels, config.korn_levels, config.coercivity_levels,
        config.convergence_levels})
    for (int l : levels)
      if (l < 1) throw std::runtime_error("config validation error: levels must be positive");
  if (config.ensemble_random < 0)
    throw std::runtime_error("config validation error: ensemble_random must be >= 0");
  return config;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  if (!c.command.empty()) out << "command = " << c.command << "\n";
  out << "seed = " << c.seed << "\n";
  out << "\n[box]\n";
  out << "lx = " << format_double(c.lx) << "\n";
  out << "ly = " << format_double(c.ly) << "\n";
  out << "lz = " << format_double(c.lz) << "\n";
  out << "nx = " << c.nx << "\n";
  out << "ny = " << c.ny << "\n";
  out << "nz = " << c.nz << "\n";
  out << "\n[material]\n";
  out << "mu_e = " << format_double(c.material.mu_e) << "\n";
  out << "lambda_e = " << format_double(c.material.lambda_e) << "\n";
  out << "mu_c = " << format_double(c.material.mu_c) << "\n";
  out << "mu_micro = " << format_double(c.material.mu_micro) << "\n";
  out << "lambda_micro = " << format_double(c.material.lambda_micro) << "\n";
  out << "mu_macro = " << format_double(c.material.mu_macro) << "\n";
  out << "l_c = " << format_double(c.material.l_c) << "\n";
  out << "\n[static]\n";
  out << "case = " << c.static_case << "\n";
  out << "lifting = " << c.lifting << "\n";
  out << "g_const = " << join(c.inline_g_const.data(), 3) << "\n";
  out << "g_linear = " << join(c.inline_g_linear.data(), 9) << "\n";
  out << "\n[dynamic]\n";
  out << "case = " << c.dynamic_case << "\n";
  out << "integrator = " << c.integrator << "\n";
  out << "init = " << c.dynamic_init << "\n";
  out << "dt = " << format_double(c.dt) << "\n";
  out << "steps = " << c.steps << "\n";
  out << "output_every = " << c.output_every << "\n";
  out << "omega = " << format_double(c.omega) << "\n";
  out << "\n[extension]\n";
  out << "levels = " << join(c.extension_levels) << "\n";
  out << "ensemble_random = " << c.ensemble_random << "\n";
  out << "\n[korn]\n";
  out << "levels = " << join(c.korn_levels) << "\n";
  out << "coercivity_levels = " << join(c.coercivity_levels) << "\n";
  out << "\n[convergence]\n";
  out << "case = " << c.convergence_case << "\n";
  out << "levels = " << join(c.convergence_levels) << "\n";
  out << "\n[output]\n";
  out << "dump_matrix = " << (c.dump_matrix ? "true" : "false") << "\n";
  out << "write_vtk = " << (c.write_vtk ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace micromorph
