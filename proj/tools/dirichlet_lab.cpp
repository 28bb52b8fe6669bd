// Command-line front end; everything goes through the C API.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlab/dlab.h"

namespace {

using Json = nlohmann::json;

struct Owned {
  char* p = nullptr;
  ~Owned() { dlab_string_free(p); }
};

struct SpaceHandle {
  dlab_space* p = nullptr;
  ~SpaceHandle() { dlab_space_free(p); }
};

struct SpectrumHandle {
  dlab_spectrum* p = nullptr;
  ~SpectrumHandle() { dlab_spectrum_free(p); }
};

class Failure : public std::runtime_error {
 public:
  explicit Failure(const std::string& what, int code = 2) : std::runtime_error(what), code(code) {}
  int code;
};

void check(dlab_status s) {
  if (s != DLAB_OK) throw Failure(std::string(dlab_status_name(s)) + ": " + dlab_last_error());
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  f << content;
  if (!f) throw Failure("cannot write " + out_path);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Options {
  std::string space = "path:41";
  std::string domain = "whole";
  std::string potential = "zero";
  std::string target;
  std::string out;
  std::string config;
  std::string kind;
  std::vector<double> times{1.0};
  std::size_t k = 0;
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t start = 0;
  std::size_t paths = 0;
  double deadline = 1.0;
  double p = 2.0;
  std::uint64_t seed = 1;
};

CLI::App* with_common(CLI::App* sub, Options& o, bool config_file = true) {
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--out", o.out, "output file or directory");
  if (config_file) sub->add_option("--config", o.config, "JSON object of option values; the command line wins");
  return sub;
}

// For the query subcommands --config FILE names a JSON object keyed by option
// name; its entries are appended as arguments unless already given.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  if (args.empty() || args[0] == "verify" || args[0] == "plot") return args;
  auto at = std::find(args.begin(), args.end(), "--config");
  if (at == args.end() || at + 1 == args.end()) return args;
  const std::string path = *(at + 1);
  args.erase(at, at + 2);
  Json j;
  try {
    j = Json::parse(slurp(path));
  } catch (const Json::exception& e) {
    throw Failure("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Failure("config " + path + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const std::string flag = (key.size() == 1 ? "-" : "--") + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    args.push_back(flag);
    auto text = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_array()) {
      for (const auto& v : value) args.push_back(text(v));
    } else {
      args.push_back(text(value));
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet heat kernels, exit times and certificates on graphs"};
  app.require_subcommand(1);
  Options o;

  auto* build = with_common(app.add_subcommand("build-space", "write a space as JSON"), o);
  build->add_option("--space", o.space, "gasket:L | lattice:D:N[:periodic] | path:N");

  auto* eigs = with_common(app.add_subcommand("eigs", "Dirichlet eigenpairs of -Laplacian + V"), o);
  eigs->add_option("--space", o.space);
  eigs->add_option("--domain", o.domain, "whole | ball:c:r | cball:c:r | range:a:b | vertices:a,b");
  eigs->add_option("--potential", o.potential, "zero | const:c | well:c:r:depth | values:v0,v1");
  eigs->add_option("-k", o.k, "number of eigenpairs (0: all)");

  auto* heat = with_common(app.add_subcommand("heat", "heat kernel rows t,x,y,p,bound,ratio"), o);
  heat->add_option("--space", o.space);
  heat->add_option("--domain", o.domain);
  heat->add_option("--potential", o.potential);
  heat->add_option("--t", o.times, "times")->expected(1, -1);
  heat->add_option("-x", o.x);
  heat->add_option("-y", o.y);

  auto* hitting = with_common(app.add_subcommand("hitting", "P(hit target by deadline), exact and simulated"), o);
  hitting->add_option("--space", o.space);
  hitting->add_option("--target", o.target)->required();
  hitting->add_option("--start", o.start);
  hitting->add_option("--deadline", o.deadline);
  hitting->add_option("--paths", o.paths);

  auto* exit_time = with_common(app.add_subcommand("exit-time", "mean and median exit time of a domain"), o);
  exit_time->add_option("--space", o.space);
  exit_time->add_option("--domain", o.domain)->required();
  exit_time->add_option("--start", o.start);
  exit_time->add_option("--paths", o.paths);

  auto* norms = with_common(app.add_subcommand("norms", "Lebesgue and Lorentz norms of V-"), o);
  norms->add_option("--space", o.space);
  norms->add_option("--domain", o.domain);
  norms->add_option("--potential", o.potential)->required();
  norms->add_option("-p", o.p);

  auto* verify = with_common(app.add_subcommand("verify", "run a certificate suite"), o, false);
  verify->add_option("kind", o.kind, "hitting | lieb | keller | liouville | fk-local | wavelength | recurrent")
      ->required()
      ->check(CLI::IsMember({"hitting", "lieb", "keller", "liouville", "fk-local", "wavelength", "recurrent"}));
  verify->add_option("--config", o.config, "suite config (JSON)")->required();
  verify->get_option("--out")->required();

  auto* plot = with_common(app.add_subcommand("plot", "render a series spec (JSON) as SVG"), o, false);
  plot->add_option("--config", o.config, "series spec (JSON)")->required();

  try {
    auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const Failure& f) {
    std::cerr << "dirichlet-lab: " << f.what() << "\n";
    return f.code;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    SpaceHandle space;
    auto need_space = [&] { check(dlab_space_create(o.space.c_str(), &space.p)); };

    if (*build) {
      need_space();
      Owned j;
      check(dlab_space_json(space.p, &j.p));
      emit(o.out, j.p);
    } else if (*eigs) {
      need_space();
      SpectrumHandle spec;
      check(dlab_spectrum_create(space.p, o.domain.c_str(), o.potential.c_str(), &spec.p));
      Owned vals, modes;
      check(dlab_spectrum_csv(spec.p, o.k, &vals.p, &modes.p));
      if (o.out.empty()) {
        std::cout << vals.p;
      } else {
        std::filesystem::create_directories(o.out);
        emit(o.out + "/eigenvalues.csv", vals.p);
        emit(o.out + "/eigenvectors.csv", modes.p);
      }
    } else if (*heat) {
      need_space();
      SpectrumHandle spec;
      check(dlab_spectrum_create(space.p, o.domain.c_str(), o.potential.c_str(), &spec.p));
      Owned csv;
      check(dlab_heat_csv(space.p, spec.p, o.times.data(), o.times.size(), o.x, o.y, &csv.p));
      emit(o.out, csv.p);
    } else if (*hitting) {
      need_space();
      Owned j;
      check(dlab_hitting_json(space.p, o.target.c_str(), o.start, o.deadline, o.paths, o.seed, &j.p));
      emit(o.out, j.p);
    } else if (*exit_time) {
      need_space();
      Owned j;
      check(dlab_exit_time_json(space.p, o.domain.c_str(), o.start, o.paths, o.seed, &j.p));
      emit(o.out, j.p);
    } else if (*norms) {
      need_space();
      Owned j;
      check(dlab_norms_json(space.p, o.domain.c_str(), o.potential.c_str(), o.p, &j.p));
      emit(o.out, j.p);
    } else if (*verify) {
      std::string text = slurp(o.config);
      if (verify->count("--seed") > 0) {
        // The seed flag overrides the config; the document is re-serialised.
        Json j;
        try {
          j = Json::parse(text);
        } catch (const Json::exception&) {
          j = nullptr;  // let the library report the parse error with its line
        }
        if (j.is_object()) {
          j["seed"] = o.seed;
          text = j.dump(2);
        }
      }
      Owned message;
      const int code = dlab_verify(o.kind.c_str(), text.c_str(), o.out.c_str(), &message.p);
      (code == 0 ? std::cout : std::cerr) << (message.p ? message.p : "") << "\n";
      return code;
    } else if (*plot) {
      Owned svg;
      check(dlab_plot_svg(slurp(o.config).c_str(), &svg.p));
      emit(o.out, svg.p);
    }
  } catch (const Failure& f) {
    std::cerr << "dirichlet-lab: " << f.what() << "\n";
    return f.code;
  }
  return 0;
}
