#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bgdisc/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<int> n;
  std::vector<double> tau;
  std::optional<double> tolerance;
  std::optional<std::string> truncation;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<int> samples;
  std::optional<int> workers;
  std::optional<int> n_max;
  std::optional<std::string> stratum;
  std::optional<std::string> svg;
  std::vector<double> x;
  std::optional<int> dimension;
  std::optional<std::string> expect;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file; flags override its fields");
  sub->add_option("--n", f.n, "embedding degree (jordan-bound: first n of the table)");
  sub->add_option("--tau", f.tau, "period as two numbers: re im")->expected(2);
  sub->add_option("--tolerance", f.tolerance, "lattice equality threshold");
  sub->add_option("--truncation", f.truncation, "theta series cutoff, or auto");
  sub->add_option("--seed", f.seed, "seed for every random choice");
  sub->add_option("--output", f.output, "report path (default: stdout)");
  sub->add_option("--format", f.format, "json or text");
  sub->add_option("--samples", f.samples, "number of seed-indexed probes");
  sub->add_option("--workers", f.workers, "concurrent probes");
  sub->add_option("--n-max", f.n_max, "jordan-bound: last n of the table");
  sub->add_option("--stratum", f.stratum, "random, double or top");
  sub->add_option("--svg", f.svg, "dual-sextic: write an SVG of the real slice");
  sub->add_option("--x", f.x, "point as lattice coordinates a b")->expected(2);
  sub->add_option("--dimension", f.dimension, "classify: dimension of the subvariety");
  sub->add_option("--expect", f.expect, "classify: expected verdict");
}

bgdisc::RunConfig build_config(const Flags& f) {
  using namespace bgdisc;
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config_file(f.config);
  json o = json::object();
  if (f.n) o["n"] = *f.n;
  if (!f.tau.empty()) o["tau"] = f.tau;
  if (f.tolerance) o["tolerance"] = *f.tolerance;
  if (f.truncation) {
    if (*f.truncation == "auto") {
      o["truncation"] = "auto";
    } else {
      try {
        o["truncation"] = std::stoi(*f.truncation);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "truncation must be an integer or auto");
      }
    }
  }
  if (f.seed) o["seed"] = *f.seed;
  if (f.output) o["output"] = *f.output;
  if (f.format) o["format"] = *f.format;
  if (f.samples) o["samples"] = *f.samples;
  if (f.workers) o["workers"] = *f.workers;
  if (f.n_max) o["n_max"] = *f.n_max;
  if (f.stratum) o["stratum"] = *f.stratum;
  if (f.svg) o["svg"] = *f.svg;
  if (!f.x.empty()) o["x"] = f.x;
  if (f.dimension) o["dimension"] = *f.dimension;
  if (f.expect) o["expect"] = *f.expect;
  return merge_config(std::move(cfg), o);
}

// BGDISC_OUTPUT_DIR relocates the report, keeping its file name.
std::string output_path(const bgdisc::RunConfig& cfg, const std::string& command) {
  const char* dir = std::getenv("BGDISC_OUTPUT_DIR");
  if (!dir || !*dir) return cfg.output;
  const std::string name = cfg.output.empty() ? command + (cfg.format == "text" ? ".txt" : ".json")
                                              : std::filesystem::path(cfg.output).filename().string();
  return (std::filesystem::path(dir) / name).string();
}

const std::map<std::string, std::string> kDescriptions{
    {"embed", "check the theta embedding: osculating ranks, Heisenberg action"},
    {"section", "zeros of random sections and their Abel sums"},
    {"discriminant-degree", "count pencil hits on the discriminant"},
    {"multiplicity", "line multiplicity against contact order on a stratum"},
    {"stratify", "top stratum points of multiplicity n-1"},
    {"dual-sextic", "fit the n = 3 dual curve and locate its cusps"},
    {"fiber-type", "zero pattern of one hyperplane"},
    {"classify", "verdict for a curve in E^n and a line bundle L"},
    {"jordan-bound", "exact Jordan constant bounds up to n-max"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bgdisc: discriminant geometry of elliptic normal curves and related bounds"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<CLI::App*> subs;
  for (const auto& name : bgdisc::command_names()) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    add_flags(sub, flags);
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  bgdisc::json report;
  std::string format = "json";
  std::string path;
  try {
    const bgdisc::RunConfig cfg = build_config(flags);
    format = cfg.format;
    path = output_path(cfg, command);
    report = bgdisc::run_command(command, cfg);
  } catch (const bgdisc::Error& e) {
    report = bgdisc::error_report(command, std::string(bgdisc::to_string(e.kind())), e.what());
  } catch (const bgdisc::json::exception& e) {
    report = bgdisc::error_report(command, "config", e.what());
  }

  const std::string text = format == "text" ? bgdisc::render_text(report) : report.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << path << '\n';
      return 2;
    }
    out << text;
  }
  return bgdisc::exit_code(report);
}
