#include "spcdt/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "spcdt/analysis.hpp"
#include "spcdt/error.hpp"
#include "spcdt/pairing.hpp"
#include "spcdt/render.hpp"
#include "spcdt/scene_json.hpp"
#include "spcdt/service.hpp"

namespace spcdt {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError(fmt::format("cannot write '{}'", path));
  file << content;
}

fs::path data_dir() {
  if (const char* env = std::getenv("SPCDT_DATA_DIR")) return env;
  return "data";
}

// A dataset argument is a path, or a name looked up in the data directory.
fs::path resolve_data(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  for (const fs::path& candidate : {data_dir() / arg, data_dir() / (arg + ".csv")}) {
    if (fs::exists(candidate)) return candidate;
  }
  throw InputError(fmt::format("cannot find dataset '{}'", arg));
}

DecisionTree load_tree(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return tree_from_json(text);
  return parse_tree_text(text);
}

struct DataFlags {
  std::string label_column = "class";
  std::string missing_token = "?";
  std::vector<std::string> ranges;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--label-column", label_column, "Name of the class column")->capture_default_str();
    cmd->add_option("--missing-token", missing_token, "Token marking a missing value")->capture_default_str();
    cmd->add_option("--range", ranges, "Declared attribute range, name=lo:hi (repeatable)");
  }

  CsvOptions csv() const {
    CsvOptions options;
    options.label_column = label_column;
    options.missing_token = missing_token;
    for (const std::string& r : ranges) {
      const auto eq = r.find('=');
      const auto colon = r.rfind(':');
      if (eq == std::string::npos || colon == std::string::npos || colon < eq) {
        throw InputError(fmt::format("range '{}' is not name=lo:hi", r));
      }
      try {
        options.declared_ranges[r.substr(0, eq)] = {std::stod(r.substr(eq + 1, colon - eq - 1)),
                                                    std::stod(r.substr(colon + 1))};
      } catch (const std::exception&) {
        throw InputError(fmt::format("range '{}' has a non-numeric bound", r));
      }
    }
    return options;
  }

  Dataset load(const std::string& arg) const { return load_csv_file(resolve_data(arg), csv()); }
};

struct SplitFlags {
  double train_fraction = 0.0;
  std::uint64_t seed = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--train-fraction", train_fraction, "Hold out 1 - fraction of the data for validation");
    cmd->add_option("--seed", seed, "Seed of the shuffled split")->capture_default_str();
  }
};

std::set<RegionRef> parse_regions(const std::vector<std::string>& items) {
  std::set<RegionRef> out;
  for (const std::string& s : items) {
    const auto colon = s.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(s);
      out.insert({std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))});
    } catch (const std::exception&) {
      throw InputError(fmt::format("region selector '{}' is not plot:region", s));
    }
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision trees in shifted paired coordinates: parse, induce, evaluate, render and audit."};
  app.name("spcdt");
  app.require_subcommand(1);

  DataFlags data_flags;
  SplitFlags split_flags;
  std::string tree_path, data_arg, out_path, validation_arg;
  bool as_json = false;

  auto* parse = app.add_subcommand("parse", "Tree text to canonical JSON");
  parse->add_option("--tree", tree_path, "Tree text file")->required();
  parse->add_option("--out", out_path, "Output file (default stdout)");

  InduceParams induce_params;
  bool as_text = false;
  auto* induce = app.add_subcommand("induce", "Induce a tree from a dataset");
  induce->add_option("--data", data_arg, "CSV file or dataset name")->required();
  induce->add_option("--out", out_path, "Output file (default stdout)");
  induce->add_option("--min-leaf", induce_params.min_leaf)->capture_default_str();
  induce->add_option("--max-depth", induce_params.max_depth)->capture_default_str();
  induce->add_option("--min-gain", induce_params.min_gain)->capture_default_str();
  induce->add_flag("--text", as_text, "Write the tree text format instead of JSON");
  data_flags.add_to(induce);
  split_flags.add_to(induce);

  auto* eval = app.add_subcommand("eval", "Error rate and confusion matrix");
  eval->add_option("--tree", tree_path, "Tree JSON or text")->required();
  eval->add_option("--data", data_arg, "CSV file or dataset name")->required();
  eval->add_flag("--json", as_json, "Print JSON");
  data_flags.add_to(eval);

  std::string layout_path, trace = "terminate", summary = "none", density_arg, scene_json_path;
  double jitter = 0.0;
  bool context = false;
  std::vector<std::string> condensed;
  RenderConfig render_config;
  auto* render = app.add_subcommand("render", "Draw the tree and the cases as SVG");
  render->add_option("--tree", tree_path, "Tree JSON or text")->required();
  render->add_option("--data", data_arg, "CSV file or dataset name")->required();
  render->add_option("--out", out_path, "SVG output (default stdout)");
  render->add_option("--layout", layout_path, "Layout overrides JSON");
  render->add_option("--trace", trace, "terminate|full")->capture_default_str();
  render->add_option("--summary", summary, "none|centers|minmax")->capture_default_str();
  render->add_option("--jitter", jitter, "Spread coincident vertices by up to this many scene units");
  render->add_flag("--context", context, "Add plots for attributes the tree does not use");
  render->add_option("--condense", condensed, "Condense region plot:region (repeatable)");
  render->add_option("--density", density_arg, "Shade regions by this dataset's counts");
  render->add_option("--scene-json", scene_json_path, "Also write the scene JSON here");
  render->add_option("--width", render_config.width)->capture_default_str();
  render->add_option("--height", render_config.height)->capture_default_str();
  data_flags.add_to(render);

  std::string kind;
  std::optional<double> epsilon;
  auto* report = app.add_subcommand("report", "Audit reports");
  report->add_option("kind", kind, "overgen|margins|split-compare")
      ->required()
      ->check(CLI::IsMember({"overgen", "margins", "split-compare"}));
  report->add_option("--tree", tree_path, "Tree JSON or text (split-compare induces one when omitted)");
  report->add_option("--data", data_arg, "CSV file or dataset name")->required();
  report->add_option("--validation", validation_arg, "Validation CSV for split-compare");
  report->add_option("--epsilon", epsilon, "Borderline distance for margins (default 1% of the range)");
  report->add_flag("--json", as_json, "Print JSON");
  data_flags.add_to(report);
  split_flags.add_to(report);

  std::string host = "127.0.0.1", static_dir, serve_data_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Start the HTTP/JSON service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--data-dir", serve_data_dir, "Directory of <dataset_id>.csv files (default $SPCDT_DATA_DIR)");
  serve->add_option("--static", static_dir, "Directory served at / (the UI bundle)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (parse->parsed()) {
      write_output(out_path, tree_to_json(load_tree(tree_path)), out);
    } else if (induce->parsed()) {
      Dataset data = data_flags.load(data_arg);
      if (split_flags.train_fraction > 0.0) data = split(data, split_flags.train_fraction, split_flags.seed).first;
      const DecisionTree tree = induce_id3(data, induce_params);
      write_output(out_path, as_text ? print_tree_text(tree) : tree_to_json(tree), out);
    } else if (eval->parsed()) {
      const EvaluationReport r = evaluate(load_tree(tree_path), data_flags.load(data_arg));
      out << (as_json ? evaluation_to_json(r).dump(2) + "\n" : format_evaluation(r));
    } else if (render->parsed()) {
      const DecisionTree tree = load_tree(tree_path);
      const Dataset data = data_flags.load(data_arg);
      const PairingPlan plan = derive_plot_units(tree, data);
      if (plan.empty()) err << "note: " << plan.diagnostic << "\n";

      SceneOptions options;
      options.trace_mode = parse_trace_mode(trace);
      options.summary = parse_summary_mode(summary);
      options.jitter = jitter;
      options.context = context;
      std::vector<PlotPlacement> placements = default_placement(plan);
      if (!layout_path.empty()) {
        const LayoutOverrides layout = layout_from_json(parse_json(read_file(layout_path)));
        patch_options(options, layout.options);
        for (const PlotPlacement& p : layout.placements) {
          std::erase_if(placements, [&](const PlotPlacement& q) { return q.plot_id == p.plot_id; });
          placements.push_back(p);
        }
      }
      for (const RegionRef& r : parse_regions(condensed)) options.condensed_regions.insert(r);

      SceneGraph scene = build_scene(tree, plan, data, placements, options);
      if (!density_arg.empty()) scene = density_shading(scene, data_flags.load(density_arg));
      for (const std::string& w : scene.warnings) err << "warning: " << w << "\n";
      write_output(out_path, to_svg(scene, render_config), out);
      if (!scene_json_path.empty()) write_output(scene_json_path, scene_to_json(scene).dump(2) + "\n", out);
    } else if (report->parsed()) {
      Dataset data = data_flags.load(data_arg);
      if (kind == "split-compare") {
        Dataset validation;
        if (!validation_arg.empty()) {
          validation = data_flags.load(validation_arg);
        } else if (split_flags.train_fraction > 0.0) {
          auto [train, rest] = split(data, split_flags.train_fraction, split_flags.seed);
          data = std::move(train);
          validation = std::move(rest);
        } else {
          throw InputError("split-compare needs --validation or --train-fraction");
        }
        const DecisionTree tree = tree_path.empty() ? induce_id3(data) : load_tree(tree_path);
        const SplitCompareReport r = split_compare(tree, data, validation);
        out << (as_json ? to_json(r).dump(2) + "\n" : format_report(r));
      } else {
        if (tree_path.empty()) throw InputError(fmt::format("{} needs --tree", kind));
        const DecisionTree tree = load_tree(tree_path);
        if (kind == "overgen") {
          const OvergenReport r = overgeneralization(tree, data);
          out << (as_json ? to_json(r).dump(2) + "\n" : format_report(r));
        } else {
          const MarginReport r = margins(tree, data, epsilon);
          out << (as_json ? to_json(r).dump(2) + "\n" : format_report(r));
        }
      }
    } else if (serve->parsed()) {
      Service service({serve_data_dir.empty() ? data_dir() : fs::path(serve_data_dir)});
      HttpServer server(service, static_dir.empty() ? std::nullopt : std::optional<fs::path>(static_dir));
      const int bound = server.bind(host, port);
      err << fmt::format("listening on http://{}:{}\n", host, bound);
      err.flush();
      server.run();
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spcdt
