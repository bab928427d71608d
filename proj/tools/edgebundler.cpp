// Command-line front end: reads a positioned graph, runs the bundling
// pipeline, writes the drawing, per-edge routes and a stats record. The
// --ordering-only mode runs the path ordering solvers on a standalone
// instance file.
//
// Exit codes: 0 success, 2 input error, 3 unroutable edge, 4 internal
// invariant violation.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bundling/errors.hpp"
#include "bundling/io.hpp"
#include "bundling/ordering.hpp"
#include "bundling/pipeline.hpp"

namespace {

int run_ordering_only(const std::string& file, const std::string& algo) {
  std::ifstream is(file);
  if (!is) {
    std::cerr << "error: cannot open instance file '" << file << "'\n";
    return 2;
  }
  bundling::OrderInstance instance = bundling::parse_order_instance(is);
  int crossings = 0;
  if (algo == "simple") {
    crossings = bundling::count_crossings(instance, bundling::order_simple(instance));
  } else if (algo == "linear") {
    crossings = bundling::count_crossings(instance, bundling::order_linear(instance));
  } else {
    int cs = bundling::count_crossings(instance, bundling::order_simple(instance));
    int cl = bundling::count_crossings(instance, bundling::order_linear(instance));
    if (cs != cl) {
      std::cerr << "error: ordering algorithms disagree: simple=" << cs << " linear=" << cl
                << "\n";
      return 4;
    }
    crossings = cl;
  }
  std::cout << "paths " << instance.paths().size() << "\n";
  std::cout << "crossings " << crossings << "\n";
  return 0;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  os << content;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ordered edge bundling: routes graph edges as separated metro-line bundles"};

  std::string input_file;
  std::string svg_out, routes_out, stats_out;
  std::string ordering_algo = "both";
  std::string ordering_only_file;
  bundling::PipelineConfig config;
  double k_cap = -1.0;
  bool dump_capacity = false, trace_nudge = false, no_timestamp = false, svg_debug = false;

  app.add_option("input", input_file, "input graph file");
  app.add_option("--k-ink", config.k_ink, "ink weight")->capture_default_str();
  app.add_option("--k-len", config.k_len, "normalized path length weight")->capture_default_str();
  app.add_option("--k-cap", k_cap, "capacity overflow weight (default 10*(k_ink+k_len))");
  app.add_option("--width", config.default_width, "default path width")->capture_default_str();
  app.add_option("--separation", config.separation, "path separation")->capture_default_str();
  app.add_option("--cone-angle", config.cone_angle, "visibility cone aperture (radians)")
      ->capture_default_str();
  app.add_option("--max-corners", config.max_corners, "obstacle hull corner bound")
      ->capture_default_str();
  app.add_option("--multi-dp", config.multi_dp_threshold,
                 "route >=N edges per source with the exact multi-path solver (0 = off)");
  app.add_option("--ordering", ordering_algo, "ordering algorithm: simple, linear or both")
      ->check(CLI::IsMember({"simple", "linear", "both"}))
      ->capture_default_str();
  app.add_flag("--dump-capacity", dump_capacity, "print the capacity segment table");
  app.add_flag("--trace-nudge", trace_nudge, "log every optimizer move to stderr");
  app.add_option("--svg", svg_out, "write the drawing here");
  app.add_option("--routes", routes_out, "write per-edge route records here");
  app.add_option("--stats", stats_out, "write the stats record here");
  app.add_option("--seed", config.seed, "seed echoed into the stats record");
  app.add_flag("--no-timestamp", no_timestamp, "omit timestamp and timings for stable output");
  app.add_flag("--svg-debug", svg_debug, "include obstacle and hub layers in the drawing");
  app.add_option("--ordering-only", ordering_only_file,
                 "run the ordering solver on an instance file and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!ordering_only_file.empty()) return run_ordering_only(ordering_only_file, ordering_algo);

    if (input_file.empty()) {
      std::cerr << "error: no input file\n";
      return 2;
    }
    std::ifstream is(input_file);
    if (!is) {
      std::cerr << "error: cannot open input file '" << input_file << "'\n";
      return 2;
    }
    bundling::InputGraph graph = bundling::parse_input_graph(is);

    if (k_cap >= 0) config.k_cap = k_cap;
    config.timestamp = !no_timestamp;
    config.debug_layers = svg_debug;
    config.ordering = ordering_algo == "simple"   ? bundling::OrderingAlgo::Simple
                      : ordering_algo == "linear" ? bundling::OrderingAlgo::Linear
                                                  : bundling::OrderingAlgo::Both;

    bundling::PipelineResult result =
        bundling::run_pipeline(graph, config, trace_nudge ? &std::cerr : nullptr);

    if (dump_capacity) std::cout << result.capacity_table;
    if (!svg_out.empty() && !write_file(svg_out, result.svg)) return 2;
    if (!routes_out.empty() && !write_file(routes_out, result.routes_json)) return 2;
    if (!stats_out.empty() && !write_file(stats_out, result.stats_json)) return 2;
    if (svg_out.empty() && routes_out.empty() && stats_out.empty() && !dump_capacity)
      std::cout << result.stats_json;
    return 0;
  } catch (const bundling::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const bundling::UnroutableError& e) {
    std::cerr << "unroutable: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
