// mrng command line: dataset generation, graph construction, search,
// verification, and the desk-scale experiment harness. Talks to the library
// exclusively through the C API.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mrng/mrng_c.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct StatusError {
  mrng_status status;
  std::string message;
};

void ok_or_throw(mrng_status status) {
  if (status != MRNG_OK) {
    throw StatusError{status, std::string(mrng_status_name(status)) + ": " + mrng_last_error()};
  }
}

int exit_code_for(mrng_status status) {
  switch (status) {
    case MRNG_IO_ERROR:
    case MRNG_FORMAT_ERROR:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

using DatasetPtr = std::unique_ptr<mrng_dataset, decltype(&mrng_dataset_free)>;
using GraphPtr = std::unique_ptr<mrng_graph, decltype(&mrng_graph_free)>;
using ConflictsPtr = std::unique_ptr<mrng_conflicts, decltype(&mrng_conflicts_free)>;
using ResultPtr = std::unique_ptr<mrng_search_result, decltype(&mrng_result_free)>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  mrng_string_free(s);
  return out;
}

struct GenSpec {
  uint32_t n = 0;
  uint32_t d = 0;
  uint64_t seed = 0;
};

GenSpec parse_gen_spec(const std::string& spec) {
  GenSpec out;
  bool have_n = false, have_d = false;
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    std::string item = spec.substr(pos, comma - pos);
    size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--gen", "expected key=value, got '" + item + "'");
    }
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    try {
      if (key == "n") {
        out.n = static_cast<uint32_t>(std::stoul(value));
        have_n = true;
      } else if (key == "d") {
        out.d = static_cast<uint32_t>(std::stoul(value));
        have_d = true;
      } else if (key == "seed") {
        out.seed = std::stoull(value);
      } else {
        throw CLI::ValidationError("--gen", "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("--gen", "bad number in '" + item + "'");
    }
    pos = comma + 1;
  }
  if (!have_n || !have_d) throw CLI::ValidationError("--gen", "n and d are required");
  return out;
}

uint32_t parse_pool_size(const std::string& pool) {
  if (pool == "full") return 0;
  if (pool.rfind("knn:", 0) == 0) {
    uint32_t l = static_cast<uint32_t>(std::stoul(pool.substr(4)));
    if (l == 0) throw CLI::ValidationError("--pool", "knn pool size must be >= 1");
    return l;
  }
  throw CLI::ValidationError("--pool", "expected 'full' or 'knn:L'");
}

uint32_t parse_bound(const std::string& value) {
  if (value == "unbounded") return MRNG_UNBOUNDED_DEGREE;
  return static_cast<uint32_t>(std::stoul(value));
}

DatasetPtr open_dataset(const std::string& path, const std::string& gen_spec) {
  mrng_dataset* ds = nullptr;
  if (!gen_spec.empty()) {
    GenSpec gen = parse_gen_spec(gen_spec);
    ok_or_throw(mrng_dataset_generate(gen.n, gen.d, gen.seed, &ds));
  } else if (!path.empty()) {
    ok_or_throw(mrng_dataset_load(path.c_str(), &ds));
  } else {
    throw CLI::ValidationError("--dataset", "need --dataset FILE or --gen n=..,d=..,seed=..");
  }
  return DatasetPtr(ds, mrng_dataset_free);
}

// ---- subcommand state ----

struct GenArgs {
  uint32_t n = 1000, d = 10;
  uint64_t seed = 0;
  std::string output;
};

struct BuildArgs {
  std::string dataset, gen, output, pool = "full", conflicts_out;
  std::string bound = "unbounded";
  bool exact = false;
  bool conflicts = false;
  uint64_t seed_label = 0;
  bool seed_label_set = false;
  uint32_t threads = 0;
};

struct SearchArgs {
  std::string graph, dataset, gen, query_file, conflict_file;
  std::vector<double> query;
  uint64_t budget = 0;
  uint32_t k = 1;
  int64_t entry = -1;
  bool escape = false;
  bool trace = false;
};

struct VerifyArgs {
  std::string graph, dataset, gen, checks = "all", output;
  uint64_t sample = MRNG_ALL_EDGES;
  uint32_t threads = 0;
};

struct ExperimentArgs {
  std::string kind;
  std::vector<uint32_t> ns{5000}, ds{10};
  std::vector<std::string> bounds;
  std::vector<uint32_t> budgets;
  uint32_t queries = 200, k = 1, threads = 0;
  uint64_t seed = 0;
  std::string output, format = "csv";
  bool force = false;
};

int run_gen(const GenArgs& args) {
  mrng_dataset* ds = nullptr;
  ok_or_throw(mrng_dataset_generate(args.n, args.d, args.seed, &ds));
  DatasetPtr dataset(ds, mrng_dataset_free);
  ok_or_throw(mrng_dataset_save(dataset.get(), args.output.c_str()));
  nlohmann::json j{{"n", args.n},
                   {"d", args.d},
                   {"seed", args.seed},
                   {"checksum", mrng_dataset_checksum(dataset.get())},
                   {"output", args.output}};
  std::printf("%s\n", j.dump().c_str());
  return kExitOk;
}

int run_build(const BuildArgs& args) {
  DatasetPtr dataset = open_dataset(args.dataset, args.gen);

  mrng_build_options options{};
  options.degree_bound = args.exact ? MRNG_UNBOUNDED_DEGREE : parse_bound(args.bound);
  options.knn_pool_size = args.exact ? 0 : parse_pool_size(args.pool);
  options.record_conflicts = args.conflicts ? 1 : 0;
  options.threads = args.threads;
  if (args.seed_label_set) {
    options.seed = args.seed_label;
  } else if (!args.gen.empty()) {
    options.seed = parse_gen_spec(args.gen).seed;
  }

  mrng_graph* graph = nullptr;
  mrng_conflicts* conflicts = nullptr;
  char* report = nullptr;
  ok_or_throw(mrng_build(dataset.get(), &options, &graph, args.conflicts ? &conflicts : nullptr,
                         &report));
  GraphPtr graph_ptr(graph, mrng_graph_free);
  ConflictsPtr conflicts_ptr(conflicts, mrng_conflicts_free);

  ok_or_throw(mrng_graph_save(graph_ptr.get(), args.output.c_str()));
  if (args.conflicts) {
    std::string path = args.conflicts_out.empty() ? args.output + ".conflicts" : args.conflicts_out;
    ok_or_throw(mrng_conflicts_save(conflicts_ptr.get(), graph_ptr.get(), path.c_str()));
  }
  std::printf("%s\n", take_string(report).c_str());
  return kExitOk;
}

int run_search(const SearchArgs& args) {
  mrng_graph* graph = nullptr;
  ok_or_throw(mrng_graph_load(args.graph.c_str(), &graph));
  GraphPtr graph_ptr(graph, mrng_graph_free);

  DatasetPtr dataset = open_dataset(args.dataset, args.gen);
  uint32_t dim = mrng_dataset_dim(dataset.get());
  uint32_t n = mrng_dataset_count(dataset.get());

  ConflictsPtr conflicts_ptr(nullptr, mrng_conflicts_free);
  if (args.escape) {
    if (args.conflict_file.empty()) {
      throw CLI::ValidationError("--escape", "needs --conflict-file");
    }
    mrng_conflicts* conflicts = nullptr;
    ok_or_throw(mrng_conflicts_load(args.conflict_file.c_str(), graph_ptr.get(), &conflicts));
    conflicts_ptr.reset(conflicts);
  }

  std::vector<double> queries;
  uint32_t query_count = 0;
  if (!args.query_file.empty()) {
    mrng_dataset* qset = nullptr;
    ok_or_throw(mrng_dataset_load(args.query_file.c_str(), &qset));
    DatasetPtr qptr(qset, mrng_dataset_free);
    if (mrng_dataset_dim(qptr.get()) != dim) {
      throw StatusError{MRNG_DIMENSION_MISMATCH, "query file dimension does not match dataset"};
    }
    query_count = mrng_dataset_count(qptr.get());
    queries.resize(static_cast<size_t>(query_count) * dim);
    for (uint32_t i = 0; i < query_count; ++i) {
      const double* p = mrng_dataset_point(qptr.get(), i);
      std::copy(p, p + dim, queries.begin() + static_cast<size_t>(i) * dim);
    }
  } else if (!args.query.empty()) {
    if (args.query.size() != dim) {
      throw StatusError{MRNG_DIMENSION_MISMATCH, "inline query dimension does not match dataset"};
    }
    queries = args.query;
    query_count = 1;
  } else {
    throw CLI::ValidationError("--query", "need --query-file or --query");
  }

  uint32_t entry;
  if (args.entry >= 0) {
    entry = static_cast<uint32_t>(args.entry);
  } else {
    ok_or_throw(mrng_pick_entry(dataset.get(), &entry));
  }
  uint64_t budget = args.budget > 0 ? args.budget : n;

  for (uint32_t qi = 0; qi < query_count; ++qi) {
    const double* q = queries.data() + static_cast<size_t>(qi) * dim;
    mrng_search_result* result = nullptr;
    if (args.escape) {
      ok_or_throw(mrng_search_with_escape(graph_ptr.get(), dataset.get(), conflicts_ptr.get(),
                                          entry, q, budget, args.k, &result));
    } else {
      ok_or_throw(
          mrng_best_first(graph_ptr.get(), dataset.get(), entry, q, budget, args.k, &result));
    }
    ResultPtr result_ptr(result, mrng_result_free);

    if (args.trace) {
      char* trace = nullptr;
      ok_or_throw(mrng_result_trace_json(result_ptr.get(), &trace));
      std::fputs(take_string(trace).c_str(), stdout);
    }

    nlohmann::json candidates = nlohmann::json::array();
    for (uint32_t i = 0; i < mrng_result_candidate_count(result_ptr.get()); ++i) {
      uint32_t id;
      double dist;
      ok_or_throw(mrng_result_candidate(result_ptr.get(), i, &id, &dist));
      candidates.push_back({{"id", id}, {"distance", dist}});
    }
    nlohmann::json j{{"query", qi},
                     {"candidates", candidates},
                     {"distance_evals", mrng_result_distance_evals(result_ptr.get())},
                     {"terminated_at_local_min",
                      mrng_result_terminated_at_local_min(result_ptr.get()) != 0}};
    std::printf("%s\n", j.dump().c_str());
  }
  return kExitOk;
}

int run_verify(const VerifyArgs& args) {
  DatasetPtr dataset = open_dataset(args.dataset, args.gen);

  GraphPtr graph_ptr(nullptr, mrng_graph_free);
  if (!args.graph.empty()) {
    mrng_graph* graph = nullptr;
    ok_or_throw(mrng_graph_load(args.graph.c_str(), &graph));
    graph_ptr.reset(graph);
  } else {
    // no graph file: build the exact graph and verify it in place
    mrng_build_options options{};
    options.degree_bound = MRNG_UNBOUNDED_DEGREE;
    options.threads = args.threads;
    mrng_graph* graph = nullptr;
    ok_or_throw(mrng_build(dataset.get(), &options, &graph, nullptr, nullptr));
    graph_ptr.reset(graph);
  }

  bool all = args.checks == "all";
  auto wants = [&](const char* name) {
    return all || args.checks.find(name) != std::string::npos;
  };

  nlohmann::json report;
  bool passed = true;
  auto run_one = [&](const char* name, auto&& fn) {
    int check_passed = 0;
    char* json = nullptr;
    ok_or_throw(fn(&check_passed, &json));
    report[name] = nlohmann::json::parse(take_string(json));
    passed = passed && check_passed != 0;
  };

  if (wants("definition")) {
    run_one("definition", [&](int* p, char** j) {
      return mrng_check_mrng_definition(graph_ptr.get(), dataset.get(), p, j);
    });
  }
  if (wants("monotonic")) {
    run_one("monotonic", [&](int* p, char** j) {
      return mrng_check_monotonic(graph_ptr.get(), dataset.get(), p, j);
    });
  }
  if (wants("angles")) {
    run_one("angles", [&](int* p, char** j) {
      return mrng_check_angle_separation(graph_ptr.get(), dataset.get(), p, j);
    });
  }
  if (wants("minimality")) {
    run_one("minimality", [&](int* p, char** j) {
      return mrng_check_edge_minimality(graph_ptr.get(), dataset.get(), args.sample, p, j);
    });
  }
  if (report.empty()) {
    throw CLI::ValidationError(
        "--checks", "no known checks selected (definition, monotonic, angles, minimality, all)");
  }
  report["passed"] = passed;

  std::string text = report.dump(2) + "\n";
  if (!args.output.empty()) {
    FILE* f = std::fopen(args.output.c_str(), "wb");
    if (!f) throw StatusError{MRNG_IO_ERROR, "cannot open for writing: " + args.output};
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  } else {
    std::fputs(text.c_str(), stdout);
  }
  return passed ? kExitOk : kExitCheckFailed;
}

int run_experiment(const ExperimentArgs& args) {
  std::vector<uint32_t> bounds;
  for (const std::string& b : args.bounds) bounds.push_back(parse_bound(b));

  mrng_experiment_config cfg{};
  cfg.kind = args.kind.c_str();
  cfg.ns = args.ns.data();
  cfg.ns_len = args.ns.size();
  cfg.ds = args.ds.data();
  cfg.ds_len = args.ds.size();
  cfg.degree_bounds = bounds.empty() ? nullptr : bounds.data();
  cfg.degree_bounds_len = bounds.size();
  cfg.budgets = args.budgets.empty() ? nullptr : args.budgets.data();
  cfg.budgets_len = args.budgets.size();
  cfg.n_queries = args.queries;
  cfg.k = args.k;
  cfg.seed = args.seed;
  cfg.output_path = args.output.empty() ? nullptr : args.output.c_str();
  cfg.format = args.format.c_str();
  cfg.threads = args.threads;
  cfg.force = args.force ? 1 : 0;

  char* summary = nullptr;
  ok_or_throw(mrng_experiment_run(&cfg, &summary));
  std::fputs(take_string(summary).c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotonic proximity graphs: construction, search, verification, experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mrng_version());

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a uniform dataset file");
  gen->add_option("--n", gen_args.n, "point count")->required();
  gen->add_option("--d", gen_args.d, "dimension")->required();
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("-o,--output", gen_args.output, "output dataset file")->required();

  BuildArgs build_args;
  auto* build = app.add_subcommand("build", "Build a graph from a dataset");
  build->add_option("dataset", build_args.dataset, "dataset file");
  build->add_option("--gen", build_args.gen, "generate dataset inline: n=..,d=..,seed=..");
  build->add_flag("--exact", build_args.exact, "exact graph (unbounded degree, full pool)");
  build->add_option("--degree-bound", build_args.bound, "degree bound or 'unbounded'");
  build->add_option("--pool", build_args.pool, "candidate pool: full or knn:L");
  build->add_flag("--conflicts", build_args.conflicts, "also compute and save the conflict map");
  build->add_option("--conflicts-output", build_args.conflicts_out,
                    "conflict file path (default: <output>.conflicts)");
  build->add_option("--seed", build_args.seed_label, "seed label recorded in the graph meta")
      ->each([&](const std::string&) { build_args.seed_label_set = true; });
  build->add_option("--threads", build_args.threads, "worker threads (0 = all)");
  build->add_option("-o,--output", build_args.output, "output graph file")->required();

  SearchArgs search_args;
  auto* search = app.add_subcommand("search", "Search a graph for nearest neighbors");
  search->add_option("graph", search_args.graph, "graph file")->required();
  search->add_option("--dataset", search_args.dataset, "dataset file");
  search->add_option("--gen", search_args.gen, "regenerate dataset inline: n=..,d=..,seed=..");
  search->add_option("--query-file", search_args.query_file, "query vectors file");
  search->add_option("--query", search_args.query, "inline query coordinates")->delimiter(',');
  search->add_option("--budget", search_args.budget, "distance evaluation budget (0 = n)");
  search->add_option("--k", search_args.k, "neighbors to return");
  search->add_option("--entry", search_args.entry, "entry node id (default: medoid)");
  search->add_flag("--escape", search_args.escape, "use conflict-set escape at local minima");
  search->add_option("--conflict-file", search_args.conflict_file, "conflict map file");
  search->add_flag("--trace", search_args.trace, "emit trace JSON lines");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run structural checks against a graph");
  verify->add_option("graph", verify_args.graph, "graph file (omit to build exact in place)");
  verify->add_option("--dataset", verify_args.dataset, "dataset file");
  verify->add_option("--gen", verify_args.gen, "regenerate dataset inline: n=..,d=..,seed=..");
  verify->add_option("--checks", verify_args.checks,
                     "comma list: definition,monotonic,angles,minimality or 'all'");
  verify->add_option("--sample", verify_args.sample, "edges sampled by the minimality check");
  verify->add_option("--threads", verify_args.threads, "worker threads (0 = all)");
  verify->add_option("-o,--output", verify_args.output, "write the JSON report here");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Run a measurement harness");
  experiment->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", exp_args.ns, "dataset sizes")->delimiter(',');
    sub->add_option("--d", exp_args.ds, "dimensions")->delimiter(',');
    sub->add_option("--seed", exp_args.seed, "dataset seed");
    sub->add_option("--degree-bound", exp_args.bounds, "degree bounds (numbers or 'unbounded')")
        ->delimiter(',');
    sub->add_option("--budget", exp_args.budgets, "search budgets")->delimiter(',');
    sub->add_option("--queries", exp_args.queries, "queries per cell");
    sub->add_option("--k", exp_args.k, "neighbors per query");
    sub->add_option("-o,--output", exp_args.output, "output file");
    sub->add_option("--format", exp_args.format, "csv or json");
    sub->add_option("--threads", exp_args.threads, "worker threads (0 = all)");
    sub->add_flag("--force", exp_args.force, "override desk-scale caps");
  };
  add_common(experiment->add_subcommand("degree", "Degree distribution of the exact graph"));
  add_common(experiment->add_subcommand("truncation", "Accuracy of degree-bounded graphs"));
  add_common(experiment->add_subcommand("conflicts", "Conflict multiplicity histogram"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (build->parsed()) return run_build(build_args);
    if (search->parsed()) return run_search(search_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (experiment->parsed()) {
      for (auto* sub : experiment->get_subcommands()) exp_args.kind = sub->get_name();
      return run_experiment(exp_args);
    }
  } catch (const StatusError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return exit_code_for(e.status);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
