// Copyright 2026 The hodgeflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pipeline driver. Each subcommand reads and writes documented files only;
// every output starts with `#` metadata lines echoing the tool version and
// the semantic flags of the run.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hodgeflow.hpp"

namespace hf = hodgeflow;
namespace fs = std::filesystem;

namespace {

std::string g_command_line;

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hf::Error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hf::Error("cannot open '" + path.string() + "' for writing");
  out << "# hodgeflow " << hf::kVersion << '\n' << "# command: " << g_command_line << '\n';
  return out;
}

// Flags echoed into headers; --threads is dropped because it cannot change
// any output.
std::string EchoCommand(int argc, char** argv) {
  std::string out;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--threads") {
      ++k;
      continue;
    }
    if (arg.rfind("--threads=", 0) == 0) continue;
    if (!out.empty()) out += ' ';
    out += arg;
  }
  return out;
}

hf::InfluenceNetwork LoadNetwork(const std::string& path) {
  auto in = OpenIn(path);
  return hf::ReadNetwork(in);
}

hf::HodgeDecomposition LoadDecomposition(const fs::path& dir) {
  auto nodes = OpenIn((dir / "nodes.csv").string());
  auto pairs = OpenIn((dir / "pairs.csv").string());
  auto summary = OpenIn((dir / "summary.csv").string());
  return hf::ReadDecomposition(nodes, pairs, summary);
}

// Summary-line number; files keep full precision.
std::string Short(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string Ratio(const hf::HodgeDecomposition& d, double value) {
  return d.ratios_defined ? hf::FormatFixed(value, 4) : "undefined";
}

struct Options {
  // shared
  std::string events, net, flow, out, format = "delimited";
  std::string level = "institution", mode = "mean";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // ingest
  std::string report;
  // synth
  std::size_t issuers = 6, entities = 200, lists_min = 1, lists_max = 3;
  double copy_prob = 0.5, gap_decay = 1.0;
  std::vector<int> ranks;
  std::string start = "2001-01-01";
  std::int32_t span_days = 3650, max_delay = 180;
  // build
  std::string categories, category;
  // decompose
  double tol = 1e-10;
  std::size_t dense_limit = 64;
  // communities
  double resolution = 1.0;
  std::size_t restarts = 1;
  // pagerank
  double damping = 0.85, pr_tol = 1e-12;
  // layout
  std::string potentials;
  double jitter = 0.0, min_separation = 0.05;
  std::size_t iterations = 300;
  // report
  std::string hodge, pagerank, partition, layout, names, highlight;
  std::string graph_format = "edge_table";
  std::vector<std::string> category_hodge;
};

int RunIngest(const Options& o) {
  auto in = OpenIn(o.events);
  const auto set = hf::ParseEvents(in, hf::ParseEventFormat(o.format));
  auto out = OpenOut(o.out);
  hf::SerializeEvents(set, out);
  const auto report = hf::ValidateEvents(set);
  if (!o.report.empty()) {
    auto rep = OpenOut(o.report);
    hf::WriteValidationReport(report, rep);
  }
  std::cout << "ingest: issuers=" << report.issuer_count << " lists=" << report.list_count
            << " entities=" << report.entity_count << " events=" << report.event_count
            << " cross_list_entities=" << report.cross_list_entities
            << " warnings=" << report.warning_count() << '\n';
  return 0;
}

int RunSynth(const Options& o) {
  hf::SynthConfig config;
  config.issuer_count = o.issuers;
  config.entity_count = o.entities;
  config.lists_min = o.lists_min;
  config.lists_max = o.lists_max;
  config.copy_prob = o.copy_prob;
  config.gap_decay = o.gap_decay;
  config.ranks = o.ranks;
  config.start = hf::Date::Parse(o.start);
  config.origin_span_days = o.span_days;
  config.max_delay_days = o.max_delay;
  const auto set = hf::SynthGenerate(config, o.seed);
  auto out = OpenOut(o.out);
  hf::SerializeEvents(set, out);
  std::cout << "synth: issuers=" << set.issuers.size() << " lists=" << set.lists.size()
            << " events=" << set.events.size() << " seed=" << o.seed << '\n';
  return 0;
}

int RunBuild(const Options& o) {
  auto in = OpenIn(o.events);
  auto set = hf::ParseEvents(in, hf::ParseEventFormat(o.format));
  std::optional<std::set<std::string>> lists;
  if (!o.category.empty()) {
    if (o.categories.empty()) throw hf::Error("--category requires --categories");
    auto map_in = OpenIn(o.categories);
    lists = hf::FilterByCategory(set, hf::ReadCategoryMap(map_in), o.category);
  }
  hf::InfluenceNetwork net;
  if (hf::ParseNetworkLevel(o.level) == hf::NetworkLevel::kList) {
    if (lists) {
      std::vector<hf::SanctionEvent> kept;
      for (const auto& e : set.events) {
        if (lists->count(e.list_id)) kept.push_back(e);
      }
      set = hf::MakeEventSet(std::move(kept));
    }
    net = hf::BuildListNetwork(set, o.threads);
  } else {
    net = hf::BuildInstitutionNetwork(set, lists, o.threads);
  }
  auto out = OpenOut(o.out);
  hf::WriteNetwork(net, out);
  std::cout << "build: level=" << hf::ToString(net.level) << " nodes=" << net.size()
            << " edges=" << net.edges.size() << " total_count=" << net.TotalCount() << '\n';
  return 0;
}

int RunSymmetrize(const Options& o) {
  const auto flow = hf::Symmetrize(LoadNetwork(o.net), hf::ParseWeightMode(o.mode));
  auto out = OpenOut(o.out);
  hf::WriteFlowNetwork(flow, out);
  std::cout << "symmetrize: mode=" << hf::ToString(flow.mode) << " nodes=" << flow.size()
            << " pairs=" << flow.pairs.size() << '\n';
  return 0;
}

int RunDecompose(const Options& o) {
  if (o.net.empty() == o.flow.empty()) {
    throw hf::Error("give exactly one of --net or --flow");
  }
  hf::FlowNetwork flow;
  if (!o.net.empty()) {
    flow = hf::Symmetrize(LoadNetwork(o.net), hf::ParseWeightMode(o.mode));
  } else {
    auto in = OpenIn(o.flow);
    flow = hf::ReadFlowNetwork(in);
  }
  hf::SolverOptions solver;
  solver.tol = o.tol;
  solver.dense_limit = o.dense_limit;
  const auto d = hf::Decompose(flow, hf::SolvePotentials(flow, solver));
  const fs::path dir(o.out);
  {
    auto out = OpenOut(dir / "nodes.csv");
    hf::WriteNodeTable(d, out);
  }
  {
    auto out = OpenOut(dir / "pairs.csv");
    hf::WritePairTable(d, out);
  }
  {
    auto out = OpenOut(dir / "summary.csv");
    hf::WriteSummary(d, out);
  }
  std::cout << "decompose: nodes=" << flow.size() << " pairs=" << flow.pairs.size()
            << " gradient_ratio=" << Ratio(d, d.gradient_ratio)
            << " loop_ratio=" << Ratio(d, d.loop_ratio)
            << " residual=" << Short(d.residual_norm) << '\n';
  return 0;
}

int RunCommunities(const Options& o) {
  const auto net = LoadNetwork(o.net);
  const auto p = hf::LouvainBest(net, o.resolution, o.seed, std::max<std::size_t>(1, o.restarts));
  auto out = OpenOut(o.out);
  hf::WritePartition(net, p, out);
  std::cout << "communities: nodes=" << net.size() << " communities=" << p.community_count
            << " modularity=" << hf::FormatFixed(p.modularity, 6)
            << " resolution=" << Short(p.resolution) << " seed=" << p.seed << '\n';
  return 0;
}

int RunPageRank(const Options& o) {
  const auto r = hf::PageRank(LoadNetwork(o.net), o.damping, o.pr_tol);
  auto out = OpenOut(o.out);
  hf::WriteRanks(r, out);
  std::cout << "pagerank: nodes=" << r.nodes.size() << " iterations=" << r.iterations_used
            << " damping=" << Short(r.damping) << '\n';
  return 0;
}

hf::PotentialVector LoadPotentials(const std::string& path) {
  const fs::path p(path);
  auto in = OpenIn(fs::is_directory(p) ? (p / "nodes.csv").string() : path);
  return hf::ReadNodeTable(in);
}

int RunLayout(const Options& o) {
  const auto net = LoadNetwork(o.net);
  hf::LayoutOptions opt;
  opt.seed = o.seed;
  opt.jitter = o.jitter;
  opt.min_separation = o.min_separation;
  opt.iterations = o.iterations;
  const auto l = hf::Layout(net, LoadPotentials(o.potentials), opt);
  auto out = OpenOut(o.out);
  hf::WriteLayout(l, out);
  std::cout << "layout: nodes=" << l.nodes.size() << " steps=" << l.energy_trace.size()
            << " energy=" << (l.energy_trace.empty() ? "0" : Short(l.energy_trace.back()))
            << '\n';
  return 0;
}

int RunReport(const Options& o) {
  const auto net = LoadNetwork(o.net);
  const fs::path dir(o.out);
  std::map<std::string, std::string> names;
  if (!o.names.empty()) {
    auto in = OpenIn(o.names);
    hf::SkipCommentHeader(in);
    hf::CsvReader reader(in);
    std::vector<std::string> row;
    while (reader.Next(row)) {
      if (row.size() == 1 && row[0].empty()) continue;
      if (row.size() != 2) throw hf::Error("names file rows must be node,name");
      if (row[0] == "node" && row[1] == "name") continue;
      names[row[0]] = row[1];
    }
  }
  std::set<std::string> highlight;
  if (!o.highlight.empty()) {
    for (const auto& h : hf::Split(o.highlight, ',')) highlight.insert(std::string(hf::Trim(h)));
  }

  std::optional<hf::HodgeDecomposition> decomp;
  if (!o.hodge.empty()) {
    decomp = LoadDecomposition(o.hodge);
    auto out = OpenOut(dir / "potential_table.csv");
    hf::WritePotentialRows(hf::PotentialTable(*decomp, names, highlight), out);
  }
  if (!o.pagerank.empty()) {
    if (!decomp) throw hf::Error("--pagerank needs --hodge for the scatter table");
    auto in = OpenIn(o.pagerank);
    const auto table = hf::ScatterData(hf::ReadRanks(in), decomp->potentials);
    auto out = OpenOut(dir / "scatter.csv");
    hf::WriteScatter(table, out);
  }
  if (!o.category_hodge.empty()) {
    std::vector<std::pair<std::string, hf::HodgeDecomposition>> columns;
    for (const auto& spec : o.category_hodge) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw hf::Error("--category-hodge expects label=dir");
      columns.emplace_back(spec.substr(0, eq), LoadDecomposition(spec.substr(eq + 1)));
    }
    std::vector<std::string> rows;
    for (const auto& h : highlight) rows.push_back(h);
    auto out = OpenOut(dir / "potential_matrix.csv");
    hf::WritePotentialMatrix(hf::BuildPotentialMatrix(columns, rows), out);
  }
  std::optional<hf::CommunityPartition> partition;
  if (!o.partition.empty()) {
    auto in = OpenIn(o.partition);
    partition = hf::ReadPartition(net, in);
  }
  std::optional<hf::LayoutResult> layout;
  if (!o.layout.empty()) {
    auto in = OpenIn(o.layout);
    layout = hf::ReadLayout(in);
  }
  const auto format = hf::ParseGraphFormat(o.graph_format);
  const char* ext = format == hf::GraphFormat::kDot        ? "graph.dot"
                    : format == hf::GraphFormat::kJsonGraph ? "graph.json"
                                                             : "graph.tsv";
  const auto doc = hf::ExportGraph(net, decomp ? &*decomp : nullptr,
                                   partition ? &*partition : nullptr,
                                   layout ? &*layout : nullptr, format);
  {
    // JSON has no comment syntax, so the metadata goes into a sidecar.
    if (format == hf::GraphFormat::kJsonGraph) {
      auto meta = OpenOut(dir / "graph.meta");
      std::ofstream out(dir / ext, std::ios::binary);
      if (!out) throw hf::Error("cannot write " + (dir / ext).string());
      out << doc;
    } else if (format == hf::GraphFormat::kDot) {
      std::ofstream out(dir / ext, std::ios::binary);
      if (!out) throw hf::Error("cannot write " + (dir / ext).string());
      out << "// hodgeflow " << hf::kVersion << "\n// command: " << g_command_line << '\n'
          << doc;
    } else {
      auto out = OpenOut(dir / ext);
      out << doc;
    }
  }
  std::cout << "report: nodes=" << net.size() << " edges=" << net.edges.size()
            << " format=" << o.graph_format << " out=" << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hodgeflow: influence networks and Helmholtz-Hodge analysis"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Parse, validate and canonicalise events");
  ingest->add_option("--events", o.events, "Input event file")->required();
  ingest->add_option("--format", o.format, "delimited | line_record");
  ingest->add_option("--out", o.out, "Canonical delimited output")->required();
  ingest->add_option("--report", o.report, "Validation report output");

  auto* synth = app.add_subcommand("synth", "Generate events with a planted hierarchy");
  synth->add_option("--issuers", o.issuers);
  synth->add_option("--entities", o.entities);
  synth->add_option("--lists-min", o.lists_min);
  synth->add_option("--lists-max", o.lists_max);
  synth->add_option("--copy-prob", o.copy_prob);
  synth->add_option("--gap-decay", o.gap_decay, "0 = strict copy chain");
  synth->add_option("--ranks", o.ranks, "Planted rank per issuer")->delimiter(',');
  synth->add_option("--start", o.start);
  synth->add_option("--span-days", o.span_days);
  synth->add_option("--max-delay", o.max_delay);
  synth->add_option("--seed", o.seed);
  synth->add_option("--out", o.out)->required();

  auto* build = app.add_subcommand("build", "Build a list- or institution-level network");
  build->add_option("--level", o.level, "list | institution");
  build->add_option("--events", o.events)->required();
  build->add_option("--format", o.format, "delimited | line_record");
  build->add_option("--categories", o.categories, "list_id,label map");
  build->add_option("--category", o.category, "Restrict to lists with this label");
  build->add_option("--threads", o.threads, "Worker threads (output unaffected)");
  build->add_option("--out", o.out)->required();

  auto* symmetrize = app.add_subcommand("symmetrize", "Net flow and weight per node pair");
  symmetrize->add_option("--net", o.net)->required();
  symmetrize->add_option("--mode", o.mode, "mean | unit");
  symmetrize->add_option("--out", o.out)->required();

  auto* decompose = app.add_subcommand("decompose", "Helmholtz-Hodge decomposition");
  decompose->add_option("--net", o.net);
  decompose->add_option("--flow", o.flow);
  decompose->add_option("--mode", o.mode, "mean | unit (with --net)");
  decompose->add_option("--tol", o.tol);
  decompose->add_option("--dense-limit", o.dense_limit);
  decompose->add_option("--out", o.out, "Output directory")->required();

  auto* communities = app.add_subcommand("communities", "Louvain modularity communities");
  communities->add_option("--net", o.net)->required();
  communities->add_option("--resolution", o.resolution);
  communities->add_option("--seed", o.seed);
  communities->add_option("--restarts", o.restarts, "Consecutive seeds tried; best kept");
  communities->add_option("--out", o.out)->required();

  auto* pagerank = app.add_subcommand("pagerank", "Weighted PageRank");
  pagerank->add_option("--net", o.net)->required();
  pagerank->add_option("--damping", o.damping);
  pagerank->add_option("--tol", o.pr_tol);
  pagerank->add_option("--out", o.out)->required();

  auto* layout = app.add_subcommand("layout", "Layout with y = potential");
  layout->add_option("--net", o.net)->required();
  layout->add_option("--potentials", o.potentials, "nodes.csv or decompose directory")
      ->required();
  layout->add_option("--seed", o.seed);
  layout->add_option("--jitter", o.jitter);
  layout->add_option("--min-separation", o.min_separation);
  layout->add_option("--iterations", o.iterations);
  layout->add_option("--out", o.out)->required();

  auto* report = app.add_subcommand("report", "Tables, scatter data and graph documents");
  report->add_option("--net", o.net)->required();
  report->add_option("--hodge", o.hodge, "decompose output directory");
  report->add_option("--pagerank", o.pagerank);
  report->add_option("--partition", o.partition);
  report->add_option("--layout", o.layout);
  report->add_option("--names", o.names, "node,name display map");
  report->add_option("--highlight", o.highlight, "Comma-separated nodes to flag");
  report->add_option("--category-hodge", o.category_hodge, "label=dir, repeatable");
  report->add_option("--format", o.graph_format, "edge_table | dot | json_graph");
  report->add_option("--out", o.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g_command_line = EchoCommand(argc, argv);

  const std::map<const CLI::App*, std::pair<const char*, int (*)(const Options&)>> stages = {
      {ingest, {"ingest", RunIngest}},
      {synth, {"ingest", RunSynth}},
      {build, {"netbuild", RunBuild}},
      {symmetrize, {"netbuild", RunSymmetrize}},
      {decompose, {"hodge", RunDecompose}},
      {communities, {"community", RunCommunities}},
      {pagerank, {"rank", RunPageRank}},
      {layout, {"report", RunLayout}},
      {report, {"report", RunReport}}};
  for (const auto& [sub, stage] : stages) {
    if (!sub->parsed()) continue;
    try {
      return stage.second(o);
    } catch (const std::exception& e) {
      std::cerr << "error: " << stage.first << ": " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
