#include "ietidp/experiment.hpp"

#include "ietidp/error.hpp"
#include "ietidp/oracle.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace ietidp {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

DomainSpec parse_domain(const json& d) {
  check_keys(d, {"type", "widths", "sectors", "offsets_deg", "thin_width", "thin_layer", "rects", "grid"},
             "domain");
  DomainSpec spec;
  const std::string type = get<std::string>(d, "type", "domain");
  if (type == "ring" || type == "thin-ring") {
    spec.kind = type == "ring" ? DomainSpec::Kind::Ring : DomainSpec::Kind::ThinRing;
    spec.widths = {0.2, 0.2, 0.2, 0.2, 0.2};
    spec.sectors = {4, 4, 4, 4, 4};
    spec.offsets_deg = {0, 45, 0, 45, 0};
    if (spec.kind == DomainSpec::Kind::ThinRing) {
      const double thin = d.contains("thin_width") ? get<double>(d, "thin_width", "domain") : 0.02;
      const int layer = d.contains("thin_layer") ? get<int>(d, "thin_layer", "domain") : 1;
      if (!(thin > 0.0 && thin < 1.0) || layer < 0 || layer > 4)
        throw ConfigError("domain: thin_width must lie in (0,1) and thin_layer in [0,4]");
      for (int l = 0; l < 5; ++l) spec.widths[l] = l == layer ? thin : (1.0 - thin) / 4.0;
    } else if (d.contains("thin_width") || d.contains("thin_layer")) {
      throw ConfigError("domain: thin_width/thin_layer require type thin-ring");
    }
    if (d.contains("widths")) spec.widths = get<std::vector<double>>(d, "widths", "domain");
    if (d.contains("sectors")) spec.sectors = get<std::vector<int>>(d, "sectors", "domain");
    if (d.contains("offsets_deg")) spec.offsets_deg = get<std::vector<double>>(d, "offsets_deg", "domain");
    if (d.contains("rects") || d.contains("grid")) throw ConfigError("domain: rects/grid require type square-tgrid");
  } else if (type == "square-tgrid") {
    spec.kind = DomainSpec::Kind::SquareTGrid;
    if (d.contains("rects") && d.contains("grid")) throw ConfigError("domain: give either rects or grid");
    if (d.contains("rects")) {
      for (const auto& r : get<std::vector<std::vector<double>>>(d, "rects", "domain")) {
        if (r.size() != 4) throw ConfigError("domain.rects: each entry is [x0, y0, x1, y1]");
        spec.rects.push_back({r[0], r[1], r[2], r[3]});
      }
    } else if (d.contains("grid")) {
      const auto g = get<std::vector<int>>(d, "grid", "domain");
      if (g.size() != 2 || g[0] < 1 || g[1] < 1) throw ConfigError("domain.grid: expected [nx, ny] >= 1");
      for (int j = 0; j < g[1]; ++j)
        for (int i = 0; i < g[0]; ++i)
          spec.rects.push_back({double(i) / g[0], double(j) / g[1], double(i + 1) / g[0], double(j + 1) / g[1]});
    } else {
      spec.rects = {{0.0, 0.5, 1.0, 1.0}, {0.0, 0.0, 0.5, 0.5}, {0.5, 0.0, 1.0, 0.5}};
    }
    for (const char* k : {"widths", "sectors", "offsets_deg", "thin_width", "thin_layer"})
      if (d.contains(k)) throw ConfigError(std::string("domain: ") + k + " requires a ring type");
  } else {
    throw ConfigError("domain.type must be ring, thin-ring or square-tgrid (got '" + type + "')");
  }
  return spec;
}

std::vector<SmoothnessSpec> parse_smoothness(const json& s) {
  std::vector<SmoothnessSpec> out;
  auto one = [](const json& v) {
    if (v.is_number_integer()) {
      if (v.get<int>() < 0) throw ConfigError("sweep.s: smoothness must be >= 0");
      return SmoothnessSpec{SmoothnessSpec::Kind::Fixed, v.get<int>()};
    }
    if (v.is_string() && v.get<std::string>() == "p-1") return SmoothnessSpec{SmoothnessSpec::Kind::MaxMinusOne, 0};
    if (v.is_string() && v.get<std::string>() == "all") return SmoothnessSpec{SmoothnessSpec::Kind::All, 0};
    throw ConfigError("sweep.s: entries must be integers, \"p-1\" or \"all\"");
  };
  if (s.is_array())
    for (const auto& v : s) out.push_back(one(v));
  else
    out.push_back(one(s));
  return out;
}

std::string format_double(double v, int digits = 6) {
  std::ostringstream o;
  o << std::setprecision(digits) << v;
  return o.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  check_keys(doc, {"schema", "name", "domain", "sweep", "solver", "output", "oracle_check"}, "configuration");
  if (!doc.contains("schema") || doc["schema"] != "ietidp.experiment/1")
    throw ConfigError("configuration: schema must be \"ietidp.experiment/1\"");
  ExperimentConfig c;
  if (doc.contains("name")) c.name = get<std::string>(doc, "name", "configuration");
  if (!doc.contains("domain")) throw ConfigError("configuration: missing domain");
  c.domain = parse_domain(doc["domain"]);

  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    check_keys(s, {"p", "r", "s"}, "sweep");
    if (s.contains("p")) c.degrees = get<std::vector<int>>(s, "p", "sweep");
    if (s.contains("r")) c.refinements = get<std::vector<int>>(s, "r", "sweep");
    if (s.contains("s")) c.smoothness = parse_smoothness(s["s"]);
  }
  if (c.smoothness.empty()) c.smoothness = {SmoothnessSpec{}};
  for (int p : c.degrees) {
    if (p < 1) throw ConfigError("sweep.p: degrees must be >= 1");
    if (p < 2 && c.domain.kind != DomainSpec::Kind::SquareTGrid)
      throw ConfigError("sweep.p: ring geometries need p >= 2");
  }
  for (int r : c.refinements)
    if (r < 0) throw ConfigError("sweep.r: refinement levels must be >= 0");

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    check_keys(s, {"delta", "rtol", "maxit", "threads", "kappa_probe"}, "solver");
    if (s.contains("delta")) c.delta = get<double>(s, "delta", "solver");
    if (s.contains("rtol")) c.rtol = get<double>(s, "rtol", "solver");
    if (s.contains("maxit")) c.maxit = get<int>(s, "maxit", "solver");
    if (s.contains("threads")) c.threads = get<int>(s, "threads", "solver");
    if (s.contains("kappa_probe")) c.kappa_probe = get<bool>(s, "kappa_probe", "solver");
  }
  if (!(c.delta > 0.0)) throw ConfigError("solver.delta must be positive");
  if (!(c.rtol > 0.0 && c.rtol < 1.0)) throw ConfigError("solver.rtol must lie in (0, 1)");
  if (c.maxit < 1 || c.threads < 1) throw ConfigError("solver.maxit and solver.threads must be >= 1");

  if (doc.contains("output")) {
    const json& o = doc["output"];
    check_keys(o, {"directory"}, "output");
    if (o.contains("directory")) c.output_dir = get<std::string>(o, "directory", "output");
  }
  if (doc.contains("oracle_check")) c.oracle_dof_cap = get<int>(doc, "oracle_check", "configuration");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

MultiPatch build_domain(const DomainSpec& spec) {
  if (spec.kind == DomainSpec::Kind::SquareTGrid) return build_square_tgrid(spec.rects);
  std::vector<double> offsets;
  for (double d : spec.offsets_deg) offsets.push_back(d * std::numbers::pi / 180.0);
  return build_ring(spec.widths, spec.sectors, offsets);
}

bool ExperimentResult::ok() const {
  for (const auto& r : rows)
    if (!r.converged || !r.error.empty()) return false;
  return true;
}

std::string ExperimentResult::csv() const {
  std::ostringstream o;
  o << "p,r,s,dofs,multipliers,coarse,iterations,kappa,kappa_solve,converged,setup_s,solve_s,oracle_error,error\n";
  for (const auto& r : rows) {
    o << r.p << ',' << r.r << ',' << r.s << ',' << r.dofs << ',' << r.multipliers << ',' << r.coarse << ','
      << r.iterations << ',' << format_double(r.kappa, 10) << ',' << format_double(r.kappa_solve, 10) << ',' << (r.converged ? 1 : 0) << ','
      << format_double(r.setup_seconds, 4) << ',' << format_double(r.solve_seconds, 4) << ','
      << (r.oracle_error ? format_double(*r.oracle_error, 4) : "") << ',' << '"' << r.error << '"' << '\n';
  }
  return o.str();
}

std::string ExperimentResult::markdown(const ExperimentConfig& config) const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"p", "r", "s", "dofs", "lambda", "coarse", "it", "kappa", "kappa (rhs)", "setup [s]", "solve [s]", "oracle"});
  for (const auto& r : rows)
    cells.push_back({std::to_string(r.p), std::to_string(r.r), std::to_string(r.s), std::to_string(r.dofs),
                     std::to_string(r.multipliers), std::to_string(r.coarse),
                     r.error.empty() ? std::to_string(r.iterations) + (r.converged ? "" : "*") : "fail",
                     format_double(r.kappa, 3), format_double(r.kappa_solve, 3), format_double(r.setup_seconds, 3),
                     format_double(r.solve_seconds, 3),
                     r.oracle_error ? format_double(*r.oracle_error, 2) : "-"});
  auto emit = [](std::ostringstream& o, const std::vector<std::vector<std::string>>& t) {
    std::vector<std::size_t> w(t.front().size(), 0);
    for (const auto& row : t)
      for (std::size_t c = 0; c < row.size(); ++c) w[c] = std::max(w[c], row[c].size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      o << '|';
      for (std::size_t c = 0; c < t[i].size(); ++c) o << ' ' << std::setw(int(w[c])) << t[i][c] << " |";
      o << '\n';
      if (i == 0) {
        o << '|';
        for (std::size_t c = 0; c < w.size(); ++c) o << std::string(w[c] + 1, '-') << ":|";
        o << '\n';
      }
    }
  };
  std::ostringstream o;
  o << "# " << config.name << "\n\n";
  o << "delta = " << config.delta << ", rtol = " << config.rtol << ", threads = " << config.threads << "\n\n";
  if (rows.empty()) {
    o << "(empty sweep)\n";
    return o.str();
  }
  emit(o, cells);

  // pivot: columns p, rows r (or s when a single r is swept)
  std::set<int> ps, rs, ss;
  for (const auto& r : rows) {
    ps.insert(r.p);
    rs.insert(r.r);
    ss.insert(r.s);
  }
  const bool by_r = rs.size() > 1 || ss.size() == 1;
  std::map<std::pair<int, int>, std::string> entry;
  for (const auto& r : rows) {
    const std::pair<int, int> key{by_r ? r.r : r.s, r.p};
    if (entry.count(key)) return o.str();  // (r, p) or (s, p) does not identify a cell
    entry[key] = r.error.empty() ? std::to_string(r.iterations) + " (" + format_double(r.kappa, 3) + ")" : "fail";
  }
  std::vector<std::vector<std::string>> pivot;
  pivot.push_back({by_r ? "r \\ p" : "s \\ p"});
  for (int p : ps) pivot.front().push_back("p=" + std::to_string(p));
  for (int key : by_r ? rs : ss) {
    std::vector<std::string> row{std::to_string(key)};
    for (int p : ps) row.push_back(entry.count({key, p}) ? entry[{key, p}] : "");
    pivot.push_back(std::move(row));
  }
  o << "\nit (kappa)\n\n";
  emit(o, pivot);
  return o.str();
}

std::string ExperimentResult::jsonl() const {
  std::string out;
  for (const auto& r : rows) out += r.record + '\n';
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult result;
  if (config.degrees.empty() || config.refinements.empty()) return result;
  const MultiPatch domain = build_domain(config.domain);
  const double pi = std::numbers::pi;
  const SourceFunction f = [pi](const Eigen::Vector2d& x) {
    return 2.0 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
  };

  for (int p : config.degrees) {
    std::vector<int> smooth;
    for (const SmoothnessSpec& s : config.smoothness) {
      if (s.kind == SmoothnessSpec::Kind::Fixed && s.value < p) smooth.push_back(s.value);
      if (s.kind == SmoothnessSpec::Kind::MaxMinusOne) smooth.push_back(p - 1);
      if (s.kind == SmoothnessSpec::Kind::All)
        for (int v = 0; v < p; ++v) smooth.push_back(v);
    }
    std::sort(smooth.begin(), smooth.end());
    smooth.erase(std::unique(smooth.begin(), smooth.end()), smooth.end());
    for (int s : smooth)
      for (int r : config.refinements) {
        ExperimentRow row;
        row.p = p;
        row.r = r;
        row.s = s;
        json rec = {{"name", config.name}, {"p", p}, {"r", r}, {"s", s}, {"delta", config.delta},
                    {"rtol", config.rtol}, {"threads", config.threads}};
        try {
          const MultiPatch mp = domain.discretize(p, r, s);
          SolverOptions opt;
          opt.assembly.delta = config.delta;
          opt.rtol = config.rtol;
          opt.maxit = config.maxit;
          opt.threads = config.threads;
          opt.kappa_probe = config.kappa_probe;
          const IetiSolver solver(mp, f, opt);
          const SolveReport rep = solver.solve();
          row.dofs = rep.num_dofs;
          row.multipliers = rep.num_multipliers;
          row.coarse = rep.coarse_size;
          row.iterations = rep.iterations;
          row.kappa = rep.kappa;
          row.kappa_solve = rep.kappa_solve;
          row.converged = rep.converged;
          row.setup_seconds = rep.timings.assembly + rep.timings.setup;
          row.solve_seconds = rep.timings.solve + rep.timings.recovery;
          rec["report"] = json::parse(to_json(rep));
          if (config.oracle_dof_cap > 0 && rep.num_dofs <= config.oracle_dof_cap) {
            const oracle::MonolithicSystem mono = oracle::assemble_monolithic(mp, f, config.delta);
            const Eigen::VectorXd ref = oracle::solve_direct(mono);
            const Eigen::VectorXd mine = mono.from_patches(rep.coefficients);
            row.oracle_error = (mine - ref).norm() / std::max(ref.norm(), 1e-300);
            rec["oracle_error"] = *row.oracle_error;
          }
        } catch (const Error& e) {
          row.error = e.what();
          rec["error"] = row.error;
        }
        row.record = rec.dump();
        result.rows.push_back(std::move(row));
      }
  }
  return result;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  std::filesystem::create_directories(config.output_dir);
  auto write = [&](const std::string& ext, const std::string& text) {
    const auto path = config.output_dir / (config.name + ext);
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
  };
  write(".csv", result.csv());
  write(".md", result.markdown(config));
  write(".jsonl", result.jsonl());
}

void emit_geometry(const ExperimentConfig& config, const std::filesystem::path& path) {
  const MultiPatch mp = build_domain(config.domain);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << boundary_polylines(mp);
}

}  // namespace ietidp
