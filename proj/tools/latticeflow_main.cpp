#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latticeflow/errors.hpp"
#include "latticeflow/props.hpp"

namespace fs = std::filesystem;
using latticeflow::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;

std::vector<double> parse_eps(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw latticeflow::parse_error("bad --eps value: '" + tok + "'");
    }
  }
  if (out.empty()) throw latticeflow::parse_error("--eps must list at least one value");
  return out;
}

int run_command(const std::string& job_path, const std::string& prop_id, const std::string& grid_str,
                const std::string& eps_str, const std::string& out_dir) {
  ordered_json job;
  if (!job_path.empty()) {
    std::ifstream in(job_path);
    if (!in) throw latticeflow::parse_error("cannot open job file: " + job_path);
    try {
      in >> job;
    } catch (const nlohmann::json::parse_error& e) {
      throw latticeflow::parse_error(std::string("job file is not valid JSON: ") + e.what());
    }
  } else if (!prop_id.empty()) {
    job = {{"prop", prop_id}, {"inputs", latticeflow::default_inputs(prop_id)}};
  } else {
    throw latticeflow::parse_error("run needs --job or --prop");
  }
  if (!grid_str.empty()) job["grid"] = grid_str;
  if (!eps_str.empty()) job["eps"] = parse_eps(eps_str);

  const latticeflow::PropResult res = latticeflow::run_job_document(job);

  fs::create_directories(out_dir);
  {
    std::ofstream rep(fs::path(out_dir) / "report.json", std::ios::binary);
    rep << res.report.dump(2) << "\n";
  }
  if (res.csv) {
    std::ofstream csv(fs::path(out_dir) / res.csv->first, std::ios::binary);
    csv << res.csv->second;
  }
  std::cout << (res.pass ? "[pass] " : "[fail] ") << job.at("prop").get<std::string>() << "  ("
            << out_dir << "/report.json)\n";
  return res.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "latticeflow: desk-scale verification of relative uniform convergence and positive operator "
      "semigroups on a truncated real line.\n"
      "Reports embed their full configuration; identical jobs produce byte-identical reports.\n"
      "Internal parallelism is capped by LATTICEFLOW_THREADS."};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "List registered propositions (id, claim, CSV columns)");

  std::string job_path, prop_id, grid_str, eps_str, out_dir = "out";
  auto* run_cmd = app.add_subcommand(
      "run", "Run one verification job; writes report.json and, for schedule/table propositions, "
             "a CSV (columns per proposition: see `latticeflow list`)");
  run_cmd->add_option("--job", job_path, "Job document: {\"prop\": id, \"inputs\": {...}, ...}");
  run_cmd->add_option("--prop", prop_id, "Proposition id, run with default inputs");
  run_cmd->add_option("--grid", grid_str, "Grid override \"lo,hi,n\"");
  run_cmd->add_option("--eps", eps_str, "Eps schedule override \"e1,e2,...\" (strictly decreasing)");
  run_cmd->add_option("--out", out_dir, "Output directory (default: out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& p : latticeflow::prop_registry()) {
        std::cout << p.id << " — " << p.claim;
        if (!p.csv_doc.empty()) std::cout << "  [csv: " << p.csv_doc << "]";
        std::cout << "\n";
      }
      std::cout << latticeflow::prop_registry().size() << " propositions registered\n";
      return kExitPass;
    }
    return run_command(job_path, prop_id, grid_str, eps_str, out_dir);
  } catch (const latticeflow::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const latticeflow::precondition_error& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const latticeflow::eval_error& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
