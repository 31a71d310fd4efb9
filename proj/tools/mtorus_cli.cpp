#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mtorus/parse.hpp"
#include "mtorus/report.hpp"

using namespace mtorus;

namespace {

std::string read_all(std::istream& in) {
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis of injective free group endomorphisms and their mapping tori"};
  app.require_subcommand(0, 0);

  std::string command;
  std::vector<std::string> files;
  std::string expr;
  RunOptions opt;
  bool json = false;
  int jobs = 1;

  app.add_option("command", command, "classify, tt, nielsen, surface, torus or report")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("files", files, "input files; standard input when absent or '-'");
  app.add_option("-e,--expr", expr, "input text, e.g. \"rank 2; a -> a b; b -> b a;\"");
  app.add_option("--max-period", opt.atoroidality.max_period, "period bound of the conjugacy search")
      ->capture_default_str();
  app.add_option("--max-len", opt.atoroidality.max_len, "word length bound of the conjugacy search")
      ->capture_default_str();
  app.add_option("--period-bound", opt.classify.period_bound, "period bound for Nielsen paths")
      ->capture_default_str();
  app.add_option("--whitehead-depth", opt.classify.whitehead_depth, "depth of the free factor search")
      ->capture_default_str();
  app.add_option("--max-iter", opt.classify.max_iterations, "train track iteration budget")->capture_default_str();
  app.add_option("--kmax", opt.classify.kmax, "largest power tried in the finite order check")
      ->capture_default_str();
  app.add_option("--chain-kmax", opt.chain_k_max, "length of fiber chains")->capture_default_str();
  app.add_option("--seed", opt.classify.seed, "fold tie-break ordering, 0 keeps index order")
      ->capture_default_str();
  app.add_option("-j,--jobs", jobs, "inputs processed in parallel")->check(CLI::PositiveNumber);
  app.add_flag("--json", json, "newline-delimited JSON reports");
  app.add_flag("--timing", opt.timing, "include wall-clock time in reports");
  CLI11_PARSE(app, argc, argv);

  std::vector<EndoSpec> specs;
  try {
    if (!expr.empty()) {
      auto s = parse_all(expr);
      specs.insert(specs.end(), s.begin(), s.end());
    }
    if (files.empty() && expr.empty()) files.push_back("-");
    for (const auto& f : files) {
      std::string text;
      if (f == "-") {
        text = read_all(std::cin);
      } else {
        std::ifstream in(f);
        if (!in) {
          std::cerr << f << ": cannot open\n";
          return 1;
        }
        text = read_all(in);
      }
      try {
        auto s = parse_all(text);
        specs.insert(specs.end(), s.begin(), s.end());
      } catch (const ParseError& e) {
        std::cerr << (f == "-" ? "<stdin>" : f) << ": " << e.what() << '\n';
        return 1;
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "<expr>: " << e.what() << '\n';
    return 1;
  }

  std::vector<Json> reports(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) reports[i] = run(command, specs[i], opt);
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(jobs, static_cast<int>(specs.size()));
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& w : specs[i].warnings) std::cerr << "warning: " << w << '\n';
    if (json) {
      std::cout << dump(reports[i]) << '\n';
    } else {
      if (i) std::cout << "---\n";
      std::cout << render_text(reports[i]);
    }
    status = std::max(status, report_status(reports[i]));
  }
  return status;
}
