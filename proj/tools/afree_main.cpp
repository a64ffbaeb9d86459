#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "afree/runspec.hpp"
#include "afree/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"afree: spectral verification toolkit for PDE-constrained problems on the torus"};
  app.set_version_flag("--version", afree::kVersion);

  std::string spec_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long long seed = -1;
  bool quiet = false;
  app.add_option("--spec", spec_path, "run-spec JSON file")->required();
  app.add_option("--set", overrides, "override a spec field (dot path, KEY=VALUE)");
  app.add_option("--out", out_dir, "output directory (overrides spec)");
  app.add_option("--seed", seed, "seed (overrides spec)");
  app.add_flag("--quiet", quiet, "suppress the summary on stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(spec_path);
    if (!in) {
      std::cerr << "error: cannot open spec file " << spec_path << "\n";
      return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    if (!out_dir.empty()) overrides.push_back("out=" + out_dir);
    if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
    if (quiet) overrides.push_back("quiet=true");
    const afree::RunSpec spec = afree::load_runspec(buf.str(), overrides);
    const int status = afree::run(spec);
    if (!spec.quiet) {
      std::ifstream sum(spec.out_dir + "/summary.txt");
      std::cout << sum.rdbuf();
    }
    return status;
  } catch (const afree::SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
