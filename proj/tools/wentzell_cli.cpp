#include "wentzell/cli.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> suites;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory (default ./out)");
  sub->add_option("--threads", f.threads, "assembly threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--seed", f.seed, "random seed");
}

int fail(const std::string& out, const std::string& command, const std::string& message, const std::string& key) {
  nlohmann::json err = {{"command", command}, {"error", message}, {"passed", false}};
  if (!key.empty()) err["key"] = key;
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  std::ofstream(std::filesystem::path(out) / "error.json") << err.dump(2) << '\n';
  std::cerr << "error: " << message << '\n';
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate fourth-order parabolic problems with Wentzell boundary conditions"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"run", "verify", "spectrum", "resolvent"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, flags);
    if (std::string(name) == "verify") sub->add_option("--suite", flags.suites, "suites to run (default all)");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  std::string out = flags.out.value_or("out");
  wentzell::CliConfig config;
  try {
    std::ifstream in(flags.config);
    std::stringstream buf;
    buf << in.rdbuf();
    config = wentzell::parse_config(buf.str());
  } catch (const wentzell::ConfigError& e) {
    return fail(out, command, e.what(), e.key());
  } catch (const std::exception& e) {
    return fail(out, command, e.what(), "");
  }
  if (flags.out) config.out_dir = *flags.out;
  out = config.out_dir.string();
  if (flags.threads) config.threads = *flags.threads;
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.suites.empty()) {
    for (const std::string& s : flags.suites) {
      const auto& known = wentzell::verification_suites();
      if (s != "all" && std::find(known.begin(), known.end(), s) == known.end())
        return fail(out, command, "unknown suite '" + s + "'", "--suite");
    }
    config.suites = flags.suites;
  }

  const int status = wentzell::dispatch(wentzell::parse_command(command), config);
  std::cout << command << ": " << (status == 0 ? "passed" : status == 1 ? "failed" : "error") << " (" << out
            << ")\n";
  return status;
}
