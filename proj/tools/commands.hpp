#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace CLI {
class App;
}

namespace neckflex::cli {

struct GlobalOptions {
  std::string config_path;           // empty: built-in defaults
  std::filesystem::path out = ".";   // output directory
  std::uint64_t seed = 0;
};

void register_commands(CLI::App& app, GlobalOptions& global);

}  // namespace neckflex::cli
