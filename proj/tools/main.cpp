#include <exception>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"
#include "neckflex/errors.hpp"

namespace {

// Exit codes: 0 success, 2 usage, 3 unreadable or malformed data,
// 4 numeric or domain failure.
constexpr int kUsage = 2;
constexpr int kDataError = 3;
constexpr int kNumericError = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bar-array neck orthosis: bending simulation and session analysis"};
  app.require_subcommand(1);

  neckflex::cli::GlobalOptions global;
  app.add_option("--config", global.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", global.out, "output directory (created if missing)");
  app.add_option("--seed", global.seed, "seed for anything randomized");

  neckflex::cli::register_commands(app, global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kUsage;
  } catch (const neckflex::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const neckflex::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }
  return 0;
}
