#pragma once

#include <filesystem>
#include <string>

#include "neckflex/biomech.hpp"
#include "neckflex/emg.hpp"
#include "neckflex/mechanism.hpp"
#include "neckflex/signal.hpp"

namespace neckflex {

// Everything the command-line tools can override from a JSON file.
// Unknown keys are rejected so typos fail loudly.
struct ToolkitConfig {
  BarArraySpec bar_array;
  HeadStatics statics;
  EnvelopeParams envelope;
  SegmentationParams segmentation;

  void validate() const;
};

ToolkitConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ToolkitConfig& config);

}  // namespace neckflex
