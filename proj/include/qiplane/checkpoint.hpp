#pragma once

#include <map>
#include <string>
#include <vector>

namespace qip {

/// Named flat parameter arrays, saved either as little-endian binary or
/// as plain CSV. Both formats carry a versioned header and both readers
/// are supported; the format is detected on load.
using Checkpoint = std::map<std::string, std::vector<double>>;

enum class CheckpointFormat { Binary, Csv };

void save_checkpoint(const std::string& path, const Checkpoint& data,
                     CheckpointFormat format);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace qip
