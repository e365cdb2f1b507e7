#ifndef SHADOWCAST_CHECKPOINT_HPP
#define SHADOWCAST_CHECKPOINT_HPP

#include <string>

#include "shadowcast/model.hpp"

namespace shadowcast {

/// Checkpoints are JSON documents mapping parameter names to shape + flat
/// float arrays, with a format_version field. Doubles round-trip exactly.
void save_models(const Models& models, const std::string& dir);
Models load_models(const std::string& dir);

void save_snapshot(const TrainSnapshot& snap, const std::string& dir);
TrainSnapshot load_snapshot(const std::string& dir);
bool snapshot_exists(const std::string& dir);

}  // namespace shadowcast

#endif
