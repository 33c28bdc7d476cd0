// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SEPKIT_MANIFEST_H_
#define SEPKIT_MANIFEST_H_

#include <string>
#include <vector>

#include "sepkit/room.h"

namespace sepkit {

// One simulated utterance: the scene that produced it plus audio paths,
// serialized as a line of key=value tokens. Doubles round-trip exactly, so
// re-running with the same seed reproduces the file byte for byte.
struct UtteranceRecord {
  std::string id;  // content address: hash of run seed and scene index
  int index = 0;
  SceneSpec scene;
  std::string mix_path;
  std::vector<std::string> ref_paths;
};

std::string WriteManifest(const std::vector<UtteranceRecord>& records);
std::vector<UtteranceRecord> ParseManifest(const std::string& text);

std::string UtteranceId(uint64_t run_seed, int index);

}  // namespace sepkit

#endif  // SEPKIT_MANIFEST_H_
