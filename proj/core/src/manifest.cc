// Copyright 2026 The sepkit authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sepkit/manifest.h"

#include <map>
#include <sstream>
#include <stdexcept>

#include "sepkit/metrics.h"
#include "sepkit/util.h"

namespace sepkit {

std::string UtteranceId(uint64_t run_seed, int index) {
  const std::string key = std::to_string(run_seed) + ":" + std::to_string(index);
  return ToHex(Fnv1a64(key));
}

namespace {

std::string Vec3(const Eigen::Vector3d& v) {
  return FormatDouble(v.x()) + "," + FormatDouble(v.y()) + "," + FormatDouble(v.z());
}

Eigen::Vector3d ParseVec3(const std::string& s) {
  std::istringstream in(s);
  Eigen::Vector3d v;
  char c1, c2;
  if (!(in >> v.x() >> c1 >> v.y() >> c2 >> v.z()) || c1 != ',' || c2 != ',')
    throw std::runtime_error("manifest: bad vector: " + s);
  return v;
}

}  // namespace

std::string WriteManifest(const std::vector<UtteranceRecord>& records) {
  std::ostringstream out;
  for (const auto& rec : records) {
    const auto& sc = rec.scene;
    out << "id=" << rec.id << " index=" << rec.index << " seed=" << sc.seed;
    out << " room=" << FormatDouble(sc.room.length) << "x" << FormatDouble(sc.room.width)
        << "x" << FormatDouble(sc.room.height);
    out << " t60=" << FormatDouble(sc.room.t60);
    out << " array=" << Vec3(sc.array.center);
    out << " orient=" << FormatDouble(sc.array.orientation);
    out << " bucket=" << (sc.bucket >= 0 ? kAngleBucketNames[sc.bucket] : "none");
    out << " az=";
    for (size_t s = 0; s < sc.azimuths.size(); ++s) {
      if (s) out << ",";
      out << FormatDouble(sc.azimuths[s]);
    }
    for (size_t s = 0; s < sc.sources.size(); ++s)
      out << " src" << s << "=" << Vec3(sc.sources[s]);
    out << " mix=" << rec.mix_path;
    for (size_t s = 0; s < rec.ref_paths.size(); ++s)
      out << " ref" << s << "=" << rec.ref_paths[s];
    out << "\n";
  }
  return out.str();
}

std::vector<UtteranceRecord> ParseManifest(const std::string& text) {
  std::vector<UtteranceRecord> records;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::map<std::string, std::string> kv;
    std::istringstream ls(line);
    std::string token;
    while (ls >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("manifest: bad token: " + token);
      kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    auto need = [&](const std::string& key) -> const std::string& {
      auto it = kv.find(key);
      if (it == kv.end()) throw std::runtime_error("manifest: missing key " + key);
      return it->second;
    };

    UtteranceRecord rec;
    rec.id = need("id");
    rec.index = std::stoi(need("index"));
    rec.scene.seed = std::stoull(need("seed"));
    {
      const std::string& room = need("room");
      std::istringstream rs(room);
      char x1, x2;
      if (!(rs >> rec.scene.room.length >> x1 >> rec.scene.room.width >> x2 >>
            rec.scene.room.height) ||
          x1 != 'x' || x2 != 'x')
        throw std::runtime_error("manifest: bad room: " + room);
    }
    rec.scene.room.t60 = std::stod(need("t60"));
    rec.scene.array.center = ParseVec3(need("array"));
    rec.scene.array.orientation = std::stod(need("orient"));
    {
      const std::string& bucket = need("bucket");
      rec.scene.bucket = -1;
      for (int b = 0; b < kNumAngleBuckets; ++b)
        if (bucket == kAngleBucketNames[b]) rec.scene.bucket = b;
      if (rec.scene.bucket < 0 && bucket != "none")
        throw std::runtime_error("manifest: unknown bucket: " + bucket);
    }
    {
      std::istringstream as(need("az"));
      std::string part;
      while (std::getline(as, part, ',')) rec.scene.azimuths.push_back(std::stod(part));
    }
    for (size_t s = 0;; ++s) {
      auto it = kv.find("src" + std::to_string(s));
      if (it == kv.end()) break;
      rec.scene.sources.push_back(ParseVec3(it->second));
    }
    rec.mix_path = need("mix");
    for (size_t s = 0;; ++s) {
      auto it = kv.find("ref" + std::to_string(s));
      if (it == kv.end()) break;
      rec.ref_paths.push_back(it->second);
    }
    if (rec.scene.sources.size() != rec.scene.azimuths.size() ||
        rec.scene.sources.size() != rec.ref_paths.size())
      throw std::runtime_error("manifest: inconsistent source counts for " + rec.id);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace sepkit
