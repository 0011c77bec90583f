// Copyright 2026 The discex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scripted sidecar for tests. Speaks the JSON Lines protocol on stdio.
//
//   fake_sidecar [--error] [--garbage] [--no-id] [--bad-sum] [--bad-len]
//                [--ahead] [--die-after N]
//
// Scores: connective i gets -(i + 1) - length(arg2) / 100. Classification:
// uniform over the level's label count, unless a --bad-* flag is given.

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "json.hpp"

namespace {

struct Flags {
  bool error = false;
  bool garbage = false;
  bool no_id = false;
  bool bad_sum = false;
  bool bad_len = false;
  bool ahead = false;
  long die_after = -1;
};

nlohmann::json respond(const Flags& f, const nlohmann::json& req) {
  nlohmann::json out;
  out["id"] = req.at("id");
  if (f.error) {
    out["error"] = "scripted failure";
    return out;
  }
  const std::string op = req.value("op", "");
  if (op == "score") {
    const auto& conns = req.at("connectives");
    const double len =
        static_cast<double>(req.at("parts").at(1).get<std::string>().size());
    nlohmann::json scores = nlohmann::json::array();
    for (size_t i = 0; i < conns.size(); ++i) {
      scores.push_back(-static_cast<double>(i + 1) - len / 100.0);
    }
    out["log_scores"] = scores;
  } else if (op == "classify") {
    const size_t n = req.at("level").get<int>() == 1 ? 4 : 11;
    const size_t len = f.bad_len ? n + 1 : n;
    const double p = (f.bad_sum ? 0.8 : 1.0) / static_cast<double>(n);
    out["probs"] = std::vector<double>(len, p);
  } else {
    out["error"] = "unknown op '" + op + "'";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--error") f.error = true;
    if (a == "--garbage") f.garbage = true;
    if (a == "--no-id") f.no_id = true;
    if (a == "--bad-sum") f.bad_sum = true;
    if (a == "--bad-len") f.bad_len = true;
    if (a == "--ahead") f.ahead = true;
    if (a == "--die-after" && i + 1 < argc) f.die_after = std::atol(argv[++i]);
  }
  std::string line;
  long handled = 0;
  while (std::getline(std::cin, line)) {
    if (f.die_after >= 0 && handled >= f.die_after) return 0;
    ++handled;
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      std::cout << R"({"id":null,"error":"malformed request"})" << std::endl;
      continue;
    }
    if (f.garbage) {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    if (f.no_id) {
      std::cout << R"({"log_scores":[]})" << std::endl;
      continue;
    }
    const long id = req.at("id").get<long>();
    if (f.ahead && id % 2 == 0) continue;  // answered with the previous one
    if (f.ahead) {
      nlohmann::json next = req;
      next["id"] = id + 1;
      std::cout << respond(f, next).dump() << std::endl;
    }
    std::cout << respond(f, req).dump() << std::endl;
  }
  return 0;
}
