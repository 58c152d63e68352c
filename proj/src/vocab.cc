// softcorrect/vocab.cc

// Copyright 2026  SoftCorrect Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "softcorrect/vocab.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace softcorrect {

using json = nlohmann::json;

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       std::vector<std::vector<TokenId>> groups)
    : tokens_(std::move(tokens)), groups_(std::move(groups)) {
  Validate();
  group_of_.assign(tokens_.size(), -1);
  for (size_t g = 0; g < groups_.size(); ++g) {
    for (TokenId id : groups_[g]) group_of_[id] = static_cast<int>(g);
  }
}

void Vocabulary::Validate() const {
  if (size() < 3)
    throw ConfigError("vocabulary too small: |V| must be at least 3");
  std::vector<int> seen(tokens_.size(), 0);
  for (const auto& group : groups_) {
    if (group.empty()) throw ConfigError("empty homophone group");
    for (TokenId id : group) {
      if (id < 0 || id >= static_cast<TokenId>(tokens_.size()))
        throw ConfigError("homophone group references unknown token id " +
                          std::to_string(id));
      if (seen[id]++)
        throw ConfigError("token id " + std::to_string(id) +
                          " appears in more than one homophone group");
    }
  }
  for (size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i])
      throw ConfigError("content token id " + std::to_string(i) +
                        " belongs to no homophone group");
  }
}

Vocabulary Vocabulary::MakeSynthetic(int content_tokens, int group_size) {
  if (content_tokens < 2) throw ConfigError("need at least 2 content tokens");
  if (group_size < 1) throw ConfigError("group_size must be >= 1");
  std::vector<std::string> tokens;
  tokens.reserve(content_tokens);
  for (int i = 0; i < content_tokens; ++i)
    tokens.push_back("t" + std::to_string(i));
  std::vector<std::vector<TokenId>> groups;
  for (int start = 0; start < content_tokens; start += group_size) {
    std::vector<TokenId> g;
    for (int i = start; i < std::min(start + group_size, content_tokens); ++i)
      g.push_back(i);
    groups.push_back(std::move(g));
  }
  return Vocabulary(std::move(tokens), std::move(groups));
}

std::string Vocabulary::ToJson() const {
  json j;
  j["tokens"] = tokens_;
  j["groups"] = groups_;
  return j.dump();
}

Vocabulary Vocabulary::FromJson(const std::string& text,
                                const std::string& where) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(where + ": invalid vocabulary JSON: " + e.what());
  }
  if (!j.contains("tokens") || !j.contains("groups"))
    throw DataError(where + ": vocabulary JSON needs 'tokens' and 'groups'");
  try {
    return Vocabulary(j["tokens"].get<std::vector<std::string>>(),
                      j["groups"].get<std::vector<std::vector<TokenId>>>());
  } catch (const json::exception& e) {
    throw DataError(where + ": malformed vocabulary fields: " + e.what());
  }
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJson(buf.str(), path);
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  out << ToJson() << '\n';
}

const std::string& Vocabulary::TokenString(TokenId id) const {
  static const std::string kPhi = "<phi>";
  if (id == phi_id()) return kPhi;
  SC_CHECK(IsContent(id), "TokenString: id out of range");
  return tokens_[id];
}

int Vocabulary::GroupOf(TokenId id) const {
  SC_CHECK(IsContent(id), "GroupOf: not a content token");
  return group_of_[id];
}

std::vector<TokenId> Vocabulary::GroupMates(TokenId id) const {
  std::vector<TokenId> mates;
  for (TokenId other : groups_[GroupOf(id)]) {
    if (other != id) mates.push_back(other);
  }
  return mates;
}

double Vocabulary::Similarity(TokenId a, TokenId b) const {
  if (a == b) return 1.0;
  if (!IsContent(a) || !IsContent(b)) return 0.0;
  return group_of_[a] == group_of_[b] ? 0.5 : 0.0;
}

}  // namespace softcorrect
