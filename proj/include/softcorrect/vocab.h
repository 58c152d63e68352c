// softcorrect/vocab.h

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

#ifndef SOFTCORRECT_VOCAB_H_
#define SOFTCORRECT_VOCAB_H_

#include <string>
#include <vector>

#include "softcorrect/common.h"

namespace softcorrect {

// Token id layout.  Content tokens occupy the dense range [0, C).  The
// alignment gap "phi" is a real vocabulary member with id C, so |V| = C+1.
// Two further symbols exist outside V:
//   - GT: an extra detector output class (column index |V| in detector
//     logits), never a valid input token or target;
//   - CTC blank: decoder output class with index C in decoder space
//     (the decoder emits content tokens or blank, never phi).
class Vocabulary {
 public:
  Vocabulary() = default;
  // tokens: content token strings; groups: homophone partition given as
  // lists of content ids (every content id in exactly one group).
  Vocabulary(std::vector<std::string> tokens,
             std::vector<std::vector<TokenId>> groups);

  // count_content tokens named t0.. , grouped into consecutive runs of
  // group_size (last group may be smaller).
  static Vocabulary MakeSynthetic(int content_tokens, int group_size);

  static Vocabulary Load(const std::string& path);
  void Save(const std::string& path) const;
  std::string ToJson() const;
  static Vocabulary FromJson(const std::string& json, const std::string& where);

  int num_content() const { return static_cast<int>(tokens_.size()); }
  int size() const { return num_content() + 1; }        // |V|, phi included
  TokenId phi_id() const { return num_content(); }
  int detector_classes() const { return size() + 1; }   // V + GT
  int gt_class() const { return size(); }               // detector column
  int decoder_classes() const { return num_content() + 1; }  // V' + blank
  TokenId blank_id() const { return num_content(); }     // decoder column

  bool IsContent(TokenId id) const { return id >= 0 && id < num_content(); }
  bool InVocab(TokenId id) const { return id >= 0 && id <= num_content(); }

  const std::string& TokenString(TokenId id) const;
  const std::vector<std::vector<TokenId>>& groups() const { return groups_; }
  // Group index of a content token.
  int GroupOf(TokenId id) const;
  // Members of the group containing `id`, excluding `id` itself.
  std::vector<TokenId> GroupMates(TokenId id) const;
  // 1.0 identical, 0.5 same homophone group, 0.0 otherwise; phi matches
  // only phi.
  double Similarity(TokenId a, TokenId b) const;

 private:
  void Validate() const;

  std::vector<std::string> tokens_;               // content only
  std::vector<std::vector<TokenId>> groups_;
  std::vector<int> group_of_;                     // content id -> group index
};

}  // namespace softcorrect

#endif  // SOFTCORRECT_VOCAB_H_
