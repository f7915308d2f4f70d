// include/irl/vocab.hpp

// Copyright 2026  irlkit authors

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

#ifndef IRL_VOCAB_HPP
#define IRL_VOCAB_HPP

#include <string>
#include <vector>

#include "irl/errors.hpp"

namespace irl {

// Character inventory: content characters 'a', 'b', ... first, then the
// three special tokens. Token ids index the decoder's softmax.
struct Vocab {
  int n_content = 0;
  int sos_id = 0;
  int eos_id = 0;
  int pad_id = 0;

  static Vocab make(int n_content) {
    if (n_content < 1 || n_content > 26) throw VocabError("content size out of range");
    Vocab v;
    v.n_content = n_content;
    v.sos_id = n_content;
    v.eos_id = n_content + 1;
    v.pad_id = n_content + 2;
    return v;
  }

  int size() const { return n_content + 3; }

  char char_of(int id) const {
    if (id < 0 || id >= n_content) throw VocabError("id is not a content character");
    return static_cast<char>('a' + id);
  }

  int id_of(char c) const {
    int id = c - 'a';
    if (id < 0 || id >= n_content) {
      throw VocabError(std::string("unknown character '") + c + "'");
    }
    return id;
  }

  bool is_content(int id) const { return id >= 0 && id < n_content; }

  std::string token_name(int id) const {
    if (is_content(id)) return std::string(1, char_of(id));
    if (id == sos_id) return "<sos>";
    if (id == eos_id) return "<eos>";
    if (id == pad_id) return "<pad>";
    throw VocabError("token id out of range");
  }

  std::vector<int> encode(const std::string& text) const {
    std::vector<int> ids;
    ids.reserve(text.size());
    for (char c : text) ids.push_back(id_of(c));
    return ids;
  }

  std::string decode(const std::vector<int>& ids) const {
    std::string text;
    for (int id : ids) {
      if (is_content(id)) text += char_of(id);
    }
    return text;
  }
};

}  // namespace irl

#endif  // IRL_VOCAB_HPP
