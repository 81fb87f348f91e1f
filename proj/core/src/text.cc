// Copyright 2026 The SpanSteer Authors.
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

#include "spansteer/text.h"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "spansteer/error.h"

namespace spansteer {
namespace {

constexpr std::array<std::string_view, 30> kStopwords = {
    "a",    "an",  "and", "are", "as",   "at",   "be",  "but", "by",  "for",
    "from", "he",  "her", "his", "in",   "is",   "it",  "its", "not", "of",
    "on",   "or",  "she", "that", "the", "this", "to",  "was", "were", "with",
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

// Tokens that attach to their left neighbour when detokenizing.
bool attaches_left(std::string_view t) {
  static constexpr std::array<std::string_view, 12> kClosers = {
      ".", ",", "!", "?", ";", ":", ")", "]", "}", "'s", "n't", "%"};
  if (std::find(kClosers.begin(), kClosers.end(), t) != kClosers.end()) return true;
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) {
    return c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':';
  });
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string strip_punctuation(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_punct(s[b])) ++b;
  while (e > b && is_punct(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_token(std::string_view s) { return to_lower(strip_punctuation(s)); }

bool is_stopword(std::string_view normalized_token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), normalized_token);
}

std::span<const std::string_view> stopwords() { return kStopwords; }

bool is_punctuation_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_punct);
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : split_whitespace_with_offsets(s)) out.push_back(std::move(t.text));
  return out;
}

std::vector<TextToken> split_whitespace_with_offsets(std::string_view s) {
  std::vector<TextToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i == s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    out.push_back({std::string(s.substr(i, j - i)), i, j});
    i = j;
  }
  return out;
}

std::optional<std::vector<std::pair<std::size_t, std::size_t>>> align_tokens(
    std::string_view text, std::span<const std::string> tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> offsets;
  offsets.reserve(tokens.size());
  std::size_t cursor = 0;
  for (const auto& tok : tokens) {
    if (tok.empty()) return std::nullopt;
    const auto pos = text.find(tok, cursor);
    if (pos == std::string_view::npos) return std::nullopt;
    // Only whitespace may be skipped between consecutive tokens.
    for (std::size_t k = cursor; k < pos; ++k) {
      if (!is_space(text[k])) return std::nullopt;
    }
    offsets.emplace_back(pos, pos + tok.size());
    cursor = pos + tok.size();
  }
  return offsets;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty() && !attaches_left(t)) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace spansteer
