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

#ifndef SPANSTEER_TEXT_H_
#define SPANSTEER_TEXT_H_

// Token normalization and string helpers shared by the labeling, metric and
// generation code. Everything here is ASCII-oriented and locale independent.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spansteer {

std::string to_lower(std::string_view s);

// Strips leading and trailing ASCII punctuation.
std::string strip_punctuation(std::string_view s);

// Lowercase + strip surrounding punctuation. May return an empty string.
std::string normalize_token(std::string_view s);

// True for the fixed 30-entry function-word list used by answer matching.
bool is_stopword(std::string_view normalized_token);
std::span<const std::string_view> stopwords();

bool is_punctuation_token(std::string_view token);

// Splits on ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view s);

struct TextToken {
  std::string text;
  std::size_t begin = 0;  // char offset, inclusive
  std::size_t end = 0;    // char offset, exclusive
};

// Whitespace tokenization that keeps character offsets into `s`.
std::vector<TextToken> split_whitespace_with_offsets(std::string_view s);

// Character offsets of each token in `text`, found by sequential search.
// Returns nullopt when some token cannot be located in order.
std::optional<std::vector<std::pair<std::size_t, std::size_t>>> align_tokens(
    std::string_view text, std::span<const std::string> tokens);

// Joins tokens with single spaces, attaching closing punctuation to the
// preceding token ("Leone ." -> "Leone.").
std::string detokenize(std::span<const std::string> tokens);

std::string join(std::span<const std::string> parts, std::string_view sep);

// Hex-encoded SHA-256 digests.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

}  // namespace spansteer

#endif  // SPANSTEER_TEXT_H_
