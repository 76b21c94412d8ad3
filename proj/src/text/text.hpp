// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace bgcnn::text {

using Tokens = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;

/// Lowercases and strips everything except word content:
///  - whole tokens starting with http://, https:// or www., @mentions, #hashtags
///  - digits, punctuation, and any non-ASCII codepoint (emoji, symbols)
/// Whitespace is collapsed to single spaces and trimmed. The output only
/// contains [a-z ] and the function is idempotent.
std::string clean_text(std::string_view raw);

/// Splits on whitespace; never yields empty tokens.
Tokens tokenize(std::string_view cleaned);

/// Order-preserving filter of tokens not in `stopwords`.
Tokens remove_stopwords(const Tokens& tokens, const StopwordSet& stopwords);

/// The bundled 179-word English list, plus the cleaned form of each entry
/// (e.g. "don't" also contributes "dont") so it matches clean_text output.
const StopwordSet& default_stopwords();

/// The bundled list exactly as shipped, in file order.
const std::vector<std::string>& bundled_stopword_list();

/// Reads a stopword file: UTF-8, one token per line, blank lines ignored.
StopwordSet load_stopwords(const std::string& path);

/// clean_text -> tokenize -> remove_stopwords.
Tokens preprocess(std::string_view raw, const StopwordSet& stopwords = default_stopwords());

}  // namespace bgcnn::text
