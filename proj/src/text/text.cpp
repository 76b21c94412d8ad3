// SPDX-License-Identifier: Apache-2.0
#include "text/text.hpp"

#include <fstream>

#include "common/error.hpp"

namespace bgcnn::text {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool is_dropped_token(std::string_view token) {
  return starts_with(token, "http://") || starts_with(token, "https://") || starts_with(token, "www.") ||
         starts_with(token, "@") || starts_with(token, "#");
}

}  // namespace

std::string clean_text(std::string_view raw) {
  std::string lowered(raw);
  for (char& c : lowered) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 'A' && u <= 'Z') c = static_cast<char>(u - 'A' + 'a');
  }

  std::string out;
  out.reserve(lowered.size());
  std::size_t i = 0;
  const std::size_t n = lowered.size();
  while (i < n) {
    while (i < n && is_space(static_cast<unsigned char>(lowered[i]))) ++i;
    const std::size_t start = i;
    while (i < n && !is_space(static_cast<unsigned char>(lowered[i]))) ++i;
    if (start == i) break;
    std::string_view token(lowered.data() + start, i - start);
    if (is_dropped_token(token)) continue;

    std::string kept;
    for (char c : token) {
      if (c >= 'a' && c <= 'z') kept.push_back(c);
    }
    if (kept.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += kept;
  }
  return out;
}

Tokens tokenize(std::string_view cleaned) {
  Tokens tokens;
  std::size_t i = 0;
  const std::size_t n = cleaned.size();
  while (i < n) {
    while (i < n && is_space(static_cast<unsigned char>(cleaned[i]))) ++i;
    const std::size_t start = i;
    while (i < n && !is_space(static_cast<unsigned char>(cleaned[i]))) ++i;
    if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

Tokens remove_stopwords(const Tokens& tokens, const StopwordSet& stopwords) {
  Tokens kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stopwords.contains(t)) kept.push_back(t);
  }
  return kept;
}

// Defined in the generated stopwords_data.cpp.
extern const char* const kBundledStopwords[];
extern const std::size_t kBundledStopwordCount;

const std::vector<std::string>& bundled_stopword_list() {
  static const std::vector<std::string> list(kBundledStopwords, kBundledStopwords + kBundledStopwordCount);
  return list;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet set = [] {
    StopwordSet s;
    for (const auto& w : bundled_stopword_list()) {
      s.insert(w);
      std::string cleaned = clean_text(w);
      if (!cleaned.empty()) s.insert(std::move(cleaned));
    }
    return s;
  }();
  return set;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open stopword file: " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) set.insert(line);
  }
  return set;
}

Tokens preprocess(std::string_view raw, const StopwordSet& stopwords) {
  return remove_stopwords(tokenize(clean_text(raw)), stopwords);
}

}  // namespace bgcnn::text
