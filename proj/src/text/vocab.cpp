// SPDX-License-Identifier: Apache-2.0
#include "text/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "common/error.hpp"

namespace bgcnn::text {

Vocabulary::Vocabulary() {
  id_to_token_ = {std::string(kPadToken), std::string(kOovToken)};
  frequencies_ = {0, 0};
}

std::int32_t Vocabulary::add(const std::string& token, std::size_t frequency) {
  require(!token.empty(), "vocabulary tokens must be non-empty");
  require(token != kPadToken && token != kOovToken, "token collides with a reserved name: " + token);
  require(!token_to_id_.contains(token), "duplicate vocabulary token: " + token);
  const auto id = static_cast<std::int32_t>(id_to_token_.size());
  token_to_id_.emplace(token, id);
  id_to_token_.push_back(token);
  frequencies_.push_back(frequency);
  return id;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kOovId : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return token_to_id_.contains(std::string(token)); }

const std::string& Vocabulary::token(std::int32_t id) const {
  require(id >= 0 && static_cast<std::size_t>(id) < id_to_token_.size(), "vocabulary id out of range");
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::size_t Vocabulary::frequency(std::int32_t id) const {
  require(id >= 0 && static_cast<std::size_t>(id) < frequencies_.size(), "vocabulary id out of range");
  return frequencies_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary file: " + path);
  for (std::size_t i = 0; i < id_to_token_.size(); ++i)
    out << id_to_token_[i] << '\t' << i << '\t' << frequencies_[i] << '\n';
  if (!out) throw IoError("failed writing vocabulary file: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open vocabulary file: " + path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& why) {
    throw ModelFormatError(ModelFormatError::Kind::Malformed,
                           "vocabulary file " + path + " line " + std::to_string(line_no) + ": " + why);
  };
  auto parse_size = [&](std::string_view field) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) bad("expected an integer, got '" + std::string(field) + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) bad("expected token<TAB>id<TAB>frequency");
    std::string token = line.substr(0, tab1);
    const std::size_t id = parse_size(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
    const std::size_t freq = parse_size(std::string_view(line).substr(tab2 + 1));
    if (id < 2) {
      const std::string_view expected = id == 0 ? kPadToken : kOovToken;
      if (token != expected) bad("reserved id " + std::to_string(id) + " must be " + std::string(expected));
      continue;
    }
    if (id != vocab.size()) bad("ids must be dense and sorted; expected " + std::to_string(vocab.size()));
    if (token.empty() || token == kPadToken || token == kOovToken || vocab.contains(token))
      bad("invalid or duplicate token '" + token + "'");
    vocab.add(token, freq);
  }
  return vocab;
}

Vocabulary build_vocabulary(const std::vector<Tokens>& corpus, std::size_t min_freq, std::size_t max_size) {
  require(min_freq >= 1, "build_vocabulary: min_freq must be >= 1");
  require(max_size >= 2, "build_vocabulary: max_size must be >= 2");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus)
    for (const auto& t : doc) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [token, n] : counts) {
    if (n >= min_freq && token != Vocabulary::kPadToken && token != Vocabulary::kOovToken)
      ranked.emplace_back(token, n);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > max_size - 2) ranked.resize(max_size - 2);

  Vocabulary vocab;
  for (const auto& [token, n] : ranked) vocab.add(token, n);
  return vocab;
}

std::vector<std::int32_t> encode(const Tokens& tokens, const Vocabulary& vocab, std::size_t max_len) {
  require(max_len >= 1, "encode: max_len must be >= 1");
  std::vector<std::int32_t> ids(max_len, Vocabulary::kPadId);
  const std::size_t n = std::min(tokens.size(), max_len);
  for (std::size_t i = 0; i < n; ++i) ids[i] = vocab.id(tokens[i]);
  return ids;
}

}  // namespace bgcnn::text
