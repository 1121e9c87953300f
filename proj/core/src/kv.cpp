#include "spdc/kv.hpp"

#include <charconv>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const KeyValueEntry* find_last(const std::vector<KeyValueEntry>& entries, std::string_view key) {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (it->key == key) return &*it;
  return nullptr;
}

}  // namespace

const KeyValueEntry* KeyValueSection::find(std::string_view key) const { return find_last(entries, key); }
const KeyValueEntry* KeyValueDocument::find(std::string_view key) const { return find_last(entries, key); }

KeyValueDocument parse_key_values(std::string_view text, std::string_view origin) {
  KeyValueDocument doc;
  std::vector<std::string> problems;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        problems.push_back(std::string(origin) + ":" + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      doc.sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    KeyValueEntry entry{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
    if (entry.key.empty()) {
      problems.push_back(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (doc.sections.empty())
      doc.entries.push_back(std::move(entry));
    else
      doc.sections.back().entries.push_back(std::move(entry));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return doc;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw InputError("not a number: '" + std::string(text) + "'");
  return value;
}

}  // namespace spdc
