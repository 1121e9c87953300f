#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace spdc {

/// One `key = value` line.
struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// A `[name]` block; its entries follow it until the next header.
struct KeyValueSection {
  std::string name;
  int line = 0;
  std::vector<KeyValueEntry> entries;

  const KeyValueEntry* find(std::string_view key) const;
};

/// Flat key-value text: `key = value` per line, `#` starts a comment, blank
/// lines ignored. Optional `[section]` headers open repeatable blocks; keys
/// before the first header belong to the top level.
struct KeyValueDocument {
  std::vector<KeyValueEntry> entries;
  std::vector<KeyValueSection> sections;

  /// Last top-level entry with this key, or nullptr.
  const KeyValueEntry* find(std::string_view key) const;
};

/// Throws ConfigError listing every malformed line.
KeyValueDocument parse_key_values(std::string_view text, std::string_view origin);

/// Strict full-string conversion; throws InputError.
double parse_double(std::string_view text);

}  // namespace spdc
