#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace tabfact {

/// Flat `key = value` settings grouped under `[section]` headers. `#` and `;` start comments.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    [[nodiscard]] const std::map<std::string, std::string>& section(const std::string& name) const;
};

ConfigFile parse_config(std::string_view text, const std::string& origin = "config");
ConfigFile load_config(const std::filesystem::path& path);

}  // namespace tabfact
