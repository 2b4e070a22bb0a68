#include "tabfact/config_file.hpp"

#include "tabfact/ingest.hpp"

namespace tabfact {

const std::map<std::string, std::string>& ConfigFile::section(const std::string& name) const {
    static const std::map<std::string, std::string> empty;
    const auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
}

ConfigFile parse_config(std::string_view text, const std::string& origin) {
    ConfigFile out;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        auto where = [&] { return origin + ":" + std::to_string(line_no) + ": "; };
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(where() + "section header must end with ']'");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (current.empty()) throw ParseError(where() + "empty section name");
            out.sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(where() + "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(where() + "missing key");
        if (current.empty()) throw ParseError(where() + "'" + key + "' appears before any [section]");
        if (!out.sections[current].emplace(key, value).second)
            throw ParseError(where() + "duplicate key '" + key + "' in [" + current + "]");
    }
    return out;
}

ConfigFile load_config(const std::filesystem::path& path) { return parse_config(read_file(path), path.string()); }

}  // namespace tabfact
