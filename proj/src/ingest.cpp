#include "tabfact/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace tabfact {

using nlohmann::json;

namespace {

std::string position_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(byte - line_start + 1) + " (offset " +
           std::to_string(byte) + ")";
}

const json& require_field(const json& obj, const char* field, const std::string& where) {
    if (!obj.is_object() || !obj.contains(field)) {
        throw SchemaError(where + ": missing field \"" + field + "\"");
    }
    return obj.at(field);
}

int require_int(const json& obj, const char* field, const std::string& where) {
    const auto& v = require_field(obj, field, where);
    if (!v.is_number_integer()) throw SchemaError(where + ": field \"" + field + "\" must be an integer");
    return v.get<int>();
}

std::string require_string(const json& obj, const char* field, const std::string& where) {
    const auto& v = require_field(obj, field, where);
    if (!v.is_string()) throw SchemaError(where + ": field \"" + field + "\" must be a string");
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* field) {
    if (!obj.contains(field) || obj.at(field).is_null()) return std::nullopt;
    return obj.at(field).get<std::string>();
}

Coord coord_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw SchemaError(where + ": evidence coordinates must be [row, col] integer pairs");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

json table_to_json(const RawTable& t) {
    json cells = json::array();
    for (const auto& a : t.cells) {
        cells.push_back({{"r", a.row}, {"c", a.col}, {"rs", a.cell.row_span}, {"cs", a.cell.col_span},
                         {"text", a.cell.text}});
    }
    json j = {{"n_rows", t.n_rows}, {"n_cols", t.n_cols}, {"cells", std::move(cells)}};
    if (t.caption) j["caption"] = *t.caption;
    if (t.legend) j["legend"] = *t.legend;
    return j;
}

RawTable table_from_json(const std::string& id, const json& j) {
    const std::string where = "table \"" + id + "\"";
    RawTable t;
    t.table_id = id;
    t.n_rows = require_int(j, "n_rows", where);
    t.n_cols = require_int(j, "n_cols", where);
    const auto& cells = require_field(j, "cells", where);
    if (!cells.is_array()) throw SchemaError(where + ": \"cells\" must be an array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string cw = where + " cell " + std::to_string(i);
        const auto& c = cells[i];
        AnchoredCell a;
        a.row = require_int(c, "r", cw);
        a.col = require_int(c, "c", cw);
        a.cell.row_span = c.contains("rs") ? require_int(c, "rs", cw) : 1;
        a.cell.col_span = c.contains("cs") ? require_int(c, "cs", cw) : 1;
        a.cell.text = require_string(c, "text", cw);
        t.cells.push_back(std::move(a));
    }
    t.caption = optional_string(j, "caption");
    t.legend = optional_string(j, "legend");
    return t;
}

json statement_to_json(const StatementRecord& s) {
    json variants = json::array();
    for (const auto& v : s.evidence_variants) {
        json cells = json::array();
        for (const auto& c : v) cells.push_back({c.row, c.col});
        variants.push_back(std::move(cells));
    }
    return {{"id", s.statement_id},
            {"table_id", s.table_id},
            {"text", s.text},
            {"verdict", std::string(to_string(s.verdict))},
            {"evidence", std::move(variants)}};
}

StatementRecord statement_from_json(const json& j, std::size_t index) {
    const std::string where = "statement " + std::to_string(index);
    StatementRecord s;
    s.statement_id = require_string(j, "id", where);
    const std::string w = "statement \"" + s.statement_id + "\"";
    s.table_id = require_string(j, "table_id", w);
    s.text = require_string(j, "text", w);
    try {
        s.verdict = parse_verdict(require_string(j, "verdict", w));
    } catch (const ContractError& e) {
        throw SchemaError(w + ": " + e.what());
    }
    if (j.contains("evidence")) {
        const auto& ev = j.at("evidence");
        if (!ev.is_array()) throw SchemaError(w + ": \"evidence\" must be an array of variants");
        for (const auto& variant : ev) {
            if (!variant.is_array()) throw SchemaError(w + ": each evidence variant must be an array");
            CoordSet set;
            for (const auto& c : variant) set.insert(coord_from_json(c, w));
            s.evidence_variants.push_back(std::move(set));
        }
    }
    return s;
}

json parse_json_or_throw(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("JSON parse error at " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// Minimal markup scanner shared by the XML table reader and the HTML header oracle.

struct Tag {
    std::string name;  // lowercase
    bool closing = false;
    bool self_closing = false;
    std::map<std::string, std::string> attrs;
    std::size_t offset = 0;
};

struct Token {
    enum class Kind { Text, Tag } kind;
    std::string text;
    Tag tag;
};

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 8) {
            out.push_back('&');
            continue;
        }
        auto ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out.push_back('&');
        else if (ent == "lt") out.push_back('<');
        else if (ent == "gt") out.push_back('>');
        else if (ent == "quot") out.push_back('"');
        else if (ent == "apos") out.push_back('\'');
        else if (ent == "nbsp") out.push_back(' ');
        else {
            out.append(s.substr(i, semi - i + 1));
        }
        i = semi;
    }
    return out;
}

std::vector<Token> scan_markup(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto lower = [](std::string s) {
        std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    while (i < src.size()) {
        if (src[i] != '<') {
            auto next = src.find('<', i);
            if (next == std::string_view::npos) next = src.size();
            out.push_back({Token::Kind::Text, decode_entities(src.substr(i, next - i)), {}});
            i = next;
            continue;
        }
        if (src.substr(i, 4) == "<!--") {
            auto end = src.find("-->", i + 4);
            if (end == std::string_view::npos) throw ParseError("unterminated comment at " + position_of(src, i));
            i = end + 3;
            continue;
        }
        if (src.substr(i, 2) == "<!" || src.substr(i, 2) == "<?") {
            auto end = src.find('>', i);
            if (end == std::string_view::npos) throw ParseError("unterminated declaration at " + position_of(src, i));
            i = end + 1;
            continue;
        }
        Tag tag;
        tag.offset = i;
        std::size_t p = i + 1;
        auto skip_ws = [&] {
            while (p < src.size() && std::isspace(static_cast<unsigned char>(src[p]))) ++p;
        };
        skip_ws();
        if (p < src.size() && src[p] == '/') {
            tag.closing = true;
            ++p;
            skip_ws();
        }
        std::size_t name_start = p;
        while (p < src.size() && (std::isalnum(static_cast<unsigned char>(src[p])) || src[p] == '-' || src[p] == '_' ||
                                  src[p] == ':'))
            ++p;
        if (p == name_start) throw ParseError("malformed tag at " + position_of(src, i));
        tag.name = lower(std::string(src.substr(name_start, p - name_start)));
        for (;;) {
            skip_ws();
            if (p >= src.size()) throw ParseError("unterminated tag <" + tag.name + "> at " + position_of(src, i));
            if (src[p] == '>') {
                ++p;
                break;
            }
            if (src[p] == '/' && p + 1 < src.size() && src[p + 1] == '>') {
                tag.self_closing = true;
                p += 2;
                break;
            }
            std::size_t attr_start = p;
            while (p < src.size() && !std::isspace(static_cast<unsigned char>(src[p])) && src[p] != '=' &&
                   src[p] != '>' && src[p] != '/')
                ++p;
            if (p == attr_start) throw ParseError("malformed attribute in <" + tag.name + "> at " + position_of(src, p));
            std::string attr = lower(std::string(src.substr(attr_start, p - attr_start)));
            skip_ws();
            std::string value;
            if (p < src.size() && src[p] == '=') {
                ++p;
                skip_ws();
                if (p < src.size() && (src[p] == '"' || src[p] == '\'')) {
                    char q = src[p++];
                    auto end = src.find(q, p);
                    if (end == std::string_view::npos)
                        throw ParseError("unterminated attribute value in <" + tag.name + "> at " + position_of(src, p));
                    value = decode_entities(src.substr(p, end - p));
                    p = end + 1;
                } else {
                    std::size_t vs = p;
                    while (p < src.size() && !std::isspace(static_cast<unsigned char>(src[p])) && src[p] != '>') ++p;
                    value = std::string(src.substr(vs, p - vs));
                }
            }
            tag.attrs[attr] = value;
        }
        out.push_back({Token::Kind::Tag, {}, std::move(tag)});
        i = p;
    }
    return out;
}

int span_attr(const Tag& tag, std::initializer_list<const char*> names, std::string_view src) {
    for (const char* n : names) {
        auto it = tag.attrs.find(n);
        if (it == tag.attrs.end()) continue;
        int v = 0;
        auto s = trim(it->second);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1) {
            throw ParseError("invalid " + std::string(n) + " value '" + it->second + "' at " +
                             position_of(src, tag.offset));
        }
        return v;
    }
    return 1;
}

}  // namespace

const RawTable& Dataset::table_of(const StatementRecord& s) const {
    auto it = tables.find(s.table_id);
    if (it == tables.end()) {
        throw SchemaError("statement \"" + s.statement_id + "\" references unknown table_id \"" + s.table_id + "\"");
    }
    return it->second;
}

Dataset parse_dataset_json(std::string_view text, std::string split_name) {
    const json doc = parse_json_or_throw(text);
    if (!doc.is_object()) throw SchemaError("dataset: top level must be an object");
    Dataset d;
    d.split_name = std::move(split_name);
    if (doc.contains("split") && doc.at("split").is_string() && d.split_name.empty()) {
        d.split_name = doc.at("split").get<std::string>();
    }
    const auto& tables = require_field(doc, "tables", "dataset");
    if (!tables.is_object()) throw SchemaError("dataset: \"tables\" must be an object keyed by table id");
    for (const auto& [id, tj] : tables.items()) {
        RawTable t = table_from_json(id, tj);
        try {
            require_valid(t);
        } catch (const ContractError& e) {
            throw SchemaError(e.what());
        }
        d.tables.emplace(id, std::move(t));
    }
    const auto& statements = require_field(doc, "statements", "dataset");
    if (!statements.is_array()) throw SchemaError("dataset: \"statements\" must be an array");
    for (std::size_t i = 0; i < statements.size(); ++i) {
        StatementRecord s = statement_from_json(statements[i], i);
        const RawTable& t = d.table_of(s);
        try {
            validate_statement(s, t);
        } catch (const ContractError& e) {
            throw SchemaError(e.what());
        }
        d.statements.push_back(std::move(s));
    }
    return d;
}

Dataset load_dataset_json(const std::filesystem::path& path) {
    std::string split = path.stem().string();
    return parse_dataset_json(read_file(path), split);
}

std::string dataset_to_json(const Dataset& d) {
    json tables = json::object();
    for (const auto& [id, t] : d.tables) tables[id] = table_to_json(t);
    json statements = json::array();
    for (const auto& s : d.statements) statements.push_back(statement_to_json(s));
    json doc = {{"tables", std::move(tables)}, {"statements", std::move(statements)}};
    if (!d.split_name.empty()) doc["split"] = d.split_name;
    return doc.dump(1) + "\n";
}

void save_dataset_json(const Dataset& d, const std::filesystem::path& path) { write_file(path, dataset_to_json(d)); }

RawTable parse_csv_table(std::string_view bytes, std::string table_id) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    int quote_row = 0;
    std::size_t i = 0;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < bytes.size()) {
        char c = bytes[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                field.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
            quote_row = static_cast<int>(rows.size()) + 1;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') {
            end_row();
            ++i;
        } else if (c == '\n') {
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (in_quotes) throw ParseError("CSV: unbalanced quote starting in row " + std::to_string(quote_row));
    if (field_started || !row.empty()) end_row();
    if (rows.empty()) throw ParseError("CSV: no rows");

    RawTable t;
    t.table_id = std::move(table_id);
    t.n_rows = static_cast<int>(rows.size());
    t.n_cols = 0;
    for (const auto& r : rows) t.n_cols = std::max(t.n_cols, static_cast<int>(r.size()));
    for (int r = 0; r < t.n_rows; ++r) {
        for (int c = 0; c < t.n_cols; ++c) {
            std::string text = c < static_cast<int>(rows[r].size()) ? rows[r][c] : std::string{};
            t.cells.push_back({r, c, {std::move(text), 1, 1}});
        }
    }
    return t;
}

RawTable parse_xml_table(std::string_view bytes, std::string table_id) {
    const auto tokens = scan_markup(bytes);
    RawTable t;
    t.table_id = std::move(table_id);

    struct Pending {
        AnchoredCell cell;
        int row_index;
        std::size_t offset;
    };
    std::vector<std::vector<Pending>> rows;
    std::vector<std::string> stack;
    std::string text_acc;
    std::optional<Pending> open_cell;
    bool seen_table = false;

    for (const auto& tok : tokens) {
        if (tok.kind == Token::Kind::Text) {
            if (!stack.empty() && (stack.back() == "cell" || stack.back() == "caption" || stack.back() == "legend"))
                text_acc += tok.text;
            continue;
        }
        const Tag& tag = tok.tag;
        if (!tag.closing) {
            if (tag.name == "table") {
                if (seen_table) throw ParseError("XML: more than one <table> at " + position_of(bytes, tag.offset));
                seen_table = true;
                if (t.table_id.empty() && tag.attrs.contains("id")) t.table_id = tag.attrs.at("id");
            } else if (tag.name == "row") {
                if (stack.empty() || stack.back() != "table")
                    throw ParseError("XML: <row> outside <table> at " + position_of(bytes, tag.offset));
                rows.emplace_back();
            } else if (tag.name == "cell") {
                if (stack.empty() || stack.back() != "row")
                    throw ParseError("XML: <cell> outside <row> at " + position_of(bytes, tag.offset));
                Pending p{{0, 0, {"", span_attr(tag, {"row-span", "rowspan"}, bytes),
                                  span_attr(tag, {"col-span", "colspan"}, bytes)}},
                          static_cast<int>(rows.size()) - 1, tag.offset};
                if (tag.self_closing) {
                    rows.back().push_back(std::move(p));
                    continue;
                }
                open_cell = std::move(p);
                text_acc.clear();
            } else if (tag.name == "caption" || tag.name == "legend") {
                if (stack.empty() || stack.back() != "table")
                    throw ParseError("XML: <" + tag.name + "> outside <table> at " + position_of(bytes, tag.offset));
                text_acc.clear();
                if (tag.self_closing) {
                    (tag.name == "caption" ? t.caption : t.legend) = std::string{};
                    continue;
                }
            } else {
                throw ParseError("XML: unsupported element <" + tag.name + "> at " + position_of(bytes, tag.offset));
            }
            if (!tag.self_closing) stack.push_back(tag.name);
            continue;
        }
        if (stack.empty() || stack.back() != tag.name) {
            throw ParseError("XML: unexpected </" + tag.name + "> at " + position_of(bytes, tag.offset) +
                             (stack.empty() ? std::string{} : " (expected </" + stack.back() + ">)"));
        }
        stack.pop_back();
        if (tag.name == "cell") {
            open_cell->cell.cell.text = text_acc;
            rows.back().push_back(std::move(*open_cell));
            open_cell.reset();
        } else if (tag.name == "caption") {
            t.caption = text_acc;
        } else if (tag.name == "legend") {
            t.legend = text_acc;
        }
    }
    if (!stack.empty()) throw ParseError("XML: unclosed <" + stack.back() + "> at end of input");
    if (!seen_table) throw ParseError("XML: no <table> element");
    if (rows.empty()) throw ParseError("XML: table has no rows");

    // Slot cells into the grid: each cell takes the next column not already claimed by a
    // row span from an earlier row.
    const int n_rows = static_cast<int>(rows.size());
    std::vector<std::vector<int>> owner(n_rows);  // anchor index per position, grows with columns
    auto claim = [&](int r, int c, int idx, std::size_t offset) {
        if (r >= n_rows) {
            const auto& a = t.cells[static_cast<std::size_t>(idx)];
            throw ParseError("XML: cell anchored at (" + std::to_string(a.row) + "," + std::to_string(a.col) +
                             ") spans beyond the last row at " + position_of(bytes, offset));
        }
        if (static_cast<int>(owner[r].size()) <= c) owner[r].resize(static_cast<std::size_t>(c) + 1, -1);
        if (int prev = owner[r][c]; prev >= 0) {
            const auto& p = t.cells[static_cast<std::size_t>(prev)];
            const auto& a = t.cells[static_cast<std::size_t>(idx)];
            throw ParseError("XML: overlapping spans at (" + std::to_string(r) + "," + std::to_string(c) +
                             ") between cells anchored at (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                             ") and (" + std::to_string(a.row) + "," + std::to_string(a.col) + ")");
        }
        owner[r][c] = idx;
    };
    for (int r = 0; r < n_rows; ++r) {
        int col = 0;
        for (auto& p : rows[r]) {
            while (col < static_cast<int>(owner[r].size()) && owner[r][col] >= 0) ++col;
            p.cell.row = r;
            p.cell.col = col;
            const int idx = static_cast<int>(t.cells.size());
            t.cells.push_back(p.cell);
            for (int dr = 0; dr < p.cell.cell.row_span; ++dr)
                for (int dc = 0; dc < p.cell.cell.col_span; ++dc) claim(r + dr, col + dc, idx, p.offset);
            col += p.cell.cell.col_span;
        }
    }
    t.n_rows = n_rows;
    t.n_cols = 0;
    for (const auto& o : owner) t.n_cols = std::max(t.n_cols, static_cast<int>(o.size()));
    if (t.n_cols == 0) throw ParseError("XML: table has no cells");
    for (int r = 0; r < n_rows; ++r) {
        owner[r].resize(static_cast<std::size_t>(t.n_cols), -1);
        for (int c = 0; c < t.n_cols; ++c)
            if (owner[r][c] < 0) t.cells.push_back({r, c, {"", 1, 1}});
    }
    std::ranges::sort(t.cells, [](const AnchoredCell& a, const AnchoredCell& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    require_valid(t);
    return t;
}

HeaderOracle extract_header_oracle(std::string_view html_bytes, std::string table_id) {
    const auto tokens = scan_markup(html_bytes);
    HeaderOracle out{std::move(table_id), 0};
    bool in_thead = false;
    bool seen_thead = false;
    for (const auto& tok : tokens) {
        if (tok.kind != Token::Kind::Tag) continue;
        const Tag& tag = tok.tag;
        if (tag.name == "thead") {
            if (!tag.closing) {
                if (in_thead) throw ParseError("HTML: nested <thead> at " + position_of(html_bytes, tag.offset));
                if (seen_thead) throw ParseError("HTML: more than one <thead> at " + position_of(html_bytes, tag.offset));
                seen_thead = true;
                in_thead = !tag.self_closing;
            } else {
                if (!in_thead) throw ParseError("HTML: stray </thead> at " + position_of(html_bytes, tag.offset));
                in_thead = false;
            }
        } else if (tag.name == "tr" && !tag.closing && in_thead) {
            ++out.header_row_count;
        }
    }
    if (in_thead) throw ParseError("HTML: unclosed <thead>");
    return out;
}

std::map<std::string, int> load_header_manifest(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::map<std::string, int> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto tab = view.find('\t');
        int value = 0;
        if (tab == std::string_view::npos) throw ParseError(path.string() + ": line " + std::to_string(line_no) + " has no tab");
        auto num = trim(view.substr(tab + 1));
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
        if (ec != std::errc{} || ptr != num.data() + num.size() || value < 0)
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + " has a bad header count");
        out[std::string(view.substr(0, tab))] = value;
    }
    return out;
}

void save_header_manifest(const std::map<std::string, int>& manifest, const std::filesystem::path& path) {
    std::string out = "# table_id\theader_rows\n";
    for (const auto& [id, h] : manifest) out += id + "\t" + std::to_string(h) + "\n";
    write_file(path, out);
}

void write_predictions(std::vector<VerdictPrediction> records, const std::filesystem::path& path) {
    std::ranges::sort(records, {}, &VerdictPrediction::statement_id);
    json arr = json::array();
    for (const auto& r : records) {
        json j = {{"id", r.statement_id},
                  {"table_id", r.table_id},
                  {"verdict", std::string(to_string(r.verdict))},
                  {"probs", r.probs},
                  {"length", r.length},
                  {"truncated_rows", r.truncated_rows}};
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    write_file(path, arr.dump(1) + "\n");
}

namespace {

char label_char(CellLabel l) {
    switch (l) {
        case CellLabel::Relevant: return 'R';
        case CellLabel::Irrelevant: return 'I';
        case CellLabel::Excluded: return '-';
    }
    return '-';
}

CellLabel label_from_char(char c) {
    switch (c) {
        case 'R': return CellLabel::Relevant;
        case 'I': return CellLabel::Irrelevant;
        case '-': return CellLabel::Excluded;
        default: throw SchemaError(std::string("evidence predictions: bad label character '") + c + "'");
    }
}

}  // namespace

void write_evidence_predictions(std::vector<EvidencePrediction> grids, const std::filesystem::path& path) {
    std::ranges::sort(grids, {}, &EvidencePrediction::statement_id);
    json arr = json::array();
    for (const auto& g : grids) {
        json rows = json::array();
        for (int r = 0; r < g.labels.labels.rows(); ++r) {
            std::string row;
            for (int c = 0; c < g.labels.labels.cols(); ++c) row.push_back(label_char(g.labels.labels(r, c)));
            rows.push_back(std::move(row));
        }
        json j = {{"id", g.statement_id},
                  {"table_id", g.table_id},
                  {"labels", std::move(rows)},
                  {"length", g.length},
                  {"truncated_rows", g.truncated_rows}};
        if (!g.error.empty()) j["error"] = g.error;
        arr.push_back(std::move(j));
    }
    write_file(path, arr.dump(1) + "\n");
}

std::vector<VerdictPrediction> read_predictions(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const json doc = parse_json_or_throw(text);
    std::vector<VerdictPrediction> out;
    if (doc.is_object()) {
        Dataset d = parse_dataset_json(text);
        for (const auto& s : d.statements) {
            VerdictPrediction p;
            p.statement_id = s.statement_id;
            p.table_id = s.table_id;
            p.verdict = s.verdict;
            p.probs[static_cast<int>(s.verdict)] = 1.0;
            out.push_back(std::move(p));
        }
        return out;
    }
    if (!doc.is_array()) throw SchemaError(path.string() + ": predictions must be a JSON array");
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string where = path.string() + " record " + std::to_string(i);
        const auto& j = doc[i];
        VerdictPrediction p;
        p.statement_id = require_string(j, "id", where);
        p.table_id = j.value("table_id", "");
        try {
            p.verdict = parse_verdict(require_string(j, "verdict", where));
        } catch (const ContractError& e) {
            throw SchemaError(where + ": " + e.what());
        }
        if (j.contains("probs")) p.probs = j.at("probs").get<std::array<double, kNumVerdicts>>();
        p.length = j.value("length", 0);
        p.truncated_rows = j.value("truncated_rows", 0);
        p.error = j.value("error", "");
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<EvidencePrediction> read_evidence_predictions(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const json doc = parse_json_or_throw(text);
    std::vector<EvidencePrediction> out;
    if (doc.is_object()) {
        // Gold dataset used as a prediction: the first evidence variant is the prediction.
        Dataset d = parse_dataset_json(text);
        for (const auto& s : d.statements) {
            const RawTable& t = d.table_of(s);
            EvidencePrediction p;
            p.statement_id = s.statement_id;
            p.table_id = s.table_id;
            p.labels = {s.statement_id, Grid<CellLabel>(t.n_rows, t.n_cols, CellLabel::Irrelevant)};
            if (!s.evidence_variants.empty())
                for (const auto& c : s.evidence_variants.front()) p.labels.labels(c.row, c.col) = CellLabel::Relevant;
            out.push_back(std::move(p));
        }
        return out;
    }
    if (!doc.is_array()) throw SchemaError(path.string() + ": evidence predictions must be a JSON array");
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string where = path.string() + " record " + std::to_string(i);
        const auto& j = doc[i];
        EvidencePrediction p;
        p.statement_id = require_string(j, "id", where);
        p.table_id = j.value("table_id", "");
        const auto& rows = require_field(j, "labels", where);
        const int n_rows = static_cast<int>(rows.size());
        const int n_cols = n_rows == 0 ? 0 : static_cast<int>(rows[0].get<std::string>().size());
        p.labels = {p.statement_id, Grid<CellLabel>(n_rows, n_cols)};
        for (int r = 0; r < n_rows; ++r) {
            const auto row = rows[static_cast<std::size_t>(r)].get<std::string>();
            if (static_cast<int>(row.size()) != n_cols) throw SchemaError(where + ": ragged label rows");
            for (int c = 0; c < n_cols; ++c) p.labels.labels(r, c) = label_from_char(row[static_cast<std::size_t>(c)]);
        }
        p.length = j.value("length", 0);
        p.truncated_rows = j.value("truncated_rows", 0);
        p.error = j.value("error", "");
        out.push_back(std::move(p));
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace tabfact
