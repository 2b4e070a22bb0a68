#include "tabfact/encoding.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tabfact/ingest.hpp"

namespace tabfact {

namespace {

constexpr std::string_view kVocabHeader =
    "# tabfact vocab v1: ids 0-3 are [PAD] [UNK] [CLS] [SEP]; the k-th token line below has id k+3";

const std::vector<std::string> kReserved = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};

std::size_t utf8_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;
}

/// Splits a word into UTF-8 characters.
std::vector<std::string> characters(std::string_view word) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < word.size();) {
        std::size_t n = std::min(utf8_length(static_cast<unsigned char>(word[i])), word.size() - i);
        out.emplace_back(word.substr(i, n));
        i += n;
    }
    return out;
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(std::vector<std::string> non_reserved_tokens) {
    tokens_ = kReserved;
    for (std::size_t i = 0; i < kReserved.size(); ++i) ids_.emplace(kReserved[i], static_cast<int>(i));
    for (auto& t : non_reserved_tokens) {
        if (ids_.contains(t)) {
            throw ContractError("duplicate vocabulary token '" + t + "'");
        }
        ids_.emplace(t, static_cast<int>(tokens_.size()));
        tokens_.push_back(std::move(t));
    }
}

int Vocab::id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? -1 : it->second;
}

const std::string& Vocab::token(int id) const {
    if (id < 0 || id >= size()) throw ContractError("token id " + std::to_string(id) + " outside vocabulary");
    return tokens_[static_cast<std::size_t>(id)];
}

std::vector<std::string> basic_tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) out.push_back(std::move(word));
        word.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            flush();
        } else if (c < 0x80 && std::ispunct(c)) {
            flush();
            out.emplace_back(1, ch);
        } else {
            word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        }
    }
    flush();
    return out;
}

Vocab build_vocab(std::span<const std::string> corpus, int max_size) {
    if (max_size < Vocab::kNumReserved) throw ContractError("vocabulary size must be at least 4");
    std::map<std::string, long> word_counts;
    std::map<std::string, long> char_counts;
    for (const auto& text : corpus) {
        for (auto& w : basic_tokenize(text)) {
            for (auto& ch : characters(w)) ++char_counts[ch];
            ++word_counts[std::move(w)];
        }
    }
    auto ranked = [](const std::map<std::string, long>& counts) {
        std::vector<std::pair<std::string, long>> v(counts.begin(), counts.end());
        std::ranges::stable_sort(v, [](const auto& a, const auto& b) { return a.second > b.second; });
        return v;
    };
    std::vector<std::string> tokens;
    std::unordered_map<std::string, bool> seen;
    const auto budget = static_cast<std::size_t>(max_size - Vocab::kNumReserved);
    auto add = [&](std::string t) {
        if (tokens.size() >= budget || seen.contains(t)) return;
        seen.emplace(t, true);
        tokens.push_back(std::move(t));
    };
    const auto chars = ranked(char_counts);
    for (const auto& [ch, n] : chars) add(ch);
    for (const auto& [ch, n] : chars) add(std::string(Vocab::kContinuation) + ch);
    for (const auto& [w, n] : ranked(word_counts)) add(w);
    return Vocab(std::move(tokens));
}

std::vector<int> tokenize(std::string_view text, const Vocab& v) {
    std::vector<int> out;
    for (const auto& word : basic_tokenize(text)) {
        if (int whole = v.id(word); whole >= 0) {
            out.push_back(whole);
            continue;
        }
        const auto chars = characters(word);
        std::size_t start = 0;
        while (start < chars.size()) {
            int found = -1;
            std::size_t found_end = start;
            std::string piece = start == 0 ? std::string{} : std::string(Vocab::kContinuation);
            const std::size_t prefix_len = piece.size();
            // Longest match first.
            std::string candidate;
            for (std::size_t end = chars.size(); end > start; --end) {
                candidate.assign(piece, 0, prefix_len);
                for (std::size_t k = start; k < end; ++k) candidate += chars[k];
                if (int id = v.id(candidate); id >= 0) {
                    found = id;
                    found_end = end;
                    break;
                }
            }
            if (found < 0) {
                out.push_back(Vocab::kUnk);
                ++start;
            } else {
                out.push_back(found);
                start = found_end;
            }
        }
    }
    return out;
}

std::string vocab_to_text(const Vocab& v) {
    std::string out(kVocabHeader);
    out.push_back('\n');
    for (int i = Vocab::kNumReserved; i < v.size(); ++i) {
        out += v.token(i);
        out.push_back('\n');
    }
    return out;
}

Vocab vocab_from_text(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (first) {
            first = false;
            if (!line.starts_with("# tabfact vocab v1")) throw ParseError("vocab: missing 'tabfact vocab v1' header");
            continue;
        }
        tokens.emplace_back(line);
    }
    if (first) throw ParseError("vocab: empty file");
    return Vocab(std::move(tokens));
}

void save_vocab(const Vocab& v, const std::filesystem::path& path) { write_file(path, vocab_to_text(v)); }

Vocab load_vocab(const std::filesystem::path& path) { return vocab_from_text(read_file(path)); }

std::string template_statement(std::string_view text, Verdict verdict) {
    switch (verdict) {
        case Verdict::Entailed: return "Which cells entail \"" + std::string(text) + "\"?";
        case Verdict::Refuted: return "Which cells refute \"" + std::string(text) + "\"?";
        case Verdict::Unknown: break;
    }
    throw ContractError("cannot template a statement with an unknown verdict");
}

EncodedExample encode_example(std::string_view statement, const SingleCellTable& t, const Vocab& v, int max_len) {
    if (t.header_rows != 1) {
        throw ContractError("table '" + t.table_id + "' must have exactly one header row before encoding (has " +
                            std::to_string(t.header_rows) + ")");
    }
    const auto stmt = tokenize(statement, v);
    std::vector<std::vector<std::vector<int>>> cells(static_cast<std::size_t>(t.n_rows()));
    std::vector<int> row_len(static_cast<std::size_t>(t.n_rows()), 0);
    for (int r = 0; r < t.n_rows(); ++r) {
        for (int c = 0; c < t.n_cols(); ++c) {
            auto ids = tokenize(t.grid(r, c), v);
            row_len[static_cast<std::size_t>(r)] += static_cast<int>(ids.size());
            cells[static_cast<std::size_t>(r)].push_back(std::move(ids));
        }
    }
    const int overhead = 2 + static_cast<int>(stmt.size());
    int total = overhead + row_len[0];
    if (total > max_len) {
        throw OversizeError("table '" + t.table_id + "': statement and header need " + std::to_string(total) +
                            " tokens, more than max_len " + std::to_string(max_len));
    }
    int full = total;
    for (int r = 1; r < t.n_rows(); ++r) full += row_len[static_cast<std::size_t>(r)];
    int kept_rows = 0;
    for (int r = 1; r < t.n_rows(); ++r) {
        if (total + row_len[static_cast<std::size_t>(r)] > max_len) break;
        total += row_len[static_cast<std::size_t>(r)];
        ++kept_rows;
    }

    EncodedExample e;
    e.n_cols = t.n_cols();
    e.full_length = full;
    e.kept_body_rows = kept_rows;
    e.truncated_rows = t.n_rows() - 1 - kept_rows;
    auto push = [&](int tok, int seg, int col, int row, int pos, int cell) {
        e.token_ids.push_back(tok);
        e.segment_ids.push_back(seg);
        e.column_ids.push_back(col);
        e.row_ids.push_back(row);
        e.pos_in_cell.push_back(pos);
        e.cell_index.push_back(cell);
    };
    // The statement counts as one cell; the specials sit at position 0.
    push(Vocab::kCls, 0, 0, 0, 0, -1);
    int pos = 0;
    for (int tok : stmt) push(tok, 0, 0, 0, pos++, -1);
    push(Vocab::kSep, 0, 0, 0, 0, -1);
    for (int r = 0; r <= kept_rows; ++r) {
        for (int c = 0; c < t.n_cols(); ++c) {
            const auto& ids = cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            for (std::size_t k = 0; k < ids.size(); ++k)
                push(ids[k], 1, c + 1, r, static_cast<int>(k), r * t.n_cols() + c);
        }
    }
    e.attention_len = e.length();
    return e;
}

EncodedExample pad_to(EncodedExample e, int length) {
    while (e.length() < length) {
        e.token_ids.push_back(Vocab::kPad);
        e.segment_ids.push_back(0);
        e.column_ids.push_back(0);
        e.row_ids.push_back(0);
        e.pos_in_cell.push_back(0);
        e.cell_index.push_back(-1);
    }
    return e;
}

std::string encoded_example_to_json(const EncodedExample& e, const Vocab& v) {
    nlohmann::json tokens = nlohmann::json::array();
    for (int id : e.token_ids) tokens.push_back(v.token(id));
    nlohmann::json j = {{"tokens", tokens},
                        {"token_ids", e.token_ids},
                        {"segment_ids", e.segment_ids},
                        {"column_ids", e.column_ids},
                        {"row_ids", e.row_ids},
                        {"pos_in_cell", e.pos_in_cell},
                        {"cell_index", e.cell_index},
                        {"attention_len", e.attention_len},
                        {"truncated_rows", e.truncated_rows},
                        {"full_length", e.full_length}};
    return j.dump(1) + "\n";
}

}  // namespace tabfact
