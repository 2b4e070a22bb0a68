#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabfact/table.hpp"

namespace tabfact {

/// Raised when a statement plus the header row cannot fit in the sequence budget.
class OversizeError : public Error {
public:
    using Error::Error;
};

/// Word-piece vocabulary built from a corpus. Ids 0-3 are reserved; continuation pieces carry
/// the "##" prefix.
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;
    static constexpr int kNumReserved = 4;
    static constexpr std::string_view kContinuation = "##";

    Vocab();
    explicit Vocab(std::vector<std::string> non_reserved_tokens);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(tokens_.size()); }
    /// -1 when absent.
    [[nodiscard]] int id(std::string_view token) const;
    [[nodiscard]] const std::string& token(int id) const;
    [[nodiscard]] const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    bool operator==(const Vocab& o) const { return tokens_ == o.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

/// Lowercased words and single-character punctuation tokens, before piece matching.
std::vector<std::string> basic_tokenize(std::string_view text);

/// Character pieces (plain and "##"-continued) for every character seen, then whole words by
/// descending frequency; ties break lexicographically. Truncated to `max_size` entries in total.
Vocab build_vocab(std::span<const std::string> corpus, int max_size);

/// Greedy longest-match piece segmentation; characters with no matching piece become UNK.
std::vector<int> tokenize(std::string_view text, const Vocab& v);

void save_vocab(const Vocab& v, const std::filesystem::path& path);
Vocab load_vocab(const std::filesystem::path& path);
std::string vocab_to_text(const Vocab& v);
Vocab vocab_from_text(std::string_view text);

/// `Which cells entail "<text>"?` / `Which cells refute "<text>"?`.
std::string template_statement(std::string_view text, Verdict verdict);

struct EncodedExample {
    std::vector<int> token_ids;
    std::vector<int> segment_ids;
    std::vector<int> column_ids;
    std::vector<int> row_ids;
    std::vector<int> pos_in_cell;
    std::vector<int> cell_index;
    int attention_len = 0;   // number of real (non-padding) tokens
    int truncated_rows = 0;  // body rows dropped to fit max_len
    int full_length = 0;     // sequence length before truncation
    int n_cols = 0;          // table width, for decoding cell_index
    int kept_body_rows = 0;

    [[nodiscard]] int length() const noexcept { return static_cast<int>(token_ids.size()); }
};

/// [CLS] statement [SEP] then table cells row-major starting at the (single) header row. Whole
/// body rows are dropped from the bottom until the sequence fits `max_len`.
EncodedExample encode_example(std::string_view statement, const SingleCellTable& t, const Vocab& v,
                              int max_len = 512);

/// Appends PAD tokens up to `length`; attention_len keeps counting only real tokens.
EncodedExample pad_to(EncodedExample e, int length);

/// Debug dump with every index list.
std::string encoded_example_to_json(const EncodedExample& e, const Vocab& v);

}  // namespace tabfact
