#pragma once

// Word embedding stores and their on-disk formats.

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/io.hpp"
#include "swirl/pairdata.hpp"

namespace swirl {

enum class EmbeddingSource : std::uint8_t { word2vec, glove, bert_table, api_small, api_large };

inline std::string_view to_string(EmbeddingSource s) {
    switch (s) {
        case EmbeddingSource::word2vec: return "word2vec";
        case EmbeddingSource::glove: return "glove";
        case EmbeddingSource::bert_table: return "bert-table";
        case EmbeddingSource::api_small: return "text-embedding-3-small";
        case EmbeddingSource::api_large: return "text-embedding-3-large";
    }
    return "?";
}

inline EmbeddingSource parse_embedding_source(std::string_view s) {
    for (auto v : {EmbeddingSource::word2vec, EmbeddingSource::glove, EmbeddingSource::bert_table,
                   EmbeddingSource::api_small, EmbeddingSource::api_large})
        if (to_string(v) == s) return v;
    throw ParseError("unknown embedding model '" + std::string(s) + "'");
}

/// Word -> fixed-length float vector. Words keep their insertion order, which
/// is also the serialization order.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(std::size_t dim, EmbeddingSource source) : dim_(dim), source_(source) {
        if (dim == 0) throw ParameterError("embedding dimension must be positive");
    }

    /// Adds a vector; a word already present keeps its first vector.
    /// Returns false for the duplicate case.
    bool add(std::string word, std::span<const float> values) {
        if (values.size() != dim_)
            throw DataError("vector for '" + word + "' has length " + std::to_string(values.size()) +
                            ", expected " + std::to_string(dim_));
        for (float v : values)
            if (!std::isfinite(v)) throw DataError("non-finite value in vector for '" + word + "'");
        auto [it, inserted] = index_.try_emplace(word, words_.size());
        if (!inserted) return false;
        words_.push_back(std::move(word));
        data_.insert(data_.end(), values.begin(), values.end());
        return true;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    EmbeddingSource source() const noexcept { return source_; }
    const std::vector<std::string>& words() const noexcept { return words_; }

    bool contains(std::string_view word) const { return index_.count(std::string(word)) != 0; }

    /// Empty span when the word is absent.
    std::span<const float> find(std::string_view word) const {
        auto it = index_.find(std::string(word));
        if (it == index_.end()) return {};
        return {data_.data() + it->second * dim_, dim_};
    }

    std::span<const float> lookup(std::string_view word) const {
        auto v = find(word);
        if (v.empty()) throw LookupError("no embedding for word '" + std::string(word) + "'");
        return v;
    }

private:
    std::size_t dim_ = 0;
    EmbeddingSource source_ = EmbeddingSource::glove;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> data_;
};

namespace detail {

inline float load_le_float(const char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, 4);
    if constexpr (std::endian::native == std::endian::big)
        bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
    return std::bit_cast<float>(bits);
}

inline void store_le_float(std::string& out, float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big)
        bits = ((bits & 0xFF) << 24) | ((bits & 0xFF00) << 8) | ((bits >> 8) & 0xFF00) | (bits >> 24);
    char buf[4];
    std::memcpy(buf, &bits, 4);
    out.append(buf, 4);
}

inline bool parse_uint(std::string_view s, std::size_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace detail

/// word2vec binary: ASCII header "<count> <dim>\n", then per word the token,
/// one space, and `dim` little-endian float32 values. Whitespace between
/// records (the reference tool writes '\n') is skipped. With `vocab` set,
/// only those words are kept.
inline EmbeddingStore parse_word2vec_binary(std::string_view bytes,
                                            EmbeddingSource source = EmbeddingSource::word2vec,
                                            const std::unordered_set<std::string>* vocab = nullptr) {
    std::size_t header_end = bytes.find('\n');
    if (header_end == std::string_view::npos) throw ParseError("word2vec: missing header line", 1, 0);
    auto header = detail::split_ws(bytes.substr(0, header_end));
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !detail::parse_uint(header[0], count) || !detail::parse_uint(header[1], dim) ||
        dim == 0)
        throw ParseError("word2vec: malformed header", 1, 0);

    EmbeddingStore store(dim, source);
    std::vector<float> buf(dim);
    std::size_t pos = header_end + 1;
    for (std::size_t r = 0; r < count; ++r) {
        while (pos < bytes.size() && (bytes[pos] == '\n' || bytes[pos] == ' ' || bytes[pos] == '\r')) ++pos;
        std::size_t tok_end = bytes.find(' ', pos);
        if (pos >= bytes.size() || tok_end == std::string_view::npos)
            throw ParseError("word2vec: truncated at record " + std::to_string(r) + " (byte offset " +
                                 std::to_string(pos) + ")",
                             0, pos);
        std::string token(bytes.substr(pos, tok_end - pos));
        pos = tok_end + 1;
        if (bytes.size() - pos < 4 * dim)
            throw ParseError("word2vec: truncated vector for '" + token + "' (byte offset " +
                                 std::to_string(pos) + ")",
                             0, pos);
        const char* raw = bytes.data() + pos;
        pos += 4 * dim;
        if (vocab && !vocab->count(token)) continue;
        for (std::size_t j = 0; j < dim; ++j) buf[j] = detail::load_le_float(raw + 4 * j);
        store.add(std::move(token), buf);
    }
    return store;
}

inline EmbeddingStore load_word2vec_binary(const std::filesystem::path& path,
                                           EmbeddingSource source = EmbeddingSource::word2vec,
                                           const std::unordered_set<std::string>* vocab = nullptr) {
    io::MappedFile file(path);
    return parse_word2vec_binary(file.view(), source, vocab);
}

inline std::string to_word2vec_binary(const EmbeddingStore& store) {
    std::string out = std::to_string(store.size()) + " " + std::to_string(store.dim()) + "\n";
    for (const auto& w : store.words()) {
        out += w;
        out += ' ';
        for (float v : store.find(w)) detail::store_le_float(out, v);
        out += '\n';
    }
    return out;
}

/// Text vectors: "<token> <f1> ... <fd>" per line, as in GloVe releases.
/// The dimension comes from the first line. A first line consisting of two
/// unsigned integers is treated as a "<count> <dim>" header and skipped.
/// With `vocab` set, other words are skipped after the width check.
inline EmbeddingStore parse_vectors_text(std::string_view text, EmbeddingSource source = EmbeddingSource::glove,
                                         const std::unordered_set<std::string>* vocab = nullptr) {
    EmbeddingStore store;
    bool initialised = false;
    std::vector<float> buf;
    io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        auto fields = detail::split_ws(line);
        if (fields.empty()) return;
        if (line_no == 1 && fields.size() == 2) {
            std::size_t a = 0, b = 0;
            if (detail::parse_uint(fields[0], a) && detail::parse_uint(fields[1], b)) return;
        }
        if (fields.size() < 2) throw ParseError("vectors: line " + std::to_string(line_no) + " has no values", line_no);
        const std::size_t d = fields.size() - 1;
        if (!initialised) {
            store = EmbeddingStore(d, source);
            buf.resize(d);
            initialised = true;
        } else if (d != store.dim()) {
            throw ParseError("vectors: line " + std::to_string(line_no) + " has " + std::to_string(d) +
                                 " values, expected " + std::to_string(store.dim()),
                             line_no);
        }
        if (vocab && !vocab->count(std::string(fields[0]))) return;
        for (std::size_t j = 0; j < d; ++j) {
            std::string_view f = fields[j + 1];
            double v = 0;
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc{} || p != f.data() + f.size())
                throw ParseError("vectors: line " + std::to_string(line_no) + ": bad number '" +
                                     std::string(f) + "'",
                                 line_no);
            buf[j] = static_cast<float>(v);
        }
        std::string token(fields[0]);
        for (float v : buf)
            if (!std::isfinite(v))
                throw DataError("vectors: non-finite value for '" + token + "' at line " + std::to_string(line_no));
        store.add(std::move(token), buf);
    });
    if (!initialised) throw ParseError("vectors: no vectors found");
    return store;
}

inline EmbeddingStore load_vectors_text(const std::filesystem::path& path,
                                        EmbeddingSource source = EmbeddingSource::glove,
                                        const std::unordered_set<std::string>* vocab = nullptr) {
    io::MappedFile file(path);
    return parse_vectors_text(file.view(), source, vocab);
}

/// Text serialization with 9 significant digits, enough to round-trip float32.
inline std::string to_vectors_text(const EmbeddingStore& store) {
    std::string out;
    char buf[32];
    for (const auto& w : store.words()) {
        out += w;
        for (float v : store.find(w)) {
            std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(v));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline void write_vectors_text(const std::filesystem::path& path, const EmbeddingStore& store) {
    io::write_file_atomic(path, to_vectors_text(store));
}

struct CoverageReport {
    std::size_t covered_words = 0;
    std::size_t total_words = 0;
    std::map<Label, std::size_t> covered_pairs_per_label;
    std::map<Label, std::size_t> total_pairs_per_label;
};

inline CoverageReport coverage(const EmbeddingStore& store, const std::vector<PairDataset>& datasets) {
    CoverageReport r;
    std::unordered_set<std::string> vocab;
    for (const auto& d : datasets)
        for (const auto& p : d.pairs) {
            vocab.insert(p.word1);
            vocab.insert(p.word2);
            r.total_pairs_per_label[p.label]++;
            auto& covered = r.covered_pairs_per_label[p.label];
            if (store.contains(p.word1) && store.contains(p.word2)) ++covered;
        }
    r.total_words = vocab.size();
    for (const auto& w : vocab)
        if (store.contains(w)) ++r.covered_words;
    return r;
}

inline std::string coverage_to_tsv(const CoverageReport& r, std::string_view model) {
    std::string out = "model\tmetric\tcovered\ttotal\n";
    out += std::string(model) + "\twords\t" + std::to_string(r.covered_words) + "\t" +
           std::to_string(r.total_words) + "\n";
    for (const auto& [label, total] : r.total_pairs_per_label) {
        auto it = r.covered_pairs_per_label.find(label);
        std::size_t c = it == r.covered_pairs_per_label.end() ? 0 : it->second;
        out += std::string(model) + "\tpairs_" + std::string(to_string(label)) + "\t" + std::to_string(c) +
               "\t" + std::to_string(total) + "\n";
    }
    return out;
}

/// Keeps exactly the pairs whose two words both have vectors.
inline PairDataset filter_pairs(const PairDataset& data, const EmbeddingStore& store) {
    PairDataset out{data.name, {}};
    for (const auto& p : data.pairs)
        if (store.contains(p.word1) && store.contains(p.word2)) out.pairs.push_back(p);
    return out;
}

/// Sub-store restricted to `words` (absent words are ignored), preserving the
/// order of `words`.
inline EmbeddingStore restrict_store(const EmbeddingStore& store, const std::vector<std::string>& words) {
    EmbeddingStore out(store.dim(), store.source());
    for (const auto& w : words) {
        auto v = store.find(w);
        if (!v.empty()) out.add(w, v);
    }
    return out;
}

}  // namespace swirl
