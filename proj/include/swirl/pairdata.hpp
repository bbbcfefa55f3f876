#pragma once

// Antonym/synonym pair datasets: loading, shuffled controls, and
// train/test partitions.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "swirl/error.hpp"
#include "swirl/io.hpp"
#include "swirl/rng.hpp"
#include "swirl/types.hpp"

namespace swirl {

struct WordPair {
    std::string word1;
    std::string word2;
    Pos pos = Pos::adjective;
    Label label = Label::antonym;
    Split split = Split::none;

    bool operator==(const WordPair&) const = default;
};

struct PairDataset {
    std::string name;
    std::vector<WordPair> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
    bool empty() const noexcept { return pairs.empty(); }
    bool operator==(const PairDataset&) const = default;
};

enum class SplitMode : std::uint8_t { stuttgart, lexical };

/// Pair indices refer to the dataset the split was computed from.
struct SplitSpec {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    SplitMode mode = SplitMode::stuttgart;
    std::uint64_t seed = 0;
};

inline std::string_view to_string(SplitMode m) {
    return m == SplitMode::stuttgart ? "stuttgart" : "lexical";
}

inline SplitMode parse_split_mode(std::string_view s) {
    if (s == "stuttgart") return SplitMode::stuttgart;
    if (s == "lexical") return SplitMode::lexical;
    throw ParseError("unknown split mode '" + std::string(s) + "'");
}

namespace detail {

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

inline std::string pair_key(std::string_view a, std::string_view b) {
    std::string k;
    k.reserve(a.size() + b.size() + 1);
    k.append(a).push_back('\t');
    k.append(b);
    return k;
}

inline std::string triple_key(const WordPair& p) {
    std::string k = pair_key(p.word1, p.word2);
    k.push_back('\t');
    k.append(to_string(p.label));
    return k;
}

}  // namespace detail

/// Checks the WordPair and PairDataset invariants; throws DataError.
inline void validate(const PairDataset& data) {
    std::unordered_set<std::string> seen;
    for (const auto& p : data.pairs) {
        if (p.word1.empty() || p.word2.empty() || detail::has_space(p.word1) ||
            detail::has_space(p.word2))
            throw DataError("invalid token in pair (" + p.word1 + ", " + p.word2 + ")");
        if (p.word1 == p.word2) throw DataError("pair with identical words: " + p.word1);
        if (!seen.insert(detail::triple_key(p)).second)
            throw DataError("duplicate pair (" + p.word1 + ", " + p.word2 + ")");
    }
}

/// Concatenates datasets in order, dropping repeated (word1, word2, label) triples.
inline PairDataset merge(const std::vector<PairDataset>& parts, std::string name = "merged") {
    PairDataset out{std::move(name), {}};
    std::unordered_set<std::string> seen;
    for (const auto& d : parts)
        for (const auto& p : d.pairs)
            if (seen.insert(detail::triple_key(p)).second) out.pairs.push_back(p);
    return out;
}

/// Expected file name for one POS/relation/split slice of the dataset
/// directory, e.g. "adjective-antonym.train".
inline std::string stuttgart_filename(Pos pos, Relation relation, Split split) {
    return std::string(to_string(pos)) + "-" + std::string(to_string(relation)) + "." +
           std::string(to_string(split));
}

/// Loads the train, val and test files of one POS/relation. Lines hold two
/// tab-separated words optionally followed by score columns, which are
/// ignored. Blank lines are skipped; the first occurrence of a repeated pair
/// wins.
inline PairDataset load_stuttgart(const std::filesystem::path& dir, Pos pos, Relation relation) {
    PairDataset out{std::string(to_string(pos)) + "-" + std::string(to_string(relation)), {}};
    std::unordered_set<std::string> seen;
    for (Split split : {Split::train, Split::val, Split::test}) {
        const std::string name = stuttgart_filename(pos, relation, split);
        const auto path = dir / name;
        if (!std::filesystem::exists(path))
            throw IoError("missing dataset file '" + name + "' in " + dir.string());
        const std::string text = io::read_file(path);
        io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
            if (line.find_first_not_of(" \t") == std::string_view::npos) return;
            auto fields = io::split(line, '\t');
            if (fields.size() < 2)
                throw ParseError(name + ":" + std::to_string(line_no) +
                                     ": expected two tab-separated words",
                                 line_no);
            std::string w1 = detail::lowercase(fields[0]);
            std::string w2 = detail::lowercase(fields[1]);
            if (w1.empty() || w2.empty() || detail::has_space(w1) || detail::has_space(w2))
                throw ParseError(name + ":" + std::to_string(line_no) + ": malformed token",
                                 line_no);
            if (w1 == w2)
                throw ParseError(name + ":" + std::to_string(line_no) + ": identical words",
                                 line_no);
            WordPair p{std::move(w1), std::move(w2), pos, label_of(relation), split};
            if (seen.insert(detail::triple_key(p)).second) out.pairs.push_back(std::move(p));
        });
    }
    return out;
}

/// Loads every POS for one relation and concatenates them in POS order.
inline PairDataset load_stuttgart_all(const std::filesystem::path& dir, Relation relation) {
    std::vector<PairDataset> parts;
    for (Pos pos : kAllPos) parts.push_back(load_stuttgart(dir, pos, relation));
    return merge(parts, std::string(to_string(relation)));
}

/// Both orientations of every pair in `datasets`, as "w1\tw2" keys.
inline std::unordered_set<std::string> pair_keys(const std::vector<PairDataset>& datasets) {
    std::unordered_set<std::string> keys;
    for (const auto& d : datasets)
        for (const auto& p : d.pairs) {
            keys.insert(detail::pair_key(p.word1, p.word2));
            keys.insert(detail::pair_key(p.word2, p.word1));
        }
    return keys;
}

/// Random control pairs built from the words of `source`.
///
/// Sampling runs per part of speech: within a POS, word1 is drawn from the
/// multiset of first-position words and word2 from the multiset of
/// second-position words. `count` is spread over POS groups in proportion to
/// their size (largest remainder). Candidates are rejected when the two words
/// coincide, when either orientation appears in `exclude`, or when the pair was
/// already generated. An empty `exclude` means "exclude the source pairs".
inline PairDataset make_shuffled(const PairDataset& source, std::uint64_t seed, std::size_t count,
                                 const std::unordered_set<std::string>& exclude = {}) {
    if (count == 0) throw ParameterError("make_shuffled: count must be positive");
    std::unordered_set<std::string> words;
    for (const auto& p : source.pairs) {
        words.insert(p.word1);
        words.insert(p.word2);
    }
    if (words.size() < 2) throw ParameterError("make_shuffled: source needs at least 2 distinct words");

    const auto own_keys = exclude.empty() ? pair_keys({source}) : std::unordered_set<std::string>{};
    const auto& excluded = exclude.empty() ? own_keys : exclude;

    std::map<Pos, std::vector<const WordPair*>> groups;
    for (const auto& p : source.pairs) groups[p.pos].push_back(&p);

    // Largest-remainder allocation of `count` over POS groups.
    std::map<Pos, std::size_t> quota;
    std::vector<std::pair<double, Pos>> remainders;
    std::size_t assigned = 0;
    for (const auto& [pos, members] : groups) {
        double exact = static_cast<double>(count) * static_cast<double>(members.size()) /
                       static_cast<double>(source.size());
        quota[pos] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[pos];
        remainders.emplace_back(exact - std::floor(exact), pos);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < count; ++i, ++assigned) quota[remainders[i % remainders.size()].second]++;

    const Label label = shuffled_of(source.pairs.front().label);
    PairDataset out{"shuffled_" + source.name, {}};
    out.pairs.reserve(count);
    Rng rng(seed);
    std::unordered_set<std::string> generated;
    std::uint64_t attempts_total = 0;

    for (const auto& [pos, members] : groups) {
        const std::size_t want = quota[pos];
        const std::uint64_t budget = 100 * static_cast<std::uint64_t>(want) + 1000;
        std::uint64_t attempts = 0;
        std::size_t made = 0;
        while (made < want) {
            if (attempts >= budget)
                throw GenerationError("make_shuffled: produced " + std::to_string(made) + " of " +
                                          std::to_string(want) + " " +
                                          std::string(to_string(pos)) + " pairs after " +
                                          std::to_string(attempts_total + attempts) + " attempts",
                                      attempts_total + attempts);
            ++attempts;
            const WordPair& a = *members[uniform_index(rng, members.size())];
            const WordPair& b = *members[uniform_index(rng, members.size())];
            if (a.word1 == b.word2) continue;
            std::string key = detail::pair_key(a.word1, b.word2);
            if (excluded.count(key) || generated.count(key)) continue;
            generated.insert(std::move(key));
            out.pairs.push_back(WordPair{a.word1, b.word2, pos, label, Split::none});
            ++made;
        }
        attempts_total += attempts;
    }
    return out;
}

/// Pair-level split from the dataset's own file division. Val pairs join
/// train when `merge_val` is set, otherwise they are left out.
inline SplitSpec stuttgart_split(const PairDataset& data, bool merge_val = true) {
    SplitSpec spec;
    spec.mode = SplitMode::stuttgart;
    for (std::size_t i = 0; i < data.size(); ++i) {
        switch (data.pairs[i].split) {
            case Split::train: spec.train.push_back(i); break;
            case Split::val:
                if (merge_val) spec.train.push_back(i);
                break;
            case Split::test: spec.test.push_back(i); break;
            case Split::none: break;
        }
    }
    if (spec.train.empty() || spec.test.empty())
        throw SplitError("stuttgart split: train or test portion is empty");
    return spec;
}

/// Word-level split in which no word occurs on both sides.
///
/// Words are visited in a seeded random order and each is placed on the side
/// that loses the fewest pairs (a pair whose words land on different sides is
/// discarded) while keeping the projected share of test pairs near
/// `test_fraction`. Ties go to train.
inline SplitSpec lexical_split(const PairDataset& data, double test_fraction, std::uint64_t seed) {
    if (data.empty()) throw SplitError("lexical split: empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ParameterError("lexical split: test_fraction must lie in (0, 1)");

    std::unordered_map<std::string, std::size_t> word_id;
    std::vector<std::string> words;
    auto id_of = [&](const std::string& w) {
        auto [it, inserted] = word_id.try_emplace(w, words.size());
        if (inserted) words.push_back(w);
        return it->second;
    };
    std::vector<std::pair<std::size_t, std::size_t>> ends(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        ends[i] = {id_of(data.pairs[i].word1), id_of(data.pairs[i].word2)};

    std::vector<std::vector<std::size_t>> incident(words.size());
    for (std::size_t i = 0; i < ends.size(); ++i) {
        incident[ends[i].first].push_back(i);
        if (ends[i].second != ends[i].first) incident[ends[i].second].push_back(i);
    }

    // Sorting first makes the visiting order independent of input order.
    std::vector<std::size_t> order(words.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });
    Rng rng(seed);
    shuffle(order.begin(), order.end(), rng);

    enum Side : std::int8_t { unassigned = -1, train_side = 0, test_side = 1 };
    std::vector<std::int8_t> side(words.size(), unassigned);
    // Projected pair counts: pairs with at least one end on a side and no end
    // on the other.
    double proj[2] = {0.0, 0.0};

    for (std::size_t w : order) {
        double cost[2];
        double next_proj[2][2];
        for (int s = 0; s < 2; ++s) {
            double gain_same = 0, gain_other = 0, fresh = 0;
            for (std::size_t pi : incident[w]) {
                std::size_t other = ends[pi].first == w ? ends[pi].second : ends[pi].first;
                if (other == w || side[other] == unassigned) fresh += 1;
                else if (side[other] == s) gain_same += 1;
                else gain_other += 1;
            }
            next_proj[s][s] = proj[s] + fresh;
            next_proj[s][1 - s] = proj[1 - s] - gain_other;
            double total = next_proj[s][0] + next_proj[s][1];
            double imbalance = std::abs(next_proj[s][test_side] - test_fraction * total);
            cost[s] = gain_other + imbalance;
            (void)gain_same;
        }
        int pick = cost[test_side] < cost[train_side] ? test_side : train_side;
        side[w] = static_cast<std::int8_t>(pick);
        proj[0] = next_proj[pick][0];
        proj[1] = next_proj[pick][1];
    }

    SplitSpec spec;
    spec.mode = SplitMode::lexical;
    spec.seed = seed;
    for (std::size_t i = 0; i < ends.size(); ++i) {
        auto a = side[ends[i].first], b = side[ends[i].second];
        if (a != b) continue;
        (a == test_side ? spec.test : spec.train).push_back(i);
    }
    if (spec.train.empty() || spec.test.empty())
        throw SplitError("lexical split: degenerate data, " + std::to_string(spec.train.size()) +
                         " train and " + std::to_string(spec.test.size()) + " test pairs");
    return spec;
}

/// Verifies disjointness (and, for lexical splits, vocabulary disjointness).
inline bool split_is_valid(const PairDataset& data, const SplitSpec& spec) {
    std::unordered_set<std::size_t> train(spec.train.begin(), spec.train.end());
    for (std::size_t i : spec.test)
        if (train.count(i) || i >= data.size()) return false;
    if (spec.mode != SplitMode::lexical) return true;
    std::unordered_set<std::string> train_vocab;
    for (std::size_t i : spec.train) {
        train_vocab.insert(data.pairs[i].word1);
        train_vocab.insert(data.pairs[i].word2);
    }
    for (std::size_t i : spec.test)
        if (train_vocab.count(data.pairs[i].word1) || train_vocab.count(data.pairs[i].word2))
            return false;
    return true;
}

/// Copy of `data` whose split tags follow `spec`; pairs outside both sides get
/// Split::none.
inline PairDataset apply_split(const PairDataset& data, const SplitSpec& spec) {
    PairDataset out = data;
    for (auto& p : out.pairs) p.split = Split::none;
    for (std::size_t i : spec.train) out.pairs.at(i).split = Split::train;
    for (std::size_t i : spec.test) out.pairs.at(i).split = Split::test;
    return out;
}

// TSV interchange: word1, word2, pos, label, split.

inline std::string pairs_to_tsv(const std::vector<PairDataset>& datasets) {
    std::string out = "word1\tword2\tpos\tlabel\tsplit\n";
    for (const auto& d : datasets)
        for (const auto& p : d.pairs) {
            out += p.word1;
            out += '\t';
            out += p.word2;
            out += '\t';
            out += to_string(p.pos);
            out += '\t';
            out += to_string(p.label);
            out += '\t';
            out += to_string(p.split);
            out += '\n';
        }
    return out;
}

inline void write_pairs_tsv(const std::filesystem::path& path, const std::vector<PairDataset>& datasets) {
    io::write_file_atomic(path, pairs_to_tsv(datasets));
}

/// Reads a pairs TSV back into one dataset per label, in label order.
inline std::vector<PairDataset> read_pairs_tsv(const std::filesystem::path& path) {
    const std::string text = io::read_file(path);
    std::map<Label, PairDataset> by_label;
    io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (line_no == 1 || line.empty()) return;
        auto f = io::split(line, '\t');
        if (f.size() != 5)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns",
                             line_no);
        WordPair p{std::string(f[0]), std::string(f[1]), parse_pos(f[2]), parse_label(f[3]),
                   parse_split(f[4])};
        auto& d = by_label[p.label];
        d.name = std::string(to_string(p.label));
        d.pairs.push_back(std::move(p));
    });
    std::vector<PairDataset> out;
    for (auto& [label, d] : by_label) out.push_back(std::move(d));
    return out;
}

}  // namespace swirl
