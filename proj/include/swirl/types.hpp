#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "swirl/error.hpp"

namespace swirl {

/// Row-major dense matrix; one observation per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class Pos : std::uint8_t { adjective, noun, verb };
enum class Label : std::uint8_t { antonym, synonym, shuffled_antonym, shuffled_synonym };
enum class Relation : std::uint8_t { antonym, synonym };
enum class Split : std::uint8_t { train, val, test, none };

inline constexpr std::array<Pos, 3> kAllPos{Pos::adjective, Pos::noun, Pos::verb};
inline constexpr std::array<Label, 4> kAllLabels{Label::antonym, Label::synonym,
                                                 Label::shuffled_antonym,
                                                 Label::shuffled_synonym};

inline std::string_view to_string(Pos p) {
    switch (p) {
        case Pos::adjective: return "adjective";
        case Pos::noun: return "noun";
        case Pos::verb: return "verb";
    }
    return "?";
}

inline std::string_view to_string(Label l) {
    switch (l) {
        case Label::antonym: return "antonym";
        case Label::synonym: return "synonym";
        case Label::shuffled_antonym: return "shuffled_antonym";
        case Label::shuffled_synonym: return "shuffled_synonym";
    }
    return "?";
}

inline std::string_view to_string(Relation r) {
    return r == Relation::antonym ? "antonym" : "synonym";
}

inline std::string_view to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
        case Split::none: return "none";
    }
    return "?";
}

inline Pos parse_pos(std::string_view s) {
    for (Pos p : kAllPos)
        if (to_string(p) == s) return p;
    throw ParseError("unknown part of speech '" + std::string(s) + "'");
}

inline Label parse_label(std::string_view s) {
    for (Label l : kAllLabels)
        if (to_string(l) == s) return l;
    throw ParseError("unknown label '" + std::string(s) + "'");
}

inline Split parse_split(std::string_view s) {
    for (Split x : {Split::train, Split::val, Split::test, Split::none})
        if (to_string(x) == s) return x;
    throw ParseError("unknown split tag '" + std::string(s) + "'");
}

inline Label label_of(Relation r) {
    return r == Relation::antonym ? Label::antonym : Label::synonym;
}

inline Label shuffled_of(Label l) {
    switch (l) {
        case Label::antonym: return Label::shuffled_antonym;
        case Label::synonym: return Label::shuffled_synonym;
        default: return l;
    }
}

inline bool is_shuffled(Label l) {
    return l == Label::shuffled_antonym || l == Label::shuffled_synonym;
}

}  // namespace swirl
