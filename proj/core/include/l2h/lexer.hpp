// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l2h/diagnostics.hpp"

namespace l2h {

enum class TokenKind {
    // Literals and identifiers.
    Ident,
    IntLit,
    RealLit,
    // Keywords.
    KwType,
    KwEnum,
    KwNode,
    KwFunction,
    KwReturns,
    KwVar,
    KwLet,
    KwTel,
    KwClock,
    KwAutomaton,
    KwState,
    KwUnless,
    KwUntil,
    KwRestart,
    KwResume,
    KwWhen,
    KwMerge,
    KwEvery,
    KwPre,
    KwIf,
    KwThen,
    KwElse,
    KwAnd,
    KwOr,
    KwXor,
    KwNot,
    KwTrue,
    KwFalse,
    KwBool,
    KwInt,
    KwReal,
    // Punctuation and operators.
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    Equal,
    NotEqual,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,     // ->
    AmpAmp,    // && (alias of and)
    BarBar,    // || (alias of or)
    EndOfFile,
};

const char* token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;  // lexeme as written
    SourceLoc loc;
};

/// Splits UTF-8 source text into tokens. Comments run from "--" to the end
/// of the line. On an illegal character a diagnostic with the exact position
/// is reported and std::nullopt returned.
std::optional<std::vector<Token>> tokenize(std::string_view text, Diagnostics& diags);

}  // namespace l2h
