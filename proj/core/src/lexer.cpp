// SPDX-License-Identifier: Apache-2.0
#include "l2h/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace l2h {

namespace {

const std::unordered_map<std::string_view, TokenKind>& keyword_table() {
    static const std::unordered_map<std::string_view, TokenKind> table = {
        {"type", TokenKind::KwType},
        {"enum", TokenKind::KwEnum},
        {"node", TokenKind::KwNode},
        {"function", TokenKind::KwFunction},
        {"returns", TokenKind::KwReturns},
        {"var", TokenKind::KwVar},
        {"let", TokenKind::KwLet},
        {"tel", TokenKind::KwTel},
        {"clock", TokenKind::KwClock},
        {"automaton", TokenKind::KwAutomaton},
        {"state", TokenKind::KwState},
        {"unless", TokenKind::KwUnless},
        {"until", TokenKind::KwUntil},
        {"restart", TokenKind::KwRestart},
        {"resume", TokenKind::KwResume},
        {"when", TokenKind::KwWhen},
        {"merge", TokenKind::KwMerge},
        {"every", TokenKind::KwEvery},
        {"pre", TokenKind::KwPre},
        {"if", TokenKind::KwIf},
        {"then", TokenKind::KwThen},
        {"else", TokenKind::KwElse},
        {"and", TokenKind::KwAnd},
        {"or", TokenKind::KwOr},
        {"xor", TokenKind::KwXor},
        {"not", TokenKind::KwNot},
        {"true", TokenKind::KwTrue},
        {"false", TokenKind::KwFalse},
        {"bool", TokenKind::KwBool},
        {"int", TokenKind::KwInt},
        {"real", TokenKind::KwReal},
    };
    return table;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::IntLit: return "integer literal";
        case TokenKind::RealLit: return "real literal";
        case TokenKind::KwType: return "'type'";
        case TokenKind::KwEnum: return "'enum'";
        case TokenKind::KwNode: return "'node'";
        case TokenKind::KwFunction: return "'function'";
        case TokenKind::KwReturns: return "'returns'";
        case TokenKind::KwVar: return "'var'";
        case TokenKind::KwLet: return "'let'";
        case TokenKind::KwTel: return "'tel'";
        case TokenKind::KwClock: return "'clock'";
        case TokenKind::KwAutomaton: return "'automaton'";
        case TokenKind::KwState: return "'state'";
        case TokenKind::KwUnless: return "'unless'";
        case TokenKind::KwUntil: return "'until'";
        case TokenKind::KwRestart: return "'restart'";
        case TokenKind::KwResume: return "'resume'";
        case TokenKind::KwWhen: return "'when'";
        case TokenKind::KwMerge: return "'merge'";
        case TokenKind::KwEvery: return "'every'";
        case TokenKind::KwPre: return "'pre'";
        case TokenKind::KwIf: return "'if'";
        case TokenKind::KwThen: return "'then'";
        case TokenKind::KwElse: return "'else'";
        case TokenKind::KwAnd: return "'and'";
        case TokenKind::KwOr: return "'or'";
        case TokenKind::KwXor: return "'xor'";
        case TokenKind::KwNot: return "'not'";
        case TokenKind::KwTrue: return "'true'";
        case TokenKind::KwFalse: return "'false'";
        case TokenKind::KwBool: return "'bool'";
        case TokenKind::KwInt: return "'int'";
        case TokenKind::KwReal: return "'real'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::Comma: return "','";
        case TokenKind::Semicolon: return "';'";
        case TokenKind::Colon: return "':'";
        case TokenKind::Equal: return "'='";
        case TokenKind::NotEqual: return "'<>'";
        case TokenKind::Less: return "'<'";
        case TokenKind::LessEq: return "'<='";
        case TokenKind::Greater: return "'>'";
        case TokenKind::GreaterEq: return "'>='";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Arrow: return "'->'";
        case TokenKind::AmpAmp: return "'&&'";
        case TokenKind::BarBar: return "'||'";
        case TokenKind::EndOfFile: return "end of file";
    }
    return "token";
}

std::optional<std::vector<Token>> tokenize(std::string_view text, Diagnostics& diags) {
    std::vector<Token> tokens;
    int line = 1;
    int column = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count; ++k) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
            ++i;
        }
    };
    auto push = [&](TokenKind kind, std::size_t len, SourceLoc loc) {
        tokens.push_back({kind, std::string(text.substr(i, len)), loc});
        advance(len);
    };

    while (i < n) {
        const char c = text[i];
        const SourceLoc loc{line, column};
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < n && text[i + 1] == '-') {
            while (i < n && text[i] != '\n') advance(1);
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t len = 1;
            while (i + len < n && is_ident_char(text[i + len])) ++len;
            const auto word = text.substr(i, len);
            auto it = keyword_table().find(word);
            push(it != keyword_table().end() ? it->second : TokenKind::Ident, len, loc);
            continue;
        }
        if (is_digit(c)) {
            std::size_t len = 1;
            while (i + len < n && is_digit(text[i + len])) ++len;
            bool real = false;
            if (i + len < n && text[i + len] == '.' && i + len + 1 < n && is_digit(text[i + len + 1])) {
                real = true;
                ++len;
                while (i + len < n && is_digit(text[i + len])) ++len;
            }
            if (i + len < n && (text[i + len] == 'e' || text[i + len] == 'E')) {
                std::size_t j = len + 1;
                if (j < n && (text[i + j] == '+' || text[i + j] == '-')) ++j;
                if (j < n && is_digit(text[i + j])) {
                    real = true;
                    while (j < n && is_digit(text[i + j])) ++j;
                    len = j;
                }
            }
            push(real ? TokenKind::RealLit : TokenKind::IntLit, len, loc);
            continue;
        }
        switch (c) {
            case '(': push(TokenKind::LParen, 1, loc); continue;
            case ')': push(TokenKind::RParen, 1, loc); continue;
            case '{': push(TokenKind::LBrace, 1, loc); continue;
            case '}': push(TokenKind::RBrace, 1, loc); continue;
            case ',': push(TokenKind::Comma, 1, loc); continue;
            case ';': push(TokenKind::Semicolon, 1, loc); continue;
            case ':': push(TokenKind::Colon, 1, loc); continue;
            case '=': push(TokenKind::Equal, 1, loc); continue;
            case '+': push(TokenKind::Plus, 1, loc); continue;
            case '*': push(TokenKind::Star, 1, loc); continue;
            case '/': push(TokenKind::Slash, 1, loc); continue;
            case '-':
                if (i + 1 < n && text[i + 1] == '>') {
                    push(TokenKind::Arrow, 2, loc);
                } else {
                    push(TokenKind::Minus, 1, loc);
                }
                continue;
            case '<':
                if (i + 1 < n && text[i + 1] == '>') {
                    push(TokenKind::NotEqual, 2, loc);
                } else if (i + 1 < n && text[i + 1] == '=') {
                    push(TokenKind::LessEq, 2, loc);
                } else {
                    push(TokenKind::Less, 1, loc);
                }
                continue;
            case '>':
                if (i + 1 < n && text[i + 1] == '=') {
                    push(TokenKind::GreaterEq, 2, loc);
                } else {
                    push(TokenKind::Greater, 1, loc);
                }
                continue;
            case '&':
                if (i + 1 < n && text[i + 1] == '&') {
                    push(TokenKind::AmpAmp, 2, loc);
                    continue;
                }
                break;
            case '|':
                if (i + 1 < n && text[i + 1] == '|') {
                    push(TokenKind::BarBar, 2, loc);
                    continue;
                }
                break;
            default:
                break;
        }
        diags.error(DiagCode::Lex, loc, std::string("illegal character '") + c + "'");
        return std::nullopt;
    }
    tokens.push_back({TokenKind::EndOfFile, "", {line, column}});
    return tokens;
}

}  // namespace l2h
