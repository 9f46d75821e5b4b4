//! Boolean relevance queries over post text.
//!
//! Grammar (operators case-insensitive, tokens lowercased):
//!
//! ```text
//! expr  := or
//! or    := and ("OR" and)*
//! and   := unary (("AND" | juxtaposition) unary)*
//! unary := "NOT" unary | atom
//! atom  := "(" expr ")" | quoted phrase | "#"token | token
//! ```
//!
//! Juxtaposed atoms are conjoined. Terms match whole tokens of the tokenized
//! text (the tokenizer contract in [`crate::textmodel`]), phrases match
//! consecutive tokens, and hashtags match only hashtag-flagged tokens.

use thiserror::Error;

use crate::textmodel::{tokenize, TokenSeq};

use super::Post;

/// Abstract syntax of a relevance query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryExpr {
    Term(String),
    Phrase(Vec<String>),
    Hashtag(String),
    And(Box<QueryExpr>, Box<QueryExpr>),
    Or(Box<QueryExpr>, Box<QueryExpr>),
    Not(Box<QueryExpr>),
}

/// A parse failure with the byte offset in the source string.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct QueryParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, QueryParseError> {
    Err(QueryParseError {
        offset,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    And,
    Or,
    Not,
    Phrase(Vec<String>),
    Hashtag(String),
    Word(String),
}

struct Lexed {
    token: Token,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>, QueryParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let offset = i;
        match c {
            '(' => {
                out.push(Lexed { token: Token::LParen, offset });
                i += 1;
            }
            ')' => {
                out.push(Lexed { token: Token::RParen, offset });
                i += 1;
            }
            '"' => {
                let close = src[i + 1..]
                    .find('"')
                    .map(|rel| i + 1 + rel)
                    .ok_or(QueryParseError {
                        offset,
                        message: "unterminated quote".into(),
                    })?;
                let inner = &src[i + 1..close];
                let tokens: Vec<String> =
                    tokenize(inner).tokens().to_vec();
                if tokens.is_empty() {
                    return err(offset, "empty phrase");
                }
                out.push(Lexed { token: Token::Phrase(tokens), offset });
                i = close + 1;
            }
            '#' => {
                let end = word_end(src, i + 1);
                let raw = &src[i + 1..end];
                let tokens = tokenize(raw);
                if tokens.len() != 1 {
                    return err(offset, "empty hashtag");
                }
                out.push(Lexed {
                    token: Token::Hashtag(tokens.tokens()[0].clone()),
                    offset,
                });
                i = end;
            }
            _ => {
                let end = word_end(src, i);
                let raw = &src[i..end];
                let token = match raw.to_ascii_uppercase().as_str() {
                    "AND" => Token::And,
                    "OR" => Token::Or,
                    "NOT" => Token::Not,
                    _ => {
                        let tokens: Vec<String> = tokenize(raw).tokens().to_vec();
                        match tokens.len() {
                            0 => return err(offset, format!("unusable term {raw:?}")),
                            1 => Token::Word(tokens.into_iter().next().unwrap()),
                            // A word with internal punctuation tokenizes to
                            // several tokens and matches as a phrase.
                            _ => Token::Phrase(tokens),
                        }
                    }
                };
                out.push(Lexed { token, offset });
                i = end;
            }
        }
    }

    Ok(out)
}

fn word_end(src: &str, from: usize) -> usize {
    src[from..]
        .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '#'))
        .map(|rel| from + rel)
        .unwrap_or(src.len())
}

struct Parser {
    tokens: Vec<Lexed>,
    pos: usize,
    src_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|l| &l.token)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|l| l.offset)
            .unwrap_or(self.src_len)
    }

    fn advance(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).map(|l| l.token.clone());
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn parse_or(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.parse_and()?;
        while matches!(self.peek(), Some(Token::Or)) {
            self.advance();
            let right = self.parse_and()?;
            left = QueryExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Token::And) => {
                    self.advance();
                    let right = self.parse_unary()?;
                    left = QueryExpr::And(Box::new(left), Box::new(right));
                }
                // Juxtaposition: the next token starts another operand.
                Some(Token::LParen)
                | Some(Token::Not)
                | Some(Token::Phrase(_))
                | Some(Token::Hashtag(_))
                | Some(Token::Word(_)) => {
                    let right = self.parse_unary()?;
                    left = QueryExpr::And(Box::new(left), Box::new(right));
                }
                _ => break,
            }
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<QueryExpr, QueryParseError> {
        if matches!(self.peek(), Some(Token::Not)) {
            let not_offset = self.offset();
            self.advance();
            if self.peek().is_none() || matches!(self.peek(), Some(Token::RParen)) {
                return err(not_offset, "empty operand");
            }
            let inner = self.parse_unary()?;
            return Ok(QueryExpr::Not(Box::new(inner)));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<QueryExpr, QueryParseError> {
        let offset = self.offset();
        match self.advance() {
            Some(Token::LParen) => {
                let inner = self.parse_or()?;
                match self.advance() {
                    Some(Token::RParen) => Ok(inner),
                    _ => err(offset, "unbalanced parenthesis"),
                }
            }
            Some(Token::Phrase(tokens)) => Ok(QueryExpr::Phrase(tokens)),
            Some(Token::Hashtag(tag)) => Ok(QueryExpr::Hashtag(tag)),
            Some(Token::Word(word)) => Ok(QueryExpr::Term(word)),
            Some(Token::RParen) => err(offset, "unbalanced parenthesis"),
            Some(Token::And) | Some(Token::Or) => err(offset, "operator without operand"),
            Some(Token::Not) => unreachable!("NOT handled in parse_unary"),
            None => err(offset, "empty operand"),
        }
    }
}

/// Parses a query string into its AST.
pub fn parse_query(src: &str) -> Result<QueryExpr, QueryParseError> {
    let tokens = lex(src)?;
    if tokens.is_empty() {
        return err(0, "empty expression");
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        src_len: src.len(),
    };
    let expr = parser.parse_or()?;
    if parser.pos < parser.tokens.len() {
        let offset = parser.offset();
        return err(offset, "unbalanced parenthesis");
    }
    Ok(expr)
}

/// Evaluates a query against a tokenized text.
pub fn match_tokens(query: &QueryExpr, doc: &TokenSeq) -> bool {
    match query {
        QueryExpr::Term(term) => doc.tokens().iter().any(|t| t == term),
        QueryExpr::Hashtag(tag) => doc
            .iter()
            .any(|(token, is_hashtag)| is_hashtag && token == tag),
        QueryExpr::Phrase(words) => {
            if words.is_empty() || words.len() > doc.len() {
                return false;
            }
            doc.tokens()
                .windows(words.len())
                .any(|window| window.iter().zip(words).all(|(a, b)| a == b))
        }
        QueryExpr::And(l, r) => match_tokens(l, doc) && match_tokens(r, doc),
        QueryExpr::Or(l, r) => match_tokens(l, doc) || match_tokens(r, doc),
        QueryExpr::Not(e) => !match_tokens(e, doc),
    }
}

/// Evaluates a query against a post's text.
pub fn match_query(query: &QueryExpr, post: &Post) -> bool {
    match_tokens(query, &tokenize(&post.text))
}
