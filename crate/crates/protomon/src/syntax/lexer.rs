//! Tokenizer for specification sources.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Identifier starting with a lowercase letter (event types, variables,
    /// record keys).
    LowerIdent(String),
    /// Identifier starting with an uppercase letter (equation names).
    UpperIdent(String),
    /// Single-quoted string literal, quotes stripped.
    Str(String),
    Number(serde_json::Number),
    Matches,
    Let,
    Underscore,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semicolon,
    Comma,
    Equals,
    Star,
    Or,      // \/
    And,     // /\
    Shuffle, // |
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::LowerIdent(s) | TokenKind::UpperIdent(s) => write!(f, "'{s}'"),
            TokenKind::Str(s) => write!(f, "'{s}'"),
            TokenKind::Number(n) => write!(f, "{n}"),
            TokenKind::Matches => write!(f, "'matches'"),
            TokenKind::Let => write!(f, "'let'"),
            TokenKind::Underscore => write!(f, "'_'"),
            TokenKind::LBrace => write!(f, "'{{'"),
            TokenKind::RBrace => write!(f, "'}}'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::Colon => write!(f, "':'"),
            TokenKind::Semicolon => write!(f, "';'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Equals => write!(f, "'='"),
            TokenKind::Star => write!(f, "'*'"),
            TokenKind::Or => write!(f, "'\\/'"),
            TokenKind::And => write!(f, "'/\\'"),
            TokenKind::Shuffle => write!(f, "'|'"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message} at line {line}, column {column}")]
pub struct LexError {
    pub message: String,
    pub line: u32,
    pub column: u32,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str) -> Self {
        Lexer {
            chars: source.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn error(&self, message: impl Into<String>) -> LexError {
        LexError {
            message: message.into(),
            line: self.line,
            column: self.column,
        }
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    // Lookahead without consuming: '/' begins a comment only
                    // when followed by another '/'; otherwise it belongs to
                    // the /\ operator and the caller handles it.
                    let mut probe = self.chars.clone();
                    probe.next();
                    if probe.peek() == Some(&'/') {
                        while let Some(c) = self.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    } else {
                        return Ok(());
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn lex_string(&mut self) -> Result<TokenKind, LexError> {
        let (line, column) = (self.line, self.column);
        self.bump(); // opening quote
        let mut text = String::new();
        loop {
            match self.bump() {
                Some('\'') => return Ok(TokenKind::Str(text)),
                Some('\n') | None => {
                    return Err(LexError {
                        message: "unterminated string literal".to_string(),
                        line,
                        column,
                    })
                }
                Some(c) => text.push(c),
            }
        }
    }

    fn lex_number(&mut self) -> Result<TokenKind, LexError> {
        let mut text = String::new();
        if self.peek() == Some('-') {
            text.push(self.bump().unwrap());
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '.' {
                text.push(self.bump().unwrap());
            } else {
                break;
            }
        }
        text.parse::<serde_json::Number>()
            .map(TokenKind::Number)
            .map_err(|_| self.error(format!("malformed number '{text}'")))
    }

    fn lex_ident(&mut self) -> TokenKind {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                text.push(self.bump().unwrap());
            } else {
                break;
            }
        }
        match text.as_str() {
            "matches" => TokenKind::Matches,
            "let" => TokenKind::Let,
            "_" => TokenKind::Underscore,
            _ if text.starts_with(|c: char| c.is_ascii_uppercase()) => TokenKind::UpperIdent(text),
            _ => TokenKind::LowerIdent(text),
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia()?;
        let (line, column) = (self.line, self.column);
        let kind = match self.peek() {
            None => TokenKind::Eof,
            Some('\'') => self.lex_string()?,
            Some(c) if c.is_ascii_digit() => self.lex_number()?,
            Some('-') => self.lex_number()?,
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.lex_ident(),
            Some('{') => {
                self.bump();
                TokenKind::LBrace
            }
            Some('}') => {
                self.bump();
                TokenKind::RBrace
            }
            Some('(') => {
                self.bump();
                TokenKind::LParen
            }
            Some(')') => {
                self.bump();
                TokenKind::RParen
            }
            Some(':') => {
                self.bump();
                TokenKind::Colon
            }
            Some(';') => {
                self.bump();
                TokenKind::Semicolon
            }
            Some(',') => {
                self.bump();
                TokenKind::Comma
            }
            Some('=') => {
                self.bump();
                TokenKind::Equals
            }
            Some('*') => {
                self.bump();
                TokenKind::Star
            }
            Some('|') => {
                self.bump();
                TokenKind::Shuffle
            }
            Some('\\') => {
                self.bump();
                match self.peek() {
                    Some('/') => {
                        self.bump();
                        TokenKind::Or
                    }
                    _ => return Err(self.error("expected '/' after '\\'")),
                }
            }
            Some('/') => {
                self.bump();
                match self.peek() {
                    Some('\\') => {
                        self.bump();
                        TokenKind::And
                    }
                    _ => return Err(self.error("expected '\\' after '/'")),
                }
            }
            Some(c) => return Err(self.error(format!("unexpected character '{c}'"))),
        };
        Ok(Token { kind, line, column })
    }
}

/// Tokenizes a whole source; the final token is always [`TokenKind::Eof`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer::new(source);
    let mut tokens = Vec::new();
    loop {
        let token = lexer.next_token()?;
        let done = token.kind == TokenKind::Eof;
        tokens.push(token);
        if done {
            return Ok(tokens);
        }
    }
}
