//! Tokenizer for the model definition language.

use alloc::string::String;
use alloc::vec::Vec;

use super::{Diagnostic, Severity, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Str(String),
    Num(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    /// The identifier text, lowercased, when this token is an identifier.
    pub(super) fn keyword(&self) -> Option<String> {
        match &self.kind {
            TokenKind::Ident(s) => Some(s.to_ascii_lowercase()),
            _ => None,
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Tokenizes a document. Never fails hard: unrecognized characters and
/// unterminated strings become diagnostics and lexing continues.
pub(crate) fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let start = Span { line, col, len: 1 };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | '(' | ')' | ',' | ';' => {
                bump!();
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    _ => TokenKind::Semi,
                };
                tokens.push(Token { kind, span: start });
            }
            '"' => {
                bump!();
                let mut s = String::new();
                let mut terminated = false;
                while let Some(&c) = chars.peek() {
                    if c == '"' {
                        bump!();
                        terminated = true;
                        break;
                    }
                    if c == '\n' {
                        break;
                    }
                    if c == '\\' {
                        bump!();
                        match chars.peek() {
                            Some('"') => {
                                s.push('"');
                                bump!();
                            }
                            Some('\\') => {
                                s.push('\\');
                                bump!();
                            }
                            _ => s.push('\\'),
                        }
                        continue;
                    }
                    s.push(c);
                    bump!();
                }
                let mut span = start;
                span.len = (s.chars().count() + 2) as u32;
                if !terminated {
                    diagnostics.push(Diagnostic {
                        severity: Severity::Error,
                        code: "E001",
                        message: String::from("unterminated string literal"),
                        span,
                    });
                }
                tokens.push(Token {
                    kind: TokenKind::Str(s),
                    span,
                });
            }
            c if c.is_ascii_digit() || c == '-' || c == '.' => {
                let mut text = String::new();
                text.push(c);
                bump!();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' {
                        text.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let mut span = start;
                span.len = text.chars().count() as u32;
                match text.parse::<f64>() {
                    Ok(n) if n.is_finite() => tokens.push(Token {
                        kind: TokenKind::Num(n),
                        span,
                    }),
                    _ => diagnostics.push(Diagnostic {
                        severity: Severity::Error,
                        code: "E001",
                        message: alloc::format!("malformed number '{text}'"),
                        span,
                    }),
                }
            }
            c if is_ident_start(c) => {
                let mut text = String::new();
                text.push(c);
                bump!();
                while let Some(&c) = chars.peek() {
                    if is_ident_continue(c) {
                        text.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let mut span = start;
                span.len = text.chars().count() as u32;
                tokens.push(Token {
                    kind: TokenKind::Ident(text),
                    span,
                });
            }
            other => {
                bump!();
                diagnostics.push(Diagnostic {
                    severity: Severity::Error,
                    code: "E001",
                    message: alloc::format!("unexpected character '{other}'"),
                    span: start,
                });
            }
        }
    }
    (tokens, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_statement_shapes() {
        let (tokens, diags) = tokenize("measure \"Reaction time\" range 0 30.5 invert");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 6);
        assert!(matches!(&tokens[1].kind, TokenKind::Str(s) if s == "Reaction time"));
        assert!(matches!(tokens[4].kind, TokenKind::Num(n) if n == 30.5));
    }

    #[test]
    fn comments_and_negative_numbers() {
        let (tokens, diags) = tokenize("# a comment\nrange -1 1 # trailing\n");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 3);
        assert!(matches!(tokens[1].kind, TokenKind::Num(n) if n == -1.0));
    }

    #[test]
    fn unterminated_string_is_reported_not_fatal() {
        let (_, diags) = tokenize("template \"oops\nskill x");
        assert_eq!(diags[0].code, "E001");
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let (tokens, _) = tokenize("a\n  bc");
        assert_eq!(tokens[1].span, Span { line: 2, col: 3, len: 2 });
    }
}
