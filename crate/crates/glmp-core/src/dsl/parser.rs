//! Recursive-descent parser producing a raw (unresolved) model.

use alloc::string::String;
use alloc::vec::Vec;

use super::codes;
use super::lexer::{Token, TokenKind};
use super::{Diagnostic, Span};
use crate::model::{Level, Source};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub(crate) struct RawVariable {
    pub name: Spanned<String>,
    pub labels: Vec<Spanned<String>>,
    pub partition: Option<Vec<(f64, f64, f64)>>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawMeasure {
    pub name: Spanned<String>,
    pub variable: Option<Spanned<String>>,
    pub unit: String,
    pub lo: f64,
    pub hi: f64,
    pub invert: bool,
    pub source: Source,
    pub template: Option<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawRule {
    pub antecedents: Vec<(Spanned<String>, Spanned<String>)>,
    pub consequent: Spanned<String>,
}

#[derive(Debug, Clone)]
pub(crate) enum RawAggregation {
    Rules(Vec<RawRule>),
    Weights(Spanned<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub(crate) struct RawMapping {
    pub level: Level,
    pub name: Spanned<String>,
    pub variable: Option<Spanned<String>>,
    pub inputs: Vec<Spanned<String>>,
    pub aggregation: RawAggregation,
    pub template: Option<String>,
}

#[derive(Debug, Clone)]
pub(crate) enum RawStatement {
    Measure(RawMeasure),
    Mapping(RawMapping),
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawModel {
    pub variables: Vec<RawVariable>,
    pub statements: Vec<RawStatement>,
}

const STATEMENT_KEYWORDS: &[&str] = &["variable", "measure", "attribute", "dimension", "skill"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

/// A recoverable parse failure; the driver skips to the next statement.
struct Bail;

type PResult<T> = Result<T, Bail>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> Span {
        self.peek()
            .map(|t| t.span)
            .or_else(|| self.tokens.last().map(|t| t.span))
            .unwrap_or_default()
    }

    fn error(&mut self, message: String) -> Bail {
        let span = self.here();
        self.diagnostics
            .push(Diagnostic::error(codes::SYNTAX, span, message));
        Bail
    }

    /// Consumes the next token when it is the given keyword.
    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek().and_then(Token::keyword).as_deref() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(alloc::format!("expected '{kw}'")))
        }
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &str) -> PResult<Span> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.next().unwrap().span),
            _ => Err(self.error(alloc::format!("expected {what}"))),
        }
    }

    /// A name: a bare identifier or a quoted string (spaces allowed).
    fn name(&mut self, what: &str) -> PResult<Spanned<String>> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Ident(s)) => {
                let span = self.next().unwrap().span;
                if STATEMENT_KEYWORDS.contains(&s.to_ascii_lowercase().as_str()) {
                    self.pos -= 1;
                    return Err(self.error(alloc::format!("expected {what}")));
                }
                Ok(Spanned { value: s, span })
            }
            Some(TokenKind::Str(s)) => {
                let span = self.next().unwrap().span;
                Ok(Spanned { value: s, span })
            }
            _ => Err(self.error(alloc::format!("expected {what}"))),
        }
    }

    fn number(&mut self, what: &str) -> PResult<(f64, Span)> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Num(n)) => {
                let span = self.next().unwrap().span;
                Ok((n, span))
            }
            _ => Err(self.error(alloc::format!("expected {what}"))),
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Str(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(alloc::format!("expected {what}"))),
        }
    }

    fn at_statement_start(&self) -> bool {
        self.peek()
            .and_then(Token::keyword)
            .map(|k| STATEMENT_KEYWORDS.contains(&k.as_str()))
            .unwrap_or(false)
    }

    fn skip_to_next_statement(&mut self) {
        while self.peek().is_some() && !self.at_statement_start() {
            self.pos += 1;
        }
    }

    fn template_clause(&mut self) -> PResult<Option<String>> {
        if self.eat_keyword("template") {
            Ok(Some(self.string("template string")?))
        } else {
            Ok(None)
        }
    }

    fn variable_statement(&mut self) -> PResult<RawVariable> {
        let name = self.name("variable name")?;
        self.expect_keyword("labels")?;
        let mut labels = Vec::new();
        while let Some(t) = self.peek() {
            match &t.kind {
                TokenKind::Ident(_) | TokenKind::Str(_) => {
                    if self.at_statement_start()
                        || t.keyword().as_deref() == Some("partition")
                    {
                        break;
                    }
                    labels.push(self.name("label")?);
                }
                _ => break,
            }
        }
        if labels.len() < 2 {
            return Err(self.error(String::from("a variable needs at least two labels")));
        }
        let partition = if self.eat_keyword("partition") {
            let mut triples = Vec::new();
            while self.peek().map(|t| t.kind == TokenKind::LParen) == Some(true) {
                self.expect_kind(TokenKind::LParen, "'('")?;
                let (a, _) = self.number("partition parameter")?;
                self.expect_kind(TokenKind::Comma, "','")?;
                let (b, _) = self.number("partition parameter")?;
                self.expect_kind(TokenKind::Comma, "','")?;
                let (c, _) = self.number("partition parameter")?;
                self.expect_kind(TokenKind::RParen, "')'")?;
                triples.push((a, b, c));
            }
            Some(triples)
        } else {
            None
        };
        Ok(RawVariable {
            name,
            labels,
            partition,
        })
    }

    fn measure_statement(&mut self) -> PResult<RawMeasure> {
        let name = self.name("measure name")?;
        let variable = if self.eat_keyword("of") {
            Some(self.name("variable name")?)
        } else {
            None
        };
        self.expect_keyword("unit")?;
        let unit = self.string("unit string")?;
        self.expect_keyword("range")?;
        let (lo, _) = self.number("range lower bound")?;
        let (hi, _) = self.number("range upper bound")?;
        let invert = self.eat_keyword("invert");
        self.expect_keyword("source")?;
        let source = match self.peek().and_then(Token::keyword).as_deref() {
            Some("text") => Source::Text,
            Some("audio") => Source::Audio,
            Some("video") => Source::Video,
            _ => return Err(self.error(String::from("expected source: text, audio or video"))),
        };
        self.pos += 1;
        let template = self.template_clause()?;
        Ok(RawMeasure {
            name,
            variable,
            unit,
            lo,
            hi,
            invert,
            source,
            template,
        })
    }

    fn rule(&mut self) -> PResult<RawRule> {
        self.expect_keyword("if")?;
        let mut antecedents = Vec::new();
        loop {
            let input = self.name("input name")?;
            self.expect_keyword("is")?;
            let label = self.name("label name")?;
            antecedents.push((input, label));
            if !self.eat_keyword("and") {
                break;
            }
        }
        self.expect_keyword("then")?;
        let consequent = self.name("consequent label")?;
        self.expect_kind(TokenKind::Semi, "';'")?;
        Ok(RawRule {
            antecedents,
            consequent,
        })
    }

    fn mapping_statement(&mut self, level: Level) -> PResult<RawMapping> {
        let name = self.name("component name")?;
        let variable = if self.eat_keyword("of") {
            Some(self.name("variable name")?)
        } else {
            None
        };
        self.expect_keyword("from")?;
        let mut inputs = alloc::vec![self.name("input name")?];
        while self.peek().map(|t| t.kind == TokenKind::Comma) == Some(true) {
            self.pos += 1;
            inputs.push(self.name("input name")?);
        }
        self.expect_keyword("using")?;
        let aggregation = if self.eat_keyword("rules") {
            self.expect_kind(TokenKind::LBrace, "'{'")?;
            let mut rules = Vec::new();
            while self.peek().map(|t| t.kind != TokenKind::RBrace) == Some(true) {
                rules.push(self.rule()?);
            }
            self.expect_kind(TokenKind::RBrace, "'}'")?;
            RawAggregation::Rules(rules)
        } else if self.eat_keyword("weights") {
            let open = self.expect_kind(TokenKind::LParen, "'('")?;
            let mut weights = alloc::vec![self.number("weight")?.0];
            while self.peek().map(|t| t.kind == TokenKind::Comma) == Some(true) {
                self.pos += 1;
                weights.push(self.number("weight")?.0);
            }
            self.expect_kind(TokenKind::RParen, "')'")?;
            RawAggregation::Weights(Spanned {
                value: weights,
                span: open,
            })
        } else {
            return Err(self.error(String::from("expected 'rules' or 'weights'")));
        };
        let template = self.template_clause()?;
        Ok(RawMapping {
            level,
            name,
            variable,
            inputs,
            aggregation,
            template,
        })
    }
}

/// Parses a token stream into a raw model, recovering at statement
/// boundaries so all syntax errors in a document are reported.
pub(crate) fn parse(tokens: Vec<Token>) -> (RawModel, Vec<Diagnostic>) {
    let mut p = Parser {
        tokens,
        pos: 0,
        diagnostics: Vec::new(),
    };
    let mut model = RawModel::default();

    while let Some(token) = p.peek() {
        let result = match token.keyword().as_deref() {
            Some("variable") => {
                p.pos += 1;
                p.variable_statement().map(|v| model.variables.push(v))
            }
            Some("measure") => {
                p.pos += 1;
                p.measure_statement()
                    .map(|m| model.statements.push(RawStatement::Measure(m)))
            }
            Some(kw @ ("attribute" | "dimension" | "skill")) => {
                let level = match kw {
                    "attribute" => Level::Attribute,
                    "dimension" => Level::Dimension,
                    _ => Level::Skill,
                };
                p.pos += 1;
                p.mapping_statement(level)
                    .map(|m| model.statements.push(RawStatement::Mapping(m)))
            }
            _ => Err(p.error(String::from(
                "expected a statement: variable, measure, attribute, dimension or skill",
            ))),
        };
        if result.is_err() {
            // the leading keyword was already consumed, so this always
            // makes progress
            p.skip_to_next_statement();
        }
    }
    (model, p.diagnostics)
}
