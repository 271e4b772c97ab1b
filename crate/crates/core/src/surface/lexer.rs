use std::sync::Arc;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Zero,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Backslash,
    Colon,
    Dot,
    Comma,
    Semi,
    LongArrow,
    Bar,
    Equals,
    LAngle,
    RAngle,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LongArrow => "`-->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Equals => "`=`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str, file: Option<&Arc<str>>) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        file: file.cloned(),
        line,
        col_start: start - line_start + 1,
        col_end: end - line_start + 1,
        start,
        end,
    };
    while i < chars.len() {
        let (off, c) = chars[i];
        if c == '\n' {
            line += 1;
            line_start = off + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let rest = &src[off..];
        if rest.starts_with("-->") {
            out.push(Token {
                tok: Tok::LongArrow,
                span: span(off, off + 3, line, line_start),
            });
            i += 3;
            continue;
        }
        if rest.starts_with("--") {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if is_ident_start(c) {
            let start = off;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map_or(src.len(), |&(o, _)| o);
            out.push(Token {
                tok: Tok::Ident(src[start..end].to_string()),
                span: span(start, end, line, line_start),
            });
            i = j;
            continue;
        }
        let tok = match c {
            '0' => Tok::Zero,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '\\' => Tok::Backslash,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '|' => Tok::Bar,
            '=' => Tok::Equals,
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            _ => {
                return Err(ParseError::syntax(
                    span(off, off + c.len_utf8(), line, line_start),
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        out.push(Token {
            tok,
            span: span(off, off + c.len_utf8(), line, line_start),
        });
        i += 1;
    }
    let end = src.len();
    out.push(Token {
        tok: Tok::Eof,
        span: span(end, end, line, line_start.min(end)),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s, None).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrow_is_not_a_comment() {
        assert_eq!(
            toks("a --> b -- trailing"),
            vec![Tok::Ident("a".into()), Tok::LongArrow, Tok::Ident("b".into()), Tok::Eof]
        );
    }

    #[test]
    fn spans_track_lines() {
        let t = lex("x\n  yy", None).unwrap();
        assert_eq!((t[1].span.line, t[1].span.col_start, t[1].span.col_end), (2, 3, 5));
    }

    #[test]
    fn rejects_unknown_characters() {
        let e = lex("x $ y", None).unwrap_err();
        assert_eq!(e.span.col_start, 3);
    }
}
