use super::{Marked, Regex, Symbol};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String, Option<u32>),
    LParen,
    RParen,
    Bar,
    Question,
    Plus,
    Star,
    Eps,
    Empty,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '|' => Tok::Bar,
            '?' => Tok::Question,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            'ε' => Tok::Eps,
            '∅' => Tok::Empty,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '_' | '-' | ':' | '.'))
                {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let mut index = None;
                if i < chars.len() && chars[i] == '#' {
                    i += 1;
                    let digits_start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[digits_start..i].iter().collect();
                    match digits.parse::<u32>() {
                        Ok(n) if n >= 1 => index = Some(n),
                        _ => {
                            return Err(Error::Syntax {
                                pos: digits_start,
                                msg: "expected a positive copy index after '#'".into(),
                            })
                        }
                    }
                }
                let tok = match (name.as_str(), index) {
                    ("EPS", None) => Tok::Eps,
                    ("EMPTY", None) => Tok::Empty,
                    _ => Tok::Name(name, index),
                };
                out.push((start, tok));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

trait LeafKind: Sized {
    fn leaf(name: String, index: Option<u32>, pos: usize) -> Result<Self>;
}

impl LeafKind for Symbol {
    fn leaf(name: String, index: Option<u32>, pos: usize) -> Result<Self> {
        match index {
            None => Ok(Symbol::new(&name)),
            Some(_) => Err(Error::Syntax {
                pos,
                msg: "marked symbol in an unmarked expression".into(),
            }),
        }
    }
}

impl LeafKind for Marked {
    fn leaf(name: String, index: Option<u32>, pos: usize) -> Result<Self> {
        match index {
            Some(i) => Ok(Marked::new(Symbol::new(&name), i)),
            None => Err(Error::Syntax {
                pos,
                msg: format!("symbol {name:?} is missing a '#index' mark"),
            }),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr<A: LeafKind>(&mut self) -> Result<Regex<A>> {
        let mut alts = vec![self.concat()?];
        while self.peek() == Some(&Tok::Bar) {
            self.at += 1;
            alts.push(self.concat()?);
        }
        Ok(Regex::disj(alts))
    }

    fn concat<A: LeafKind>(&mut self) -> Result<Regex<A>> {
        let mut parts = Vec::new();
        while let Some(t) = self.peek() {
            if matches!(t, Tok::Bar | Tok::RParen) {
                break;
            }
            parts.push(self.postfix()?);
        }
        if parts.is_empty() {
            return self.err("expected an expression");
        }
        Ok(Regex::concat(parts))
    }

    fn postfix<A: LeafKind>(&mut self) -> Result<Regex<A>> {
        let mut r = self.atom()?;
        loop {
            r = match self.peek() {
                Some(Tok::Question) => r.opt(),
                Some(Tok::Plus) => r.plus(),
                Some(Tok::Star) => r.star(),
                _ => return Ok(r),
            };
            self.at += 1;
        }
    }

    fn atom<A: LeafKind>(&mut self) -> Result<Regex<A>> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.at += 1;
        match tok {
            Tok::Name(name, index) => Ok(Regex::Atom(A::leaf(name, index, pos)?)),
            Tok::Eps => Ok(Regex::Epsilon),
            Tok::Empty => Ok(Regex::Empty),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.at += 1;
                Ok(inner)
            }
            other => Err(Error::Syntax {
                pos,
                msg: format!("unexpected {other:?}"),
            }),
        }
    }
}

fn run<A: LeafKind>(text: &str) -> Result<Regex<A>> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.chars().count(),
    };
    let r = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(r)
}

/// Parse the surface syntax: `|` for disjunction, juxtaposition for
/// concatenation, postfix `?`, `+` and `*`, `ε`/`EPS` and `∅`/`EMPTY`.
pub fn parse(text: &str) -> Result<Regex<Symbol>> {
    run(text)
}

/// Parse an expression whose symbols all carry a copy index, as in `a#1 a#2?`.
pub fn parse_marked(text: &str) -> Result<Regex<Marked>> {
    run(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Regex {
        Regex::atom(s)
    }

    #[test]
    fn parses_concat_of_postfix() {
        assert_eq!(
            parse("a a? b+").unwrap(),
            Regex::Concat(vec![a("a"), a("a").opt(), a("b").plus()])
        );
    }

    #[test]
    fn star_desugars_to_optional_plus() {
        assert_eq!(parse("a*").unwrap(), a("a").plus().opt());
    }

    #[test]
    fn parenthesised_disjunction() {
        assert_eq!(parse("(a|b)").unwrap(), Regex::Disj(vec![a("a"), a("b")]));
    }

    #[test]
    fn parentheses_flatten() {
        assert_eq!(
            parse("(a b) c").unwrap(),
            Regex::Concat(vec![a("a"), a("b"), a("c")])
        );
        assert_eq!(
            parse("a | (b | c)").unwrap(),
            Regex::Disj(vec![a("a"), a("b"), a("c")])
        );
    }

    #[test]
    fn reserved_and_multichar_tokens() {
        assert_eq!(parse("EPS").unwrap(), Regex::Epsilon);
        assert_eq!(parse("ε").unwrap(), Regex::Epsilon);
        assert_eq!(parse("∅ | EMPTY").unwrap(), Regex::Disj(vec![Regex::Empty, Regex::Empty]));
        assert_eq!(
            parse("customer order-line_2+").unwrap(),
            Regex::Concat(vec![a("customer"), a("order-line_2").plus()])
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("a (b").unwrap_err(),
            Error::Syntax {
                pos: 4,
                msg: "expected ')'".into()
            }
        );
        assert!(matches!(parse("a | | b"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("a $"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("a)"), Err(Error::Syntax { pos: 1, .. })));
        assert!(parse("a#1").is_err());
        assert!(parse_marked("a").is_err());
    }
}
