use super::{Formula, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Arrow,
    DArrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, n: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::DArrow, 3, &mut i, &mut col)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(s),
                    line: l0,
                    col: c0,
                });
            }
            other => {
                return Err(SyntaxError::Parse {
                    line,
                    col,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        Err(SyntaxError::Parse {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn variable(&mut self) -> Result<usize, SyntaxError> {
        let (line, col) = self.here();
        match self.bump() {
            Tok::Ident(s) => match var_index(&s) {
                Some(0) => Err(SyntaxError::ZeroVariable { line, col }),
                Some(n) => Ok(n),
                None => Err(SyntaxError::Parse {
                    line,
                    col,
                    msg: format!("expected a variable, found {s}"),
                }),
            },
            t => Err(SyntaxError::Parse {
                line,
                col,
                msg: format!("expected a variable, found {}", describe(&t)),
            }),
        }
    }

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.imp()?;
        if *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::or_all(parts))
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and_all(parts))
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(s) if s == "forall" || s == "exists" => {
                self.bump();
                let v = self.variable()?;
                let body = self.iff()?;
                Ok(if s == "forall" {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::bottom())
            }
            Tok::Ident(name) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    if *self.peek() != Tok::RParen {
                        args.push(self.variable()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.variable()?);
                        }
                    }
                    self.expect(Tok::RParen, "')' or ','")?;
                }
                Ok(Formula::atom(name, args))
            }
            t => self.err(format!("expected a formula, found {}", describe(&t))),
        }
    }
}

/// `x7` is 7; `u` and `v` are read as `x1` and `x2`.
fn var_index(s: &str) -> Option<usize> {
    match s {
        "u" => Some(1),
        "v" => Some(2),
        _ => {
            let digits = s.strip_prefix('x')?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            digits.parse().ok()
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Not => "'!'".into(),
        Tok::And => "'&'".into(),
        Tok::Or => "'|'".into(),
        Tok::Arrow => "'->'".into(),
        Tok::DArrow => "'<->'".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses one formula. `#` starts a comment running to the end of the line.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    f.check_arities()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::super::{render, Formula};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_forms() {
        assert_eq!(
            parse("forall x1 r(x1,x1)").unwrap(),
            Formula::forall(1, Formula::atom("r", vec![1, 1]))
        );
        assert_eq!(parse("p").unwrap(), Formula::atom("p", vec![]));
        assert!(parse("forall x1 exists x1 p(x1)").is_ok());
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            parse("a -> (b -> c)").unwrap()
        );
        assert_eq!(
            parse("a | b & c").unwrap(),
            Formula::Or(vec![
                Formula::atom("a", vec![]),
                Formula::And(vec![Formula::atom("b", vec![]), Formula::atom("c", vec![])])
            ])
        );
        assert_eq!(
            parse("# header\np(x1) # trailing").unwrap(),
            Formula::atom("p", vec![1])
        );
        assert_eq!(parse("r(u,v)").unwrap(), Formula::atom("r", vec![1, 2]));
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse("p(x0)"),
            Err(SyntaxError::ZeroVariable { line: 1, col: 3 })
        );
        assert!(matches!(
            parse("p(x1) & p(x1,x2)"),
            Err(SyntaxError::ArityMismatch { .. })
        ));
        match parse("p(x1) &\n  & q") {
            Err(SyntaxError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse("p(x1").is_err());
        assert!(parse("forall p").is_err());
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![(0usize..3, prop::collection::vec(1usize..4, 0..3))
            .prop_map(|(n, args)| { Formula::atom(format!("p{n}_{}", args.len()), args) }),];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (1usize..4, inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
                (1usize..4, inner).prop_map(|(v, f)| Formula::exists(v, f)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_roundtrip(f in arb_formula()) {
            let text = render(&f);
            prop_assert_eq!(parse(&text).unwrap(), f.clone());
            prop_assert_eq!(render(&parse(&text).unwrap()), text);
        }
    }
}
