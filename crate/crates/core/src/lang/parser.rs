// Recursive descent over a small token stream. Offsets are 1-based character
// positions into the source.

use super::{is_variable_name, Atom, Domain, Formula, LangError, Literal, Question, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    LParen,
    RParen,
    Comma,
    Query,
    Colon,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Query => "`?`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn tokenize(src: &str) -> Result<(Vec<Spanned>, usize), LangError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let offset = i + 1;
        let single = match c {
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '?' => Some(Tok::Query),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, offset });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Spanned {
                    tok: Tok::Arrow,
                    offset,
                });
                i += 2;
            } else {
                return Err(LangError::syntax(offset, "expected `->`"));
            }
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_')
            {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                offset,
            });
        } else {
            return Err(LangError::syntax(
                offset,
                format!("unexpected character {c:?}"),
            ));
        }
    }
    Ok((out, chars.len() + 1))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, LangError> {
        let (toks, end) = tokenize(src)?;
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |s| s.offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> LangError {
        match self.peek() {
            Some(t) => LangError::syntax(
                self.offset(),
                format!("expected {wanted}, found {}", t.describe()),
            ),
            None => LangError::syntax(
                self.offset(),
                format!("expected {wanted}, found end of input"),
            ),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), LangError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn finish(&self) -> Result<(), LangError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of input")),
        }
    }

    fn formula(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.lit()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.lit()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn lit(&mut self) -> Result<Formula, LangError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.lit()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(_)) => self.atom().map(Formula::Atom),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn atom(&mut self) -> Result<Atom, LangError> {
        let predicate = match self.bump() {
            Some(Tok::Ident(s)) => s,
            _ => unreachable!("atom called without an identifier"),
        };
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
        }
        Ok(Atom { predicate, args })
    }

    fn term(&mut self) -> Result<Term, LangError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let t = Term::ident(s)?;
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn question(&mut self) -> Result<Question, LangError> {
        let start = self.offset();
        self.expect(Tok::Query, "`?`")?;
        // `?x: ...` and `?x open: ...` are wh-questions; anything else after
        // the marker is the body of a polar question.
        let wh_var = match (self.peek(), self.peek_at(1), self.peek_at(2)) {
            (Some(Tok::Ident(v)), Some(Tok::Colon), _) if is_variable_name(v) => {
                Some((v.clone(), Domain::Closed, 2))
            }
            (Some(Tok::Ident(v)), Some(Tok::Ident(kw)), Some(Tok::Colon))
                if is_variable_name(v) && kw == "open" =>
            {
                Some((v.clone(), Domain::Open, 3))
            }
            _ => None,
        };
        match wh_var {
            Some((var, domain, skip)) => {
                self.pos += skip;
                let body = self.formula()?;
                let var = Term::Variable(var);
                Question::wh(var, body, domain).map_err(|e| match e {
                    LangError::VariableNotInBody { .. } => e,
                    other => LangError::syntax(start, other.to_string()),
                })
            }
            None => Ok(Question::Polar(self.formula()?)),
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Formula, LangError> {
    let mut p = Parser::new(src)?;
    if p.peek().is_none() {
        return Err(LangError::syntax(1, "empty formula"));
    }
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_question(src: &str) -> Result<Question, LangError> {
    let mut p = Parser::new(src)?;
    let q = p.question()?;
    p.finish()?;
    Ok(q)
}

/// Parses a formula and requires it to be an atom or a negated atom.
pub fn parse_literal(src: &str) -> Result<Literal, LangError> {
    let f = parse_formula(src)?;
    f.as_literal()
        .ok_or_else(|| LangError::NotALiteral(src.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(p: &str, args: &[&str]) -> Formula {
        Formula::atom(p, args.iter().map(|a| Term::ident(a).unwrap()).collect())
    }

    #[test]
    fn conjunction_of_symptoms() {
        let f = parse_formula("fever(x) & coughs(x)").unwrap();
        assert_eq!(
            f,
            Formula::and(atom("fever", &["x"]), atom("coughs", &["x"]))
        );
    }

    #[test]
    fn bare_proposition() {
        assert_eq!(parse_formula("p").unwrap(), Formula::prop("p"));
    }

    #[test]
    fn negated_disjunction() {
        assert_eq!(
            parse_formula("~(p | q)").unwrap(),
            Formula::not(Formula::or(Formula::prop("p"), Formula::prop("q")))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let p = || Formula::prop("p");
        let q = || Formula::prop("q");
        let r = || Formula::prop("r");
        assert_eq!(
            parse_formula("p | q & r").unwrap(),
            Formula::or(p(), Formula::and(q(), r()))
        );
        assert_eq!(
            parse_formula("p & q & r").unwrap(),
            Formula::and(Formula::and(p(), q()), r())
        );
        assert_eq!(
            parse_formula("~p & q").unwrap(),
            Formula::and(Formula::not(p()), q())
        );
    }

    #[test]
    fn polar_question() {
        assert_eq!(
            parse_question("? flu(a)").unwrap(),
            Question::Polar(atom("flu", &["a"]))
        );
        assert_eq!(
            parse_question("?flu(a)").unwrap(),
            Question::Polar(atom("flu", &["a"]))
        );
    }

    #[test]
    fn open_wh_question() {
        assert_eq!(
            parse_question("?x open: largest_planet(x)").unwrap(),
            Question::Wh {
                var: Term::Variable("x".into()),
                body: atom("largest_planet", &["x"]),
                domain: Domain::Open,
            }
        );
    }

    #[test]
    fn closed_wh_question() {
        assert_eq!(
            parse_question("?x: mammal(x)").unwrap(),
            Question::Wh {
                var: Term::Variable("x".into()),
                body: atom("mammal", &["x"]),
                domain: Domain::Closed,
            }
        );
    }

    #[test]
    fn wh_variable_must_occur() {
        assert_eq!(
            parse_question("?y: mammal(x)"),
            Err(LangError::VariableNotInBody { var: "y".into() })
        );
    }

    #[test]
    fn syntax_error_offsets() {
        match parse_formula("p & ") {
            Err(LangError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("fever(X)") {
            Err(LangError::Syntax { offset, .. }) => assert_eq!(offset, 7),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("p()") {
            Err(LangError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula(""),
            Err(LangError::Syntax { offset: 1, .. })
        ));
        assert!(matches!(
            parse_formula("(p"),
            Err(LangError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_formula("p q"),
            Err(LangError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_question("flu(a)"),
            Err(LangError::Syntax { offset: 1, .. })
        ));
    }

    #[test]
    fn arrow_is_not_a_connective() {
        assert!(matches!(
            parse_formula("p -> q"),
            Err(LangError::Syntax { offset: 3, .. })
        ));
    }

    #[test]
    fn literal_parsing() {
        assert!(parse_literal("~flu(b)").unwrap().negated);
        assert!(matches!(
            parse_literal("p & q"),
            Err(LangError::NotALiteral(_))
        ));
    }
}
