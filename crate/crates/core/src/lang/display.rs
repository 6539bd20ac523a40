use std::fmt;

use super::{Atom, Domain, Formula, Literal, Question, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

// Binding strength: `|` = 0, `&` = 1, `~` and atoms = 2.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        Formula::Not(_) | Formula::Atom(_) => 2,
    }
}

fn write_at(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_at(out, f, 0)?;
        return out.write_str(")");
    }
    match f {
        Formula::Atom(a) => write!(out, "{a}"),
        Formula::Not(g) => {
            out.write_str("~")?;
            write_at(out, g, 2)
        }
        // Left-associative: the right operand must bind strictly tighter.
        Formula::And(l, r) => {
            write_at(out, l, 1)?;
            out.write_str(" & ")?;
            write_at(out, r, 2)
        }
        Formula::Or(l, r) => {
            write_at(out, l, 0)?;
            out.write_str(" | ")?;
            write_at(out, r, 1)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, 0)
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Question::Polar(body) => write!(f, "? {body}"),
            Question::Wh {
                var,
                body,
                domain: Domain::Closed,
            } => write!(f, "?{var}: {body}"),
            Question::Wh {
                var,
                body,
                domain: Domain::Open,
            } => write!(f, "?{var} open: {body}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn canonical_forms() {
        let p = Formula::prop("p");
        let q = Formula::prop("q");
        assert_eq!(Formula::and(p.clone(), q.clone()).to_string(), "p & q");
        assert_eq!(Formula::not(p.clone()).to_string(), "~p");
        let bear = parse_formula("bear(x)").unwrap();
        let wh = Question::wh(Term::variable("x").unwrap(), bear, Domain::Open).unwrap();
        assert_eq!(wh.to_string(), "?x open: bear(x)");
    }

    #[test]
    fn parentheses_only_where_needed() {
        for (src, printed) in [
            ("(p & q) & r", "p & q & r"),
            ("p & (q & r)", "p & (q & r)"),
            ("p | (q & r)", "p | q & r"),
            ("(p | q) & r", "(p | q) & r"),
            ("~(p | q)", "~(p | q)"),
            ("~ ~p", "~~p"),
            ("rel( a ,b )", "rel(a, b)"),
            ("? (flu(a))", "? flu(a)"),
        ] {
            let out = if src.starts_with('?') {
                parse_question(src).unwrap().to_string()
            } else {
                parse_formula(src).unwrap().to_string()
            };
            assert_eq!(out, printed, "printing {src}");
        }
    }
}
