use std::fmt;

use super::Regex;

fn write_grouped<A: fmt::Display>(f: &mut fmt::Formatter<'_>, r: &Regex<A>) -> fmt::Result {
    write!(f, "({r})")
}

impl<A: fmt::Display> fmt::Display for Regex<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Empty => f.write_str("EMPTY"),
            Regex::Epsilon => f.write_str("EPS"),
            Regex::Atom(a) => write!(f, "{a}"),
            Regex::Concat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match c {
                        Regex::Concat(_) | Regex::Disj(_) => write_grouped(f, c)?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            Regex::Disj(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    match c {
                        Regex::Disj(_) => write_grouped(f, c)?,
                        _ => write!(f, "{c}")?,
                    }
                }
                Ok(())
            }
            Regex::Optional(c) | Regex::Plus(c) => {
                match **c {
                    Regex::Empty | Regex::Epsilon | Regex::Atom(_) => write!(f, "{c}")?,
                    _ => write_grouped(f, c)?,
                }
                f.write_str(if matches!(self, Regex::Optional(_)) { "?" } else { "+" })
            }
        }
    }
}
