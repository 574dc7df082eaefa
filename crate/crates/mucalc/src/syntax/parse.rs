//! Parsers for the two surface syntaxes.
//!
//! Shared conventions: applications are written as parenthesized spines
//! `(f a b)` associating to the left; lambda/mu bodies extend as far right
//! as possible; a bare binder form may appear inside an application spine
//! only as its last element (`(f \x.x)`), otherwise it must be
//! parenthesized (`(f (\x.x) y)`).
//!
//! λμ (`parse_lmu`):   `t := x | \x.t | (t t ...) | mu #a.[#b]t`
//! λμ++ (`parse_mupp`): `t := x | #a | \x.t | \1x.t | \2 | \'x.t
//!                           | mu #a.t | mu'#a.t | (t t ...) | xi#a`

use crate::names::{valid_ident, DELTA};
use crate::syntax::{lmu, lmu::LmuTerm, mupp, mupp::MuppTerm, SyntaxError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lam,
    Lam1,
    Lam2,
    LamVac,
    Mu,
    MuVac,
    Ident(String),
    MVar(String),
    XiReg(String),
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Lam => write!(f, "'\\'"),
            Tok::Lam1 => write!(f, "'\\1'"),
            Tok::Lam2 => write!(f, "'\\2'"),
            Tok::LamVac => write!(f, "'\\''"),
            Tok::Mu => write!(f, "'mu'"),
            Tok::MuVac => write!(f, "'mu''"),
            Tok::Ident(x) => write!(f, "identifier '{x}'"),
            Tok::MVar(a) => write!(f, "'#{a}'"),
            Tok::XiReg(a) => write!(f, "'xi#{a}'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrack => write!(f, "'['"),
            Tok::RBrack => write!(f, "']'"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBrack, i));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBrack, i));
                i += 1;
            }
            '\\' => {
                let (tok, len) = match bytes.get(i + 1).map(|&b| b as char) {
                    Some('1') => (Tok::Lam1, 2),
                    Some('2') => (Tok::Lam2, 2),
                    Some('\'') => (Tok::LamVac, 2),
                    _ => (Tok::Lam, 1),
                };
                toks.push((tok, i));
                i += len;
            }
            '#' => {
                let (name, len) = lex_ident(src, i + 1)
                    .ok_or_else(|| SyntaxError::at("expected a name after '#'", i))?;
                toks.push((Tok::MVar(name), i));
                i += 1 + len;
            }
            _ => {
                let (name, len) = lex_ident(src, i).ok_or_else(|| {
                    SyntaxError::at(format!("unexpected character '{c}'"), i)
                })?;
                let mut tok = Tok::Ident(name.clone());
                let mut total = len;
                if name == "mu" && bytes.get(i + len) == Some(&b'\'') {
                    tok = Tok::MuVac;
                    total += 1;
                } else if name == "mu" {
                    tok = Tok::Mu;
                } else if name == "xi" && bytes.get(i + len) == Some(&b'#') {
                    let (reg, rlen) = lex_ident(src, i + len + 1)
                        .ok_or_else(|| SyntaxError::at("expected a name after 'xi#'", i))?;
                    tok = Tok::XiReg(reg);
                    total += 1 + rlen;
                }
                toks.push((tok, i));
                i += total;
            }
        }
    }
    Ok(toks)
}

/// Lex an identifier starting at byte offset `i`; returns (name, length).
fn lex_ident(src: &str, i: usize) -> Option<(String, usize)> {
    let rest = &src[i.min(src.len())..];
    let mut chars = rest.char_indices();
    match chars.next() {
        Some((_, c)) if c.is_ascii_lowercase() => {}
        _ => return None,
    }
    let end = rest
        .char_indices()
        .skip(1)
        .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_' || *c == '$'))
        .map(|(j, _)| j)
        .unwrap_or(rest.len());
    let name = rest[..end].to_string();
    debug_assert!(valid_ident(&name));
    Some((name, end))
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, o)| o).unwrap_or(self.end)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(SyntaxError::at(
                format!("expected {want}, found {t}"),
                self.toks[self.pos - 1].1,
            )),
            None => Err(SyntaxError::at(format!("expected {want}, found end of input"), self.end)),
        }
    }
    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.next() {
            Some(Tok::Ident(x)) => Ok(x),
            Some(t) => Err(SyntaxError::at(
                format!("expected an identifier, found {t}"),
                self.toks[self.pos - 1].1,
            )),
            None => Err(SyntaxError::at("expected an identifier, found end of input", self.end)),
        }
    }
    fn mvar(&mut self) -> Result<String, SyntaxError> {
        match self.next() {
            Some(Tok::MVar(a)) => Ok(a),
            Some(t) => Err(SyntaxError::at(
                format!("expected a mu-variable '#name', found {t}"),
                self.toks[self.pos - 1].1,
            )),
            None => Err(SyntaxError::at(
                "expected a mu-variable '#name', found end of input",
                self.end,
            )),
        }
    }
    fn binder_mvar(&mut self) -> Result<String, SyntaxError> {
        let off = self.here();
        let a = self.mvar()?;
        if a == DELTA {
            return Err(SyntaxError::at("#delta is a mu-constant and cannot be bound", off));
        }
        Ok(a)
    }
}

/// Parse a λμ term (also checks well-formedness).
pub fn parse_lmu(src: &str) -> Result<LmuTerm, SyntaxError> {
    let mut p = P { toks: lex(src)?, pos: 0, end: src.len() };
    let t = lmu_term(&mut p)?;
    if let Some(tok) = p.peek() {
        return Err(SyntaxError::at(format!("unexpected trailing {tok}"), p.here()));
    }
    t.wf()?;
    Ok(t)
}

fn lmu_term(p: &mut P) -> Result<LmuTerm, SyntaxError> {
    let off = p.here();
    match p.next() {
        Some(Tok::Ident(x)) => Ok(LmuTerm::Var(x)),
        Some(Tok::Lam) => {
            let x = p.ident()?;
            p.expect(Tok::Dot)?;
            Ok(lmu::lam(x, lmu_term(p)?))
        }
        Some(Tok::Mu) => {
            let a = p.binder_mvar()?;
            p.expect(Tok::Dot)?;
            p.expect(Tok::LBrack)?;
            let b = p.mvar()?;
            p.expect(Tok::RBrack)?;
            Ok(lmu::mu(a, b, lmu_term(p)?))
        }
        Some(Tok::LParen) => {
            let mut elems: Vec<LmuTerm> = Vec::new();
            loop {
                match p.peek() {
                    Some(Tok::RParen) => {
                        p.next();
                        break;
                    }
                    None => {
                        return Err(SyntaxError::at("unclosed '('", off));
                    }
                    Some(tok) => {
                        let bare_binder = matches!(tok, Tok::Lam | Tok::Mu);
                        let el_off = p.here();
                        elems.push(lmu_term(p)?);
                        if bare_binder && !matches!(p.peek(), Some(Tok::RParen)) {
                            return Err(SyntaxError::at(
                                "a bare lambda/mu term must be the last element of an \
                                 application; parenthesize it",
                                el_off,
                            ));
                        }
                    }
                }
            }
            let mut it = elems.into_iter();
            match it.next() {
                None => Err(SyntaxError::at("empty parentheses", off)),
                Some(head) => Ok(lmu::apps(head, it)),
            }
        }
        Some(Tok::MVar(a)) => Err(SyntaxError::at(
            format!("mu-variables cannot appear bare in lmu terms; '#{a}' may only be used \
                     as a binder or inside a naming 'mu #b.[#{a}]t'"),
            off,
        )),
        Some(t @ (Tok::Lam1 | Tok::Lam2 | Tok::LamVac | Tok::MuVac)) => Err(SyntaxError::at(
            format!("{t} is mupp (modified) syntax, not valid in lmu terms"),
            off,
        )),
        Some(Tok::XiReg(_)) => Err(SyntaxError::at(
            "'xi#a' registers are weak-evaluator syntax, not valid in lmu terms",
            off,
        )),
        Some(t) => Err(SyntaxError::at(format!("expected a term, found {t}"), off)),
        None => Err(SyntaxError::at("expected a term, found end of input", off)),
    }
}

/// Parse a λμ++ term, in any stratum (also checks well-formedness, e.g.
/// `\1` linearity).
pub fn parse_mupp(src: &str) -> Result<MuppTerm, SyntaxError> {
    let mut p = P { toks: lex(src)?, pos: 0, end: src.len() };
    let t = mupp_term(&mut p)?;
    if let Some(tok) = p.peek() {
        return Err(SyntaxError::at(format!("unexpected trailing {tok}"), p.here()));
    }
    t.wf()?;
    Ok(t)
}

fn mupp_term(p: &mut P) -> Result<MuppTerm, SyntaxError> {
    let off = p.here();
    match p.next() {
        Some(Tok::Ident(x)) => Ok(MuppTerm::Var(x)),
        Some(Tok::MVar(a)) => Ok(MuppTerm::MuVar(a)),
        Some(Tok::XiReg(a)) => Ok(MuppTerm::Xi(a)),
        Some(Tok::Lam2) => Ok(MuppTerm::Lam2),
        Some(tok @ (Tok::Lam | Tok::Lam1 | Tok::LamVac)) => {
            let x = p.ident()?;
            p.expect(Tok::Dot)?;
            let b = mupp_term(p)?;
            Ok(match tok {
                Tok::Lam => mupp::lam(x, b),
                Tok::Lam1 => mupp::lam1(x, b),
                _ => mupp::lamv(x, b),
            })
        }
        Some(tok @ (Tok::Mu | Tok::MuVac)) => {
            let a = p.binder_mvar()?;
            p.expect(Tok::Dot)?;
            if matches!(p.peek(), Some(Tok::LBrack)) {
                return Err(SyntaxError::at(
                    "namings '[#a]t' are lmu syntax; in mupp apply the mu-variable \
                     instead: '(#a t)'",
                    p.here(),
                ));
            }
            let b = mupp_term(p)?;
            Ok(match tok {
                Tok::Mu => mupp::mu(a, b),
                _ => mupp::muv(a, b),
            })
        }
        Some(Tok::LParen) => {
            let mut elems: Vec<MuppTerm> = Vec::new();
            loop {
                match p.peek() {
                    Some(Tok::RParen) => {
                        p.next();
                        break;
                    }
                    None => {
                        return Err(SyntaxError::at("unclosed '('", off));
                    }
                    Some(tok) => {
                        let bare_binder =
                            matches!(tok, Tok::Lam | Tok::Lam1 | Tok::LamVac | Tok::Mu | Tok::MuVac);
                        let el_off = p.here();
                        elems.push(mupp_term(p)?);
                        if bare_binder && !matches!(p.peek(), Some(Tok::RParen)) {
                            return Err(SyntaxError::at(
                                "a bare lambda/mu term must be the last element of an \
                                 application; parenthesize it",
                                el_off,
                            ));
                        }
                    }
                }
            }
            let mut it = elems.into_iter();
            match it.next() {
                None => Err(SyntaxError::at("empty parentheses", off)),
                Some(head) => Ok(mupp::apps(head, it)),
            }
        }
        Some(t @ (Tok::LBrack | Tok::RBrack)) => Err(SyntaxError::at(
            format!("{t}: namings '[#a]t' are lmu syntax, not valid in mupp terms"),
            off,
        )),
        Some(t) => Err(SyntaxError::at(format!("expected a term, found {t}"), off)),
        None => Err(SyntaxError::at("expected a term, found end of input", off)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt_lmu(s: &str) {
        let t = parse_lmu(s).unwrap_or_else(|e| panic!("parse {s}: {e}"));
        assert_eq!(t.to_string(), s, "print . parse must be identity on printed forms");
        let t2 = parse_lmu(&t.to_string()).unwrap();
        assert_eq!(t, t2);
    }

    fn rt_mupp(s: &str) {
        let t = parse_mupp(s).unwrap_or_else(|e| panic!("parse {s}: {e}"));
        assert_eq!(t.to_string(), s, "print . parse must be identity on printed forms");
        let t2 = parse_mupp(&t.to_string()).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn lmu_round_trips() {
        rt_lmu("x");
        rt_lmu("\\x.\\y.(y x)");
        rt_lmu("mu #a.[#b](x y)");
        rt_lmu("\\x.\\f.mu #a.[#a](f mu #b.[#a](f x))");
        rt_lmu("((\\x.x) y)");
        rt_lmu("(y \\x.x)");
        rt_lmu("(f x y z)");
        rt_lmu("(f (mu #a.[#a]x) y)");
    }

    #[test]
    fn mupp_round_trips() {
        rt_mupp("x");
        rt_mupp("#a");
        rt_mupp("mu #a.(#a x)");
        rt_mupp("mu'#a.\\'y.\\1z.z");
        rt_mupp("(\\2 x)");
        rt_mupp("(xi#a (x y))");
        rt_mupp("mu #a.(#a (\\x.x) y)");
        rt_mupp("(f (\\x.x) y)");
    }

    #[test]
    fn grouping_parens() {
        assert_eq!(parse_mupp("(x)").unwrap(), MuppTerm::Var("x".into()));
        assert_eq!(parse_lmu("(f x y)").unwrap(), parse_lmu("((f x) y)").unwrap());
    }

    #[test]
    fn targeted_errors() {
        let e = parse_lmu("#a").unwrap_err();
        assert!(e.msg.contains("bare"), "{e}");
        let e = parse_lmu("\\1x.x").unwrap_err();
        assert!(e.msg.contains("mupp"), "{e}");
        let e = parse_lmu("mu #a.x").unwrap_err();
        assert!(e.to_string().contains("expected '['"), "{e}");
        let e = parse_mupp("mu #a.[#b]x").unwrap_err();
        assert!(e.msg.contains("lmu syntax"), "{e}");
        let e = parse_mupp("mu #delta.x").unwrap_err();
        assert!(e.msg.contains("delta"), "{e}");
        let e = parse_mupp("\\1x.(x x)").unwrap_err();
        assert!(e.msg.contains("exactly once"), "{e}");
        let e = parse_mupp("(f \\x.x y)").unwrap_err();
        assert!(e.msg.contains("last element"), "{e}");
        let e = parse_mupp("(f").unwrap_err();
        assert!(e.msg.contains("unclosed"), "{e}");
        let e = parse_mupp("()").unwrap_err();
        assert!(e.msg.contains("empty"), "{e}");
    }

    #[test]
    fn xi_lexing_is_greedy_but_safe() {
        // 'xi' alone is an ordinary variable...
        assert_eq!(parse_mupp("xi").unwrap(), MuppTerm::Var("xi".into()));
        // ...'xi#a' is a register.
        assert_eq!(parse_mupp("xi#a").unwrap(), MuppTerm::Xi("a".into()));
        // A variable may contain '$' (fresh-name suffixes survive reparsing).
        assert_eq!(parse_mupp("x$3").unwrap(), MuppTerm::Var("x$3".into()));
    }
}
