//! Formulas of second-order predicate logic over the first-order signature,
//! with the derived connectives used throughout the library, a plain-text
//! grammar, and capture-avoiding substitution of individual variables and
//! predicate variables.
//!
//! Core formulas are built from `_|_`, atoms `X(t1,..,tk)`, implication
//! `->` (right associative), first-order quantification `all x. A` and
//! second-order quantification `ALL X^k. A`. Everything else is sugar:
//!
//! * `~A`          is `A -> _|_`
//! * `ex x. A`     is `~all x. ~A`
//! * `a = b`       is `ALL X^1. X(a) -> X(b)`
//! * `Bool[t]`     is `ALL X^1. X(B1) -> (X(B0) -> X(t))`
//! * `Ent[t]`      is `ALL X^1. X(Z) -> ((all y. X(y) -> X(S(y))) -> X(t))`
//!
//! Identifiers starting with an uppercase letter are predicate variables,
//! except the reserved `Z`, `S`, `B0`, `B1` (first-order symbols), `Bool`,
//! `Ent` (sugar heads) and the keyword `ALL`. Lowercase identifiers are
//! individual variables, or function symbols when applied.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::names;
use crate::syntax::SyntaxError;
use crate::typing::fo::{b0, b1, builtin_arity, s, zero, Equations, FoTerm};

/// A formula of second-order predicate logic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bottom,
    /// `X(t1,..,tk)` — a predicate variable applied to individual terms.
    Atom(String, Vec<FoTerm>),
    Imp(Box<Formula>, Box<Formula>),
    /// `all x. A` — quantification over individuals.
    AllInd(String, Box<Formula>),
    /// `ALL X^k. A` — quantification over k-ary predicates.
    AllPred(String, usize, Box<Formula>),
}

pub fn bottom() -> Formula {
    Formula::Bottom
}
pub fn atom(p: impl Into<String>, args: Vec<FoTerm>) -> Formula {
    Formula::Atom(p.into(), args)
}
pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Imp(Box::new(a), Box::new(b))
}
pub fn neg(a: Formula) -> Formula {
    imp(a, bottom())
}
pub fn all_ind(x: impl Into<String>, a: Formula) -> Formula {
    Formula::AllInd(x.into(), Box::new(a))
}
pub fn all_pred(p: impl Into<String>, k: usize, a: Formula) -> Formula {
    Formula::AllPred(p.into(), k, Box::new(a))
}
pub fn ex_ind(x: impl Into<String>, a: Formula) -> Formula {
    let x = x.into();
    neg(all_ind(x, neg(a)))
}
/// Leibniz equality `a = b`.
pub fn eq_of(a: FoTerm, b: FoTerm) -> Formula {
    all_pred("X", 1, imp(atom("X", vec![a]), atom("X", vec![b])))
}
/// The boolean data-type predicate `Bool[t]`.
pub fn bool_of(t: FoTerm) -> Formula {
    all_pred(
        "X",
        1,
        imp(
            atom("X", vec![b1()]),
            imp(atom("X", vec![b0()]), atom("X", vec![t])),
        ),
    )
}
/// The numeral data-type predicate `Ent[t]`.
pub fn ent_of(t: FoTerm) -> Formula {
    all_pred(
        "X",
        1,
        imp(
            atom("X", vec![zero()]),
            imp(
                all_ind(
                    "y",
                    imp(
                        atom("X", vec![FoTerm::Var("y".into())]),
                        atom("X", vec![s(FoTerm::Var("y".into()))]),
                    ),
                ),
                atom("X", vec![t]),
            ),
        ),
    )
}

fn reserved_pred(name: &str) -> bool {
    matches!(name, "Bool" | "Ent" | "Z" | "S" | "B0" | "B1" | "ALL")
}

fn starts_upper(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

impl Formula {
    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Bottom)
    }

    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Imp(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Sugar view `~A`.
    pub fn as_neg(&self) -> Option<&Formula> {
        match self {
            Formula::Imp(a, b) if b.is_bottom() => Some(a),
            _ => None,
        }
    }

    /// Sugar view `ex x. A`.
    pub fn as_ex(&self) -> Option<(&str, &Formula)> {
        let inner = self.as_neg()?;
        match inner {
            Formula::AllInd(x, body) => Some((x.as_str(), body.as_neg()?)),
            _ => None,
        }
    }

    /// Sugar view `a = b`.
    pub fn as_eq(&self) -> Option<(&FoTerm, &FoTerm)> {
        match self {
            Formula::AllPred(p, 1, body) => match body.as_ref() {
                Formula::Imp(l, r) => match (l.as_ref(), r.as_ref()) {
                    (Formula::Atom(q, la), Formula::Atom(w, ra))
                        if q == p && w == p && la.len() == 1 && ra.len() == 1 =>
                    {
                        Some((&la[0], &ra[0]))
                    }
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// Sugar view `Bool[t]`.
    pub fn as_bool(&self) -> Option<&FoTerm> {
        let Formula::AllPred(p, 1, body) = self else {
            return None;
        };
        let (one, rest) = body.as_imp()?;
        let (zero_, last) = rest.as_imp()?;
        match (one, zero_, last) {
            (Formula::Atom(q1, a1), Formula::Atom(q0, a0), Formula::Atom(qt, at)) => {
                if q1 == p
                    && q0 == p
                    && qt == p
                    && a1.as_slice() == [b1()]
                    && a0.as_slice() == [b0()]
                    && at.len() == 1
                {
                    Some(&at[0])
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Sugar view `Ent[t]`.
    pub fn as_ent(&self) -> Option<&FoTerm> {
        let Formula::AllPred(p, 1, body) = self else {
            return None;
        };
        let (base, rest) = body.as_imp()?;
        let (step, last) = rest.as_imp()?;
        let Formula::Atom(qz, az) = base else { return None };
        if qz != p || az.as_slice() != [zero()] {
            return None;
        }
        let Formula::AllInd(y, sbody) = step else { return None };
        let (sl, sr) = sbody.as_imp()?;
        match (sl, sr) {
            (Formula::Atom(ql, al), Formula::Atom(qr, ar))
                if ql == p
                    && qr == p
                    && al.as_slice() == [FoTerm::Var(y.clone())]
                    && ar.as_slice() == [s(FoTerm::Var(y.clone()))] => {}
            _ => return None,
        }
        let Formula::Atom(qt, at) = last else { return None };
        if qt == p && at.len() == 1 {
            Some(&at[0])
        } else {
            None
        }
    }

    /// Free individual variables.
    pub fn free_ind_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.fiv(&mut Vec::new(), &mut out);
        out
    }
    fn fiv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bottom => {}
            Formula::Atom(_, args) => {
                for t in args {
                    for v in t.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Imp(a, b) => {
                a.fiv(bound, out);
                b.fiv(bound, out);
            }
            Formula::AllInd(x, a) => {
                bound.push(x.clone());
                a.fiv(bound, out);
                bound.pop();
            }
            Formula::AllPred(_, _, a) => a.fiv(bound, out),
        }
    }

    /// Free predicate variables (names only).
    pub fn free_pred_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.fpv(&mut Vec::new(), &mut out);
        out
    }
    fn fpv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bottom => {}
            Formula::Atom(p, _) => {
                if !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            Formula::Imp(a, b) => {
                a.fpv(bound, out);
                b.fpv(bound, out);
            }
            Formula::AllInd(_, a) => a.fpv(bound, out),
            Formula::AllPred(p, _, a) => {
                bound.push(p.clone());
                a.fpv(bound, out);
                bound.pop();
            }
        }
    }

    /// Well-formedness: predicate variables keep one arity per scope,
    /// function symbols keep one arity, and reserved names are not abused.
    pub fn wf(&self) -> Result<(), String> {
        let mut psig = BTreeMap::new();
        let mut fsig = BTreeMap::new();
        self.wf_walk(&mut Vec::new(), &mut psig, &mut fsig)
    }
    fn wf_walk(
        &self,
        bound: &mut Vec<(String, usize)>,
        psig: &mut BTreeMap<String, usize>,
        fsig: &mut BTreeMap<String, usize>,
    ) -> Result<(), String> {
        match self {
            Formula::Bottom => Ok(()),
            Formula::Atom(p, args) => {
                if reserved_pred(p) {
                    return Err(format!("{p} is reserved and cannot be a predicate variable"));
                }
                let want = bound.iter().rev().find(|(q, _)| q == p).map(|(_, k)| *k);
                match want.or_else(|| psig.get(p).copied()) {
                    Some(k) if k != args.len() => {
                        return Err(format!(
                            "predicate variable {p} used with {} arguments but has arity {k}",
                            args.len()
                        ));
                    }
                    Some(_) => {}
                    None => {
                        psig.insert(p.clone(), args.len());
                    }
                }
                for t in args {
                    t.check_arities(fsig)?;
                    for v in t.vars() {
                        if builtin_arity(&v).is_some() {
                            return Err(format!("{v} is a function symbol, not a variable"));
                        }
                    }
                }
                Ok(())
            }
            Formula::Imp(a, b) => {
                a.wf_walk(bound, psig, fsig)?;
                b.wf_walk(bound, psig, fsig)
            }
            Formula::AllInd(x, a) => {
                if builtin_arity(x).is_some() {
                    return Err(format!("{x} is a function symbol and cannot be bound"));
                }
                a.wf_walk(bound, psig, fsig)
            }
            Formula::AllPred(p, k, a) => {
                if reserved_pred(p) {
                    return Err(format!("{p} is reserved and cannot be a predicate variable"));
                }
                bound.push((p.clone(), *k));
                let r = a.wf_walk(bound, psig, fsig);
                bound.pop();
                r
            }
        }
    }

    /// Capture-avoiding substitution of one individual variable.
    pub fn subst_ind(&self, x: &str, a: &FoTerm) -> Formula {
        let mut m = BTreeMap::new();
        m.insert(x.to_string(), a.clone());
        self.subst_ind_many(&m)
    }

    /// Capture-avoiding simultaneous substitution of individual variables.
    pub fn subst_ind_many(&self, map: &BTreeMap<String, FoTerm>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|t| t.subst_many(map)).collect())
            }
            Formula::Imp(a, b) => imp(a.subst_ind_many(map), b.subst_ind_many(map)),
            Formula::AllInd(y, body) => {
                let mut m2 = map.clone();
                m2.remove(y);
                if m2.is_empty() {
                    return Formula::AllInd(y.clone(), body.clone());
                }
                if m2.values().any(|t| t.vars().contains(y)) {
                    let mut avoid: BTreeSet<String> = body.free_ind_vars();
                    for t in m2.values() {
                        avoid.extend(t.vars());
                    }
                    avoid.extend(m2.keys().cloned());
                    let y2 = names::fresh(y, |c| avoid.contains(c));
                    let body2 = body.subst_ind(y, &FoTerm::Var(y2.clone()));
                    all_ind(y2, body2.subst_ind_many(&m2))
                } else {
                    Formula::AllInd(y.clone(), Box::new(body.subst_ind_many(&m2)))
                }
            }
            Formula::AllPred(p, k, body) => {
                Formula::AllPred(p.clone(), *k, Box::new(body.subst_ind_many(map)))
            }
        }
    }

    /// Rename free occurrences of a predicate variable.
    fn rename_pred(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Atom(p, args) if p == from => Formula::Atom(to.into(), args.clone()),
            Formula::Atom(_, _) => self.clone(),
            Formula::Imp(a, b) => imp(a.rename_pred(from, to), b.rename_pred(from, to)),
            Formula::AllInd(x, a) => {
                Formula::AllInd(x.clone(), Box::new(a.rename_pred(from, to)))
            }
            Formula::AllPred(p, _, _) if p == from => self.clone(),
            Formula::AllPred(p, k, a) => {
                Formula::AllPred(p.clone(), *k, Box::new(a.rename_pred(from, to)))
            }
        }
    }

    /// Capture-avoiding substitution of a predicate variable by the
    /// parameterized formula `(params) g`: every atom `xp(t1,..,tk)` becomes
    /// `g[params := t1,..,tk]`.
    pub fn subst_pred(&self, xp: &str, params: &[String], g: &Formula) -> Result<Formula, String> {
        let pset: BTreeSet<&str> = params.iter().map(|s| s.as_str()).collect();
        let exposed: BTreeSet<String> = g
            .free_ind_vars()
            .into_iter()
            .filter(|v| !pset.contains(v.as_str()))
            .collect();
        let gpreds = g.free_pred_vars();
        self.subst_pred_walk(xp, params, g, &exposed, &gpreds)
    }
    fn subst_pred_walk(
        &self,
        xp: &str,
        params: &[String],
        g: &Formula,
        exposed: &BTreeSet<String>,
        gpreds: &BTreeSet<String>,
    ) -> Result<Formula, String> {
        match self {
            Formula::Bottom => Ok(Formula::Bottom),
            Formula::Atom(p, args) if p == xp => {
                if args.len() != params.len() {
                    return Err(format!(
                        "predicate variable {xp} occurs with {} arguments but is instantiated at arity {}",
                        args.len(),
                        params.len()
                    ));
                }
                let map: BTreeMap<String, FoTerm> =
                    params.iter().cloned().zip(args.iter().cloned()).collect();
                Ok(g.subst_ind_many(&map))
            }
            Formula::Atom(_, _) => Ok(self.clone()),
            Formula::Imp(a, b) => Ok(imp(
                a.subst_pred_walk(xp, params, g, exposed, gpreds)?,
                b.subst_pred_walk(xp, params, g, exposed, gpreds)?,
            )),
            Formula::AllInd(y, body) => {
                if exposed.contains(y) {
                    let mut avoid = body.free_ind_vars();
                    avoid.extend(exposed.iter().cloned());
                    avoid.extend(params.iter().cloned());
                    let y2 = names::fresh(y, |c| avoid.contains(c));
                    let body2 = body.subst_ind(y, &FoTerm::Var(y2.clone()));
                    Ok(all_ind(
                        y2,
                        body2.subst_pred_walk(xp, params, g, exposed, gpreds)?,
                    ))
                } else {
                    Ok(Formula::AllInd(
                        y.clone(),
                        Box::new(body.subst_pred_walk(xp, params, g, exposed, gpreds)?),
                    ))
                }
            }
            Formula::AllPred(q, k, body) => {
                if q == xp {
                    return Ok(self.clone());
                }
                if gpreds.contains(q) {
                    let mut avoid = body.free_pred_vars();
                    avoid.extend(gpreds.iter().cloned());
                    avoid.insert(xp.to_string());
                    let q2 = names::fresh(q, |c| avoid.contains(c) || reserved_pred(c));
                    let body2 = body.rename_pred(q, &q2);
                    Ok(all_pred(
                        q2,
                        *k,
                        body2.subst_pred_walk(xp, params, g, exposed, gpreds)?,
                    ))
                } else {
                    Ok(Formula::AllPred(
                        q.clone(),
                        *k,
                        Box::new(body.subst_pred_walk(xp, params, g, exposed, gpreds)?),
                    ))
                }
            }
        }
    }

    /// Canonical form: bound individual and predicate variables renamed to
    /// `$i<n>` / `$P<n>` in traversal order. Two formulas are α-equivalent
    /// exactly when their canonical forms are equal.
    pub fn canonical(&self) -> Formula {
        let mut counter = 0usize;
        self.canon(&mut counter, &mut Vec::new(), &mut Vec::new())
    }
    fn canon(
        &self,
        counter: &mut usize,
        ind_env: &mut Vec<(String, String)>,
        pred_env: &mut Vec<(String, String)>,
    ) -> Formula {
        fn canon_term(t: &FoTerm, ind_env: &[(String, String)]) -> FoTerm {
            match t {
                FoTerm::Var(x) => {
                    match ind_env.iter().rev().find(|(o, _)| o == x) {
                        Some((_, n)) => FoTerm::Var(n.clone()),
                        None => t.clone(),
                    }
                }
                FoTerm::Fn(f, args) => FoTerm::Fn(
                    f.clone(),
                    args.iter().map(|a| canon_term(a, ind_env)).collect(),
                ),
            }
        }
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Atom(p, args) => {
                let p2 = match pred_env.iter().rev().find(|(o, _)| o == p) {
                    Some((_, n)) => n.clone(),
                    None => p.clone(),
                };
                Formula::Atom(p2, args.iter().map(|a| canon_term(a, ind_env)).collect())
            }
            Formula::Imp(a, b) => imp(
                a.canon(counter, ind_env, pred_env),
                b.canon(counter, ind_env, pred_env),
            ),
            Formula::AllInd(x, a) => {
                let nx = format!("$i{counter}");
                *counter += 1;
                ind_env.push((x.clone(), nx.clone()));
                let a2 = a.canon(counter, ind_env, pred_env);
                ind_env.pop();
                Formula::AllInd(nx, Box::new(a2))
            }
            Formula::AllPred(p, k, a) => {
                let np = format!("$P{counter}");
                *counter += 1;
                pred_env.push((p.clone(), np.clone()));
                let a2 = a.canon(counter, ind_env, pred_env);
                pred_env.pop();
                Formula::AllPred(np, *k, Box::new(a2))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn canon_key(&self) -> String {
        self.canonical().to_string()
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

#[derive(PartialEq, Clone, Copy)]
enum Pos {
    Top,
    ImpLhs,
    NegArg,
}

impl Formula {
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, pos: Pos) -> fmt::Result {
        if let Some(t) = self.as_ent() {
            return write!(f, "Ent[{t}]");
        }
        if let Some(t) = self.as_bool() {
            return write!(f, "Bool[{t}]");
        }
        if let Some((a, b)) = self.as_eq() {
            return if pos == Pos::NegArg {
                write!(f, "({a} = {b})")
            } else {
                write!(f, "{a} = {b}")
            };
        }
        if let Some((x, body)) = self.as_ex() {
            let parens = pos != Pos::Top;
            if parens {
                write!(f, "(")?;
            }
            write!(f, "ex {x}. ")?;
            body.fmt_at(f, Pos::Top)?;
            if parens {
                write!(f, ")")?;
            }
            return Ok(());
        }
        if let Some(a) = self.as_neg() {
            write!(f, "~")?;
            return a.fmt_at(f, Pos::NegArg);
        }
        match self {
            Formula::Bottom => write!(f, "_|_"),
            Formula::Atom(p, args) => {
                write!(f, "{p}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, t) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{t}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Imp(a, b) => {
                let parens = pos != Pos::Top;
                if parens {
                    write!(f, "(")?;
                }
                a.fmt_at(f, Pos::ImpLhs)?;
                write!(f, " -> ")?;
                b.fmt_at(f, Pos::Top)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::AllInd(x, a) => {
                let parens = pos != Pos::Top;
                if parens {
                    write!(f, "(")?;
                }
                write!(f, "all {x}. ")?;
                a.fmt_at(f, Pos::Top)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::AllPred(p, k, a) => {
                let parens = pos != Pos::Top;
                if parens {
                    write!(f, "(")?;
                }
                write!(f, "ALL {p}^{k}. ")?;
                a.fmt_at(f, Pos::Top)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, Pos::Top)
    }
}

// ---------------------------------------------------------------------------
// Lexer and parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Num(usize),
    Arrow,
    Tilde,
    LPar,
    RPar,
    LBrack,
    RBrack,
    Comma,
    Dot,
    EqSign,
    Caret,
    Bottom,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Id(s) => write!(f, "{s}"),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Arrow => write!(f, "->"),
            Tok::Tilde => write!(f, "~"),
            Tok::LPar => write!(f, "("),
            Tok::RPar => write!(f, ")"),
            Tok::LBrack => write!(f, "["),
            Tok::RBrack => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::EqSign => write!(f, "="),
            Tok::Caret => write!(f, "^"),
            Tok::Bottom => write!(f, "_|_"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("_|_") {
            out.push((Tok::Bottom, i));
            i += 3;
            continue;
        }
        if src[i..].starts_with("->") {
            out.push((Tok::Arrow, i));
            i += 2;
            continue;
        }
        let single = match c {
            '~' => Some(Tok::Tilde),
            '(' => Some(Tok::LPar),
            ')' => Some(Tok::RPar),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::EqSign),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, i));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            let n: usize = src[start..i]
                .parse()
                .map_err(|_| SyntaxError::at("number out of range", start))?;
            out.push((Tok::Num(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i] as char;
                if d.is_ascii_alphanumeric() || d == '_' || d == '$' || d == '\'' {
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((Tok::Id(src[start..i].to_string()), start));
            continue;
        }
        return Err(SyntaxError::at(format!("unexpected character {c:?}"), i));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser { toks: lex(src)?, pos: 0, len: src.len() })
    }
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.len)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(SyntaxError::at(
                format!("expected '{want}' but found '{t}'"),
                self.here(),
            )),
            None => Err(SyntaxError::at(
                format!("expected '{want}' but input ended"),
                self.here(),
            )),
        }
    }
    fn ident(&mut self, what: &str) -> Result<(String, usize), SyntaxError> {
        let off = self.here();
        match self.bump() {
            Some(Tok::Id(s)) => Ok((s, off)),
            Some(t) => Err(SyntaxError::at(format!("expected {what} but found {t}"), off)),
            None => Err(SyntaxError::at(format!("expected {what} but input ended"), off)),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.formula()?;
            Ok(imp(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(Tok::Id(name)) if name == "all" || name == "ex" => {
                let ex = name == "ex";
                self.pos += 1;
                let (x, off) = self.ident("an individual variable")?;
                if starts_upper(&x) {
                    return Err(SyntaxError::at(
                        format!("individual variables are lowercase; {x} is not"),
                        off,
                    ));
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if ex { ex_ind(x, body) } else { all_ind(x, body) })
            }
            Some(Tok::Id(name)) if name == "ALL" => {
                self.pos += 1;
                let (p, off) = self.ident("a predicate variable")?;
                if !starts_upper(&p) || reserved_pred(&p) {
                    return Err(SyntaxError::at(
                        format!("{p} cannot be a predicate variable"),
                        off,
                    ));
                }
                self.expect(Tok::Caret)?;
                let k = match self.bump() {
                    Some(Tok::Num(n)) => n,
                    _ => {
                        return Err(SyntaxError::at(
                            "expected an arity after ^",
                            self.here(),
                        ))
                    }
                };
                self.expect(Tok::Dot)?;
                Ok(all_pred(p, k, self.formula()?))
            }
            _ => self.atomish(),
        }
    }

    fn atomish(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(bottom())
            }
            Some(Tok::LPar) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RPar)?;
                Ok(f)
            }
            Some(Tok::Id(name)) if name == "Bool" || name == "Ent" => {
                self.pos += 1;
                self.expect(Tok::LBrack)?;
                let t = self.foterm()?;
                self.expect(Tok::RBrack)?;
                Ok(if name == "Bool" { bool_of(t) } else { ent_of(t) })
            }
            Some(Tok::Id(name)) if starts_upper(&name) && !reserved_pred(&name) => {
                self.pos += 1;
                let args = if self.peek() == Some(&Tok::LPar) {
                    self.term_args()?
                } else {
                    Vec::new()
                };
                if self.peek() == Some(&Tok::EqSign) {
                    return Err(SyntaxError::at(
                        "'=' relates first-order terms, not predicate atoms",
                        self.here(),
                    ));
                }
                Ok(atom(name, args))
            }
            Some(Tok::Id(_)) => {
                // A first-order term in formula position must continue as an
                // equation.
                let a = self.foterm()?;
                self.expect(Tok::EqSign).map_err(|e| {
                    SyntaxError::at(
                        format!("a first-order term in formula position must be followed by '=' ({})", e.msg),
                        e.at.unwrap_or(0),
                    )
                })?;
                let b = self.foterm()?;
                Ok(eq_of(a, b))
            }
            Some(t) => Err(SyntaxError::at(format!("unexpected {t}"), self.here())),
            None => Err(SyntaxError::at("unexpected end of input", self.here())),
        }
    }

    fn term_args(&mut self) -> Result<Vec<FoTerm>, SyntaxError> {
        self.expect(Tok::LPar)?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::RPar) {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.foterm()?);
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RPar) => break,
                Some(t) => {
                    return Err(SyntaxError::at(
                        format!("expected ',' or ')' in argument list but found {t}"),
                        self.here(),
                    ))
                }
                None => {
                    return Err(SyntaxError::at(
                        "argument list is not closed",
                        self.here(),
                    ))
                }
            }
        }
        Ok(args)
    }

    fn foterm(&mut self) -> Result<FoTerm, SyntaxError> {
        let (name, off) = self.ident("a first-order term")?;
        if name == "all" || name == "ex" || name == "ALL" {
            return Err(SyntaxError::at(
                format!("reserved word {name} cannot start a first-order term"),
                off,
            ));
        }
        match name.as_str() {
            "Z" | "B0" | "B1" => {
                if self.peek() == Some(&Tok::LPar) {
                    return Err(SyntaxError::at(
                        format!("{name} is a constant and takes no arguments"),
                        self.here(),
                    ));
                }
                Ok(FoTerm::Fn(name, Vec::new()))
            }
            "S" => {
                if self.peek() != Some(&Tok::LPar) {
                    return Err(SyntaxError::at(
                        "S requires an argument list, as in S(Z)",
                        off,
                    ));
                }
                let args = self.term_args()?;
                if args.len() != 1 {
                    return Err(SyntaxError::at("S takes exactly one argument", off));
                }
                Ok(FoTerm::Fn("S".into(), args))
            }
            _ if starts_upper(&name) => Err(SyntaxError::at(
                format!("predicate variable {name} cannot appear inside a first-order term"),
                off,
            )),
            _ => {
                if self.peek() == Some(&Tok::LPar) {
                    let args = self.term_args()?;
                    Ok(FoTerm::Fn(name, args))
                } else {
                    Ok(FoTerm::Var(name))
                }
            }
        }
    }

    fn finish(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(SyntaxError::at(
                format!("unexpected trailing {t}"),
                self.here(),
            )),
        }
    }
}

/// Parse a formula and check it is well formed.
pub fn parse_formula(src: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    f.wf().map_err(SyntaxError::new)?;
    Ok(f)
}

/// Parse a first-order term.
pub fn parse_foterm(src: &str) -> Result<FoTerm, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.foterm()?;
    p.finish()?;
    Ok(t)
}

impl Equations {
    /// Parse an equation file: one `lhs = rhs` per line, `#` starts a
    /// comment, blank lines ignored. Function arities must be consistent
    /// across the whole file.
    pub fn parse(src: &str) -> Result<Equations, SyntaxError> {
        let mut eqns = Vec::new();
        let mut sig = BTreeMap::new();
        for (lineno, raw) in src.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(SyntaxError::new(format!(
                    "line {}: expected 'lhs = rhs'",
                    lineno + 1
                )));
            };
            let l = parse_foterm(&line[..eq])
                .map_err(|e| SyntaxError::new(format!("line {}: {}", lineno + 1, e)))?;
            let r = parse_foterm(&line[eq + 1..])
                .map_err(|e| SyntaxError::new(format!("line {}: {}", lineno + 1, e)))?;
            for t in [&l, &r] {
                t.check_arities(&mut sig)
                    .map_err(|e| SyntaxError::new(format!("line {}: {}", lineno + 1, e)))?;
            }
            eqns.push((l, r));
        }
        Ok(Equations { eqns })
    }
}
