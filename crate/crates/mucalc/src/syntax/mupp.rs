//! λμ++ terms: `x | #a | \x.t | mu #a.t | (t u)`.
//!
//! μ-variables are first-class leaves here ([`MuppTerm::MuVar`]); there are
//! no namings. The modified variant adds annotated binders: `\1x.t` (the
//! binder occurs exactly once), `\2` (the closed identity `\x.x` written as a
//! constant), `\'x.t` and `mu'#a.t` (vacuous binders). The weak evaluator
//! additionally uses the register leaf `xi#a` ([`MuppTerm::Xi`]).

use std::collections::BTreeSet;
use std::fmt;

use crate::names::{self, DELTA};
use crate::syntax::{Path, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MuppTerm {
    Var(String),
    MuVar(String),
    Lam(String, Box<MuppTerm>),
    /// `\1x.t` — x occurs exactly once free in t.
    Lam1(String, Box<MuppTerm>),
    /// `\2` — the identity `\x.x` as a constant.
    Lam2,
    /// `\'x.t` — x does not occur free in t.
    LamVac(String, Box<MuppTerm>),
    Mu(String, Box<MuppTerm>),
    /// `mu'#a.t` — a does not occur free in t.
    MuVac(String, Box<MuppTerm>),
    App(Box<MuppTerm>, Box<MuppTerm>),
    /// `xi#a` — weak-evaluator register, never part of source programs.
    Xi(String),
}

/// Syntactic stratum a term lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Core,
    /// Uses at least one of `\1`, `\2`, `\'`, `mu'`.
    Modified,
    /// Contains a `xi#a` register.
    XiExtended,
}

pub fn var(x: impl Into<String>) -> MuppTerm {
    MuppTerm::Var(x.into())
}
pub fn mvar(a: impl Into<String>) -> MuppTerm {
    MuppTerm::MuVar(a.into())
}
pub fn lam(x: impl Into<String>, b: MuppTerm) -> MuppTerm {
    MuppTerm::Lam(x.into(), Box::new(b))
}
pub fn lam1(x: impl Into<String>, b: MuppTerm) -> MuppTerm {
    MuppTerm::Lam1(x.into(), Box::new(b))
}
pub fn lamv(x: impl Into<String>, b: MuppTerm) -> MuppTerm {
    MuppTerm::LamVac(x.into(), Box::new(b))
}
pub fn mu(a: impl Into<String>, b: MuppTerm) -> MuppTerm {
    MuppTerm::Mu(a.into(), Box::new(b))
}
pub fn muv(a: impl Into<String>, b: MuppTerm) -> MuppTerm {
    MuppTerm::MuVac(a.into(), Box::new(b))
}
pub fn app(f: MuppTerm, a: MuppTerm) -> MuppTerm {
    MuppTerm::App(Box::new(f), Box::new(a))
}
pub fn apps(f: MuppTerm, args: impl IntoIterator<Item = MuppTerm>) -> MuppTerm {
    args.into_iter().fold(f, app)
}
pub fn xi(a: impl Into<String>) -> MuppTerm {
    MuppTerm::Xi(a.into())
}

impl MuppTerm {
    pub fn level(&self) -> Level {
        match self {
            MuppTerm::Var(_) | MuppTerm::MuVar(_) => Level::Core,
            MuppTerm::Xi(_) => Level::XiExtended,
            MuppTerm::Lam2 => Level::Modified,
            MuppTerm::Lam(_, b) | MuppTerm::Mu(_, b) => b.level(),
            MuppTerm::Lam1(_, b) | MuppTerm::LamVac(_, b) | MuppTerm::MuVac(_, b) => {
                b.level().max(Level::Modified)
            }
            MuppTerm::App(f, a) => f.level().max(a.level()),
        }
    }

    pub fn free_lvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_l(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_l(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            MuppTerm::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => {}
            MuppTerm::Lam(x, b) | MuppTerm::Lam1(x, b) | MuppTerm::LamVac(x, b) => {
                bound.push(x.clone());
                b.collect_free_l(bound, out);
                bound.pop();
            }
            MuppTerm::Mu(_, b) | MuppTerm::MuVac(_, b) => b.collect_free_l(bound, out),
            MuppTerm::App(f, a) => {
                f.collect_free_l(bound, out);
                a.collect_free_l(bound, out);
            }
        }
    }

    /// Free μ-variables; `xi#a` counts as a free occurrence of `a`.
    pub fn free_mvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_m(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_m(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            MuppTerm::Var(_) | MuppTerm::Lam2 => {}
            MuppTerm::MuVar(a) | MuppTerm::Xi(a) => {
                if !bound.iter().any(|b| b == a) {
                    out.insert(a.clone());
                }
            }
            MuppTerm::Lam(_, b) | MuppTerm::Lam1(_, b) | MuppTerm::LamVac(_, b) => {
                b.collect_free_m(bound, out)
            }
            MuppTerm::Mu(a, b) | MuppTerm::MuVac(a, b) => {
                bound.push(a.clone());
                b.collect_free_m(bound, out);
                bound.pop();
            }
            MuppTerm::App(f, a) => {
                f.collect_free_m(bound, out);
                a.collect_free_m(bound, out);
            }
        }
    }

    /// Number of free occurrences of the λ-variable `x`.
    pub fn count_free_l(&self, x: &str) -> usize {
        match self {
            MuppTerm::Var(y) => usize::from(y == x),
            MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => 0,
            MuppTerm::Lam(y, b) | MuppTerm::Lam1(y, b) | MuppTerm::LamVac(y, b) => {
                if y == x {
                    0
                } else {
                    b.count_free_l(x)
                }
            }
            MuppTerm::Mu(_, b) | MuppTerm::MuVac(_, b) => b.count_free_l(x),
            MuppTerm::App(f, a) => f.count_free_l(x) + a.count_free_l(x),
        }
    }

    /// Well-formedness: binder annotations must be honest and `#delta`
    /// cannot be bound.
    pub fn wf(&self) -> Result<(), SyntaxError> {
        match self {
            MuppTerm::Var(_) | MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => Ok(()),
            MuppTerm::Lam(_, b) => b.wf(),
            MuppTerm::Lam1(x, b) => {
                let n = b.count_free_l(x);
                if n != 1 {
                    return Err(SyntaxError::new(format!(
                        "\\1{x}: binder must occur exactly once in the body, found {n}"
                    )));
                }
                b.wf()
            }
            MuppTerm::LamVac(x, b) => {
                if b.count_free_l(x) != 0 {
                    return Err(SyntaxError::new(format!(
                        "\\'{x}: binder must not occur in the body"
                    )));
                }
                b.wf()
            }
            MuppTerm::Mu(a, b) => {
                if a == DELTA {
                    return Err(SyntaxError::new(
                        "#delta is a mu-constant; it cannot be bound by mu",
                    ));
                }
                b.wf()
            }
            MuppTerm::MuVac(a, b) => {
                if a == DELTA {
                    return Err(SyntaxError::new(
                        "#delta is a mu-constant; it cannot be bound by mu'",
                    ));
                }
                if b.free_mvars().contains(a) {
                    return Err(SyntaxError::new(format!(
                        "mu'#{a}: binder must not occur in the body"
                    )));
                }
                b.wf()
            }
            MuppTerm::App(f, a) => {
                f.wf()?;
                a.wf()
            }
        }
    }

    pub(crate) fn with_body(&self, b: MuppTerm) -> MuppTerm {
        match self {
            MuppTerm::Lam(x, _) => lam(x.clone(), b),
            MuppTerm::Lam1(x, _) => lam1(x.clone(), b),
            MuppTerm::LamVac(x, _) => lamv(x.clone(), b),
            MuppTerm::Mu(a, _) => mu(a.clone(), b),
            MuppTerm::MuVac(a, _) => muv(a.clone(), b),
            _ => unreachable!("with_body on non-binder"),
        }
    }

    fn with_binder_body(&self, binder: String, b: MuppTerm) -> MuppTerm {
        match self {
            MuppTerm::Lam(..) => lam(binder, b),
            MuppTerm::Lam1(..) => lam1(binder, b),
            MuppTerm::LamVac(..) => lamv(binder, b),
            MuppTerm::Mu(..) => mu(binder, b),
            MuppTerm::MuVac(..) => muv(binder, b),
            _ => unreachable!("with_binder_body on non-binder"),
        }
    }

    /// Capture-avoiding substitution of `v` for the free λ-variable `x`.
    pub fn subst_l(&self, x: &str, v: &MuppTerm) -> MuppTerm {
        match self {
            MuppTerm::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => self.clone(),
            MuppTerm::Lam(y, b) | MuppTerm::Lam1(y, b) | MuppTerm::LamVac(y, b) => {
                if y == x || !b.free_lvars().contains(x) {
                    return self.clone();
                }
                if v.free_lvars().contains(y) {
                    let avoid: BTreeSet<String> =
                        v.free_lvars().union(&b.free_lvars()).cloned().collect();
                    let y2 = names::fresh(y, |c| avoid.contains(c) || c == x);
                    let b2 = b.subst_l(y, &MuppTerm::Var(y2.clone()));
                    self.with_binder_body(y2, b2.subst_l(x, v))
                } else {
                    self.with_body(b.subst_l(x, v))
                }
            }
            MuppTerm::Mu(a, b) | MuppTerm::MuVac(a, b) => {
                if !b.free_lvars().contains(x) {
                    return self.clone();
                }
                if v.free_mvars().contains(a) {
                    let avoid: BTreeSet<String> =
                        v.free_mvars().union(&self.free_mvars()).cloned().collect();
                    let a2 = names::fresh(a, |c| avoid.contains(c) || c == DELTA);
                    let b2 = b.subst_m(a, &MuppTerm::MuVar(a2.clone()));
                    self.with_binder_body(a2, b2.subst_l(x, v))
                } else {
                    self.with_body(b.subst_l(x, v))
                }
            }
            MuppTerm::App(f, a) => app(f.subst_l(x, v), a.subst_l(x, v)),
        }
    }

    /// Capture-avoiding substitution of `v` for the free μ-variable `a`.
    /// A `xi#a` register is re-pointed only when `v` is itself a μ-variable;
    /// other replacements leave it untouched (registers are evaluator-internal
    /// and the weak evaluator works on terms with pairwise-distinct binders).
    pub fn subst_m(&self, a: &str, v: &MuppTerm) -> MuppTerm {
        match self {
            MuppTerm::Var(_) | MuppTerm::Lam2 => self.clone(),
            MuppTerm::MuVar(b) => {
                if b == a {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            MuppTerm::Xi(b) => {
                if b == a {
                    if let MuppTerm::MuVar(c) = v {
                        xi(c.clone())
                    } else {
                        self.clone()
                    }
                } else {
                    self.clone()
                }
            }
            MuppTerm::Lam(y, b) | MuppTerm::Lam1(y, b) | MuppTerm::LamVac(y, b) => {
                if !b.free_mvars().contains(a) {
                    return self.clone();
                }
                if v.free_lvars().contains(y) {
                    let avoid: BTreeSet<String> =
                        v.free_lvars().union(&b.free_lvars()).cloned().collect();
                    let y2 = names::fresh(y, |c| avoid.contains(c));
                    let b2 = b.subst_l(y, &MuppTerm::Var(y2.clone()));
                    self.with_binder_body(y2, b2.subst_m(a, v))
                } else {
                    self.with_body(b.subst_m(a, v))
                }
            }
            MuppTerm::Mu(c, b) | MuppTerm::MuVac(c, b) => {
                if c == a || !b.free_mvars().contains(a) {
                    return self.clone();
                }
                if v.free_mvars().contains(c) {
                    let avoid: BTreeSet<String> =
                        v.free_mvars().union(&self.free_mvars()).cloned().collect();
                    let c2 = names::fresh(c, |x| avoid.contains(x) || x == a || x == DELTA);
                    let b2 = b.subst_m(c, &MuppTerm::MuVar(c2.clone()));
                    self.with_binder_body(c2, b2.subst_m(a, v))
                } else {
                    self.with_body(b.subst_m(a, v))
                }
            }
            MuppTerm::App(f, g) => app(f.subst_m(a, v), g.subst_m(a, v)),
        }
    }

    /// α-invariant canonical form (depth-indexed reserved binder names).
    pub fn canonical(&self) -> MuppTerm {
        fn resolve(env: &[(String, String)], x: &str) -> String {
            env.iter()
                .rev()
                .find(|(o, _)| o == x)
                .map(|(_, n)| n.clone())
                .unwrap_or_else(|| x.to_string())
        }
        fn go(
            t: &MuppTerm,
            lm: &mut Vec<(String, String)>,
            mm: &mut Vec<(String, String)>,
            d: usize,
        ) -> MuppTerm {
            match t {
                MuppTerm::Var(x) => MuppTerm::Var(resolve(lm, x)),
                MuppTerm::MuVar(a) => MuppTerm::MuVar(resolve(mm, a)),
                MuppTerm::Xi(a) => MuppTerm::Xi(resolve(mm, a)),
                MuppTerm::Lam2 => MuppTerm::Lam2,
                MuppTerm::Lam(..) | MuppTerm::Lam1(..) | MuppTerm::LamVac(..) => {
                    let (x, b) = t.binder_body();
                    let nx = format!("$l{d}");
                    lm.push((x.to_string(), nx.clone()));
                    let nb = go(b, lm, mm, d + 1);
                    lm.pop();
                    t.with_binder_body(nx, nb)
                }
                MuppTerm::Mu(..) | MuppTerm::MuVac(..) => {
                    let (a, b) = t.binder_body();
                    let na = format!("$m{d}");
                    mm.push((a.to_string(), na.clone()));
                    let nb = go(b, lm, mm, d + 1);
                    mm.pop();
                    t.with_binder_body(na, nb)
                }
                MuppTerm::App(f, a) => app(go(f, lm, mm, d), go(a, lm, mm, d)),
            }
        }
        go(self, &mut Vec::new(), &mut Vec::new(), 0)
    }

    fn binder_body(&self) -> (&str, &MuppTerm) {
        match self {
            MuppTerm::Lam(x, b)
            | MuppTerm::Lam1(x, b)
            | MuppTerm::LamVac(x, b)
            | MuppTerm::Mu(x, b)
            | MuppTerm::MuVac(x, b) => (x, b),
            _ => unreachable!("binder_body on non-binder"),
        }
    }

    pub fn alpha_eq(&self, other: &MuppTerm) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn canon_key(&self) -> String {
        self.canonical().to_string()
    }

    /// Rename every binder to a globally fresh name, so binders are pairwise
    /// distinct and distinct from all free names of the term.
    pub fn barendregt(&self) -> MuppTerm {
        let mut avoid: BTreeSet<String> = self.free_lvars();
        avoid.extend(self.free_mvars());
        avoid.insert(DELTA.to_string());
        fn resolve(env: &[(String, String)], x: &str) -> String {
            env.iter()
                .rev()
                .find(|(o, _)| o == x)
                .map(|(_, n)| n.clone())
                .unwrap_or_else(|| x.to_string())
        }
        fn go(
            t: &MuppTerm,
            lm: &mut Vec<(String, String)>,
            mm: &mut Vec<(String, String)>,
            avoid: &BTreeSet<String>,
        ) -> MuppTerm {
            match t {
                MuppTerm::Var(x) => MuppTerm::Var(resolve(lm, x)),
                MuppTerm::MuVar(a) => MuppTerm::MuVar(resolve(mm, a)),
                MuppTerm::Xi(a) => MuppTerm::Xi(resolve(mm, a)),
                MuppTerm::Lam2 => MuppTerm::Lam2,
                MuppTerm::Lam(..) | MuppTerm::Lam1(..) | MuppTerm::LamVac(..) => {
                    let (x, b) = t.binder_body();
                    let nx = names::fresh(x, |c| avoid.contains(c));
                    lm.push((x.to_string(), nx.clone()));
                    let nb = go(b, lm, mm, avoid);
                    lm.pop();
                    t.with_binder_body(nx, nb)
                }
                MuppTerm::Mu(..) | MuppTerm::MuVac(..) => {
                    let (a, b) = t.binder_body();
                    let na = names::fresh(a, |c| avoid.contains(c));
                    mm.push((a.to_string(), na.clone()));
                    let nb = go(b, lm, mm, avoid);
                    mm.pop();
                    t.with_binder_body(na, nb)
                }
                MuppTerm::App(f, a) => app(go(f, lm, mm, avoid), go(a, lm, mm, avoid)),
            }
        }
        go(self, &mut Vec::new(), &mut Vec::new(), &avoid)
    }

    pub fn subterm_at(&self, path: &Path) -> Option<&MuppTerm> {
        let mut t = self;
        for &i in &path.0 {
            t = match (t, i) {
                (MuppTerm::Lam(_, b), 0)
                | (MuppTerm::Lam1(_, b), 0)
                | (MuppTerm::LamVac(_, b), 0)
                | (MuppTerm::Mu(_, b), 0)
                | (MuppTerm::MuVac(_, b), 0)
                | (MuppTerm::App(b, _), 0) => b,
                (MuppTerm::App(_, a), 1) => a,
                _ => return None,
            };
        }
        Some(t)
    }

    pub fn replace_at(&self, path: &[u8], new: MuppTerm) -> MuppTerm {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match (self, i) {
                (MuppTerm::Lam(..), 0)
                | (MuppTerm::Lam1(..), 0)
                | (MuppTerm::LamVac(..), 0)
                | (MuppTerm::Mu(..), 0)
                | (MuppTerm::MuVac(..), 0) => {
                    let (_, b) = self.binder_body();
                    self.with_body(b.replace_at(rest, new))
                }
                (MuppTerm::App(f, a), 0) => app(f.replace_at(rest, new), (**a).clone()),
                (MuppTerm::App(f, a), 1) => app((**f).clone(), a.replace_at(rest, new)),
                _ => panic!("replace_at: invalid path"),
            },
        }
    }

    pub fn size(&self) -> usize {
        match self {
            MuppTerm::Var(_) | MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => 1,
            MuppTerm::Lam(_, b)
            | MuppTerm::Lam1(_, b)
            | MuppTerm::LamVac(_, b)
            | MuppTerm::Mu(_, b)
            | MuppTerm::MuVac(_, b) => 1 + b.size(),
            MuppTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn contains_xi(&self) -> bool {
        match self {
            MuppTerm::Xi(_) => true,
            MuppTerm::Var(_) | MuppTerm::MuVar(_) | MuppTerm::Lam2 => false,
            MuppTerm::Lam(_, b)
            | MuppTerm::Lam1(_, b)
            | MuppTerm::LamVac(_, b)
            | MuppTerm::Mu(_, b)
            | MuppTerm::MuVac(_, b) => b.contains_xi(),
            MuppTerm::App(f, a) => f.contains_xi() || a.contains_xi(),
        }
    }
}

impl fmt::Display for MuppTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn elem(t: &MuppTerm, last: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let binder_form = matches!(
                t,
                MuppTerm::Lam(..)
                    | MuppTerm::Lam1(..)
                    | MuppTerm::LamVac(..)
                    | MuppTerm::Mu(..)
                    | MuppTerm::MuVac(..)
            );
            if binder_form && !last {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            MuppTerm::Var(x) => write!(f, "{x}"),
            MuppTerm::MuVar(a) => write!(f, "#{a}"),
            MuppTerm::Xi(a) => write!(f, "xi#{a}"),
            MuppTerm::Lam2 => write!(f, "\\2"),
            MuppTerm::Lam(x, b) => write!(f, "\\{x}.{b}"),
            MuppTerm::Lam1(x, b) => write!(f, "\\1{x}.{b}"),
            MuppTerm::LamVac(x, b) => write!(f, "\\'{x}.{b}"),
            MuppTerm::Mu(a, b) => write!(f, "mu #{a}.{b}"),
            MuppTerm::MuVac(a, b) => write!(f, "mu'#{a}.{b}"),
            MuppTerm::App(..) => {
                let mut spine = vec![];
                let mut t = self;
                while let MuppTerm::App(g, a) = t {
                    spine.push(&**a);
                    t = g;
                }
                spine.push(t);
                spine.reverse();
                write!(f, "(")?;
                let n = spine.len();
                for (i, s) in spine.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    elem(s, i == n - 1, f)?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let t = mu("a", app(mvar("a"), var("x")));
        assert_eq!(t.to_string(), "mu #a.(#a x)");
        let t = apps(MuppTerm::Lam2, [lam1("x", var("x")), lamv("y", var("z"))]);
        assert_eq!(t.to_string(), "(\\2 (\\1x.x) \\'y.z)");
        assert_eq!(muv("a", xi("b")).to_string(), "mu'#a.xi#b");
    }

    #[test]
    fn levels() {
        assert_eq!(mu("a", mvar("a")).level(), Level::Core);
        assert_eq!(lam1("x", var("x")).level(), Level::Modified);
        assert_eq!(app(xi("a"), lam1("x", var("x"))).level(), Level::XiExtended);
    }

    #[test]
    fn wf_annotations() {
        assert!(lam1("x", var("x")).wf().is_ok());
        assert!(lam1("x", app(var("x"), var("x"))).wf().is_err());
        assert!(lam1("x", var("y")).wf().is_err());
        assert!(lamv("x", var("y")).wf().is_ok());
        assert!(lamv("x", var("x")).wf().is_err());
        assert!(muv("a", var("x")).wf().is_ok());
        assert!(muv("a", mvar("a")).wf().is_err());
        assert!(muv("a", xi("a")).wf().is_err(), "xi counts as an occurrence");
        assert!(mu("delta", var("x")).wf().is_err());
    }

    #[test]
    fn subst_m_basics() {
        // (mu #b.(#a #b))[#a := \y.(#c y)]
        let t = mu("b", app(mvar("a"), mvar("b")));
        let v = lam("y", app(mvar("c"), var("y")));
        let s = t.subst_m("a", &v);
        assert_eq!(s, mu("b", app(v.clone(), mvar("b"))));
        // Shadowing: (mu #a.#a)[#a := v] unchanged.
        let t = mu("a", mvar("a"));
        assert_eq!(t.subst_m("a", &v), t);
        // μ-capture: (mu #c.(#a #c))[#a := #c] renames the binder.
        let t = mu("c", app(mvar("a"), mvar("c")));
        let s = t.subst_m("a", &mvar("c"));
        match &s {
            MuppTerm::Mu(b, body) => {
                assert_ne!(b, "c");
                assert_eq!(**body, app(mvar("c"), mvar(b.clone())));
            }
            other => panic!("unexpected shape {other}"),
        }
    }

    #[test]
    fn subst_m_lambda_capture() {
        // (\y.(#a y))[#a := \z.(y z)] must not capture the free y.
        let t = lam("y", app(mvar("a"), var("y")));
        let v = lam("z", app(var("y"), var("z")));
        let s = t.subst_m("a", &v);
        assert!(s.alpha_eq(&lam("w", app(v.clone(), var("w")))), "got {s}");
    }

    #[test]
    fn xi_substitution() {
        let t = app(xi("a"), mvar("a"));
        // Replacing #a by a μ-variable re-points the register too.
        assert_eq!(t.subst_m("a", &mvar("b")), app(xi("b"), mvar("b")));
        // Replacing by a non-variable leaves the register alone.
        let id = lam("x", var("x"));
        assert_eq!(t.subst_m("a", &id), app(xi("a"), id));
    }

    #[test]
    fn alpha_and_canonical() {
        let t1 = mu("a", lam("x", app(mvar("a"), var("x"))));
        let t2 = mu("q", lam("z", app(mvar("q"), var("z"))));
        assert!(t1.alpha_eq(&t2));
        assert!(!t1.alpha_eq(&mu("q", lam("z", app(mvar("b"), var("z"))))));
        // Annotations are significant.
        assert!(!lam("x", var("y")).alpha_eq(&lamv("x", var("y"))));
    }

    #[test]
    fn barendregt_distinct_binders() {
        let t = mu("a", app(mu("a", mvar("a")), lam("x", lam("x", var("x")))));
        let b = t.barendregt();
        assert!(b.alpha_eq(&t));
        fn binders(t: &MuppTerm, out: &mut Vec<String>) {
            match t {
                MuppTerm::Lam(x, b)
                | MuppTerm::Lam1(x, b)
                | MuppTerm::LamVac(x, b)
                | MuppTerm::Mu(x, b)
                | MuppTerm::MuVac(x, b) => {
                    out.push(x.clone());
                    binders(b, out);
                }
                MuppTerm::App(f, a) => {
                    binders(f, out);
                    binders(a, out);
                }
                _ => {}
            }
        }
        let mut bs = vec![];
        binders(&b, &mut bs);
        let n = bs.len();
        bs.sort();
        bs.dedup();
        assert_eq!(bs.len(), n, "binders must be pairwise distinct");
    }
}
