//! λμ terms: `x | \x.t | (t u) | mu #a.[#b]t`.
//!
//! A naming `[#b]t` occurs only immediately under a `mu` binder, so the two
//! are fused into a single [`LmuTerm::Mu`] node carrying binder, naming name
//! and naming body. μ-variables never occur bare in this calculus; their only
//! occurrences are naming names. A `mu` binder scopes over the whole named
//! term, including its own naming name (`mu #a.[#a]t` names its own binder).

use std::collections::BTreeSet;
use std::fmt;

use crate::names::{self, DELTA};
use crate::syntax::{Path, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LmuTerm {
    Var(String),
    Lam(String, Box<LmuTerm>),
    App(Box<LmuTerm>, Box<LmuTerm>),
    /// `mu #binder.[#name]body`
    Mu {
        binder: String,
        name: String,
        body: Box<LmuTerm>,
    },
}

pub fn var(x: impl Into<String>) -> LmuTerm {
    LmuTerm::Var(x.into())
}
pub fn lam(x: impl Into<String>, b: LmuTerm) -> LmuTerm {
    LmuTerm::Lam(x.into(), Box::new(b))
}
pub fn app(f: LmuTerm, a: LmuTerm) -> LmuTerm {
    LmuTerm::App(Box::new(f), Box::new(a))
}
/// Left-associated application spine `(f a1 a2 ...)`.
pub fn apps(f: LmuTerm, args: impl IntoIterator<Item = LmuTerm>) -> LmuTerm {
    args.into_iter().fold(f, app)
}
pub fn mu(binder: impl Into<String>, name: impl Into<String>, body: LmuTerm) -> LmuTerm {
    LmuTerm::Mu {
        binder: binder.into(),
        name: name.into(),
        body: Box::new(body),
    }
}

impl LmuTerm {
    /// Free λ-variables.
    pub fn free_lvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_l(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_l(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            LmuTerm::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            LmuTerm::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free_l(bound, out);
                bound.pop();
            }
            LmuTerm::App(f, a) => {
                f.collect_free_l(bound, out);
                a.collect_free_l(bound, out);
            }
            LmuTerm::Mu { body, .. } => body.collect_free_l(bound, out),
        }
    }

    /// Free μ-variables (naming names not bound by an enclosing `mu`).
    pub fn free_mvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_m(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_m(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            LmuTerm::Var(_) => {}
            LmuTerm::Lam(_, b) => b.collect_free_m(bound, out),
            LmuTerm::App(f, a) => {
                f.collect_free_m(bound, out);
                a.collect_free_m(bound, out);
            }
            LmuTerm::Mu { binder, name, body } => {
                bound.push(binder.clone());
                if !bound.iter().any(|b| b == name) {
                    out.insert(name.clone());
                }
                body.collect_free_m(bound, out);
                bound.pop();
            }
        }
    }

    /// Well-formedness: `#delta` is a μ-constant and can never be bound.
    pub fn wf(&self) -> Result<(), SyntaxError> {
        match self {
            LmuTerm::Var(_) => Ok(()),
            LmuTerm::Lam(_, b) => b.wf(),
            LmuTerm::App(f, a) => {
                f.wf()?;
                a.wf()
            }
            LmuTerm::Mu { binder, body, .. } => {
                if binder == DELTA {
                    return Err(SyntaxError::new(
                        "#delta is a mu-constant; it cannot be bound by mu",
                    ));
                }
                body.wf()
            }
        }
    }

    /// Capture-avoiding substitution of `v` for the free λ-variable `x`.
    pub fn subst_l(&self, x: &str, v: &LmuTerm) -> LmuTerm {
        match self {
            LmuTerm::Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            LmuTerm::Lam(y, b) => {
                if y == x || !b.free_lvars().contains(x) {
                    return self.clone();
                }
                if v.free_lvars().contains(y) {
                    let avoid: BTreeSet<String> =
                        v.free_lvars().union(&b.free_lvars()).cloned().collect();
                    let y2 = names::fresh(y, |c| avoid.contains(c) || c == x);
                    let b2 = b.subst_l(y, &LmuTerm::Var(y2.clone()));
                    lam(y2, b2.subst_l(x, v))
                } else {
                    lam(y.clone(), b.subst_l(x, v))
                }
            }
            LmuTerm::App(f, a) => app(f.subst_l(x, v), a.subst_l(x, v)),
            LmuTerm::Mu { binder, name, body } => {
                if !body.free_lvars().contains(x) {
                    return self.clone();
                }
                if v.free_mvars().contains(binder) {
                    let avoid: BTreeSet<String> =
                        v.free_mvars().union(&self.free_mvars()).cloned().collect();
                    let b2 = names::fresh(binder, |c| avoid.contains(c) || c == DELTA);
                    let renamed = self.rename_bound_mu(&b2);
                    renamed.subst_l(x, v)
                } else {
                    mu(binder.clone(), name.clone(), body.subst_l(x, v))
                }
            }
        }
    }

    /// Rename this `Mu` node's binder to `b2` (assumed fresh for the node).
    pub(crate) fn rename_bound_mu(&self, b2: &str) -> LmuTerm {
        match self {
            LmuTerm::Mu { binder, name, body } => {
                let n2 = if name == binder { b2.to_string() } else { name.clone() };
                mu(b2, n2, body.rename_mu(binder, b2))
            }
            _ => unreachable!("rename_bound_mu on non-mu node"),
        }
    }

    /// Capture-avoiding renaming of the free μ-variable `from` to `to`
    /// (μ-variable "substitution" in this calculus is always a renaming).
    pub fn rename_mu(&self, from: &str, to: &str) -> LmuTerm {
        if from == to {
            return self.clone();
        }
        match self {
            LmuTerm::Var(_) => self.clone(),
            LmuTerm::Lam(y, b) => lam(y.clone(), b.rename_mu(from, to)),
            LmuTerm::App(f, a) => app(f.rename_mu(from, to), a.rename_mu(from, to)),
            LmuTerm::Mu { binder, name, body } => {
                if binder == from {
                    return self.clone();
                }
                let inside_has_from = name == from || body.free_mvars().contains(from);
                if !inside_has_from {
                    return self.clone();
                }
                if binder == to {
                    let avoid: BTreeSet<String> = self.free_mvars();
                    let b2 = names::fresh(binder, |c| {
                        avoid.contains(c) || c == from || c == to || c == DELTA
                    });
                    return self.rename_bound_mu(&b2).rename_mu(from, to);
                }
                let n2 = if name == from { to.to_string() } else { name.clone() };
                mu(binder.clone(), n2, body.rename_mu(from, to))
            }
        }
    }

    /// Structural substitution `[a :=* v]`: every naming `[#a]w` whose name
    /// resolves to the free μ-variable `a` becomes `[#a](w v)`, inductively.
    /// Capture-avoiding in `v`'s free variables.
    pub fn struct_subst(&self, a: &str, v: &LmuTerm) -> LmuTerm {
        if !self.free_mvars().contains(a) {
            return self.clone();
        }
        match self {
            LmuTerm::Var(_) => self.clone(),
            LmuTerm::Lam(y, b) => {
                if v.free_lvars().contains(y) {
                    let avoid: BTreeSet<String> =
                        v.free_lvars().union(&b.free_lvars()).cloned().collect();
                    let y2 = names::fresh(y, |c| avoid.contains(c));
                    lam(y2.clone(), b.subst_l(y, &LmuTerm::Var(y2)).struct_subst(a, v))
                } else {
                    lam(y.clone(), b.struct_subst(a, v))
                }
            }
            LmuTerm::App(f, g) => app(f.struct_subst(a, v), g.struct_subst(a, v)),
            LmuTerm::Mu { binder, name, body } => {
                // binder == a is impossible here: `a` is free in this node.
                if v.free_mvars().contains(binder) {
                    let avoid: BTreeSet<String> =
                        v.free_mvars().union(&self.free_mvars()).cloned().collect();
                    let b2 = names::fresh(binder, |c| avoid.contains(c) || c == a || c == DELTA);
                    return self.rename_bound_mu(&b2).struct_subst(a, v);
                }
                let body2 = body.struct_subst(a, v);
                if name == a {
                    mu(binder.clone(), name.clone(), app(body2, v.clone()))
                } else {
                    mu(binder.clone(), name.clone(), body2)
                }
            }
        }
    }

    /// α-invariant canonical form: binders are renamed to reserved
    /// depth-indexed names (`$l0`, `$m1`, ...), free variables kept.
    /// `alpha_eq(t, u)` iff `t.canonical() == u.canonical()`.
    pub fn canonical(&self) -> LmuTerm {
        fn go(t: &LmuTerm, lm: &mut Vec<(String, String)>, mm: &mut Vec<(String, String)>, d: usize) -> LmuTerm {
            match t {
                LmuTerm::Var(x) => LmuTerm::Var(
                    lm.iter().rev().find(|(o, _)| o == x).map(|(_, n)| n.clone()).unwrap_or_else(|| x.clone()),
                ),
                LmuTerm::Lam(x, b) => {
                    let nx = format!("$l{d}");
                    lm.push((x.clone(), nx.clone()));
                    let nb = go(b, lm, mm, d + 1);
                    lm.pop();
                    lam(nx, nb)
                }
                LmuTerm::App(f, a) => app(go(f, lm, mm, d), go(a, lm, mm, d)),
                LmuTerm::Mu { binder, name, body } => {
                    let nb = format!("$m{d}");
                    mm.push((binder.clone(), nb.clone()));
                    let nn = mm.iter().rev().find(|(o, _)| o == name).map(|(_, n)| n.clone()).unwrap_or_else(|| name.clone());
                    let nbody = go(body, lm, mm, d + 1);
                    mm.pop();
                    mu(nb, nn, nbody)
                }
            }
        }
        go(self, &mut Vec::new(), &mut Vec::new(), 0)
    }

    pub fn alpha_eq(&self, other: &LmuTerm) -> bool {
        self.canonical() == other.canonical()
    }

    /// Printed canonical form, usable as a hash/equality key for α-classes.
    pub fn canon_key(&self) -> String {
        self.canonical().to_string()
    }

    pub fn subterm_at(&self, path: &Path) -> Option<&LmuTerm> {
        let mut t = self;
        for &i in &path.0 {
            t = match (t, i) {
                (LmuTerm::Lam(_, b), 0) => b,
                (LmuTerm::App(f, _), 0) => f,
                (LmuTerm::App(_, a), 1) => a,
                (LmuTerm::Mu { body, .. }, 0) => body,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Replace the subterm at `path` by `new` (panics on an invalid path,
    /// which would be an engine bug).
    pub fn replace_at(&self, path: &[u8], new: LmuTerm) -> LmuTerm {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match (self, i) {
                (LmuTerm::Lam(x, b), 0) => lam(x.clone(), b.replace_at(rest, new)),
                (LmuTerm::App(f, a), 0) => app(f.replace_at(rest, new), (**a).clone()),
                (LmuTerm::App(f, a), 1) => app((**f).clone(), a.replace_at(rest, new)),
                (LmuTerm::Mu { binder, name, body }, 0) => {
                    mu(binder.clone(), name.clone(), body.replace_at(rest, new))
                }
                _ => panic!("replace_at: invalid path"),
            },
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LmuTerm::Var(_) => 1,
            LmuTerm::Lam(_, b) => 1 + b.size(),
            LmuTerm::App(f, a) => 1 + f.size() + a.size(),
            LmuTerm::Mu { body, .. } => 1 + body.size(),
        }
    }
}

impl fmt::Display for LmuTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn elem(t: &LmuTerm, last: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let binder_form = matches!(t, LmuTerm::Lam(..) | LmuTerm::Mu { .. });
            if binder_form && !last {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            LmuTerm::Var(x) => write!(f, "{x}"),
            LmuTerm::Lam(x, b) => write!(f, "\\{x}.{b}"),
            LmuTerm::Mu { binder, name, body } => write!(f, "mu #{binder}.[#{name}]{body}"),
            LmuTerm::App(..) => {
                let mut spine = vec![];
                let mut t = self;
                while let LmuTerm::App(g, a) = t {
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

    fn x() -> LmuTerm {
        var("x")
    }

    #[test]
    fn display_forms() {
        let t = apps(var("f"), [x(), var("y")]);
        assert_eq!(t.to_string(), "(f x y)");
        let t = app(lam("x", x()), var("y"));
        assert_eq!(t.to_string(), "((\\x.x) y)");
        let t = app(var("y"), lam("x", x()));
        assert_eq!(t.to_string(), "(y \\x.x)");
        let t = mu("a", "b", app(x(), var("y")));
        assert_eq!(t.to_string(), "mu #a.[#b](x y)");
    }

    #[test]
    fn free_vars() {
        let t = lam("x", mu("a", "b", app(x(), var("y"))));
        assert_eq!(t.free_lvars().into_iter().collect::<Vec<_>>(), ["y"]);
        assert_eq!(t.free_mvars().into_iter().collect::<Vec<_>>(), ["b"]);
        let t = mu("a", "a", x());
        assert!(t.free_mvars().is_empty(), "own-binder naming is bound");
    }

    #[test]
    fn subst_l_captures() {
        // (\y.(x y))[x := y] must not capture the free y.
        let t = lam("y", app(x(), var("y")));
        let s = t.subst_l("x", &var("y"));
        assert!(s.alpha_eq(&lam("z", app(var("y"), var("z")))), "got {s}");
        // Shadowing: (\x.x)[x := y] unchanged.
        let t = lam("x", x());
        assert_eq!(t.subst_l("x", &var("y")), t);
    }

    #[test]
    fn subst_l_mu_capture() {
        // (mu #a.[#b](x z))[x := mu #c.[#a]z] must not capture #a.
        let v = mu("c", "a", var("z"));
        let t = mu("a", "b", app(x(), var("z")));
        let s = t.subst_l("x", &v);
        // Expected: mu #a2.[#b]((mu #c.[#a]z) z) with a2 != a
        let want = mu("q", "b", app(app(mu("c", "a", var("z")), var("z")), var("z")));
        // (sanity: structure only — build the real expectation by hand)
        let _ = want;
        match &s {
            LmuTerm::Mu { binder, name, body } => {
                assert_ne!(binder, "a");
                assert_eq!(name, "b");
                assert!(body.free_mvars().contains("a"), "inner [#a] must stay free: {s}");
            }
            other => panic!("unexpected shape {other}"),
        }
    }

    #[test]
    fn rename_mu_cases() {
        // mu #c.[#a]x with a -> b
        let t = mu("c", "a", x());
        assert_eq!(t.rename_mu("a", "b"), mu("c", "b", x()));
        // Shadowed: mu #a.[#a]x unchanged when renaming free a.
        let t = mu("a", "a", x());
        assert_eq!(t.rename_mu("a", "b"), t);
        // Capture: mu #b.[#a]x with a -> b must rename the binder first.
        let t = mu("b", "a", x());
        let s = t.rename_mu("a", "b");
        match &s {
            LmuTerm::Mu { binder, name, .. } => {
                assert_ne!(binder, "b");
                assert_eq!(name, "b");
            }
            other => panic!("unexpected shape {other}"),
        }
        assert!(s.alpha_eq(&mu("c", "b", x())));
    }

    #[test]
    fn struct_subst_example() {
        // [a :=* v] inside mu #b.[#a](x mu #c.[#a]y): both namings extend.
        let t = mu("b", "a", app(x(), mu("c", "a", var("y"))));
        let v = var("v");
        let s = t.struct_subst("a", &v);
        let want = mu(
            "b",
            "a",
            app(app(x(), mu("c", "a", app(var("y"), v.clone()))), v.clone()),
        );
        assert_eq!(s, want);
        // Shadowed inner binder: mu #a.[#a]x is untouched.
        let t = mu("b", "a", app(x(), mu("a", "a", var("y"))));
        let s = t.struct_subst("a", &v);
        let want = mu("b", "a", app(app(x(), mu("a", "a", var("y"))), v.clone()));
        assert_eq!(s, want);
    }

    #[test]
    fn canonical_and_alpha() {
        let t1 = lam("x", mu("a", "a", app(x(), var("f"))));
        let t2 = lam("z", mu("q", "q", app(var("z"), var("f"))));
        assert!(t1.alpha_eq(&t2));
        assert_eq!(t1.canon_key(), t2.canon_key());
        let t3 = lam("z", mu("q", "q", app(var("z"), var("g"))));
        assert!(!t1.alpha_eq(&t3), "free names are significant");
        // Free variables named like canonical binders cannot be conflated.
        let free = lam("x", var("zfree"));
        let bound = lam("x", x());
        assert!(!free.alpha_eq(&bound));
    }

    #[test]
    fn wf_rejects_bound_delta() {
        assert!(mu("delta", "a", x()).wf().is_err());
        assert!(mu("a", "delta", x()).wf().is_ok(), "free delta naming is fine");
    }

    #[test]
    fn paths() {
        let t = app(lam("x", x()), var("y"));
        assert_eq!(t.subterm_at(&Path(vec![0, 0])), Some(&x()));
        let r = t.replace_at(&[1], var("z"));
        assert_eq!(r, app(lam("x", x()), var("z")));
    }
}
