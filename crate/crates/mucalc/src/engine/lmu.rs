//! Reduction for λμ (rules c_λ, c_μ, s1, s2, s3) and λμ+ (adds →′).

use std::fmt;

use crate::engine::{explore, Budget, Exploration};
use crate::names;
use crate::syntax::lmu::{app, lam, mu, LmuTerm};
use crate::syntax::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmuMode {
    /// Plain λμ: c_λ, c_μ, s1, s2, s3.
    Mu,
    /// λμ+: additionally the non-deterministic →′.
    MuPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmuRule {
    CLam,
    CMu,
    S1naming,
    S2vacuous,
    S3eta,
    Prime,
}

impl LmuRule {
    pub fn label(self) -> &'static str {
        match self {
            LmuRule::CLam => "c_lam",
            LmuRule::CMu => "c_mu",
            LmuRule::S1naming => "s1",
            LmuRule::S2vacuous => "s2",
            LmuRule::S3eta => "s3",
            LmuRule::Prime => "prime",
        }
    }
}

impl fmt::Display for LmuRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One enabled rule instance. `at` identifies the redex (for →′ it is the
/// matched naming occurrence); `replace_at` is the rewritten subterm's
/// position (→′ rewrites the enclosing μ-term); `reduct` is the local
/// replacement written there.
#[derive(Debug, Clone)]
pub struct LmuRedex {
    pub rule: LmuRule,
    pub at: Path,
    pub replace_at: Path,
    pub reduct: LmuTerm,
}

impl LmuRedex {
    /// The whole term after contracting this redex.
    pub fn apply(&self, root: &LmuTerm) -> LmuTerm {
        root.replace_at(&self.replace_at.0, self.reduct.clone())
    }
}

/// (c_μ) body of `(mu #a.[#n]w  v)`: `mu #a.([#n]w)[a :=* v]`.
fn cmu_reduct(m: &LmuTerm, v: &LmuTerm) -> LmuTerm {
    let m = if let LmuTerm::Mu { binder, .. } = m {
        if v.free_mvars().contains(binder) {
            let avoid: std::collections::BTreeSet<String> =
                v.free_mvars().union(&m.free_mvars()).cloned().collect();
            let b2 = names::fresh(binder, |c| avoid.contains(c) || c == names::DELTA);
            m.rename_bound_mu(&b2)
        } else {
            m.clone()
        }
    } else {
        unreachable!("cmu_reduct on non-mu head")
    };
    match m {
        LmuTerm::Mu { binder, name, body } => {
            let body2 = body.struct_subst(&binder, v);
            if name == binder {
                mu(binder, name, app(body2, v.clone()))
            } else {
                mu(binder, name, body2)
            }
        }
        _ => unreachable!(),
    }
}

/// (s1) `[#n](mu #b.[#c]u)` → `([#c]u)[b := n]`, as the new named part of
/// the outer μ.
fn s1_reduct(outer_binder: &str, n: &str, inner: &LmuTerm) -> LmuTerm {
    match inner {
        LmuTerm::Mu { binder: b, name: c, body: u } => {
            let name2 = if c == b { n.to_string() } else { c.clone() };
            mu(outer_binder, name2, u.rename_mu(b, n))
        }
        _ => unreachable!("s1_reduct on non-mu body"),
    }
}

/// Does the named term of a μ with binder `a` contain a naming `[#a]\y.w`?
/// (side condition of s3; `top_name`/`top_body` are the μ's own naming)
fn has_naming_of_lam(top_name: &str, top_body: &LmuTerm, a: &str) -> bool {
    fn scan(t: &LmuTerm, a: &str) -> bool {
        match t {
            LmuTerm::Var(_) => false,
            LmuTerm::Lam(_, b) => scan(b, a),
            LmuTerm::App(f, g) => scan(f, a) || scan(g, a),
            LmuTerm::Mu { binder, name, body } => {
                if binder == a {
                    return false;
                }
                (name == a && matches!(**body, LmuTerm::Lam(..))) || scan(body, a)
            }
        }
    }
    (top_name == a && matches!(top_body, LmuTerm::Lam(..))) || scan(top_body, a)
}

/// (s3) `mu #a.[#n]w` → `\x.mu #a.([#n]w)[a :=* x]` with x fresh.
fn s3_reduct(a: &str, n: &str, w: &LmuTerm) -> LmuTerm {
    let avoid = w.free_lvars();
    let x = names::fresh("x", |c| avoid.contains(c));
    let w2 = w.struct_subst(a, &LmuTerm::Var(x.clone()));
    let named = if n == a { app(w2, LmuTerm::Var(x.clone())) } else { w2 };
    lam(x, mu(a, n, named))
}

/// Enumerate →′ occurrences inside the body `w` of `mu #alpha.[#beta]w`
/// (at absolute path `mu_at`): namings `[#alpha]v` such that alpha is not
/// free in v and no free variable of v is bound between w's root and the
/// occurrence (including the occurrence's own μ-binder).
fn prime_redexes(mu_at: &Path, alpha: &str, w: &LmuTerm, out: &mut Vec<LmuRedex>) {
    fn walk(
        t: &LmuTerm,
        at: Path,
        alpha: &str,
        lbinders: &mut Vec<String>,
        mbinders: &mut Vec<String>,
        mu_at: &Path,
        out: &mut Vec<LmuRedex>,
    ) {
        match t {
            LmuTerm::Var(_) => {}
            LmuTerm::Lam(x, b) => {
                lbinders.push(x.clone());
                walk(b, at.child(0), alpha, lbinders, mbinders, mu_at, out);
                lbinders.pop();
            }
            LmuTerm::App(f, g) => {
                walk(f, at.child(0), alpha, lbinders, mbinders, mu_at, out);
                walk(g, at.child(1), alpha, lbinders, mbinders, mu_at, out);
            }
            LmuTerm::Mu { binder: g, name, body: v } => {
                if g == alpha {
                    // alpha is shadowed below (including this node's naming).
                    return;
                }
                if name == alpha {
                    let fm = v.free_mvars();
                    let eligible = !fm.contains(alpha)
                        && v.free_lvars().iter().all(|x| !lbinders.contains(x))
                        && fm.iter().all(|m| m != g && !mbinders.contains(m));
                    if eligible {
                        out.push(LmuRedex {
                            rule: LmuRule::Prime,
                            at: at.clone(),
                            replace_at: mu_at.clone(),
                            reduct: (**v).clone(),
                        });
                    }
                }
                mbinders.push(g.clone());
                walk(v, at.child(0), alpha, lbinders, mbinders, mu_at, out);
                mbinders.pop();
            }
        }
    }
    walk(
        w,
        mu_at.child(0),
        alpha,
        &mut Vec::new(),
        &mut Vec::new(),
        mu_at,
        out,
    );
}

/// All enabled redexes of `t`, in pre-order (leftmost-outermost first).
pub fn redexes_lmu(t: &LmuTerm, mode: LmuMode) -> Vec<LmuRedex> {
    fn walk(t: &LmuTerm, at: Path, mode: LmuMode, out: &mut Vec<LmuRedex>) {
        match t {
            LmuTerm::Var(_) => {}
            LmuTerm::Lam(_, b) => walk(b, at.child(0), mode, out),
            LmuTerm::App(f, v) => {
                match &**f {
                    LmuTerm::Lam(x, u) => out.push(LmuRedex {
                        rule: LmuRule::CLam,
                        at: at.clone(),
                        replace_at: at.clone(),
                        reduct: u.subst_l(x, v),
                    }),
                    LmuTerm::Mu { .. } => out.push(LmuRedex {
                        rule: LmuRule::CMu,
                        at: at.clone(),
                        replace_at: at.clone(),
                        reduct: cmu_reduct(f, v),
                    }),
                    _ => {}
                }
                walk(f, at.child(0), mode, out);
                walk(v, at.child(1), mode, out);
            }
            LmuTerm::Mu { binder, name, body } => {
                if matches!(**body, LmuTerm::Mu { .. }) {
                    out.push(LmuRedex {
                        rule: LmuRule::S1naming,
                        at: at.clone(),
                        replace_at: at.clone(),
                        reduct: s1_reduct(binder, name, body),
                    });
                }
                if name == binder && !body.free_mvars().contains(binder) {
                    out.push(LmuRedex {
                        rule: LmuRule::S2vacuous,
                        at: at.clone(),
                        replace_at: at.clone(),
                        reduct: (**body).clone(),
                    });
                }
                if has_naming_of_lam(name, body, binder) {
                    out.push(LmuRedex {
                        rule: LmuRule::S3eta,
                        at: at.clone(),
                        replace_at: at.clone(),
                        reduct: s3_reduct(binder, name, body),
                    });
                }
                if mode == LmuMode::MuPlus {
                    prime_redexes(&at, binder, body, out);
                }
                walk(body, at.child(0), mode, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(t, Path::root(), mode, &mut out);
    out
}

/// Replay one enumerated redex identified by (rule, at).
pub fn step_lmu(t: &LmuTerm, rule: LmuRule, at: &Path, mode: LmuMode) -> Option<LmuTerm> {
    redexes_lmu(t, mode)
        .into_iter()
        .find(|r| r.rule == rule && &r.at == at)
        .map(|r| r.apply(t))
}

/// One normalization step: (rule, identifying position, new whole term).
pub type LmuStep = (LmuRule, Path, LmuTerm);

/// Leftmost-outermost normalization. Returns the final term, the trace and
/// whether a normal form was reached within `fuel` steps.
pub fn normalize_lmu(t: &LmuTerm, mode: LmuMode, fuel: usize) -> (LmuTerm, Vec<LmuStep>, bool) {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    for _ in 0..fuel {
        let rs = redexes_lmu(&cur, mode);
        match rs.into_iter().next() {
            None => return (cur, steps, true),
            Some(r) => {
                let next = r.apply(&cur);
                steps.push((r.rule, r.at, next.clone()));
                cur = next;
            }
        }
    }
    let done = redexes_lmu(&cur, mode).is_empty();
    (cur, steps, done)
}

/// Breadth-first reduction graph of `t` under the given mode.
pub fn explore_lmu(t: &LmuTerm, mode: LmuMode, budget: &Budget) -> Exploration<LmuTerm> {
    explore(
        t,
        |u| u.canon_key(),
        |u| {
            redexes_lmu(u, mode)
                .into_iter()
                .map(|r| (r.rule.label(), r.apply(u)))
                .collect()
        },
        budget,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ValueSet;
    use crate::syntax::parse::parse_lmu;

    fn p(s: &str) -> LmuTerm {
        parse_lmu(s).unwrap_or_else(|e| panic!("parse {s}: {e}"))
    }

    /// θ = \x.\f.mu #a.[#a](f mu #b.[#a](f x)) — the λμ-normal integer-like
    /// closed term with two namings of the same μ-variable.
    fn theta() -> LmuTerm {
        p("\\x.\\f.mu #a.[#a](f mu #b.[#a](f x))")
    }

    #[test]
    fn clam_simple() {
        let rs = redexes_lmu(&p("((\\x.x) y)"), LmuMode::Mu);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].rule, LmuRule::CLam);
        assert_eq!(rs[0].apply(&p("((\\x.x) y)")), p("y"));
    }

    #[test]
    fn cmu_extends_namings() {
        // (mu #a.[#a]x z) → mu #a.[#a](x z) by c_μ (the μ-subterm also has
        // a vacuous-naming s2 redex of its own).
        let t = p("((mu #a.[#a]x) z)");
        let rs = redexes_lmu(&t, LmuMode::Mu);
        let cmu: Vec<_> = rs.iter().filter(|r| r.rule == LmuRule::CMu).collect();
        assert_eq!(cmu.len(), 1);
        assert!(cmu[0].apply(&t).alpha_eq(&p("mu #a.[#a](x z)")));
        // Naming under a different name is untouched; nested namings extend.
        let t = p("((mu #a.[#b](x mu #c.[#a]y)) z)");
        let rs = redexes_lmu(&t, LmuMode::Mu);
        assert_eq!(rs.len(), 1);
        let got = rs[0].apply(&t);
        assert!(got.alpha_eq(&p("mu #a.[#b](x mu #c.[#a](y z))")), "got {got}");
    }

    #[test]
    fn s1_renames() {
        let t = p("mu #a.[#b]mu #c.[#d]x");
        let rs = redexes_lmu(&t, LmuMode::Mu);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].rule, LmuRule::S1naming);
        assert!(rs[0].apply(&t).alpha_eq(&p("mu #a.[#d]x")));
        // Inner naming referencing the inner binder follows the rename.
        let t = p("mu #a.[#b]mu #c.[#c](x mu #d.[#c]y)");
        let rs = redexes_lmu(&t, LmuMode::Mu);
        let s1: Vec<_> = rs.iter().filter(|r| r.rule == LmuRule::S1naming).collect();
        assert_eq!(s1.len(), 1);
        assert!(s1[0].apply(&t).alpha_eq(&p("mu #a.[#b](x mu #d.[#b]y)")));
    }

    #[test]
    fn s2_vacuous() {
        let t = p("mu #a.[#a]x");
        let rs = redexes_lmu(&t, LmuMode::Mu);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].rule, LmuRule::S2vacuous);
        assert_eq!(rs[0].apply(&t), p("x"));
        // Not vacuous: #a occurs inside.
        let t = p("mu #a.[#a]mu #b.[#a]x");
        assert!(redexes_lmu(&t, LmuMode::Mu).iter().all(|r| r.rule != LmuRule::S2vacuous));
    }

    #[test]
    fn s3_eta_like() {
        let t = p("mu #a.[#a]\\y.y");
        let rs = redexes_lmu(&t, LmuMode::Mu);
        let s3: Vec<_> = rs.iter().filter(|r| r.rule == LmuRule::S3eta).collect();
        assert_eq!(s3.len(), 1);
        assert!(s3[0].apply(&t).alpha_eq(&p("\\z.mu #a.[#a]((\\y.y) z)")));
        // Naming of a non-lambda does not enable s3.
        let t = p("mu #a.[#a](x y)");
        assert!(redexes_lmu(&t, LmuMode::Mu).iter().all(|r| r.rule != LmuRule::S3eta));
    }

    #[test]
    fn theta_is_normal_in_lmu() {
        assert!(redexes_lmu(&theta(), LmuMode::Mu).is_empty());
    }

    #[test]
    fn theta_prime_redex() {
        // In λμ+, θ has exactly one redex: →′ extracting the inner (f x).
        let rs = redexes_lmu(&theta(), LmuMode::MuPlus);
        assert_eq!(rs.len(), 1, "{rs:?}");
        assert_eq!(rs[0].rule, LmuRule::Prime);
        let one = p("\\x.\\f.(f x)");
        assert!(rs[0].apply(&theta()).alpha_eq(&one));
    }

    #[test]
    fn prime_capture_condition() {
        // mu #a.[#b]\y.mu #c.[#a](x y): the occurrence's body (x y) has y
        // bound on the path — ineligible.
        let t = p("mu #a.[#b]\\y.mu #c.[#a](x y)");
        assert!(redexes_lmu(&t, LmuMode::MuPlus).iter().all(|r| r.rule != LmuRule::Prime));
        // Same shape with a free variable instead: eligible.
        let t = p("mu #a.[#b]\\y.mu #c.[#a](x z)");
        let rs: Vec<_> = redexes_lmu(&t, LmuMode::MuPlus)
            .into_iter()
            .filter(|r| r.rule == LmuRule::Prime)
            .collect();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].apply(&t), p("(x z)"));
        // The occurrence's own binder also blocks: in
        // mu #a.[#b](x mu #c.[#a]mu #d.[#c]y) the naming [#a](mu #d.[#c]y)
        // is ineligible for the root μ because its body references #c, the
        // occurrence's own binder. (The inner mu #c has its own →′ redex.)
        let t = p("mu #a.[#b](x mu #c.[#a]mu #d.[#c]y)");
        assert!(redexes_lmu(&t, LmuMode::MuPlus)
            .iter()
            .all(|r| !(r.rule == LmuRule::Prime && r.replace_at.is_root())));
    }

    #[test]
    fn mu_redexes_subset_of_mu_plus() {
        for s in [
            "((\\x.x) y)",
            "((mu #a.[#a]x) z)",
            "mu #a.[#a]\\y.y",
            "\\x.\\f.mu #a.[#a](f mu #b.[#a](f x))",
        ] {
            let t = p(s);
            let mu_rules: Vec<_> =
                redexes_lmu(&t, LmuMode::Mu).iter().map(|r| (r.rule, r.at.clone())).collect();
            let plus: Vec<_> = redexes_lmu(&t, LmuMode::MuPlus)
                .iter()
                .map(|r| (r.rule, r.at.clone()))
                .collect();
            for k in &mu_rules {
                assert!(plus.contains(k), "{s}: {k:?} missing in mu_plus");
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let (nf, steps, done) = normalize_lmu(&p("((\\x.\\y.(y x)) a)"), LmuMode::Mu, 10);
        assert!(done);
        assert_eq!(steps.len(), 1);
        assert!(nf.alpha_eq(&p("\\y.(y a)")));
        // c_μ gives mu #a.[#a](x z), whose naming is then vacuous: s2
        // finishes the job.
        let (nf, steps, done) = normalize_lmu(&p("((mu #a.[#a]x) z)"), LmuMode::Mu, 10);
        assert!(done);
        assert_eq!(
            steps.iter().map(|(r, _, _)| *r).collect::<Vec<_>>(),
            vec![LmuRule::CMu, LmuRule::S2vacuous]
        );
        assert!(steps[0].2.alpha_eq(&p("mu #a.[#a](x z)")));
        assert!(nf.alpha_eq(&p("(x z)")));
        // Fuel exhaustion on a looping term is reported, not an error.
        let omega = p("((\\x.(x x)) \\x.(x x))");
        let (_, steps, done) = normalize_lmu(&omega, LmuMode::Mu, 5);
        assert!(!done);
        assert_eq!(steps.len(), 5);
    }

    #[test]
    fn values_theta_mu_plus() {
        let exp = explore_lmu(&theta(), LmuMode::MuPlus, &Budget::unbounded());
        let vs = ValueSet::from_exploration(&exp);
        assert!(vs.exhaustive);
        assert_eq!(vs.normals.len(), 1);
        assert!(vs.normals[0].alpha_eq(&p("\\x.\\f.(f x)")));
    }

    #[test]
    fn prime_reduct_is_a_subterm() {
        // Every →′ reduct is α-equivalent to a subterm of the original.
        for s in [
            "\\x.\\f.mu #a.[#a](f mu #b.[#a](f x))",
            "mu #a.[#b](x mu #c.[#a](y z))",
        ] {
            let t = p(s);
            for r in redexes_lmu(&t, LmuMode::MuPlus) {
                if r.rule != LmuRule::Prime {
                    continue;
                }
                fn subterms(t: &LmuTerm, out: &mut Vec<LmuTerm>) {
                    out.push(t.clone());
                    match t {
                        LmuTerm::Var(_) => {}
                        LmuTerm::Lam(_, b) | LmuTerm::Mu { body: b, .. } => subterms(b, out),
                        LmuTerm::App(f, a) => {
                            subterms(f, out);
                            subterms(a, out);
                        }
                    }
                }
                let mut subs = Vec::new();
                subterms(&t, &mut subs);
                assert!(
                    subs.iter().any(|s| s.alpha_eq(&r.reduct)),
                    "{s}: reduct {} not a subterm",
                    r.reduct
                );
            }
        }
    }
}
