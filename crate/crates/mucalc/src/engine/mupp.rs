//! Non-deterministic reduction for λμ++ (C_λ, C_μ, S1–S6) and the weak
//! ξ-register evaluator.

use std::collections::BTreeSet;
use std::fmt;

use crate::engine::{explore, Budget, Exploration, ValueSet};
use crate::names::{self, DELTA};
use crate::syntax::mupp::{app, lam, lam1, mu, xi, MuppTerm};
use crate::syntax::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuppMode {
    /// Plain λμ++ syntax; S2 substitutes id = \x.x, C_μ/S4/S5 build \y.
    Core,
    /// Modified syntax: S2 substitutes \2, C_μ/S4/S5 build \1 abstractions,
    /// and C_λ leaves `(\2 v)` inert.
    Modified,
    /// Weak evaluator: C_λ…S5 (core builders) plus the six ξ-rules, no S6.
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuppRule {
    CLam,
    CMu,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    /// μα u ⇀ (ξα u)
    Xi0,
    /// (ξα \'x.u) ⇀ (ξα u) — vacuity decided on the fly
    XiLamVac,
    /// (ξα mu'#b.u) ⇀ (ξα u) — vacuity decided on the fly
    XiMuVac,
    /// (ξα (α v)) ⇀ v
    XiHit,
    /// (ξα (u v)) ⇀ (ξα u), u ≠ α
    XiLeft,
    /// (ξα (u v)) ⇀ (ξα v), u ≠ α
    XiRight,
}

impl MuppRule {
    pub fn label(self) -> &'static str {
        match self {
            MuppRule::CLam => "C_lam",
            MuppRule::CMu => "C_mu",
            MuppRule::S1 => "S1",
            MuppRule::S2 => "S2",
            MuppRule::S3 => "S3",
            MuppRule::S4 => "S4",
            MuppRule::S5 => "S5",
            MuppRule::S6 => "S6",
            MuppRule::Xi0 => "xi0",
            MuppRule::XiLamVac => "xi_lam",
            MuppRule::XiMuVac => "xi_mu",
            MuppRule::XiHit => "xi_hit",
            MuppRule::XiLeft => "xi_left",
            MuppRule::XiRight => "xi_right",
        }
    }
}

impl fmt::Display for MuppRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One enabled rule instance. `at` identifies the redex (for S6 it is the
/// matched `(α v)` occurrence); `replace_at` is the rewritten subterm's
/// position (S6 rewrites the enclosing μ-term).
#[derive(Debug, Clone)]
pub struct MuppRedex {
    pub rule: MuppRule,
    pub at: Path,
    pub replace_at: Path,
    pub reduct: MuppTerm,
}

impl MuppRedex {
    pub fn apply(&self, root: &MuppTerm) -> MuppTerm {
        root.replace_at(&self.replace_at.0, self.reduct.clone())
    }
}

fn is_lam_family(t: &MuppTerm) -> bool {
    matches!(
        t,
        MuppTerm::Lam(..) | MuppTerm::Lam1(..) | MuppTerm::Lam2 | MuppTerm::LamVac(..)
    )
}

/// View Mu and MuVac uniformly as (binder, body).
fn as_mu(t: &MuppTerm) -> Option<(&str, &MuppTerm)> {
    match t {
        MuppTerm::Mu(a, b) | MuppTerm::MuVac(a, b) => Some((a, b)),
        _ => None,
    }
}

/// The one-argument abstraction a rule builds: `\1` in modified mode.
fn mk_abs(mode: MuppMode, y: String, body: MuppTerm) -> MuppTerm {
    if mode == MuppMode::Modified {
        lam1(y, body)
    } else {
        lam(y, body)
    }
}

/// The identity S2 substitutes: `\2` in modified mode, `\x.x` otherwise.
fn id_term(mode: MuppMode) -> MuppTerm {
    if mode == MuppMode::Modified {
        MuppTerm::Lam2
    } else {
        lam("x", MuppTerm::Var("x".into()))
    }
}

/// (C_μ) body for `(mu #a.u  v)`: `mu #b.u[a := \y.(#b (y v))]`, b, y fresh.
fn cmu_reduct(a: &str, u: &MuppTerm, v: &MuppTerm, mode: MuppMode) -> MuppTerm {
    let avoid_m: BTreeSet<String> = u.free_mvars().union(&v.free_mvars()).cloned().collect();
    let b = names::fresh("b", |c| avoid_m.contains(c) || c == a || c == DELTA);
    let avoid_l = v.free_lvars();
    let y = names::fresh("y", |c| avoid_l.contains(c));
    let repl = mk_abs(
        mode,
        y.clone(),
        app(MuppTerm::MuVar(b.clone()), app(MuppTerm::Var(y), v.clone())),
    );
    mu(b, u.subst_m(a, &repl))
}

/// (S4) body for `(#b  mu #a.u)`: `u[a := \y.(#b y)]`, y fresh.
fn s4_reduct(b: &str, a: &str, u: &MuppTerm, mode: MuppMode) -> MuppTerm {
    let y = names::fresh("y", |_| false);
    let repl = mk_abs(
        mode,
        y.clone(),
        app(MuppTerm::MuVar(b.to_string()), MuppTerm::Var(y)),
    );
    u.subst_m(a, &repl)
}

/// (S5) reduct for `mu #a.u`: `\z.mu #b.u[a := \y.(#b (y z))]`, z, b, y fresh.
fn s5_reduct(a: &str, u: &MuppTerm, mode: MuppMode) -> MuppTerm {
    let avoid_m = u.free_mvars();
    let b = names::fresh("b", |c| avoid_m.contains(c) || c == a || c == DELTA);
    let avoid_l = u.free_lvars();
    let z = names::fresh("z", |c| avoid_l.contains(c));
    let y = names::fresh("y", |c| c == z);
    let repl = mk_abs(
        mode,
        y.clone(),
        app(
            MuppTerm::MuVar(b.clone()),
            app(MuppTerm::Var(y), MuppTerm::Var(z.clone())),
        ),
    );
    lam(z, mu(b, u.subst_m(a, &repl)))
}

/// Does `u` contain an occurrence `(#a \x.v)` referencing the enclosing
/// binder `a`? (side condition of S5)
fn has_applied_lam(u: &MuppTerm, a: &str) -> bool {
    match u {
        MuppTerm::Var(_) | MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => false,
        MuppTerm::Lam(_, b) | MuppTerm::Lam1(_, b) | MuppTerm::LamVac(_, b) => {
            has_applied_lam(b, a)
        }
        MuppTerm::Mu(c, b) | MuppTerm::MuVac(c, b) => c != a && has_applied_lam(b, a),
        MuppTerm::App(f, g) => {
            (matches!(&**f, MuppTerm::MuVar(c) if c == a) && is_lam_family(g))
                || has_applied_lam(f, a)
                || has_applied_lam(g, a)
        }
    }
}

/// Enumerate S6 occurrences inside the body `u` of `mu #a.u` at `mu_at`:
/// subterms `(#a v)` with #a referencing that binder, a ∉ free μ-vars of v,
/// and no free variable of v bound between u's root and the occurrence.
fn s6_redexes(mu_at: &Path, a: &str, u: &MuppTerm, out: &mut Vec<MuppRedex>) {
    fn walk(
        t: &MuppTerm,
        at: Path,
        a: &str,
        lbinders: &mut Vec<String>,
        mbinders: &mut Vec<String>,
        mu_at: &Path,
        out: &mut Vec<MuppRedex>,
    ) {
        match t {
            MuppTerm::Var(_) | MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => {}
            MuppTerm::Lam(x, b) | MuppTerm::Lam1(x, b) | MuppTerm::LamVac(x, b) => {
                lbinders.push(x.clone());
                walk(b, at.child(0), a, lbinders, mbinders, mu_at, out);
                lbinders.pop();
            }
            MuppTerm::Mu(c, b) | MuppTerm::MuVac(c, b) => {
                if c == a {
                    return; // a shadowed below
                }
                mbinders.push(c.clone());
                walk(b, at.child(0), a, lbinders, mbinders, mu_at, out);
                mbinders.pop();
            }
            MuppTerm::App(f, v) => {
                if matches!(&**f, MuppTerm::MuVar(c) if c == a) {
                    let fm = v.free_mvars();
                    let eligible = !fm.contains(a)
                        && v.free_lvars().iter().all(|x| !lbinders.contains(x))
                        && fm.iter().all(|m| !mbinders.contains(m));
                    if eligible {
                        out.push(MuppRedex {
                            rule: MuppRule::S6,
                            at: at.clone(),
                            replace_at: mu_at.clone(),
                            reduct: (**v).clone(),
                        });
                    }
                }
                walk(f, at.child(0), a, lbinders, mbinders, mu_at, out);
                walk(v, at.child(1), a, lbinders, mbinders, mu_at, out);
            }
        }
    }
    walk(u, mu_at.child(0), a, &mut Vec::new(), &mut Vec::new(), mu_at, out);
}

/// Is the binder of this λ or μ' node vacuous (never occurs in the body)?
/// Explicit `\'`/`mu'` nodes are vacuous by construction.
fn lam_vacuous(t: &MuppTerm) -> Option<&MuppTerm> {
    match t {
        MuppTerm::LamVac(_, b) => Some(b),
        MuppTerm::Lam(x, b) if !b.free_lvars().contains(x) => Some(b),
        _ => None,
    }
}

fn mu_vacuous(t: &MuppTerm) -> Option<&MuppTerm> {
    match t {
        MuppTerm::MuVac(_, b) => Some(b),
        MuppTerm::Mu(a, b) if !b.free_mvars().contains(a) => Some(b),
        _ => None,
    }
}

/// All enabled redexes of `t`, in pre-order (leftmost-outermost first).
pub fn redexes_mupp(t: &MuppTerm, mode: MuppMode) -> Vec<MuppRedex> {
    fn push(out: &mut Vec<MuppRedex>, rule: MuppRule, at: &Path, reduct: MuppTerm) {
        out.push(MuppRedex { rule, at: at.clone(), replace_at: at.clone(), reduct });
    }
    fn walk(t: &MuppTerm, at: Path, mode: MuppMode, out: &mut Vec<MuppRedex>) {
        match t {
            MuppTerm::Var(_) | MuppTerm::MuVar(_) | MuppTerm::Xi(_) | MuppTerm::Lam2 => {}
            MuppTerm::Lam(_, b) | MuppTerm::Lam1(_, b) | MuppTerm::LamVac(_, b) => {
                walk(b, at.child(0), mode, out)
            }
            MuppTerm::Mu(..) | MuppTerm::MuVac(..) => {
                let (a, u) = as_mu(t).unwrap();
                if let Some((b, inner)) = as_mu(u) {
                    push(out, MuppRule::S2, &at, t.with_body(inner.subst_m(b, &id_term(mode))));
                }
                if has_applied_lam(u, a) {
                    push(out, MuppRule::S5, &at, s5_reduct(a, u, mode));
                }
                if mode != MuppMode::Weak {
                    s6_redexes(&at, a, u, out);
                }
                if mode == MuppMode::Weak && matches!(t, MuppTerm::Mu(..)) {
                    push(out, MuppRule::Xi0, &at, app(xi(a.to_string()), u.clone()));
                }
                walk(u, at.child(0), mode, out);
            }
            MuppTerm::App(f, v) => {
                match &**f {
                    MuppTerm::Lam(x, u) | MuppTerm::Lam1(x, u) => {
                        push(out, MuppRule::CLam, &at, u.subst_l(x, v));
                    }
                    MuppTerm::LamVac(_, u) => push(out, MuppRule::CLam, &at, (**u).clone()),
                    // In the modified calculus `(\2 v)` is inert: its circle
                    // image `mu #g.[#delta]v°` has no λμ+ redex either, and
                    // the join property depends on the two staying in step.
                    MuppTerm::Lam2 if mode != MuppMode::Modified => {
                        push(out, MuppRule::CLam, &at, (**v).clone());
                    }
                    MuppTerm::Lam2 => {}
                    MuppTerm::Mu(..) | MuppTerm::MuVac(..) => {
                        let (a, u) = as_mu(f).unwrap();
                        push(out, MuppRule::CMu, &at, cmu_reduct(a, u, v, mode));
                    }
                    MuppTerm::App(h, _) if matches!(&**h, MuppTerm::MuVar(_)) => {
                        push(out, MuppRule::S1, &at, (**f).clone());
                    }
                    MuppTerm::MuVar(b) => {
                        if matches!(&**v, MuppTerm::App(h, _) if matches!(&**h, MuppTerm::MuVar(_)))
                        {
                            push(out, MuppRule::S3, &at, (**v).clone());
                        }
                        if let Some((a, u)) = as_mu(v) {
                            push(out, MuppRule::S4, &at, s4_reduct(b, a, u, mode));
                        }
                    }
                    MuppTerm::Xi(a) if mode == MuppMode::Weak => {
                        if let Some(b) = lam_vacuous(v) {
                            push(out, MuppRule::XiLamVac, &at, app(xi(a.clone()), b.clone()));
                        }
                        if let Some(b) = mu_vacuous(v) {
                            push(out, MuppRule::XiMuVac, &at, app(xi(a.clone()), b.clone()));
                        }
                        if let MuppTerm::App(h, w) = &**v {
                            if matches!(&**h, MuppTerm::MuVar(c) if c == a) {
                                push(out, MuppRule::XiHit, &at, (**w).clone());
                            } else {
                                push(out, MuppRule::XiLeft, &at, app(xi(a.clone()), (**h).clone()));
                                push(out, MuppRule::XiRight, &at, app(xi(a.clone()), (**w).clone()));
                            }
                        }
                    }
                    _ => {}
                }
                walk(f, at.child(0), mode, out);
                walk(v, at.child(1), mode, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(t, Path::root(), mode, &mut out);
    out
}

/// Replay one enumerated redex identified by (rule, at).
pub fn step_mupp(t: &MuppTerm, rule: MuppRule, at: &Path, mode: MuppMode) -> Option<MuppTerm> {
    redexes_mupp(t, mode)
        .into_iter()
        .find(|r| r.rule == rule && &r.at == at)
        .map(|r| r.apply(t))
}

pub type MuppStep = (MuppRule, Path, MuppTerm);

/// Leftmost-outermost reduction (one deterministic path through the
/// non-deterministic graph). Returns final term, trace, reached-normal flag.
pub fn normalize_mupp(t: &MuppTerm, mode: MuppMode, fuel: usize) -> (MuppTerm, Vec<MuppStep>, bool) {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    for _ in 0..fuel {
        let rs = redexes_mupp(&cur, mode);
        match rs.into_iter().next() {
            None => return (cur, steps, true),
            Some(r) => {
                let next = r.apply(&cur);
                steps.push((r.rule, r.at, next.clone()));
                cur = next;
            }
        }
    }
    let done = redexes_mupp(&cur, mode).is_empty();
    (cur, steps, done)
}

/// Breadth-first reduction graph under the given mode.
pub fn explore_mupp(t: &MuppTerm, mode: MuppMode, budget: &Budget) -> Exploration<MuppTerm> {
    explore(
        t,
        |u| u.canon_key(),
        |u| {
            redexes_mupp(u, mode)
                .into_iter()
                .map(|r| (r.rule.label(), r.apply(u)))
                .collect()
        },
        budget,
    )
}

/// Full-engine value set (reachable normal forms).
pub fn values_mupp(t: &MuppTerm, mode: MuppMode, budget: &Budget) -> ValueSet<MuppTerm> {
    ValueSet::from_exploration(&explore_mupp(t, mode, budget))
}

/// Weak evaluation: rename apart, explore C_λ…S5 plus the ξ-rules; results
/// are reachable normal terms containing no ξ register. Returns the raw
/// exploration (whose states may contain ξ) alongside the filtered values.
pub fn weak_values(t: &MuppTerm, budget: &Budget) -> (Exploration<MuppTerm>, ValueSet<MuppTerm>) {
    let exp = explore_mupp(&t.barendregt(), MuppMode::Weak, budget);
    let mut vs = ValueSet::from_exploration(&exp);
    vs.normals.retain(|n| !n.contains_xi());
    (exp, vs)
}
