//! Validation of explicit derivations against the two typing systems.
//!
//! `validate` walks a derivation bottom-up, rebuilding the subject term and
//! checking every rule locally: context merging with consistency, the
//! freshness side conditions of the quantifier introductions, the bounded
//! equational congruence for rule 8, and the two-case named μ rule. Errors
//! carry the rule number, the premise path from the root, and a reason.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::names::DELTA;
use crate::syntax::{lmu, lmu::LmuTerm, mupp, mupp::MuppTerm};
use crate::typing::derivation::{AxVar, Deriv};
use crate::typing::fo::{eq_modulo, Equations, DEFAULT_EQ_DEPTH};
use crate::typing::formula::{all_ind, all_pred, imp, Formula};
use crate::typing::System;

/// Options for validation.
#[derive(Debug, Clone)]
pub struct TypingOpts {
    /// Accept the fixed-point rule (forfeits strong normalization).
    pub y_rule: bool,
    /// Search depth for the equational congruence of rule 8.
    pub eq_depth: usize,
}

impl Default for TypingOpts {
    fn default() -> Self {
        TypingOpts { y_rule: false, eq_depth: DEFAULT_EQ_DEPTH }
    }
}

/// The subject term of a judgment.
#[derive(Debug, Clone)]
pub enum Subject {
    Lmu(LmuTerm),
    Mupp(MuppTerm),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Lmu(t) => write!(f, "{t}"),
            Subject::Mupp(t) => write!(f, "{t}"),
        }
    }
}

impl Subject {
    pub fn as_lmu(&self) -> Option<&LmuTerm> {
        match self {
            Subject::Lmu(t) => Some(t),
            Subject::Mupp(_) => None,
        }
    }
    pub fn as_mupp(&self) -> Option<&MuppTerm> {
        match self {
            Subject::Mupp(t) => Some(t),
            Subject::Lmu(_) => None,
        }
    }
}

/// A typing judgment of either system. For the non-deterministic system the
/// `mu` map holds the full negated formulas (`α : ¬B`); for the
/// deterministic system it is the named right-hand side `Δ` (`α : B`).
#[derive(Debug, Clone)]
pub struct Judgment {
    pub system: System,
    pub lam: BTreeMap<String, Formula>,
    pub mu: BTreeMap<String, Formula>,
    pub subject: Subject,
    pub formula: Formula,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (x, a) in &self.lam {
            if wrote {
                write!(f, ", ")?;
            }
            write!(f, "{x} : {a}")?;
            wrote = true;
        }
        match self.system {
            System::Mupp => {
                for (a, b) in &self.mu {
                    if wrote {
                        write!(f, ", ")?;
                    }
                    write!(f, "#{a} : {b}")?;
                    wrote = true;
                }
                if wrote {
                    write!(f, " ")?;
                }
                write!(f, "|-' {} : {}", self.subject, self.formula)
            }
            System::Lmu => {
                if wrote {
                    write!(f, " ")?;
                }
                write!(f, "|- {} : {}", self.subject, self.formula)?;
                for (a, b) in &self.mu {
                    write!(f, " , #{a} : {b}")?;
                }
                Ok(())
            }
        }
    }
}

/// The result of validation: the root judgment, flagged when the
/// fixed-point rule was used anywhere in the tree.
#[derive(Debug, Clone)]
pub struct Checked {
    pub judgment: Judgment,
    /// True when a `yfix` node occurs: strong normalization is forfeited.
    pub used_y: bool,
}

/// A per-node validation failure.
#[derive(Debug, Clone, thiserror::Error)]
pub struct TypeError {
    /// Rule number as printed ("1".."9", or "Y").
    pub rule: &'static str,
    /// JSON rule tag of the offending node.
    pub tag: &'static str,
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub msg: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "rule {}: {}", self.rule, self.msg)
        } else {
            let p: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, "rule {} at {}: {}", self.rule, p.join("."), self.msg)
        }
    }
}

fn rule_no(d: &Deriv) -> &'static str {
    match d {
        Deriv::Ax { .. } => "1",
        Deriv::ImpI { .. } => "2",
        Deriv::ImpE { .. } => "3",
        Deriv::AllIInd { .. } => "4",
        Deriv::AllEInd { .. } => "5",
        Deriv::AllIPred { .. } => "6",
        Deriv::AllEPred { .. } => "7",
        Deriv::Eq { .. } => "8",
        Deriv::MuPP { .. } | Deriv::MuLmu { .. } => "9",
        Deriv::YFix { .. } => "Y",
    }
}

/// Validate a derivation in the given system; on success return its root
/// judgment (and whether the fixed-point rule was used).
pub fn validate(
    d: &Deriv,
    system: System,
    e: &Equations,
    opts: &TypingOpts,
) -> Result<Checked, TypeError> {
    check(d, system, e, opts, &mut Vec::new())
}

fn fail<T>(d: &Deriv, path: &[usize], msg: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError { rule: rule_no(d), tag: d.tag(), path: path.to_vec(), msg: msg.into() })
}

fn merge(
    into: &mut BTreeMap<String, Formula>,
    from: &BTreeMap<String, Formula>,
    what: &str,
    d: &Deriv,
    path: &[usize],
) -> Result<(), TypeError> {
    for (k, f) in from {
        match into.get(k) {
            Some(g) if !g.alpha_eq(f) => {
                return fail(
                    d,
                    path,
                    format!("{what} {k} carries two different formulas: {g} and {f}"),
                );
            }
            _ => {
                into.insert(k.clone(), f.clone());
            }
        }
    }
    Ok(())
}

fn ctx_free_ind(j: &Judgment) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in j.lam.values().chain(j.mu.values()) {
        out.extend(f.free_ind_vars());
    }
    out
}

fn ctx_free_pred(j: &Judgment) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in j.lam.values().chain(j.mu.values()) {
        out.extend(f.free_pred_vars());
    }
    out
}

fn check(
    d: &Deriv,
    system: System,
    e: &Equations,
    opts: &TypingOpts,
    path: &mut Vec<usize>,
) -> Result<Checked, TypeError> {
    match d {
        Deriv::Ax { ctx, var } => {
            for (k, f) in ctx.lam.iter().chain(ctx.mu.iter()) {
                if let Err(msg) = f.wf() {
                    return fail(d, path, format!("ill-formed context formula for {k}: {msg}"));
                }
            }
            if system == System::Mupp {
                for (a, f) in &ctx.mu {
                    if f.as_neg().is_none() {
                        return fail(
                            d,
                            path,
                            format!("context entry #{a} must be a negated formula, found {f}"),
                        );
                    }
                }
            }
            let (subject, formula) = match var {
                AxVar::Lam(x) => {
                    let Some(a) = ctx.lam.get(x) else {
                        return fail(d, path, format!("{x} is not declared in the context"));
                    };
                    let s = match system {
                        System::Lmu => Subject::Lmu(lmu::var(x)),
                        System::Mupp => Subject::Mupp(mupp::var(x)),
                    };
                    (s, a.clone())
                }
                AxVar::Mu(a) => {
                    if system == System::Lmu {
                        return fail(
                            d,
                            path,
                            "a μ-variable cannot be the subject of a judgment in this system",
                        );
                    }
                    let Some(b) = ctx.mu.get(a) else {
                        return fail(d, path, format!("#{a} is not declared in the context"));
                    };
                    (Subject::Mupp(mupp::mvar(a)), b.clone())
                }
            };
            Ok(Checked {
                judgment: Judgment {
                    system,
                    lam: ctx.lam.clone(),
                    mu: ctx.mu.clone(),
                    subject,
                    formula,
                },
                used_y: false,
            })
        }

        Deriv::ImpI { var, domain, prem } => {
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            let mut j = p.judgment;
            let dom = match (j.lam.get(var), domain) {
                (Some(a), Some(ann)) if !ann.alpha_eq(a) => {
                    return fail(
                        d,
                        path,
                        format!("domain annotation {ann} disagrees with the context entry {a} for {var}"),
                    );
                }
                (Some(a), _) => a.clone(),
                (None, Some(ann)) => ann.clone(),
                (None, None) => {
                    return fail(
                        d,
                        path,
                        format!("{var} is not in the premise context and no domain was given"),
                    );
                }
            };
            j.lam.remove(var);
            j.formula = imp(dom, j.formula);
            j.subject = match j.subject {
                Subject::Lmu(t) => Subject::Lmu(lmu::lam(var, t)),
                Subject::Mupp(t) => Subject::Mupp(mupp::lam(var, t)),
            };
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::ImpE { fun, arg } => {
            path.push(0);
            let pf = check(fun, system, e, opts, path)?;
            path.pop();
            path.push(1);
            let pa = check(arg, system, e, opts, path)?;
            path.pop();
            let Some((dom, cod)) = pf.judgment.formula.as_imp() else {
                return fail(
                    d,
                    path,
                    format!("the function premise is not an implication: {}", pf.judgment.formula),
                );
            };
            if !dom.alpha_eq(&pa.judgment.formula) {
                return fail(
                    d,
                    path,
                    format!(
                        "domain mismatch: the function expects {dom} but the argument has {}",
                        pa.judgment.formula
                    ),
                );
            }
            let mut j = pf.judgment.clone();
            j.formula = cod.clone();
            merge(&mut j.lam, &pa.judgment.lam, "variable", d, path)?;
            merge(&mut j.mu, &pa.judgment.mu, "μ-variable", d, path)?;
            j.subject = match (pf.judgment.subject, pa.judgment.subject) {
                (Subject::Lmu(f), Subject::Lmu(a)) => Subject::Lmu(lmu::app(f, a)),
                (Subject::Mupp(f), Subject::Mupp(a)) => Subject::Mupp(mupp::app(f, a)),
                _ => unreachable!("one system per validation"),
            };
            Ok(Checked { judgment: j, used_y: pf.used_y || pa.used_y })
        }

        Deriv::AllIInd { var, prem } => {
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            if ctx_free_ind(&p.judgment).contains(var) {
                return fail(d, path, format!("{var} is free in the context"));
            }
            let mut j = p.judgment;
            j.formula = all_ind(var.clone(), j.formula);
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::AllEInd { witness, prem } => {
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            if let Err(msg) = witness.check_arities(&mut BTreeMap::new()) {
                return fail(d, path, format!("ill-formed witness: {msg}"));
            }
            let Formula::AllInd(x, body) = &p.judgment.formula else {
                return fail(
                    d,
                    path,
                    format!(
                        "the premise is not a first-order universal: {}",
                        p.judgment.formula
                    ),
                );
            };
            let mut j = p.judgment.clone();
            j.formula = body.subst_ind(x, witness);
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::AllIPred { pvar, arity, prem } => {
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            if ctx_free_pred(&p.judgment).contains(pvar) {
                return fail(d, path, format!("{pvar} is free in the context"));
            }
            let mut j = p.judgment;
            j.formula = all_pred(pvar.clone(), *arity, j.formula);
            if let Err(msg) = j.formula.wf() {
                return fail(d, path, format!("generalization is ill-formed: {msg}"));
            }
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::AllEPred { params, body, prem } => {
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            let Formula::AllPred(x, k, a) = &p.judgment.formula else {
                return fail(
                    d,
                    path,
                    format!(
                        "the premise is not a second-order universal: {}",
                        p.judgment.formula
                    ),
                );
            };
            if params.len() != *k {
                return fail(
                    d,
                    path,
                    format!(
                        "the instantiation has {} parameter(s) but the quantifier binds a {k}-ary predicate",
                        params.len()
                    ),
                );
            }
            let distinct: BTreeSet<&String> = params.iter().collect();
            if distinct.len() != params.len() {
                return fail(d, path, "instantiation parameters must be distinct");
            }
            if let Err(msg) = body.wf() {
                return fail(d, path, format!("ill-formed instantiation body: {msg}"));
            }
            let inst = match a.subst_pred(x, params, body) {
                Ok(f) => f,
                Err(msg) => return fail(d, path, msg),
            };
            let mut j = p.judgment.clone();
            j.formula = inst;
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::Eq { var, template, from, to, prem } => {
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            if let Err(msg) = template.wf() {
                return fail(d, path, format!("ill-formed template: {msg}"));
            }
            let before = template.subst_ind(var, from);
            if !before.alpha_eq(&p.judgment.formula) {
                return fail(
                    d,
                    path,
                    format!(
                        "the premise formula {} does not match the template instance {before}",
                        p.judgment.formula
                    ),
                );
            }
            if !eq_modulo(from, to, e, opts.eq_depth) {
                return fail(
                    d,
                    path,
                    format!(
                        "{from} and {to} are not provably equal within depth {}",
                        opts.eq_depth
                    ),
                );
            }
            let mut j = p.judgment.clone();
            j.formula = template.subst_ind(var, to);
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::MuPP { mvar, ty, prem } => {
            if system != System::Mupp {
                return fail(d, path, "this μ rule belongs to the non-deterministic system");
            }
            if mvar == DELTA {
                return fail(d, path, "delta is the output register and cannot be bound");
            }
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            if !p.judgment.formula.is_bottom() {
                return fail(
                    d,
                    path,
                    format!("the premise of μ must conclude _|_, found {}", p.judgment.formula),
                );
            }
            let from_ctx = p.judgment.mu.get(mvar).map(|f| {
                f.as_neg().cloned().expect("μ entries are negations by construction")
            });
            let b = match (from_ctx, ty) {
                (Some(b), Some(ann)) if !ann.alpha_eq(&b) => {
                    return fail(
                        d,
                        path,
                        format!("type annotation {ann} disagrees with the context, which gives {b}"),
                    );
                }
                (Some(b), _) => b,
                (None, Some(ann)) => ann.clone(),
                (None, None) => {
                    return fail(
                        d,
                        path,
                        format!("#{mvar} is not in the premise context and no type was given"),
                    );
                }
            };
            let mut j = p.judgment;
            j.mu.remove(mvar);
            j.formula = b;
            j.subject = match j.subject {
                Subject::Mupp(t) => Subject::Mupp(mupp::mu(mvar, t)),
                Subject::Lmu(_) => unreachable!("one system per validation"),
            };
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::MuLmu { binder, name, binder_ty, prem } => {
            if system != System::Lmu {
                return fail(d, path, "this μ rule belongs to the deterministic system");
            }
            if binder == DELTA {
                return fail(d, path, "delta is the output register and cannot be bound");
            }
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            let active = p.judgment.formula.clone();
            let declared = p.judgment.mu.get(binder).cloned();
            let b = match (&declared, binder_ty) {
                (Some(b), Some(ann)) if !ann.alpha_eq(b) => {
                    return fail(
                        d,
                        path,
                        format!(
                            "annotation {ann} disagrees with the context, which gives {b} for #{binder}"
                        ),
                    );
                }
                (Some(b), _) => b.clone(),
                (None, Some(ann)) => ann.clone(),
                // Degenerate vacuous binder: with no declaration and no
                // annotation the only coherent reading is B = A.
                (None, None) => active.clone(),
            };
            let mut j = p.judgment;
            j.mu.remove(binder);
            if name == binder {
                if !active.alpha_eq(&b) {
                    return fail(
                        d,
                        path,
                        format!(
                            "with equal μ-names the premise type {active} must match the μ-variable's formula {b}"
                        ),
                    );
                }
            } else {
                match j.mu.get(name) {
                    Some(existing) if !existing.alpha_eq(&active) => {
                        return fail(
                            d,
                            path,
                            format!(
                                "μ-variable #{name} already carries {existing}, cannot also name {active}"
                            ),
                        );
                    }
                    _ => {
                        j.mu.insert(name.clone(), active);
                    }
                }
            }
            j.formula = b;
            j.subject = match j.subject {
                Subject::Lmu(t) => Subject::Lmu(lmu::mu(binder, name, t)),
                Subject::Mupp(_) => unreachable!("one system per validation"),
            };
            Ok(Checked { judgment: j, used_y: p.used_y })
        }

        Deriv::YFix { prem } => {
            if system != System::Mupp {
                return fail(d, path, "the fixed-point rule belongs to the non-deterministic system");
            }
            if !opts.y_rule {
                return fail(d, path, "the fixed-point rule is disabled (enable it explicitly)");
            }
            path.push(0);
            let p = check(prem, system, e, opts, path)?;
            path.pop();
            let Some((a, a2)) = p.judgment.formula.as_imp() else {
                return fail(
                    d,
                    path,
                    format!("the premise must have shape A -> A, found {}", p.judgment.formula),
                );
            };
            if !a.alpha_eq(a2) {
                return fail(
                    d,
                    path,
                    format!("the premise must have shape A -> A, found {}", p.judgment.formula),
                );
            }
            let mut j = p.judgment.clone();
            j.formula = a.clone();
            j.subject = match &p.judgment.subject {
                Subject::Mupp(t) => {
                    Subject::Mupp(mupp::app(crate::programs::ytur(), t.clone()))
                }
                Subject::Lmu(_) => unreachable!("one system per validation"),
            };
            Ok(Checked { judgment: j, used_y: true })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_mupp;
    use crate::typing::derivation::*;
    use crate::typing::fo::{s_n, Equations};
    use crate::typing::formula::{atom, bottom, bool_of, ent_of, neg, parse_formula};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn ok(d: &Deriv, system: System) -> Checked {
        validate(d, system, &Equations::or_bool(), &TypingOpts::default())
            .unwrap_or_else(|e| panic!("expected valid derivation, got: {e}"))
    }

    fn bad(d: &Deriv, system: System) -> TypeError {
        validate(d, system, &Equations::or_bool(), &TypingOpts::default())
            .err()
            .expect("expected validation to fail")
    }

    /// ⊢′ λx.λy.x : Bool[B1]
    fn btrue_deriv() -> Deriv {
        let ctx = Ctx::new().l("x", f("X(B1)")).l("y", f("X(B0)"));
        all_i_pred("X", 1, imp_i("x", imp_i("y", ax_l(ctx, "x"))))
    }

    /// ⊢′ λx.λy.(y^n x) : Ent[S^n(Z)]
    fn church_deriv(n: usize) -> Deriv {
        let step = f("all y. X(y) -> X(S(y))");
        let ctx = Ctx::new().l("x", f("X(Z)")).l("y", step);
        let mut d = ax_l(ctx.clone(), "x");
        for k in 0..n {
            d = imp_e(all_e_ind(s_n(k), ax_l(ctx.clone(), "y")), d);
        }
        all_i_pred("X", 1, imp_i("x", imp_i("y", d)))
    }

    /// ⊢′ λx.μa.x : ALL X^0. _|_ -> X
    fn exit_deriv() -> Deriv {
        let ctx = Ctx::new().l("x", bottom()).m("a", neg(atom("X", vec![])));
        all_i_pred("X", 0, imp_i("x", mu_pp("a", ax_l(ctx, "x"))))
    }

    #[test]
    fn btrue_types_as_bool_true() {
        let c = ok(&btrue_deriv(), System::Mupp);
        assert!(c.judgment.formula.alpha_eq(&bool_of(crate::typing::fo::b1())));
        assert!(c.judgment.lam.is_empty() && c.judgment.mu.is_empty());
        assert_eq!(c.judgment.subject.to_string(), "\\x.\\y.x");
        assert!(!c.used_y);
    }

    #[test]
    fn church_numerals_type_as_their_numerals() {
        for n in [0usize, 1, 2, 5] {
            let c = ok(&church_deriv(n), System::Mupp);
            assert!(
                c.judgment.formula.alpha_eq(&ent_of(s_n(n))),
                "church({n}) should type as Ent[S^{n}(Z)], got {}",
                c.judgment.formula
            );
            let want = crate::programs::church(n);
            assert!(c.judgment.subject.as_mupp().unwrap().alpha_eq(&want));
        }
    }

    #[test]
    fn exit_types_with_the_mu_rule() {
        let c = ok(&exit_deriv(), System::Mupp);
        assert!(c.judgment.formula.alpha_eq(&f("ALL X^0. _|_ -> X")));
        assert!(c.judgment.subject.as_mupp().unwrap().alpha_eq(&crate::programs::exit()));
    }

    #[test]
    fn lmu_named_mu_rule_both_cases() {
        // ⊢ λx.μa.[a]x : A -> A  (α = β case; here with a declared a : X).
        let ctx = Ctx::new().l("x", f("X")).m("a", f("X"));
        let same = imp_i("x", mu_lmu("a", "a", ax_l(ctx, "x")));
        let c = ok(&same, System::Lmu);
        assert!(c.judgment.formula.alpha_eq(&f("X -> X")));
        assert_eq!(c.judgment.subject.to_string(), "\\x.mu #a.[#a]x");

        // x : X |- mu #b.[#c]x : Y , #c : X   (α ≠ β, vacuous binder with
        // annotation).
        let d = mu_lmu_ty("b", "c", f("Y"), ax_l(Ctx::new().l("x", f("X")), "x"));
        let c = ok(&d, System::Lmu);
        assert!(c.judgment.formula.alpha_eq(&f("Y")));
        assert_eq!(c.judgment.mu.get("c").unwrap().to_string(), "X");

        // α = β with a mismatched declared type must fail.
        let bad_same = mu_lmu("a", "a", ax_l(Ctx::new().l("x", f("X")).m("a", f("Y")), "x"));
        let e = bad(&bad_same, System::Lmu);
        assert_eq!(e.rule, "9");
    }

    #[test]
    fn rule3_domain_mismatch_reports_spec_text() {
        // (x y) where x : X -> Y but y : Z0.
        let d = imp_e(
            ax_l(Ctx::new().l("x", f("X -> Y")), "x"),
            ax_l(Ctx::new().l("y", f("Z0")), "y"),
        );
        let e = bad(&d, System::Mupp);
        assert_eq!(e.rule, "3");
        assert!(e.to_string().starts_with("rule 3"), "got: {e}");
        assert!(e.to_string().contains("domain mismatch"), "got: {e}");
    }

    #[test]
    fn freshness_side_conditions_enforced() {
        // all-intro over a variable free in the context must fail…
        let d = all_i_ind("y", ax_l(Ctx::new().l("x", f("X(y)")), "x"));
        let e = bad(&d, System::Mupp);
        assert_eq!(e.rule, "4");
        // …but a fresh variable generalizes fine.
        let d2 = all_i_ind("z", ax_l(Ctx::new().l("x", f("X(y)")), "x"));
        assert!(ok(&d2, System::Mupp).judgment.formula.alpha_eq(&f("all z. X(y)")));
        // Same for predicate variables.
        let d3 = all_i_pred("X", 1, ax_l(Ctx::new().l("x", f("X(y)")), "x"));
        assert_eq!(bad(&d3, System::Mupp).rule, "6");
    }

    #[test]
    fn eq_rule_rewrites_through_the_equations() {
        // From t : X(or(B1,B0)) conclude t : X(B1).
        let prem = ax_l(Ctx::new().l("t", f("X(or(B1,B0))")), "t");
        let d = eq_rule(
            "w",
            f("X(w)"),
            crate::typing::fo::or(crate::typing::fo::b1(), crate::typing::fo::b0()),
            crate::typing::fo::b1(),
            prem,
        );
        let c = ok(&d, System::Mupp);
        assert!(c.judgment.formula.alpha_eq(&f("X(B1)")));
        // Unequal sides are rejected.
        let prem = ax_l(Ctx::new().l("t", f("X(B0)")), "t");
        let d = eq_rule("w", f("X(w)"), crate::typing::fo::b0(), crate::typing::fo::b1(), prem);
        assert_eq!(bad(&d, System::Mupp).rule, "8");
    }

    #[test]
    fn errors_carry_the_premise_path() {
        // Bury a broken axiom one ImpI down: path should be "0".
        let broken = ax_l(Ctx::new(), "x");
        let d = imp_i_dom("y", bottom(), broken);
        let e = bad(&d, System::Mupp);
        assert_eq!(e.rule, "1");
        assert_eq!(e.path, vec![0]);
        assert!(e.to_string().contains("at 0:"), "got: {e}");
    }

    #[test]
    fn yfix_is_gated_and_flagged() {
        let prem = imp_i("x", ax_l(Ctx::new().l("x", f("Ent[Z]")), "x"));
        let d = yfix(prem);
        // Disabled by default.
        let e = bad(&d, System::Mupp);
        assert_eq!(e.rule, "Y");
        // Enabled: validates, flags, and applies the fixed-point combinator.
        let opts = TypingOpts { y_rule: true, ..TypingOpts::default() };
        let c = validate(&d, System::Mupp, &Equations::empty(), &opts).unwrap();
        assert!(c.used_y);
        assert!(c.judgment.formula.alpha_eq(&f("Ent[Z]")));
        let subj = c.judgment.subject.as_mupp().unwrap().clone();
        let expect = mupp::app(crate::programs::ytur(), parse_mupp("\\x.x").unwrap());
        assert!(subj.alpha_eq(&expect));
    }

    #[test]
    fn subject_alpha_renaming_revalidates() {
        // Renaming the bound names of a derivation yields an α-equivalent
        // subject with the same conclusion formula.
        let c1 = ok(&btrue_deriv(), System::Mupp);
        let renamed = all_i_pred(
            "Q",
            1,
            imp_i(
                "u",
                imp_i(
                    "v",
                    ax_l(Ctx::new().l("u", f("Q(B1)")).l("v", f("Q(B0)")), "u"),
                ),
            ),
        );
        let c2 = ok(&renamed, System::Mupp);
        assert!(c1.judgment.formula.alpha_eq(&c2.judgment.formula));
        assert!(c1
            .judgment
            .subject
            .as_mupp()
            .unwrap()
            .alpha_eq(c2.judgment.subject.as_mupp().unwrap()));
    }

    #[test]
    fn vacuous_weakening_via_annotations() {
        // λy.x with y : Y not in the premise context.
        let d = imp_i_dom("y", f("Y"), ax_l(Ctx::new().l("x", f("X")), "x"));
        let c = ok(&d, System::Mupp);
        assert!(c.judgment.formula.alpha_eq(&f("Y -> X")));
        // μa.x with a : ¬Y nowhere in the premise.
        let d = mu_pp_ty("a", f("Y"), ax_l(Ctx::new().l("x", bottom()), "x"));
        let c = ok(&d, System::Mupp);
        assert!(c.judgment.formula.alpha_eq(&f("Y")));
    }

    #[test]
    fn mu_rules_are_system_specific() {
        let d = mu_pp_ty("a", f("X"), ax_l(Ctx::new().l("x", bottom()), "x"));
        assert_eq!(bad(&d, System::Lmu).rule, "9");
        let d = mu_lmu_ty("a", "b", f("X"), ax_l(Ctx::new().l("x", f("X")), "x"));
        assert_eq!(bad(&d, System::Mupp).rule, "9");
        // And μ-variable axioms do not exist in the deterministic system.
        let d = ax_m(Ctx::new().m("a", f("X")), "a");
        assert_eq!(bad(&d, System::Lmu).rule, "1");
    }

    #[test]
    fn substitution_commutation() {
        // subst_ind(x:=a) and subst_pred(X:=(w)G) commute when x is not a
        // parameter of G and G does not mention x. (A randomized version
        // lives with the generators.)
        let cases = [
            ("X(x) -> Y(x)", "x", "S(Z)", "~Y(w)"),
            ("all z. X(z) -> X(x)", "x", "or(B0,B1)", "w = Z"),
            ("X(x) -> (X(S(x)) -> _|_)", "x", "Z", "Bool[w]"),
        ];
        for (src, x, a, g) in cases {
            let base = f(src);
            let a = crate::typing::formula::parse_foterm(a).unwrap();
            let g = f(g);
            let one = base.subst_ind(x, &a).subst_pred("X", &["w".into()], &g).unwrap();
            let two = base.subst_pred("X", &["w".into()], &g).unwrap().subst_ind(x, &a);
            assert!(one.alpha_eq(&two), "{src}: {one} vs {two}");
        }
    }
}
