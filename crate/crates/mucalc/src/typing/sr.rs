//! Subject reduction as a derivation transformer.
//!
//! [`transform_step`] rewrites a derivation of `Γ ⊢′ t : A` along one core
//! reduction step `t ⇀ t'`, producing a candidate derivation of
//! `Γ ⊢′ t' : A` for the validator to confirm. The caller owns the contract:
//! transform, re-validate, compare the concluded formula.
//!
//! The transformer covers every core rule that typed terms can exhibit.
//! Quantifier introductions between a redex and its structural typing rule
//! are handled by the substitution lemmas ([`inst_ind_deriv`],
//! [`inst_pred_deriv`]): paired elimination/introduction wrappers are
//! cancelled by instantiating the derivation underneath. The two machine
//! rules with untypable shapes (the discard rule and the ξ register rules)
//! are rejected.

use crate::engine::mupp::{MuppRedex, MuppRule};
use crate::names;
use crate::typing::derivation::{
    all_e_ind, all_e_pred, all_i_ind, all_i_pred, ax_l, ax_m, eq_rule, imp_e, imp_i_dom, AxVar,
    Ctx, Deriv,
};
use crate::typing::fo::{fvar, Equations, FoTerm};
use crate::typing::formula::{atom, bottom, neg, Formula};
use crate::typing::validate::{validate, TypingOpts};
use crate::typing::System;

/// Transform a derivation along one core reduction step of its subject.
///
/// `redex` must come from the core-mode redex enumeration of the subject.
/// The output is a candidate: callers re-validate it (the test suites insist
/// the concluded formula is unchanged and the new subject is the reduct).
pub fn transform_step(
    d: &Deriv,
    redex: &MuppRedex,
    e: &Equations,
    opts: &TypingOpts,
) -> Result<Deriv, String> {
    let rp = &redex.replace_at.0;
    let at = &redex.at.0;
    if !at.starts_with(rp.as_slice()) {
        return Err("malformed redex: the occurrence lies outside the replaced subterm".into());
    }
    let rel: Vec<u8> = at[rp.len()..].to_vec();
    rewrite_at(d, rp, &mut |sub| transform_local(sub, redex, &rel, e, opts))
}

// ---------------------------------------------------------------------------
// Navigation: term paths over derivations.

/// Subject-transparent wrappers: the quantifier and equation rules leave the
/// subject term unchanged.
fn is_transparent(d: &Deriv) -> bool {
    matches!(
        d,
        Deriv::AllIInd { .. }
            | Deriv::AllEInd { .. }
            | Deriv::AllIPred { .. }
            | Deriv::AllEPred { .. }
            | Deriv::Eq { .. }
    )
}

fn transparent_prem(d: &Deriv) -> &Deriv {
    match d {
        Deriv::AllIInd { prem, .. }
        | Deriv::AllEInd { prem, .. }
        | Deriv::AllIPred { prem, .. }
        | Deriv::AllEPred { prem, .. }
        | Deriv::Eq { prem, .. } => prem,
        _ => unreachable!("only called on transparent nodes"),
    }
}

/// Clone a transparent wrapper onto a new premise.
fn with_prem(w: &Deriv, prem: Deriv) -> Deriv {
    let prem = Box::new(prem);
    match w {
        Deriv::AllIInd { var, .. } => Deriv::AllIInd { var: var.clone(), prem },
        Deriv::AllEInd { witness, .. } => Deriv::AllEInd { witness: witness.clone(), prem },
        Deriv::AllIPred { pvar, arity, .. } => {
            Deriv::AllIPred { pvar: pvar.clone(), arity: *arity, prem }
        }
        Deriv::AllEPred { params, body, .. } => {
            Deriv::AllEPred { params: params.clone(), body: body.clone(), prem }
        }
        Deriv::Eq { var, template, from, to, .. } => Deriv::Eq {
            var: var.clone(),
            template: template.clone(),
            from: from.clone(),
            to: to.clone(),
            prem,
        },
        _ => unreachable!("only called on transparent nodes"),
    }
}

/// Split a derivation into its transparent wrapper chain (outermost first)
/// and the structural node underneath.
fn split_chain(mut d: &Deriv) -> (Vec<&Deriv>, &Deriv) {
    let mut chain = Vec::new();
    while is_transparent(d) {
        chain.push(d);
        d = transparent_prem(d);
    }
    (chain, d)
}

/// Re-apply a wrapper chain (outermost first) around a new core.
fn rewrap(chain: &[&Deriv], core: Deriv) -> Deriv {
    chain.iter().rev().fold(core, |acc, w| with_prem(w, acc))
}

/// Follow a subject-term path down a derivation, skipping transparent
/// wrappers. Returns the subderivation whose subject is the subterm at the
/// path (possibly still wrapped).
fn extract_at<'a>(mut d: &'a Deriv, path: &[u8]) -> Result<&'a Deriv, String> {
    for &step in path {
        while is_transparent(d) {
            d = transparent_prem(d);
        }
        d = match (d, step) {
            (Deriv::ImpI { prem, .. }, 0) => prem,
            (Deriv::ImpE { fun, .. }, 0) => fun,
            (Deriv::ImpE { arg, .. }, 1) => arg,
            (Deriv::MuPP { prem, .. }, 0) => prem,
            (Deriv::MuLmu { prem, .. }, 0) => prem,
            (Deriv::YFix { prem }, 1) => prem,
            (Deriv::YFix { .. }, 0) => {
                return Err("no derivation covers the fixed-point combinator itself".into())
            }
            _ => return Err(format!("term path step {step} does not match the derivation")),
        };
    }
    Ok(d)
}

/// Rebuild a derivation with the subderivation at a subject-term path
/// replaced by `f` of it. Transparent wrappers are descended without
/// consuming path steps.
fn rewrite_at(
    d: &Deriv,
    path: &[u8],
    f: &mut dyn FnMut(&Deriv) -> Result<Deriv, String>,
) -> Result<Deriv, String> {
    if path.is_empty() {
        return f(d);
    }
    if is_transparent(d) {
        return Ok(with_prem(d, rewrite_at(transparent_prem(d), path, f)?));
    }
    let (step, rest) = (path[0], &path[1..]);
    Ok(match (d, step) {
        (Deriv::ImpI { var, domain, prem }, 0) => Deriv::ImpI {
            var: var.clone(),
            domain: domain.clone(),
            prem: Box::new(rewrite_at(prem, rest, f)?),
        },
        (Deriv::ImpE { fun, arg }, 0) => {
            Deriv::ImpE { fun: Box::new(rewrite_at(fun, rest, f)?), arg: arg.clone() }
        }
        (Deriv::ImpE { fun, arg }, 1) => {
            Deriv::ImpE { fun: fun.clone(), arg: Box::new(rewrite_at(arg, rest, f)?) }
        }
        (Deriv::MuPP { mvar, ty, prem }, 0) => Deriv::MuPP {
            mvar: mvar.clone(),
            ty: ty.clone(),
            prem: Box::new(rewrite_at(prem, rest, f)?),
        },
        (Deriv::YFix { prem }, 1) => Deriv::YFix { prem: Box::new(rewrite_at(prem, rest, f)?) },
        (Deriv::YFix { .. }, 0) => {
            return Err("no derivation covers the fixed-point combinator itself".into())
        }
        (Deriv::Ax { .. }, _) => {
            return Err("the redex path descends below an axiom leaf".into())
        }
        _ => return Err(format!("term path step {step} does not match the derivation")),
    })
}

// ---------------------------------------------------------------------------
// Substitution lemmas at the derivation level.

fn map_premises(d: &Deriv, f: &mut dyn FnMut(&Deriv) -> Deriv) -> Deriv {
    match d {
        Deriv::Ax { .. } => d.clone(),
        Deriv::ImpI { var, domain, prem } => Deriv::ImpI {
            var: var.clone(),
            domain: domain.clone(),
            prem: Box::new(f(prem)),
        },
        Deriv::ImpE { fun, arg } => {
            Deriv::ImpE { fun: Box::new(f(fun)), arg: Box::new(f(arg)) }
        }
        Deriv::AllIInd { var, prem } => {
            Deriv::AllIInd { var: var.clone(), prem: Box::new(f(prem)) }
        }
        Deriv::AllEInd { witness, prem } => {
            Deriv::AllEInd { witness: witness.clone(), prem: Box::new(f(prem)) }
        }
        Deriv::AllIPred { pvar, arity, prem } => {
            Deriv::AllIPred { pvar: pvar.clone(), arity: *arity, prem: Box::new(f(prem)) }
        }
        Deriv::AllEPred { params, body, prem } => Deriv::AllEPred {
            params: params.clone(),
            body: body.clone(),
            prem: Box::new(f(prem)),
        },
        Deriv::Eq { var, template, from, to, prem } => Deriv::Eq {
            var: var.clone(),
            template: template.clone(),
            from: from.clone(),
            to: to.clone(),
            prem: Box::new(f(prem)),
        },
        Deriv::MuPP { mvar, ty, prem } => {
            Deriv::MuPP { mvar: mvar.clone(), ty: ty.clone(), prem: Box::new(f(prem)) }
        }
        Deriv::MuLmu { binder, name, binder_ty, prem } => Deriv::MuLmu {
            binder: binder.clone(),
            name: name.clone(),
            binder_ty: binder_ty.clone(),
            prem: Box::new(f(prem)),
        },
        Deriv::YFix { prem } => Deriv::YFix { prem: Box::new(f(prem)) },
    }
}

/// Add context entries to every axiom leaf (existing entries win), stopping
/// per entry at binders that shadow it. Used when a substituted derivation
/// must keep carrying the typings its siblings relied on.
fn weaken_deriv(d: &Deriv, extra: &Ctx) -> Deriv {
    if extra.lam.is_empty() && extra.mu.is_empty() {
        return d.clone();
    }
    match d {
        Deriv::Ax { ctx, var } => {
            let mut c = ctx.clone();
            for (k, f) in &extra.lam {
                c.lam.entry(k.clone()).or_insert_with(|| f.clone());
            }
            for (k, f) in &extra.mu {
                c.mu.entry(k.clone()).or_insert_with(|| f.clone());
            }
            Deriv::Ax { ctx: c, var: var.clone() }
        }
        Deriv::ImpI { var, .. } if extra.lam.contains_key(var) => {
            let mut narrowed = extra.clone();
            narrowed.lam.remove(var);
            map_premises(d, &mut |p| weaken_deriv(p, &narrowed))
        }
        Deriv::MuPP { mvar, .. } if extra.mu.contains_key(mvar) => {
            let mut narrowed = extra.clone();
            narrowed.mu.remove(mvar);
            map_premises(d, &mut |p| weaken_deriv(p, &narrowed))
        }
        Deriv::MuLmu { binder, .. } if extra.mu.contains_key(binder) => {
            let mut narrowed = extra.clone();
            narrowed.mu.remove(binder);
            map_premises(d, &mut |p| weaken_deriv(p, &narrowed))
        }
        _ => map_premises(d, &mut |p| weaken_deriv(p, extra)),
    }
}

/// Every variable name mentioned in the leaf contexts — a cheap superset of
/// the free term variables of the derivation's subject, used for capture
/// avoidance.
fn leaf_names(d: &Deriv, out: &mut std::collections::BTreeSet<String>) {
    if let Deriv::Ax { ctx, .. } = d {
        out.extend(ctx.lam.keys().cloned());
        out.extend(ctx.mu.keys().cloned());
    }
    for p in d.premises() {
        leaf_names(p, out);
    }
}

/// Rename a free λ-variable throughout the derivation (leaf contexts and
/// axiom heads); stops where the name is rebound.
fn rename_l_deriv(d: &Deriv, x: &str, x2: &str) -> Deriv {
    match d {
        Deriv::Ax { ctx, var } => {
            let mut c = ctx.clone();
            if let Some(f) = c.lam.remove(x) {
                c.lam.insert(x2.to_string(), f);
            }
            let var2 = match var {
                AxVar::Lam(v) if v == x => AxVar::Lam(x2.to_string()),
                _ => var.clone(),
            };
            Deriv::Ax { ctx: c, var: var2 }
        }
        Deriv::ImpI { var, .. } if var == x => d.clone(),
        _ => map_premises(d, &mut |p| rename_l_deriv(p, x, x2)),
    }
}

/// Rename a free μ-variable throughout the derivation.
fn rename_m_deriv(d: &Deriv, a: &str, a2: &str) -> Deriv {
    match d {
        Deriv::Ax { ctx, var } => {
            let mut c = ctx.clone();
            if let Some(f) = c.mu.remove(a) {
                c.mu.insert(a2.to_string(), f);
            }
            let var2 = match var {
                AxVar::Mu(v) if v == a => AxVar::Mu(a2.to_string()),
                _ => var.clone(),
            };
            Deriv::Ax { ctx: c, var: var2 }
        }
        Deriv::MuPP { mvar, .. } if mvar == a => d.clone(),
        Deriv::MuLmu { binder, .. } if binder == a => d.clone(),
        Deriv::MuLmu { binder, name, binder_ty, prem } => Deriv::MuLmu {
            binder: binder.clone(),
            name: if name == a { a2.to_string() } else { name.clone() },
            binder_ty: binder_ty.clone(),
            prem: Box::new(rename_m_deriv(prem, a, a2)),
        },
        _ => map_premises(d, &mut |p| rename_m_deriv(p, a, a2)),
    }
}

/// Substitute a derivation for a λ-variable: axiom leaves typing `x` become
/// `repl` (weakened by the leaf's remaining context); `x` disappears from
/// every other leaf context. Descent stops where `x` is rebound; binders
/// that would capture a variable free in `repl` are renamed first.
fn subst_l_deriv(d: &Deriv, x: &str, repl: &Deriv) -> Deriv {
    let mut avoid = std::collections::BTreeSet::new();
    leaf_names(repl, &mut avoid);
    subst_l_go(d, x, repl, &avoid)
}

fn subst_l_go(
    d: &Deriv,
    x: &str,
    repl: &Deriv,
    avoid: &std::collections::BTreeSet<String>,
) -> Deriv {
    match d {
        Deriv::Ax { ctx, var } => {
            if matches!(var, AxVar::Lam(v) if v == x) {
                let mut rest = ctx.clone();
                rest.lam.remove(x);
                weaken_deriv(repl, &rest)
            } else {
                let mut c = ctx.clone();
                c.lam.remove(x);
                Deriv::Ax { ctx: c, var: var.clone() }
            }
        }
        Deriv::ImpI { var, .. } if var == x => d.clone(),
        Deriv::ImpI { var, domain, prem } if avoid.contains(var) => {
            let v2 = names::fresh(var, |c| avoid.contains(c) || c == x);
            Deriv::ImpI {
                var: v2.clone(),
                domain: domain.clone(),
                prem: Box::new(subst_l_go(&rename_l_deriv(prem, var, &v2), x, repl, avoid)),
            }
        }
        Deriv::MuPP { mvar, ty, prem } if avoid.contains(mvar) => {
            let v2 = names::fresh(mvar, |c| avoid.contains(c));
            Deriv::MuPP {
                mvar: v2.clone(),
                ty: ty.clone(),
                prem: Box::new(subst_l_go(&rename_m_deriv(prem, mvar, &v2), x, repl, avoid)),
            }
        }
        _ => map_premises(d, &mut |p| subst_l_go(p, x, repl, avoid)),
    }
}

/// Substitute a derivation for a μ-variable, mirroring `subst_m` on terms.
/// Capture-avoiding in the same way as [`subst_l_deriv`].
fn subst_m_deriv(d: &Deriv, a: &str, repl: &Deriv) -> Deriv {
    let mut avoid = std::collections::BTreeSet::new();
    leaf_names(repl, &mut avoid);
    subst_m_go(d, a, repl, &avoid)
}

fn subst_m_go(
    d: &Deriv,
    a: &str,
    repl: &Deriv,
    avoid: &std::collections::BTreeSet<String>,
) -> Deriv {
    match d {
        Deriv::Ax { ctx, var } => {
            if matches!(var, AxVar::Mu(v) if v == a) {
                let mut rest = ctx.clone();
                rest.mu.remove(a);
                weaken_deriv(repl, &rest)
            } else {
                let mut c = ctx.clone();
                c.mu.remove(a);
                Deriv::Ax { ctx: c, var: var.clone() }
            }
        }
        Deriv::MuPP { mvar, .. } if mvar == a => d.clone(),
        Deriv::MuPP { mvar, ty, prem } if avoid.contains(mvar) => {
            let v2 = names::fresh(mvar, |c| avoid.contains(c));
            Deriv::MuPP {
                mvar: v2.clone(),
                ty: ty.clone(),
                prem: Box::new(subst_m_go(&rename_m_deriv(prem, mvar, &v2), a, repl, avoid)),
            }
        }
        Deriv::ImpI { var, domain, prem } if avoid.contains(var) => {
            let v2 = names::fresh(var, |c| avoid.contains(c));
            Deriv::ImpI {
                var: v2.clone(),
                domain: domain.clone(),
                prem: Box::new(subst_m_go(&rename_l_deriv(prem, var, &v2), a, repl, avoid)),
            }
        }
        _ => map_premises(d, &mut |p| subst_m_go(p, a, repl, avoid)),
    }
}

// Keep a parameter list clear of the substitution's free individual
// variables, renaming inside `body` where needed.
fn avoid_params(params: &[String], body: &Formula, taken: &dyn Fn(&str) -> bool) -> (Vec<String>, Formula) {
    let mut ps = params.to_vec();
    let mut b = body.clone();
    for p in ps.iter_mut() {
        if taken(p) {
            let p2 = names::fresh(p, |c| taken(c) || params.contains(&c.to_string()));
            b = b.subst_ind(p, &fvar(p2.clone()));
            *p = p2;
        }
    }
    (ps, b)
}

/// First-order substitution lemma: replace the individual variable `z` by
/// `w` in every formula and witness of the derivation. Subjects are
/// untouched. Binders shadowing `z` stop the descent; binders that would
/// capture `w`'s variables are renamed.
fn inst_ind_deriv(d: &Deriv, z: &str, w: &FoTerm) -> Deriv {
    let wvars = w.vars();
    match d {
        Deriv::Ax { ctx, var } => {
            let sub = |m: &std::collections::BTreeMap<String, Formula>| {
                m.iter().map(|(k, f)| (k.clone(), f.subst_ind(z, w))).collect()
            };
            Deriv::Ax { ctx: Ctx { lam: sub(&ctx.lam), mu: sub(&ctx.mu) }, var: var.clone() }
        }
        Deriv::ImpI { var, domain, prem } => Deriv::ImpI {
            var: var.clone(),
            domain: domain.as_ref().map(|f| f.subst_ind(z, w)),
            prem: Box::new(inst_ind_deriv(prem, z, w)),
        },
        Deriv::AllIInd { var, prem } => {
            if var == z {
                d.clone()
            } else if wvars.contains(var) {
                let v2 = names::fresh(var, |c| wvars.contains(c) || c == z);
                let renamed = inst_ind_deriv(prem, var, &fvar(v2.clone()));
                Deriv::AllIInd { var: v2, prem: Box::new(inst_ind_deriv(&renamed, z, w)) }
            } else {
                Deriv::AllIInd { var: var.clone(), prem: Box::new(inst_ind_deriv(prem, z, w)) }
            }
        }
        Deriv::AllEInd { witness, prem } => Deriv::AllEInd {
            witness: witness.subst(z, w),
            prem: Box::new(inst_ind_deriv(prem, z, w)),
        },
        Deriv::AllEPred { params, body, prem } => {
            let prem2 = Box::new(inst_ind_deriv(prem, z, w));
            if params.iter().any(|p| p == z) {
                // z is shadowed inside the parameterized formula.
                let (ps, b) = avoid_params(params, body, &|c| wvars.contains(c));
                Deriv::AllEPred { params: ps, body: b, prem: prem2 }
            } else {
                let (ps, b) = avoid_params(params, body, &|c| wvars.contains(c));
                Deriv::AllEPred { params: ps, body: b.subst_ind(z, w), prem: prem2 }
            }
        }
        Deriv::Eq { var, template, from, to, prem } => {
            let (q, templ) = if var == z || wvars.contains(var) {
                let q2 = names::fresh(var, |c| wvars.contains(c) || c == z);
                (q2.clone(), template.subst_ind(var, &fvar(q2)))
            } else {
                (var.clone(), template.clone())
            };
            Deriv::Eq {
                var: q,
                template: templ.subst_ind(z, w),
                from: from.subst(z, w),
                to: to.subst(z, w),
                prem: Box::new(inst_ind_deriv(prem, z, w)),
            }
        }
        Deriv::MuPP { mvar, ty, prem } => Deriv::MuPP {
            mvar: mvar.clone(),
            ty: ty.as_ref().map(|f| f.subst_ind(z, w)),
            prem: Box::new(inst_ind_deriv(prem, z, w)),
        },
        Deriv::MuLmu { binder, name, binder_ty, prem } => Deriv::MuLmu {
            binder: binder.clone(),
            name: name.clone(),
            binder_ty: binder_ty.as_ref().map(|f| f.subst_ind(z, w)),
            prem: Box::new(inst_ind_deriv(prem, z, w)),
        },
        _ => map_premises(d, &mut |p| inst_ind_deriv(p, z, w)),
    }
}

/// Second-order substitution lemma: replace the predicate variable `xp` (of
/// the parameterized formula `(ps) g`) throughout the derivation.
fn inst_pred_deriv(d: &Deriv, xp: &str, ps: &[String], g: &Formula) -> Result<Deriv, String> {
    let gpreds = g.free_pred_vars();
    let gexposed: std::collections::BTreeSet<String> = g
        .free_ind_vars()
        .into_iter()
        .filter(|v| !ps.contains(v))
        .collect();
    Ok(match d {
        Deriv::Ax { ctx, var } => {
            let sub = |m: &std::collections::BTreeMap<String, Formula>| -> Result<_, String> {
                m.iter()
                    .map(|(k, f)| Ok((k.clone(), f.subst_pred(xp, ps, g)?)))
                    .collect::<Result<std::collections::BTreeMap<String, Formula>, String>>()
            };
            Deriv::Ax { ctx: Ctx { lam: sub(&ctx.lam)?, mu: sub(&ctx.mu)? }, var: var.clone() }
        }
        Deriv::ImpI { var, domain, prem } => Deriv::ImpI {
            var: var.clone(),
            domain: match domain {
                Some(f) => Some(f.subst_pred(xp, ps, g)?),
                None => None,
            },
            prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
        },
        Deriv::AllIInd { var, prem } => {
            if gexposed.contains(var) {
                let v2 = names::fresh(var, |c| gexposed.contains(c));
                let renamed = inst_ind_deriv(prem, var, &fvar(v2.clone()));
                Deriv::AllIInd { var: v2, prem: Box::new(inst_pred_deriv(&renamed, xp, ps, g)?) }
            } else {
                Deriv::AllIInd {
                    var: var.clone(),
                    prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
                }
            }
        }
        Deriv::AllEInd { witness, prem } => Deriv::AllEInd {
            witness: witness.clone(),
            prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
        },
        Deriv::AllIPred { pvar, arity, prem } => {
            if pvar == xp {
                d.clone() // shadowed
            } else if gpreds.contains(pvar) {
                // Rename the generalized predicate out of g's way.
                let p2 = names::fresh(pvar, |c| gpreds.contains(c) || c == xp);
                let vs: Vec<String> = (0..*arity).map(|i| format!("r{i}")).collect();
                let fresh_atom = atom(p2.clone(), vs.iter().map(|v| fvar(v.clone())).collect());
                let renamed = inst_pred_deriv(prem, pvar, &vs, &fresh_atom)?;
                Deriv::AllIPred {
                    pvar: p2,
                    arity: *arity,
                    prem: Box::new(inst_pred_deriv(&renamed, xp, ps, g)?),
                }
            } else {
                Deriv::AllIPred {
                    pvar: pvar.clone(),
                    arity: *arity,
                    prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
                }
            }
        }
        Deriv::AllEPred { params, body, prem } => {
            let (qs, b) = avoid_params(params, body, &|c| gexposed.contains(c));
            Deriv::AllEPred {
                params: qs,
                body: b.subst_pred(xp, ps, g)?,
                prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
            }
        }
        Deriv::Eq { var, template, from, to, prem } => {
            let (q, templ) = if gexposed.contains(var) {
                let q2 = names::fresh(var, |c| gexposed.contains(c));
                (q2.clone(), template.subst_ind(var, &fvar(q2)))
            } else {
                (var.clone(), template.clone())
            };
            Deriv::Eq {
                var: q,
                template: templ.subst_pred(xp, ps, g)?,
                from: from.clone(),
                to: to.clone(),
                prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
            }
        }
        Deriv::MuPP { mvar, ty, prem } => Deriv::MuPP {
            mvar: mvar.clone(),
            ty: match ty {
                Some(f) => Some(f.subst_pred(xp, ps, g)?),
                None => None,
            },
            prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
        },
        Deriv::MuLmu { binder, name, binder_ty, prem } => Deriv::MuLmu {
            binder: binder.clone(),
            name: name.clone(),
            binder_ty: match binder_ty {
                Some(f) => Some(f.subst_pred(xp, ps, g)?),
                None => None,
            },
            prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?),
        },
        Deriv::ImpE { fun, arg } => Deriv::ImpE {
            fun: Box::new(inst_pred_deriv(fun, xp, ps, g)?),
            arg: Box::new(inst_pred_deriv(arg, xp, ps, g)?),
        },
        Deriv::YFix { prem } => Deriv::YFix { prem: Box::new(inst_pred_deriv(prem, xp, ps, g)?) },
    })
}

/// Cancel paired quantifier eliminations/introductions in a wrapper chain by
/// instantiating the derivation underneath; the result proves the same
/// judgment as the full chain but is structurally bare.
fn collapse_chain(chain: &[&Deriv], core: &Deriv) -> Result<Deriv, String> {
    let mut d = core.clone();
    let mut intros: Vec<&Deriv> = Vec::new();
    for w in chain.iter().rev() {
        match w {
            Deriv::AllIInd { .. } | Deriv::AllIPred { .. } => intros.push(w),
            Deriv::AllEInd { witness, .. } => match intros.pop() {
                Some(Deriv::AllIInd { var, .. }) => d = inst_ind_deriv(&d, var, witness),
                _ => {
                    return Err(
                        "an individual instantiation without a matching generalization".into()
                    )
                }
            },
            Deriv::AllEPred { params, body, .. } => match intros.pop() {
                Some(Deriv::AllIPred { pvar, .. }) => {
                    d = inst_pred_deriv(&d, pvar, params, body)?
                }
                _ => {
                    return Err(
                        "a predicate instantiation without a matching generalization".into()
                    )
                }
            },
            Deriv::Eq { var, template, from, to, .. } => {
                if !intros.is_empty() {
                    return Err(
                        "unsupported: an equation step above a pending generalization".into()
                    );
                }
                d = commute_eq_core(var, template, from, to, &d)?;
            }
            _ => unreachable!("chains contain only transparent nodes"),
        }
    }
    if !intros.is_empty() {
        return Err("unsupported: uneliminated generalizations wrap the redex typing".into());
    }
    Ok(d)
}

/// Push an equation step below a structural node, retyping the bound
/// variable's axiom leaves with the reversed equation. The node kind is
/// preserved, so callers collapsing towards an abstraction or μ rule keep
/// their bare core.
fn commute_eq_core(
    q: &str,
    template: &Formula,
    from: &FoTerm,
    to: &FoTerm,
    d: &Deriv,
) -> Result<Deriv, String> {
    match d {
        Deriv::ImpI { var, prem, .. } => {
            let Formula::Imp(t1, t2) = template else {
                return Err(
                    "an equation step retypes an abstraction at a non-implication template"
                        .into(),
                );
            };
            let fix = eq_rule(
                q,
                (**t1).clone(),
                to.clone(),
                from.clone(),
                ax_l(Ctx::new().l(var.clone(), t1.subst_ind(q, to)), var.clone()),
            );
            Ok(Deriv::ImpI {
                var: var.clone(),
                domain: Some(t1.subst_ind(q, to)),
                prem: Box::new(eq_rule(
                    q,
                    (**t2).clone(),
                    from.clone(),
                    to.clone(),
                    subst_l_deriv(prem, var, &fix),
                )),
            })
        }
        Deriv::MuPP { mvar, prem, .. } => {
            let fix = eq_rule(
                q,
                neg(template.clone()),
                to.clone(),
                from.clone(),
                ax_m(
                    Ctx::new().m(mvar.clone(), neg(template.subst_ind(q, to))),
                    mvar.clone(),
                ),
            );
            Ok(Deriv::MuPP {
                mvar: mvar.clone(),
                ty: Some(template.subst_ind(q, to)),
                prem: Box::new(subst_m_deriv(prem, mvar, &fix)),
            })
        }
        _ => Err("an equation step wraps an unexpected rule".into()),
    }
}

// ---------------------------------------------------------------------------
// The per-rule transforms.

fn formula_of(d: &Deriv, e: &Equations, opts: &TypingOpts) -> Result<Formula, String> {
    Ok(validate(d, System::Mupp, e, opts)
        .map_err(|err| err.to_string())?
        .judgment
        .formula)
}

fn transform_local(
    d: &Deriv,
    redex: &MuppRedex,
    rel_occ: &[u8],
    e: &Equations,
    opts: &TypingOpts,
) -> Result<Deriv, String> {
    let (chain, core) = split_chain(d);
    match redex.rule {
        MuppRule::CLam => {
            let Deriv::ImpE { fun, arg } = core else {
                return Err("the β-redex is not typed by an application rule".into());
            };
            let (fch, fcore) = split_chain(fun);
            if !matches!(fcore, Deriv::ImpI { .. }) {
                return Err("the β-redex head is not typed by an abstraction rule".into());
            }
            let Deriv::ImpI { var, prem, .. } = collapse_chain(&fch, fcore)? else {
                unreachable!("instantiation preserves the node kind")
            };
            Ok(rewrap(&chain, subst_l_deriv(&prem, &var, arg)))
        }
        MuppRule::CMu => {
            let Deriv::ImpE { fun, arg } = core else {
                return Err("the μ-redex is not typed by an application rule".into());
            };
            let (fch, fcore) = split_chain(fun);
            if !matches!(fcore, Deriv::MuPP { .. }) {
                return Err("the μ-redex head is not typed by the μ rule".into());
            }
            let mu = collapse_chain(&fch, fcore)?;
            let f = formula_of(&mu, e, opts)?;
            let Some((_, bb)) = f.as_imp() else {
                return Err(format!("the μ-redex head has non-implication type {f}"));
            };
            let bb = bb.clone();
            let Deriv::MuPP { mvar, prem, .. } = mu else { unreachable!() };
            let y = names::fresh("y", |_| false);
            let b = names::fresh("b", |_| false);
            // W = \y.(#b (y v)) : ¬F, the continuation composed with the call.
            let w = imp_i_dom(
                y.clone(),
                f.clone(),
                imp_e(
                    ax_m(Ctx::new().m(b.clone(), neg(bb.clone())), b.clone()),
                    imp_e(ax_l(Ctx::new().l(y.clone(), f), y), arg.as_ref().clone()),
                ),
            );
            let new = Deriv::MuPP {
                mvar: b,
                ty: Some(bb),
                prem: Box::new(subst_m_deriv(&prem, &mvar, &w)),
            };
            Ok(rewrap(&chain, new))
        }
        MuppRule::S1 => Err(
            "the discard rule fires under an applied μ-variable, a shape no derivation types"
                .into(),
        ),
        MuppRule::S2 => {
            let Deriv::MuPP { mvar, ty, prem } = core else {
                return Err("the μ-simplification is not typed by the μ rule".into());
            };
            let (ich, icore) = split_chain(prem);
            if !ich.is_empty() {
                return Err("unsupported: wrappers between the two μ abstractions".into());
            }
            let Deriv::MuPP { mvar: inner, prem: inner_prem, .. } = icore else {
                return Err("the inner μ abstraction is not typed by the μ rule".into());
            };
            // The inner μ-variable is a continuation of type ¬⊥; the
            // identity inhabits it.
            let x = names::fresh("x", |_| false);
            let idd = imp_i_dom(
                x.clone(),
                bottom(),
                ax_l(Ctx::new().l(x.clone(), bottom()), x),
            );
            let new = Deriv::MuPP {
                mvar: mvar.clone(),
                ty: ty.clone(),
                prem: Box::new(subst_m_deriv(inner_prem, inner, &idd)),
            };
            Ok(rewrap(&chain, new))
        }
        MuppRule::S3 => {
            let Deriv::ImpE { arg, .. } = core else {
                return Err("the collapse rule is not typed by an application rule".into());
            };
            Ok(rewrap(&chain, arg.as_ref().clone()))
        }
        MuppRule::S4 => {
            let Deriv::ImpE { fun, arg } = core else {
                return Err("the continuation rule is not typed by an application rule".into());
            };
            let (ach, acore) = split_chain(arg);
            if !matches!(acore, Deriv::MuPP { .. }) {
                return Err("the named μ abstraction is not typed by the μ rule".into());
            }
            let mu = collapse_chain(&ach, acore)?;
            let b = formula_of(&mu, e, opts)?;
            let Deriv::MuPP { mvar, prem, .. } = mu else { unreachable!() };
            let y = names::fresh("y", |_| false);
            // W = \y.(#b y) : ¬B, eta-expanding the outer continuation.
            let w = imp_i_dom(
                y.clone(),
                b.clone(),
                imp_e(fun.as_ref().clone(), ax_l(Ctx::new().l(y.clone(), b), y)),
            );
            Ok(rewrap(&chain, subst_m_deriv(&prem, &mvar, &w)))
        }
        MuppRule::S5 => {
            let Deriv::MuPP { mvar, prem, .. } = core else {
                return Err("the η-style rule is not typed by the μ rule".into());
            };
            let f = formula_of(core, e, opts)?;
            // The μ's type may quantify over an implication. Strip the
            // prefix (renamed fresh), build the pulled-out abstraction at
            // the implication core, and re-generalize outside.
            enum Quant {
                Ind(String),
                Pred(String, usize),
            }
            let mut prefix: Vec<Quant> = Vec::new();
            let mut cur = f.clone();
            loop {
                match cur {
                    Formula::AllInd(x, body) => {
                        let x2 = names::fresh(&x, |_| false);
                        cur = body.subst_ind(&x, &fvar(x2.clone()));
                        prefix.push(Quant::Ind(x2));
                    }
                    Formula::AllPred(xp, k, body) => {
                        let p2 = names::fresh(&xp, |_| false);
                        let vs: Vec<String> = (0..k).map(|i| format!("r{i}")).collect();
                        let head =
                            atom(p2.clone(), vs.iter().map(|v| fvar(v.clone())).collect());
                        cur = body
                            .subst_pred(&xp, &vs, &head)
                            .map_err(|err| format!("renaming the quantifier prefix: {err}"))?;
                        prefix.push(Quant::Pred(p2, k));
                    }
                    other => {
                        cur = other;
                        break;
                    }
                }
            }
            let Some((a1, b1)) = cur.as_imp() else {
                return Err(format!("the μ abstraction has non-implication type {f}"));
            };
            let (a1, b1) = (a1.clone(), b1.clone());
            let z = names::fresh("z", |_| false);
            let y = names::fresh("y", |_| false);
            let b = names::fresh("b", |_| false);
            // y : F self-instantiated down to the implication core A → B.
            let mut yd = ax_l(Ctx::new().l(y.clone(), f.clone()), y.clone());
            for q in &prefix {
                yd = match q {
                    Quant::Ind(x) => all_e_ind(fvar(x.clone()), yd),
                    Quant::Pred(xp, k) => {
                        let vs: Vec<String> = (0..*k).map(|i| format!("r{i}")).collect();
                        let head =
                            atom(xp.clone(), vs.iter().map(|v| fvar(v.clone())).collect());
                        all_e_pred(vs, head, yd)
                    }
                };
            }
            // W = \y.(#b (y z)) : ¬F with z : A free; the λ pulled outside.
            let w = imp_i_dom(
                y,
                f,
                imp_e(
                    ax_m(Ctx::new().m(b.clone(), neg(b1.clone())), b.clone()),
                    imp_e(yd, ax_l(Ctx::new().l(z.clone(), a1.clone()), z.clone())),
                ),
            );
            let mut new = imp_i_dom(
                z,
                a1,
                Deriv::MuPP {
                    mvar: b,
                    ty: Some(b1),
                    prem: Box::new(subst_m_deriv(prem, mvar, &w)),
                },
            );
            for q in prefix.iter().rev() {
                new = match q {
                    Quant::Ind(x) => all_i_ind(x.clone(), new),
                    Quant::Pred(xp, k) => all_i_pred(xp.clone(), *k, new),
                };
            }
            Ok(rewrap(&chain, new))
        }
        MuppRule::S6 => {
            if !matches!(core, Deriv::MuPP { .. }) {
                return Err("the extraction rule is not typed by the μ rule".into());
            }
            let occ = extract_at(core, rel_occ)?;
            let (_, occ_core) = split_chain(occ);
            let Deriv::ImpE { arg, .. } = occ_core else {
                return Err("the named occurrence is not typed by an application rule".into());
            };
            Ok(rewrap(&chain, arg.as_ref().clone()))
        }
        MuppRule::Xi0
        | MuppRule::XiLamVac
        | MuppRule::XiMuVac
        | MuppRule::XiHit
        | MuppRule::XiLeft
        | MuppRule::XiRight => {
            Err("ξ register rules are machine-internal and outside the typed calculus".into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::mupp::{redexes_mupp, MuppMode};
    use crate::proofs;
    use crate::syntax::mupp::MuppTerm;
    use crate::syntax::Path;
    use crate::typing::derivation::{all_e_ind, imp_i, mu_pp, mu_pp_ty};
    use crate::typing::fo::b1;
    use crate::typing::formula::{bool_of, imp};
    use crate::typing::validate::Subject;

    fn opts() -> TypingOpts {
        TypingOpts::default()
    }

    fn subject_of(d: &Deriv) -> MuppTerm {
        match validate(d, System::Mupp, &Equations::or_bool(), &opts())
            .expect("valid")
            .judgment
            .subject
        {
            Subject::Mupp(t) => t,
            Subject::Lmu(_) => panic!("wrong system"),
        }
    }

    /// Apply every core redex of the subject and check the transformed
    /// derivation validates to the same formula with the reduct as subject.
    /// Returns the successor (term, derivation) pairs.
    fn check_all_steps(d: &Deriv) -> Vec<(MuppTerm, Deriv)> {
        let e = Equations::or_bool();
        let t = subject_of(d);
        let f = formula_of(d, &e, &opts()).unwrap();
        let mut out = Vec::new();
        for r in redexes_mupp(&t, MuppMode::Core) {
            let t2 = r.apply(&t);
            let d2 = transform_step(d, &r, &e, &opts()).unwrap_or_else(|err| {
                panic!("{:?} at {} on {t}: {err}", r.rule, r.at)
            });
            let c2 = validate(&d2, System::Mupp, &e, &opts()).unwrap_or_else(|err| {
                panic!("{:?} at {} on {t}: transformed derivation invalid: {err}", r.rule, r.at)
            });
            assert!(
                c2.judgment.formula.alpha_eq(&f),
                "{:?} on {t}: formula changed from {f} to {}",
                r.rule,
                c2.judgment.formula
            );
            match &c2.judgment.subject {
                Subject::Mupp(s) => assert!(
                    s.alpha_eq(&t2),
                    "{:?} on {t}: subject {s} is not the reduct {t2}",
                    r.rule
                ),
                Subject::Lmu(_) => panic!("wrong system"),
            }
            out.push((t2, d2));
        }
        out
    }

    /// [DERIVED: validator as oracle on each reduct] β steps preserve the
    /// derived type, including under instantiation chains.
    #[test]
    fn clam_step_plain_and_chained() {
        // ((\x.x) btrue) : Bool[B1]
        let bb = bool_of(b1());
        let d = imp_e(
            imp_i("x", ax_l(Ctx::new().l("x", bb), "x")),
            proofs::btrue_deriv(),
        );
        let succs = check_all_steps(&d);
        assert_eq!(succs.len(), 1);

        // ((por btrue) btrue) : Bool[or(B1,B1)] — the head is wrapped in
        // two first-order instantiations over two generalizations.
        let por2 = imp_e(
            imp_e(
                all_e_ind(b1(), all_e_ind(b1(), proofs::por_deriv())),
                proofs::btrue_deriv(),
            ),
            proofs::btrue_deriv(),
        );
        let succs = check_all_steps(&por2);
        assert!(!succs.is_empty());
    }

    /// [DERIVED: validator as oracle] The continuation-capturing step
    /// rebuilds a validating derivation, as does the η-style extraction.
    #[test]
    fn cmu_s5_s6_steps_on_a_control_term() {
        // ((mu #a.(#a \x.x)) btrue) : Bool[B1]; redexes: C_mu at the root
        // and S5 under the μ.
        let bb = bool_of(b1());
        let f = imp(bb.clone(), bb.clone());
        let ctx = Ctx::new().m("a", neg(f.clone()));
        let idb = imp_i("x", ax_l(Ctx::new().l("x", bb), "x"));
        let mu = mu_pp("a", imp_e(ax_m(ctx, "a"), idb));
        let d = imp_e(mu, proofs::btrue_deriv());
        let succs = check_all_steps(&d);
        assert!(succs.len() >= 2, "expected both C_mu and S5 instances");

        // mu #a.(#a btrue) : Bool[B1] — S6 extracts btrue.
        let ctx = Ctx::new().m("a", neg(bool_of(b1())));
        let d = mu_pp("a", imp_e(ax_m(ctx, "a"), proofs::btrue_deriv()));
        let succs = check_all_steps(&d);
        assert!(!succs.is_empty());
        assert!(succs.iter().any(|(t, _)| t.alpha_eq(&crate::programs::btrue())));
    }

    /// [DERIVED: validator as oracle] The simplification rules on open
    /// subjects: S2 (μ over μ), S3 (named name), S4 (named μ).
    #[test]
    fn s2_s3_s4_steps() {
        let p = atom("P", vec![]);
        let q = atom("Q", vec![]);
        // S2: mu #c.mu #d.w with w : ⊥ free.
        let leaf = ax_l(Ctx::new().l("w", bottom()), "w");
        let d = mu_pp_ty("c", p.clone(), mu_pp_ty("d", bottom(), leaf));
        assert_eq!(check_all_steps(&d).len(), 1);

        // S3: (#b (#c w)) with b : ¬⊥, c : ¬Q, w : Q.
        let ctx = Ctx::new().l("w", q.clone()).m("b", neg(bottom())).m("c", neg(q.clone()));
        let d = imp_e(
            ax_m(ctx.clone(), "b"),
            imp_e(ax_m(ctx.clone(), "c"), ax_l(ctx, "w")),
        );
        assert_eq!(check_all_steps(&d).len(), 1);

        // S4: (#b mu #a.(#a w)) with b : ¬P, w : P.
        let ctx = Ctx::new().l("w", p.clone()).m("b", neg(p.clone()));
        let inner_ctx = ctx.clone().m("a", neg(p.clone()));
        let mu = mu_pp("a", imp_e(ax_m(inner_ctx.clone(), "a"), ax_l(inner_ctx, "w")));
        let d = imp_e(ax_m(ctx, "b"), mu);
        // Redexes here: S4 at the root and S6 under the μ.
        assert!(check_all_steps(&d).len() >= 2);
    }

    /// [TRIVIAL] Untypable machine rules are rejected outright.
    #[test]
    fn untypable_rules_are_rejected() {
        let e = Equations::empty();
        let dummy = proofs::btrue_deriv();
        for rule in [MuppRule::S1, MuppRule::Xi0, MuppRule::XiHit] {
            let r = MuppRedex {
                rule,
                at: Path(vec![]),
                replace_at: Path(vec![]),
                reduct: crate::syntax::mupp::var("x"),
            };
            assert!(transform_step(&dummy, &r, &e, &opts()).is_err(), "{rule:?}");
        }
    }

    /// [DERIVED: validator as oracle along every edge] Walk the reduction
    /// closure of typed seeds, transforming derivations edge by edge: at
    /// least 30 subject-reduction instances all validate with unchanged
    /// formulas. This is the mechanical heart of the subject-reduction
    /// evidence.
    #[test]
    fn closure_walk_yields_many_validated_instances() {
        let bb = bool_of(b1());
        let f = imp(bb.clone(), bb.clone());
        let ctx = Ctx::new().m("a", neg(f.clone()));
        let idb = imp_i("x", ax_l(Ctx::new().l("x", bb), "x"));
        let control = imp_e(
            mu_pp("a", imp_e(ax_m(ctx, "a"), idb)),
            proofs::btrue_deriv(),
        );
        let por2 = imp_e(
            imp_e(
                all_e_ind(b1(), all_e_ind(b1(), proofs::por_deriv())),
                proofs::btrue_deriv(),
            ),
            proofs::btrue_deriv(),
        );
        let producer2 = imp_e(
            all_e_ind(crate::typing::fo::s_n(0), proofs::producer_deriv(&[2]).unwrap()),
            proofs::church_deriv(0),
        );
        let seeds = vec![control, por2, producer2];
        let mut seen: std::collections::BTreeSet<String> =
            seeds.iter().map(|d| subject_of(d).canon_key()).collect();
        let mut queue: std::collections::VecDeque<(Deriv, usize)> =
            seeds.into_iter().map(|d| (d, 0)).collect();
        // 36 instances comfortably exceed the bar while keeping the walk
        // fast; depth 4 keeps successors diverse.
        let mut instances = 0usize;
        while let Some((d, depth)) = queue.pop_front() {
            if instances >= 36 {
                break;
            }
            for (t2, d2) in check_all_steps(&d) {
                instances += 1;
                if depth + 1 < 4 && seen.insert(t2.canon_key()) {
                    queue.push_back((d2, depth + 1));
                }
            }
        }
        assert!(
            instances >= 30,
            "expected at least 30 validated instances, got {instances}"
        );
    }
}
