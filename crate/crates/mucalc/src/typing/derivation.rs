//! Explicit typing derivations: proof scripts whose nodes name a rule and
//! its instantiation data, with a JSON interchange format.
//!
//! A derivation is checked, never inferred: second-order typing is not
//! syntax-directed, so the quantifier and equation rules carry their
//! witnesses explicitly. Leaves (axioms) carry the full context; every other
//! rule manages the context of its conclusion from its premises, so any
//! subtree of a valid derivation is itself a valid derivation.
//!
//! JSON format: `{"rule": <tag>, "inst": {..}, "premises": [..]}` with tags
//! `ax`, `imp_i`, `imp_e`, `forall_i_ind`, `forall_e_ind`, `forall_i_pred`,
//! `forall_e_pred`, `eq`, `mu`, `yfix`. Formulas and first-order terms are
//! written in the plain-text grammar of this crate. The `mu` tag covers both
//! systems and is disambiguated by its instantiation keys: `binder`/`name`
//! for the named (deterministic) system, `mvar` for the non-deterministic
//! one.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::syntax::SyntaxError;
use crate::typing::fo::FoTerm;
use crate::typing::formula::{parse_formula, parse_foterm, Formula};

/// Context attached to an axiom leaf: λ-variable and μ-variable typings.
/// For the non-deterministic system the μ entries are the full (negated)
/// formulas; for the deterministic system they are the right-hand-side
/// formulas as named conclusions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ctx {
    pub lam: BTreeMap<String, Formula>,
    pub mu: BTreeMap<String, Formula>,
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }
    /// Add a λ-variable typing.
    pub fn l(mut self, x: impl Into<String>, a: Formula) -> Ctx {
        self.lam.insert(x.into(), a);
        self
    }
    /// Add a μ-variable typing.
    pub fn m(mut self, a: impl Into<String>, b: Formula) -> Ctx {
        self.mu.insert(a.into(), b);
        self
    }
}

/// Which kind of variable an axiom leaf types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxVar {
    Lam(String),
    Mu(String),
}

/// A derivation node. Field names follow the JSON instantiation keys.
#[derive(Debug, Clone, PartialEq)]
pub enum Deriv {
    /// Rule 1: `Γ, x:A ⊢ x : A` (and, in the non-deterministic system,
    /// `Γ, α:¬B ⊢ α : ¬B`).
    Ax { ctx: Ctx, var: AxVar },
    /// Rule 2: abstraction. `domain` may be omitted when the variable
    /// occurs in the premise context.
    ImpI { var: String, domain: Option<Formula>, prem: Box<Deriv> },
    /// Rule 3: application.
    ImpE { fun: Box<Deriv>, arg: Box<Deriv> },
    /// Rule 4: first-order generalization (side condition: the variable is
    /// not free in the context).
    AllIInd { var: String, prem: Box<Deriv> },
    /// Rule 5: first-order instantiation at a witness term.
    AllEInd { witness: FoTerm, prem: Box<Deriv> },
    /// Rule 6: second-order generalization.
    AllIPred { pvar: String, arity: usize, prem: Box<Deriv> },
    /// Rule 7: second-order instantiation at the parameterized formula
    /// `(params) body`.
    AllEPred { params: Vec<String>, body: Formula, prem: Box<Deriv> },
    /// Rule 8: replace `from` by `to` (equal modulo the equations) inside
    /// the template: premise `template[var:=from]`, conclusion
    /// `template[var:=to]`.
    Eq { var: String, template: Formula, from: FoTerm, to: FoTerm, prem: Box<Deriv> },
    /// Rule 9 of the non-deterministic system: from `Γ, α:¬B ⊢ u : ⊥`
    /// conclude `Γ ⊢ μα.u : B`. `ty` annotates B when α is not in the
    /// premise context.
    MuPP { mvar: String, ty: Option<Formula>, prem: Box<Deriv> },
    /// Rule 9 of the deterministic system: from `Γ ⊢ t : A , β:B, Δ`
    /// conclude `Γ ⊢ μβ[α]t : B , α:A, Δ` (α ≠ β), or `Γ ⊢ μα[α]t : A , Δ`.
    /// `binder_ty` annotates B when β is not in the premise context.
    MuLmu { binder: String, name: String, binder_ty: Option<Formula>, prem: Box<Deriv> },
    /// The optional fixed-point rule: from `Γ ⊢′ F : A -> A` conclude
    /// `Γ ⊢′ (Y F) : A`.
    YFix { prem: Box<Deriv> },
}

// Constructor helpers: they keep the library derivations readable.
pub fn ax_l(ctx: Ctx, x: impl Into<String>) -> Deriv {
    Deriv::Ax { ctx, var: AxVar::Lam(x.into()) }
}
pub fn ax_m(ctx: Ctx, a: impl Into<String>) -> Deriv {
    Deriv::Ax { ctx, var: AxVar::Mu(a.into()) }
}
pub fn imp_i(var: impl Into<String>, prem: Deriv) -> Deriv {
    Deriv::ImpI { var: var.into(), domain: None, prem: Box::new(prem) }
}
pub fn imp_i_dom(var: impl Into<String>, domain: Formula, prem: Deriv) -> Deriv {
    Deriv::ImpI { var: var.into(), domain: Some(domain), prem: Box::new(prem) }
}
pub fn imp_e(fun: Deriv, arg: Deriv) -> Deriv {
    Deriv::ImpE { fun: Box::new(fun), arg: Box::new(arg) }
}
pub fn all_i_ind(var: impl Into<String>, prem: Deriv) -> Deriv {
    Deriv::AllIInd { var: var.into(), prem: Box::new(prem) }
}
pub fn all_e_ind(witness: FoTerm, prem: Deriv) -> Deriv {
    Deriv::AllEInd { witness, prem: Box::new(prem) }
}
pub fn all_i_pred(pvar: impl Into<String>, arity: usize, prem: Deriv) -> Deriv {
    Deriv::AllIPred { pvar: pvar.into(), arity, prem: Box::new(prem) }
}
pub fn all_e_pred(params: Vec<String>, body: Formula, prem: Deriv) -> Deriv {
    Deriv::AllEPred { params, body, prem: Box::new(prem) }
}
pub fn eq_rule(
    var: impl Into<String>,
    template: Formula,
    from: FoTerm,
    to: FoTerm,
    prem: Deriv,
) -> Deriv {
    Deriv::Eq { var: var.into(), template, from, to, prem: Box::new(prem) }
}
pub fn mu_pp(mvar: impl Into<String>, prem: Deriv) -> Deriv {
    Deriv::MuPP { mvar: mvar.into(), ty: None, prem: Box::new(prem) }
}
pub fn mu_pp_ty(mvar: impl Into<String>, ty: Formula, prem: Deriv) -> Deriv {
    Deriv::MuPP { mvar: mvar.into(), ty: Some(ty), prem: Box::new(prem) }
}
pub fn mu_lmu(binder: impl Into<String>, name: impl Into<String>, prem: Deriv) -> Deriv {
    Deriv::MuLmu { binder: binder.into(), name: name.into(), binder_ty: None, prem: Box::new(prem) }
}
pub fn mu_lmu_ty(
    binder: impl Into<String>,
    name: impl Into<String>,
    binder_ty: Formula,
    prem: Deriv,
) -> Deriv {
    Deriv::MuLmu {
        binder: binder.into(),
        name: name.into(),
        binder_ty: Some(binder_ty),
        prem: Box::new(prem),
    }
}
pub fn yfix(prem: Deriv) -> Deriv {
    Deriv::YFix { prem: Box::new(prem) }
}

impl Deriv {
    /// Number of rule instances in the tree.
    pub fn node_count(&self) -> usize {
        1 + self.premises().iter().map(|p| p.node_count()).sum::<usize>()
    }

    /// The premises, left to right.
    pub fn premises(&self) -> Vec<&Deriv> {
        match self {
            Deriv::Ax { .. } => Vec::new(),
            Deriv::ImpI { prem, .. }
            | Deriv::AllIInd { prem, .. }
            | Deriv::AllEInd { prem, .. }
            | Deriv::AllIPred { prem, .. }
            | Deriv::AllEPred { prem, .. }
            | Deriv::Eq { prem, .. }
            | Deriv::MuPP { prem, .. }
            | Deriv::MuLmu { prem, .. }
            | Deriv::YFix { prem } => vec![prem],
            Deriv::ImpE { fun, arg } => vec![fun, arg],
        }
    }

    /// JSON rule tag of this node.
    pub fn tag(&self) -> &'static str {
        match self {
            Deriv::Ax { .. } => "ax",
            Deriv::ImpI { .. } => "imp_i",
            Deriv::ImpE { .. } => "imp_e",
            Deriv::AllIInd { .. } => "forall_i_ind",
            Deriv::AllEInd { .. } => "forall_e_ind",
            Deriv::AllIPred { .. } => "forall_i_pred",
            Deriv::AllEPred { .. } => "forall_e_pred",
            Deriv::Eq { .. } => "eq",
            Deriv::MuPP { .. } | Deriv::MuLmu { .. } => "mu",
            Deriv::YFix { .. } => "yfix",
        }
    }

    pub fn to_json(&self) -> Value {
        let inst = match self {
            Deriv::Ax { ctx, var } => {
                let enc = |m: &BTreeMap<String, Formula>| {
                    Value::Object(
                        m.iter()
                            .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
                            .collect::<Map<_, _>>(),
                    )
                };
                let mut inst = json!({"ctx": {"lam": enc(&ctx.lam), "mu": enc(&ctx.mu)}});
                match var {
                    AxVar::Lam(x) => inst["var"] = json!(x),
                    AxVar::Mu(a) => inst["mvar"] = json!(a),
                }
                inst
            }
            Deriv::ImpI { var, domain, .. } => match domain {
                Some(d) => json!({"var": var, "domain": d.to_string()}),
                None => json!({"var": var}),
            },
            Deriv::ImpE { .. } | Deriv::YFix { .. } => json!({}),
            Deriv::AllIInd { var, .. } => json!({"var": var}),
            Deriv::AllEInd { witness, .. } => json!({"witness": witness.to_string()}),
            Deriv::AllIPred { pvar, arity, .. } => json!({"pvar": pvar, "arity": arity}),
            Deriv::AllEPred { params, body, .. } => {
                json!({"params": params, "body": body.to_string()})
            }
            Deriv::Eq { var, template, from, to, .. } => json!({
                "var": var,
                "template": template.to_string(),
                "from": from.to_string(),
                "to": to.to_string(),
            }),
            Deriv::MuPP { mvar, ty, .. } => match ty {
                Some(t) => json!({"mvar": mvar, "ty": t.to_string()}),
                None => json!({"mvar": mvar}),
            },
            Deriv::MuLmu { binder, name, binder_ty, .. } => match binder_ty {
                Some(t) => json!({"binder": binder, "name": name, "binder_ty": t.to_string()}),
                None => json!({"binder": binder, "name": name}),
            },
        };
        json!({
            "rule": self.tag(),
            "inst": inst,
            "premises": self.premises().iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Deriv, SyntaxError> {
        let rule = v
            .get("rule")
            .and_then(|r| r.as_str())
            .ok_or_else(|| SyntaxError::new("derivation node needs a \"rule\" string"))?;
        let empty = json!({});
        let inst = v.get("inst").unwrap_or(&empty);
        let prems: Vec<Deriv> = match v.get("premises") {
            None => Vec::new(),
            Some(Value::Array(items)) => {
                items.iter().map(Deriv::from_json).collect::<Result<_, _>>()?
            }
            Some(_) => return Err(SyntaxError::new("\"premises\" must be an array")),
        };
        let want = |n: usize| -> Result<(), SyntaxError> {
            if prems.len() == n {
                Ok(())
            } else {
                Err(SyntaxError::new(format!(
                    "rule {rule} takes {n} premise(s), found {}",
                    prems.len()
                )))
            }
        };
        let one = |mut ps: Vec<Deriv>| Box::new(ps.remove(0));
        let get_str = |key: &str| -> Result<String, SyntaxError> {
            inst.get(key)
                .and_then(|x| x.as_str())
                .map(|s| s.to_string())
                .ok_or_else(|| {
                    SyntaxError::new(format!("rule {rule} needs a string field \"{key}\""))
                })
        };
        let get_formula = |key: &str| -> Result<Formula, SyntaxError> {
            parse_formula(&get_str(key)?)
                .map_err(|e| SyntaxError::new(format!("rule {rule}, field \"{key}\": {e}")))
        };
        let get_term = |key: &str| -> Result<FoTerm, SyntaxError> {
            parse_foterm(&get_str(key)?)
                .map_err(|e| SyntaxError::new(format!("rule {rule}, field \"{key}\": {e}")))
        };
        match rule {
            "ax" => {
                want(0)?;
                let cv = inst
                    .get("ctx")
                    .ok_or_else(|| SyntaxError::new("ax needs \"ctx\""))?;
                let dec = |side: &str| -> Result<BTreeMap<String, Formula>, SyntaxError> {
                    let mut out = BTreeMap::new();
                    if let Some(m) = cv.get(side) {
                        let obj = m.as_object().ok_or_else(|| {
                            SyntaxError::new(format!("ax ctx \"{side}\" must be an object"))
                        })?;
                        for (k, fv) in obj {
                            let s = fv.as_str().ok_or_else(|| {
                                SyntaxError::new(format!(
                                    "ax ctx entry {k} must be a formula string"
                                ))
                            })?;
                            let f = parse_formula(s).map_err(|e| {
                                SyntaxError::new(format!("ax ctx entry {k}: {e}"))
                            })?;
                            out.insert(k.clone(), f);
                        }
                    }
                    Ok(out)
                };
                let ctx = Ctx { lam: dec("lam")?, mu: dec("mu")? };
                let var = if inst.get("var").is_some() {
                    AxVar::Lam(get_str("var")?)
                } else if inst.get("mvar").is_some() {
                    AxVar::Mu(get_str("mvar")?)
                } else {
                    return Err(SyntaxError::new("ax needs \"var\" or \"mvar\""));
                };
                Ok(Deriv::Ax { ctx, var })
            }
            "imp_i" => {
                want(1)?;
                let domain = match inst.get("domain") {
                    Some(_) => Some(get_formula("domain")?),
                    None => None,
                };
                Ok(Deriv::ImpI { var: get_str("var")?, domain, prem: one(prems) })
            }
            "imp_e" => {
                want(2)?;
                let mut ps = prems;
                let arg = ps.remove(1);
                let fun = ps.remove(0);
                Ok(Deriv::ImpE { fun: Box::new(fun), arg: Box::new(arg) })
            }
            "forall_i_ind" => {
                want(1)?;
                Ok(Deriv::AllIInd { var: get_str("var")?, prem: one(prems) })
            }
            "forall_e_ind" => {
                want(1)?;
                Ok(Deriv::AllEInd { witness: get_term("witness")?, prem: one(prems) })
            }
            "forall_i_pred" => {
                want(1)?;
                let arity = inst
                    .get("arity")
                    .and_then(|a| a.as_u64())
                    .ok_or_else(|| SyntaxError::new("forall_i_pred needs a numeric \"arity\""))?;
                Ok(Deriv::AllIPred {
                    pvar: get_str("pvar")?,
                    arity: arity as usize,
                    prem: one(prems),
                })
            }
            "forall_e_pred" => {
                want(1)?;
                let params = match inst.get("params") {
                    Some(Value::Array(items)) => items
                        .iter()
                        .map(|p| {
                            p.as_str().map(|s| s.to_string()).ok_or_else(|| {
                                SyntaxError::new("forall_e_pred params must be strings")
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    _ => {
                        return Err(SyntaxError::new(
                            "forall_e_pred needs an array field \"params\"",
                        ))
                    }
                };
                Ok(Deriv::AllEPred { params, body: get_formula("body")?, prem: one(prems) })
            }
            "eq" => {
                want(1)?;
                Ok(Deriv::Eq {
                    var: get_str("var")?,
                    template: get_formula("template")?,
                    from: get_term("from")?,
                    to: get_term("to")?,
                    prem: one(prems),
                })
            }
            "mu" => {
                want(1)?;
                if inst.get("binder").is_some() || inst.get("name").is_some() {
                    let binder_ty = match inst.get("binder_ty") {
                        Some(_) => Some(get_formula("binder_ty")?),
                        None => None,
                    };
                    Ok(Deriv::MuLmu {
                        binder: get_str("binder")?,
                        name: get_str("name")?,
                        binder_ty,
                        prem: one(prems),
                    })
                } else {
                    let ty = match inst.get("ty") {
                        Some(_) => Some(get_formula("ty")?),
                        None => None,
                    };
                    Ok(Deriv::MuPP { mvar: get_str("mvar")?, ty, prem: one(prems) })
                }
            }
            "yfix" => {
                want(1)?;
                Ok(Deriv::YFix { prem: one(prems) })
            }
            other => Err(SyntaxError::new(format!("unknown rule tag {other:?}"))),
        }
    }
}
