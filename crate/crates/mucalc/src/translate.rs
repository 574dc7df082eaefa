//! The two embeddings between the calculi and their simulation checkers.
//!
//! `star` maps a λμ term into λμ++ (namings become applications of the
//! μ-variable); `circ` maps a modified-syntax λμ++ term back into λμ,
//! producing terms that may mention the distinguished μ-constant `delta`
//! free. The checkers exhibit finite witnesses for the two simulation
//! properties: every λμ+ reduction is mirrored by at least as many λμ++
//! steps on the star images, and every λμ++ step yields a λμ+ join of the
//! circle images. Both checkers are semi-decision procedures: a `None`
//! result within a budget is inconclusive, never a refutation.

use std::collections::{HashMap, VecDeque};

use crate::engine::lmu::{explore_lmu, redexes_lmu, LmuMode, LmuRule, LmuStep};
use crate::engine::mupp::{redexes_mupp, MuppMode, MuppRule, MuppStep};
use crate::engine::Budget;
use crate::names::{self, DELTA};
use crate::syntax::lmu::{self, LmuTerm};
use crate::syntax::mupp::{self, MuppTerm};
use crate::syntax::{Path, SyntaxError};

/// The star embedding of λμ into λμ++. Total and structural: namings
/// `[#b]w` become applications `(#b w*)` under the μ-binder.
pub fn star(t: &LmuTerm) -> MuppTerm {
    match t {
        LmuTerm::Var(x) => mupp::var(x.clone()),
        LmuTerm::Lam(x, b) => mupp::lam(x.clone(), star(b)),
        LmuTerm::App(f, a) => mupp::app(star(f), star(a)),
        LmuTerm::Mu { binder, name, body } => {
            mupp::mu(binder.clone(), mupp::app(mupp::mvar(name.clone()), star(body)))
        }
    }
}

/// The circle translation of a modified-syntax λμ++ term into λμ.
///
/// Accepts the core constructors plus `\1` and `\2`; the clauses are ordered
/// and the first match wins, so `(\1x.u v)` substitutes and `(\2 v)` builds
/// the vacuous continuation before the generic application clause fires.
/// The output may mention the μ-constant `delta` free. ξ registers and the
/// vacuous binders `\'`/`mu'` are outside the modified syntax and are
/// rejected.
pub fn circ(t: &MuppTerm) -> Result<LmuTerm, SyntaxError> {
    match t {
        MuppTerm::Var(x) => Ok(lmu::var(x.clone())),
        // #a  ↦  \x.mu #g.[#a]x   (g fresh, in particular g ≠ a)
        MuppTerm::MuVar(a) => {
            let g = names::fresh("g", |c| c == a);
            Ok(lmu::lam("x", lmu::mu(g, a.clone(), lmu::var("x"))))
        }
        MuppTerm::Lam(x, b) | MuppTerm::Lam1(x, b) => Ok(lmu::lam(x.clone(), circ(b)?)),
        // \2  ↦  \x.mu #g.[#delta]x
        MuppTerm::Lam2 => {
            let g = names::fresh("g", |_| false);
            Ok(lmu::lam("x", lmu::mu(g, DELTA, lmu::var("x"))))
        }
        MuppTerm::Mu(binder, body) => Ok(lmu::mu(binder.clone(), DELTA, circ(body)?)),
        MuppTerm::App(f, a) => match f.as_ref() {
            // (\1x.u v)  ↦  u°[x := v°]
            MuppTerm::Lam1(x, u) => Ok(circ(u)?.subst_l(x, &circ(a)?)),
            // (\2 v)  ↦  mu #g.[#delta]v°   (g fresh, so never free in v°)
            MuppTerm::Lam2 => {
                let g = names::fresh("g", |_| false);
                Ok(lmu::mu(g, DELTA, circ(a)?))
            }
            _ => Ok(lmu::app(circ(f)?, circ(a)?)),
        },
        MuppTerm::Xi(_) => Err(SyntaxError::new(
            "xi registers are machine-internal state and have no circle translation",
        )),
        MuppTerm::LamVac(..) => Err(SyntaxError::new(
            "\\' is outside the modified syntax accepted by the circle translation",
        )),
        MuppTerm::MuVac { .. } => Err(SyntaxError::new(
            "mu' is outside the modified syntax accepted by the circle translation",
        )),
    }
}

/// A replayable simulation witness in λμ++: `path` applied in order to the
/// star image of the source reaches the star image of the target.
#[derive(Debug, Clone)]
pub struct SimWitness {
    /// Number of λμ++ steps (≥ the λμ+ step count being simulated).
    pub steps: usize,
    /// The step sequence: rule, redex position, and the term after the step.
    pub path: Vec<MuppStep>,
}

/// A join witness for the circle translation: `left` rewrites `circ(u)` to
/// `meet` in λμ+, `right` rewrites `circ(v)` to the same α-class.
#[derive(Debug, Clone)]
pub struct JoinWitness {
    pub meet: LmuTerm,
    pub left: Vec<LmuStep>,
    pub right: Vec<LmuStep>,
}

// Breadth-first search node with a back-pointer carrying the edge that
// produced it, for path reconstruction.
struct SearchNode<T, R> {
    term: T,
    depth: usize,
    parent: Option<(usize, R, Path)>,
}

fn rebuild_path<T: Clone, R: Clone>(nodes: &[SearchNode<T, R>], mut cur: usize) -> Vec<(R, Path, T)> {
    let mut path = Vec::new();
    while let Some((p, rule, at)) = nodes[cur].parent.clone() {
        path.push((rule, at, nodes[cur].term.clone()));
        cur = p;
    }
    path.reverse();
    path
}

// BFS over α-classes from `root`, looking for `target` via a path of length
// at least `min_len`. Hits shorter than `min_len` are skipped (the search
// continues, so loops can still satisfy the bound). First hit wins, which
// makes the result deterministic for a fixed redex enumeration order.
fn search_mupp(
    root: &MuppTerm,
    target: &str,
    min_len: usize,
    budget: &Budget,
) -> Option<Vec<MuppStep>> {
    if root.canon_key() == target && min_len == 0 {
        return Some(Vec::new());
    }
    let max_nodes = budget.max_nodes.unwrap_or(usize::MAX);
    let mut nodes: Vec<SearchNode<MuppTerm, MuppRule>> =
        vec![SearchNode { term: root.clone(), depth: 0, parent: None }];
    let mut seen: HashMap<String, usize> = HashMap::from([(root.canon_key(), 0)]);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(id) = queue.pop_front() {
        let depth = nodes[id].depth;
        if budget.max_depth.is_some_and(|m| depth >= m) {
            continue;
        }
        for r in redexes_mupp(&nodes[id].term.clone(), MuppMode::Core) {
            let t2 = r.apply(&nodes[id].term);
            let k2 = t2.canon_key();
            if k2 == target && depth + 1 >= min_len {
                let mut path = rebuild_path(&nodes, id);
                path.push((r.rule, r.at, t2));
                return Some(path);
            }
            if !seen.contains_key(&k2) && nodes.len() < max_nodes {
                seen.insert(k2, nodes.len());
                nodes.push(SearchNode {
                    term: t2,
                    depth: depth + 1,
                    parent: Some((id, r.rule, r.at)),
                });
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    None
}

// Early-exit BFS reachability of a target α-class in λμ+.
fn reachable_lmu(root: &LmuTerm, target: &str, budget: &Budget) -> bool {
    if root.canon_key() == target {
        return true;
    }
    let max_nodes = budget.max_nodes.unwrap_or(usize::MAX);
    let mut seen: HashMap<String, ()> = HashMap::from([(root.canon_key(), ())]);
    let mut queue: VecDeque<(LmuTerm, usize)> = VecDeque::from([(root.clone(), 0)]);
    while let Some((t, depth)) = queue.pop_front() {
        if budget.max_depth.is_some_and(|m| depth >= m) {
            continue;
        }
        for r in redexes_lmu(&t, LmuMode::MuPlus) {
            let t2 = r.apply(&t);
            let k2 = t2.canon_key();
            if k2 == target {
                return true;
            }
            if !seen.contains_key(&k2) && seen.len() < max_nodes {
                seen.insert(k2, ());
                queue.push_back((t2, depth + 1));
            }
        }
    }
    false
}

// One side of the alternating join search: its expansion state plus the
// back-pointer graph built so far.
struct Side {
    nodes: Vec<SearchNode<LmuTerm, LmuRule>>,
    seen: HashMap<String, usize>,
    frontier: Vec<usize>,
}

impl Side {
    fn new(root: &LmuTerm) -> Side {
        Side {
            nodes: vec![SearchNode { term: root.clone(), depth: 0, parent: None }],
            seen: HashMap::from([(root.canon_key(), 0)]),
            frontier: vec![0],
        }
    }

    // Expand the current frontier by one λμ+ layer; return the first new
    // node whose α-class already appears on the `other` side, if any.
    fn expand_layer(&mut self, other: &Side, budget: &Budget) -> Option<(usize, usize)> {
        let max_nodes = budget.max_nodes.unwrap_or(usize::MAX);
        let mut next = Vec::new();
        let mut hit = None;
        for &id in &self.frontier {
            let depth = self.nodes[id].depth;
            if budget.max_depth.is_some_and(|m| depth >= m) {
                continue;
            }
            for r in redexes_lmu(&self.nodes[id].term.clone(), LmuMode::MuPlus) {
                let t2 = r.apply(&self.nodes[id].term);
                let k2 = t2.canon_key();
                if self.seen.contains_key(&k2) || self.nodes.len() >= max_nodes {
                    continue;
                }
                self.seen.insert(k2.clone(), self.nodes.len());
                self.nodes.push(SearchNode {
                    term: t2,
                    depth: depth + 1,
                    parent: Some((id, r.rule, r.at)),
                });
                next.push(self.nodes.len() - 1);
                if hit.is_none() {
                    if let Some(&j) = other.seen.get(&k2) {
                        hit = Some((self.nodes.len() - 1, j));
                    }
                }
            }
            if hit.is_some() {
                break;
            }
        }
        self.frontier = next;
        hit
    }
}

/// Check the star simulation on one established reduction `u →μ+^n v`:
/// search for a λμ++ path `star(u) ⇀^m star(v)` with `m ≥ n`.
///
/// Re-verifies that `v` is reachable from `u` in λμ+ first (within the same
/// budget). Returns the first — hence shortest eligible — witness found;
/// `None` means the budget ran out, not that no witness exists.
pub fn check_sim_star(u: &LmuTerm, v: &LmuTerm, n: usize, budget: &Budget) -> Option<SimWitness> {
    if !reachable_lmu(u, &v.canon_key(), budget) {
        return None;
    }
    let path = search_mupp(&star(u), &star(v).canon_key(), n, budget)?;
    Some(SimWitness { steps: path.len(), path })
}

/// Check the circle simulation on one λμ++ step `u ⇀ v` (or `u = v`):
/// explore the λμ+ graphs of `circ(u)` and `circ(v)` and exhibit a common
/// reduct `w`. Either path may be empty — for a `\1` β-step, `circ(u)`
/// already *is* the meet, the administrative work having been done by the
/// translation itself.
///
/// The step is re-verified before translating. The two graphs are grown in
/// alternating breadth-first layers and the first α-class contact wins,
/// which is deterministic for a fixed redex enumeration order. `None` is
/// inconclusive: budgets may simply be too small.
pub fn check_join_circ(u: &MuppTerm, v: &MuppTerm, budget: &Budget) -> Option<JoinWitness> {
    let is_step = |mode: MuppMode| {
        redexes_mupp(u, mode).iter().any(|r| r.apply(u).alpha_eq(v))
    };
    if !u.alpha_eq(v) && !is_step(MuppMode::Core) && !is_step(MuppMode::Modified) {
        return None; // not a λμ++ step: nothing to check
    }
    let cu = circ(u).ok()?;
    let cv = circ(v).ok()?;
    let mut left = Side::new(&cu);
    let mut right = Side::new(&cv);
    let (i, j) = if cu.canon_key() == cv.canon_key() {
        (0, 0)
    } else {
        loop {
            if left.frontier.is_empty() && right.frontier.is_empty() {
                return None;
            }
            if let Some(hit) = left.expand_layer(&right, budget) {
                break hit;
            }
            if let Some((j, i)) = right.expand_layer(&left, budget) {
                break (i, j);
            }
        }
    };
    Some(JoinWitness {
        meet: left.nodes[i].term.clone(),
        left: rebuild_path(&left.nodes, i),
        right: rebuild_path(&right.nodes, j),
    })
}

use crate::typing::derivation::{ax_l, imp_i_dom, mu_lmu_ty, Ctx, Deriv};
use crate::typing::fo::Equations;
use crate::typing::formula::{bottom, neg};
use crate::typing::validate::{validate, TypingOpts};
use crate::typing::System;

// Negate every μ-context entry of a leaf context (named conclusions B become
// μ-variable typings ¬B).
fn negate_mu(ctx: &Ctx) -> Ctx {
    Ctx {
        lam: ctx.lam.clone(),
        mu: ctx.mu.iter().map(|(k, f)| (k.clone(), neg(f.clone()))).collect(),
    }
}

// Strip the negation from every μ-context entry and add δ:⊥ (μ-variable
// typings ¬B resurrect to named conclusions B).
fn resurrect_mu(ctx: &Ctx) -> Result<Ctx, String> {
    let mut mu = std::collections::BTreeMap::new();
    for (k, f) in &ctx.mu {
        let b = f
            .as_neg()
            .ok_or_else(|| format!("μ-context entry {k} : {f} is not a negation"))?;
        mu.insert(k.clone(), b.clone());
    }
    mu.insert(DELTA.to_string(), bottom());
    Ok(Ctx { lam: ctx.lam.clone(), mu })
}

/// Translate a derivation of `Γ ⊢ t : A , Δ` into one of `Γ, ¬Δ ⊢′ t* : A`.
///
/// Structural on everything except rule 9: a naming `μβ.[α]u` becomes the
/// μ-abstraction over the application `(#α u*)`. The input is validated
/// first; validation failures propagate.
pub fn star_deriv(d: &Deriv, e: &Equations, opts: &TypingOpts) -> Result<Deriv, String> {
    validate(d, System::Lmu, e, opts).map_err(|err| err.to_string())?;
    star_node(d, e, opts)
}

fn star_node(d: &Deriv, e: &Equations, opts: &TypingOpts) -> Result<Deriv, String> {
    let rec = |p: &Deriv| star_node(p, e, opts);
    Ok(match d {
        Deriv::Ax { ctx, var } => Deriv::Ax { ctx: negate_mu(ctx), var: var.clone() },
        Deriv::ImpI { var, domain, prem } => Deriv::ImpI {
            var: var.clone(),
            domain: domain.clone(),
            prem: Box::new(rec(prem)?),
        },
        Deriv::ImpE { fun, arg } => {
            Deriv::ImpE { fun: Box::new(rec(fun)?), arg: Box::new(rec(arg)?) }
        }
        Deriv::AllIInd { var, prem } => {
            Deriv::AllIInd { var: var.clone(), prem: Box::new(rec(prem)?) }
        }
        Deriv::AllEInd { witness, prem } => {
            Deriv::AllEInd { witness: witness.clone(), prem: Box::new(rec(prem)?) }
        }
        Deriv::AllIPred { pvar, arity, prem } => {
            Deriv::AllIPred { pvar: pvar.clone(), arity: *arity, prem: Box::new(rec(prem)?) }
        }
        Deriv::AllEPred { params, body, prem } => Deriv::AllEPred {
            params: params.clone(),
            body: body.clone(),
            prem: Box::new(rec(prem)?),
        },
        Deriv::Eq { var, template, from, to, prem } => Deriv::Eq {
            var: var.clone(),
            template: template.clone(),
            from: from.clone(),
            to: to.clone(),
            prem: Box::new(rec(prem)?),
        },
        Deriv::MuLmu { binder, name, prem, .. } => {
            // Premise `Γ ⊢ u : A, Δ`, conclusion type B: the image is
            // μbinder.(#name u*), i.e. rule 9 over the application of the
            // (negated) named conclusion to the translated premise.
            let a = validate(prem, System::Lmu, e, opts)
                .map_err(|err| err.to_string())?
                .judgment
                .formula;
            let b = validate(d, System::Lmu, e, opts)
                .map_err(|err| err.to_string())?
                .judgment
                .formula;
            let naming = Deriv::ImpE {
                fun: Box::new(Deriv::Ax {
                    ctx: Ctx::new().m(name.clone(), neg(a)),
                    var: crate::typing::derivation::AxVar::Mu(name.clone()),
                }),
                arg: Box::new(rec(prem)?),
            };
            Deriv::MuPP { mvar: binder.clone(), ty: Some(b), prem: Box::new(naming) }
        }
        Deriv::MuPP { .. } => {
            return Err("a μ-abstraction rule of the target system cannot occur in the source derivation".into())
        }
        Deriv::YFix { .. } => {
            return Err("the fixed-point rule is not part of the source system".into())
        }
    })
}

/// Translate a derivation of `Γ ⊢′ t : A` into one of
/// `Γ_λ ⊢ t° : A , Γ_μ, δ:⊥` (μ-variable typings resurrected as named
/// conclusions, plus the distinguished name δ at ⊥).
///
/// Structural except at the two places the circle translation rewrites:
/// a μ-variable axiom becomes the derivation of its continuation image
/// `λx.μg.[#α]x`, and a μ-abstraction becomes rule 9 naming δ. The input is
/// validated first; validation failures propagate. Derivations using the
/// fixed-point rule have no image.
pub fn circ_deriv(d: &Deriv, e: &Equations, opts: &TypingOpts) -> Result<Deriv, String> {
    validate(d, System::Mupp, e, opts).map_err(|err| err.to_string())?;
    circ_node(d, e, opts)
}

fn circ_node(d: &Deriv, e: &Equations, opts: &TypingOpts) -> Result<Deriv, String> {
    let rec = |p: &Deriv| circ_node(p, e, opts);
    Ok(match d {
        Deriv::Ax { ctx, var } => match var {
            crate::typing::derivation::AxVar::Lam(_) => {
                Deriv::Ax { ctx: resurrect_mu(ctx)?, var: var.clone() }
            }
            crate::typing::derivation::AxVar::Mu(a) => {
                // #a : ¬B  ↦  λx.μg.[#a]x : ¬B, exporting a : B.
                let b = ctx
                    .mu
                    .get(a)
                    .and_then(|f| f.as_neg())
                    .ok_or_else(|| format!("μ-variable {a} lacks a negated typing"))?
                    .clone();
                let x = names::fresh("x", |_| false);
                let g = names::fresh("g", |c| c == a);
                imp_i_dom(
                    x.clone(),
                    b.clone(),
                    mu_lmu_ty(g, a.clone(), bottom(), ax_l(Ctx::new().l(x.clone(), b), x)),
                )
            }
        },
        Deriv::ImpI { var, domain, prem } => Deriv::ImpI {
            var: var.clone(),
            domain: domain.clone(),
            prem: Box::new(rec(prem)?),
        },
        Deriv::ImpE { fun, arg } => {
            Deriv::ImpE { fun: Box::new(rec(fun)?), arg: Box::new(rec(arg)?) }
        }
        Deriv::AllIInd { var, prem } => {
            Deriv::AllIInd { var: var.clone(), prem: Box::new(rec(prem)?) }
        }
        Deriv::AllEInd { witness, prem } => {
            Deriv::AllEInd { witness: witness.clone(), prem: Box::new(rec(prem)?) }
        }
        Deriv::AllIPred { pvar, arity, prem } => {
            Deriv::AllIPred { pvar: pvar.clone(), arity: *arity, prem: Box::new(rec(prem)?) }
        }
        Deriv::AllEPred { params, body, prem } => Deriv::AllEPred {
            params: params.clone(),
            body: body.clone(),
            prem: Box::new(rec(prem)?),
        },
        Deriv::Eq { var, template, from, to, prem } => Deriv::Eq {
            var: var.clone(),
            template: template.clone(),
            from: from.clone(),
            to: to.clone(),
            prem: Box::new(rec(prem)?),
        },
        Deriv::MuPP { mvar, prem, .. } => {
            // μa.u : B  ↦  μa.[δ]u° : B, exporting δ : ⊥.
            let b = validate(d, System::Mupp, e, opts)
                .map_err(|err| err.to_string())?
                .judgment
                .formula;
            mu_lmu_ty(mvar.clone(), DELTA, b, rec(prem)?)
        }
        Deriv::MuLmu { .. } => {
            return Err("a naming rule of the target system cannot occur in the source derivation".into())
        }
        Deriv::YFix { .. } => {
            return Err("the fixed-point rule has no image in the target system".into())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_lmu, random_mupp, GenSyntax};
    use crate::syntax::parse::{parse_lmu, parse_mupp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pl(s: &str) -> LmuTerm {
        parse_lmu(s).expect(s)
    }
    fn pm(s: &str) -> MuppTerm {
        parse_mupp(s).expect(s)
    }

    #[test]
    fn star_clauses() {
        assert_eq!(star(&pl("x")), pm("x"), "variables are fixed");
        assert!(
            star(&pl("mu #a.[#b]x")).alpha_eq(&pm("mu #a.(#b x)")),
            "naming becomes application of the mu-variable"
        );
        let theta = pl("\\x.\\f.mu #a.[#a](f mu #b.[#a](f x))");
        let expected = pm("\\x.\\f.mu #a.(#a (f mu #b.(#a (f x))))");
        assert!(star(&theta).alpha_eq(&expected), "star(theta) is the doubled application form");
    }

    #[test]
    fn star_preserves_free_variables_and_injectivity() {
        let samples = [
            "x",
            "\\x.(x y)",
            "mu #a.[#b](x mu #c.[#a]y)",
            "((\\x.mu #a.[#a]x) z)",
        ];
        for s in samples {
            let t = pl(s);
            let st = star(&t);
            assert_eq!(t.free_lvars(), st.free_lvars(), "lambda vars preserved for {s}");
            assert_eq!(t.free_mvars(), st.free_mvars(), "mu vars preserved for {s}");
        }
        let keys: Vec<String> =
            samples.iter().map(|s| star(&pl(s)).canon_key()).collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                assert_ne!(keys[i], keys[j], "star must keep distinct classes distinct");
            }
        }
    }

    #[test]
    fn circ_clauses() {
        assert_eq!(circ(&pm("x")).unwrap(), pl("x"), "variables are fixed");
        assert!(
            circ(&pm("#a")).unwrap().alpha_eq(&pl("\\x.mu #g.[#a]x")),
            "mu-variable becomes the naming continuation"
        );
        assert!(
            circ(&pm("\\2")).unwrap().alpha_eq(&pl("\\x.mu #g.[#delta]x")),
            "\\2 names delta"
        );
        assert!(
            circ(&pm("mu #a.(#a x)"))
                .unwrap()
                .alpha_eq(&pl("mu #a.[#delta]((\\z.mu #g.[#a]z) x)")),
            "mu body is rewrapped with a delta naming"
        );
        // (\1y.(#b y) v) substitutes: ((\z.mu #g.[#b]z) v)
        let t = pm("((\\1y.(#b y)) v)");
        assert!(
            circ(&t).unwrap().alpha_eq(&pl("((\\z.mu #g.[#b]z) v)")),
            "linear beta clause fires before the generic application clause"
        );
        // (\2 v) collapses to a vacuous mu naming delta.
        let t = pm("(\\2 v)");
        assert!(circ(&t).unwrap().alpha_eq(&pl("mu #g.[#delta]v")), "\\2 application clause");
    }

    #[test]
    fn circ_rejects_non_modified_syntax() {
        for s in ["xi#a", "\\'x.y", "mu'#a.x"] {
            assert!(circ(&pm(s)).is_err(), "{s} must be rejected");
        }
    }

    #[test]
    fn circ_free_mu_vars_within_delta() {
        for s in ["mu #a.(#a x)", "(#b y)", "\\2", "((\\1y.(#b y)) v)"] {
            let t = pm(s);
            let c = circ(&t).unwrap();
            let mut allowed = t.free_mvars();
            allowed.insert(DELTA.to_string());
            assert!(
                c.free_mvars().is_subset(&allowed),
                "free mu vars of circ({s}) must stay within the source's plus delta"
            );
        }
    }

    #[test]
    fn sim_star_trivial_and_administrative() {
        let b = Budget::nodes(2_000);
        // Identity instance: zero steps.
        let u = pl("x");
        let w = check_sim_star(&u, &u, 0, &b).expect("reflexive witness");
        assert_eq!(w.steps, 0, "m = 0 for u = v");

        // One beta step maps to one C_lam step.
        let u = pl("((\\x.x) y)");
        let v = pl("y");
        let w = check_sim_star(&u, &v, 1, &b).expect("beta witness");
        assert_eq!(w.steps, 1, "single beta simulates in one step");
        assert_eq!(w.path[0].0, MuppRule::CLam);

        // The administrative case: one c_mu step needs two lambda-mu++ steps.
        let u = pl("((mu #a.[#a]x) z)");
        let v = pl("mu #a.[#a](x z)");
        let w = check_sim_star(&u, &v, 1, &b).expect("administrative witness");
        assert_eq!(w.steps, 2, "c_mu costs C_mu plus the administrative C_lam");
        assert_eq!(
            (w.path[0].0, w.path[1].0),
            (MuppRule::CMu, MuppRule::CLam),
            "witness is C_mu then C_lam"
        );
        // Replay the path and confirm it lands on star(v).
        let mut t = star(&u);
        for (_, _, after) in &w.path {
            t = after.clone();
        }
        assert!(t.alpha_eq(&star(&v)), "witness path must land on star(v)");
    }

    #[test]
    fn sim_star_rejects_unreachable_claims() {
        let b = Budget::nodes(500);
        assert!(
            check_sim_star(&pl("x"), &pl("y"), 1, &b).is_none(),
            "y is not reachable from x, the sanity pass must fail"
        );
    }

    #[test]
    fn join_circ_trivial_cases() {
        let b = Budget::nodes(2_000);
        let u = pm("\\x.x");
        let w = check_join_circ(&u, &u, &b).expect("reflexive join");
        assert!(w.meet.alpha_eq(&pl("\\x.x")));
        assert!(w.left.is_empty() && w.right.is_empty(), "both paths empty for u = v");

        let u = pm("((\\x.x) y)");
        let v = pm("y");
        let w = check_join_circ(&u, &v, &b).expect("beta join");
        assert!(w.meet.alpha_eq(&pl("y")), "join of a beta step is the reduct image");
        assert_eq!(w.left.len(), 1, "left path is the mirrored beta step");
        assert!(w.right.is_empty());
    }

    #[test]
    fn join_circ_s6_uses_prime() {
        // mu #a.(#a x) steps to x by S6; the circle images join at x and the
        // left path must pass through a naming extraction (the prime rule).
        let b = Budget::nodes(5_000);
        let u = pm("mu #a.(#a x)");
        let v = pm("x");
        let w = check_join_circ(&u, &v, &b).expect("S6 join");
        assert!(w.meet.alpha_eq(&pl("x")), "both images reduce to x");
        assert!(w.right.is_empty(), "circ(x) is already the meet");
        assert!(!w.left.is_empty(), "left path must do real work");
        assert!(
            w.left.iter().any(|(r, _, _)| *r == LmuRule::Prime),
            "extracting the named subterm needs the prime rule, got {:?}",
            w.left.iter().map(|(r, _, _)| *r).collect::<Vec<_>>()
        );
    }

    #[test]
    fn join_circ_rejects_non_steps() {
        let b = Budget::nodes(500);
        assert!(
            check_join_circ(&pm("x"), &pm("y"), &b).is_none(),
            "x does not step to y, the sanity pass must fail"
        );
    }

    use crate::proofs;
    use crate::typing::formula::{atom, Formula};
    use crate::typing::validate::Subject;

    fn opts_y() -> TypingOpts {
        TypingOpts { y_rule: true, ..TypingOpts::default() }
    }

    /// [TRIVIAL] An axiom maps to an axiom; the named conclusion `a : Q`
    /// becomes the μ-variable typing `a : ~Q`.
    #[test]
    fn star_deriv_axiom() {
        let p = atom("P", vec![]);
        let q = atom("Q", vec![]);
        let d = ax_l(Ctx::new().l("x", p.clone()).m("a", q.clone()), "x");
        let sd = star_deriv(&d, &Equations::empty(), &TypingOpts::default()).unwrap();
        let c = validate(&sd, System::Mupp, &Equations::empty(), &TypingOpts::default()).unwrap();
        assert!(c.judgment.formula.alpha_eq(&p));
        assert!(c.judgment.mu.get("a").unwrap().alpha_eq(&neg(q)));
    }

    /// [DERIVED: validator on the output as oracle] The boolean and theta
    /// derivations translate; theta's image types the star image of theta.
    #[test]
    fn star_deriv_preserves_catalog_types() {
        let e = Equations::empty();
        let o = TypingOpts::default();
        // btrue's derivation is μ-free, hence valid in both systems.
        let sd = star_deriv(&proofs::btrue_deriv(), &e, &o).unwrap();
        let c = validate(&sd, System::Mupp, &e, &o).unwrap();
        assert!(c.judgment.formula.alpha_eq(&crate::typing::formula::bool_of(crate::typing::fo::b1())));

        let sd = star_deriv(&proofs::theta_deriv(), &e, &o).unwrap();
        let c = validate(&sd, System::Mupp, &e, &o).unwrap();
        assert!(c.judgment.lam.is_empty() && c.judgment.mu.is_empty());
        assert!(
            c.judgment.formula.alpha_eq(&crate::typing::formula::ent_of(crate::typing::fo::s_n(1))),
            "theta* keeps the integer type, got {}",
            c.judgment.formula
        );
        match &c.judgment.subject {
            Subject::Mupp(s) => assert!(s.alpha_eq(&crate::programs::theta_star())),
            Subject::Lmu(_) => panic!("wrong system"),
        }
    }

    /// [DERIVED: validator on the output as oracle] Every closed λμ++
    /// catalog derivation (without the fixed-point rule) circles back to a
    /// λμ derivation of the same formula whose subject is the circle image
    /// and whose μ-context is exactly δ:⊥.
    #[test]
    fn circ_deriv_preserves_catalog_types() {
        let e = Equations::or_bool();
        let o = opts_y();
        let mut translated = 0;
        for p in proofs::typed_catalog() {
            if !matches!(p.system, System::Mupp) {
                continue;
            }
            if p.needs_y {
                assert!(
                    circ_deriv(&p.deriv, &e, &o).is_err(),
                    "{}: the fixed-point rule must not translate",
                    p.name
                );
                continue;
            }
            let cd = circ_deriv(&p.deriv, &e, &o)
                .unwrap_or_else(|err| panic!("{}: {err}", p.name));
            let c = validate(&cd, System::Lmu, &e, &o)
                .unwrap_or_else(|err| panic!("{}: output invalid: {err}", p.name));
            assert!(c.judgment.formula.alpha_eq(&p.formula), "{}", p.name);
            assert!(c.judgment.lam.is_empty(), "{}", p.name);
            let deltas: Vec<(&String, &Formula)> = c.judgment.mu.iter().collect();
            assert_eq!(deltas.len(), 1, "{}: μ-context must be exactly δ:⊥", p.name);
            assert_eq!(deltas[0].0, DELTA);
            assert!(deltas[0].1.is_bottom(), "{}", p.name);
            let term = crate::programs::mk(&p.name).unwrap().term;
            let image = circ(term.as_mupp().unwrap()).unwrap();
            match &c.judgment.subject {
                Subject::Lmu(s) => {
                    assert!(s.alpha_eq(&image), "{}: subject {} is not {}", p.name, s, image)
                }
                Subject::Mupp(_) => panic!("wrong system"),
            }
            translated += 1;
        }
        assert!(translated >= 20, "catalog should exercise the translation broadly");
    }

    /// [DERIVED: the two simulation theorems as oracles on random single
    /// steps] Every sampled λμ+ step is mirrored by ≥1 step between the
    /// star images; every sampled modified-syntax λμ++ step yields a join
    /// of the circle images.
    #[test]
    fn random_single_steps_simulate() {
        let budget = Budget::nodes(20_000).with_depth(20);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut sim = 0usize;
        let mut fuel = 1usize;
        while sim < 40 {
            fuel = 2 + (fuel + 1) % 11;
            let u = random_lmu(&mut rng, fuel);
            for r in redexes_lmu(&u, LmuMode::MuPlus) {
                let v = r.apply(&u);
                let w = check_sim_star(&u, &v, 1, &budget)
                    .unwrap_or_else(|| panic!("no star witness for {u} -> {v}"));
                assert!(w.steps >= 1);
                sim += 1;
                if sim >= 40 {
                    break;
                }
            }
        }
        let mut joins = 0usize;
        while joins < 40 {
            fuel = 2 + (fuel + 1) % 10;
            let u = random_mupp(&mut rng, fuel, GenSyntax::Modified);
            for r in redexes_mupp(&u, MuppMode::Modified) {
                let v = r.apply(&u);
                check_join_circ(&u, &v, &budget).unwrap_or_else(|| {
                    panic!("no join witness for {u} -> {v} via {}", r.rule)
                });
                joins += 1;
                if joins >= 40 {
                    break;
                }
            }
        }
    }
}
