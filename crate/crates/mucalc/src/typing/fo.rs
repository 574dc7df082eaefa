//! First-order individual terms, equation sets, and the bounded congruence
//! `eq_modulo` used by typing rule 8.
//!
//! The signature has the built-in symbols `Z` (zero), `S` (unary successor),
//! `B0`/`B1` (boolean constants), and the binary `or`; user symbols are
//! lowercase identifiers applied with parentheses. `eq_modulo` decides the
//! congruence generated by an equation set soundly but not completely: it
//! searches bounded rewrite cones from both sides (an equation is usable in
//! a direction only when it does not invent variables) and reports equal
//! when the cones intersect. `true` answers are always correct; `false`
//! only means "not found within the depth".

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

/// A first-order term: an individual variable or a function application
/// (constants are nullary applications).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoTerm {
    Var(String),
    Fn(String, Vec<FoTerm>),
}

pub fn fvar(x: impl Into<String>) -> FoTerm {
    FoTerm::Var(x.into())
}
pub fn fapp(f: impl Into<String>, args: impl IntoIterator<Item = FoTerm>) -> FoTerm {
    FoTerm::Fn(f.into(), args.into_iter().collect())
}
pub fn zero() -> FoTerm {
    fapp("Z", [])
}
pub fn s(t: FoTerm) -> FoTerm {
    fapp("S", [t])
}
/// The numeral term `S^n(Z)`.
pub fn s_n(n: usize) -> FoTerm {
    let mut t = zero();
    for _ in 0..n {
        t = s(t);
    }
    t
}
pub fn b0() -> FoTerm {
    fapp("B0", [])
}
pub fn b1() -> FoTerm {
    fapp("B1", [])
}
pub fn or(a: FoTerm, b: FoTerm) -> FoTerm {
    fapp("or", [a, b])
}

/// Arities of the built-in function symbols.
pub fn builtin_arity(f: &str) -> Option<usize> {
    match f {
        "Z" | "B0" | "B1" => Some(0),
        "S" => Some(1),
        "or" => Some(2),
        _ => None,
    }
}

impl FoTerm {
    /// All individual variables occurring in the term.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            FoTerm::Var(x) => {
                out.insert(x.clone());
            }
            FoTerm::Fn(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Substitute a single variable.
    pub fn subst(&self, x: &str, a: &FoTerm) -> FoTerm {
        match self {
            FoTerm::Var(y) if y == x => a.clone(),
            FoTerm::Var(_) => self.clone(),
            FoTerm::Fn(f, args) => {
                FoTerm::Fn(f.clone(), args.iter().map(|t| t.subst(x, a)).collect())
            }
        }
    }

    /// Simultaneous substitution of several variables.
    pub fn subst_many(&self, map: &BTreeMap<String, FoTerm>) -> FoTerm {
        match self {
            FoTerm::Var(y) => map.get(y).cloned().unwrap_or_else(|| self.clone()),
            FoTerm::Fn(f, args) => {
                FoTerm::Fn(f.clone(), args.iter().map(|t| t.subst_many(map)).collect())
            }
        }
    }

    /// Record and check function-symbol arities (built-ins fixed, user
    /// symbols must be used consistently).
    pub fn check_arities(&self, sig: &mut BTreeMap<String, usize>) -> Result<(), String> {
        if let FoTerm::Fn(f, args) = self {
            let want = builtin_arity(f).or_else(|| sig.get(f).copied());
            match want {
                Some(k) if k != args.len() => {
                    return Err(format!(
                        "function symbol {f} used with {} arguments but has arity {k}",
                        args.len()
                    ));
                }
                Some(_) => {}
                None => {
                    sig.insert(f.clone(), args.len());
                }
            }
            for a in args {
                a.check_arities(sig)?;
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        match self {
            FoTerm::Var(_) => 1,
            FoTerm::Fn(_, args) => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
        }
    }
}

impl fmt::Display for FoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoTerm::Var(x) => write!(f, "{x}"),
            FoTerm::Fn(g, args) if args.is_empty() => write!(f, "{g}"),
            FoTerm::Fn(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A set of first-order equations, each read as a schema (its variables
/// range over all terms).
#[derive(Debug, Clone, Default)]
pub struct Equations {
    pub eqns: Vec<(FoTerm, FoTerm)>,
}

impl Equations {
    pub fn empty() -> Equations {
        Equations { eqns: Vec::new() }
    }

    /// The boolean-or equations: `or(B1,x) = B1`, `or(B0,x) = x`,
    /// `or(x,B1) = B1`, `or(x,B0) = x`.
    pub fn or_bool() -> Equations {
        let x = || fvar("x");
        Equations {
            eqns: vec![
                (or(b1(), x()), b1()),
                (or(b0(), x()), x()),
                (or(x(), b1()), b1()),
                (or(x(), b0()), x()),
            ],
        }
    }

    /// Bounded sweep of the standing assumption on equation sets: the two
    /// boolean constants must stay distinct and distinct numerals must stay
    /// distinct. A failure means the equation set collapses data types.
    pub fn sanity_check(&self, depth: usize) -> Result<(), String> {
        if eq_modulo(&b0(), &b1(), self, depth) {
            return Err("equations identify B0 and B1".into());
        }
        for n in 0..4 {
            for m in (n + 1)..4 {
                if eq_modulo(&s_n(n), &s_n(m), self, depth) {
                    return Err(format!("equations identify S^{n}(Z) and S^{m}(Z)"));
                }
            }
        }
        Ok(())
    }
}

/// Default search depth for `eq_modulo`.
pub const DEFAULT_EQ_DEPTH: usize = 8;

// Cap on materialized terms per rewrite cone, so pathological equation sets
// cannot blow up the validator.
const EQ_NODE_CAP: usize = 20_000;

// Match `pat` against `subject`, binding pattern variables consistently.
fn match_pattern(
    pat: &FoTerm,
    subject: &FoTerm,
    binding: &mut BTreeMap<String, FoTerm>,
) -> bool {
    match pat {
        FoTerm::Var(x) => match binding.get(x) {
            Some(bound) => bound == subject,
            None => {
                binding.insert(x.clone(), subject.clone());
                true
            }
        },
        FoTerm::Fn(f, args) => match subject {
            FoTerm::Fn(g, sargs) if f == g && args.len() == sargs.len() => args
                .iter()
                .zip(sargs)
                .all(|(p, s)| match_pattern(p, s, binding)),
            _ => false,
        },
    }
}

// All one-step rewrites of `t` (any position, any usable orientation).
fn rewrites(t: &FoTerm, oriented: &[(&FoTerm, &FoTerm)]) -> Vec<FoTerm> {
    let mut out = Vec::new();
    for (l, r) in oriented {
        let mut binding = BTreeMap::new();
        if match_pattern(l, t, &mut binding) {
            out.push(r.subst_many(&binding));
        }
    }
    if let FoTerm::Fn(f, args) = t {
        for (i, a) in args.iter().enumerate() {
            for a2 in rewrites(a, oriented) {
                let mut args2 = args.clone();
                args2[i] = a2;
                out.push(FoTerm::Fn(f.clone(), args2));
            }
        }
    }
    out
}

// Expand one BFS layer of a rewrite cone. Returns true as soon as a newly
// generated term already lies in the other side's cone.
fn expand_layer(
    frontier: &mut Vec<FoTerm>,
    seen: &mut BTreeSet<FoTerm>,
    other: &BTreeSet<FoTerm>,
    oriented: &[(&FoTerm, &FoTerm)],
) -> bool {
    let mut next = Vec::new();
    for t in frontier.drain(..) {
        for t2 in rewrites(&t, oriented) {
            if other.contains(&t2) {
                return true;
            }
            if seen.len() >= EQ_NODE_CAP {
                continue;
            }
            if seen.insert(t2.clone()) {
                next.push(t2);
            }
        }
    }
    *frontier = next;
    false
}

/// Bounded sound check of the congruence generated by `e`: do the rewrite
/// cones of depth `depth` around the two terms intersect? An equation is
/// used in a direction only when that direction does not invent variables
/// (`vars(target) ⊆ vars(source)`). The cones are grown one layer at a
/// time, alternating sides, and the search stops at the first contact, so
/// easy equalities stay cheap even when some equation direction grows terms.
pub fn eq_modulo(a: &FoTerm, b: &FoTerm, e: &Equations, depth: usize) -> bool {
    if a == b {
        return true;
    }
    let mut oriented: Vec<(&FoTerm, &FoTerm)> = Vec::new();
    for (l, r) in &e.eqns {
        if r.vars().is_subset(&l.vars()) {
            oriented.push((l, r));
        }
        if l.vars().is_subset(&r.vars()) {
            oriented.push((r, l));
        }
    }
    let mut seen_a = BTreeSet::from([a.clone()]);
    let mut seen_b = BTreeSet::from([b.clone()]);
    let mut frontier_a = vec![a.clone()];
    let mut frontier_b = vec![b.clone()];
    for _ in 0..depth {
        if frontier_a.is_empty() && frontier_b.is_empty() {
            return false;
        }
        if expand_layer(&mut frontier_a, &mut seen_a, &seen_b, &oriented) {
            return true;
        }
        if expand_layer(&mut frontier_b, &mut seen_b, &seen_a, &oriented) {
            return true;
        }
    }
    false
}
