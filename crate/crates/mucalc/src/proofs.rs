//! Typing derivations for the program library.
//!
//! Every typable catalog term ships with a machine-checkable derivation of
//! its intended formula, and [`corrupted_fixtures`] provides one deliberately
//! broken derivation per typing rule so the validator's error reporting stays
//! exercised end to end.

use crate::typing::derivation::{
    all_e_ind, all_e_pred, all_i_ind, all_i_pred, ax_l, ax_m, eq_rule, imp_e, imp_i, imp_i_dom,
    mu_lmu, mu_lmu_ty, mu_pp, yfix, Ctx, Deriv,
};
use crate::typing::fo::{b0, b1, fvar, or, s, s_n, zero, FoTerm};
use crate::typing::formula::{
    all_ind, atom, bool_of, bottom, ent_of, ex_ind, imp, neg, Formula,
};
use crate::typing::System;

/// A program paired with a derivation of its type.
#[derive(Debug, Clone)]
pub struct TypedProgram {
    /// Catalog name (resolvable by `programs::mk` when the term is shipped).
    pub name: String,
    pub system: System,
    /// The formula the derivation concludes (closed judgment).
    pub formula: Formula,
    pub deriv: Deriv,
    /// True when the derivation uses the fixed-point rule, forfeiting strong
    /// normalization of the subject.
    pub needs_y: bool,
}

/// `D = ex y. Ent[y]` — "some integer is produced".
fn some_ent() -> Formula {
    ex_ind("y", ent_of(fvar("y")))
}

/// `B* = ~D -> D`, the type at which producers consume their continuation.
fn bstar() -> Formula {
    imp(neg(some_ent()), some_ent())
}

/// `B[t] = ~Bool[t] -> Bool[t]`, the thunked-boolean type of `hat1`/`hat0`.
fn bool_thunk(t: FoTerm) -> Formula {
    imp(neg(bool_of(t.clone())), bool_of(t))
}

/// `x : X(Z), y : all y. X(y) -> X(S(y)) |- (y^n x) : X(S^n(Z))`, closed off
/// to `Ent[S^n(Z)]`.
pub fn church_deriv(n: usize) -> Deriv {
    let step = all_ind(
        "y",
        imp(atom("X", vec![fvar("y")]), atom("X", vec![s(fvar("y"))])),
    );
    let ctx = Ctx::new().l("x", atom("X", vec![zero()])).l("y", step);
    let mut d = ax_l(ctx.clone(), "x");
    for k in 0..n {
        d = imp_e(all_e_ind(s_n(k), ax_l(ctx.clone(), "y")), d);
    }
    all_i_pred("X", 1, imp_i("x", imp_i("y", d)))
}

/// `btrue : Bool[B1]`.
pub fn btrue_deriv() -> Deriv {
    let ctx = Ctx::new()
        .l("x", atom("X", vec![b1()]))
        .l("y", atom("X", vec![b0()]));
    all_i_pred("X", 1, imp_i("x", imp_i("y", ax_l(ctx, "x"))))
}

/// `bfalse : Bool[B0]`.
pub fn bfalse_deriv() -> Deriv {
    let ctx = Ctx::new()
        .l("x", atom("X", vec![b1()]))
        .l("y", atom("X", vec![b0()]));
    all_i_pred("X", 1, imp_i("x", imp_i("y", ax_l(ctx, "y"))))
}

/// `id : ALL X^0. X -> X`.
pub fn id_deriv() -> Deriv {
    let x = atom("X", vec![]);
    all_i_pred("X", 0, imp_i("x", ax_l(Ctx::new().l("x", x), "x")))
}

/// `exit = \x.mu #a.x : ALL X^0. _|_ -> X` (the paper-style abort, `I`).
pub fn exit_deriv() -> Deriv {
    let x = atom("X", vec![]);
    let ctx = Ctx::new().l("x", bottom()).m("a", neg(x));
    all_i_pred("X", 0, imp_i("x", mu_pp("a", ax_l(ctx, "x"))))
}

/// `cc = \x.mu #a.(x #a) : ALL X^0. ~~X -> X` (the control operator `C`).
pub fn cc_deriv() -> Deriv {
    let x = atom("X", vec![]);
    let ctx = Ctx::new().l("x", neg(neg(x.clone()))).m("a", neg(x));
    all_i_pred(
        "X",
        0,
        imp_i("x", mu_pp("a", imp_e(ax_l(ctx.clone(), "x"), ax_m(ctx, "a")))),
    )
}

/// `callcc = \x.mu #a.(#a (x #a)) : ALL X^0. (~X -> X) -> X`.
pub fn callcc_deriv() -> Deriv {
    let x = atom("X", vec![]);
    let ctx = Ctx::new()
        .l("x", imp(neg(x.clone()), x.clone()))
        .m("a", neg(x));
    let body = imp_e(
        ax_m(ctx.clone(), "a"),
        imp_e(ax_l(ctx.clone(), "x"), ax_m(ctx, "a")),
    );
    all_i_pred("X", 0, imp_i("x", mu_pp("a", body)))
}

/// `hat1 = \p.btrue : ~Bool[B1] -> Bool[B1]`.
pub fn hat1_deriv() -> Deriv {
    imp_i_dom("p", neg(bool_of(b1())), btrue_deriv())
}

/// `hat0 = \p.bfalse : ~Bool[B0] -> Bool[B0]`.
pub fn hat0_deriv() -> Deriv {
    imp_i_dom("p", neg(bool_of(b0())), bfalse_deriv())
}

/// `succ : all v. Ent[v] -> Ent[S(v)]`.
pub fn succ_deriv() -> Deriv {
    let v = fvar("v");
    let step = all_ind(
        "y",
        imp(atom("X", vec![fvar("y")]), atom("X", vec![s(fvar("y"))])),
    );
    let ctx = Ctx::new()
        .l("n", ent_of(v.clone()))
        .l("x", atom("X", vec![zero()]))
        .l("y", step);
    // (n x y) : X(v), with n's bound predicate instantiated by X itself.
    let n_at = all_e_pred(
        vec!["w".into()],
        atom("X", vec![fvar("w")]),
        ax_l(ctx.clone(), "n"),
    );
    let nxy = imp_e(imp_e(n_at, ax_l(ctx.clone(), "x")), ax_l(ctx.clone(), "y"));
    // (y (n x y)) : X(S(v))
    let body = imp_e(all_e_ind(v, ax_l(ctx, "y")), nxy);
    all_i_ind(
        "v",
        imp_i("n", all_i_pred("X", 1, imp_i("x", imp_i("y", body)))),
    )
}

/// `theta = \x.\f.mu #a.[#a](f mu #b.[#a](f x)) : Ent[S(Z)]` in the λμ
/// system: the closed normal integer that is not a numeral.
pub fn theta_deriv() -> Deriv {
    let xz = atom("X", vec![zero()]);
    let step = all_ind(
        "y",
        imp(atom("X", vec![fvar("y")]), atom("X", vec![s(fvar("y"))])),
    );
    let ctx = Ctx::new().l("x", xz.clone()).l("f", step);
    // (f x) : X(S(Z))
    let fx = imp_e(
        all_e_ind(zero(), ax_l(ctx.clone(), "f")),
        ax_l(ctx.clone(), "x"),
    );
    // mu #b.[#a](f x) : X(Z), exporting a : X(S(Z)); b is vacuous, annotated.
    let mub = mu_lmu_ty("b", "a", xz, fx);
    // (f mu #b.[#a](f x)) : X(S(Z))
    let fm = imp_e(all_e_ind(zero(), ax_l(ctx, "f")), mub);
    // mu #a.[#a](...) : X(S(Z))
    let mua = mu_lmu("a", "a", fm);
    all_i_pred("X", 1, imp_i("x", imp_i("f", mua)))
}

/// `por : all x. all y. Bool[x] -> Bool[y] -> Bool[or(x,y)]`; the two `hat1`
/// arguments and the cross-instantiations go through the equation rule with
/// the boolean `or` table.
pub fn por_deriv() -> Deriv {
    let ix = fvar("x");
    let iy = fvar("y");
    let goal = or(ix.clone(), iy.clone());
    let ctx = Ctx::new()
        .l("x", bool_of(ix.clone()))
        .l("y", bool_of(iy.clone()))
        .m("a", neg(bool_of(goal.clone())));
    // Rewriting template with hole q: ~Bool[q] -> Bool[q].
    let templ = bool_thunk(fvar("q"));

    // x eliminated at X := (w) B[or(w, y)].
    let x_at = all_e_pred(
        vec!["w".into()],
        bool_thunk(or(fvar("w"), iy.clone())),
        ax_l(ctx.clone(), "x"),
    );
    // hat1 : B[B1] = B[or(B1, y)] modulo the equations.
    let a1 = eq_rule("q", templ.clone(), b1(), or(b1(), iy.clone()), hat1_deriv());
    // (y hat1 hat0) : B[y] = B[or(B0, y)] modulo the equations.
    let y_at_b = all_e_pred(
        vec!["w".into()],
        bool_thunk(fvar("w")),
        ax_l(ctx.clone(), "y"),
    );
    let y10 = imp_e(imp_e(y_at_b, hat1_deriv()), hat0_deriv());
    let a2 = eq_rule("q", templ.clone(), iy.clone(), or(b0(), iy.clone()), y10);
    let x_elim = imp_e(imp_e(x_at, a1), a2); // : ~Bool[or(x,y)] -> Bool[or(x,y)]

    // The backup branch r2 = (#a (y hat1 (x hat1 hat0) #a)) : _|_,
    // with y eliminated at X := (w) B[or(x, w)].
    let x_at_b = all_e_pred(
        vec!["w".into()],
        bool_thunk(fvar("w")),
        ax_l(ctx.clone(), "x"),
    );
    let x10 = imp_e(imp_e(x_at_b, hat1_deriv()), hat0_deriv());
    let r2_a1 = eq_rule("q", templ.clone(), b1(), or(ix.clone(), b1()), hat1_deriv());
    let r2_a2 = eq_rule("q", templ, ix.clone(), or(ix, b0()), x10);
    let y_at2 = all_e_pred(
        vec!["w".into()],
        bool_thunk(or(ix_again(), fvar("w"))),
        ax_l(ctx.clone(), "y"),
    );
    let y_elim2 = imp_e(imp_e(y_at2, r2_a1), r2_a2);
    let r2 = imp_e(
        ax_m(ctx.clone(), "a"),
        imp_e(y_elim2, ax_m(ctx.clone(), "a")),
    );

    // (exit r2) : ~Bool[or(x,y)], then the main branch and the outer naming.
    let exit_at = all_e_pred(vec![], neg(bool_of(goal)), exit_deriv());
    let m = imp_e(x_elim, imp_e(exit_at, r2));
    let body = imp_e(ax_m(ctx, "a"), m);
    all_i_ind("x", all_i_ind("y", imp_i("x", imp_i("y", mu_pp("a", body)))))
}

// `fvar("x")` again; keeps the builder above readable where `ix` was moved.
fn ix_again() -> FoTerm {
    fvar("x")
}

/// `producer(n_1..n_m) : all x. Ent[x] -> ex y. Ent[y]`.
pub fn producer_deriv(ns: &[usize]) -> Result<Deriv, String> {
    if ns.is_empty() {
        return Err("producer needs a nonempty sequence of integers".into());
    }
    let dd = some_ent();
    let ctx = Ctx::new()
        .l("x", ent_of(fvar("x")))
        .m("a", neg(dd.clone()));
    // pick(n) = \d.\y.(y n̄) : B*
    let pick = |n: usize| {
        let handler = all_ind("y", neg(ent_of(fvar("y"))));
        let c = Ctx::new().l("y", handler);
        let call = imp_e(all_e_ind(s_n(n), ax_l(c, "y")), church_deriv(n));
        imp_i_dom("d", neg(dd.clone()), imp_i("y", call))
    };
    // x eliminated at the constant predicate X := (w) B*.
    let x_at = all_e_pred(vec!["w".into()], bstar(), ax_l(ctx.clone(), "x"));
    // id : all v. B* -> B*
    let id2 = all_i_ind(
        "v",
        imp_i("x", ax_l(Ctx::new().l("x", bstar()), "x")),
    );
    let mut u = imp_e(
        ax_m(ctx.clone(), "a"),
        imp_e(
            imp_e(imp_e(x_at.clone(), pick(ns[0])), id2.clone()),
            ax_m(ctx.clone(), "a"),
        ),
    );
    for &n in &ns[1..] {
        let exit_at = all_e_pred(vec![], neg(dd.clone()), exit_deriv());
        let a3 = imp_e(exit_at, u);
        u = imp_e(
            ax_m(ctx.clone(), "a"),
            imp_e(imp_e(imp_e(x_at.clone(), pick(n)), id2.clone()), a3),
        );
    }
    Ok(all_i_ind("x", imp_i("x", mu_pp("a", u))))
}

/// `producer_nat = (ytur F) : all v. Ent[v] -> ex y. Ent[y]` via the
/// fixed-point rule (the only catalog entry that needs it).
pub fn producer_nat_deriv() -> Deriv {
    let dd = some_ent();
    let aa = all_ind("v", imp(ent_of(fvar("v")), dd.clone()));
    let v = fvar("v");
    let ctx = Ctx::new()
        .l("x", aa.clone())
        .l("y", ent_of(v.clone()))
        .m("a", neg(dd.clone()));
    // y eliminated at the constant predicate X := (w) B*.
    let y_at = all_e_pred(vec!["w".into()], bstar(), ax_l(ctx.clone(), "y"));
    let id2 = all_i_ind(
        "v",
        imp_i("x", ax_l(Ctx::new().l("x", bstar()), "x")),
    );
    // \d.\z.(z y) : B* — produce the current integer.
    let handler = all_ind("y", neg(ent_of(fvar("y"))));
    let zc = ctx.clone().l("z", handler);
    let pick_cur = imp_i_dom(
        "d",
        neg(dd.clone()),
        imp_i(
            "z",
            imp_e(all_e_ind(v.clone(), ax_l(zc.clone(), "z")), ax_l(zc, "y")),
        ),
    );
    // \d.(x (succ y)) : B* — recurse on the successor.
    let sy = imp_e(all_e_ind(v.clone(), succ_deriv()), ax_l(ctx.clone(), "y"));
    let xsy = imp_e(all_e_ind(s(v), ax_l(ctx.clone(), "x")), sy);
    let recurse = imp_i_dom("d", neg(dd.clone()), xsy);
    // inner = (#a (y pick_cur id #a)) : _|_
    let inner = imp_e(
        ax_m(ctx.clone(), "a"),
        imp_e(
            imp_e(imp_e(y_at.clone(), pick_cur), id2.clone()),
            ax_m(ctx.clone(), "a"),
        ),
    );
    let exit_at = all_e_pred(vec![], neg(dd), exit_deriv());
    let m = imp_e(imp_e(imp_e(y_at, recurse), id2), imp_e(exit_at, inner));
    let fbody = mu_pp("a", imp_e(ax_m(ctx, "a"), m));
    let f = imp_i_dom("x", aa, all_i_ind("v", imp_i("y", fbody)));
    yfix(f)
}

/// The typed program library: every catalog term with a typing derivation.
pub fn typed_catalog() -> Vec<TypedProgram> {
    let mut v = Vec::new();
    let mupp = |name: &str, formula: Formula, deriv: Deriv| TypedProgram {
        name: name.into(),
        system: System::Mupp,
        formula,
        deriv,
        needs_y: false,
    };
    for n in 0..=10 {
        v.push(mupp(
            &format!("church({n})"),
            ent_of(s_n(n)),
            church_deriv(n),
        ));
    }
    v.push(mupp("btrue", bool_of(b1()), btrue_deriv()));
    v.push(mupp("bfalse", bool_of(b0()), bfalse_deriv()));
    let x0 = || atom("X", Vec::new());
    v.push(mupp(
        "id",
        crate::typing::formula::all_pred("X", 0, imp(x0(), x0())),
        id_deriv(),
    ));
    v.push(mupp(
        "exit",
        crate::typing::formula::all_pred("X", 0, imp(bottom(), x0())),
        exit_deriv(),
    ));
    v.push(mupp(
        "cc",
        crate::typing::formula::all_pred("X", 0, imp(neg(neg(x0())), x0())),
        cc_deriv(),
    ));
    v.push(mupp(
        "callcc",
        crate::typing::formula::all_pred("X", 0, imp(imp(neg(x0()), x0()), x0())),
        callcc_deriv(),
    ));
    v.push(mupp("hat1", bool_thunk(b1()), hat1_deriv()));
    v.push(mupp("hat0", bool_thunk(b0()), hat0_deriv()));
    v.push(mupp(
        "succ",
        all_ind("v", imp(ent_of(fvar("v")), ent_of(s(fvar("v"))))),
        succ_deriv(),
    ));
    v.push(mupp(
        "por",
        all_ind(
            "x",
            all_ind(
                "y",
                imp(
                    bool_of(fvar("x")),
                    imp(bool_of(fvar("y")), bool_of(or(fvar("x"), fvar("y")))),
                ),
            ),
        ),
        por_deriv(),
    ));
    for ns in [vec![2], vec![1, 3], vec![0, 4, 7]] {
        let name = format!(
            "producer({})",
            ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
        );
        v.push(mupp(
            &name,
            all_ind("x", imp(ent_of(fvar("x")), some_ent())),
            producer_deriv(&ns).expect("nonempty"),
        ));
    }
    v.push(TypedProgram {
        name: "theta".into(),
        system: System::Lmu,
        formula: ent_of(s_n(1)),
        deriv: theta_deriv(),
        needs_y: false,
    });
    v.push(TypedProgram {
        name: "theta_star".into(),
        system: System::Mupp,
        formula: ent_of(s_n(1)),
        deriv: crate::translate::star_deriv(
            &theta_deriv(),
            &crate::typing::fo::Equations::empty(),
            &crate::typing::validate::TypingOpts::default(),
        )
        .expect("theta's derivation translates"),
        needs_y: false,
    });
    v.push(TypedProgram {
        name: "producer_nat".into(),
        system: System::Mupp,
        formula: all_ind("v", imp(ent_of(fvar("v")), some_ent())),
        deriv: producer_nat_deriv(),
        needs_y: true,
    });
    v
}

/// Look up a typed program by catalog name.
pub fn typed(name: &str) -> Option<TypedProgram> {
    typed_catalog().into_iter().find(|p| p.name == name)
}

/// A derivation broken at exactly one rule, with the rule number its
/// validation must report.
#[derive(Debug, Clone)]
pub struct CorruptedFixture {
    pub name: &'static str,
    pub system: System,
    pub deriv: Deriv,
    pub expect_rule: &'static str,
}

/// One failing derivation per typing rule (1–9 and the fixed-point rule).
pub fn corrupted_fixtures() -> Vec<CorruptedFixture> {
    let fix = |name, system, deriv, expect_rule| CorruptedFixture {
        name,
        system,
        deriv,
        expect_rule,
    };
    vec![
        // Rule 1: the axiom's variable is missing from its context.
        fix(
            "ax-missing-var",
            System::Mupp,
            ax_l(Ctx::new().l("y", bottom()), "x"),
            "1",
        ),
        // Rule 2: the binder annotation contradicts the premise context.
        fix(
            "imp-i-wrong-annotation",
            System::Mupp,
            imp_i_dom(
                "x",
                bottom(),
                ax_l(Ctx::new().l("x", atom("P", vec![])), "x"),
            ),
            "2",
        ),
        // Rule 3: argument type does not match the function's domain.
        fix(
            "imp-e-domain-mismatch",
            System::Mupp,
            imp_e(hat1_deriv(), btrue_deriv()),
            "3",
        ),
        // Rule 4: generalized individual variable occurs free in the context.
        fix(
            "all-i-ind-var-in-ctx",
            System::Mupp,
            all_i_ind(
                "v",
                ax_l(Ctx::new().l("x", atom("P", vec![fvar("v")])), "x"),
            ),
            "4",
        ),
        // Rule 5: premise is not a first-order universal.
        fix(
            "all-e-ind-not-universal",
            System::Mupp,
            all_e_ind(zero(), btrue_deriv()),
            "5",
        ),
        // Rule 6: generalized predicate variable occurs free in the context.
        fix(
            "all-i-pred-var-in-ctx",
            System::Mupp,
            all_i_pred(
                "X",
                1,
                ax_l(Ctx::new().l("x", atom("X", vec![zero()])), "x"),
            ),
            "6",
        ),
        // Rule 7: instantiation arity disagrees with the bound predicate.
        fix(
            "all-e-pred-arity",
            System::Mupp,
            all_e_pred(vec![], bottom(), btrue_deriv()),
            "7",
        ),
        // Rule 8: the claimed equation does not hold modulo the table.
        fix(
            "eq-not-derivable",
            System::Mupp,
            eq_rule("q", bool_of(fvar("q")), b1(), b0(), btrue_deriv()),
            "8",
        ),
        // Rule 9: the μ premise is not of type _|_.
        fix(
            "mu-premise-not-bottom",
            System::Mupp,
            mu_pp("a", btrue_deriv()),
            "9",
        ),
        // Rule 9 (λμ side): re-naming [#a] over a mismatched active formula.
        fix(
            "mu-lmu-active-mismatch",
            System::Lmu,
            mu_lmu(
                "a",
                "a",
                ax_l(
                    Ctx::new().l("x", atom("P", vec![])).m("a", atom("Q", vec![])),
                    "x",
                ),
            ),
            "9",
        ),
        // Fixed-point rule while it is disabled.
        fix(
            "y-rule-disabled",
            System::Mupp,
            yfix(imp_i_dom("w", bottom(), ax_l(Ctx::new().l("w", bottom()), "w"))),
            "Y",
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::{self, ProgTerm};
    use crate::typing::fo::Equations;
    use crate::typing::validate::{validate, Subject, TypingOpts};

    fn opts_with_y() -> TypingOpts {
        TypingOpts { y_rule: true, ..TypingOpts::default() }
    }

    /// [DERIVED: validator as oracle, frozen expected formulas] Every typed
    /// catalog entry validates with an empty context, the advertised formula,
    /// and a subject α-equivalent to the shipped program.
    #[test]
    fn typed_catalog_validates_and_matches_programs() {
        let eqs = Equations::or_bool();
        for p in typed_catalog() {
            let checked = validate(&p.deriv, p.system, &eqs, &opts_with_y())
                .unwrap_or_else(|e| panic!("{} failed to validate: {e}", p.name));
            assert!(
                checked.judgment.formula.alpha_eq(&p.formula),
                "{}: concluded {} instead of {}",
                p.name,
                checked.judgment.formula,
                p.formula
            );
            assert!(checked.judgment.lam.is_empty(), "{}: open λ-context", p.name);
            assert!(checked.judgment.mu.is_empty(), "{}: open μ-context", p.name);
            assert_eq!(checked.used_y, p.needs_y, "{}: fixed-point flag", p.name);
            let prog = programs::mk(&p.name).expect("catalog name resolves");
            match (&checked.judgment.subject, &prog.term) {
                (Subject::Mupp(s), ProgTerm::Mupp(t)) => {
                    assert!(s.alpha_eq(t), "{}: subject {} is not {}", p.name, s, t)
                }
                (Subject::Lmu(s), ProgTerm::Lmu(t)) => {
                    assert!(s.alpha_eq(t), "{}: subject {} is not {}", p.name, s, t)
                }
                _ => panic!("{}: derivation system differs from the catalog term", p.name),
            }
        }
    }

    /// [TRIVIAL] The catalog covers the full numeral range and both control
    /// operators, and only the unbounded producer needs the fixed-point rule.
    #[test]
    fn typed_catalog_coverage() {
        let cat = typed_catalog();
        assert_eq!(cat.len(), 27);
        assert_eq!(cat.iter().filter(|p| p.needs_y).count(), 1);
        assert_eq!(
            cat.iter().filter(|p| matches!(p.system, System::Lmu)).count(),
            1
        );
    }

    /// [DERIVED: validator as oracle] Each corrupted fixture fails, and fails
    /// at the rule it corrupts.
    #[test]
    fn corrupted_fixtures_fail_at_their_rule() {
        let eqs = Equations::or_bool();
        for f in corrupted_fixtures() {
            match validate(&f.deriv, f.system, &eqs, &TypingOpts::default()) {
                Ok(c) => panic!("{} validated to {}", f.name, c.judgment),
                Err(e) => assert_eq!(
                    e.rule, f.expect_rule,
                    "{}: failed at rule {} ({}) instead of rule {}",
                    f.name, e.rule, e.msg, f.expect_rule
                ),
            }
        }
    }

    /// [DERIVED: validator as oracle] por's derivation is the one that
    /// exercises the equation rule; with an empty equation table it fails at
    /// exactly that rule.
    #[test]
    fn por_needs_the_equation_table() {
        let err = validate(
            &por_deriv(),
            System::Mupp,
            &Equations::empty(),
            &TypingOpts::default(),
        )
        .expect_err("por must not validate without equations");
        assert_eq!(err.rule, "8");
        let n_eq = count_eq(&por_deriv());
        assert_eq!(n_eq, 4, "por uses the equation rule for all four or-facts");
    }

    fn count_eq(d: &Deriv) -> usize {
        let here = usize::from(matches!(d, Deriv::Eq { .. }));
        here + d.premises().iter().map(|p| count_eq(p)).sum::<usize>()
    }

    /// [TRIVIAL] Derivation JSON round-trips structurally on the largest
    /// catalog derivations.
    #[test]
    fn derivation_json_round_trips() {
        for p in typed_catalog() {
            let j = p.deriv.to_json();
            let back = Deriv::from_json(&j)
                .unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert_eq!(back, p.deriv, "{}", p.name);
        }
    }
}
