//! Definable linear orders and their condensation rank.
//!
//! `order_formula(k)` generates the `≤_k` family: lexicographic comparison
//! of the key `(V(u_1), …, V(u_{k-1}), x)` where `u_1 = x` and
//! `u_{i+1} = u_i − V(u_i)`, the subtraction rendered as existential
//! addition (`u_{i+1} + V(u_i) = u_i`, total because `V(u) ≤ u`). The rank
//! engine iterates the condensation `≃_{α+1}`: two points are merged when
//! only finitely many `≃_α`-classes lie strictly between them, realized with
//! the `∃^∞` automaton operation by counting the numerically least element
//! of each class.

use num_bigint::BigUint;
use thiserror::Error;

use crate::automata::{AutomataError, BoolOp, Dfa};
use crate::compiler::{atom_automaton, compile, decide, CompileConfig, CompileError};
use crate::oracle::valuation;
use crate::syntax::{free_vars, parse, rename_free, var, AtomKind, CmpOp, Formula, Term};

/// A definable linear order: `relation` read as `a ≤ b` over the two
/// designated free variables, restricted to `domain` (one free variable).
#[derive(Clone, Debug)]
pub struct OrderSpec {
    pub relation: Formula,
    pub relation_vars: (String, String),
    pub domain: Formula,
    pub domain_var: String,
}

impl OrderSpec {
    /// Relation over all of ℕ; the designated variables are the relation's
    /// free variables in first-occurrence order.
    pub fn on_naturals(relation: Formula) -> Result<Self, RankError> {
        Self::new(relation, parse("x = x").expect("fixed formula"))
    }

    pub fn new(relation: Formula, domain: Formula) -> Result<Self, RankError> {
        let rv = free_vars(&relation);
        if rv.len() != 2 {
            return Err(RankError::BadRelationArity(rv));
        }
        let dv = free_vars(&domain);
        if dv.len() != 1 {
            return Err(RankError::BadDomainArity(dv));
        }
        Ok(OrderSpec {
            relation,
            relation_vars: (rv[0].clone(), rv[1].clone()),
            domain,
            domain_var: dv[0].clone(),
        })
    }
}

/// Outcome of the condensation iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankOutcome {
    FiniteRank(usize),
    /// The iteration cap was reached before the quotient became finite.
    CapExceeded(usize),
    /// A finite-stage fixpoint with an infinite quotient (non-scattered).
    InfiniteByFixpoint,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub outcome: RankOutcome,
    /// Minimized state count of each condensation automaton `≃_α`, α ≥ 0.
    pub step_states: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderLaw {
    Reflexivity,
    Antisymmetry,
    Transitivity,
    Totality,
}

#[derive(Debug, Error)]
pub enum RankError {
    #[error("relation must have exactly two free variables, found {0:?}")]
    BadRelationArity(Vec<String>),
    #[error("domain must have exactly one free variable, found {0:?}")]
    BadDomainArity(Vec<String>),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("relation is not a linear order on the domain: {0:?} fails")]
    NotLinearOrder(OrderLaw),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// The paper's order family `≤_k` as a formula with free variables `a`, `b`.
pub fn order_formula(k: usize) -> Result<Formula, RankError> {
    if k == 0 {
        return Err(RankError::ZeroK);
    }
    if k == 1 {
        return Ok(Formula::Cmp(var("a"), CmpOp::Le, var("b")));
    }
    let mut aux: Vec<String> = Vec::new();
    let mut constraints: Vec<Formula> = Vec::new();
    // u_1 = the variable itself; u_{i+1} + V(u_i) = u_i.
    let chain = |side: &str, aux: &mut Vec<String>, constraints: &mut Vec<Formula>| -> Vec<Term> {
        let mut us = vec![var(side)];
        for i in 2..k {
            let u = format!("u{side}{i}");
            constraints.push(Formula::Cmp(
                Term::sum(var(u.clone()), Term::v(us[i - 2].clone())),
                CmpOp::Eq,
                us[i - 2].clone(),
            ));
            aux.push(u.clone());
            us.push(var(u));
        }
        us.iter().map(|u| Term::v(u.clone())).collect()
    };
    let keys_a = chain("a", &mut aux, &mut constraints);
    let keys_b = chain("b", &mut aux, &mut constraints);
    let mut disjuncts: Vec<Formula> = Vec::new();
    for j in 0..k - 1 {
        let mut parts: Vec<Formula> = (0..j)
            .map(|i| Formula::Cmp(keys_a[i].clone(), CmpOp::Eq, keys_b[i].clone()))
            .collect();
        parts.push(Formula::Cmp(keys_a[j].clone(), CmpOp::Lt, keys_b[j].clone()));
        disjuncts.push(Formula::conj(parts));
    }
    let mut last: Vec<Formula> = (0..k - 1)
        .map(|i| Formula::Cmp(keys_a[i].clone(), CmpOp::Eq, keys_b[i].clone()))
        .collect();
    last.push(Formula::Cmp(var("a"), CmpOp::Le, var("b")));
    disjuncts.push(Formula::conj(last));
    let mut body = Formula::disj(disjuncts);
    if !constraints.is_empty() {
        constraints.push(body);
        body = Formula::conj(constraints);
    }
    for u in aux.into_iter().rev() {
        body = Formula::exists(u, body);
    }
    Ok(body)
}

/// Evaluates `x ≤_k y` numerically, without automata: compare the key
/// `(V(u_1), …, V(u_{k-1}), x)` lexicographically. When `u_i` reaches 0 all
/// later entries are 0 (forced by `V(0) = 0`).
pub fn compare_direct(k: usize, x: &BigUint, y: &BigUint, base: u32) -> bool {
    assert!(k >= 1, "k must be at least 1");
    let keys = |value: &BigUint| -> Vec<BigUint> {
        let mut u = value.clone();
        (0..k - 1)
            .map(|_| {
                let kappa = valuation(&u, base);
                u -= &kappa;
                kappa
            })
            .collect()
    };
    let (ka, kb) = (keys(x), keys(y));
    for (a, b) in ka.iter().zip(kb.iter()) {
        if a != b {
            return a < b;
        }
    }
    x <= y
}

/// Internal automaton kit shared by the rank engine. Track names are
/// `a`, `b` for the relation, `c` for the counted element and `d` for the
/// blocking witness.
struct OrderKit {
    leq: Dfa,
    dom: Dfa,
    cfg: CompileConfig,
}

impl OrderKit {
    fn from_spec(spec: &OrderSpec, cfg: &CompileConfig) -> Result<Self, RankError> {
        let mut map = std::collections::HashMap::new();
        map.insert(spec.relation_vars.0.clone(), "a".to_string());
        map.insert(spec.relation_vars.1.clone(), "b".to_string());
        let leq = compile(&rename_free(&spec.relation, &map), cfg)?
            .align_to(&["a".to_string(), "b".to_string()])?
            .minimize();
        let mut dmap = std::collections::HashMap::new();
        dmap.insert(spec.domain_var.clone(), "a".to_string());
        let dom = compile(&rename_free(&spec.domain, &dmap), cfg)?.minimize();
        Ok(OrderKit { leq, dom, cfg: cfg.clone() })
    }

    fn from_automata(leq: Dfa, dom: Dfa, cfg: &CompileConfig) -> Result<Self, RankError> {
        let leq = leq.rename_tracks(&["a", "b"])?.minimize();
        let dom = dom.rename_tracks(&["a"])?.minimize();
        Ok(OrderKit { leq, dom, cfg: cfg.clone() })
    }

    fn min(&self, dfa: Dfa) -> Dfa {
        if self.cfg.minimize_each_step {
            dfa.minimize()
        } else {
            dfa
        }
    }

    fn leq_on(&self, x: &str, y: &str) -> Result<Dfa, RankError> {
        Ok(self.leq.rename_tracks(&[x, y])?)
    }

    fn dom_on(&self, x: &str) -> Result<Dfa, RankError> {
        Ok(self.dom.rename_tracks(&[x])?)
    }

    /// Strict order `x < y` as `x ≤ y ∧ ¬(y ≤ x)`.
    fn lt_on(&self, x: &str, y: &str) -> Result<Dfa, RankError> {
        let cap = self.cfg.state_cap;
        let forward = self.leq_on(x, y)?;
        let backward = self.leq_on(y, x)?.complement();
        Ok(self.min(forward.boolean_combine(&backward, BoolOp::And, cap)?))
    }

    /// Numeric `x < y` on ℕ.
    fn numeric_lt(&self, x: &str, y: &str) -> Result<Dfa, RankError> {
        Ok(atom_automaton(&AtomKind::Lt(x.into(), y.into()), &self.cfg)?)
    }

    /// `c` lies strictly between `a` and `b` (either side) within the domain.
    fn between(&self) -> Result<Dfa, RankError> {
        let cap = self.cfg.state_cap;
        let low = self.lt_on("a", "c")?.boolean_combine(&self.lt_on("c", "b")?, BoolOp::And, cap)?;
        let high = self.lt_on("b", "c")?.boolean_combine(&self.lt_on("c", "a")?, BoolOp::And, cap)?;
        let either = self.min(low.boolean_combine(&high, BoolOp::Or, cap)?);
        let on_dom = either.boolean_combine(&self.dom_on("c")?, BoolOp::And, cap)?;
        // Canonical track order, so positional renames downstream are safe.
        Ok(self.min(on_dom.align_to(&["a".to_string(), "b".to_string(), "c".to_string()])?))
    }

    /// `≃_{α+1}` from `E = ≃_α`: `a` and `b` are merged when the between-set
    /// has finitely many `E`-classes, counted via the numerically least
    /// element of each class.
    fn condensation_step(&self, e: &Dfa) -> Result<Dfa, RankError> {
        let cap = self.cfg.state_cap;
        let between = self.between()?;
        // d blocks c when d is between a and b, E-equivalent to c, and
        // numerically smaller.
        let blocker = {
            let between_d = between.rename_tracks(&["a", "b", "d"])?;
            let e_dc = e.rename_tracks(&["d", "c"])?;
            let lt_dc = self.numeric_lt("d", "c")?;
            let x = between_d.boolean_combine(&e_dc, BoolOp::And, cap)?;
            self.min(x.boolean_combine(&lt_dc, BoolOp::And, cap)?)
        };
        let some_blocker = self.min(blocker.project("d", cap)?);
        let least = self.min(between.boolean_combine(&some_blocker.complement(), BoolOp::And, cap)?);
        let infinitely_many = self.min(least.exists_inf("c", cap)?);
        let doms = self.dom_on("a")?.boolean_combine(&self.dom_on("b")?, BoolOp::And, cap)?;
        let merged = infinitely_many.complement().boolean_combine(&doms, BoolOp::And, cap)?;
        Ok(merged.align_to(&["a".to_string(), "b".to_string()])?.minimize())
    }

    /// Class representatives: domain elements that are numerically least in
    /// their `E`-class.
    fn representatives(&self, e: &Dfa) -> Result<Dfa, RankError> {
        let cap = self.cfg.state_cap;
        let e_dc = e.rename_tracks(&["d", "c"])?;
        let dom_d = self.dom_on("d")?;
        let lt_dc = self.numeric_lt("d", "c")?;
        let smaller = dom_d.boolean_combine(&e_dc, BoolOp::And, cap)?;
        let smaller = self.min(smaller.boolean_combine(&lt_dc, BoolOp::And, cap)?);
        let blocked = self.min(smaller.project("d", cap)?);
        let reps = self.dom_on("c")?.boolean_combine(&blocked.complement(), BoolOp::And, cap)?;
        Ok(self.min(reps.align_to(&["c".to_string()])?))
    }

    /// Equality restricted to the domain, the base relation `≃_0`.
    fn equality(&self) -> Result<Dfa, RankError> {
        let cap = self.cfg.state_cap;
        let eq = atom_automaton(&AtomKind::Eq("a".into(), "b".into()), &self.cfg)?;
        let eq = eq.boolean_combine(&self.dom_on("a")?, BoolOp::And, cap)?;
        Ok(self.min(eq.align_to(&["a".to_string(), "b".to_string()])?))
    }

    fn rank(&self, rank_cap: usize) -> Result<RankReport, RankError> {
        let mut e = self.equality()?;
        let mut step_states = vec![e.state_count()];
        for alpha in 0..=rank_cap {
            if self.representatives(&e)?.is_finite() {
                return Ok(RankReport { outcome: RankOutcome::FiniteRank(alpha), step_states });
            }
            if alpha == rank_cap {
                break;
            }
            let next = self.condensation_step(&e)?;
            step_states.push(next.state_count());
            if next.equivalent(&e)? {
                return Ok(RankReport { outcome: RankOutcome::InfiniteByFixpoint, step_states });
            }
            e = next;
        }
        Ok(RankReport { outcome: RankOutcome::CapExceeded(rank_cap), step_states })
    }
}

/// Decides the four linear-order laws of the relation restricted to the
/// domain; returns the first failing law, if any.
pub fn check_linear_order(
    spec: &OrderSpec,
    cfg: &CompileConfig,
) -> Result<Option<OrderLaw>, RankError> {
    let leq = |x: &str, y: &str| {
        let mut map = std::collections::HashMap::new();
        map.insert(spec.relation_vars.0.clone(), x.to_string());
        map.insert(spec.relation_vars.1.clone(), y.to_string());
        rename_free(&spec.relation, &map)
    };
    let dom = |x: &str| {
        let mut map = std::collections::HashMap::new();
        map.insert(spec.domain_var.clone(), x.to_string());
        rename_free(&spec.domain, &map)
    };
    let eq = |x: &str, y: &str| Formula::Atom(AtomKind::Eq(x.into(), y.into()));
    let laws = [
        (
            OrderLaw::Reflexivity,
            Formula::forall("x", Formula::implies(dom("x"), leq("x", "x"))),
        ),
        (
            OrderLaw::Antisymmetry,
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::implies(
                        Formula::conj(vec![dom("x"), dom("y"), leq("x", "y"), leq("y", "x")]),
                        eq("x", "y"),
                    ),
                ),
            ),
        ),
        (
            OrderLaw::Transitivity,
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::forall(
                        "z",
                        Formula::implies(
                            Formula::conj(vec![
                                dom("x"),
                                dom("y"),
                                dom("z"),
                                leq("x", "y"),
                                leq("y", "z"),
                            ]),
                            leq("x", "z"),
                        ),
                    ),
                ),
            ),
        ),
        (
            OrderLaw::Totality,
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::implies(
                        Formula::and(dom("x"), dom("y")),
                        Formula::or(leq("x", "y"), leq("y", "x")),
                    ),
                ),
            ),
        ),
    ];
    for (law, sentence) in laws {
        if !decide(&sentence, cfg)? {
            return Ok(Some(law));
        }
    }
    Ok(None)
}

/// One condensation step on an explicit equivalence automaton (tracks taken
/// positionally as `(a, b)`).
pub fn condensation_step(
    e: &Dfa,
    spec: &OrderSpec,
    cfg: &CompileConfig,
) -> Result<Dfa, RankError> {
    let kit = OrderKit::from_spec(spec, cfg)?;
    kit.condensation_step(&e.rename_tracks(&["a", "b"])?)
}

/// Condensation rank of a definable linear order. The relation must pass
/// [`check_linear_order`] first.
pub fn rank(spec: &OrderSpec, rank_cap: usize, cfg: &CompileConfig) -> Result<RankReport, RankError> {
    if let Some(law) = check_linear_order(spec, cfg)? {
        return Err(RankError::NotLinearOrder(law));
    }
    OrderKit::from_spec(spec, cfg)?.rank(rank_cap)
}

/// Rank of an order given directly as automata: `leq` over two tracks read
/// as `a ≤ b`, `dom` over one track. No linear-order check is applied.
pub fn rank_automata(
    leq: &Dfa,
    dom: &Dfa,
    rank_cap: usize,
    cfg: &CompileConfig,
) -> Result<RankReport, RankError> {
    OrderKit::from_automata(leq.clone(), dom.clone(), cfg)?.rank(rank_cap)
}

/// The base `≃_0` automaton (equality on the domain), exposed for tests and
/// the CLI's step observability.
pub fn equality_on_domain(spec: &OrderSpec, cfg: &CompileConfig) -> Result<Dfa, RankError> {
    OrderKit::from_spec(spec, cfg)?.equality()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::render;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn cfg() -> CompileConfig {
        CompileConfig::default()
    }

    #[test]
    fn order_formula_one_is_leq() {
        let f = order_formula(1).unwrap();
        assert_eq!(render(&f), "a <= b");
        assert!(order_formula(0).is_err());
    }

    #[test]
    fn order_formula_two_matches_display() {
        // V(a) < V(b) ∨ (V(a) = V(b) ∧ a ≤ b)
        let f = order_formula(2).unwrap();
        let text = render(&f);
        assert!(text.contains("V(a) < V(b)"), "{text}");
        assert!(text.contains("V(a) = V(b)"), "{text}");
        assert!(text.contains("a <= b"), "{text}");
        assert_eq!(free_vars(&f), vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn compare_direct_examples() {
        // V(6) = 2 < V(4) = 4.
        assert!(compare_direct(2, &n(6), &n(4), 2));
        assert!(!compare_direct(2, &n(4), &n(6), 2));
        for k in 1..=4 {
            assert!(compare_direct(k, &n(17), &n(17), 2));
        }
        // 0 is the unique minimum of ≤₂.
        for y in 1..64u64 {
            assert!(compare_direct(2, &n(0), &n(y), 2));
            assert!(!compare_direct(2, &n(y), &n(0), 2));
        }
    }

    #[test]
    fn check_linear_order_accepts_and_rejects() {
        let good = OrderSpec::on_naturals(order_formula(2).unwrap()).unwrap();
        assert_eq!(check_linear_order(&good, &cfg()).unwrap(), None);
        let strict = OrderSpec::on_naturals(parse("a < b").unwrap()).unwrap();
        assert_eq!(
            check_linear_order(&strict, &cfg()).unwrap(),
            Some(OrderLaw::Reflexivity)
        );
        let degenerate = OrderSpec::on_naturals(parse("a = b").unwrap()).unwrap();
        assert_eq!(
            check_linear_order(&degenerate, &cfg()).unwrap(),
            Some(OrderLaw::Totality)
        );
    }

    #[test]
    fn rank_zero_for_finite_domain() {
        let spec =
            OrderSpec::new(parse("a <= b").unwrap(), parse("x < 5").unwrap()).unwrap();
        let report = rank(&spec, 6, &cfg()).unwrap();
        assert_eq!(report.outcome, RankOutcome::FiniteRank(0));
    }

    #[test]
    fn rank_of_standard_order_is_one() {
        let spec = OrderSpec::on_naturals(order_formula(1).unwrap()).unwrap();
        let report = rank(&spec, 6, &cfg()).unwrap();
        assert_eq!(report.outcome, RankOutcome::FiniteRank(1));
    }

    #[test]
    fn condensation_of_equality_under_standard_order_is_total() {
        let spec = OrderSpec::on_naturals(order_formula(1).unwrap()).unwrap();
        let e0 = equality_on_domain(&spec, &cfg()).unwrap();
        let e1 = condensation_step(&e0, &spec, &cfg()).unwrap();
        let total = Dfa::full(2, vec!["a".into(), "b".into()]).unwrap();
        assert!(e1.equivalent(&total).unwrap());
    }

    #[test]
    fn condensation_of_equality_under_leq2_is_v_equality() {
        let spec = OrderSpec::on_naturals(order_formula(2).unwrap()).unwrap();
        let e0 = equality_on_domain(&spec, &cfg()).unwrap();
        let e1 = condensation_step(&e0, &spec, &cfg()).unwrap();
        // Classes after one step: {0, 1, 3, 5, ...} (the interval (0, 1) in
        // the order is empty, so 0 merges with the odd block) and the
        // V-blocks of the even numbers.
        let expect = compile(
            &parse("V(a) = V(b) | (V(a) <= 1 & V(b) <= 1)").unwrap(),
            &cfg(),
        )
        .unwrap();
        assert!(e1.equivalent(&expect).unwrap());
        // Away from 0 the step is exactly V-equality.
        let veq = compile(&parse("V(a) = V(b)").unwrap(), &cfg()).unwrap();
        let positive = compile(&parse("0 < a & 0 < b").unwrap(), &cfg()).unwrap();
        let lhs = e1.boolean_combine(&positive, BoolOp::And, DEFAULT_CAP).unwrap();
        let rhs = veq.boolean_combine(&positive, BoolOp::And, DEFAULT_CAP).unwrap();
        assert!(lhs.equivalent(&rhs).unwrap());
    }

    #[test]
    fn condensation_step_is_monotone_on_ladder() {
        let spec = OrderSpec::on_naturals(order_formula(2).unwrap()).unwrap();
        let e0 = equality_on_domain(&spec, &cfg()).unwrap();
        let e1 = condensation_step(&e0, &spec, &cfg()).unwrap();
        // L(E0) ⊆ L(E1): E0 ∧ ¬E1 is empty.
        let gap = e0
            .boolean_combine(&e1.complement(), BoolOp::And, DEFAULT_CAP)
            .unwrap();
        assert!(gap.is_empty());
        let e2 = condensation_step(&e1, &spec, &cfg()).unwrap();
        let gap2 = e1
            .boolean_combine(&e2.complement(), BoolOp::And, DEFAULT_CAP)
            .unwrap();
        assert!(gap2.is_empty());
    }

    const DEFAULT_CAP: usize = crate::automata::DEFAULT_STATE_CAP;
}
