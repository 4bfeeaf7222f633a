//! The explicit structure refuting the naive axiomatization of BA₂.
//!
//! Elements are pairs `(p, q)` with `p ∈ ℚ`, `p ≥ 0`, `q ∈ ℤ`, and `q ≥ 0`
//! whenever `p = 0`. Addition is componentwise; the order is lexicographic
//! (forced by the axiom `x < y ↔ ∃z (x + z = y ∧ z ≠ 0)`). The structure
//! satisfies the Presburger axioms (1)–(11) plus the inductive definition
//! of V₂ (axioms (12)–(14)) but refutes the sentence
//! `∀x (V₂(x)=x → ∀y (x<y<x+x → V₂(y)<y))`: between the non-standard
//! "powers of two" `(p,0)` and `(2p,0)` sits `(3p/2, 0)` with `V₂` equal
//! to itself.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::{AtomKind, CmpOp, Formula, Term};

/// An element `(p, q)` of the structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CmElement {
    p: BigRational,
    q: BigInt,
}

#[derive(Debug, Error)]
pub enum CmError {
    #[error("not an element: p = {p} is negative")]
    NegativeP { p: BigRational },
    #[error("not an element: p = 0 requires q >= 0, got q = {q}")]
    NegativeStandard { q: BigInt },
    #[error("variable '{0}' is not assigned")]
    Unassigned(String),
    #[error("quantifier in a quantifier-free context")]
    Quantified,
}

impl CmElement {
    pub fn new(p: BigRational, q: BigInt) -> Result<CmElement, CmError> {
        if p.is_negative() {
            return Err(CmError::NegativeP { p });
        }
        if p.is_zero() && q.is_negative() {
            return Err(CmError::NegativeStandard { q });
        }
        Ok(CmElement { p, q })
    }

    /// The standard natural number `(0, n)`.
    pub fn standard(n: impl Into<BigUint>) -> CmElement {
        CmElement {
            p: BigRational::zero(),
            q: BigInt::from_biguint(Sign::Plus, n.into()),
        }
    }

    pub fn zero() -> CmElement {
        CmElement::standard(0u32)
    }

    pub fn one() -> CmElement {
        CmElement::standard(1u32)
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_standard(&self) -> bool {
        self.p.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }
}

impl fmt::Display for CmElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

pub fn cm_add(x: &CmElement, y: &CmElement) -> CmElement {
    CmElement {
        p: &x.p + &y.p,
        q: &x.q + &y.q,
    }
}

/// Componentwise difference, defined exactly when the result is an element,
/// i.e. exactly when `y ≤ x`.
pub fn cm_sub(x: &CmElement, y: &CmElement) -> Option<CmElement> {
    CmElement::new(&x.p - &y.p, &x.q - &y.q).ok()
}

/// `x ≤ y`: lexicographic on `(p, q)`. Equivalent to the existence of an
/// element `z` with `x + z = y`.
pub fn cm_leq(x: &CmElement, y: &CmElement) -> bool {
    x.p < y.p || (x.p == y.p && x.q <= y.q)
}

pub fn cm_lt(x: &CmElement, y: &CmElement) -> bool {
    cm_leq(x, y) && x != y
}

/// Scalar multiple `n · x` for a standard natural `n`.
pub fn cm_scale(n: &BigUint, x: &CmElement) -> CmElement {
    let n = BigInt::from_biguint(Sign::Plus, n.clone());
    CmElement {
        p: &x.p * BigRational::from(n.clone()),
        q: &x.q * n,
    }
}

/// 2-adic valuation of a nonzero integer, sign-independent.
fn nu2(q: &BigInt) -> u64 {
    debug_assert!(!q.is_zero());
    q.magnitude().trailing_zeros().unwrap_or(0)
}

/// The structure's V₂, split into the four cases of the construction.
pub fn cm_v2(x: &CmElement) -> CmElement {
    if x.is_standard() {
        // Standard (0, n): the expected value, with V₂(0) = 0.
        if x.q.is_zero() {
            return CmElement::zero();
        }
        return CmElement::standard(BigUint::one() << nu2(&x.q));
    }
    if x.q.is_odd() {
        // Odd non-standard numbers cannot be divided by two.
        return CmElement::one();
    }
    if !x.q.is_zero() {
        return CmElement::standard(BigUint::one() << nu2(&x.q));
    }
    // (p, 0): infinitely divisible by two; V₂ is the element itself.
    x.clone()
}

/// `x ≡ y (mod n)`: an element `u` with `x = n·u + y` or `y = n·u + x`
/// exists iff `n` divides `x.q − y.q` (the `p` parts are always divisible).
pub fn cm_mod_eq(x: &CmElement, y: &CmElement, n: &BigUint) -> bool {
    let n = BigInt::from_biguint(Sign::Plus, n.clone());
    (&x.q - &y.q).mod_floor(&n).is_zero()
}

pub type CmAssignment = HashMap<String, CmElement>;

/// The V₂ interpretation, injectable so tests can corrupt single cases.
pub type V2Fn = dyn Fn(&CmElement) -> CmElement;

pub fn cm_eval_term(t: &Term, a: &CmAssignment) -> Result<CmElement, CmError> {
    cm_eval_term_with(t, a, &cm_v2)
}

pub fn cm_eval_term_with(
    t: &Term,
    a: &CmAssignment,
    v2: &V2Fn,
) -> Result<CmElement, CmError> {
    match t {
        Term::Var(x) => a
            .get(x)
            .cloned()
            .ok_or_else(|| CmError::Unassigned(x.clone())),
        Term::Const(c) => Ok(CmElement::standard(c.clone())),
        Term::Sum(u, v) => Ok(cm_add(
            &cm_eval_term_with(u, a, v2)?,
            &cm_eval_term_with(v, a, v2)?,
        )),
        Term::Scale(k, u) => Ok(cm_scale(k, &cm_eval_term_with(u, a, v2)?)),
        Term::V(u) => Ok(v2(&cm_eval_term_with(u, a, v2)?)),
    }
}

/// Evaluates a quantifier-free formula in the structure.
pub fn cm_eval_qf(f: &Formula, a: &CmAssignment) -> Result<bool, CmError> {
    cm_eval_qf_with(f, a, &cm_v2)
}

pub fn cm_eval_qf_with(f: &Formula, a: &CmAssignment, v2: &V2Fn) -> Result<bool, CmError> {
    let var = |x: &String| -> Result<CmElement, CmError> {
        a.get(x)
            .cloned()
            .ok_or_else(|| CmError::Unassigned(x.clone()))
    };
    Ok(match f {
        Formula::Cmp(s, op, t) => {
            let (u, v) = (cm_eval_term_with(s, a, v2)?, cm_eval_term_with(t, a, v2)?);
            match op {
                CmpOp::Eq => u == v,
                CmpOp::Ne => u != v,
                CmpOp::Lt => cm_lt(&u, &v),
                CmpOp::Le => cm_leq(&u, &v),
                CmpOp::Gt => cm_lt(&v, &u),
                CmpOp::Ge => cm_leq(&v, &u),
            }
        }
        Formula::ModEq(t, m, c) => {
            let u = cm_eval_term_with(t, a, v2)?;
            cm_mod_eq(&u, &CmElement::standard(c.clone()), m)
        }
        Formula::Atom(kind) => match kind {
            AtomKind::Eq(x, y) => var(x)? == var(y)?,
            AtomKind::EqConst(x, c) => var(x)? == CmElement::standard(c.clone()),
            AtomKind::Add(x, y, z) => cm_add(&var(x)?, &var(y)?) == var(z)?,
            AtomKind::Lt(x, y) => cm_lt(&var(x)?, &var(y)?),
            AtomKind::Mod(x, c, m) => cm_mod_eq(&var(x)?, &CmElement::standard(c.clone()), m),
            AtomKind::VEq(x, y) => v2(&var(x)?) == var(y)?,
        },
        Formula::Not(g) => !cm_eval_qf_with(g, a, v2)?,
        Formula::And(g, h) => cm_eval_qf_with(g, a, v2)? && cm_eval_qf_with(h, a, v2)?,
        Formula::Or(g, h) => cm_eval_qf_with(g, a, v2)? || cm_eval_qf_with(h, a, v2)?,
        Formula::Implies(g, h) => !cm_eval_qf_with(g, a, v2)? || cm_eval_qf_with(h, a, v2)?,
        Formula::Iff(g, h) => cm_eval_qf_with(g, a, v2)? == cm_eval_qf_with(h, a, v2)?,
        Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsInf(..) => {
            return Err(CmError::Quantified)
        }
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AxiomStat {
    pub samples: usize,
    pub failures: usize,
    pub first_counterexample: Option<String>,
}

/// Per-axiom pass/fail counters over a sampled check run.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AxiomReport {
    pub sample_count: usize,
    pub seed: u64,
    /// Indexed by axiom id 1..=14.
    pub axioms: Vec<(usize, AxiomStat)>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(|(_, s)| s.failures == 0)
    }

    pub fn failing_axioms(&self) -> Vec<usize> {
        self.axioms
            .iter()
            .filter(|(_, s)| s.failures > 0)
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .axioms
            .iter()
            .map(|(id, s)| {
                (
                    id.to_string(),
                    serde_json::to_value(s).expect("axiom stat serializes"),
                )
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "sampleCount": self.sample_count,
            "seed": self.seed,
            "axioms": map,
        }))
        .expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<7} {:>8} {:>9}  {}\n",
            "axiom", "samples", "failures", "first counterexample"
        ));
        for (id, s) in &self.axioms {
            out.push_str(&format!(
                "({:<2})    {:>8} {:>9}  {}\n",
                id,
                s.samples,
                s.failures,
                s.first_counterexample.as_deref().unwrap_or("-")
            ));
        }
        out
    }
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn rational(&mut self) -> BigRational {
        // Positive: dyadic or small-denominator.
        let num = BigInt::from(self.rng.gen_range(1i64..=64));
        let den = if self.rng.gen_bool(0.5) {
            BigInt::from(1i64 << self.rng.gen_range(0u32..=6))
        } else {
            BigInt::from(self.rng.gen_range(1i64..=12))
        };
        BigRational::new(num, den)
    }

    /// Mixture hitting every cm_v2 case with substantial frequency.
    fn element(&mut self) -> CmElement {
        match self.rng.gen_range(0u32..5) {
            0 => CmElement::standard(BigUint::from(self.rng.gen_range(0u64..=1024))),
            1 => {
                // Non-standard odd.
                let q = self.rng.gen_range(-512i64..512) * 2 + 1;
                CmElement::new(self.rational(), BigInt::from(q)).expect("p > 0")
            }
            2 => {
                // Non-standard even, q ≠ 0.
                let mut q = self.rng.gen_range(-512i64..=512) * 2;
                if q == 0 {
                    q = 2;
                }
                CmElement::new(self.rational(), BigInt::from(q)).expect("p > 0")
            }
            3 => CmElement::new(self.rational(), BigInt::zero()).expect("p > 0"),
            _ => {
                let q = self.rng.gen_range(-1024i64..=1024);
                CmElement::new(self.rational(), BigInt::from(q)).expect("p > 0")
            }
        }
    }

    fn modulus(&mut self) -> BigUint {
        let choices = [2u32, 3, 5, 7];
        BigUint::from(choices[self.rng.gen_range(0..choices.len())])
    }
}

pub fn check_axioms(sample_count: usize, seed: u64) -> AxiomReport {
    check_axioms_with(sample_count, seed, &cm_v2)
}

/// Checks axioms (1)–(14) on sampled instances; quantified content is
/// witnessed constructively, never searched.
pub fn check_axioms_with(sample_count: usize, seed: u64, v2: &V2Fn) -> AxiomReport {
    let mut sampler = Sampler::new(seed);
    let mut stats: Vec<AxiomStat> = (0..14)
        .map(|_| AxiomStat {
            samples: 0,
            failures: 0,
            first_counterexample: None,
        })
        .collect();
    let one = CmElement::one();
    for _ in 0..sample_count {
        let x = sampler.element();
        let y = sampler.element();
        let z = sampler.element();
        let n = sampler.modulus();
        let nz = BigInt::from_biguint(Sign::Plus, n.clone());
        let mut record = |id: usize, ok: bool, witness: String| {
            let stat = &mut stats[id - 1];
            stat.samples += 1;
            if !ok {
                stat.failures += 1;
                stat.first_counterexample.get_or_insert(witness);
            }
        };

        // (1) x = 0 ↔ ∀y (x + y = y); the ∀ side fails at y itself when
        // x ≠ 0, and holds for the sampled y when x = 0.
        let ax1 = if x.is_zero() {
            cm_add(&x, &y) == y
        } else {
            cm_add(&x, &y) != y
        };
        record(1, ax1, format!("x={x}, y={y}"));

        // (2) x < y ↔ ∃z (x + z = y ∧ z ≠ 0); witness by subtraction,
        // converse via the sampled z.
        let ax2_fwd = if cm_lt(&x, &y) {
            match cm_sub(&y, &x) {
                Some(d) => !d.is_zero() && cm_add(&x, &d) == y,
                None => false,
            }
        } else {
            cm_sub(&y, &x).map_or(true, |d| d.is_zero())
        };
        let shifted = cm_add(&x, &z);
        let ax2_bwd = z.is_zero() || cm_lt(&x, &shifted);
        record(2, ax2_fwd && ax2_bwd, format!("x={x}, y={y}, z={z}"));

        // (3) x = 1 ↔ 0 < x ∧ ¬∃z (0 < z < x); when x ∉ {0, 1} exhibit an
        // intermediate z.
        let ax3 = if x == one {
            cm_lt(&CmElement::zero(), &x)
        } else if x.is_zero() {
            !cm_lt(&CmElement::zero(), &x)
        } else {
            let mid = if x.is_standard() {
                one.clone()
            } else {
                CmElement::new(&x.p / BigRational::from(BigInt::from(2)), BigInt::zero())
                    .expect("p/2 > 0")
            };
            cm_lt(&CmElement::zero(), &mid) && cm_lt(&mid, &x)
        };
        record(3, ax3, format!("x={x}"));

        // (4) x ≡ₙ y ↔ ∃u (x = n·u + y ∨ y = n·u + x); positive side by the
        // explicit quotient, negative side because q-residues mod n are
        // invariant under adding n·u.
        let ax4 = if cm_mod_eq(&x, &y, &n) {
            let (hi, lo) = if cm_leq(&y, &x) { (&x, &y) } else { (&y, &x) };
            match cm_sub(hi, lo) {
                Some(d) => {
                    let u = CmElement::new(
                        &d.p / BigRational::from(nz.clone()),
                        d.q.div_floor(&nz),
                    );
                    match u {
                        Ok(u) => cm_add(&cm_scale(&n, &u), lo) == *hi,
                        Err(_) => false,
                    }
                }
                None => false,
            }
        } else {
            !(&x.q - &y.q).mod_floor(&nz).is_zero()
        };
        record(4, ax4, format!("x={x}, y={y}, n={n}"));

        // (5) ¬(x + 1 = 0)
        record(5, !cm_add(&x, &one).is_zero(), format!("x={x}"));

        // (6) x + z = y + z → x = y
        let ax6 = cm_add(&x, &z) != cm_add(&y, &z) || x == y;
        record(6, ax6, format!("x={x}, y={y}, z={z}"));

        // (7) associativity
        let ax7 = cm_add(&cm_add(&x, &y), &z) == cm_add(&x, &cm_add(&y, &z));
        record(7, ax7, format!("x={x}, y={y}, z={z}"));

        // (8) x = 0 ∨ ∃y (x = y + 1); predecessor is valid whenever x ≠ 0.
        let ax8 = x.is_zero()
            || cm_sub(&x, &one).map_or(false, |pred| cm_add(&pred, &one) == x);
        record(8, ax8, format!("x={x}"));

        // (9) commutativity
        record(9, cm_add(&x, &y) == cm_add(&y, &x), format!("x={x}, y={y}"));

        // (10) totality
        let ax10 = cm_lt(&x, &y) || x == y || cm_lt(&y, &x);
        record(10, ax10, format!("x={x}, y={y}"));

        // (11) ⋁ᵣ x ≡ₙ r; exhibit the quotient for r = x.q mod n.
        let ax11 = {
            let r = x.q.mod_floor(&nz);
            let u = CmElement::new(&x.p / BigRational::from(nz.clone()), (&x.q - &r).div_floor(&nz));
            match u {
                Ok(u) => {
                    let r_el = CmElement::new(BigRational::zero(), r).expect("residue >= 0");
                    cm_add(&cm_scale(&n, &u), &r_el) == x
                }
                Err(_) => false,
            }
        };
        record(11, ax11, format!("x={x}, n={n}"));

        // (12) V₂(x) = 0 ↔ x = 0
        let ax12 = v2(&x).is_zero() == x.is_zero();
        record(12, ax12, format!("x={x}, V2(x)={}", v2(&x)));

        // x = t + t is solvable iff q is even, with t = (p/2, q/2).
        let half = if x.q.is_even() {
            CmElement::new(
                &x.p / BigRational::from(BigInt::from(2)),
                &x.q / BigInt::from(2),
            )
            .ok()
        } else {
            None
        };

        // (13) ¬∃t (t + t = x) → V₂(x) = 1
        let ax13 = match &half {
            Some(t) => cm_add(t, t) == x, // the hypothesis is false; sanity-check the witness
            None => v2(&x) == one,
        };
        record(13, ax13, format!("x={x}, V2(x)={}", v2(&x)));

        // (14) ∃t (t + t = x) → V₂(x) = V₂(t) + V₂(t)
        let ax14 = match &half {
            Some(t) => v2(&x) == cm_add(&v2(t), &v2(t)),
            None => true,
        };
        record(14, ax14, format!("x={x}, V2(x)={}", v2(&x)));
    }
    AxiomReport {
        sample_count,
        seed,
        axioms: (1..=14).zip(stats).collect(),
    }
}

#[derive(Clone, Debug)]
pub struct SeparatingWitness {
    pub x: CmElement,
    pub y: CmElement,
    pub checks_passed: bool,
}

/// The refutation of `∀x (V₂(x)=x → ∀y (x<y<x+x → V₂(y)<y))` at the
/// non-standard power of two `x = (p, 0)`, with `y = (3p/2, 0)`.
pub fn separating_counterexample(p: &BigRational) -> SeparatingWitness {
    assert!(p.is_positive(), "p must be positive");
    let x = CmElement::new(p.clone(), BigInt::zero()).expect("p > 0");
    let three_halves = BigRational::new(BigInt::from(3), BigInt::from(2));
    let y = CmElement::new(p * three_halves, BigInt::zero()).expect("3p/2 > 0");
    let checks_passed = cm_v2(&x) == x
        && cm_lt(&x, &y)
        && cm_lt(&y, &cm_add(&x, &x))
        && cm_v2(&y) == y;
    SeparatingWitness { x, y, checks_passed }
}
