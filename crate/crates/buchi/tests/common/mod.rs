//! Shared helpers for the integration tests: a seeded random generator for
//! quantifier-free formulas and tuples, kept small enough that the compiled
//! automata stay desk-scale. Not every test binary uses every helper.
#![allow(dead_code)]

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use buchi::syntax::{CmpOp, Formula, Term};

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub struct FormulaGen {
    pub rng: ChaCha8Rng,
}

impl FormulaGen {
    pub fn new(seed: u64) -> FormulaGen {
        FormulaGen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn term(&mut self, depth: usize) -> Term {
        let top = if depth == 0 { 2 } else { 5 };
        match self.rng.gen_range(0..top) {
            0 => Term::Var(VARS[self.rng.gen_range(0..VARS.len())].to_string()),
            1 => Term::Const(BigUint::from(self.rng.gen_range(0u64..64))),
            2 => Term::sum(self.term(depth - 1), self.term(depth - 1)),
            3 => Term::Scale(
                BigUint::from(self.rng.gen_range(1u64..=5)),
                Box::new(self.term(depth - 1)),
            ),
            _ => Term::v(self.term(depth - 1)),
        }
    }

    fn atom(&mut self) -> Formula {
        if self.rng.gen_range(0..6) == 0 {
            let m = [2u64, 3, 5, 7][self.rng.gen_range(0..4)];
            let c = self.rng.gen_range(0..m);
            Formula::ModEq(self.term(1), BigUint::from(m), BigUint::from(c))
        } else {
            let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
            let op = ops[self.rng.gen_range(0..ops.len())];
            Formula::Cmp(self.term(2), op, self.term(2))
        }
    }

    /// A random quantifier-free formula over x, y, z.
    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_range(0..3) == 0 {
            return self.atom();
        }
        match self.rng.gen_range(0..5) {
            0 => Formula::not(self.formula(depth - 1)),
            1 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            2 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
            3 => Formula::implies(self.formula(depth - 1), self.formula(depth - 1)),
            _ => Formula::iff(self.formula(depth - 1), self.formula(depth - 1)),
        }
    }

    pub fn value_below(&mut self, bound: u64) -> BigUint {
        // Mix small values and values with long runs of equal digits, which
        // exercise carry chains and valuation positions.
        match self.rng.gen_range(0..3) {
            0 => BigUint::from(self.rng.gen_range(0..bound.max(1))),
            1 => BigUint::from(self.rng.gen_range(0..bound.max(1)) & !1),
            _ => {
                let raw = self.rng.gen_range(0..bound.max(1));
                let shift = self.rng.gen_range(0..8);
                BigUint::from((raw << shift) % bound.max(1))
            }
        }
    }
}
