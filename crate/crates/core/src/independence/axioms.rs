//! Randomized (or, for tiny universes, exhaustive) checks of the graphoid
//! axioms against any [`IndependenceModel`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::IndependenceModel;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// A1
    Symmetry,
    /// A2
    Decomposition,
    /// A3
    WeakUnion,
    /// A4
    Contraction,
    /// A5
    Intersection,
    /// A6
    Composition,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::WeakUnion,
        Axiom::Contraction,
        Axiom::Intersection,
        Axiom::Composition,
    ];

    /// The semi-graphoid axioms plus composition.
    pub const COMPOSITIONAL_SEMIGRAPHOID: [Axiom; 5] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::WeakUnion,
        Axiom::Contraction,
        Axiom::Composition,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Axiom::Symmetry => "A1",
            Axiom::Decomposition => "A2",
            Axiom::WeakUnion => "A3",
            Axiom::Contraction => "A4",
            Axiom::Intersection => "A5",
            Axiom::Composition => "A6",
        }
    }

    /// Classifies one tuple as vacuous (premise false), held, or violated.
    fn evaluate(self, m: &dyn IndependenceModel, t: &Tuple) -> Outcome {
        let i = |a: &[usize], b: &[usize], c: &[usize]| m.independent(a, b, c);
        let (a, b, c, d) = (&t.a[..], &t.b[..], &t.c[..], &t.d[..]);
        let bd = union(b, d);
        let (premise, conclusion) = match self {
            Axiom::Symmetry => {
                let p = i(a, b, c);
                (p, p && i(b, a, c))
            }
            Axiom::Decomposition => {
                let p = i(a, &bd, c);
                (p, p && i(a, b, c) && i(a, d, c))
            }
            Axiom::WeakUnion => {
                let p = i(a, &bd, c);
                (p, p && i(a, b, &union(c, d)))
            }
            Axiom::Contraction => {
                let p = i(a, b, c) && i(a, d, &union(b, c));
                (p, p && i(a, &bd, c))
            }
            Axiom::Intersection => {
                let p = i(a, b, &union(c, d)) && i(a, c, &bd);
                (p, p && i(a, &union(b, c), d))
            }
            Axiom::Composition => {
                let p = i(a, b, c) && i(a, d, c);
                (p, p && i(a, &bd, c))
            }
        };
        match (premise, conclusion) {
            (false, _) => Outcome::Vacuous,
            (true, true) => Outcome::Held,
            (true, false) => Outcome::Violated,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown axiom '{s}' (expected A1..A6)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Vacuous,
    Held,
    Violated,
}

fn union(x: &[usize], y: &[usize]) -> Vec<usize> {
    let mut u = Vec::with_capacity(x.len() + y.len());
    u.extend_from_slice(x);
    u.extend_from_slice(y);
    u.sort_unstable();
    u
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct Tuple {
    a: Vec<usize>,
    b: Vec<usize>,
    c: Vec<usize>,
    d: Vec<usize>,
}

impl Tuple {
    /// Decodes a base-5 assignment of `universe` into the bins A, B, C, D
    /// and "unused".
    fn from_code(universe: &[usize], mut code: u64) -> Tuple {
        let mut t = Tuple::default();
        for &v in universe {
            match code % 5 {
                0 => t.a.push(v),
                1 => t.b.push(v),
                2 => t.c.push(v),
                3 => t.d.push(v),
                _ => {}
            }
            code /= 5;
        }
        t
    }

    fn sample(universe: &[usize], seed: u64, trial: u64) -> Tuple {
        let mut rng = stream_rng(seed, trial);
        loop {
            let mut t = Tuple::default();
            for &v in universe {
                match rng.random_range(0..5u8) {
                    0 => t.a.push(v),
                    1 => t.b.push(v),
                    2 => t.c.push(v),
                    3 => t.d.push(v),
                    _ => {}
                }
            }
            if t.is_proper() {
                return t;
            }
        }
    }

    fn is_proper(&self) -> bool {
        !self.a.is_empty() && !self.b.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: u64,
}

/// A tuple on which an axiom's premise held and its conclusion failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub trial: usize,
    pub axiom: Axiom,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomTally {
    pub axiom: Axiom,
    /// Tuples on which the premise held, so the check was not vacuous.
    pub premises_held: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub tuples_checked: usize,
    pub exhaustive: bool,
    pub tallies: Vec<AxiomTally>,
    /// Sorted by trial index, then axiom.
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn violation_count(&self, axiom: Axiom) -> usize {
        self.tallies
            .iter()
            .find(|t| t.axiom == axiom)
            .map_or(0, |t| t.violations)
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `axioms` on disjoint tuples `(A, B, C, D)` drawn from `universe`
/// with `A` and `B` nonempty.
///
/// When the universe is small enough that all `5^|universe|` assignments
/// number no more than `trials`, every proper tuple is checked instead of
/// sampling. Otherwise tuple `t` is drawn from stream `t` of the seeded
/// generator, so the report is identical for any thread count.
pub fn check_axioms(
    model: &dyn IndependenceModel,
    universe: &[usize],
    axioms: &[Axiom],
    config: CheckConfig,
) -> Result<AxiomReport> {
    if config.trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    super::disjoint_check(model.universe_size(), &[universe])?;

    let mut axioms = axioms.to_vec();
    axioms.sort_unstable();
    axioms.dedup();

    let exhaustive_codes = 5u64
        .checked_pow(universe.len() as u32)
        .filter(|&c| c <= config.trials as u64);
    let tuples: Vec<Tuple> = if universe.len() < 2 {
        Vec::new()
    } else if let Some(codes) = exhaustive_codes {
        (0..codes)
            .map(|code| Tuple::from_code(universe, code))
            .filter(Tuple::is_proper)
            .collect()
    } else {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| Tuple::sample(universe, config.seed, t))
            .collect()
    };

    let outcomes: Vec<Vec<Outcome>> = tuples
        .par_iter()
        .map(|t| axioms.iter().map(|ax| ax.evaluate(model, t)).collect())
        .collect();

    let mut tallies: Vec<AxiomTally> = axioms
        .iter()
        .map(|&axiom| AxiomTally {
            axiom,
            premises_held: 0,
            violations: 0,
        })
        .collect();
    let mut violations = Vec::new();
    for (trial, (tuple, row)) in tuples.iter().zip(&outcomes).enumerate() {
        for (k, outcome) in row.iter().enumerate() {
            match outcome {
                Outcome::Vacuous => {}
                Outcome::Held => tallies[k].premises_held += 1,
                Outcome::Violated => {
                    tallies[k].premises_held += 1;
                    tallies[k].violations += 1;
                    violations.push(AxiomViolation {
                        trial,
                        axiom: axioms[k],
                        a: tuple.a.clone(),
                        b: tuple.b.clone(),
                        c: tuple.c.clone(),
                        d: tuple.d.clone(),
                    });
                }
            }
        }
    }

    Ok(AxiomReport {
        tuples_checked: tuples.len(),
        exhaustive: exhaustive_codes.is_some(),
        tallies,
        violations,
    })
}
