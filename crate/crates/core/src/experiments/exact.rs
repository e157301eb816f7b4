//! Exact output distributions of both experiments by full enumeration.
//!
//! Refresh side: every raw oracle tuple is enumerated, tuples violating the
//! orthogonality condition are dropped, and each remaining tuple is run
//! through one protocol attempt. Attempts are i.i.d., so the distribution of
//! the accepting attempt is the uniform oracle distribution conditioned on
//! acceptance: each accepted tuple gets weight `1 / #accepted`. No restart
//! sequence has to be unrolled.
//!
//! Reconstruct side: every `(L', R')` in the constraint set and every
//! `(V, V~)` in `((F \ {0})^n)^2`, each with equal weight.
//!
//! Probabilities are exact rationals.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_rational::Ratio;

use super::ExperimentOutcome;
use crate::channel::MemoryChannel;
use crate::encoding::{enumerate_constraint_set, Encoding};
use crate::error::{Error, Result};
use crate::field::{counter, FieldParams, FieldVector};
use crate::oracle::{self, raw_space_size};
use crate::reconstruct::{reconstruct, CommonRandomness};
use crate::refresh::{run_attempt, Attempt};

/// Largest number of tuples either side is allowed to enumerate.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

pub type Probability = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    probabilities: BTreeMap<ExperimentOutcome, Probability>,
}

impl ExactDistribution {
    fn from_uniform(outcomes: impl IntoIterator<Item = ExperimentOutcome>) -> Self {
        let mut counts: BTreeMap<ExperimentOutcome, u64> = BTreeMap::new();
        let mut total = 0u64;
        for o in outcomes {
            *counts.entry(o).or_default() += 1;
            total += 1;
        }
        let probabilities = counts
            .into_iter()
            .map(|(o, c)| (o, Ratio::new(c, total)))
            .collect();
        ExactDistribution { probabilities }
    }

    pub fn support(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probability(&self, outcome: &ExperimentOutcome) -> Probability {
        self.probabilities
            .get(outcome)
            .copied()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &ExperimentOutcome> {
        self.probabilities.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExperimentOutcome, &Probability)> {
        self.probabilities.iter()
    }

    pub fn total_probability(&self) -> Probability {
        self.probabilities
            .values()
            .fold(Ratio::from_integer(0), |acc, &p| acc + p)
    }
}

fn guard(size: u128) -> Result<()> {
    if size > ENUMERATION_LIMIT {
        return Err(Error::SpaceTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn nonzero_space(params: FieldParams) -> u128 {
    ((params.modulus() - 1) as u128)
        .checked_pow(params.dimension() as u32)
        .unwrap_or(u128::MAX)
}

/// Size of the reconstruct-side enumeration: pairs scanned for the
/// constraint set times the `(V, V~)` grid, both `((p-1)^n)^2`.
pub fn reconstruct_space_size(params: FieldParams) -> u128 {
    let pairs = nonzero_space(params).saturating_mul(nonzero_space(params));
    pairs.saturating_mul(pairs)
}

pub fn exact_distribution_refresh(enc: &Encoding) -> Result<ExactDistribution> {
    let params = enc.params();
    guard(raw_space_size(params))?;
    let mut accepted = Vec::new();
    counter::uncounted(|| -> Result<()> {
        for sample in oracle::enumerate_raw(params).filter(oracle::verify) {
            if let Attempt::Accepted {
                output,
                view_l,
                view_r,
            } = run_attempt(enc, sample, &mut MemoryChannel::new())?
            {
                let (l_prime, r_prime) = output.into_parts();
                accepted.push(ExperimentOutcome {
                    l_prime,
                    r_prime,
                    view_l,
                    view_r,
                });
            }
        }
        Ok(())
    })?;
    Ok(ExactDistribution::from_uniform(accepted))
}

pub fn exact_distribution_reconstruct(enc: &Encoding) -> Result<ExactDistribution> {
    let params = enc.params();
    guard(reconstruct_space_size(params))?;
    let secret = enc.decode();
    let pairs: Vec<Encoding> = enumerate_constraint_set(secret, params).collect();
    if pairs.is_empty() {
        return Err(Error::EmptyConstraintSet {
            secret: secret.value(),
            n: params.dimension(),
        });
    }
    let mut outcomes = Vec::new();
    counter::uncounted(|| -> Result<()> {
        for new in &pairs {
            for v in params.all_nonzero_vectors() {
                for v_tilde in params.all_nonzero_vectors() {
                    let cr = CommonRandomness {
                        v: v.clone(),
                        v_tilde,
                    };
                    let (view_l, view_r) = reconstruct(enc, new, &cr)?;
                    outcomes.push(ExperimentOutcome {
                        l_prime: new.left().clone(),
                        r_prime: new.right().clone(),
                        view_l,
                        view_r,
                    });
                }
            }
        }
        Ok(())
    })?;
    Ok(ExactDistribution::from_uniform(outcomes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub outcome: ExperimentOutcome,
    pub refresh: Probability,
    pub reconstruct: Probability,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma2Report {
    pub params: FieldParams,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    pub support_refresh: usize,
    pub support_reconstruct: usize,
    pub refresh_normalized: bool,
    pub reconstruct_normalized: bool,
    /// First outcome, in canonical order, where the two disagree.
    pub first_discrepancy: Option<Discrepancy>,
}

impl Lemma2Report {
    pub fn equal(&self) -> bool {
        self.first_discrepancy.is_none() && self.refresh_normalized && self.reconstruct_normalized
    }
}

/// Exact, outcome-by-outcome comparison of both experiments on `enc`.
pub fn verify_lemma2(enc: &Encoding) -> Result<Lemma2Report> {
    let refresh = exact_distribution_refresh(enc)?;
    let recon = exact_distribution_reconstruct(enc)?;
    let one = Ratio::from_integer(1);
    let keys: std::collections::BTreeSet<&ExperimentOutcome> =
        refresh.outcomes().chain(recon.outcomes()).collect();
    let first_discrepancy = keys.into_iter().find_map(|o| {
        let (a, b) = (refresh.probability(o), recon.probability(o));
        (a != b).then(|| Discrepancy {
            outcome: o.clone(),
            refresh: a,
            reconstruct: b,
        })
    });
    Ok(Lemma2Report {
        params: enc.params(),
        left: enc.left().values(),
        right: enc.right().values(),
        support_refresh: refresh.support(),
        support_reconstruct: recon.support(),
        refresh_normalized: refresh.total_probability() == one,
        reconstruct_normalized: recon.total_probability() == one,
        first_discrepancy,
    })
}

/// The per-variable facts used to argue equality, checked on the exact
/// refresh-side distribution (and, where noted, on the raw oracle
/// distribution before conditioning on acceptance).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalReport {
    /// `A` is uniform on `(F \ {0})^n`.
    pub a_uniform_nonzero: bool,
    /// Given `A`, `B` is uniform on all of `F^n`, in the accepted distribution.
    pub b_uniform_full_given_a: bool,
    /// Given `A`, `B` is uniform on its support, in the accepted distribution.
    pub b_uniform_on_support_given_a: bool,
    /// Size of the support of `B` given any `A` (the same for every `A`).
    pub b_support_given_a: Option<usize>,
    /// Given `A`, `B` is uniform on `F^n` under the raw oracle distribution.
    pub b_uniform_full_given_a_raw: bool,
    /// `V` is a function of `(L, R, A, B)`, namely `L^{-1} A`.
    pub v_determined: bool,
    /// `X = V B` is a function of `(L, R, A, B, V)`, and `R' = R + X`.
    pub x_determined: bool,
    /// `R'` is uniform on `(F \ {0})^n`.
    pub r_prime_uniform_nonzero: bool,
}

fn is_uniform<K: std::hash::Hash + Eq>(probs: &HashMap<K, Probability>, expected_support: u128) -> bool {
    probs.len() as u128 == expected_support && {
        let mut it = probs.values();
        let first = it.next();
        first.is_some_and(|f| it.all(|p| p == f))
    }
}

pub fn proof_marginals(enc: &Encoding) -> Result<MarginalReport> {
    let params = enc.params();
    let dist = exact_distribution_refresh(enc)?;
    let p = params.modulus() as u128;
    let n = params.dimension() as u32;
    let full = p.pow(n);
    let nonzero = (p - 1).pow(n);

    let zero = || Ratio::from_integer(0u64);
    let mut a_marg: HashMap<FieldVector, Probability> = HashMap::new();
    let mut r_marg: HashMap<FieldVector, Probability> = HashMap::new();
    let mut b_given_a: HashMap<FieldVector, HashMap<FieldVector, Probability>> = HashMap::new();
    let mut v_of: HashMap<(FieldVector, FieldVector), HashSet<FieldVector>> = HashMap::new();
    let mut v_formula = true;
    let mut x_formula = true;

    counter::uncounted(|| -> Result<()> {
        for (o, &pr) in dist.iter() {
            let a = o.view_l.a.as_vector().clone();
            let b = o.view_r.b.clone();
            *a_marg.entry(a.clone()).or_insert_with(zero) += pr;
            *r_marg.entry(o.r_prime.as_vector().clone()).or_insert_with(zero) += pr;
            *b_given_a
                .entry(a.clone())
                .or_default()
                .entry(b.clone())
                .or_insert_with(zero) += pr;
            v_of.entry((a.clone(), b.clone()))
                .or_default()
                .insert(o.view_l.v.clone());
            v_formula &= enc.left().inverses()?.hadamard(&a)? == o.view_l.v;
            let x = o.view_l.v.hadamard(&b)?;
            x_formula &= enc.right().add(&x)? == *o.r_prime.as_vector();
        }
        Ok(())
    })?;

    let b_supports: HashSet<usize> = b_given_a.values().map(HashMap::len).collect();
    let b_uniform_on_support_given_a = b_given_a.values().all(|m| is_uniform(m, m.len() as u128));
    let b_uniform_full_given_a = b_given_a.values().all(|m| is_uniform(m, full));

    // Before conditioning on acceptance.
    let mut raw: HashMap<FieldVector, HashMap<FieldVector, u64>> = HashMap::new();
    for s in oracle::enumerate_raw(params).filter(oracle::verify) {
        *raw.entry(s.a.into_vector())
            .or_default()
            .entry(s.b)
            .or_default() += 1;
    }
    let b_uniform_full_given_a_raw = raw.values().all(|m| {
        m.len() as u128 == full && {
            let first = m.values().next().copied();
            m.values().all(|&c| Some(c) == first)
        }
    });

    Ok(MarginalReport {
        a_uniform_nonzero: is_uniform(&a_marg, nonzero),
        b_uniform_full_given_a,
        b_uniform_on_support_given_a,
        b_support_given_a: (b_supports.len() == 1).then(|| *b_supports.iter().next().unwrap()),
        b_uniform_full_given_a_raw,
        v_determined: v_formula && v_of.values().all(|s| s.len() == 1),
        x_determined: x_formula,
        r_prime_uniform_nonzero: is_uniform(&r_marg, nonzero),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5(l: u64, r: u64) -> Encoding {
        Encoding::from_values(FieldParams::relaxed(5, 1).unwrap(), &[l], &[r]).unwrap()
    }

    #[test]
    fn p5_n1_distributions_are_normalized_and_preserve_the_secret() {
        let enc = p5(2, 4);
        let d = exact_distribution_refresh(&enc).unwrap();
        assert_eq!(d.total_probability(), Ratio::from_integer(1));
        for o in d.outcomes() {
            assert_eq!(o.l_prime.inner_product(&o.r_prime).unwrap(), enc.decode());
        }
        let r = exact_distribution_reconstruct(&enc).unwrap();
        assert_eq!(r.total_probability(), Ratio::from_integer(1));
        // 4 pairs (L', R') with L'R' = 3, times 4 * 4 choices of (V, V~).
        assert_eq!(r.support(), 64);
        assert_eq!(d.support(), 64);
    }

    #[test]
    fn refresh_side_accepted_count_matches_direct_count() {
        // 80 orthogonal raw tuples for p = 5, n = 1; the accepted ones are
        // those with R + (A/L)B != 0 and L + (B~/R')A~ != 0.
        let enc = p5(2, 4);
        let k = enc.params();
        let direct = oracle::enumerate_raw(k)
            .filter(oracle::verify)
            .filter(|s| {
                let (l, r) = (2u64, 4u64);
                let inv = |x: u64| (1..5).find(|y| x * y % 5 == 1).unwrap();
                let (a, at, b, bt) = (s.a.values()[0], s.a_tilde.values()[0], s.b.values()[0], s.b_tilde.values()[0]);
                let rp = (r + inv(l) * a % 5 * b) % 5;
                if rp == 0 {
                    return false;
                }
                let lp = (l + inv(rp) * bt % 5 * at) % 5;
                lp != 0
            })
            .count();
        assert_eq!(oracle::enumerate_raw(k).filter(oracle::verify).count(), 80);
        assert_eq!(direct, 64);
    }

    #[test]
    fn discrepancy_is_reported_for_different_inputs() {
        // Same secret, different input shares: the views contain L and R, so
        // the distributions have disjoint supports.
        let a = exact_distribution_refresh(&p5(1, 3)).unwrap();
        let b = exact_distribution_reconstruct(&p5(3, 1)).unwrap();
        assert!(a.outcomes().all(|o| b.probability(o) == Ratio::from_integer(0)));
    }

    #[test]
    fn real_and_reconstructed_agree_on_a_p5_instance() {
        let rep = verify_lemma2(&p5(2, 4)).unwrap();
        assert!(rep.equal(), "{rep:?}");
        assert_eq!(rep.support_refresh, rep.support_reconstruct);
    }

    #[test]
    fn a_perturbed_reconstructor_is_caught() {
        // Shifting one probability mass breaks equality.
        let enc = p5(2, 4);
        let a = exact_distribution_refresh(&enc).unwrap();
        let mut b = exact_distribution_reconstruct(&enc).unwrap();
        let first = b.outcomes().next().unwrap().clone();
        let second = b.outcomes().nth(1).unwrap().clone();
        let q = b.probabilities[&first] / 2;
        *b.probabilities.get_mut(&first).unwrap() -= q;
        *b.probabilities.get_mut(&second).unwrap() += q;
        assert_eq!(b.total_probability(), Ratio::from_integer(1));
        assert!(a.iter().any(|(o, p)| b.probability(o) != *p));
    }

    #[test]
    fn oversized_spaces_are_refused() {
        let k = FieldParams::new(11, 2).unwrap();
        let enc = Encoding::from_values(k, &[2, 3], &[1, 4]).unwrap();
        assert!(matches!(
            exact_distribution_refresh(&enc),
            Err(Error::SpaceTooLarge { size: 146_410_000, .. })
        ));
        assert!(matches!(verify_lemma2(&enc), Err(Error::SpaceTooLarge { .. })));
    }

    #[test]
    fn marginals_p5_n1() {
        let m = proof_marginals(&p5(2, 4)).unwrap();
        assert!(m.a_uniform_nonzero);
        assert!(m.v_determined);
        assert!(m.x_determined);
        assert!(m.r_prime_uniform_nonzero);
        assert!(m.b_uniform_full_given_a_raw);
        // Conditioning on R' != 0 removes one value of B for each A.
        assert!(!m.b_uniform_full_given_a);
        assert!(m.b_uniform_on_support_given_a);
        assert_eq!(m.b_support_given_a, Some(4));
    }
}
