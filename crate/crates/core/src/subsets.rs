//! Subset families `S(k)`, the counting lemma, and the weighted marginal
//! sums (the A and B operators) that every identity in the verification
//! layer is phrased in.

use std::collections::HashMap;

use itertools::Itertools;
use num::{One, Zero};

use crate::concordance::Measure;
use crate::copula::Copula;
use crate::index_set::IndexSet;
use crate::rational::{binomial_rat, Rational};
use crate::{Error, Result};

/// The family `S(k)` of all size-`k` subsets of `S`, in lexicographic order
/// of the sorted member lists. `S(0) = {{}}`; empty when `k > card(S)`.
pub fn enumerate(ground: &IndexSet, k: usize) -> Vec<IndexSet> {
    ground
        .members()
        .iter()
        .copied()
        .combinations(k)
        .map(|members| IndexSet::new(ground.n(), members).expect("members in range"))
        .collect()
}

/// `S(k)` as a value, when the family itself is the object of interest.
#[derive(Clone, Debug)]
pub struct SubsetFamily {
    ground: IndexSet,
    k: usize,
}

impl SubsetFamily {
    pub fn new(ground: IndexSet, k: usize) -> Self {
        Self { ground, k }
    }

    pub fn ground(&self) -> &IndexSet {
        &self.ground
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> num::BigInt {
        crate::rational::binomial(self.ground.card(), self.k)
    }

    pub fn members(&self) -> Vec<IndexSet> {
        enumerate(&self.ground, self.k)
    }
}

/// Which weighting of the marginal sum is being evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrakForm {
    /// `A`: the full prefix `r_{n-t} ... r_j`.
    Weighted,
    /// `A` with the leading `r_{n-t}` dropped, as in the divided-out forms.
    Reduced,
    /// `B`: no `r` factors at all.
    Plain,
}

/// One evaluated operator value with its index metadata.
#[derive(Clone, Debug)]
pub struct FrakTerm {
    pub form: FrakForm,
    pub j: usize,
    pub s: IndexSet,
    pub t: IndexSet,
    pub value: Rational,
}

/// Evaluation context for the marginal sums of one copula under one measure.
///
/// A single identity sweep revisits the same pinned marginal many times, so
/// kappa values are memoized by pinned set. The cache is content-addressed
/// to this copula: build a fresh context per copula instance.
pub struct FrakContext<'a> {
    measure: Measure,
    copula: &'a Copula,
    cache: HashMap<Vec<usize>, Rational>,
}

impl<'a> FrakContext<'a> {
    pub fn new(measure: Measure, copula: &'a Copula) -> Self {
        Self {
            measure,
            copula,
            cache: HashMap::new(),
        }
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    /// Memoized `kappa_{n-t}(C_T)`.
    pub fn kappa_pinned(&mut self, pinned: &IndexSet) -> Result<Rational> {
        let key = pinned.members().to_vec();
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let value = self.measure.kappa_of_marginal(self.copula, pinned)?;
        self.cache.insert(key, value.clone());
        Ok(value)
    }

    /// The operator value
    /// `weight(form) * sum over R in (S-T)(n-j-t) of kappa_j(C_{R+T})`,
    /// which is 0 whenever the family is empty.
    pub fn frak(
        &mut self,
        form: FrakForm,
        s: &IndexSet,
        t: &IndexSet,
        j: usize,
    ) -> Result<Rational> {
        let n = self.copula.dim();
        if j > n || t.card() > n {
            return Err(Error::OutOfRange(format!("j={j} out of range for n={n}")));
        }
        let t_card = t.card();
        let Some(family_size) = (n - j).checked_sub(t_card) else {
            return Ok(Rational::zero());
        };
        let ground = s.difference(t);
        if family_size > ground.card() {
            return Ok(Rational::zero());
        }
        let mut sum = Rational::zero();
        for r in enumerate(&ground, family_size) {
            sum += self.kappa_pinned(&r.union(t))?;
        }
        if sum.is_zero() {
            return Ok(sum);
        }
        let weight = match form {
            FrakForm::Weighted => self.measure.r_product(j, n - t_card),
            FrakForm::Reduced => {
                if j == n - t_card {
                    Rational::one()
                } else {
                    self.measure.r_product(j, n - t_card - 1)
                }
            }
            FrakForm::Plain => Rational::one(),
        };
        Ok(weight * sum)
    }

    pub fn frak_term(
        &mut self,
        form: FrakForm,
        s: &IndexSet,
        t: &IndexSet,
        j: usize,
    ) -> Result<FrakTerm> {
        Ok(FrakTerm {
            form,
            j,
            s: s.clone(),
            t: t.clone(),
            value: self.frak(form, s, t, j)?,
        })
    }
}

/// One-shot `A_j^S(C_T)`.
pub fn frak_a(
    measure: Measure,
    c: &Copula,
    s: &IndexSet,
    t: &IndexSet,
    j: usize,
) -> Result<Rational> {
    FrakContext::new(measure, c).frak(FrakForm::Weighted, s, t, j)
}

/// One-shot `A_j^S(C_T)` without the leading `r_{n-t}`.
pub fn frak_a_reduced(
    measure: Measure,
    c: &Copula,
    s: &IndexSet,
    t: &IndexSet,
    j: usize,
) -> Result<Rational> {
    FrakContext::new(measure, c).frak(FrakForm::Reduced, s, t, j)
}

/// One-shot `B_j^S(C_T)`: the bare kappa sum.
pub fn frak_b(
    measure: Measure,
    c: &Copula,
    s: &IndexSet,
    t: &IndexSet,
    j: usize,
) -> Result<Rational> {
    FrakContext::new(measure, c).frak(FrakForm::Plain, s, t, j)
}

/// Counting lemma, part 1: for `p <= r <= s = card(S)`,
/// `sum over R in S(r), P in R(p) of x_P = binom(s-p, r-p) * sum over P in S(p) of x_P`.
/// Both sides are computed independently; equality is the caller's check.
pub fn counting_check_1(
    s: &IndexSet,
    p: usize,
    r: usize,
    x: &dyn Fn(&IndexSet) -> Rational,
) -> Result<(Rational, Rational)> {
    if !(p <= r && r <= s.card()) {
        return Err(Error::OutOfRange(format!(
            "need p <= r <= card(S), got p={p}, r={r}"
        )));
    }
    let mut lhs = Rational::zero();
    for big in enumerate(s, r) {
        for small in enumerate(&big, p) {
            lhs += x(&small);
        }
    }
    let mut base = Rational::zero();
    for small in enumerate(s, p) {
        base += x(&small);
    }
    let rhs = binomial_rat(s.card() - p, r - p) * base;
    Ok((lhs, rhs))
}

/// Counting lemma, part 2: for `q + r <= s = card(S)`,
/// `sum over R in S(r), T in (S-R)(q) of x_{R+T} = binom(q+r, r) * sum over P in S(q+r) of x_P`.
pub fn counting_check_2(
    s: &IndexSet,
    q: usize,
    r: usize,
    x: &dyn Fn(&IndexSet) -> Rational,
) -> Result<(Rational, Rational)> {
    if q + r > s.card() {
        return Err(Error::OutOfRange(format!(
            "need q + r <= card(S), got q={q}, r={r}"
        )));
    }
    let mut lhs = Rational::zero();
    for big in enumerate(s, r) {
        for rest in enumerate(&s.difference(&big), q) {
            lhs += x(&big.union(&rest));
        }
    }
    let mut base = Rational::zero();
    for p in enumerate(s, q + r) {
        base += x(&p);
    }
    let rhs = binomial_rat(q + r, r) * base;
    Ok((lhs, rhs))
}
