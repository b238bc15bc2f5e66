//! Executable checks of the theorem layer: reflection reduction,
//! complementarity, the odd-to-even marginal identities with their gamma
//! sequence, the closed formula for reflected comonotone copulas, and the
//! asymptotic scan. Every check computes both sides independently and
//! reports exact rational equality.

use num::{One, Signed, Zero};

use crate::concordance::Measure;
use crate::copula::{Copula, ReflectedM};
use crate::index_set::IndexSet;
use crate::rational::{binomial_rat, int, rat, sign, Rational};
use crate::subsets::{FrakContext, FrakForm};
use crate::symmetry::{apply, Symmetry};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    ExactEqual,
    TolerancePass(Rational),
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ExactEqual => "exact-equal",
            Verdict::TolerancePass(_) => "tolerance-pass",
            Verdict::Fail => "fail",
        }
    }
}

/// One verified identity instance. `lhs` and `rhs` are the two
/// independently computed sides; `exact-equal` requires them to coincide as
/// rationals.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub identity: String,
    pub measure: String,
    pub copula: String,
    pub n: usize,
    pub m: Option<usize>,
    pub s_set: Option<IndexSet>,
    pub t_set: Option<IndexSet>,
    pub j: Option<usize>,
    pub seed: Option<u64>,
    pub lhs: Rational,
    pub rhs: Rational,
    pub verdict: Verdict,
    pub note: Option<String>,
}

impl IdentityReport {
    pub fn exact(
        identity: impl Into<String>,
        measure: Measure,
        copula: &Copula,
        lhs: Rational,
        rhs: Rational,
    ) -> Self {
        let verdict = if lhs == rhs {
            Verdict::ExactEqual
        } else {
            Verdict::Fail
        };
        Self {
            identity: identity.into(),
            measure: measure.name().to_string(),
            copula: copula.describe(),
            n: copula.dim(),
            m: None,
            s_set: None,
            t_set: None,
            j: None,
            seed: None,
            lhs,
            rhs,
            verdict,
            note: None,
        }
    }

    pub fn tolerance(
        identity: impl Into<String>,
        measure: Measure,
        copula: &Copula,
        lhs: Rational,
        rhs: Rational,
        eps: Rational,
    ) -> Self {
        let verdict = if (&lhs - &rhs).abs() <= eps.clone() {
            Verdict::TolerancePass(eps)
        } else {
            Verdict::Fail
        };
        Self {
            identity: identity.into(),
            measure: measure.name().to_string(),
            copula: copula.describe(),
            n: copula.dim(),
            m: None,
            s_set: None,
            t_set: None,
            j: None,
            seed: None,
            lhs,
            rhs,
            verdict,
            note: None,
        }
    }

    pub fn with_sets(mut self, s: Option<IndexSet>, t: Option<IndexSet>) -> Self {
        self.s_set = s;
        self.t_set = t;
        self
    }

    pub fn with_j(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        !matches!(self.verdict, Verdict::Fail)
    }

    /// Exact-mode failure: what the verify exit code keys on.
    pub fn failed(&self) -> bool {
        matches!(self.verdict, Verdict::Fail)
    }

    /// Canonical JSON (sorted keys, lowest-terms rationals as strings).
    pub fn json_line(&self) -> String {
        let mut doc = serde_json::json!({
            "identity": self.identity,
            "measure": self.measure,
            "copula": self.copula,
            "n": self.n,
            "m": self.m,
            "S": self.s_set.as_ref().map(|s| s.one_based()),
            "T": self.t_set.as_ref().map(|t| t.one_based()),
            "j": self.j,
            "seed": self.seed,
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
            "verdict": self.verdict.as_str(),
            "note": self.note,
        });
        if let Verdict::TolerancePass(eps) = &self.verdict {
            doc["tolerance"] = serde_json::Value::String(eps.to_string());
        }
        doc.to_string()
    }

    pub fn csv_header() -> &'static str {
        "identity,n,m,S,T,j,lhs,rhs,equal?,measure,copula,seed,note"
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: &Option<usize>| v.map_or(String::from("-"), |x| x.to_string());
        let set =
            |v: &Option<IndexSet>| v.as_ref().map_or(String::from("-"), |s| format!("\"{s}\""));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.identity,
            self.n,
            opt(&self.m),
            set(&self.s_set),
            set(&self.t_set),
            opt(&self.j),
            self.lhs,
            self.rhs,
            self.passed(),
            self.measure,
            self.copula,
            self.seed.map_or(String::from("-"), |s| s.to_string()),
            self.note.as_deref().unwrap_or("-"),
        )
    }
}

/// The constants of the odd-dimension identities:
/// `gamma_1 = 1/2`, `gamma_{p+1} = (1 - sum_{k=1}^p gamma_k binom(2p+1, 2k-1)) / 2`.
#[derive(Clone, Debug, Default)]
pub struct GammaSequence {
    values: Vec<Rational>,
}

impl GammaSequence {
    pub fn new() -> Self {
        Self { values: Vec::new() }
    }

    /// `gamma_k`, `k >= 1`; computed on demand and cached.
    pub fn value(&mut self, k: usize) -> Rational {
        assert!(k >= 1, "gamma is indexed from 1");
        while self.values.len() < k {
            let next = if self.values.is_empty() {
                rat(1, 2)
            } else {
                let p = self.values.len();
                let mut acc = Rational::one();
                for (i, g) in self.values.iter().enumerate() {
                    acc -= g * binomial_rat(2 * p + 1, 2 * (i + 1) - 1);
                }
                acc / int(2)
            };
            self.values.push(next);
        }
        self.values[k - 1].clone()
    }
}

pub fn gamma(k: usize) -> Rational {
    GammaSequence::new().value(k)
}

pub fn gamma_sequence(count: usize) -> Vec<Rational> {
    let mut seq = GammaSequence::new();
    (1..=count).map(|k| seq.value(k)).collect()
}

/// Reflection reduction: with `S`, `T` disjoint,
/// `A_{n-t}(sigma_S^*(C_T)) = sum_{j=n-t-s}^{n-t} (-1)^{n-t-s+j} A_j^S(C_T)`.
///
/// The left side really applies the reflection to the proper copula of
/// `C_T` and evaluates `r_{n-t} kappa_{n-t}` of the image; the right side is
/// the alternating operator sum. `reduced` checks the same identity with the
/// leading `r_{n-t}` dropped from both sides.
pub fn check_reflection_reduction(
    measure: Measure,
    c: &Copula,
    s_set: &IndexSet,
    t_set: &IndexSet,
    reduced: bool,
) -> Result<IdentityReport> {
    if !s_set.is_disjoint(t_set) {
        return Err(Error::NotDisjoint);
    }
    let n = c.dim();
    let t = t_set.card();
    let s = s_set.card();
    let d = n - t;

    let proper = crate::marginals::proper_of(c, t_set)?;
    let active = t_set.complement();
    let s_rel = IndexSet::new(
        d,
        s_set
            .iter()
            .map(|i| active.position_of(i).expect("S is disjoint from T")),
    )?;
    let reflected = apply(&Symmetry::reflection(s_rel), &proper)?;
    let kappa = measure.kappa(&reflected)?;
    let lhs = if reduced { kappa } else { measure.r(d) * kappa };

    let form = if reduced {
        FrakForm::Reduced
    } else {
        FrakForm::Weighted
    };
    let mut ctx = FrakContext::new(measure, c);
    let mut rhs = Rational::zero();
    for j in (d - s)..=d {
        rhs += sign(d - s + j) * ctx.frak(form, s_set, t_set, j)?;
    }

    let name = if reduced {
        "refreduce-reduced"
    } else {
        "refreduce"
    };
    Ok(IdentityReport::exact(name, measure, c, lhs, rhs)
        .with_sets(Some(s_set.clone()), Some(t_set.clone())))
}

/// Complementarity: for a partition `R + S + T` of the axes,
/// `sum_{j=s}^{n-t} (-1)^{r+j} A_j^R(C_T) = sum_{j=r}^{n-t} (-1)^{s+j} A_j^S(C_T)`.
pub fn check_complementarity(
    measure: Measure,
    c: &Copula,
    r_set: &IndexSet,
    s_set: &IndexSet,
    t_set: &IndexSet,
) -> Result<IdentityReport> {
    let n = c.dim();
    let disjoint = r_set.is_disjoint(s_set) && r_set.is_disjoint(t_set) && s_set.is_disjoint(t_set);
    if !disjoint || r_set.card() + s_set.card() + t_set.card() != n {
        return Err(Error::NotAPartition);
    }
    let r = r_set.card();
    let s = s_set.card();
    let d = n - t_set.card();
    let mut ctx = FrakContext::new(measure, c);
    let mut lhs = Rational::zero();
    for j in s..=d {
        lhs += sign(r + j) * ctx.frak(FrakForm::Weighted, r_set, t_set, j)?;
    }
    let mut rhs = Rational::zero();
    for j in r..=d {
        rhs += sign(s + j) * ctx.frak(FrakForm::Weighted, s_set, t_set, j)?;
    }
    Ok(IdentityReport::exact("complement", measure, c, lhs, rhs)
        .with_sets(Some(s_set.clone()), Some(t_set.clone()))
        .with_note(format!("R={r_set}")))
}

/// The divided-out 4-dimensional instance with `R = {1,2}`, `S = {3,4}`:
/// `kappa_3(C_1) + kappa_3(C_2) - (2/3) kappa_2(C_12)` equals the same
/// expression in the complementary axes.
pub fn check_complement_reduced4(measure: Measure, c: &Copula) -> Result<IdentityReport> {
    let n = c.dim();
    if n != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: n,
        });
    }
    let two_thirds = rat(2, 3);
    let pinned = |axes: &[usize]| IndexSet::new(4, axes.iter().copied()).expect("in range");
    let side = |lo: usize, hi: usize| -> Result<Rational> {
        let k3_lo = measure.kappa_of_marginal(c, &pinned(&[lo]))?;
        let k3_hi = measure.kappa_of_marginal(c, &pinned(&[hi]))?;
        let k2 = measure.kappa_of_marginal(c, &pinned(&[lo, hi]))?;
        Ok(k3_lo + k3_hi - &two_thirds * k2)
    };
    let lhs = side(0, 1)?;
    let rhs = side(2, 3)?;
    Ok(
        IdentityReport::exact("complement-reduced", measure, c, lhs, rhs)
            .with_sets(Some(pinned(&[2, 3])), Some(IndexSet::empty(4))),
    )
}

/// The odd-dimension identity: for `n - r >= 2p + 1`,
/// `A_{2p+1}(C_R) = sum_{j=1}^p gamma_{p-j+1} binom(n-r-2j, 2p-2j+1) A_{2j}(C_R)`.
pub fn check_ubeda(
    measure: Measure,
    c: &Copula,
    r_set: &IndexSet,
    p: usize,
) -> Result<IdentityReport> {
    let n = c.dim();
    let r = r_set.card();
    if p < 1 || n < r || n - r < 2 * p + 1 {
        return Err(Error::OutOfRange(format!(
            "need n - card(R) >= 2p+1, got n={n}, r={r}, p={p}"
        )));
    }
    let full = IndexSet::full(n);
    let mut ctx = FrakContext::new(measure, c);
    let lhs = ctx.frak(FrakForm::Weighted, &full, r_set, 2 * p + 1)?;
    let mut gammas = GammaSequence::new();
    let mut rhs = Rational::zero();
    for j in 1..=p {
        let coeff = gammas.value(p - j + 1) * binomial_rat(n - r - 2 * j, 2 * p - 2 * j + 1);
        rhs += coeff * ctx.frak(FrakForm::Weighted, &full, r_set, 2 * j)?;
    }
    Ok(IdentityReport::exact("ubeda", measure, c, lhs, rhs)
        .with_sets(None, Some(r_set.clone()))
        .with_j(2 * p + 1))
}

/// The divided-out 3-copula instance:
/// `kappa_3(C) = (kappa_2(C_1) + kappa_2(C_2) + kappa_2(C_3)) / 3`.
pub fn check_ubeda_reduced3(measure: Measure, c: &Copula) -> Result<IdentityReport> {
    let n = c.dim();
    if n != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: n,
        });
    }
    let lhs = measure.kappa(c)?;
    let mut sum = Rational::zero();
    for i in 0..3 {
        sum += measure.kappa_of_marginal(c, &IndexSet::singleton(3, i)?)?;
    }
    Ok(IdentityReport::exact(
        "ubeda-reduced-3",
        measure,
        c,
        lhs,
        sum / int(3),
    ))
}

/// The telescoping form behind the odd-dimension identities: on an extended
/// `(2p+1)`-copula, `2 A_{2p+1}(C_R) = sum_j A_{2j}(C_R) - sum_{j>=2} A_{2j-1}(C_R)`.
pub fn check_weak_ubeda(measure: Measure, c: &Copula, r_set: &IndexSet) -> Result<IdentityReport> {
    let n = c.dim();
    let d = n - r_set.card();
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!(
            "need an odd extended dimension >= 3, got {d}"
        )));
    }
    let p = (d - 1) / 2;
    let full = IndexSet::full(n);
    let mut ctx = FrakContext::new(measure, c);
    let lhs = int(2) * ctx.frak(FrakForm::Weighted, &full, r_set, 2 * p + 1)?;
    let mut rhs = Rational::zero();
    for j in 1..=p {
        rhs += ctx.frak(FrakForm::Weighted, &full, r_set, 2 * j)?;
    }
    for j in 2..=p {
        rhs -= ctx.frak(FrakForm::Weighted, &full, r_set, 2 * j - 1)?;
    }
    Ok(IdentityReport::exact("weak-ubeda", measure, c, lhs, rhs)
        .with_sets(None, Some(r_set.clone())))
}

/// Closed formula for `kappa_n(sigma_S^*(M))`:
/// `(-1)^s + sum_{k=1}^s (-1)^{k+s} binom(s,k) r_{n-1} .. r_{n-k}`,
/// with terms reaching below dimension 2 omitted (they correspond to
/// `kappa_0 = kappa_1 = 0` in the derivation). Returns the value and whether
/// any term was dropped.
pub fn m_formula(measure: Measure, n: usize, s: usize) -> (Rational, bool) {
    let mut value = sign(s);
    let mut dropped = false;
    for k in 1..=s {
        if n < k + 2 {
            dropped = true;
            continue;
        }
        value += sign(k + s) * binomial_rat(s, k) * measure.r_product(n - k, n - 1);
    }
    (value, dropped)
}

/// Compares the closed formula against the direct integral route, and both
/// against the reflection-reduction sum applied to the comonotone copula.
pub fn check_m_formula(
    measure: Measure,
    n: usize,
    s_set: &IndexSet,
) -> Result<Vec<IdentityReport>> {
    let s = s_set.card();
    if s == 0 || n < 2 {
        return Err(Error::OutOfRange(format!(
            "need 1 <= s and n >= 2, got n={n}, s={s}"
        )));
    }
    let c = Copula::ReflectedM(ReflectedM::new(n, s_set.clone())?);
    let direct = measure.kappa(&c)?;
    let (formula, dropped) = m_formula(measure, n, s);
    let mut report = IdentityReport::exact("mformula", measure, &c, direct.clone(), formula)
        .with_sets(Some(s_set.clone()), None);
    if dropped {
        report = report.with_note(format!(
            "terms with n-k < 2 omitted (s = {s} >= n-1); vanishing low-dimension kappa is authoritative"
        ));
    }

    let m = Copula::ReflectedM(ReflectedM::comonotone(n)?);
    let via_refreduce = check_reflection_reduction(measure, &m, s_set, &IndexSet::empty(n), false)?;
    let consistency = IdentityReport::exact(
        "mformula-refreduce",
        measure,
        &c,
        measure.r(n) * direct,
        via_refreduce.rhs.clone(),
    )
    .with_sets(Some(s_set.clone()), None);
    Ok(vec![report, consistency])
}

/// Groups `kappa_n(sigma_S^*(M))` over all `2^n` flip sets: the value must
/// depend only on `min(card(S), n - card(S))`.
pub fn check_mmoc(measure: Measure, n: usize) -> Result<Vec<IdentityReport>> {
    if n < 2 {
        return Err(Error::DimensionTooSmall {
            op: "mmoc",
            min: 2,
            got: n,
        });
    }
    let mut representatives: Vec<Option<Rational>> = vec![None; n / 2 + 1];
    let mut reports = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let s_set = IndexSet::new(n, (0..n).filter(|i| mask >> i & 1 == 1))?;
        let group = s_set.card().min(n - s_set.card());
        let c = Copula::ReflectedM(ReflectedM::new(n, s_set.clone())?);
        let value = measure.kappa(&c)?;
        let rep = representatives[group]
            .get_or_insert_with(|| value.clone())
            .clone();
        reports.push(
            IdentityReport::exact("mmoc", measure, &c, value, rep)
                .with_sets(Some(s_set), None)
                .with_note(format!("group min(s,n-s)={group}")),
        );
    }
    Ok(reports)
}

/// One row of the asymptotic scan of `kappa_n(sigma_S^*(M))` at fixed flip
/// count.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n: usize,
    pub kappa: Rational,
    pub r_n: Rational,
    pub r_kappa: Rational,
    /// `(-1)^s (1 - r_n)^s`: the finite-n proxy for the limit.
    pub proxy: Rational,
    /// `(-1)^s (1 - r)^s` at `r = lim r_n` (1 for rho and tau, 2 for the
    /// bivariate extensions).
    pub limit: Rational,
}

pub fn asymptotic_scan(measure: Measure, s: usize, n_max: usize) -> Result<Vec<ScanRow>> {
    let r_limit = match measure {
        Measure::NelsenRho | Measure::NelsenTau => int(1),
        Measure::ExtSpearman | Measure::ExtKendall => int(2),
    };
    let limit = sign(s) * (Rational::one() - r_limit).pow(s as i32);
    let start = (s + 1).max(2);
    let mut rows = Vec::new();
    for n in start..=n_max {
        let s_set = IndexSet::new(n, 0..s)?;
        let c = Copula::ReflectedM(ReflectedM::new(n, s_set)?);
        let kappa = measure.kappa(&c)?;
        let r_n = measure.r(n);
        let proxy = sign(s) * (Rational::one() - &r_n).pow(s as i32);
        rows.push(ScanRow {
            n,
            kappa: kappa.clone(),
            r_kappa: &r_n * kappa,
            r_n,
            proxy,
            limit: limit.clone(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::MassGrid;

    #[test]
    fn gamma_values() {
        assert_eq!(
            gamma_sequence(4),
            vec![rat(1, 2), rat(-1, 4), rat(1, 2), rat(-17, 8)]
        );
    }

    #[test]
    fn refreduce_s1_is_rearranged_transition_property() {
        // r_n kappa_n(sigma_i^*(C)) = r_n r_{n-1} kappa_{n-1}(C_i) - r_n kappa_n(C).
        let c = Copula::Grid(MassGrid::diagonal(3, 2).unwrap());
        let s = IndexSet::singleton(3, 1).unwrap();
        for measure in Measure::ALL {
            let report =
                check_reflection_reduction(measure, &c, &s, &IndexSet::empty(3), false).unwrap();
            assert!(report.passed(), "{}: {report:?}", measure.name());
            let by_hand = measure.r(3) * measure.r(2) * measure.kappa_of_marginal(&c, &s).unwrap()
                - measure.r(3) * measure.kappa(&c).unwrap();
            assert_eq!(report.rhs, by_hand);
        }
    }

    #[test]
    fn refreduce_on_independence_is_zero() {
        let c = Copula::Grid(MassGrid::independence(&[2, 2, 2]).unwrap());
        let s = IndexSet::new(3, [0, 2]).unwrap();
        let t = IndexSet::empty(3);
        let report = check_reflection_reduction(Measure::NelsenRho, &c, &s, &t, false).unwrap();
        assert!(report.passed());
        assert_eq!(report.lhs, int(0));
    }

    #[test]
    fn complement_symmetric_partition_trivially_equal() {
        let c = Copula::Grid(MassGrid::independence(&[2, 2, 2, 2]).unwrap());
        let r = IndexSet::new(4, [0, 1]).unwrap();
        let s = IndexSet::new(4, [2, 3]).unwrap();
        let t = IndexSet::empty(4);
        let report = check_complementarity(Measure::NelsenTau, &c, &r, &s, &t).unwrap();
        assert!(report.passed());

        assert!(check_complementarity(Measure::NelsenTau, &c, &r, &r, &t).is_err());

        // The only literal R = S partition is empty-empty with T everything;
        // both sides collapse to the single vanishing term.
        let empty = IndexSet::empty(4);
        let report =
            check_complementarity(Measure::NelsenTau, &c, &empty, &empty, &IndexSet::full(4))
                .unwrap();
        assert!(report.passed());
        assert_eq!(report.lhs, int(0));
    }

    #[test]
    fn mformula_previous_results() {
        // kappa_3 of a single flip is -1/3 for every measure; at s = 1 the
        // closed formula reads -1 + r_2 = -1/3.
        for measure in Measure::ALL {
            let s = IndexSet::singleton(3, 0).unwrap();
            let reports = check_m_formula(measure, 3, &s).unwrap();
            assert!(reports.iter().all(|r| r.passed()), "{}", measure.name());
            assert_eq!(reports[0].lhs, rat(-1, 3));
        }
        // n = 4 under tau: -1 + r_3 = -1/7.
        let s = IndexSet::singleton(4, 2).unwrap();
        let reports = check_m_formula(Measure::NelsenTau, 4, &s).unwrap();
        assert_eq!(reports[0].lhs, rat(-1, 7));
        assert!(reports.iter().all(|r| r.passed()));
        // r_{n-1} = 1 + kappa_n(flip one axis of M), n = 3, 4, 5.
        for measure in Measure::ALL {
            for n in 3..=5 {
                let c = Copula::ReflectedM(
                    ReflectedM::new(n, IndexSet::singleton(n, 0).unwrap()).unwrap(),
                );
                let kappa = measure.kappa(&c).unwrap();
                assert_eq!(
                    measure.r(n - 1),
                    Rational::one() + kappa,
                    "{} n={n}",
                    measure.name()
                );
            }
        }
    }

    #[test]
    fn mformula_flags_dropped_terms() {
        // s = n - 1 or s = n forces the below-dimension-2 terms out.
        let s = IndexSet::new(3, [0, 1]).unwrap();
        let reports = check_m_formula(Measure::NelsenRho, 3, &s).unwrap();
        assert!(reports[0].note.is_some());
        assert!(reports.iter().all(|r| r.passed()));
        assert_eq!(reports[0].lhs, rat(-1, 3));
    }

    #[test]
    fn mmoc_small_dimensions() {
        for measure in Measure::ALL {
            for n in 2..=4 {
                let reports = check_mmoc(measure, n).unwrap();
                assert_eq!(reports.len(), 1 << n);
                assert!(
                    reports.iter().all(|r| r.passed()),
                    "{} n={n}",
                    measure.name()
                );
            }
        }
        // n = 2: both single flips give -1.
        let reports = check_mmoc(Measure::NelsenRho, 2).unwrap();
        let singles: Vec<&IdentityReport> = reports
            .iter()
            .filter(|r| r.s_set.as_ref().unwrap().card() == 1)
            .collect();
        assert_eq!(singles.len(), 2);
        assert!(singles.iter().all(|r| r.lhs == int(-1)));
    }

    #[test]
    fn scan_rows_match_closed_forms() {
        // tau at one flip: kappa_n = -1 / (2^{n-1} - 1).
        let rows = asymptotic_scan(Measure::NelsenTau, 1, 6).unwrap();
        for row in &rows {
            let expect = -Rational::one() / (int(2).pow(row.n as i32 - 1) - int(1));
            assert_eq!(row.kappa, expect);
            assert_eq!(row.limit, int(0));
        }
        // Extension at one flip approaches 1 from below in r_n kappa_n.
        let rows = asymptotic_scan(Measure::ExtSpearman, 1, 12).unwrap();
        assert_eq!(rows.last().unwrap().limit, int(1));
        for pair in rows.windows(2) {
            assert!(pair[0].r_kappa < pair[1].r_kappa);
        }
        // s = 0 is the comonotone copula everywhere.
        let rows = asymptotic_scan(Measure::NelsenRho, 0, 5).unwrap();
        assert!(rows.iter().all(|r| r.kappa == int(1)));
    }

    #[test]
    fn report_serialization() {
        let c = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        let report = IdentityReport::exact("demo", Measure::NelsenRho, &c, rat(1, 3), rat(1, 3))
            .with_sets(Some(IndexSet::new(2, [0]).unwrap()), None)
            .with_seed(7);
        assert!(report.passed());
        let line = report.json_line();
        assert!(line.contains("\"verdict\":\"exact-equal\""));
        assert!(line.contains("\"lhs\":\"1/3\""));
        // Keys arrive sorted: canonical serialization.
        let a = line.find("\"S\"").unwrap();
        let b = line.find("\"identity\"").unwrap();
        let c2 = line.find("\"verdict\"").unwrap();
        assert!(a < b && b < c2);
        let row = report.csv_row();
        assert!(row.starts_with("demo,2,-,\"{1}\",-,-,1/3,1/3,true"));
    }
}
