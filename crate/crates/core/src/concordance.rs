//! Concordance measures: Nelsen's multivariate rho and tau, and the
//! extension of a bivariate Spearman or Kendall base to all dimensions by
//! averaging over two-dimensional marginals.
//!
//! On checkerboards the three integrals reduce to finite rational sums over
//! cells: the distribution function is multilinear inside each cell and the
//! cell measure is uniform, so the mean of any multilinear integrand over a
//! cell is its value at the cell center. On reflected-M copulas everything
//! is closed form via exact polynomial integration.

use num::{One, Zero};

use crate::copula::{Copula, ReflectedM};
use crate::grid::{flat_index, for_each_index, strides, MassGrid};
use crate::index_set::IndexSet;
use crate::marginals::proper_of;
use crate::rational::{binomial_rat, int, inv_pow2, rat, Rational};
use crate::subsets::enumerate;
use crate::{Error, Result};

/// A measure-of-concordance family, carrying its `kappa_n` maps and the
/// transition sequence `r_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    NelsenRho,
    NelsenTau,
    ExtSpearman,
    ExtKendall,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::NelsenRho,
        Measure::NelsenTau,
        Measure::ExtSpearman,
        Measure::ExtKendall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::NelsenRho => "rho",
            Measure::NelsenTau => "tau",
            Measure::ExtSpearman => "ext-spearman",
            Measure::ExtKendall => "ext-kendall",
        }
    }

    pub fn parse(s: &str) -> Result<Measure> {
        match s {
            "rho" => Ok(Measure::NelsenRho),
            "tau" => Ok(Measure::NelsenTau),
            "ext-spearman" => Ok(Measure::ExtSpearman),
            "ext-kendall" => Ok(Measure::ExtKendall),
            other => Err(Error::Parse(format!(
                "unknown measure `{other}` (expected rho|tau|ext-spearman|ext-kendall)"
            ))),
        }
    }

    /// `kappa_n(C)`. Dimensions 0 and 1 return 0 by the usual convention for
    /// degenerate marginals.
    pub fn kappa(self, c: &Copula) -> Result<Rational> {
        if c.dim() < 2 {
            return Ok(Rational::zero());
        }
        match self {
            Measure::NelsenRho => nelsen_rho(c),
            Measure::NelsenTau => nelsen_tau(c),
            Measure::ExtSpearman => extend_bivariate(BivariateBase::Spearman, c),
            Measure::ExtKendall => extend_bivariate(BivariateBase::Kendall, c),
        }
    }

    /// The transition sequence. `r_0 = r_1 = 0` by convention; no identity
    /// check is allowed to depend on those values.
    pub fn r(self, n: usize) -> Rational {
        if n < 2 {
            return Rational::zero();
        }
        let ni = n as i64;
        match self {
            // r_n = 2 (n+2)/(n+1) (2^n - (n+1)) / (2^{n+1} - (n+2))
            Measure::NelsenRho => {
                let two_n = int(2).pow(n as i32);
                rat(2 * (ni + 2), ni + 1) * (&two_n - int(ni + 1)) / (int(2) * &two_n - int(ni + 2))
            }
            // r_n = 2 (2^{n-1} - 1) / (2^n - 1)
            Measure::NelsenTau => {
                let half_pow = int(2).pow((n - 1) as i32);
                int(2) * (&half_pow - int(1)) / (int(2) * &half_pow - int(1))
            }
            // r_{1+p} = 2p / (2+p), i.e. r_n = 2(n-1)/(n+1)
            Measure::ExtSpearman | Measure::ExtKendall => rat(2 * (ni - 1), ni + 1),
        }
    }

    /// `prod_{k=lo..=hi} r_k`; the empty product is 1.
    pub fn r_product(self, lo: usize, hi: usize) -> Rational {
        let mut acc = Rational::one();
        let mut k = lo;
        while k <= hi {
            acc *= self.r(k);
            k += 1;
        }
        acc
    }

    /// `kappa_{n-s}(C_S)`: the measure applied to the proper copula of the
    /// pinned marginal; 0 when fewer than two axes stay active.
    pub fn kappa_of_marginal(self, c: &Copula, pinned: &IndexSet) -> Result<Rational> {
        if c.dim().saturating_sub(pinned.card()) < 2 {
            return Ok(Rational::zero());
        }
        self.kappa(&proper_of(c, pinned)?)
    }
}

/// `integral of C with respect to the uniform measure` — exact.
pub fn integral_c_d_pi(c: &Copula) -> Result<Rational> {
    match representation(c)? {
        Repr::Grid(g) => Ok(grid_integrals(&g).c_d_pi),
        Repr::Reflected(r) => Ok(reflected_integrals(&r).c_d_pi),
    }
}

/// `integral of Pi with respect to mu_C` — exact.
pub fn integral_pi_d_c(c: &Copula) -> Result<Rational> {
    match representation(c)? {
        Repr::Grid(g) => Ok(grid_integrals(&g).pi_d_c),
        Repr::Reflected(r) => Ok(reflected_integrals(&r).pi_d_c),
    }
}

/// `integral of C with respect to mu_C` — exact.
pub fn integral_c_d_c(c: &Copula) -> Result<Rational> {
    match representation(c)? {
        Repr::Grid(g) => Ok(grid_integrals(&g).c_d_c),
        Repr::Reflected(r) => Ok(reflected_integrals(&r).c_d_c),
    }
}

enum Repr {
    Grid(MassGrid),
    Reflected(ReflectedM),
}

fn representation(c: &Copula) -> Result<Repr> {
    if let Some(g) = c.to_grid() {
        return Ok(Repr::Grid(g));
    }
    match c {
        Copula::ReflectedM(r) => Ok(Repr::Reflected(r.clone())),
        _ => Err(Error::Unsupported {
            op: "concordance integral",
        }),
    }
}

#[derive(Clone)]
pub struct Integrals {
    pub c_d_pi: Rational,
    pub pi_d_c: Rational,
    pub c_d_c: Rational,
}

/// All three integrals in one sweep over the cells.
fn grid_integrals(g: &MassGrid) -> Integrals {
    let n = g.dim();
    let res = g.resolution();
    let vol: Rational = res.iter().map(|&m| rat(1, m as i64)).product();
    let vshape: Vec<usize> = res.iter().map(|m| m + 1).collect();
    let vst = strides(&vshape);
    let mst = strides(res);
    let corner_scale = inv_pow2(n);
    let mut c_d_pi = Rational::zero();
    let mut pi_d_c = Rational::zero();
    let mut c_d_c = Rational::zero();
    for_each_index(res, |cell| {
        // C at the cell center: the average of the 2^n vertex values.
        let mut corner_sum = Rational::zero();
        let base = flat_index(cell, &vst);
        for bits in 0u64..(1u64 << n) {
            let mut off = base;
            for (i, s) in vst.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    off += s;
                }
            }
            corner_sum += g.vertex_flat(off);
        }
        let c_center = corner_sum * &corner_scale;
        let pi_center: Rational = cell
            .iter()
            .zip(res)
            .map(|(&k, &m)| rat(2 * k as i64 + 1, 2 * m as i64))
            .product();
        let mass = &g.masses()[flat_index(cell, &mst)];
        c_d_pi += &vol * &c_center;
        pi_d_c += mass * pi_center;
        c_d_c += mass * c_center;
    });
    Integrals {
        c_d_pi,
        pi_d_c,
        c_d_c,
    }
}

/// `integral_0^1 x^p (1-x)^q dx`, by expanding the binomial and integrating
/// term by term.
fn poly_beta(p: usize, q: usize) -> Rational {
    let mut acc = Rational::zero();
    for k in 0..=q {
        let term = binomial_rat(q, k) / int((p + k + 1) as i64);
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Closed forms for `sigma_S^*(M)`.
///
/// With `0 < s < n` the support parameterizes as `u -> (u or 1-u)`, on which
/// the distribution function vanishes, so the self-integral is 0. The other
/// two integrals are expectations of polynomials in one uniform variable:
/// `pi_d_c` integrates `u^{n-s}(1-u)^s`; `c_d_pi` is `E[(A - B)^+]` for `A`
/// the min of `n-s` uniforms and `B` the max of `s` uniforms. Flipping
/// nothing (or everything) is comonotone, where `M` has its own forms.
fn reflected_integrals(r: &ReflectedM) -> Integrals {
    let n = r.n();
    let s = r.flipped().card();
    if s == 0 || s == n {
        let edge = rat(1, n as i64 + 1);
        return Integrals {
            c_d_pi: edge.clone(),
            pi_d_c: edge,
            c_d_c: rat(1, 2),
        };
    }
    let pi_d_c = poly_beta(n - s, s);
    // Inner integral over B's density s b^{s-1} gives a^{s+1}/(s+1); the
    // outer integral is against A's density (n-s)(1-a)^{n-s-1}.
    let c_d_pi = rat((n - s) as i64, (s + 1) as i64) * poly_beta(s + 1, n - s - 1);
    Integrals {
        c_d_pi,
        pi_d_c,
        c_d_c: Rational::zero(),
    }
}

/// Normalizer forced by `rho_n(M) = 1`, computed from M's own integrals.
pub fn rho_normalizer(n: usize) -> Result<Rational> {
    let m = ReflectedM::comonotone(n)?;
    let ints = reflected_integrals(&m);
    Ok((ints.c_d_pi + ints.pi_d_c - inv_pow2(n - 1)).recip())
}

/// Normalizer forced by `tau_n(M) = 1`.
pub fn tau_normalizer(n: usize) -> Result<Rational> {
    let m = ReflectedM::comonotone(n)?;
    Ok((reflected_integrals(&m).c_d_c - inv_pow2(n)).recip())
}

/// Nelsen's multivariate Spearman rho.
pub fn nelsen_rho(c: &Copula) -> Result<Rational> {
    let n = c.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall {
            op: "rho",
            min: 2,
            got: n,
        });
    }
    let (c_d_pi, pi_d_c) = match representation(c)? {
        Repr::Grid(g) => {
            let ints = grid_integrals(&g);
            (ints.c_d_pi, ints.pi_d_c)
        }
        Repr::Reflected(r) => {
            let ints = reflected_integrals(&r);
            (ints.c_d_pi, ints.pi_d_c)
        }
    };
    Ok(rho_normalizer(n)? * (c_d_pi + pi_d_c - inv_pow2(n - 1)))
}

/// Nelsen's multivariate Kendall tau.
pub fn nelsen_tau(c: &Copula) -> Result<Rational> {
    let n = c.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall {
            op: "tau",
            min: 2,
            got: n,
        });
    }
    let c_d_c = integral_c_d_c(c)?;
    Ok(tau_normalizer(n)? * (c_d_c - inv_pow2(n)))
}

/// A bivariate measure of concordance in Scarsini's sense, used as the base
/// of the marginal-averaging extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BivariateBase {
    /// `12 integral C dPi - 3`
    Spearman,
    /// `4 integral C dC - 1`
    Kendall,
}

impl BivariateBase {
    pub fn kappa2(self, c: &Copula) -> Result<Rational> {
        if c.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: c.dim(),
            });
        }
        match self {
            BivariateBase::Spearman => Ok(int(12) * integral_c_d_pi(c)? - int(3)),
            BivariateBase::Kendall => Ok(int(4) * integral_c_d_c(c)? - int(1)),
        }
    }
}

/// `kappa_{2+p}(C) = (1 / binom(2+p, 2)) * sum of kappa_2 over all
/// two-dimensional proper marginals`. At `p = 0` this is the base itself.
pub fn extend_bivariate(base: BivariateBase, c: &Copula) -> Result<Rational> {
    let n = c.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall {
            op: "bivariate extension",
            min: 2,
            got: n,
        });
    }
    if n == 2 {
        return base.kappa2(c);
    }
    let mut acc = Rational::zero();
    for pinned in enumerate(&IndexSet::full(n), n - 2) {
        acc += base.kappa2(&proper_of(c, &pinned)?)?;
    }
    Ok(acc / binomial_rat(n, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::Point;

    fn grid(c: MassGrid) -> Copula {
        Copula::Grid(c)
    }

    fn refl(n: usize, flips: &[usize]) -> Copula {
        Copula::ReflectedM(
            ReflectedM::new(
                n,
                IndexSet::from_one_based(n, flips.iter().copied()).unwrap(),
            )
            .unwrap(),
        )
    }

    /// Brute-force oracle: recompute each cell-center value by scanning every
    /// cell's overlap instead of using the prefix sums.
    fn naive_integrals(g: &MassGrid) -> Integrals {
        let n = g.dim();
        let res = g.resolution();
        let vol: Rational = res.iter().map(|&m| rat(1, m as i64)).product();
        let mut c_d_pi = Rational::zero();
        let mut pi_d_c = Rational::zero();
        let mut c_d_c = Rational::zero();
        for_each_index(res, |cell| {
            let center: Vec<Rational> = cell
                .iter()
                .zip(res)
                .map(|(&k, &m)| rat(2 * k as i64 + 1, 2 * m as i64))
                .collect();
            let mut c_center = Rational::zero();
            for_each_index(res, |other| {
                // Overlap of [0, center] with `other`, axis by axis.
                let mut frac = Rational::one();
                for i in 0..n {
                    let lo = rat(other[i] as i64, res[i] as i64);
                    let width = rat(1, res[i] as i64);
                    let cover = (&center[i] - &lo) / &width;
                    if cover <= Rational::zero() {
                        frac = Rational::zero();
                        break;
                    }
                    if cover < Rational::one() {
                        frac *= cover;
                    }
                }
                if !frac.is_zero() {
                    c_center += frac * g.mass_at(other);
                }
            });
            let pi_center: Rational = center.iter().cloned().product();
            c_d_pi += &vol * &c_center;
            pi_d_c += g.mass_at(cell) * &pi_center;
            c_d_c += g.mass_at(cell) * &c_center;
        });
        Integrals {
            c_d_pi,
            pi_d_c,
            c_d_c,
        }
    }

    #[test]
    fn grid_integrals_match_naive_oracle() {
        for g in [
            MassGrid::independence(&[2, 3]).unwrap(),
            MassGrid::diagonal(2, 4).unwrap(),
            MassGrid::diagonal(3, 2).unwrap(),
            MassGrid::from_ranks(&[vec![1., 5.], vec![2., 2.], vec![3., 9.], vec![4., 4.]])
                .unwrap(),
        ] {
            let fast = grid_integrals(&g);
            let slow = naive_integrals(&g);
            assert_eq!(fast.c_d_pi, slow.c_d_pi);
            assert_eq!(fast.pi_d_c, slow.pi_d_c);
            assert_eq!(fast.c_d_c, slow.c_d_c);
        }
    }

    #[test]
    fn cell_mean_equals_corner_average() {
        // The self-integral uses mass * C(center); the independent route is
        // averaging C over the cell corners.
        let g = MassGrid::from_ranks(&[vec![1., 2.], vec![2., 3.], vec![3., 1.]]).unwrap();
        let res = g.resolution().to_vec();
        let mut by_corners = Rational::zero();
        for_each_index(&res, |cell| {
            let mut corner_sum = Rational::zero();
            for bits in 0u64..4 {
                let coords: Vec<Rational> = (0..2)
                    .map(|i| rat((cell[i] + (bits as usize >> i & 1)) as i64, res[i] as i64))
                    .collect();
                corner_sum += g.eval(&Point::new(coords).unwrap()).unwrap();
            }
            by_corners += g.mass_at(cell) * corner_sum / int(4);
        });
        assert_eq!(grid_integrals(&g).c_d_c, by_corners);
    }

    #[test]
    fn reflected_integral_examples() {
        // integral of min over the cube, n = 3.
        assert_eq!(integral_c_d_pi(&refl(3, &[])).unwrap(), rat(1, 4));
        // E[(min of 2 uniforms - 1 uniform)^+] = 1/12.
        assert_eq!(integral_c_d_pi(&refl(3, &[1])).unwrap(), rat(1, 12));
        assert_eq!(integral_pi_d_c(&refl(3, &[1])).unwrap(), rat(1, 12));
        assert_eq!(integral_c_d_c(&refl(3, &[1])).unwrap(), int(0));
        // Pi's self-integral on a grid.
        assert_eq!(
            integral_c_d_c(&grid(MassGrid::independence(&[2, 2]).unwrap())).unwrap(),
            rat(1, 4)
        );
        // (n-s)! s! / (n+1)! equals the polynomial integration route.
        for n in 2..=6 {
            for s in 1..n {
                let expect = Rational::new(
                    crate::rational::factorial(n - s) * crate::rational::factorial(s),
                    crate::rational::factorial(n + 1),
                );
                assert_eq!(
                    integral_pi_d_c(&refl(n, &(1..=s).collect::<Vec<_>>())).unwrap(),
                    expect
                );
                assert_eq!(
                    integral_c_d_pi(&refl(n, &(1..=s).collect::<Vec<_>>())).unwrap(),
                    expect
                );
            }
        }
    }

    #[test]
    fn riemann_sandwich_for_min_integral() {
        // Monotone envelope: sum of vol * C(lower corner) <= integral <=
        // sum of vol * C(upper corner), exact in rationals.
        let m = refl(3, &[]);
        let k = 8usize;
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        let vol = rat(1, (k * k * k) as i64);
        for_each_index(&[k, k, k], |cell| {
            let lower: Vec<Rational> = cell.iter().map(|&c| rat(c as i64, k as i64)).collect();
            let upper: Vec<Rational> = cell.iter().map(|&c| rat(c as i64 + 1, k as i64)).collect();
            lo += &vol * m.eval(&Point::new(lower).unwrap()).unwrap();
            hi += &vol * m.eval(&Point::new(upper).unwrap()).unwrap();
        });
        let exact = integral_c_d_pi(&m).unwrap();
        assert!(lo <= exact && exact <= hi);
        assert_eq!(exact, rat(1, 4));
    }

    #[test]
    fn normalizers_match_hand_values() {
        assert_eq!(rho_normalizer(2).unwrap(), int(6));
        assert_eq!(rho_normalizer(3).unwrap(), int(4));
        assert_eq!(tau_normalizer(2).unwrap(), int(4));
        assert_eq!(tau_normalizer(3).unwrap(), rat(8, 3));
        assert_eq!(tau_normalizer(4).unwrap(), rat(16, 7));
    }

    #[test]
    fn kappa_examples() {
        let pi3 = grid(MassGrid::independence(&[2, 2, 2]).unwrap());
        assert_eq!(nelsen_rho(&pi3).unwrap(), int(0));
        assert_eq!(nelsen_rho(&refl(3, &[])).unwrap(), int(1));
        assert_eq!(nelsen_rho(&refl(3, &[1])).unwrap(), rat(-1, 3));
        assert_eq!(nelsen_tau(&refl(4, &[2])).unwrap(), rat(-1, 7));
        assert_eq!(nelsen_tau(&refl(3, &[])).unwrap(), int(1));
    }

    #[test]
    fn r_sequence_examples() {
        for m in Measure::ALL {
            assert_eq!(m.r(2), rat(2, 3), "{}", m.name());
            assert_eq!(m.r(0), int(0));
            assert_eq!(m.r(1), int(0));
        }
        assert_eq!(Measure::NelsenRho.r(3), rat(10, 11));
        assert_eq!(Measure::NelsenTau.r(3), rat(6, 7));
        assert_eq!(Measure::ExtSpearman.r(3), int(1));
        // r_{1+p} = 2p/(2+p).
        for p in 1..=6usize {
            assert_eq!(
                Measure::ExtKendall.r(1 + p),
                rat(2 * p as i64, 2 + p as i64)
            );
        }
        assert_eq!(Measure::NelsenTau.r_product(3, 2), int(1));
        assert_eq!(
            Measure::NelsenTau.r_product(2, 4),
            rat(2, 3) * rat(6, 7) * rat(14, 15)
        );
    }

    #[test]
    fn extension_examples() {
        assert_eq!(
            extend_bivariate(BivariateBase::Spearman, &refl(4, &[])).unwrap(),
            int(1)
        );
        let pi4 = grid(MassGrid::independence(&[2, 2, 2, 2]).unwrap());
        assert_eq!(
            extend_bivariate(BivariateBase::Kendall, &pi4).unwrap(),
            int(0)
        );
        // Pairs through the flipped axis are countermonotone, others
        // comonotone: (3 * (-1) + 3 * 1) / 6 = 0.
        assert_eq!(
            extend_bivariate(BivariateBase::Spearman, &refl(4, &[1])).unwrap(),
            int(0)
        );
    }

    #[test]
    fn extension_base_agrees_with_nelsen_at_dimension_two() {
        for g in [
            MassGrid::diagonal(2, 3).unwrap(),
            MassGrid::from_ranks(&[vec![1., 3.], vec![2., 1.], vec![3., 2.]]).unwrap(),
        ] {
            let c = grid(g);
            assert_eq!(
                Measure::ExtSpearman.kappa(&c).unwrap(),
                Measure::NelsenRho.kappa(&c).unwrap()
            );
            assert_eq!(
                Measure::ExtKendall.kappa(&c).unwrap(),
                Measure::NelsenTau.kappa(&c).unwrap()
            );
        }
    }

    #[test]
    fn kappa_of_marginal_examples() {
        let pi4 = grid(MassGrid::independence(&[2, 2, 2, 2]).unwrap());
        let s = IndexSet::from_one_based(4, [3]).unwrap();
        assert_eq!(
            Measure::NelsenRho.kappa_of_marginal(&pi4, &s).unwrap(),
            int(0)
        );

        // Pinning down to one active axis gives 0 by convention.
        let s = IndexSet::from_one_based(4, [1, 2, 4]).unwrap();
        assert_eq!(
            Measure::NelsenRho.kappa_of_marginal(&pi4, &s).unwrap(),
            int(0)
        );

        // The flipped axis survives the relabeling: tau_3 of sigma_1^*(M_3).
        let c = refl(4, &[1, 2]);
        let s = IndexSet::from_one_based(4, [1]).unwrap();
        assert_eq!(
            Measure::NelsenTau.kappa_of_marginal(&c, &s).unwrap(),
            rat(-1, 3)
        );
    }

    #[test]
    fn scarsini_spot_checks_for_bases() {
        let m2 = refl(2, &[]);
        let w2 = refl(2, &[1]);
        for base in [BivariateBase::Spearman, BivariateBase::Kendall] {
            assert_eq!(base.kappa2(&m2).unwrap(), int(1));
            assert_eq!(base.kappa2(&w2).unwrap(), int(-1));
            assert_eq!(
                base.kappa2(&grid(MassGrid::independence(&[2, 2]).unwrap()))
                    .unwrap(),
                int(0)
            );
        }
        // S5: kappa_2(sigma_1^*(C)) = -kappa_2(C) on a grid.
        let c = grid(MassGrid::from_ranks(&[vec![1., 2.], vec![2., 3.], vec![3., 1.]]).unwrap());
        let s1 = crate::symmetry::Symmetry::elementary_reflection(2, 0).unwrap();
        let flipped = crate::symmetry::apply(&s1, &c).unwrap();
        for base in [BivariateBase::Spearman, BivariateBase::Kendall] {
            assert_eq!(base.kappa2(&flipped).unwrap(), -base.kappa2(&c).unwrap());
        }
    }
}
