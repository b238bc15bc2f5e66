//! The group of symmetries of the unit cube — coordinate permutations
//! composed with coordinate flips `x_i -> 1 - x_i` — and its induced action
//! on copulas.
//!
//! Every element is kept in the canonical form "flips outermost": a flip set
//! `S` and a permutation `tau` with the element acting as
//! `x -> sigma_S(tau(x))`. That form is unique, reflections commute, and the
//! length of an element is the size of its flip set. The normalization
//! rewrite is `tau . sigma_S = sigma_{tau'^{-1}(S)} . tau`.
//!
//! The action on a mass grid is materialized as tensor axis reversal (flips)
//! followed by axis permutation; the measure-theoretic definition
//! `[xi^*(f)](x) = mu_f(xi([0,x]))` is kept alongside in
//! [`SignedCopulaFunction`] as the slow pointwise oracle.

use std::fmt;

use num::Zero;

use crate::copula::{signed_box_sum, Copula, Point};
use crate::index_set::IndexSet;
use crate::rational::Rational;
use crate::{Error, Result};

/// Largest dimension for which full reflection sweeps (all `2^n` elements)
/// are enumerated by default.
pub const DEFAULT_REFLECTION_CAP: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Symmetry {
    /// Image list of the permutation part: `tau(x) = (x_{perm[0]}, ..)`.
    perm: Vec<usize>,
    /// Flip set `S` of the canonical form `sigma_S . tau`.
    flips: IndexSet,
}

impl Symmetry {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            flips: IndexSet::empty(n),
        }
    }

    /// A pure permutation from its 0-based image list.
    pub fn permutation(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img >= n || seen[img] {
                return Err(Error::BadPermutation);
            }
            seen[img] = true;
        }
        Ok(Self {
            perm: images,
            flips: IndexSet::empty(n),
        })
    }

    /// The reflection `sigma_S`.
    pub fn reflection(flips: IndexSet) -> Self {
        Self {
            perm: (0..flips.n()).collect(),
            flips,
        }
    }

    pub fn elementary_reflection(n: usize, axis: usize) -> Result<Self> {
        Ok(Self::reflection(IndexSet::singleton(n, axis)?))
    }

    pub fn canonical(flips: IndexSet, perm_images: Vec<usize>) -> Result<Self> {
        let perm = Self::permutation(perm_images)?;
        if perm.n() != flips.n() {
            return Err(Error::DimensionMismatch {
                expected: perm.n(),
                got: flips.n(),
            });
        }
        Ok(Self {
            perm: perm.perm,
            flips,
        })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn flips(&self) -> &IndexSet {
        &self.flips
    }

    /// Number of elementary reflections in the canonical form.
    pub fn length(&self) -> usize {
        self.flips.card()
    }

    pub fn is_identity(&self) -> bool {
        self.is_permutation() && self.perm.iter().enumerate().all(|(i, &k)| i == k)
    }

    pub fn is_permutation(&self) -> bool {
        self.flips.is_empty()
    }

    pub fn is_reflection(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &k)| i == k)
    }

    /// `tau'(S)`: image of an axis set under the permutation part.
    pub fn perm_image(&self, s: &IndexSet) -> IndexSet {
        s.map_members(|i| self.perm[i])
            .expect("permutation keeps range")
    }

    /// `tau'^{-1}(S)`: preimage of an axis set under the permutation part.
    pub fn perm_preimage(&self, s: &IndexSet) -> IndexSet {
        IndexSet::new(
            self.n(),
            (0..self.n()).filter(|&i| s.contains(self.perm[i])),
        )
        .expect("in range")
    }

    /// Applies the symmetry to a point: `sigma_S(tau(x))`.
    pub fn map_point(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.dim(),
            });
        }
        let coords = (0..self.n())
            .map(|i| {
                let v = x.coord(self.perm[i]).clone();
                if self.flips.contains(i) {
                    Rational::from_integer(1.into()) - v
                } else {
                    v
                }
            })
            .collect();
        Point::new(coords)
    }

    /// Group law `self . other` (apply `other` first), renormalized to the
    /// canonical form via `tau . sigma_T = sigma_{tau'^{-1}(T)} . tau`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let flips = self
            .flips
            .symmetric_difference(&self.perm_preimage(&other.flips));
        // (tau . rho)' = rho' . tau'.
        let perm = (0..self.n()).map(|i| other.perm[self.perm[i]]).collect();
        Ok(Self { perm, flips })
    }

    pub fn inverse(&self) -> Self {
        let mut inv_perm = vec![0usize; self.n()];
        for (i, &img) in self.perm.iter().enumerate() {
            inv_perm[img] = i;
        }
        // (sigma_S . tau)^{-1} = tau^{-1} . sigma_S = sigma_{tau'(S)} . tau^{-1}.
        let flips = self.perm_image(&self.flips);
        Self {
            perm: inv_perm,
            flips,
        }
    }

    /// Parses the textual syntax: `perm(2,3,1)`, `flip{1,3}`, `id`, and
    /// `*`-products applied left-to-right, e.g. `flip{1}*perm(2,1)`.
    pub fn parse(input: &str, n: usize) -> Result<Self> {
        let mut acc = Self::identity(n);
        for factor in input.split('*') {
            let factor = factor.trim();
            let parsed = if factor == "id" {
                Self::identity(n)
            } else if let Some(body) = factor
                .strip_prefix("perm(")
                .and_then(|r| r.strip_suffix(')'))
            {
                let images = parse_number_list(body)?;
                if images.len() != n {
                    return Err(Error::Parse(format!(
                        "perm lists {} images but dimension is {n}",
                        images.len()
                    )));
                }
                if images.contains(&0) {
                    return Err(Error::Parse("perm images are 1-based".into()));
                }
                Self::permutation(images.iter().map(|&i| i - 1).collect())?
            } else if let Some(body) = factor
                .strip_prefix("flip{")
                .and_then(|r| r.strip_suffix('}'))
            {
                Self::reflection(IndexSet::from_one_based(n, parse_number_list(body)?)?)
            } else {
                return Err(Error::Parse(format!("bad symmetry factor `{factor}`")));
            };
            acc = acc.compose(&parsed)?;
        }
        Ok(acc)
    }
}

fn parse_number_list(body: &str) -> Result<Vec<usize>> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index `{tok}`")))
        })
        .collect()
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.flips.is_empty() {
            parts.push(format!("flip{}", self.flips));
        }
        if !self.perm.iter().enumerate().all(|(i, &k)| i == k) {
            let images: Vec<String> = self.perm.iter().map(|&k| (k + 1).to_string()).collect();
            parts.push(format!("perm({})", images.join(",")));
        }
        if parts.is_empty() {
            write!(f, "id")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Debug for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All `2^n` reflections, ordered by flip-set bitmask.
pub fn enumerate_reflections(n: usize) -> Result<Vec<Symmetry>> {
    enumerate_reflections_with_cap(n, DEFAULT_REFLECTION_CAP)
}

pub fn enumerate_reflections_with_cap(n: usize, cap: usize) -> Result<Vec<Symmetry>> {
    if n > cap {
        return Err(Error::ReflectionCap { n, cap });
    }
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let members = (0..n).filter(|i| mask >> i & 1 == 1);
        out.push(Symmetry::reflection(IndexSet::new(n, members)?));
    }
    Ok(out)
}

/// Materializes `xi^*(C)`.
///
/// Grids transform by axis reversal along each flipped axis followed by the
/// axis permutation; reflected-M copulas stay in closed form with the flip
/// set pushed through; mixtures transform partwise. The result of a grid is
/// revalidated, so the action provably lands back in the copula class.
pub fn apply(xi: &Symmetry, c: &Copula) -> Result<Copula> {
    if xi.n() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: xi.n(),
        });
    }
    match c {
        Copula::Grid(g) => {
            let mut grid = g.clone();
            for axis in xi.flips.iter() {
                grid = grid.reverse_axis(axis)?;
            }
            Ok(Copula::Grid(grid.permute(&xi.perm)?))
        }
        Copula::ReflectedM(r) => {
            // xi^*(sigma_T^*(M)) = tau^*(sigma_{T xor S}^*(M)) = sigma_{tau'(T xor S)}^*(M).
            let flipped = xi.perm_image(&r.flipped().symmetric_difference(&xi.flips));
            Ok(Copula::ReflectedM(crate::copula::ReflectedM::new(
                r.n(),
                flipped,
            )?))
        }
        Copula::Mixture { weights, parts } => {
            let parts = parts
                .iter()
                .map(|p| apply(xi, p))
                .collect::<Result<Vec<_>>>()?;
            Ok(Copula::Mixture {
                weights: weights.clone(),
                parts,
            })
        }
        Copula::ProductExtension(inner) => {
            if xi.perm[0] == 0 {
                // The leading axis carries an independent uniform factor, so
                // flipping it is a no-op and the rest acts on the inner copula.
                let m = inner.dim();
                let images = xi.perm[1..].iter().map(|&k| k - 1).collect();
                let flips = IndexSet::new(m, xi.flips.iter().filter(|&i| i > 0).map(|i| i - 1))?;
                let inner_sym = Symmetry::canonical(flips, images)?;
                Ok(Copula::product_extension(apply(&inner_sym, inner)?))
            } else if let Some(g) = c.to_grid() {
                apply(xi, &Copula::Grid(g))
            } else {
                Err(Error::Unsupported {
                    op: "symmetry action",
                })
            }
        }
    }
}

/// Lazily represented `xi^*(C)`, evaluated straight from the definition
/// `mu_C(xi([0,x]))`. This is the oracle the materialized action is tested
/// against.
pub struct SignedCopulaFunction {
    symmetry: Symmetry,
    base: Copula,
}

impl SignedCopulaFunction {
    pub fn new(symmetry: Symmetry, base: Copula) -> Result<Self> {
        if symmetry.n() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: symmetry.n(),
            });
        }
        Ok(Self { symmetry, base })
    }

    pub fn base(&self) -> &Copula {
        &self.base
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    /// `mu_base(xi([0,x]))` by corner inclusion-exclusion over the image box.
    pub fn eval(&self, x: &Point) -> Result<Rational> {
        let n = self.symmetry.n();
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.dim(),
            });
        }
        let one = Rational::from_integer(1.into());
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for i in 0..n {
            let xi_img = x.coord(self.symmetry.perm[i]).clone();
            if self.symmetry.flips.contains(i) {
                lo.push(&one - &xi_img);
                hi.push(one.clone());
            } else {
                lo.push(Rational::zero());
                hi.push(xi_img);
            }
        }
        signed_box_sum(|p| self.base.eval(p), &lo, &hi)
    }

    pub fn materialize(&self) -> Result<Copula> {
        apply(&self.symmetry, &self.base)
    }
}
