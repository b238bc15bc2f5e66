//! Copula representations beyond the raw grid: points of the cube, the
//! singular copulas of `(±U, .., ±U)`, convex mixtures, and product
//! extensions, together with evaluation and box measures.

use num::{One, Signed, Zero};

use crate::grid::MassGrid;
use crate::index_set::IndexSet;
use crate::rational::Rational;
use crate::{Error, Result};

/// A point of the unit cube with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    coords: Vec<Rational>,
}

impl Point {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if let Some(bad) = coords
            .iter()
            .find(|c| c.is_negative() || **c > Rational::one())
        {
            return Err(Error::CoordinateOutOfRange(bad.to_string()));
        }
        Ok(Self { coords })
    }

    pub fn ones(n: usize) -> Self {
        Self {
            coords: vec![Rational::one(); n],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![Rational::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rational {
        &self.coords[i]
    }

    /// The point `x_S`: coordinates in `pinned` replaced by 1.
    pub fn pinned(&self, pinned: &IndexSet) -> Point {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if pinned.contains(i) {
                    Rational::one()
                } else {
                    c.clone()
                }
            })
            .collect();
        Point { coords }
    }

    pub fn le(&self, other: &Point) -> bool {
        self.dim() == other.dim() && self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b)
    }
}

/// The copula of `(e_1 U, .., e_n U)` where `e_i = -1` exactly on the flipped
/// set: the image of the comonotone copula under that reflection. Singular,
/// with all closed-form concordance integrals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectedM {
    n: usize,
    flipped: IndexSet,
}

impl ReflectedM {
    pub fn new(n: usize, flipped: IndexSet) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall {
                op: "reflected M",
                min: 2,
                got: n,
            });
        }
        if flipped.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: flipped.n(),
            });
        }
        Ok(Self { n, flipped })
    }

    /// `M` itself: nothing flipped.
    pub fn comonotone(n: usize) -> Result<Self> {
        Self::new(n, IndexSet::empty(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flipped(&self) -> &IndexSet {
        &self.flipped
    }

    /// `max(0, min_{j not in S} x_j - max_{i in S}(1 - x_i))`, with the empty
    /// min read as 1 and the empty max as 0.
    pub fn eval(&self, x: &Point) -> Result<Rational> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        let mut lo = Rational::zero();
        let mut hi = Rational::one();
        for (i, xi) in x.coords().iter().enumerate() {
            if self.flipped.contains(i) {
                let flipped = Rational::one() - xi;
                if flipped > lo {
                    lo = flipped;
                }
            } else if xi < &hi {
                hi = xi.clone();
            }
        }
        let gap = hi - lo;
        Ok(if gap.is_negative() {
            Rational::zero()
        } else {
            gap
        })
    }
}

/// An exact copula: checkerboard grid, reflected comonotone, convex mixture,
/// or the product extension `(x0, x) -> x0 * C(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Copula {
    Grid(MassGrid),
    ReflectedM(ReflectedM),
    Mixture {
        weights: Vec<Rational>,
        parts: Vec<Copula>,
    },
    ProductExtension(Box<Copula>),
}

impl From<MassGrid> for Copula {
    fn from(g: MassGrid) -> Self {
        Copula::Grid(g)
    }
}

impl From<ReflectedM> for Copula {
    fn from(r: ReflectedM) -> Self {
        Copula::ReflectedM(r)
    }
}

impl Copula {
    pub fn dim(&self) -> usize {
        match self {
            Copula::Grid(g) => g.dim(),
            Copula::ReflectedM(r) => r.n(),
            Copula::Mixture { parts, .. } => parts[0].dim(),
            Copula::ProductExtension(inner) => inner.dim() + 1,
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Rational> {
        match self {
            Copula::Grid(g) => g.eval(x),
            Copula::ReflectedM(r) => r.eval(x),
            Copula::Mixture { weights, parts } => {
                let mut acc = Rational::zero();
                for (w, part) in weights.iter().zip(parts) {
                    acc += w * part.eval(x)?;
                }
                Ok(acc)
            }
            Copula::ProductExtension(inner) => {
                if x.dim() != self.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        got: x.dim(),
                    });
                }
                let rest = Point::new(x.coords()[1..].to_vec())?;
                Ok(x.coord(0) * inner.eval(&rest)?)
            }
        }
    }

    /// Signed inclusion-exclusion of `eval` over the corners of `[lo, hi]`;
    /// nonnegative for genuine copulas.
    pub fn box_measure(&self, lo: &Point, hi: &Point) -> Result<Rational> {
        let n = self.dim();
        if lo.dim() != n || hi.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: lo.dim().max(hi.dim()),
            });
        }
        if !lo.le(hi) {
            return Err(Error::BoxNotOrdered);
        }
        signed_box_sum(|p| self.eval(p), lo.coords(), hi.coords())
    }

    /// Convex combination; collapses to a single grid whenever every part
    /// materializes, taking the common refinement first.
    pub fn mixture(weights: Vec<Rational>, parts: Vec<Copula>) -> Result<Copula> {
        if weights.len() != parts.len() || parts.is_empty() {
            return Err(Error::BadMixtureWeights);
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::BadMixtureWeights);
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::BadMixtureWeights);
        }
        let n = parts[0].dim();
        if let Some(p) = parts.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
        let grids: Option<Vec<MassGrid>> = parts.iter().map(|p| p.to_grid()).collect();
        if let Some(grids) = grids {
            let mut resolution = vec![1usize; n];
            for g in &grids {
                for (r, &m) in resolution.iter_mut().zip(g.resolution()) {
                    *r = num::integer::lcm(*r, m);
                }
            }
            let mut masses = vec![Rational::zero(); resolution.iter().product()];
            for (w, g) in weights.iter().zip(&grids) {
                let refined = g.refine(&resolution)?;
                for (acc, m) in masses.iter_mut().zip(refined.masses()) {
                    *acc += w * m;
                }
            }
            return Ok(Copula::Grid(MassGrid::new(resolution, masses)?));
        }
        Ok(Copula::Mixture { weights, parts })
    }

    /// The canonical transition-property witness `E = Pi (x) C`, satisfying
    /// `E(1, x) = C(x)`.
    pub fn product_extension(inner: Copula) -> Copula {
        match inner.to_grid() {
            Some(g) => Copula::Grid(g.product_extend()),
            None => Copula::ProductExtension(Box::new(inner)),
        }
    }

    pub fn as_grid(&self) -> Option<&MassGrid> {
        match self {
            Copula::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Materializes to a checkerboard when the representation admits one
    /// (grids, mixtures of grids, product extensions of grids).
    pub fn to_grid(&self) -> Option<MassGrid> {
        match self {
            Copula::Grid(g) => Some(g.clone()),
            Copula::ReflectedM(_) => None,
            Copula::Mixture { weights, parts } => {
                match Copula::mixture(weights.clone(), parts.clone()) {
                    Ok(Copula::Grid(g)) => Some(g),
                    _ => None,
                }
            }
            Copula::ProductExtension(inner) => inner.to_grid().map(|g| g.product_extend()),
        }
    }

    /// Canonical on-disk form. Grids use the mass-tensor schema; reflected
    /// comonotone copulas persist as `{"n": .., "flipped": [..]}` with
    /// 1-based axes. Other representations materialize to a grid first.
    pub fn to_json_string(&self) -> Result<String> {
        match self {
            Copula::ReflectedM(r) => {
                let doc = ReflectedJson {
                    n: r.n(),
                    flipped: r.flipped().one_based(),
                };
                Ok(serde_json::to_string(&doc).expect("reflected M serializes"))
            }
            other => match other.to_grid() {
                Some(g) => Ok(g.to_json_string()),
                None => Err(Error::Unsupported {
                    op: "serialization",
                }),
            },
        }
    }

    pub fn from_json_str(s: &str) -> Result<Copula> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        if value.get("masses").is_some() {
            return Ok(Copula::Grid(MassGrid::from_json_str(s)?));
        }
        if value.get("flipped").is_some() {
            let doc: ReflectedJson = serde_json::from_str(s)?;
            let flipped = IndexSet::from_one_based(doc.n, doc.flipped)?;
            return Ok(Copula::ReflectedM(ReflectedM::new(doc.n, flipped)?));
        }
        Err(Error::Parse(
            "copula file needs either `masses` or `flipped`".into(),
        ))
    }

    /// Short descriptor for report rows.
    pub fn describe(&self) -> String {
        match self {
            Copula::Grid(g) => format!(
                "grid({})",
                g.resolution()
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join("x")
            ),
            Copula::ReflectedM(r) => {
                if r.flipped().is_empty() {
                    format!("M({})", r.n())
                } else {
                    format!("sigma{}*M({})", r.flipped(), r.n())
                }
            }
            Copula::Mixture { parts, .. } => format!(
                "mix({})",
                parts
                    .iter()
                    .map(|p| p.describe())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Copula::ProductExtension(inner) => format!("Pi(x){}", inner.describe()),
        }
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct ReflectedJson {
    n: usize,
    flipped: Vec<usize>,
}

/// `sum over corners of [lo, hi] of (-1)^{# lower picks} f(corner)`: the
/// signed measure a distribution-like function assigns to a box. Degenerate
/// boxes are fine.
pub fn signed_box_sum(
    f: impl Fn(&Point) -> Result<Rational>,
    lo: &[Rational],
    hi: &[Rational],
) -> Result<Rational> {
    let n = lo.len();
    let mut acc = Rational::zero();
    let mut corner = Vec::with_capacity(n);
    for bits in 0u64..(1u64 << n) {
        corner.clear();
        let mut lows = 0usize;
        for i in 0..n {
            if bits >> i & 1 == 1 {
                corner.push(hi[i].clone());
            } else {
                corner.push(lo[i].clone());
                lows += 1;
            }
        }
        let term = f(&Point::new(corner.clone())?)?;
        if lows.is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(coords: &[Rational]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn point_range_checked() {
        assert!(Point::new(vec![rat(3, 2)]).is_err());
        assert!(Point::new(vec![rat(-1, 5)]).is_err());
        assert!(Point::new(vec![rat(0, 1), rat(1, 1)]).is_ok());
    }

    #[test]
    fn reflected_m_eval() {
        // No flips: M(t) = min(t).
        let m = ReflectedM::comonotone(2).unwrap();
        assert_eq!(m.eval(&pt(&[rat(1, 3), rat(1, 4)])).unwrap(), rat(1, 4));
        // One flip: lambda{u : 1-u <= 3/4, u <= 1/2} = lambda[1/4, 1/2].
        let w = ReflectedM::new(2, IndexSet::new(2, [0]).unwrap()).unwrap();
        assert_eq!(w.eval(&pt(&[rat(3, 4), rat(1, 2)])).unwrap(), rat(1, 4));
        // Everything flipped is comonotone again.
        let all = ReflectedM::new(3, IndexSet::full(3)).unwrap();
        let x = pt(&[rat(1, 2), rat(2, 3), rat(3, 5)]);
        assert_eq!(all.eval(&x).unwrap(), rat(1, 2));
    }

    #[test]
    fn eval_examples() {
        let pi = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        assert_eq!(pi.eval(&pt(&[rat(1, 2), rat(1, 2)])).unwrap(), rat(1, 4));

        let m = Copula::ReflectedM(ReflectedM::comonotone(2).unwrap());
        assert_eq!(m.eval(&pt(&[rat(1, 3), rat(1, 4)])).unwrap(), rat(1, 4));

        let bad = m.eval(&Point::ones(3));
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn box_measure_examples() {
        let pi = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        let total = pi.box_measure(&Point::zeros(2), &Point::ones(2)).unwrap();
        assert_eq!(total, rat(1, 1));
        let quadrant = pi
            .box_measure(&pt(&[rat(0, 1), rat(1, 2)]), &pt(&[rat(1, 2), rat(1, 1)]))
            .unwrap();
        assert_eq!(quadrant, rat(1, 4));

        let m = Copula::ReflectedM(ReflectedM::comonotone(2).unwrap());
        let off_diag = m
            .box_measure(&pt(&[rat(1, 2), rat(0, 1)]), &pt(&[rat(1, 1), rat(1, 2)]))
            .unwrap();
        assert_eq!(off_diag, rat(0, 1));

        assert!(matches!(
            pi.box_measure(&Point::ones(2), &Point::zeros(2)),
            Err(Error::BoxNotOrdered)
        ));
    }

    #[test]
    fn mixture_materializes_and_matches_affine_combination() {
        let diag = Copula::Grid(MassGrid::diagonal(2, 2).unwrap());
        let pi = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        let mix =
            Copula::mixture(vec![rat(1, 2), rat(1, 2)], vec![diag.clone(), pi.clone()]).unwrap();
        assert!(mix.as_grid().is_some());
        let x = pt(&[rat(1, 2), rat(1, 2)]);
        assert_eq!(mix.eval(&x).unwrap(), rat(3, 8));

        let one_part = Copula::mixture(vec![rat(1, 1)], vec![pi.clone()]).unwrap();
        assert_eq!(one_part, pi);

        assert!(Copula::mixture(vec![rat(1, 2)], vec![diag.clone(), pi.clone()]).is_err());
        assert!(Copula::mixture(vec![rat(1, 2), rat(1, 4)], vec![diag, pi]).is_err());
    }

    #[test]
    fn symbolic_mixture_of_singulars() {
        let m = Copula::ReflectedM(ReflectedM::comonotone(2).unwrap());
        let w = Copula::ReflectedM(ReflectedM::new(2, IndexSet::new(2, [0]).unwrap()).unwrap());
        let mix = Copula::mixture(vec![rat(1, 2), rat(1, 2)], vec![m.clone(), w.clone()]).unwrap();
        assert!(mix.as_grid().is_none());
        let x = pt(&[rat(1, 2), rat(1, 2)]);
        let expect = (m.eval(&x).unwrap() + w.eval(&x).unwrap()) / rat(2, 1);
        assert_eq!(mix.eval(&x).unwrap(), expect);
    }

    #[test]
    fn copula_json_round_trip() {
        let g = Copula::Grid(MassGrid::diagonal(2, 3).unwrap());
        let s = g.to_json_string().unwrap();
        assert_eq!(Copula::from_json_str(&s).unwrap(), g);

        let r = Copula::ReflectedM(
            ReflectedM::new(3, IndexSet::from_one_based(3, [1, 3]).unwrap()).unwrap(),
        );
        let s = r.to_json_string().unwrap();
        assert_eq!(s, "{\"n\":3,\"flipped\":[1,3]}");
        assert_eq!(Copula::from_json_str(&s).unwrap(), r);

        assert!(Copula::from_json_str("{\"n\":2}").is_err());
    }

    #[test]
    fn product_extension_eval() {
        let pi2 = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        let e = Copula::product_extension(pi2);
        assert_eq!(e.dim(), 3);
        let x = pt(&[rat(1, 2), rat(1, 2), rat(1, 2)]);
        assert_eq!(e.eval(&x).unwrap(), rat(1, 8));
        // E(1, x) = C(x).
        let m = Copula::ReflectedM(ReflectedM::comonotone(2).unwrap());
        let e = Copula::product_extension(m.clone());
        let x2 = pt(&[rat(2, 5), rat(3, 4)]);
        let x3 = pt(&[rat(1, 1), rat(2, 5), rat(3, 4)]);
        assert_eq!(e.eval(&x3).unwrap(), m.eval(&x2).unwrap());
    }
}
