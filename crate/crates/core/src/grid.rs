//! Checkerboard copulas: exact rational mass tensors on a rectangular grid.
//!
//! A `MassGrid` stores a dense tensor of cell masses plus the prefix-sum
//! tensor of the induced distribution function. Validity means nonnegative
//! masses, total mass one, and every axis slab carrying exactly `1/m_i`, so
//! the one-dimensional margins are uniform. The distribution function is
//! multilinear inside each cell, which is what makes every integral in the
//! concordance layer a finite rational sum.

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::copula::Point;
use crate::index_set::IndexSet;
use crate::rational::{int, parse_rational, Rational};
use crate::{Error, Result};

/// Row-major strides, last axis fastest.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

pub(crate) fn flat_index(idx: &[usize], strides: &[usize]) -> usize {
    idx.iter().zip(strides).map(|(i, s)| i * s).sum()
}

/// Calls `f` on every multi-index of `shape` in row-major order. An empty
/// shape yields the single empty index.
pub fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    loop {
        f(&idx);
        let mut axis = shape.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < shape[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MassGrid {
    resolution: Vec<usize>,
    masses: Vec<Rational>,
    /// Shape `resolution[i] + 1` per axis; entry at a vertex is the value of
    /// the distribution function there.
    cumulative: Vec<Rational>,
}

impl std::fmt::Debug for MassGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MassGrid{:?}", self.resolution)
    }
}

impl MassGrid {
    /// Validates the copula invariants and builds the prefix-sum tensor.
    ///
    /// `masses` is row-major with the last axis fastest. Dimension zero (empty
    /// resolution, a single mass of 1) is permitted as the sentinel 0-copula
    /// that extended marginals can degenerate to.
    pub fn new(resolution: Vec<usize>, masses: Vec<Rational>) -> Result<Self> {
        if resolution.contains(&0) {
            return Err(Error::InvalidGrid(
                "every axis needs at least one cell".into(),
            ));
        }
        let cells: usize = resolution.iter().product();
        if masses.len() != cells {
            return Err(Error::InvalidGrid(format!(
                "expected {cells} masses for resolution {resolution:?}, got {}",
                masses.len()
            )));
        }
        if masses.iter().any(|m| m.is_negative()) {
            return Err(Error::InvalidGrid("negative cell mass".into()));
        }
        let total: Rational = masses.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidGrid(format!(
                "total mass {total}, expected 1"
            )));
        }
        // Uniform margins: every axis-i slab must carry exactly 1/m_i.
        let st = strides(&resolution);
        for (axis, &m) in resolution.iter().enumerate() {
            let mut slab = vec![Rational::zero(); m];
            for_each_index(&resolution, |idx| {
                slab[idx[axis]] += &masses[flat_index(idx, &st)];
            });
            let want = Rational::new(num::BigInt::one(), num::BigInt::from(m));
            if let Some(k) = slab.iter().position(|s| *s != want) {
                return Err(Error::InvalidGrid(format!(
                    "axis {} slab {k} has mass {}, expected {want}",
                    axis + 1,
                    slab[k]
                )));
            }
        }
        let cumulative = build_cumulative(&resolution, &masses);
        Ok(Self {
            resolution,
            masses,
            cumulative,
        })
    }

    /// The independence copula on the given resolution: every cell carries
    /// the product of the axis cell widths.
    pub fn independence(resolution: &[usize]) -> Result<Self> {
        if resolution.contains(&0) {
            return Err(Error::InvalidGrid(
                "every axis needs at least one cell".into(),
            ));
        }
        let cells: usize = resolution.iter().product();
        let mass = Rational::new(num::BigInt::one(), num::BigInt::from(cells.max(1)));
        Self::new(resolution.to_vec(), vec![mass; cells])
    }

    /// Order-`m` checkerboard approximation of the comonotone copula: mass
    /// `1/m` in each main-diagonal cell. Converges to `M` uniformly.
    pub fn diagonal(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooSmall {
                op: "diagonal grid",
                min: 1,
                got: 0,
            });
        }
        if m == 0 {
            return Err(Error::InvalidGrid(
                "every axis needs at least one cell".into(),
            ));
        }
        let resolution = vec![m; n];
        let st = strides(&resolution);
        let mut masses = vec![Rational::zero(); m.pow(n as u32)];
        let cell_mass = Rational::new(num::BigInt::one(), num::BigInt::from(m));
        for k in 0..m {
            let idx = vec![k; n];
            masses[flat_index(&idx, &st)] = cell_mass.clone();
        }
        Self::new(resolution, masses)
    }

    /// Empirical checkerboard: one observation per row, mass `1/m` at the
    /// rank-vector cell of each observation. Ties within an axis are
    /// rejected rather than broken.
    pub fn from_ranks(samples: &[Vec<f64>]) -> Result<Self> {
        let m = samples.len();
        if m == 0 {
            return Err(Error::BadSample);
        }
        let n = samples[0].len();
        if n == 0 || samples.iter().any(|row| row.len() != n) {
            return Err(Error::BadSample);
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::BadSample);
        }
        let resolution = vec![m; n];
        let st = strides(&resolution);
        let mut cells = vec![vec![0usize; n]; m];
        for axis in 0..n {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| samples[a][axis].partial_cmp(&samples[b][axis]).unwrap());
            for w in order.windows(2) {
                if samples[w[0]][axis] == samples[w[1]][axis] {
                    return Err(Error::TiedSample { axis: axis + 1 });
                }
            }
            for (rank, &obs) in order.iter().enumerate() {
                cells[obs][axis] = rank;
            }
        }
        let mut masses = vec![Rational::zero(); m.pow(n as u32)];
        let obs_mass = Rational::new(num::BigInt::one(), num::BigInt::from(m));
        for cell in &cells {
            masses[flat_index(cell, &st)] += &obs_mass;
        }
        Self::new(resolution, masses)
    }

    pub(crate) fn scalar_unit() -> Self {
        Self::new(Vec::new(), vec![Rational::one()]).expect("0-copula is valid")
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn mass_at(&self, cell: &[usize]) -> &Rational {
        &self.masses[flat_index(cell, &strides(&self.resolution))]
    }

    /// Value of the distribution function at a grid vertex, i.e. the total
    /// mass of the lower-orthant block of cells.
    pub fn vertex(&self, v: &[usize]) -> &Rational {
        let shape: Vec<usize> = self.resolution.iter().map(|m| m + 1).collect();
        &self.cumulative[flat_index(v, &strides(&shape))]
    }

    /// Vertex value by precomputed flat offset into the `resolution + 1`
    /// shaped prefix-sum tensor.
    pub(crate) fn vertex_flat(&self, offset: usize) -> &Rational {
        &self.cumulative[offset]
    }

    /// Exact lower-orthant measure `C(x)`: multilinear interpolation of the
    /// prefix-sum tensor within the cell containing `x`.
    pub fn eval(&self, x: &Point) -> Result<Rational> {
        let n = self.dim();
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.dim(),
            });
        }
        let shape: Vec<usize> = self.resolution.iter().map(|m| m + 1).collect();
        let st = strides(&shape);
        let mut base = vec![0usize; n];
        let mut frac = Vec::with_capacity(n);
        for (i, xi) in x.coords().iter().enumerate() {
            let scaled = xi * int(self.resolution[i] as i64);
            let mut k = scaled.floor().to_integer();
            let max_cell = num::BigInt::from(self.resolution[i] - 1);
            if k > max_cell {
                k = max_cell;
            }
            let ku: usize = usize::try_from(&k).expect("cell index fits usize");
            base[i] = ku;
            frac.push(scaled - Rational::from_integer(k));
        }
        let mut acc = Rational::zero();
        let mut corner = vec![0usize; n];
        for bits in 0u64..(1u64 << n) {
            let mut weight = Rational::one();
            for (i, f) in frac.iter().enumerate() {
                let w = if bits >> i & 1 == 1 {
                    f.clone()
                } else {
                    Rational::one() - f
                };
                if w.is_zero() {
                    weight = Rational::zero();
                    break;
                }
                weight *= w;
            }
            if weight.is_zero() {
                continue;
            }
            for i in 0..n {
                corner[i] = base[i] + (bits >> i & 1) as usize;
            }
            acc += weight * &self.cumulative[flat_index(&corner, &st)];
        }
        Ok(acc)
    }

    /// Refines to a per-axis multiple of the current resolution by splitting
    /// each cell's mass evenly. The refined grid is the same copula.
    pub fn refine(&self, target: &[usize]) -> Result<Self> {
        if target.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: target.len(),
            });
        }
        let mut factors = Vec::with_capacity(self.dim());
        for (i, (&t, &m)) in target.iter().zip(&self.resolution).enumerate() {
            if t == 0 || !t.is_multiple_of(m) {
                return Err(Error::InvalidGrid(format!(
                    "axis {} cannot refine {m} cells into {t}",
                    i + 1
                )));
            }
            factors.push(t / m);
        }
        let split: usize = factors.iter().product();
        let scale = Rational::new(num::BigInt::one(), num::BigInt::from(split));
        let st = strides(&self.resolution);
        let mut masses = vec![Rational::zero(); target.iter().product()];
        let new_st = strides(target);
        for_each_index(target, |idx| {
            let coarse: Vec<usize> = idx.iter().zip(&factors).map(|(c, f)| c / f).collect();
            masses[flat_index(idx, &new_st)] = &self.masses[flat_index(&coarse, &st)] * &scale;
        });
        Self::new(target.to_vec(), masses)
    }

    /// Least common refinement resolution of two grids of equal dimension.
    pub fn common_resolution(a: &Self, b: &Self) -> Result<Vec<usize>> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                got: b.dim(),
            });
        }
        Ok(a.resolution
            .iter()
            .zip(&b.resolution)
            .map(|(&x, &y)| num::integer::lcm(x, y))
            .collect())
    }

    /// Sums out the pinned axes, keeping the remaining axes in order. This is
    /// the mass tensor of the proper copula of the corresponding extended
    /// marginal.
    pub fn marginalize(&self, pinned: &IndexSet) -> Result<Self> {
        if pinned.n() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: pinned.n(),
            });
        }
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !pinned.contains(*i)).collect();
        let new_res: Vec<usize> = keep.iter().map(|&i| self.resolution[i]).collect();
        let mut masses = vec![Rational::zero(); new_res.iter().product::<usize>().max(1)];
        let st = strides(&self.resolution);
        let new_st = strides(&new_res);
        for_each_index(&self.resolution, |idx| {
            let projected: Vec<usize> = keep.iter().map(|&i| idx[i]).collect();
            masses[flat_index(&projected, &new_st)] += &self.masses[flat_index(idx, &st)];
        });
        Self::new(new_res, masses)
    }

    /// Reverses cell order along one axis: the materialization of an
    /// elementary reflection acting on the grid measure.
    pub(crate) fn reverse_axis(&self, axis: usize) -> Result<Self> {
        let st = strides(&self.resolution);
        let mut masses = vec![Rational::zero(); self.masses.len()];
        for_each_index(&self.resolution, |idx| {
            let mut src = idx.to_vec();
            src[axis] = self.resolution[axis] - 1 - idx[axis];
            masses[flat_index(idx, &st)] = self.masses[flat_index(&src, &st)].clone();
        });
        Self::new(self.resolution.clone(), masses)
    }

    /// Materializes the permutation action `tau^*`: the new grid is
    /// `x -> C(tau(x))` where `tau(x) = (x_{images[0]}, ..)` (0-based).
    pub(crate) fn permute(&self, images: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut new_res = vec![0usize; n];
        for (i, &img) in images.iter().enumerate() {
            new_res[img] = self.resolution[i];
        }
        let st = strides(&self.resolution);
        let new_st = strides(&new_res);
        let mut masses = vec![Rational::zero(); self.masses.len()];
        for_each_index(&new_res, |idx| {
            let src: Vec<usize> = images.iter().map(|&img| idx[img]).collect();
            masses[flat_index(idx, &new_st)] = self.masses[flat_index(&src, &st)].clone();
        });
        Self::new(new_res, masses)
    }

    /// Prepends an independent uniform axis of resolution 1; the grid of the
    /// product extension `(x0, x) -> x0 * C(x)`.
    pub(crate) fn product_extend(&self) -> Self {
        let mut resolution = Vec::with_capacity(self.dim() + 1);
        resolution.push(1);
        resolution.extend_from_slice(&self.resolution);
        // Row-major layout with a leading size-1 axis is the same flat order.
        Self::new(resolution, self.masses.clone()).expect("extension preserves validity")
    }

    pub fn to_json_string(&self) -> String {
        let doc = GridJson {
            n: self.dim(),
            resolution: self.resolution.clone(),
            masses: self.masses.iter().map(|m| m.to_string()).collect(),
        };
        serde_json::to_string(&doc).expect("grid serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: GridJson = serde_json::from_str(s)?;
        if doc.resolution.len() != doc.n {
            return Err(Error::Parse(format!(
                "grid says n={} but lists {} axis resolutions",
                doc.n,
                doc.resolution.len()
            )));
        }
        let masses = doc
            .masses
            .iter()
            .map(|m| parse_rational(m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.resolution, masses)
    }
}

/// On-disk format: masses in row-major order (last axis fastest), rationals
/// as decimal-integer fraction strings.
#[derive(Serialize, Deserialize)]
struct GridJson {
    n: usize,
    resolution: Vec<usize>,
    masses: Vec<String>,
}

fn build_cumulative(resolution: &[usize], masses: &[Rational]) -> Vec<Rational> {
    let shape: Vec<usize> = resolution.iter().map(|m| m + 1).collect();
    let size: usize = shape.iter().product();
    let st = strides(&shape);
    let mass_st = strides(resolution);
    let mut cum = vec![Rational::zero(); size];
    for_each_index(resolution, |idx| {
        let shifted: Vec<usize> = idx.iter().map(|i| i + 1).collect();
        cum[flat_index(&shifted, &st)] = masses[flat_index(idx, &mass_st)].clone();
    });
    // Running sums along each axis turn cell masses into lower-orthant totals.
    for axis in 0..shape.len() {
        let mut buf = vec![Rational::zero(); size];
        std::mem::swap(&mut buf, &mut cum);
        for_each_index(&shape, |idx| {
            let here = flat_index(idx, &st);
            cum[here] = buf[here].clone();
            if idx[axis] > 0 {
                let prev = here - st[axis];
                let prior = cum[prev].clone();
                cum[here] += prior;
            }
        });
    }
    cum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(coords: &[Rational]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn independence_masses() {
        let g = MassGrid::independence(&[2, 2]).unwrap();
        assert!(g.masses().iter().all(|m| *m == rat(1, 4)));
        let g3 = MassGrid::independence(&[2, 2, 2]).unwrap();
        assert!(g3.masses().iter().all(|m| *m == rat(1, 8)));
    }

    #[test]
    fn independence_eval_is_product() {
        let g = MassGrid::independence(&[4, 4]).unwrap();
        let v = g.eval(&pt(&[rat(1, 4), rat(3, 4)])).unwrap();
        assert_eq!(v, rat(3, 16));
        let half = g.eval(&pt(&[rat(1, 2), rat(1, 2)])).unwrap();
        assert_eq!(half, rat(1, 4));
        // Interior of a cell exercises the interpolation path.
        let v = g.eval(&pt(&[rat(1, 3), rat(5, 7)])).unwrap();
        assert_eq!(v, rat(5, 21));
    }

    #[test]
    fn diagonal_grid_matches_min_at_vertices() {
        let m = 5;
        let g = MassGrid::diagonal(2, m).unwrap();
        for k in 0..=m {
            let v = g
                .eval(&pt(&[rat(k as i64, m as i64), rat(k as i64, m as i64)]))
                .unwrap();
            assert_eq!(v, rat(k as i64, m as i64));
        }
        // m = 1 degenerates to independence.
        assert_eq!(
            MassGrid::diagonal(2, 1).unwrap(),
            MassGrid::independence(&[1, 1]).unwrap()
        );
    }

    #[test]
    fn invalid_grids_rejected() {
        // Total mass below one.
        assert!(MassGrid::new(vec![2], vec![rat(1, 4), rat(1, 4)]).is_err());
        // Margins not uniform.
        assert!(
            MassGrid::new(vec![2, 2], vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)],).is_ok()
        );
        assert!(
            MassGrid::new(vec![2, 2], vec![rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)],).is_err()
        );
        // Negative mass.
        assert!(MassGrid::new(vec![1, 1], vec![rat(-1, 1)]).is_err());
    }

    #[test]
    fn from_ranks_examples() {
        let g = MassGrid::from_ranks(&[vec![1.0, 2.0], vec![2.0, 3.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(g, MassGrid::diagonal(2, 3).unwrap());

        let g = MassGrid::from_ranks(&[vec![1.0, 9.0], vec![2.0, 8.0]]).unwrap();
        assert_eq!(g.mass_at(&[0, 1]), &rat(1, 2));
        assert_eq!(g.mass_at(&[1, 0]), &rat(1, 2));
        assert_eq!(g.mass_at(&[0, 0]), &rat(0, 1));

        let g = MassGrid::from_ranks(&[vec![1.0, 1.0], vec![2.0, 3.0], vec![3.0, 2.0]]).unwrap();
        assert_eq!(g.mass_at(&[0, 0]), &rat(1, 3));
        assert_eq!(g.mass_at(&[1, 2]), &rat(1, 3));
        assert_eq!(g.mass_at(&[2, 1]), &rat(1, 3));

        assert!(matches!(
            MassGrid::from_ranks(&[vec![1.0, 5.0], vec![1.0, 7.0]]),
            Err(Error::TiedSample { axis: 1 })
        ));
        assert!(MassGrid::from_ranks(&[]).is_err());
    }

    #[test]
    fn refinement_preserves_the_function() {
        let g = MassGrid::diagonal(2, 2).unwrap();
        let r = g.refine(&[4, 6]).unwrap();
        for x in [pt(&[rat(1, 3), rat(4, 5)]), pt(&[rat(1, 2), rat(1, 2)])] {
            assert_eq!(g.eval(&x).unwrap(), r.eval(&x).unwrap());
        }
        assert!(g.refine(&[3, 2]).is_err());
    }

    #[test]
    fn marginalize_diagonal() {
        let g = MassGrid::diagonal(3, 4).unwrap();
        let pinned = IndexSet::new(3, [2]).unwrap();
        assert_eq!(
            g.marginalize(&pinned).unwrap(),
            MassGrid::diagonal(2, 4).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let g = MassGrid::from_ranks(&[vec![0.3, 1.0], vec![0.1, 2.0], vec![0.7, 0.5]]).unwrap();
        let s = g.to_json_string();
        let back = MassGrid::from_json_str(&s).unwrap();
        assert_eq!(g, back);
        assert_eq!(s, back.to_json_string());
        assert!(s.starts_with("{\"n\":2,\"resolution\":[3,3],\"masses\":["));
    }
}
