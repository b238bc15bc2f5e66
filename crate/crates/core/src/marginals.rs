//! Extended marginals `C_S` (coordinates in `S` pinned to 1), their active
//! and inactive sets, proper copulas with the order-preserving proper
//! permutation, and the concordance order on checkerboard copulas.

use crate::copula::{Copula, Point, ReflectedM};
use crate::grid::MassGrid;
use crate::index_set::IndexSet;
use crate::rational::Rational;
use crate::symmetry::{apply, Symmetry};
use crate::{Error, Result};

/// `C_S`: the function `x -> C(x_S)`, kept as the base copula plus the
/// pinned set. Same domain dimension as the base.
#[derive(Clone, Debug)]
pub struct ExtendedMarginal {
    base: Copula,
    pinned: IndexSet,
}

/// Pins the coordinates in `s` to 1.
pub fn pin(c: &Copula, s: &IndexSet) -> Result<ExtendedMarginal> {
    ExtendedMarginal::new(c.clone(), s.clone())
}

impl ExtendedMarginal {
    pub fn new(base: Copula, pinned: IndexSet) -> Result<Self> {
        if pinned.n() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: pinned.n(),
            });
        }
        Ok(Self { base, pinned })
    }

    pub fn base(&self) -> &Copula {
        &self.base
    }

    pub fn pinned(&self) -> &IndexSet {
        &self.pinned
    }

    pub fn eval(&self, x: &Point) -> Result<Rational> {
        self.base.eval(&x.pinned(&self.pinned))
    }

    /// Pinning is union-compositional: `(C_S)_T = C_{S + T}`.
    pub fn pin_more(&self, t: &IndexSet) -> Result<Self> {
        Self::new(self.base.clone(), self.pinned.union(t))
    }

    /// The maximal set `S` with `f = f_S`. The pinned axes qualify by
    /// construction; a remaining axis qualifies only if the proper copula's
    /// distribution function is constant along it, which the uniform-margin
    /// invariant rules out for genuine copulas — the check is still run so
    /// the definition, not the shortcut, is what answers.
    pub fn inactive_set(&self) -> Result<IndexSet> {
        let mut members: Vec<usize> = self.pinned.iter().collect();
        if let Some(grid) = self.base.to_grid() {
            let proper = grid.marginalize(&self.pinned)?;
            let active: Vec<usize> = self.pinned.complement().iter().collect();
            for (pos, &axis) in active.iter().enumerate() {
                if grid_axis_inactive(&proper, pos) {
                    members.push(axis);
                }
            }
        }
        IndexSet::new(self.base.dim(), members)
    }

    pub fn active_set(&self) -> Result<IndexSet> {
        Ok(self.inactive_set()?.complement())
    }

    pub fn proper(&self) -> Result<ProperCopula> {
        let copula = proper_of(&self.base, &self.pinned)?;
        let active = self.pinned.complement();
        let images: Vec<usize> = active.iter().chain(self.pinned.iter()).collect();
        Ok(ProperCopula {
            copula,
            perm: Symmetry::permutation(images)?,
        })
    }
}

/// The genuine `(n-s)`-copula inside an extended marginal, together with the
/// proper permutation `tau`: `C_S = (A (x) 1^s) . tau` and `tau'^{-1}` is
/// order preserving on the active set.
#[derive(Clone, Debug)]
pub struct ProperCopula {
    pub copula: Copula,
    pub perm: Symmetry,
}

/// Extracts the proper copula of `C` pinned at `pinned`, keeping closed
/// forms closed: grids marginalize, reflected-M relabels its flip set,
/// mixtures and product extensions distribute. Pinning everything yields the
/// 0-copula (the constant 1); pinning all but one axis yields the 1-copula.
pub fn proper_of(c: &Copula, pinned: &IndexSet) -> Result<Copula> {
    let n = c.dim();
    if pinned.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pinned.n(),
        });
    }
    if pinned.is_empty() {
        return Ok(c.clone());
    }
    match c {
        Copula::Grid(g) => Ok(Copula::Grid(g.marginalize(pinned)?)),
        Copula::ReflectedM(r) => {
            let active = pinned.complement();
            let d = active.card();
            if d == 0 {
                return Ok(Copula::Grid(MassGrid::scalar_unit()));
            }
            if d == 1 {
                return Ok(Copula::Grid(MassGrid::independence(&[1])?));
            }
            // The subvector keeps comonotone structure; flips survive under
            // the order-preserving relabeling of the active axes.
            let flips = IndexSet::new(d, r.flipped().iter().filter_map(|i| active.position_of(i)))?;
            Ok(Copula::ReflectedM(ReflectedM::new(d, flips)?))
        }
        Copula::Mixture { weights, parts } => {
            let parts = parts
                .iter()
                .map(|p| proper_of(p, pinned))
                .collect::<Result<Vec<_>>>()?;
            Copula::mixture(weights.clone(), parts)
        }
        Copula::ProductExtension(inner) => {
            let shifted =
                IndexSet::new(inner.dim(), pinned.iter().filter(|&i| i > 0).map(|i| i - 1))?;
            let inner_proper = proper_of(inner, &shifted)?;
            if pinned.contains(0) {
                Ok(inner_proper)
            } else {
                Ok(Copula::product_extension(inner_proper))
            }
        }
    }
}

/// True when the distribution function is constant along `axis`, i.e. the
/// grid equals its own pin there.
fn grid_axis_inactive(g: &MassGrid, axis: usize) -> bool {
    if g.dim() == 0 {
        return false;
    }
    let mut shape: Vec<usize> = g.resolution().iter().map(|m| m + 1).collect();
    shape[axis] = g.resolution()[axis];
    let mut inactive = true;
    crate::grid::for_each_index(&shape, |idx| {
        if inactive {
            let mut next = idx.to_vec();
            next[axis] += 1;
            if g.vertex(idx) != g.vertex(&next) {
                inactive = false;
            }
        }
    });
    inactive
}

/// The concordance order: `A <= B` and `sigma^*(A) <= sigma^*(B)` with
/// `sigma` the full reflection. Decided exactly on the common grid
/// refinement; vertex dominance suffices because both sides are multilinear
/// on every common cell.
pub fn concordance_leq(a: &Copula, b: &Copula) -> Result<bool> {
    let (ga, gb) = match (a.to_grid(), b.to_grid()) {
        (Some(ga), Some(gb)) => (ga, gb),
        _ => {
            return Err(Error::Unsupported {
                op: "concordance order",
            })
        }
    };
    if ga.dim() != gb.dim() {
        return Err(Error::DimensionMismatch {
            expected: ga.dim(),
            got: gb.dim(),
        });
    }
    let target = MassGrid::common_resolution(&ga, &gb)?;
    let ra = ga.refine(&target)?;
    let rb = gb.refine(&target)?;
    if !vertex_dominated(&ra, &rb) {
        return Ok(false);
    }
    let sigma = Symmetry::reflection(IndexSet::full(ra.dim()));
    let sa = apply(&sigma, &Copula::Grid(ra))?;
    let sb = apply(&sigma, &Copula::Grid(rb))?;
    match (sa, sb) {
        (Copula::Grid(sa), Copula::Grid(sb)) => Ok(vertex_dominated(&sa, &sb)),
        _ => unreachable!("reflection of a grid is a grid"),
    }
}

fn vertex_dominated(a: &MassGrid, b: &MassGrid) -> bool {
    let shape: Vec<usize> = a.resolution().iter().map(|m| m + 1).collect();
    let mut ok = true;
    crate::grid::for_each_index(&shape, |idx| {
        if ok && a.vertex(idx) > b.vertex(idx) {
            ok = false;
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(coords: &[Rational]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn pin_empty_is_identity() {
        let c = Copula::Grid(MassGrid::diagonal(2, 3).unwrap());
        let e = pin(&c, &IndexSet::empty(2)).unwrap();
        let x = pt(&[rat(1, 3), rat(2, 3)]);
        assert_eq!(e.eval(&x).unwrap(), c.eval(&x).unwrap());
    }

    #[test]
    fn pin_examples() {
        let pi3 = Copula::Grid(MassGrid::independence(&[2, 2, 2]).unwrap());
        let e = pin(&pi3, &IndexSet::from_one_based(3, [2]).unwrap()).unwrap();
        let x = pt(&[rat(1, 2), rat(1, 3), rat(1, 4)]);
        assert_eq!(e.eval(&x).unwrap(), rat(1, 8));

        let diag = Copula::Grid(MassGrid::diagonal(3, 2).unwrap());
        let e = pin(&diag, &IndexSet::from_one_based(3, [1]).unwrap()).unwrap();
        let x = pt(&[rat(1, 1), rat(1, 2), rat(1, 2)]);
        assert_eq!(e.eval(&x).unwrap(), rat(1, 2));
    }

    #[test]
    fn pinning_is_union_compositional() {
        let c = Copula::Grid(MassGrid::independence(&[2, 3, 2, 2]).unwrap());
        let s = IndexSet::new(4, [1]).unwrap();
        let t = IndexSet::new(4, [3, 1]).unwrap();
        let once = pin(&c, &s.union(&t)).unwrap();
        let twice = pin(&c, &s).unwrap().pin_more(&t).unwrap();
        assert_eq!(once.pinned(), twice.pinned());
        let x = pt(&[rat(1, 5), rat(1, 2), rat(2, 3), rat(3, 4)]);
        assert_eq!(once.eval(&x).unwrap(), twice.eval(&x).unwrap());
    }

    #[test]
    fn proper_copula_examples() {
        // Independence marginals are independence.
        let pi3 = Copula::Grid(MassGrid::independence(&[2, 2, 2]).unwrap());
        let p = pin(&pi3, &IndexSet::from_one_based(3, [2]).unwrap())
            .unwrap()
            .proper()
            .unwrap();
        assert_eq!(
            p.copula.as_grid().unwrap(),
            &MassGrid::independence(&[2, 2]).unwrap()
        );

        // Diagonal marginals are diagonal.
        let diag = Copula::Grid(MassGrid::diagonal(3, 4).unwrap());
        let p = pin(&diag, &IndexSet::from_one_based(3, [3]).unwrap())
            .unwrap()
            .proper()
            .unwrap();
        assert_eq!(
            p.copula.as_grid().unwrap(),
            &MassGrid::diagonal(2, 4).unwrap()
        );

        // 5-dimensional case: the proper permutation sends the active axes
        // {2,3,5} to the first three slots order-preservingly.
        let c5 = Copula::Grid(MassGrid::independence(&[1, 2, 1, 2, 1]).unwrap());
        let p = pin(&c5, &IndexSet::from_one_based(5, [1, 4]).unwrap())
            .unwrap()
            .proper()
            .unwrap();
        assert_eq!(p.copula.dim(), 3);
        assert_eq!(p.perm.perm(), &[1, 2, 4, 0, 3]);
        let active = IndexSet::from_one_based(5, [2, 3, 5]).unwrap();
        assert_eq!(p.perm.perm_preimage(&active).members(), &[0, 1, 2]);
    }

    #[test]
    fn degenerate_marginals() {
        let c = Copula::Grid(MassGrid::diagonal(3, 2).unwrap());
        // Pin all but one axis: the unique 1-copula.
        let one = proper_of(&c, &IndexSet::new(3, [0, 2]).unwrap()).unwrap();
        assert_eq!(one.dim(), 1);
        assert_eq!(one.eval(&pt(&[rat(2, 5)])).unwrap(), rat(2, 5));
        // Pin everything: the constant 1.
        let zero = proper_of(&c, &IndexSet::full(3)).unwrap();
        assert_eq!(zero.dim(), 0);
        assert_eq!(zero.eval(&Point::ones(0)).unwrap(), rat(1, 1));
    }

    #[test]
    fn proper_of_reflected_m_relabels_flips() {
        let r = Copula::ReflectedM(
            ReflectedM::new(4, IndexSet::from_one_based(4, [1, 2]).unwrap()).unwrap(),
        );
        let p = proper_of(&r, &IndexSet::from_one_based(4, [1]).unwrap()).unwrap();
        match p {
            Copula::ReflectedM(rm) => {
                assert_eq!(rm.n(), 3);
                assert_eq!(rm.flipped().members(), &[0]);
            }
            other => panic!("expected reflected M, got {other:?}"),
        }
    }

    #[test]
    fn reconstruction_identity_at_sample_points() {
        // C_S = (A (x) 1^s) . tau pointwise.
        let c = Copula::Grid(
            MassGrid::from_ranks(&[
                vec![0.1, 0.7, 0.3],
                vec![0.5, 0.2, 0.9],
                vec![0.9, 0.4, 0.1],
            ])
            .unwrap(),
        );
        let s = IndexSet::from_one_based(3, [2]).unwrap();
        let e = pin(&c, &s).unwrap();
        let p = e.proper().unwrap();
        for x in [
            pt(&[rat(1, 3), rat(1, 2), rat(2, 3)]),
            pt(&[rat(1, 7), rat(6, 7), rat(3, 5)]),
        ] {
            let tau_x = p.perm.map_point(&x).unwrap();
            let a_val = p
                .copula
                .eval(&Point::new(tau_x.coords()[..2].to_vec()).unwrap())
                .unwrap();
            assert_eq!(e.eval(&x).unwrap(), a_val);
        }
    }

    #[test]
    fn inactive_set_is_the_pinned_set() {
        let c = Copula::Grid(MassGrid::independence(&[2, 2, 2, 2, 2]).unwrap());
        let s = IndexSet::from_one_based(5, [3, 4, 5]).unwrap();
        let e = pin(&c, &s).unwrap();
        assert_eq!(e.inactive_set().unwrap(), s);
        assert_eq!(e.active_set().unwrap().one_based(), vec![1, 2]);

        let pi2 = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        let e = pin(&pi2, &IndexSet::empty(2)).unwrap();
        assert_eq!(e.active_set().unwrap(), IndexSet::full(2));

        let e = pin(&c, &IndexSet::from_one_based(5, [1, 4]).unwrap()).unwrap();
        let inactive = e.inactive_set().unwrap();
        assert!(inactive.contains(0) && inactive.contains(3));
    }

    #[test]
    fn concordance_order_examples() {
        let c = Copula::Grid(MassGrid::from_ranks(&[vec![1., 2.], vec![2., 1.]]).unwrap());
        assert!(concordance_leq(&c, &c).unwrap());

        for m in [2usize, 3] {
            let pi = Copula::Grid(MassGrid::independence(&[m, m]).unwrap());
            let diag = Copula::Grid(MassGrid::diagonal(2, m).unwrap());
            assert!(concordance_leq(&pi, &diag).unwrap());
            assert!(!concordance_leq(&diag, &pi).unwrap());
        }

        // A < (A + B)/2 < B whenever A < B.
        let a = Copula::Grid(MassGrid::independence(&[2, 2]).unwrap());
        let b = Copula::Grid(MassGrid::diagonal(2, 2).unwrap());
        let mid = Copula::mixture(vec![rat(1, 2), rat(1, 2)], vec![a.clone(), b.clone()]).unwrap();
        assert!(concordance_leq(&a, &mid).unwrap());
        assert!(concordance_leq(&mid, &b).unwrap());

        let m = Copula::ReflectedM(ReflectedM::comonotone(2).unwrap());
        assert!(concordance_leq(&a, &m).is_err());
    }
}
