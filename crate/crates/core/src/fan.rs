//! Rational polyhedral fans: normal fans, containment and completeness.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::dd::extreme_rays;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{nullspace, rank, rref};
use crate::polytope::RationalPolytope;
use crate::rational::{dot, primitive_integer, to_rationals, Point, Rational};

/// Inequality description of a strongly convex cone: `equations · x = 0` and
/// `facets · x >= 0`.
#[derive(Debug, Clone)]
pub struct ConeHrep {
    pub dim: usize,
    pub equations: Vec<Point>,
    pub facets: Vec<Point>,
    /// Generator indices lying on each facet.
    pub incidence: Vec<Vec<usize>>,
}

impl ConeHrep {
    /// Computes the description of the cone spanned by `gens` in `Q^ambient`.
    pub fn of(gens: &[Point], ambient: usize) -> Result<Self> {
        let equations = nullspace(gens, ambient);
        if gens.is_empty() {
            return Ok(ConeHrep { dim: 0, equations, facets: Vec::new(), incidence: Vec::new() });
        }
        let (_, pivots) = rref(gens, ambient);
        let k = pivots.len();
        let chart: Vec<Point> = gens.iter().map(|g| pivots.iter().map(|&p| g[p].clone()).collect()).collect();
        let dual = extreme_rays(&chart, k);
        if rank(&dual, k) < k {
            return Err(Error::InvalidInput("cone is not strongly convex".into()));
        }
        let facets: Vec<Point> = dual
            .iter()
            .map(|a| {
                let mut n = vec![Rational::zero(); ambient];
                for (&p, ai) in pivots.iter().zip(a) {
                    n[p] = ai.clone();
                }
                n
            })
            .collect();
        let incidence = facets
            .iter()
            .map(|f| (0..gens.len()).filter(|&i| dot(f, &gens[i]).is_zero()).collect())
            .collect();
        Ok(ConeHrep { dim: k, equations, facets, incidence })
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|e| dot(e, x).is_zero())
            && self.facets.iter().all(|f| !dot(f, x).is_negative())
    }
}

/// A rational polyhedral fan. Every face of a stored cone is stored; the
/// origin cone is the empty ray set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    ambient_dim: usize,
    rays: Vec<Vec<BigInt>>,
    cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Builds a fan from ray generators and its maximal cones (lists of ray
    /// indices). Rays are made primitive; faces are generated.
    pub fn from_cones(ambient_dim: usize, rays: Vec<Point>, maximal: Vec<Vec<usize>>) -> Result<Self> {
        for r in &rays {
            check_dim(ambient_dim, r.len())?;
            if r.iter().all(Zero::is_zero) {
                return Err(Error::InvalidInput("zero ray generator".into()));
            }
        }
        let prim: Vec<Vec<BigInt>> = rays.iter().map(|r| primitive_integer(r)).collect();
        // Merge duplicate rays.
        let mut index: BTreeMap<Vec<BigInt>, usize> = BTreeMap::new();
        let mut unique: Vec<Vec<BigInt>> = Vec::new();
        let remap: Vec<usize> = prim
            .into_iter()
            .map(|r| {
                *index.entry(r.clone()).or_insert_with(|| {
                    unique.push(r);
                    unique.len() - 1
                })
            })
            .collect();
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        cones.insert(Vec::new());
        for cone in maximal {
            let mut ids: Vec<usize> = Vec::with_capacity(cone.len());
            for i in cone {
                let Some(&j) = remap.get(i) else {
                    return Err(Error::InvalidInput(format!("cone references unknown ray {i}")));
                };
                ids.push(j);
            }
            ids.sort_unstable();
            ids.dedup();
            let gens: Vec<Point> = ids.iter().map(|&i| to_rationals(&unique[i])).collect();
            let h = ConeHrep::of(&gens, ambient_dim)?;
            // Every generator must be extreme.
            for (gi, _) in gens.iter().enumerate() {
                let tight: Vec<Point> = h
                    .facets
                    .iter()
                    .zip(&h.incidence)
                    .filter(|(_, inc)| inc.contains(&gi))
                    .map(|(f, _)| f.clone())
                    .collect();
                let mut rows = tight;
                rows.extend(h.equations.iter().cloned());
                if rank(&rows, ambient_dim) + 1 != ambient_dim {
                    return Err(Error::InvalidInput("cone generator is not an extreme ray".into()));
                }
            }
            for face in cone_faces(&h, ids.len()) {
                cones.insert(face.iter().map(|&k| ids[k]).collect());
            }
        }
        Ok(Fan { ambient_dim, rays: unique, cones: cones.into_iter().collect() })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> Point {
        to_rationals(&self.rays[i])
    }

    pub fn ray_index(&self, r: &[Rational]) -> Option<usize> {
        let p = primitive_integer(r);
        self.rays.iter().position(|x| *x == p)
    }

    /// All cones, each a sorted list of ray indices.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone_dim(&self, cone: &[usize]) -> usize {
        let gens: Vec<Point> = cone.iter().map(|&i| self.ray(i)).collect();
        rank(&gens, self.ambient_dim)
    }

    /// Cones not properly contained in another cone.
    pub fn maximal_cones(&self) -> Vec<Vec<usize>> {
        self.cones
            .iter()
            .filter(|c| {
                !self
                    .cones
                    .iter()
                    .any(|d| d.len() > c.len() && c.iter().all(|i| d.contains(i)))
            })
            .cloned()
            .collect()
    }

    pub fn contains_cone(&self, rays: &[usize]) -> bool {
        let mut r = rays.to_vec();
        r.sort_unstable();
        r.dedup();
        self.cones.binary_search(&r).is_ok()
    }

    /// Pure of full dimension with every wall shared by exactly two maximal
    /// cones.
    pub fn is_complete(&self) -> bool {
        let n = self.ambient_dim;
        if n == 0 {
            return true;
        }
        let maximal = self.maximal_cones();
        if maximal.is_empty() || maximal.iter().any(|c| self.cone_dim(c) != n) {
            return false;
        }
        self.cones
            .iter()
            .filter(|c| self.cone_dim(c) == n - 1)
            .all(|w| {
                maximal
                    .iter()
                    .filter(|m| w.iter().all(|i| m.contains(i)))
                    .count()
                    == 2
            })
    }

    pub fn cone_hrep(&self, cone: &[usize]) -> ConeHrep {
        let gens: Vec<Point> = cone.iter().map(|&i| self.ray(i)).collect();
        ConeHrep::of(&gens, self.ambient_dim).expect("stored cones are strongly convex")
    }
}

fn cone_faces(h: &ConeHrep, ngens: usize) -> Vec<Vec<usize>> {
    let full: Vec<usize> = (0..ngens).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(full.clone());
    seen.insert(Vec::new());
    let mut queue = vec![full];
    while let Some(face) = queue.pop() {
        for inc in &h.incidence {
            let g: Vec<usize> = face.iter().copied().filter(|i| inc.contains(i)).collect();
            if g.len() < face.len() && seen.insert(g.clone()) {
                queue.push(g);
            }
        }
    }
    seen.into_iter().collect()
}

/// Normal fan of a full-dimensional polytope with the face each cone is dual
/// to.
#[derive(Debug, Clone)]
pub struct NormalFan {
    pub fan: Fan,
    /// For each cone of `fan` (same order), the vertex indices of its dual face.
    pub dual_faces: Vec<Vec<usize>>,
}

pub fn normal_fan(p: &RationalPolytope) -> Result<NormalFan> {
    if !p.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let rays: Vec<Point> = p.facets().iter().map(|h| h.normal.clone()).collect();
    let mut by_cone: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut maximal = Vec::new();
    for face in p.face_sets() {
        let cone: Vec<usize> = (0..p.facets().len())
            .filter(|&f| face.iter().all(|v| p.incidence()[f].contains(v)))
            .collect();
        if face.len() == 1 {
            maximal.push(cone.clone());
        }
        by_cone.insert(cone, face);
    }
    let fan = Fan::from_cones(p.ambient_dim(), rays.clone(), maximal)?;
    // Fan ray indices coincide with facet indices (facet normals are distinct
    // primitive vectors).
    debug_assert!(rays.iter().enumerate().all(|(i, r)| fan.ray_index(r) == Some(i)));
    let dual_faces = fan
        .cones()
        .iter()
        .map(|c| by_cone.get(c).cloned().unwrap_or_default())
        .collect();
    Ok(NormalFan { fan, dual_faces })
}

/// True iff every cone of `fine` lies in some cone of `coarse`.
pub fn fan_coarsens(coarse: &Fan, fine: &Fan) -> Result<bool> {
    check_dim(coarse.ambient_dim(), fine.ambient_dim())?;
    let reps: Vec<ConeHrep> = coarse.maximal_cones().iter().map(|c| coarse.cone_hrep(c)).collect();
    Ok(fine.maximal_cones().iter().all(|cone| {
        let gens: Vec<Point> = cone.iter().map(|&i| fine.ray(i)).collect();
        reps.iter().any(|h| gens.iter().all(|g| h.contains(g)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{point, rat};

    #[test]
    fn normal_fan_of_interval() {
        let nf = normal_fan(&RationalPolytope::interval(rat(0), rat(1))).unwrap();
        assert_eq!(nf.fan.rays().len(), 2);
        assert_eq!(nf.fan.cones().len(), 3);
        assert!(nf.fan.is_complete());
    }

    #[test]
    fn normal_fan_of_square_has_quadrants() {
        let nf = normal_fan(&RationalPolytope::cube(2)).unwrap();
        let max = nf.fan.maximal_cones();
        assert_eq!(max.len(), 4);
        for c in &max {
            assert_eq!(c.len(), 2);
            // each quadrant is dual to a single vertex
            let idx = nf.fan.cones().iter().position(|d| d == c).unwrap();
            assert_eq!(nf.dual_faces[idx].len(), 1);
        }
    }

    #[test]
    fn normal_fan_of_triangle() {
        let tri = RationalPolytope::from_vertices(vec![point(&[-1, -1]), point(&[2, -1]), point(&[-1, 2])]).unwrap();
        let nf = normal_fan(&tri).unwrap();
        let mut rays: Vec<Point> = (0..3).map(|i| nf.fan.ray(i)).collect();
        rays.sort();
        assert_eq!(rays, vec![point(&[-1, 0]), point(&[0, -1]), point(&[1, 1])]);
        assert_eq!(nf.fan.maximal_cones().len(), 3);
    }

    #[test]
    fn coarsening() {
        let sq = RationalPolytope::cube(2);
        let hex = sq
            .minkowski_sum(&RationalPolytope::from_vertices(vec![point(&[0, 0]), point(&[1, 1])]).unwrap())
            .unwrap();
        let fs = normal_fan(&sq).unwrap().fan;
        let fh = normal_fan(&hex).unwrap().fan;
        assert!(fan_coarsens(&fs, &fs).unwrap());
        assert!(fan_coarsens(&fs, &fh).unwrap());
        assert!(!fan_coarsens(&fh, &fs).unwrap());
        // rotated fan with rays (1,1),(-1,1),(-1,-1),(1,-1)
        let rot = RationalPolytope::from_vertices(vec![point(&[1, 0]), point(&[0, 1]), point(&[-1, 0]), point(&[0, -1])]).unwrap();
        let fr = normal_fan(&rot).unwrap().fan;
        assert!(!fan_coarsens(&fs, &fr).unwrap());
    }

    #[test]
    fn incomplete_fan_detected() {
        let f = Fan::from_cones(2, vec![point(&[1, 0]), point(&[0, 1])], vec![vec![0, 1]]).unwrap();
        assert!(!f.is_complete());
        assert_eq!(f.cones().len(), 4);
        assert!(normal_fan(&RationalPolytope::point(point(&[0, 0]))).is_err());
    }
}
