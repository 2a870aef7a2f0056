//! Graded vector spaces over exact rationals, linear maps, graded
//! commutators and exact rank/kernel computation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grading::{Degree, GradingGroup};
use crate::multilinear::MultiMap;
use crate::scalar::{rat, Rat};

/// A finite-dimensional space with a degree-labelled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    group: GradingGroup,
    degrees: Vec<Degree>,
    labels: Option<Vec<String>>,
}

impl GradedSpace {
    pub fn new(group: GradingGroup, degrees: Vec<Degree>) -> Result<Arc<Self>> {
        for (i, d) in degrees.iter().enumerate() {
            if d.rank() != group.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "basis degree {i} has rank {}, group rank {}",
                    d.rank(),
                    group.rank()
                )));
            }
        }
        Ok(Arc::new(GradedSpace {
            group,
            degrees,
            labels: None,
        }))
    }

    /// Ungraded space of the given dimension (trivial grading group).
    pub fn ungraded(dim: usize) -> Arc<Self> {
        Arc::new(GradedSpace {
            group: GradingGroup::trivial(),
            degrees: vec![Degree::zero(0); dim],
            labels: None,
        })
    }

    pub fn with_labels(
        group: GradingGroup,
        degrees: Vec<Degree>,
        labels: Vec<String>,
    ) -> Result<Arc<Self>> {
        if labels.len() != degrees.len() {
            return Err(Error::DimensionMismatch(
                "label count differs from dimension".into(),
            ));
        }
        let mut s = Arc::try_unwrap(Self::new(group, degrees)?).unwrap();
        s.labels = Some(labels);
        Ok(Arc::new(s))
    }

    pub fn group(&self) -> &GradingGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> &Degree {
        &self.degrees[i]
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) => ls[i].clone(),
            None => format!("e{i}"),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn degree_sum(&self, tuple: &[usize]) -> Degree {
        Degree::sum(self.group.rank(), tuple.iter().map(|&i| &self.degrees[i]))
    }

    pub fn tuple_degrees(&self, tuple: &[usize]) -> Vec<Degree> {
        tuple.iter().map(|&i| self.degrees[i].clone()).collect()
    }

    pub fn zero_vector(&self) -> Vector {
        Vector::zero(self.dim())
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zero(self.dim());
        v.coeffs[i] = rat(1);
        v
    }
}

/// Coefficients of a vector in the basis of some space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub coeffs: Vec<Rat>,
}

impl Vector {
    pub fn zero(dim: usize) -> Self {
        Vector {
            coeffs: vec![Rat::zero(); dim],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        Vector { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Vector {
        Vector {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Vector, c: &Rat) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * c;
        }
    }

    /// Splits into homogeneous components, sorted by degree.
    pub fn homogeneous_components(&self, space: &GradedSpace) -> Vec<(Degree, Vector)> {
        let mut map: std::collections::BTreeMap<Degree, Vector> = Default::default();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let entry = map
                    .entry(space.degree(i).clone())
                    .or_insert_with(|| Vector::zero(self.dim()));
                entry.coeffs[i] = c.clone();
            }
        }
        map.into_iter().collect()
    }

    /// True when every nonzero coefficient sits on a basis element of `deg`.
    pub fn is_homogeneous_of(&self, space: &GradedSpace, deg: &Degree) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.is_zero() || space.degree(i) == deg)
    }
}

/// An exact-rational linear map with an optional declared degree.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub domain: Arc<GradedSpace>,
    pub codomain: Arc<GradedSpace>,
    /// `matrix[r][c]`: image of basis vector `c` has coefficient on row `r`.
    pub matrix: Vec<Vec<Rat>>,
    pub degree: Option<Degree>,
}

impl LinearMap {
    pub fn zero(domain: Arc<GradedSpace>, codomain: Arc<GradedSpace>) -> Self {
        let matrix = vec![vec![Rat::zero(); domain.dim()]; codomain.dim()];
        LinearMap {
            domain,
            codomain,
            matrix,
            degree: None,
        }
    }

    pub fn identity(space: Arc<GradedSpace>) -> Self {
        let n = space.dim();
        let mut m = Self::zero(space.clone(), space);
        for i in 0..n {
            m.matrix[i][i] = rat(1);
        }
        m.degree = Some(Degree::zero(m.domain.group().rank()));
        m
    }

    pub fn from_columns(
        domain: Arc<GradedSpace>,
        codomain: Arc<GradedSpace>,
        columns: Vec<Vector>,
    ) -> Result<Self> {
        if columns.len() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for domain dimension {}",
                columns.len(),
                domain.dim()
            )));
        }
        let mut m = Self::zero(domain, codomain);
        for (c, col) in columns.iter().enumerate() {
            if col.dim() != m.codomain.dim() {
                return Err(Error::DimensionMismatch(
                    "column length differs from codomain dimension".into(),
                ));
            }
            for r in 0..col.dim() {
                m.matrix[r][c] = col.coeffs[r].clone();
            }
        }
        Ok(m)
    }

    pub fn with_degree(mut self, degree: Degree) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn column(&self, c: usize) -> Vector {
        Vector::from_coeffs(self.matrix.iter().map(|row| row[c].clone()).collect())
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        debug_assert_eq!(v.dim(), self.domain.dim());
        let mut out = Vector::zero(self.codomain.dim());
        for (c, coeff) in v.coeffs.iter().enumerate() {
            if !coeff.is_zero() {
                for r in 0..self.codomain.dim() {
                    if !self.matrix[r][c].is_zero() {
                        out.coeffs[r] += &self.matrix[r][c] * coeff;
                    }
                }
            }
        }
        out
    }

    /// `self` after `other`: `(self o other)(v) = self(other(v))`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if other.codomain != self.domain {
            return Err(Error::SpaceMismatch);
        }
        let mut out = LinearMap::zero(other.domain.clone(), self.codomain.clone());
        for c in 0..other.domain.dim() {
            let img = self.apply(&other.column(c));
            for r in 0..self.codomain.dim() {
                out.matrix[r][c] = img.coeffs[r].clone();
            }
        }
        out.degree = match (&self.degree, &other.degree) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        Ok(out)
    }

    pub fn add(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for r in 0..out.matrix.len() {
            for c in 0..out.matrix[r].len() {
                out.matrix[r][c] = &self.matrix[r][c] + &other.matrix[r][c];
            }
        }
        out.degree = if self.degree == other.degree {
            self.degree.clone()
        } else {
            None
        };
        Ok(out)
    }

    pub fn sub(&self, other: &LinearMap) -> Result<LinearMap> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rat) -> LinearMap {
        let mut out = self.clone();
        for row in &mut out.matrix {
            for v in row {
                *v = &*v * c;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|c| c.is_zero())
    }

    /// Checks column by column that the map sends `V^x` into `V^{x+degree}`.
    pub fn validate_degree(&self) -> Result<()> {
        let delta = self.degree.as_ref().ok_or(Error::MissingDegree)?;
        for c in 0..self.domain.dim() {
            let want = self.domain.degree(c).add(delta);
            for r in 0..self.codomain.dim() {
                if !self.matrix[r][c].is_zero() && *self.codomain.degree(r) != want {
                    return Err(Error::Homogeneity(format!(
                        "column {c} hits basis element {r} of degree {:?}, expected {:?}",
                        self.codomain.degree(r),
                        want
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `[D1,D2] = D1 o D2 - (-1)^{<d1,d2>} D2 o D1` for endomorphisms with
/// declared degrees.
pub fn graded_commutator(d1: &LinearMap, d2: &LinearMap) -> Result<LinearMap> {
    if d1.domain != d1.codomain || d2.domain != d2.codomain || d1.domain != d2.domain {
        return Err(Error::SpaceMismatch);
    }
    let delta1 = d1.degree.as_ref().ok_or(Error::MissingDegree)?;
    let delta2 = d2.degree.as_ref().ok_or(Error::MissingDegree)?;
    let p = d1.domain.group().pairing(delta1, delta2)?;
    let ab = d1.compose(d2)?;
    let ba = d2.compose(d1)?;
    let mut out = if p == 0 { ab.sub(&ba)? } else { ab.add(&ba)? };
    out.degree = Some(delta1.add(delta2));
    Ok(out)
}

/// Defect of the graded Leibniz rule
/// `D(mu(X,Y)) - mu(DX,Y) - (-1)^{<delta,x>} mu(X,DY)` on all basis pairs.
#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub defects: Vec<((usize, usize), Vector)>,
}

impl DerivationReport {
    pub fn is_derivation(&self) -> bool {
        self.defects.is_empty()
    }
}

pub fn derivation_defect(d: &LinearMap, mu: &MultiMap) -> Result<DerivationReport> {
    if mu.arity() != 2 {
        return Err(Error::InvalidArity(format!(
            "derivation check needs a binary map, got arity {}",
            mu.arity()
        )));
    }
    if d.domain != d.codomain || d.domain != *mu.space() {
        return Err(Error::SpaceMismatch);
    }
    let delta = d.degree.as_ref().ok_or(Error::MissingDegree)?;
    let space = mu.space();
    let mut defects = Vec::new();
    for i in 0..space.dim() {
        let p = space.group().pairing(delta, space.degree(i))?;
        for j in 0..space.dim() {
            let lhs = d.apply(&mu.eval_basis(&[i, j]));
            let t1 = mu.eval(&[&d.column(i), &space.basis_vector(j)])?;
            let t2 = mu.eval(&[&space.basis_vector(i), &d.column(j)])?;
            let mut defect = lhs.sub(&t1);
            if p == 0 {
                defect = defect.sub(&t2);
            } else {
                defect = defect.add(&t2);
            }
            if !defect.is_zero() {
                defects.push(((i, j), defect));
            }
        }
    }
    Ok(DerivationReport { defects })
}

fn clear_denominators(row: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in row {
        if !v.is_zero() {
            let d = v.denom();
            let g = num_integer_gcd(&lcm, d);
            lcm = &lcm / g * d;
        }
    }
    row.iter()
        .map(|v| {
            if v.is_zero() {
                BigInt::zero()
            } else {
                v.numer() * (&lcm / v.denom())
            }
        })
        .collect()
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    if a.is_zero() {
        BigInt::one()
    } else {
        a
    }
}

/// Exact rank and kernel basis by fraction-free (Bareiss) elimination with
/// leftmost-nonzero pivoting. `rank + kernel.len() == domain dimension`.
pub fn rank_and_kernel(f: &LinearMap) -> (usize, Vec<Vector>) {
    let rows = f.codomain.dim();
    let cols = f.domain.dim();
    let mut m: Vec<Vec<BigInt>> = f.matrix.iter().map(|r| clear_denominators(r)).collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        // leftmost column, first nonzero row at or below r
        let pick = (r..rows).find(|&i| !m[i][c].is_zero());
        let Some(p) = pick else { continue };
        m.swap(r, p);
        for i in 0..rows {
            if i != r {
                for j in 0..cols {
                    if j != c {
                        let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                        m[i][j] = num / &prev;
                    }
                }
                m[i][c] = BigInt::zero();
            }
        }
        prev = m[r][c].clone();
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let rank = pivot_cols.len();
    // kernel basis from the (diagonalized) echelon form: for each free column,
    // solve on the pivot columns
    let mut kernel = Vec::new();
    let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = Vector::zero(cols);
        v.coeffs[free] = rat(1);
        for (row, &pc) in pivot_cols.iter().enumerate() {
            // m[row][pc] * x_pc + m[row][free] = 0
            let num = Rat::from_integer(-m[row][free].clone());
            let den = Rat::from_integer(m[row][pc].clone());
            v.coeffs[pc] = num / den;
        }
        kernel.push(v);
    }
    (rank, kernel)
}

/// One exact solution of `f(x) = b`, if any, by Gauss-Jordan on the
/// augmented system.
pub fn solve(f: &LinearMap, b: &Vector) -> Option<Vector> {
    let rows = f.codomain.dim();
    let cols = f.domain.dim();
    if b.dim() != rows {
        return None;
    }
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row = f.matrix[r].clone();
            row.push(b.coeffs[r].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for j in c..=cols {
            m[r][j] = &m[r][j] / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..=cols {
                    let sub = &m[r][j] * &factor;
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    // inconsistent row?
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = Vector::zero(cols);
    for (row, col) in pivots {
        x.coeffs[col] = m[row][cols].clone();
    }
    Some(x)
}

/// Row-reduces the span of `vectors`; returns a canonical (RREF) basis and
/// the pivot columns.
pub fn row_reduce_span(vectors: &[Vector], dim: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut rows: Vec<Vec<Rat>> = vectors.iter().map(|v| v.coeffs.clone()).collect();
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..dim {
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].clone();
        for j in 0..dim {
            rows[r][j] = &rows[r][j] / &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..dim {
                    let sub = &rows[r][j] * &factor;
                    rows[i][j] = &rows[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    let basis = rows[..r]
        .iter()
        .map(|row| Vector::from_coeffs(row.clone()))
        .collect();
    (basis, pivots)
}

/// Membership of `v` in the span of an RREF basis with the given pivots.
pub fn in_span(rref_basis: &[Vector], pivots: &[usize], v: &Vector) -> bool {
    let mut residual = v.clone();
    for (row, &pc) in rref_basis.iter().zip(pivots) {
        let c = residual.coeffs[pc].clone();
        if !c.is_zero() {
            residual.add_assign_scaled(row, &(-c));
        }
    }
    residual.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingGroup;

    fn map_from(rows: Vec<Vec<i64>>) -> LinearMap {
        let r = rows.len();
        let c = rows[0].len();
        let dom = GradedSpace::ungraded(c);
        let cod = GradedSpace::ungraded(r);
        let mut m = LinearMap::zero(dom, cod);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.matrix[i][j] = rat(v);
            }
        }
        m
    }

    #[test]
    fn rank_kernel_identity_and_zero() {
        let id = LinearMap::identity(GradedSpace::ungraded(3));
        let (rank, ker) = rank_and_kernel(&id);
        assert_eq!(rank, 3);
        assert!(ker.is_empty());

        let z = LinearMap::zero(GradedSpace::ungraded(4), GradedSpace::ungraded(2));
        let (rank, ker) = rank_and_kernel(&z);
        assert_eq!(rank, 0);
        assert_eq!(ker.len(), 4);
    }

    #[test]
    fn rank_kernel_dependent_rows() {
        let m = map_from(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        let (rank, ker) = rank_and_kernel(&m);
        assert_eq!(rank, 1);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).is_zero(), "kernel vector maps to zero exactly");
        }
    }

    #[test]
    fn rank_kernel_rational_entries() {
        let dom = GradedSpace::ungraded(3);
        let cod = GradedSpace::ungraded(2);
        let mut m = LinearMap::zero(dom, cod);
        m.matrix[0] = vec![crate::scalar::frac(1, 2), rat(1), rat(0)];
        m.matrix[1] = vec![rat(1), rat(2), rat(1)];
        let (rank, ker) = rank_and_kernel(&m);
        assert_eq!(rank, 2);
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&ker[0]).is_zero());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = map_from(vec![vec![1, 1], vec![0, 1], vec![1, 2]]);
        let b = Vector::from_coeffs(vec![rat(3), rat(2), rat(5)]);
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.apply(&x), b);
        let bad = Vector::from_coeffs(vec![rat(3), rat(2), rat(6)]);
        assert!(solve(&m, &bad).is_none());
    }

    #[test]
    fn graded_commutator_cases() {
        // [id, D] = 0 with id of degree 0
        let space = GradedSpace::new(
            GradingGroup::standard(1),
            vec![Degree(vec![0]), Degree(vec![1])],
        )
        .unwrap();
        let id = LinearMap::identity(space.clone());
        let mut d = LinearMap::zero(space.clone(), space.clone());
        d.matrix[1][0] = rat(1);
        let d = d.with_degree(Degree(vec![1]));
        d.validate_degree().unwrap();
        assert!(graded_commutator(&id, &d).unwrap().is_zero());

        // <d1,d2> = 0: ordinary commutator
        let space2 = GradedSpace::new(
            GradingGroup::standard(1),
            vec![Degree(vec![0]), Degree(vec![0])],
        )
        .unwrap();
        let mut a = LinearMap::zero(space2.clone(), space2.clone());
        a.matrix[0][1] = rat(1);
        let a = a.with_degree(Degree(vec![0]));
        let mut b = LinearMap::zero(space2.clone(), space2.clone());
        b.matrix[1][0] = rat(1);
        let b = b.with_degree(Degree(vec![0]));
        let comm = graded_commutator(&a, &b).unwrap();
        let direct = a.compose(&b).unwrap().sub(&b.compose(&a).unwrap()).unwrap();
        assert_eq!(comm.matrix, direct.matrix);

        // D1 = D2 = D with <delta,delta> = 1: [D,D] = 2 D o D
        let mut d2 = LinearMap::zero(space.clone(), space.clone());
        d2.matrix[1][0] = rat(3);
        let d2 = d2.with_degree(Degree(vec![1]));
        let comm = graded_commutator(&d2, &d2).unwrap();
        let twice = d2.compose(&d2).unwrap().scale(&rat(2));
        assert_eq!(comm.matrix, twice.matrix);
    }

    #[test]
    fn missing_degree_rejected() {
        let space = GradedSpace::ungraded(2);
        let a = LinearMap::zero(space.clone(), space.clone());
        let b = LinearMap::identity(space);
        assert!(matches!(
            graded_commutator(&a, &b),
            Err(Error::MissingDegree)
        ));
    }
}
