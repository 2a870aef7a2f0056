//! Built-in example structures, also shipped as text files under
//! `assets/`. These are the fixtures the test suite and the CLI lean on.

use crate::grading::{Degree, GradingGroup};
use crate::linalg::{GradedSpace, Vector};
use crate::multilinear::MultiMap;
use crate::scalar::rat;

fn levi_civita(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The 2x2 matrix algebra on basis `e11, e12, e21, e22`:
/// `e_ij e_kl = delta_jk e_il`.
pub fn gl2() -> MultiMap {
    let labels = ["e11", "e12", "e21", "e22"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let space = GradedSpace::with_labels(
        GradingGroup::trivial(),
        vec![Degree::zero(0); 4],
        labels,
    )
    .unwrap();
    let mut mu = MultiMap::zero(space, 2, Degree::zero(0)).unwrap();
    let idx = |i: usize, j: usize| 2 * i + j; // e_{i+1,j+1}
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    if j == k {
                        mu.set_coeff(vec![idx(i, j), idx(k, l)], idx(i, l), rat(1))
                            .unwrap();
                    }
                }
            }
        }
    }
    mu
}

/// The identity matrix inside the `gl2` basis.
pub fn gl2_unit() -> Vector {
    Vector::from_coeffs(vec![rat(1), rat(0), rat(0), rat(1)])
}

/// The cross product on `Q^3`.
pub fn cross3() -> MultiMap {
    let space = GradedSpace::ungraded(3);
    let mut mu = MultiMap::zero(space, 2, Degree::zero(0)).unwrap();
    for i in 0..3usize {
        for j in 0..3usize {
            if i != j {
                let k = 3 - i - j;
                mu.set_coeff(vec![i, j], k, rat(levi_civita(&[i, j, k])))
                    .unwrap();
            }
        }
    }
    mu
}

/// The ternary epsilon bracket on `Q^4`:
/// `mu(e_i, e_j, e_k) = eps_{ijkl} e_l`.
pub fn eps4() -> MultiMap {
    let space = GradedSpace::ungraded(4);
    let mut mu = MultiMap::zero(space, 3, Degree::zero(0)).unwrap();
    for i in 0..4usize {
        for j in 0..4usize {
            for k in 0..4usize {
                if i != j && j != k && i != k {
                    let l = 6 - i - j - k;
                    mu.set_coeff(vec![i, j, k], l, rat(levi_civita(&[i, j, k, l])))
                        .unwrap();
                }
            }
        }
    }
    mu
}

/// The 2-dimensional abelian Lie algebra (zero bracket).
pub fn abelian2() -> MultiMap {
    MultiMap::zero(GradedSpace::ungraded(2), 2, Degree::zero(0)).unwrap()
}

/// Ternary nilpotent algebra on `span{a, b}`: `mu(a,a,a) = b`, everything
/// touching `b` maps to zero. Associative; `span{b}` is an ideal.
pub fn nilpotent_ternary() -> MultiMap {
    let labels = vec!["a".to_string(), "b".to_string()];
    let space =
        GradedSpace::with_labels(GradingGroup::trivial(), vec![Degree::zero(0); 2], labels)
            .unwrap();
    let mut mu = MultiMap::zero(space, 2 + 1, Degree::zero(0)).unwrap();
    mu.set_coeff(vec![0, 0, 0], 1, rat(1)).unwrap();
    mu
}

/// The scalar ternary product on a 1-dimensional space; its associator is
/// the three-term all-plus sum, so the defect value is 3.
pub fn scalar_ternary() -> MultiMap {
    let space = GradedSpace::ungraded(1);
    let mut mu = MultiMap::zero(space, 3, Degree::zero(0)).unwrap();
    mu.set_coeff(vec![0, 0, 0], 0, rat(1)).unwrap();
    mu
}

/// A `Z`-graded weighted ternary algebra: basis degrees `(0)` and `(1)`,
/// weight `(1)`, `mu(e0,e0,e0) = e1`. The weight pairs oddly with itself,
/// which is what admits a coboundary operator at odd arity.
pub fn graded_z2() -> MultiMap {
    let space = GradedSpace::new(
        GradingGroup::standard(1),
        vec![Degree(vec![0]), Degree(vec![1])],
    )
    .unwrap();
    let mut mu = MultiMap::zero(space, 3, Degree(vec![1])).unwrap();
    mu.set_coeff(vec![0, 0, 0], 1, rat(1)).unwrap();
    mu
}

/// A 4-ary nilpotent skew structure on `Q^5`: `mu(e1,e2,e3,e4) = e5`
/// extended skew, zero on anything touching `e5`. An even-arity Lie
/// structure used for coboundary tests.
pub fn nilpotent_quaternary() -> MultiMap {
    let space = GradedSpace::ungraded(5);
    let mut mu = MultiMap::zero(space, 4, Degree::zero(0)).unwrap();
    let perms = crate::grading::permutations(4);
    for p in &perms {
        let tuple: Vec<usize> = p.clone();
        mu.set_coeff(tuple, 4, rat(levi_civita(p))).unwrap();
    }
    mu
}

/// Larger 4-ary nilpotent skew structure on `Q^7` (room for two coboundary
/// steps in the skew world): `mu(e1,e2,e3,e4) = e5`, zero otherwise.
pub fn nilpotent_quaternary7() -> MultiMap {
    let space = GradedSpace::ungraded(7);
    let mut mu = MultiMap::zero(space, 4, Degree::zero(0)).unwrap();
    let perms = crate::grading::permutations(4);
    for p in &perms {
        mu.set_coeff(p.clone(), 4, rat(levi_civita(p))).unwrap();
    }
    mu
}
