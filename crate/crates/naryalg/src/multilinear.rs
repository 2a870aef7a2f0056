//! Homogeneous multilinear maps stored as sparse structure constants, and
//! the insertion calculus on them: the j-product and its bracket, the graded
//! alternator, and the alternated (Nijenhuis-Richardson style) i-product and
//! wedge bracket.
//!
//! A `MultiMap` of arity `k+1` and weight `kappa` sends basis tuples to
//! homogeneous vectors of degree `x_0 + ... + x_k + kappa`. Missing entries
//! are zero. Permutation-sum operators are guarded by an arity budget since
//! their cost grows as `(k+1)!`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grading::{
    bidegree_pairing, block_index_map, graded_sign, inverse, permutations, BiDegree, Degree,
};
use crate::linalg::{GradedSpace, Vector};
use crate::scalar::{factorial, rat, Rat};

/// Default cap on the number of arguments fed to permutation-sum operators.
pub const DEFAULT_ARITY_BUDGET: usize = 6;

/// All index tuples of the given length with entries below `dim`, in
/// lexicographic order. `len == 0` yields the single empty tuple.
pub fn tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    if dim == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(dim.pow(len as u32));
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < dim {
                break;
            }
            cur[pos] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiMap {
    space: Arc<GradedSpace>,
    arity: usize,
    weight: Degree,
    entries: BTreeMap<Vec<usize>, Vector>,
}

impl MultiMap {
    pub fn zero(space: Arc<GradedSpace>, arity: usize, weight: Degree) -> Result<Self> {
        if weight.rank() != space.group().rank() {
            return Err(Error::DimensionMismatch(format!(
                "weight rank {} vs group rank {}",
                weight.rank(),
                space.group().rank()
            )));
        }
        Ok(MultiMap {
            space,
            arity,
            weight,
            entries: BTreeMap::new(),
        })
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn form_degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    pub fn weight(&self) -> &Degree {
        &self.weight
    }

    pub fn bidegree(&self) -> BiDegree {
        BiDegree::new(self.form_degree(), self.weight.clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vector)> {
        self.entries.iter()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.len() != self.arity {
            return Err(Error::InvalidArity(format!(
                "tuple length {} vs arity {}",
                tuple.len(),
                self.arity
            )));
        }
        for &i in tuple {
            if i >= self.space.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "basis index {i} out of range for dimension {}",
                    self.space.dim()
                )));
            }
        }
        Ok(())
    }

    /// Inserts (accumulates) an entry, checking homogeneity of the output.
    pub fn set_entry(&mut self, tuple: Vec<usize>, value: Vector) -> Result<()> {
        self.check_tuple(&tuple)?;
        if value.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch(
                "output vector length differs from space dimension".into(),
            ));
        }
        let want = self.space.degree_sum(&tuple).add(&self.weight);
        if !value.is_homogeneous_of(&self.space, &want) {
            return Err(Error::Homogeneity(format!(
                "entry {tuple:?} output is not homogeneous of degree {want:?}"
            )));
        }
        self.accumulate(tuple, value);
        Ok(())
    }

    /// Convenience: accumulate a single rational coefficient on basis output
    /// `out` for the given input tuple.
    pub fn set_coeff(&mut self, tuple: Vec<usize>, out: usize, coeff: Rat) -> Result<()> {
        let mut v = self.space.zero_vector();
        v.coeffs[out] = coeff;
        self.set_entry(tuple, v)
    }

    pub(crate) fn accumulate(&mut self, tuple: Vec<usize>, value: Vector) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&tuple) {
            Some(existing) => {
                let sum = existing.add(&value);
                if sum.is_zero() {
                    self.entries.remove(&tuple);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.entries.insert(tuple, value);
            }
        }
    }

    pub fn eval_basis(&self, tuple: &[usize]) -> Vector {
        debug_assert_eq!(tuple.len(), self.arity);
        match self.entries.get(tuple) {
            Some(v) => v.clone(),
            None => self.space.zero_vector(),
        }
    }

    /// Full multilinear evaluation on arbitrary vectors.
    pub fn eval(&self, args: &[&Vector]) -> Result<Vector> {
        if args.len() != self.arity {
            return Err(Error::InvalidArity(format!(
                "{} arguments vs arity {}",
                args.len(),
                self.arity
            )));
        }
        let mut out = self.space.zero_vector();
        for (tuple, value) in &self.entries {
            let mut coeff = rat(1);
            let mut vanished = false;
            for (slot, &idx) in tuple.iter().enumerate() {
                let c = &args[slot].coeffs[idx];
                if c.is_zero() {
                    vanished = true;
                    break;
                }
                coeff *= c;
            }
            if !vanished {
                out.add_assign_scaled(value, &coeff);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> MultiMap {
        if c.is_zero() {
            return MultiMap {
                space: self.space.clone(),
                arity: self.arity,
                weight: self.weight.clone(),
                entries: BTreeMap::new(),
            };
        }
        let entries = self
            .entries
            .iter()
            .map(|(t, v)| (t.clone(), v.scale(c)))
            .collect();
        MultiMap {
            space: self.space.clone(),
            arity: self.arity,
            weight: self.weight.clone(),
            entries,
        }
    }

    pub fn add(&self, other: &MultiMap) -> Result<MultiMap> {
        if self.space != other.space || self.arity != other.arity || self.weight != other.weight {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for (t, v) in &other.entries {
            out.accumulate(t.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiMap) -> Result<MultiMap> {
        self.add(&other.scale(&rat(-1)))
    }

    /// Entry-by-entry homogeneity validation.
    pub fn validate(&self) -> Result<()> {
        for (t, v) in &self.entries {
            let want = self.space.degree_sum(t).add(&self.weight);
            if !v.is_homogeneous_of(&self.space, &want) {
                return Err(Error::Homogeneity(format!(
                    "entry {t:?} violates homogeneity"
                )));
            }
        }
        Ok(())
    }

    /// Graded skew symmetry: swapping adjacent arguments of degrees
    /// `x_i, x_{i+1}` multiplies the value by `-(-1)^{<x_i,x_{i+1}>}`.
    pub fn is_graded_skew(&self) -> Result<bool> {
        let g = self.space.group();
        for (t, v) in &self.entries {
            for i in 0..self.arity.saturating_sub(1) {
                let p = g.pairing(self.space.degree(t[i]), self.space.degree(t[i + 1]))?;
                let mut swapped = t.clone();
                swapped.swap(i, i + 1);
                let other = self.eval_basis(&swapped);
                let expected = if p == 0 { v.scale(&rat(-1)) } else { v.clone() };
                if other != expected {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The grading (sign) operator `S^a_sigma` permuting argument blocks:
    /// the result evaluated on blocks `(C_1,...,C_p)` equals the input on
    /// `(C_{sigma(1)},...,C_{sigma(p)})`; result block `j` has length
    /// `lens[sigma^{-1}(j)]`. Satisfies the composition law
    /// `S^a_{mu o sigma} = S^{sigma(a)}_mu o S^a_sigma`.
    pub fn block_permute(&self, sigma: &[usize], lens: &[usize]) -> Result<MultiMap> {
        if lens.iter().sum::<usize>() != self.arity || sigma.len() != lens.len() {
            return Err(Error::InvalidArity(format!(
                "block lengths {lens:?} inconsistent with arity {}",
                self.arity
            )));
        }
        let sigma_inv = inverse(sigma);
        // result_args[t] = input_args[map[t]] describes where each result
        // position reads from; for entries we go the other way round.
        let map = block_index_map(&sigma_inv, lens);
        let mut out = MultiMap::zero(self.space.clone(), self.arity, self.weight.clone())?;
        for (t, v) in &self.entries {
            // U concatenates input blocks sigma^{-1}(j); position-wise the
            // result tuple reads U[pos] = t[map[pos]].
            let u: Vec<usize> = map.iter().map(|&src| t[src]).collect();
            out.accumulate(u, v.clone());
        }
        Ok(out)
    }

    /// Result block lengths of `block_permute` with the same arguments.
    pub fn permuted_lens(sigma: &[usize], lens: &[usize]) -> Vec<usize> {
        inverse(sigma).iter().map(|&s| lens[s]).collect()
    }
}

/// `(-1)^{<deg K1, deg K2>}` over `Z x G`, i.e. `k1 k2 + <kappa1, kappa2>`.
fn bracket_pairing(k1: &MultiMap, k2: &MultiMap) -> Result<u8> {
    bidegree_pairing(k1.space.group(), &k1.bidegree(), &k2.bidegree())
}

/// Insertion product: `(j(K1)K2)(X_0,...,X_{k1+k2})` is the signed sum over
/// insertion positions `i = 0..k2` of
/// `K2(X_0,...,K1(X_i,...,X_{i+k1}),...,X_{k1+k2})` with sign exponent
/// `k1*i + <kappa1, kappa2 + x_0 + ... + x_{i-1}>`.
pub fn j_product(k1: &MultiMap, k2: &MultiMap) -> Result<MultiMap> {
    if k1.space != k2.space {
        return Err(Error::SpaceMismatch);
    }
    let (a1, a2) = (k1.arity, k2.arity);
    if a1 + a2 == 0 {
        return Err(Error::InvalidArity(
            "j-product of two arity-0 maps".into(),
        ));
    }
    let arity = a1 + a2 - 1;
    let weight = k1.weight.add(&k2.weight);
    let mut out = MultiMap::zero(k1.space.clone(), arity, weight)?;
    if a2 == 0 {
        // no slots to insert into
        return Ok(out);
    }
    let g = k1.space.group();
    let fd1 = k1.form_degree();
    for (t2, v2) in &k2.entries {
        for i in 0..a2 {
            // degrees of the arguments before the insertion point
            let prefix = k1.space.degree_sum(&t2[..i]);
            let pair_arg = k2.weight.add(&prefix);
            let p = g.pairing(&k1.weight, &pair_arg)?;
            let exponent = (fd1 * i as i64).rem_euclid(2) as u8 + p;
            let sign = if exponent % 2 == 0 { rat(1) } else { rat(-1) };
            let c = t2[i];
            for (t1, v1) in &k1.entries {
                let coeff = &v1.coeffs[c];
                if coeff.is_zero() {
                    continue;
                }
                let mut u = Vec::with_capacity(arity);
                u.extend_from_slice(&t2[..i]);
                u.extend_from_slice(t1);
                u.extend_from_slice(&t2[i + 1..]);
                out.accumulate(u, v2.scale(&(&sign * coeff)));
            }
        }
    }
    Ok(out)
}

/// `[K1,K2]^D = j(K1)K2 - (-1)^{k1 k2 + <kappa1,kappa2>} j(K2)K1`.
pub fn delta_bracket(k1: &MultiMap, k2: &MultiMap) -> Result<MultiMap> {
    let a = j_product(k1, k2)?;
    let b = j_product(k2, k1)?;
    let p = bracket_pairing(k1, k2)?;
    if p == 0 {
        a.sub(&b)
    } else {
        a.add(&b)
    }
}

/// The graded alternator
/// `(aK)(X_0,...,X_k) = (1/(k+1)!) sum_sigma s(sigma,x) K(X_{sigma 0},...)`.
pub fn alternator(k: &MultiMap) -> Result<MultiMap> {
    alternator_budgeted(k, DEFAULT_ARITY_BUDGET)
}

pub fn alternator_budgeted(k: &MultiMap, cap: usize) -> Result<MultiMap> {
    if k.arity > cap {
        return Err(Error::ArityBudget {
            needed: k.arity,
            cap,
        });
    }
    if k.arity <= 1 {
        return Ok(k.clone());
    }
    let n = k.arity;
    let g = k.space.group();
    let inv_fact = rat(1) / factorial(n);
    let perms = permutations(n);
    let mut out = MultiMap::zero(k.space.clone(), n, k.weight.clone())?;
    for (t, v) in &k.entries {
        for sigma in &perms {
            // contribution to the tuple U with U_{sigma(j)} = t_j
            let mut u = vec![0usize; n];
            for (j, &s) in sigma.iter().enumerate() {
                u[s] = t[j];
            }
            let degs = k.space.tuple_degrees(&u);
            let s = graded_sign(g, sigma, &degs)?;
            let c = if s > 0 {
                inv_fact.clone()
            } else {
                -inv_fact.clone()
            };
            out.accumulate(u, v.scale(&c));
        }
    }
    Ok(out)
}

/// A multilinear map validated to be graded skew symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMultiMap(MultiMap);

impl SkewMultiMap {
    pub fn new(map: MultiMap) -> Result<Self> {
        if !map.is_graded_skew()? {
            return Err(Error::NotSkew(format!(
                "arity-{} map fails the adjacent-swap test",
                map.arity()
            )));
        }
        Ok(SkewMultiMap(map))
    }

    /// For outputs of operations that are skew by construction.
    pub(crate) fn new_unchecked(map: MultiMap) -> Self {
        debug_assert!(map.is_graded_skew().unwrap_or(false));
        SkewMultiMap(map)
    }

    pub fn as_map(&self) -> &MultiMap {
        &self.0
    }

    pub fn into_map(self) -> MultiMap {
        self.0
    }
}

impl std::ops::Deref for SkewMultiMap {
    type Target = MultiMap;
    fn deref(&self) -> &MultiMap {
        &self.0
    }
}

/// Alternates and wraps; the projection property makes the result skew.
pub fn alternator_skew(k: &MultiMap, cap: usize) -> Result<SkewMultiMap> {
    Ok(SkewMultiMap::new_unchecked(alternator_budgeted(k, cap)?))
}

/// `i(K1)K2 = ((k1+k2+1)!/((k1+1)!(k2+1)!)) a(j(K1)K2)` for skew maps.
pub fn i_product(k1: &SkewMultiMap, k2: &SkewMultiMap) -> Result<SkewMultiMap> {
    i_product_budgeted(k1, k2, DEFAULT_ARITY_BUDGET)
}

pub fn i_product_budgeted(
    k1: &SkewMultiMap,
    k2: &SkewMultiMap,
    cap: usize,
) -> Result<SkewMultiMap> {
    let (a1, a2) = (k1.arity(), k2.arity());
    if a1 == 0 || a2 == 0 {
        // a constant inserts trivially; the alternated product is the
        // alternated j-product with unit combinatorial factor
        let alt = alternator_budgeted(&j_product(k1, k2)?, cap)?;
        return Ok(SkewMultiMap::new_unchecked(alt));
    }
    let factor = factorial(a1 + a2 - 1) / (factorial(a1) * factorial(a2));
    let alt = alternator_budgeted(&j_product(k1, k2)?, cap)?;
    Ok(SkewMultiMap::new_unchecked(alt.scale(&factor)))
}

/// The explicit permutation-sum form of the i-product:
/// `(i(K1)K2)(X) = (1/((k1+1)! k2!)) sum_sigma s(sigma,x) (-1)^{<kappa1,kappa2>}
///  K2(K1(X_{sigma 0},...,X_{sigma k1}), X_{sigma(k1+1)},...)`.
/// Independent evaluation path; must agree with `i_product` on skew inputs.
pub fn i_product_explicit(
    k1: &SkewMultiMap,
    k2: &SkewMultiMap,
    cap: usize,
) -> Result<SkewMultiMap> {
    let (a1, a2) = (k1.arity(), k2.arity());
    if a1 == 0 || a2 == 0 {
        return i_product_budgeted(k1, k2, cap);
    }
    let n = a1 + a2 - 1;
    if n > cap {
        return Err(Error::ArityBudget { needed: n, cap });
    }
    let space = k1.space().clone();
    if *space != *k2.space().clone() {
        return Err(Error::SpaceMismatch);
    }
    let g = space.group();
    let weight = k1.weight().add(k2.weight());
    let kappa_pair = g.pairing(k1.weight(), k2.weight())?;
    let prefactor = {
        let f = rat(1) / (factorial(a1) * factorial(a2 - 1));
        if kappa_pair == 0 {
            f
        } else {
            -f
        }
    };
    let perms = permutations(n);
    let dim = space.dim();
    let mut out = MultiMap::zero(space.clone(), n, weight)?;
    // dense enumeration over all input tuples
    for tuple in tuples(dim, n) {
        let degs = space.tuple_degrees(&tuple);
        let mut acc = space.zero_vector();
        for sigma in &perms {
            let s = graded_sign(g, sigma, &degs)?;
            let inner_tuple: Vec<usize> = (0..a1).map(|j| tuple[sigma[j]]).collect();
            let inner = k1.eval_basis(&inner_tuple);
            if inner.is_zero() {
                continue;
            }
            for (c, coeff) in inner.coeffs.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let mut outer = Vec::with_capacity(a2);
                outer.push(c);
                for j in a1..n {
                    outer.push(tuple[sigma[j]]);
                }
                let val = k2.eval_basis(&outer);
                if !val.is_zero() {
                    let signed = if s > 0 { coeff.clone() } else { -coeff.clone() };
                    acc.add_assign_scaled(&val, &signed);
                }
            }
        }
        if !acc.is_zero() {
            out.accumulate(tuple, acc.scale(&prefactor));
        }
    }
    Ok(SkewMultiMap::new_unchecked(out))
}

/// `[K1,K2]^ = i(K1)K2 - (-1)^{<(k1,kappa1),(k2,kappa2)>} i(K2)K1`.
pub fn wedge_bracket(k1: &SkewMultiMap, k2: &SkewMultiMap) -> Result<SkewMultiMap> {
    wedge_bracket_budgeted(k1, k2, DEFAULT_ARITY_BUDGET)
}

pub fn wedge_bracket_budgeted(
    k1: &SkewMultiMap,
    k2: &SkewMultiMap,
    cap: usize,
) -> Result<SkewMultiMap> {
    let a = i_product_budgeted(k1, k2, cap)?;
    let b = i_product_budgeted(k2, k1, cap)?;
    let p = bracket_pairing(k1, k2)?;
    let m = if p == 0 {
        a.as_map().sub(b.as_map())?
    } else {
        a.as_map().add(b.as_map())?
    };
    Ok(SkewMultiMap::new_unchecked(m))
}

/// The same bracket through the alternated delta bracket:
/// `((k1+k2+1)!/((k1+1)!(k2+1)!)) a([K1,K2]^D)`. Shipped as the second
/// route; must agree with `wedge_bracket`.
pub fn wedge_bracket_alternated(
    k1: &SkewMultiMap,
    k2: &SkewMultiMap,
    cap: usize,
) -> Result<SkewMultiMap> {
    let (a1, a2) = (k1.arity(), k2.arity());
    let factor = if a1 == 0 || a2 == 0 {
        rat(1)
    } else {
        factorial(a1 + a2 - 1) / (factorial(a1) * factorial(a2))
    };
    let alt = alternator_budgeted(&delta_bracket(k1, k2)?, cap)?;
    Ok(SkewMultiMap::new_unchecked(alt.scale(&factor)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingGroup;

    fn ungraded_binary(dim: usize, entries: &[(usize, usize, usize, i64)]) -> MultiMap {
        let space = GradedSpace::ungraded(dim);
        let mut m = MultiMap::zero(space, 2, Degree::zero(0)).unwrap();
        for &(a, b, out, c) in entries {
            m.set_coeff(vec![a, b], out, rat(c)).unwrap();
        }
        m
    }

    #[test]
    fn j_product_binary_associator() {
        // j(mu)mu (X0,X1,X2) = mu(mu(X0,X1),X2) - mu(X0,mu(X1,X2))
        let mu = ungraded_binary(2, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 2)]);
        let jj = j_product(&mu, &mu).unwrap();
        for t in [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]] {
            let inner01 = mu.eval_basis(&[t[0], t[1]]);
            let lhs1 = mu
                .eval(&[&inner01, &mu.space().basis_vector(t[2])])
                .unwrap();
            let inner12 = mu.eval_basis(&[t[1], t[2]]);
            let lhs2 = mu
                .eval(&[&mu.space().basis_vector(t[0]), &inner12])
                .unwrap();
            assert_eq!(jj.eval_basis(&t), lhs1.sub(&lhs2));
        }
    }

    #[test]
    fn j_product_with_zero() {
        let mu = ungraded_binary(2, &[(0, 0, 1, 1)]);
        let zero = MultiMap::zero(mu.space().clone(), 3, Degree::zero(0)).unwrap();
        assert!(j_product(&zero, &mu).unwrap().is_zero());
        assert!(j_product(&mu, &zero).unwrap().is_zero());
    }

    #[test]
    fn j_product_ternary_all_plus() {
        // ternary ungraded: three insertion terms, all with plus signs
        let space = GradedSpace::ungraded(1);
        let mut mu = MultiMap::zero(space, 3, Degree::zero(0)).unwrap();
        mu.set_coeff(vec![0, 0, 0], 0, rat(1)).unwrap();
        let jj = j_product(&mu, &mu).unwrap();
        // on the 1-dim algebra with mu = product of scalars, each of the
        // three terms evaluates to 1
        assert_eq!(jj.eval_basis(&[0, 0, 0, 0, 0]).coeffs[0], rat(3));
    }

    #[test]
    fn weighted_j_product_signs_against_scalar_oracle() {
        // Z-graded 2-dim space; independent term-by-term sign oracle
        let g = GradingGroup::standard(1);
        let space = GradedSpace::new(g, vec![Degree(vec![0]), Degree(vec![1])]).unwrap();
        let w1 = Degree(vec![1]);
        let w2 = Degree(vec![1]);
        let mut k1 = MultiMap::zero(space.clone(), 2, w1.clone()).unwrap();
        // degree bookkeeping: (0)+(0)+(1) = (1) -> e1; (0)+(1)+(1) = (2) has
        // no basis element, so only all-e0 tuples and mixed-to-nothing
        k1.set_coeff(vec![0, 0], 1, rat(1)).unwrap();
        let mut k2 = MultiMap::zero(space.clone(), 2, w2.clone()).unwrap();
        k2.set_coeff(vec![0, 0], 1, rat(2)).unwrap();
        let j = j_product(&k1, &k2).unwrap();
        // oracle: for each tuple and insertion position i, the coefficient is
        // (-1)^{k1*i + <w1, w2 + x_0 + ... + x_{i-1}>} k1_coeff * k2_coeff
        let group = space.group();
        for t in [[0usize, 0, 0]] {
            let mut expect = space.zero_vector();
            for i in 0..2 {
                let mut pair = w2.clone();
                for &idx in &t[..i] {
                    pair = pair.add(space.degree(idx));
                }
                let p = group.pairing(&w1, &pair).unwrap();
                let exp = (i as i64).rem_euclid(2) as u8 + p;
                let sign = if exp % 2 == 0 { 1 } else { -1 };
                // inner value: k1 on (t[i], t[i+1]) -> coefficient on e1
                let inner = k1.eval_basis(&[t[i], t[i + 1]]);
                for (c, coeff) in inner.coeffs.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    // outer tuple: prefix ++ [c] ++ suffix, but arity 2 means
                    // the outer sees (prefix.., c, ..suffix) of length 2
                    let outer: Vec<usize> = match i {
                        0 => vec![c, t[2]],
                        1 => vec![t[0], c],
                        _ => unreachable!(),
                    };
                    let val = k2.eval_basis(&outer);
                    expect.add_assign_scaled(&val, &(rat(sign) * coeff));
                }
            }
            assert_eq!(j.eval_basis(&t), expect);
        }
    }

    #[test]
    fn delta_bracket_antisymmetry_and_self() {
        let g = GradingGroup::standard(1);
        let space = GradedSpace::new(g, vec![Degree(vec![0]), Degree(vec![1])]).unwrap();
        // nu of bidegree (1, n) with <n,n> = 1: [nu,nu] = (1+(-1)^{<n,n>}) j(nu)nu = 0
        let n = Degree(vec![1]);
        let mut nu = MultiMap::zero(space.clone(), 2, n).unwrap();
        nu.set_coeff(vec![0, 0], 1, rat(1)).unwrap();
        let self_bracket = delta_bracket(&nu, &nu).unwrap();
        assert!(self_bracket.is_zero());

        // graded antisymmetry on a weight-0 pair
        let mut k1 = MultiMap::zero(space.clone(), 2, Degree(vec![0])).unwrap();
        k1.set_coeff(vec![0, 1], 1, rat(1)).unwrap();
        k1.set_coeff(vec![0, 0], 0, rat(1)).unwrap();
        let mut k2 = MultiMap::zero(space.clone(), 1, Degree(vec![0])).unwrap();
        k2.set_coeff(vec![0], 0, rat(1)).unwrap();
        k2.set_coeff(vec![1], 1, rat(-2)).unwrap();
        let ab = delta_bracket(&k1, &k2).unwrap();
        let ba = delta_bracket(&k2, &k1).unwrap();
        let p = bracket_pairing(&k1, &k2).unwrap();
        let expected = if p == 0 { ba.scale(&rat(-1)) } else { ba };
        assert_eq!(ab, expected);

        // [K, 0] = 0
        let zero = MultiMap::zero(space, 2, Degree(vec![0])).unwrap();
        assert!(delta_bracket(&k1, &zero).unwrap().is_zero());
    }

    #[test]
    fn alternator_projection_and_fixpoints() {
        // symmetric ungraded binary K -> aK = 0
        let sym = ungraded_binary(2, &[(0, 1, 0, 1), (1, 0, 0, 1)]);
        assert!(alternator(&sym).unwrap().is_zero());

        // already skew -> fixed
        let skew = ungraded_binary(2, &[(0, 1, 0, 1), (1, 0, 0, -1)]);
        assert_eq!(alternator(&skew).unwrap(), skew);

        // a(aK) = aK on a random-ish ternary map
        let space = GradedSpace::ungraded(3);
        let mut k = MultiMap::zero(space, 3, Degree::zero(0)).unwrap();
        k.set_coeff(vec![0, 1, 2], 0, rat(5)).unwrap();
        k.set_coeff(vec![1, 1, 0], 2, rat(3)).unwrap();
        k.set_coeff(vec![2, 0, 0], 1, rat(-7)).unwrap();
        let a1 = alternator(&k).unwrap();
        let a2 = alternator(&a1).unwrap();
        assert_eq!(a1, a2);
        assert!(SkewMultiMap::new(a1).is_ok());
    }

    #[test]
    fn alternator_budget_guard() {
        let space = GradedSpace::ungraded(1);
        let k = MultiMap::zero(space, 7, Degree::zero(0)).unwrap();
        assert!(matches!(
            alternator(&k),
            Err(Error::ArityBudget { needed: 7, cap: 6 })
        ));
        assert!(alternator_budgeted(&k, 8).is_ok());
    }

    #[test]
    fn i_product_binary_jacobi_sum() {
        // cross product on Q^3: i(mu)mu = 0 is the Jacobi identity
        let space = GradedSpace::ungraded(3);
        let mut mu = MultiMap::zero(space, 2, Degree::zero(0)).unwrap();
        let eps: [(usize, usize, usize, i64); 6] = [
            (0, 1, 2, 1),
            (1, 0, 2, -1),
            (1, 2, 0, 1),
            (2, 1, 0, -1),
            (2, 0, 1, 1),
            (0, 2, 1, -1),
        ];
        for (a, b, c, s) in eps {
            mu.set_coeff(vec![a, b], c, rat(s)).unwrap();
        }
        let mu = SkewMultiMap::new(mu).unwrap();
        let jac = i_product(&mu, &mu).unwrap();
        assert!(jac.is_zero());
        // the explicit path agrees
        let exp = i_product_explicit(&mu, &mu, 6).unwrap();
        assert!(exp.is_zero());
    }

    #[test]
    fn i_product_two_routes_agree() {
        let g = GradingGroup::standard(1);
        let space = GradedSpace::new(
            g,
            vec![Degree(vec![0]), Degree(vec![1]), Degree(vec![1])],
        )
        .unwrap();
        let mut k1 = MultiMap::zero(space.clone(), 2, Degree(vec![0])).unwrap();
        k1.set_coeff(vec![0, 1], 1, rat(1)).unwrap();
        k1.set_coeff(vec![0, 2], 2, rat(2)).unwrap();
        k1.set_coeff(vec![0, 0], 0, rat(3)).unwrap();
        let k1 = alternator_skew(&k1, 6).unwrap();
        let mut k2 = MultiMap::zero(space.clone(), 2, Degree(vec![1])).unwrap();
        k2.set_coeff(vec![0, 0], 1, rat(3)).unwrap();
        k2.set_coeff(vec![0, 0], 2, rat(1)).unwrap();
        let k2 = alternator_skew(&k2, 6).unwrap();
        let a = i_product_budgeted(&k1, &k2, 6).unwrap();
        let b = i_product_explicit(&k1, &k2, 6).unwrap();
        assert_eq!(a.as_map(), b.as_map());
        let w1 = wedge_bracket_budgeted(&k1, &k2, 6).unwrap();
        let w2 = wedge_bracket_alternated(&k1, &k2, 6).unwrap();
        assert_eq!(w1.as_map(), w2.as_map());
        // graded antisymmetry of the wedge bracket
        let w21 = wedge_bracket_budgeted(&k2, &k1, 6).unwrap();
        let p = bracket_pairing(&k1, &k2).unwrap();
        let expected = if p == 0 {
            w21.as_map().scale(&rat(-1))
        } else {
            w21.as_map().clone()
        };
        assert_eq!(*w1.as_map(), expected);
    }

    #[test]
    fn binary_skew_wedge_is_twice_i() {
        // bidegree (1,0) pairs oddly with itself: [mu,mu]^ = 2 i(mu)mu
        let mu = ungraded_binary(2, &[(0, 1, 0, 1), (1, 0, 0, -1), (0, 0, 1, 0)]);
        let mu = SkewMultiMap::new(mu).unwrap();
        let w = wedge_bracket(&mu, &mu).unwrap();
        let twice = i_product(&mu, &mu).unwrap().as_map().scale(&rat(2));
        assert_eq!(*w.as_map(), twice);
    }

    #[test]
    fn block_permute_laws() {
        // S^{a,b} on a decomposable-style map: swap two blocks
        let space = GradedSpace::ungraded(2);
        let mut k = MultiMap::zero(space.clone(), 3, Degree::zero(0)).unwrap();
        k.set_coeff(vec![0, 1, 1], 0, rat(1)).unwrap();
        k.set_coeff(vec![1, 0, 1], 1, rat(2)).unwrap();
        // blocks (1,2), sigma = swap
        let swapped = k.block_permute(&[1, 0], &[1, 2]).unwrap();
        // result(C1,C2) = K(C2,C1): result block 1 has length 2
        for t in [[0usize, 1, 1], [1, 1, 0], [0, 1, 0]] {
            let (c1, c2) = (&t[..2], &t[2..]);
            let mut orig = Vec::new();
            orig.extend_from_slice(c2);
            orig.extend_from_slice(c1);
            assert_eq!(swapped.eval_basis(&t), k.eval_basis(&orig));
        }

        // identity permutation
        let id = k.block_permute(&[0, 1], &[1, 2]).unwrap();
        assert_eq!(id, k);

        // composition law over random block shapes
        let mut big = MultiMap::zero(space, 4, Degree::zero(0)).unwrap();
        big.set_coeff(vec![0, 1, 0, 1], 0, rat(1)).unwrap();
        big.set_coeff(vec![1, 1, 0, 0], 1, rat(-3)).unwrap();
        let lens = [1usize, 2, 1];
        for sigma in permutations(3) {
            for mu in permutations(3) {
                let step1 = big.block_permute(&sigma, &lens).unwrap();
                let lens1 = MultiMap::permuted_lens(&sigma, &lens);
                let step2 = step1.block_permute(&mu, &lens1).unwrap();
                let both = big
                    .block_permute(&crate::grading::compose(&mu, &sigma), &lens)
                    .unwrap();
                assert_eq!(step2, both, "sigma={sigma:?} mu={mu:?}");
            }
        }
    }

    #[test]
    fn block_permute_skew_sign() {
        // fully skew P: S^a_sigma P = sign(sigma, a) P, the Koszul block sign
        let space = GradedSpace::ungraded(3);
        let mut k = MultiMap::zero(space, 3, Degree::zero(0)).unwrap();
        k.set_coeff(vec![0, 1, 2], 0, rat(1)).unwrap();
        let k = alternator(&k).unwrap();
        for (sigma, lens) in [
            (vec![1usize, 0], vec![1usize, 2]),
            (vec![1, 0], vec![2, 1]),
            (vec![1, 2, 0], vec![1, 1, 1]),
            (vec![2, 0, 1], vec![1, 1, 1]),
        ] {
            let permuted = k.block_permute(&sigma, &lens).unwrap();
            let s = crate::grading::block_koszul_sign(&sigma, &lens);
            let expected = k.scale(&rat(s as i64));
            assert_eq!(permuted, expected, "sigma={sigma:?} lens={lens:?}");
        }
    }

    #[test]
    fn homogeneity_enforced() {
        let g = GradingGroup::standard(1);
        let space = GradedSpace::new(g, vec![Degree(vec![0]), Degree(vec![1])]).unwrap();
        let mut m = MultiMap::zero(space, 2, Degree(vec![0])).unwrap();
        // (0)+(0)+(0) = (0): output on e1 (degree 1) violates homogeneity
        assert!(m.set_coeff(vec![0, 0], 1, rat(1)).is_err());
        assert!(m.set_coeff(vec![0, 0], 0, rat(1)).is_ok());
    }

    #[test]
    fn eval_multilinearity() {
        let mu = ungraded_binary(2, &[(0, 0, 0, 1), (0, 1, 1, 2), (1, 1, 0, -1)]);
        let u = Vector::from_coeffs(vec![rat(2), rat(3)]);
        let v = Vector::from_coeffs(vec![rat(-1), rat(5)]);
        let w = Vector::from_coeffs(vec![rat(4), rat(1)]);
        // linearity in slot 0
        let lhs = mu.eval(&[&u.add(&v), &w]).unwrap();
        let rhs = mu.eval(&[&u, &w]).unwrap().add(&mu.eval(&[&v, &w]).unwrap());
        assert_eq!(lhs, rhs);
    }
}
