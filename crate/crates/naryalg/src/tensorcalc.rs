//! Noncommutative differential calculus on a truncated tensor algebra:
//! Hochschild operators `d_K`, left and right multiplication operators,
//! the characterization and extraction of `d_K`, unit detection, and the
//! order-(p,q) decomposition of operators on matrix algebras.
//!
//! The tensor algebra is infinite dimensional, so everything here is
//! verified inside a window of word lengths `[lower, cap]` where both sides
//! of each identity are defined.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::linalg::{solve, GradedSpace, LinearMap, Vector};
use crate::multilinear::{delta_bracket, j_product, tuples, MultiMap};
use crate::scalar::{rat, Rat};

/// Window of word lengths kept from `V^(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedTensorSpace {
    pub base: Arc<GradedSpace>,
    pub lower: usize,
    pub cap: usize,
}

impl TruncatedTensorSpace {
    pub fn new(base: Arc<GradedSpace>, lower: usize, cap: usize) -> Result<Self> {
        if lower > cap {
            return Err(Error::InvalidInput(format!(
                "lower bound {lower} exceeds cap {cap}"
            )));
        }
        Ok(TruncatedTensorSpace { base, lower, cap })
    }

    pub fn words(&self, len: usize) -> Vec<Vec<usize>> {
        tuples(self.base.dim(), len)
    }

    pub fn word_degree(&self, word: &[usize]) -> (i64, Degree) {
        (word.len() as i64, self.base.degree_sum(word))
    }
}

/// A sparse element of the tensor algebra: rational combination of words.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TensorElement {
    terms: BTreeMap<Vec<usize>, Rat>,
}

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement::default()
    }

    pub fn word(w: Vec<usize>) -> Self {
        let mut t = TensorElement::default();
        t.add_term(w, rat(1));
        t
    }

    pub fn add_term(&mut self, word: Vec<usize>, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(word).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            // re-borrow to remove; keys are tiny
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rat) -> TensorElement {
        if c.is_zero() {
            return TensorElement::zero();
        }
        TensorElement {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.scale(&rat(-1)))
    }

    /// Applies a word-wise linear map to every term.
    pub fn flat_map(&self, f: impl Fn(&[usize]) -> TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (w, c) in &self.terms {
            let image = f(w);
            for (w2, c2) in image.terms {
                out.add_term(w2, c2 * c);
            }
        }
        out
    }
}

/// `d_K` applied to one word:
/// `d_K(X_0 (x) .. (x) X_l) = sum_{i=0}^{l-k}
///   (-1)^{k i + <kappa, x_0+..+x_{i-1}>}
///   X_0 (x) .. (x) K(X_i,..,X_{i+k}) (x) .. (x) X_l`,
/// and zero on words shorter than `k+1`.
pub fn hochschild_operator(k: &MultiMap, word: &[usize]) -> Result<TensorElement> {
    let arity = k.arity();
    if arity == 0 {
        return Err(Error::InvalidArity(
            "tensor operators need arity >= 1".into(),
        ));
    }
    let space = k.space();
    let g = space.group();
    let fd = arity as i64 - 1;
    let mut out = TensorElement::zero();
    if word.len() < arity {
        return Ok(out);
    }
    for i in 0..=word.len() - arity {
        let prefix = space.degree_sum(&word[..i]);
        let e = (fd * i as i64).rem_euclid(2) as u8 + g.pairing(k.weight(), &prefix)?;
        let sign = if e % 2 == 0 { rat(1) } else { rat(-1) };
        let value = k.eval_basis(&word[i..i + arity]);
        for (b, coeff) in value.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let mut w = Vec::with_capacity(word.len() - arity + 1);
            w.extend_from_slice(&word[..i]);
            w.push(b);
            w.extend_from_slice(&word[i + arity..]);
            out.add_term(w, &sign * coeff);
        }
    }
    Ok(out)
}

/// Left multiplication `X^l(w) = X (x) w` by a homogeneous vector.
pub fn side_left(space: &GradedSpace, x: &Vector, word: &[usize]) -> Result<TensorElement> {
    homogeneous_degree(space, x)?;
    let mut out = TensorElement::zero();
    for (b, coeff) in x.coeffs.iter().enumerate() {
        if !coeff.is_zero() {
            let mut w = Vec::with_capacity(word.len() + 1);
            w.push(b);
            w.extend_from_slice(word);
            out.add_term(w, coeff.clone());
        }
    }
    Ok(out)
}

/// Right multiplication
/// `X^r(X_1 (x) .. (x) X_m) = (-1)^{m + <x, x_1+..+x_m>} X_1 (x) .. (x) X`.
pub fn side_right(space: &GradedSpace, x: &Vector, word: &[usize]) -> Result<TensorElement> {
    let xdeg = homogeneous_degree(space, x)?;
    let g = space.group();
    let e = (word.len() as i64).rem_euclid(2) as u8 + g.pairing(&xdeg, &space.degree_sum(word))?;
    let sign = if e % 2 == 0 { rat(1) } else { rat(-1) };
    let mut out = TensorElement::zero();
    for (b, coeff) in x.coeffs.iter().enumerate() {
        if !coeff.is_zero() {
            let mut w = Vec::with_capacity(word.len() + 1);
            w.extend_from_slice(word);
            w.push(b);
            out.add_term(w, &sign * coeff);
        }
    }
    Ok(out)
}

fn homogeneous_degree(space: &GradedSpace, x: &Vector) -> Result<Degree> {
    let comps = x.homogeneous_components(space);
    match comps.len() {
        0 => Ok(Degree::zero(space.group().rank())),
        1 => Ok(comps[0].0.clone()),
        _ => Err(Error::Homogeneity(
            "side multiplications need a homogeneous element".into(),
        )),
    }
}

/// Report for the operator commutator law `[d_K1, d_K2] = d_{[K1,K2]}`.
#[derive(Clone, Debug)]
pub struct CommutatorReport {
    /// law holds on all words of lengths `k1+k2..=cap`
    pub law_holds: bool,
    pub law_witness: Option<Vec<usize>>,
    /// a word where `d_K1 o d_K2` differs from `d_{j(K1)K2}`
    pub naive_witness: Option<Vec<usize>>,
}

/// Verifies `[d_K1, d_K2] = d_K1 d_K2 - (-1)^{k1 k2 + <kappa1,kappa2>}
/// d_K2 d_K1 = d_{[K1,K2]^D}` on all words of lengths `k1+k2 ..= cap`, and
/// looks for a witness that the unbracketed composition differs from
/// `d_{j(K1)K2}` in general.
pub fn operator_commutator_check(
    k1: &MultiMap,
    k2: &MultiMap,
    cap: usize,
) -> Result<CommutatorReport> {
    if k1.space() != k2.space() {
        return Err(Error::SpaceMismatch);
    }
    let (fd1, fd2) = (k1.form_degree(), k2.form_degree());
    let min_len = (fd1 + fd2) as usize;
    if cap < min_len + 1 {
        return Err(Error::ArityBudget {
            needed: min_len + 1,
            cap,
        });
    }
    let g = k1.space().group();
    let pair = ((fd1 * fd2).rem_euclid(2) as u8 + g.pairing(k1.weight(), k2.weight())?) % 2;
    let bracket = delta_bracket(k1, k2)?;
    let jk = j_product(k1, k2)?;
    let dim = k1.space().dim();
    let mut law_holds = true;
    let mut law_witness = None;
    let mut naive_witness = None;
    for len in min_len..=cap {
        for word in tuples(dim, len) {
            let d2 = hochschild_operator(k2, &word)?;
            let d12 = d2.flat_map(|w| hochschild_operator(k1, w).unwrap());
            let d1 = hochschild_operator(k1, &word)?;
            let d21 = d1.flat_map(|w| hochschild_operator(k2, w).unwrap());
            let lhs = if pair == 0 {
                d12.sub(&d21)
            } else {
                d12.add(&d21)
            };
            let rhs = hochschild_operator(&bracket, &word)?;
            if lhs != rhs && law_holds {
                law_holds = false;
                law_witness = Some(word.clone());
            }
            if naive_witness.is_none() {
                let naive = hochschild_operator(&jk, &word)?;
                if d12 != naive {
                    naive_witness = Some(word.clone());
                }
            }
        }
    }
    Ok(CommutatorReport {
        law_holds,
        law_witness,
        naive_witness,
    })
}

/// `[d_K, d_K] = 2 d_K d_K = 2 d_{j(K)K}` holds exactly when
/// `k^2 + <kappa,kappa>` is odd. Returns (identity holds, parity).
pub fn self_commutator_identity(k: &MultiMap, cap: usize) -> Result<(bool, u8)> {
    let g = k.space().group();
    let fd = k.form_degree();
    let parity =
        ((fd * fd).rem_euclid(2) as u8 + g.pairing(k.weight(), k.weight())?) % 2;
    let jk = j_product(k, k)?;
    let dim = k.space().dim();
    let min_len = (2 * fd) as usize;
    let mut holds = true;
    'outer: for len in min_len..=cap {
        for word in tuples(dim, len) {
            let dk = hochschild_operator(k, &word)?;
            let dd = dk.flat_map(|w| hochschild_operator(k, w).unwrap());
            let lhs = if parity == 1 {
                dd.scale(&rat(2))
            } else {
                // even self-pairing: the graded self-commutator vanishes
                TensorElement::zero()
            };
            let rhs = hochschild_operator(&jk, &word)?.scale(&rat(2));
            if lhs != rhs {
                holds = false;
                break 'outer;
            }
        }
    }
    Ok((holds, parity))
}

/// `[X^l, Y^r] = X^l Y^r - (-1)^{1 + <x,y>} Y^r X^l` evaluated on a word.
pub fn side_commutator(
    space: &GradedSpace,
    x: &Vector,
    y: &Vector,
    word: &[usize],
) -> Result<TensorElement> {
    let xd = homogeneous_degree(space, x)?;
    let yd = homogeneous_degree(space, y)?;
    let pair = (1 + space.group().pairing(&xd, &yd)?) % 2;
    let a = side_right(space, y, word)?.flat_map(|w| side_left(space, x, w).unwrap());
    let b = side_left(space, x, word)?.flat_map(|w| side_right(space, y, w).unwrap());
    Ok(if pair == 0 { a.sub(&b) } else { a.add(&b) })
}

/// A linear operator on the truncated tensor algebra, given by its action
/// on words of lengths `min_len ..= max_len` together with a declared
/// bidegree (word-length shift, weight shift).
#[derive(Clone, Debug)]
pub struct TensorOperator {
    pub space: TruncatedTensorSpace,
    pub min_len: usize,
    pub max_len: usize,
    pub shift: i64,
    pub weight: Degree,
    action: BTreeMap<Vec<usize>, TensorElement>,
}

impl TensorOperator {
    pub fn from_fn(
        space: TruncatedTensorSpace,
        min_len: usize,
        max_len: usize,
        shift: i64,
        weight: Degree,
        f: impl Fn(&[usize]) -> Result<TensorElement>,
    ) -> Result<Self> {
        let mut action = BTreeMap::new();
        for len in min_len..=max_len {
            for word in space.words(len) {
                let img = f(&word)?;
                if !img.is_zero() {
                    action.insert(word, img);
                }
            }
        }
        Ok(TensorOperator {
            space,
            min_len,
            max_len,
            shift,
            weight,
            action,
        })
    }

    pub fn synthesize(k: &MultiMap, space: TruncatedTensorSpace) -> Result<Self> {
        if *k.space() != space.base {
            return Err(Error::SpaceMismatch);
        }
        let (lo, hi) = (space.lower, space.cap);
        TensorOperator::from_fn(
            space,
            lo,
            hi,
            -(k.form_degree()),
            k.weight().clone(),
            |w| hochschild_operator(k, w),
        )
    }

    pub fn apply(&self, word: &[usize]) -> Option<TensorElement> {
        if word.len() < self.min_len || word.len() > self.max_len {
            return None;
        }
        Some(
            self.action
                .get(word)
                .cloned()
                .unwrap_or_else(TensorElement::zero),
        )
    }
}

/// Outcome of trying to read a tensor operator as some `d_K`.
#[derive(Clone, Debug)]
pub enum Extraction {
    Recovered(MultiMap),
    Rejected {
        condition: String,
        witness: Vec<usize>,
    },
}

/// Prop-7.3-style characterization: `A = d_K` for a unique
/// `K in M^{(k,kappa)}` iff `A` kills `V^(x k)` and
/// `[X_0^l, [X_1^r, A]] = 0` for all `X_0, X_1`. The candidate `K` is read
/// off the action on `(k+1)`-words and `d_K` is re-synthesized and compared
/// across the whole window.
pub fn extract_multimap(a: &TensorOperator, k: usize, kappa: &Degree) -> Result<Extraction> {
    let base = &a.space.base;
    let g = base.group();
    let dim = base.dim();
    if a.min_len > k || a.max_len < k + 1 {
        return Err(Error::InvalidInput(
            "operator window does not cover lengths k and k+1".into(),
        ));
    }
    // condition 1: vanishes on words of length k
    for word in tuples(dim, k) {
        if let Some(img) = a.apply(&word) {
            if !img.is_zero() {
                return Ok(Extraction::Rejected {
                    condition: "A does not vanish on words of length k".into(),
                    witness: word,
                });
            }
        }
    }
    // condition 2: graded commutator [X0^l, [X1^r, A]] = 0 where defined
    let shift = a.shift;
    for x0 in 0..dim {
        let x0v = base.basis_vector(x0);
        let x0d = base.degree(x0).clone();
        for x1 in 0..dim {
            let x1v = base.basis_vector(x1);
            let x1d = base.degree(x1).clone();
            // inner bidegree pairing of X1^r = (1, x1) with A = (shift, kappa)
            let p_inner = ((shift).rem_euclid(2) as u8 + g.pairing(&x1d, kappa)?) % 2;
            // [X1^r, A] has bidegree (1 + shift, x1 + kappa)
            let p_outer =
                ((1 + shift).rem_euclid(2) as u8 + g.pairing(&x0d, &x1d.add(kappa))?) % 2;
            let lo = a.min_len.max(k);
            let hi = a.max_len.saturating_sub(2);
            for len in lo..=hi {
                for word in tuples(dim, len) {
                    let inner = |w: &[usize]| -> Result<TensorElement> {
                        // X1^r A - (-1)^{p_inner} A X1^r
                        let t1 = a
                            .apply(w)
                            .ok_or_else(|| Error::InvalidInput("window".into()))?
                            .flat_map(|u| side_right(base, &x1v, u).unwrap());
                        let t2 = side_right(base, &x1v, w)?.flat_map(|u| {
                            a.apply(u).expect("stays in window")
                        });
                        Ok(if p_inner == 0 {
                            t1.sub(&t2)
                        } else {
                            t1.add(&t2)
                        })
                    };
                    let t1 = inner(&word)?.flat_map(|u| side_left(base, &x0v, u).unwrap());
                    let t2 = side_left(base, &x0v, &word)?.flat_map(|u| inner(u).unwrap());
                    let commutator = if p_outer == 0 {
                        t2.sub(&t1)
                    } else {
                        t2.add(&t1)
                    };
                    if !commutator.is_zero() {
                        return Ok(Extraction::Rejected {
                            condition: format!(
                                "[e{x0}^l, [e{x1}^r, A]] is nonzero"
                            ),
                            witness: word,
                        });
                    }
                }
            }
        }
    }
    // read K off (k+1)-words
    let mut kmap = MultiMap::zero(base.clone(), k + 1, kappa.clone())?;
    for word in tuples(dim, k + 1) {
        if let Some(img) = a.apply(&word) {
            let mut v = base.zero_vector();
            for (w, c) in img.terms() {
                if w.len() != 1 {
                    return Ok(Extraction::Rejected {
                        condition: "image of a (k+1)-word is not a 1-word".into(),
                        witness: word.clone(),
                    });
                }
                v.coeffs[w[0]] = c.clone();
            }
            if !v.is_zero() {
                if kmap.set_entry(word.clone(), v).is_err() {
                    return Ok(Extraction::Rejected {
                        condition: "recovered entries violate weight homogeneity".into(),
                        witness: word.clone(),
                    });
                }
            }
        }
    }
    // re-synthesize and compare across the window
    for len in a.min_len..=a.max_len {
        for word in tuples(dim, len) {
            let expect = hochschild_operator(&kmap, &word)?;
            let got = a.apply(&word).unwrap();
            if expect != got {
                return Ok(Extraction::Rejected {
                    condition: "A differs from the synthesized operator".into(),
                    witness: word,
                });
            }
        }
    }
    Ok(Extraction::Recovered(kmap))
}

/// Left/right unit test through operator commutators: `e` is a left unit
/// iff `[d_mu, e^l] = id` on words of length `1..cap`, and a right unit iff
/// `[d_mu, e^r] = -id` (the minus is forced by the `(-1)^m` in the right
/// multiplication convention).
pub fn unit_check(mu: &MultiMap, e: &Vector, cap: usize) -> Result<(bool, bool)> {
    if mu.arity() != 2 {
        return Err(Error::InvalidArity("unit check needs a binary map".into()));
    }
    let space = mu.space();
    let g = space.group();
    let ed = homogeneous_degree(space, e)?;
    // d_mu has bidegree (-1, kappa); e^l, e^r have (1, ed)
    let pair = (1 + g.pairing(mu.weight(), &ed)?) % 2;
    let dim = space.dim();
    let mut left = true;
    let mut right = true;
    for len in 1..cap {
        for word in tuples(dim, len) {
            let id = TensorElement::word(word.clone());
            // [d_mu, e^l]
            let a = side_left(space, e, &word)?.flat_map(|w| hochschild_operator(mu, w).unwrap());
            let b = hochschild_operator(mu, &word)?
                .flat_map(|w| side_left(space, e, w).unwrap());
            let lcomm = if pair == 0 { a.sub(&b) } else { a.add(&b) };
            if lcomm != id {
                left = false;
            }
            // [d_mu, e^r]
            let a = side_right(space, e, &word)?.flat_map(|w| hochschild_operator(mu, w).unwrap());
            let b = hochschild_operator(mu, &word)?
                .flat_map(|w| side_right(space, e, w).unwrap());
            let rcomm = if pair == 0 { a.sub(&b) } else { a.add(&b) };
            if rcomm != id.scale(&rat(-1)) {
                right = false;
            }
            if !left && !right {
                return Ok((false, false));
            }
        }
    }
    Ok((left, right))
}

/// Decomposition of an operator on the matrix algebra `gl_d` as
/// `P^r`, `Q^l` or `P^r + Q^l`, canonicalized by tracelessness of `P`.
#[derive(Clone, Debug)]
pub struct DiffOpDecomposition {
    /// right-multiplication part, traceless representative
    pub p: Vector,
    /// left-multiplication part
    pub q: Vector,
}

/// `l_X D = [X^l, D]` on the matrix algebra, with `X^l(M) = XM`.
fn left_mult_op(mu: &MultiMap, x: usize) -> LinearMap {
    let space = mu.space().clone();
    let mut m = LinearMap::zero(space.clone(), space.clone());
    for c in 0..space.dim() {
        let img = mu.eval_basis(&[x, c]);
        for r in 0..space.dim() {
            m.matrix[r][c] = img.coeffs[r].clone();
        }
    }
    m
}

fn right_mult_op(mu: &MultiMap, x: usize) -> LinearMap {
    let space = mu.space().clone();
    let mut m = LinearMap::zero(space.clone(), space.clone());
    for c in 0..space.dim() {
        let img = mu.eval_basis(&[c, x]);
        for r in 0..space.dim() {
            m.matrix[r][c] = img.coeffs[r].clone();
        }
    }
    m
}

fn commutator(a: &LinearMap, b: &LinearMap) -> LinearMap {
    a.compose(b)
        .unwrap()
        .sub(&b.compose(a).unwrap())
        .unwrap()
}

/// Iterated condition `l^p r^q Delta = 0` over all basis multiplications.
pub fn diffop_condition(mu: &MultiMap, delta: &LinearMap, p: usize, q: usize) -> Result<bool> {
    fn rec(
        mu: &MultiMap,
        delta: &LinearMap,
        p: usize,
        q: usize,
    ) -> bool {
        if p > 0 {
            for x in 0..mu.space().dim() {
                let l = left_mult_op(mu, x);
                if !rec(mu, &commutator(&l, delta), p - 1, q) {
                    return false;
                }
            }
            true
        } else if q > 0 {
            for y in 0..mu.space().dim() {
                let r = right_mult_op(mu, y);
                if !rec(mu, &commutator(&r, delta), p, q - 1) {
                    return false;
                }
            }
            true
        } else {
            delta.is_zero()
        }
    }
    if delta.domain != *mu.space() || delta.codomain != *mu.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(rec(mu, delta, p, q))
}

/// Solves `Delta = P^r + Q^l` on `gl_d` (entries indexed as `e_{ij} = d*i+j`)
/// with `trace(P) = 0`. Fails when the order condition does not hold.
pub fn diffop_decompose(
    d: usize,
    mu: &MultiMap,
    delta: &LinearMap,
    p_order: usize,
    q_order: usize,
) -> Result<DiffOpDecomposition> {
    let dim = mu.space().dim();
    if dim != d * d {
        return Err(Error::DimensionMismatch(format!(
            "algebra dimension {dim} is not {d}^2"
        )));
    }
    if p_order == 0 || q_order == 0 {
        return Err(Error::InvalidInput("orders must be >= 1".into()));
    }
    if !diffop_condition(mu, delta, p_order, q_order)? {
        return Err(Error::Defective(
            "operator fails the iterated commutator condition".into(),
        ));
    }
    // unknowns (P, Q): equations Delta(e_m) = e_m P + Q e_m for all m
    let unknowns = GradedSpace::ungraded(2 * dim);
    let equations = GradedSpace::ungraded(dim * dim);
    let mut system = LinearMap::zero(unknowns, equations);
    let mut target = Vector::zero(dim * dim);
    for m in 0..dim {
        let dm = delta.column(m);
        for r in 0..dim {
            target.coeffs[m * dim + r] = dm.coeffs[r].clone();
        }
        for u in 0..dim {
            // coefficient of P_u in (e_m P)_r is mu(e_m, e_u)_r
            let mp = mu.eval_basis(&[m, u]);
            let qm = mu.eval_basis(&[u, m]);
            for r in 0..dim {
                system.matrix[m * dim + r][u] = mp.coeffs[r].clone();
                system.matrix[m * dim + r][dim + u] = qm.coeffs[r].clone();
            }
        }
    }
    let sol = solve(&system, &target).ok_or_else(|| {
        Error::Inconsistent("order condition held but no P^r + Q^l solution exists".into())
    })?;
    let mut p = Vector::from_coeffs(sol.coeffs[..dim].to_vec());
    let mut q = Vector::from_coeffs(sol.coeffs[dim..].to_vec());
    // normalize: subtract (tr P / d) * I from P, add it to Q
    let mut tr = Rat::zero();
    for i in 0..d {
        tr += p.coeffs[i * d + i].clone();
    }
    let c = tr / rat(d as i64);
    for i in 0..d {
        p.coeffs[i * d + i] -= c.clone();
        q.coeffs[i * d + i] += c.clone();
    }
    Ok(DiffOpDecomposition { p, q })
}

/// `P^r + Q^l` as a linear operator on the algebra (for round trips).
pub fn two_sided_operator(mu: &MultiMap, p: &Vector, q: &Vector) -> LinearMap {
    let space = mu.space().clone();
    let dim = space.dim();
    let mut m = LinearMap::zero(space.clone(), space);
    for c in 0..dim {
        let mut img = Vector::zero(dim);
        for (u, cp) in p.coeffs.iter().enumerate() {
            if !cp.is_zero() {
                img.add_assign_scaled(&mu.eval_basis(&[c, u]), cp);
            }
        }
        for (u, cq) in q.coeffs.iter().enumerate() {
            if !cq.is_zero() {
                img.add_assign_scaled(&mu.eval_basis(&[u, c]), cq);
            }
        }
        for r in 0..dim {
            m.matrix[r][c] = img.coeffs[r].clone();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn operator_vanishes_below_and_at_arity_minus_one() {
        let mu = examples::gl2();
        // word of length k = 1 (binary: form degree 1): zero
        assert!(hochschild_operator(&mu, &[2]).unwrap().is_zero());
        // word of length k+1 = 2: the single term mu(X0, X1)
        let img = hochschild_operator(&mu, &[0, 1]).unwrap();
        let expect = mu.eval_basis(&[0, 1]);
        for (w, c) in img.terms() {
            assert_eq!(w.len(), 1);
            assert_eq!(*c, expect.coeffs[w[0]]);
        }
    }

    #[test]
    fn binary_three_word_two_terms() {
        // mu on a 3-word: mu(X0,X1)(x)X2 - X0(x)mu(X1,X2)
        let mu = examples::gl2();
        let img = hochschild_operator(&mu, &[0, 0, 1]).unwrap();
        let mut expect = TensorElement::zero();
        let m01 = mu.eval_basis(&[0, 0]);
        for (b, c) in m01.coeffs.iter().enumerate() {
            if !c.is_zero() {
                expect.add_term(vec![b, 1], c.clone());
            }
        }
        let m12 = mu.eval_basis(&[0, 1]);
        for (b, c) in m12.coeffs.iter().enumerate() {
            if !c.is_zero() {
                expect.add_term(vec![0, b], -c.clone());
            }
        }
        assert_eq!(img, expect);
    }

    #[test]
    fn side_mults_commute() {
        let space = GradedSpace::new(
            crate::grading::GradingGroup::standard(1),
            vec![Degree(vec![0]), Degree(vec![1])],
        )
        .unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let xv = space.basis_vector(x);
                let yv = space.basis_vector(y);
                for len in 0..=4usize {
                    for word in tuples(2, len) {
                        let c = side_commutator(&space, &xv, &yv, &word).unwrap();
                        assert!(c.is_zero(), "x={x} y={y} word={word:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn side_right_sign_on_even_two_word() {
        let space = GradedSpace::ungraded(3);
        let x = space.basis_vector(2);
        let img = side_right(&space, &x, &[0, 1]).unwrap();
        let expect = TensorElement::word(vec![0, 1, 2]);
        assert_eq!(img, expect); // (-1)^{2+0} = +1
        // and on a 1-word the sign flips
        let img = side_right(&space, &x, &[0]).unwrap();
        assert_eq!(img, TensorElement::word(vec![0, 2]).scale(&rat(-1)));
    }

    #[test]
    fn side_mult_rejects_inhomogeneous() {
        let space = GradedSpace::new(
            crate::grading::GradingGroup::standard(1),
            vec![Degree(vec![0]), Degree(vec![1])],
        )
        .unwrap();
        let mixed = space.basis_vector(0).add(&space.basis_vector(1));
        assert!(side_left(&space, &mixed, &[0]).is_err());
    }

    #[test]
    fn commutator_law_for_associative_mu() {
        // dmu o dmu = d_{j(mu)mu} = 0, and a (1)-witness exists elsewhere
        let mu = examples::gl2();
        let report = operator_commutator_check(&mu, &mu, 4).unwrap();
        assert!(report.law_holds);
        // for associative mu, dmu dmu actually equals d_{j(mu)mu} = 0; the
        // naive inequality needs a non-associative pairing, checked below
        let (holds, parity) = self_commutator_identity(&mu, 4).unwrap();
        assert!(holds);
        assert_eq!(parity, 1);
    }

    #[test]
    fn unit_check_gl2() {
        let mu = examples::gl2();
        assert_eq!(unit_check(&mu, &examples::gl2_unit(), 4).unwrap(), (true, true));
        let zero = Vector::zero(4);
        assert_eq!(unit_check(&mu, &zero, 4).unwrap(), (false, false));
        // e11 alone is a one-sided idempotent, not a unit
        let e11 = mu.space().basis_vector(0);
        assert_eq!(unit_check(&mu, &e11, 4).unwrap(), (false, false));
    }

    #[test]
    fn unit_check_nilpotent_has_none() {
        // strictly upper triangular 2x2: e12 only, no unit
        let space = GradedSpace::ungraded(1);
        let mu = MultiMap::zero(space.clone(), 2, Degree::zero(0)).unwrap();
        let e = space.basis_vector(0);
        assert_eq!(unit_check(&mu, &e, 4).unwrap(), (false, false));
    }

    #[test]
    fn extract_round_trip() {
        let mu = examples::gl2();
        let tspace = TruncatedTensorSpace::new(mu.space().clone(), 0, 4).unwrap();
        let op = TensorOperator::synthesize(&mu, tspace).unwrap();
        match extract_multimap(&op, 1, &Degree::zero(0)).unwrap() {
            Extraction::Recovered(k) => assert_eq!(&k, &mu),
            Extraction::Rejected { condition, witness } => {
                panic!("rejected: {condition} at {witness:?}")
            }
        }
    }

    #[test]
    fn extract_rejects_side_mult() {
        let mu = examples::gl2();
        let space = mu.space().clone();
        let tspace = TruncatedTensorSpace::new(space.clone(), 0, 3).unwrap();
        let e0 = space.basis_vector(0);
        let op = TensorOperator::from_fn(
            tspace,
            0,
            2,
            1,
            Degree::zero(0),
            |w| side_left(&space, &e0, w),
        )
        .unwrap();
        // X^l does not vanish on k-words for any k in the window
        match extract_multimap(&op, 1, &Degree::zero(0)).unwrap() {
            Extraction::Rejected { .. } => {}
            Extraction::Recovered(_) => panic!("side multiplication accepted as d_K"),
        }
    }

    #[test]
    fn extract_zero_operator() {
        let mu = examples::gl2();
        let tspace = TruncatedTensorSpace::new(mu.space().clone(), 0, 3).unwrap();
        let op = TensorOperator::from_fn(tspace, 0, 3, -1, Degree::zero(0), |_| {
            Ok(TensorElement::zero())
        })
        .unwrap();
        match extract_multimap(&op, 1, &Degree::zero(0)).unwrap() {
            Extraction::Recovered(k) => assert!(k.is_zero()),
            _ => panic!("zero operator must extract to zero"),
        }
    }

    #[test]
    fn diffop_ad_decomposition() {
        // Delta = ad A = A^l - A^r: order (1,1), Q = A, P = -A (traceless rep)
        let d = 2usize;
        let mu = examples::gl2();
        let mut a = Vector::zero(4);
        a.coeffs[1] = rat(3); // A = 3 e12 (traceless)
        a.coeffs[0] = rat(1);
        a.coeffs[3] = rat(-1); // plus diag(1,-1)
        let al = two_sided_operator(&mu, &Vector::zero(4), &a); // A^l
        let ar = two_sided_operator(&mu, &a, &Vector::zero(4)); // A^r
        let delta = al.sub(&ar).unwrap();
        assert!(diffop_condition(&mu, &delta, 1, 1).unwrap());
        let dec = diffop_decompose(d, &mu, &delta, 1, 1).unwrap();
        assert_eq!(dec.q, a);
        assert_eq!(dec.p, a.scale(&rat(-1)));
        // round trip
        let rebuilt = two_sided_operator(&mu, &dec.p, &dec.q);
        assert_eq!(rebuilt.matrix, delta.matrix);
    }

    #[test]
    fn diffop_zero_is_canonical() {
        let mu = examples::gl2();
        let delta = LinearMap::zero(mu.space().clone(), mu.space().clone());
        let dec = diffop_decompose(2, &mu, &delta, 1, 1).unwrap();
        assert!(dec.p.is_zero());
        assert!(dec.q.is_zero());
    }

    #[test]
    fn diffop_condition_rejects_generic_operator() {
        let mu = examples::gl2();
        let mut delta = LinearMap::zero(mu.space().clone(), mu.space().clone());
        // a rank-one projector-like map is not of order (1,1)
        delta.matrix[0][3] = rat(1);
        delta.matrix[3][0] = rat(1);
        assert!(!diffop_condition(&mu, &delta, 1, 1).unwrap());
        assert!(diffop_decompose(2, &mu, &delta, 1, 1).is_err());
    }
}
