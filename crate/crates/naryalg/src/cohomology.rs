//! Hochschild and Chevalley-Eilenberg coboundary operators as bracket
//! restrictions, their first-order explicit formulas as an independent
//! evaluation path, cup products, exact cohomology dimensions, and the
//! alternation chain map between the two theories.
//!
//! Conventions. A k-cochain is a map on the extension space `E` with `k`
//! base arguments, fiber values and weight `(1, c)`. The coboundary is the
//! negative of the bracket restriction,
//! `d_P C = -[P, C]^D` (Hochschild) and `d_P C = -[P, C]^` (Chevalley);
//! the sign reproduces the classical first-order formulas
//! (`(dw)(X) = Xw - wX` for a 0-cochain over a bimodule, and
//! `dC(X,Y) = rho(X)C(Y) - rho(Y)C(X) - C(mu(X,Y))` for Lie 1-cochains).
//! The explicit formulas below carry the exponents obtained by expanding
//! the bracket; where the graded weight pairing enters they follow the
//! expansion, not any shorthand.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grading::{graded_sign, permutations, Degree};
use crate::linalg::{rank_and_kernel, GradedSpace, LinearMap, Vector};
use crate::multilinear::{
    alternator_budgeted, delta_bracket, tuples, wedge_bracket_budgeted, MultiMap, SkewMultiMap,
    DEFAULT_ARITY_BUDGET,
};
use crate::scalar::{factorial, rat};
use crate::structures::ExtensionSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Hochschild,
    Chevalley,
}

/// A fiber-valued cochain: `k` base arguments, weight `(1, c)` on `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    map: MultiMap,
    flavor: Flavor,
}

impl Cochain {
    pub fn new(ext: &ExtensionSpace, map: MultiMap, flavor: Flavor) -> Result<Self> {
        if *map.space() != ext.total {
            return Err(Error::SpaceMismatch);
        }
        let w = map.weight();
        if w.0.first().copied() != Some(1) {
            return Err(Error::Homogeneity(format!(
                "cochain weight must have fiber level 1, got {:?}",
                w
            )));
        }
        for (t, _) in map.entries() {
            if t.iter().any(|&i| ext.is_fiber(i)) {
                return Err(Error::Homogeneity(format!(
                    "cochain entry {t:?} takes a fiber input"
                )));
            }
        }
        if flavor == Flavor::Chevalley && !map.is_graded_skew()? {
            return Err(Error::NotSkew("Chevalley cochains must be skew".into()));
        }
        Ok(Cochain { map, flavor })
    }

    pub fn map(&self) -> &MultiMap {
        &self.map
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Number of base arguments.
    pub fn degree(&self) -> usize {
        self.map.arity()
    }

    /// The `G`-part of the weight.
    pub fn g_weight(&self) -> Degree {
        Degree(self.map.weight().0[1..].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_zero()
    }
}

/// `G`-part of the weight of a module structure on `E`.
fn g_weight_of(p: &MultiMap) -> Degree {
    Degree(p.weight().0[1..].to_vec())
}

/// Parity of `||deg P||^2 = (n-1)^2 + <p,p>`; the bracket restriction is a
/// differential exactly when this is odd.
pub fn hochschild_parity(ext: &ExtensionSpace, p: &MultiMap) -> Result<u8> {
    if *p.space() != ext.total {
        return Err(Error::SpaceMismatch);
    }
    if p.weight().0.first().copied() != Some(0) {
        return Err(Error::Homogeneity(
            "module structures have fiber level 0".into(),
        ));
    }
    let kappa = g_weight_of(p);
    let gp = ext.base.group().pairing(&kappa, &kappa)?;
    let fd = p.form_degree().rem_euclid(2) as u8;
    Ok((fd + gp) % 2)
}

fn require_hochschild_parity(ext: &ExtensionSpace, p: &MultiMap) -> Result<()> {
    let parity = hochschild_parity(ext, p)?;
    if parity != 1 {
        return Err(Error::Parity(format!(
            "(n-1)^2 + <p,p> = 0 mod 2 for arity {} and weight {:?}; \
             the bracket with P does not square to zero",
            p.arity(),
            p.weight()
        )));
    }
    Ok(())
}

fn require_chevalley(p: &MultiMap) -> Result<()> {
    if p.arity() % 2 != 0 {
        return Err(Error::Parity(format!(
            "no Chevalley coboundary operator at odd arity {}",
            p.arity()
        )));
    }
    if !p.weight().is_zero() {
        return Err(Error::Homogeneity(
            "Chevalley module structures carry weight zero".into(),
        ));
    }
    Ok(())
}

/// `d_P C = -[P, C]^D`, the Hochschild coboundary.
pub fn hochschild_differential(ext: &ExtensionSpace, p: &MultiMap, c: &Cochain) -> Result<Cochain> {
    if c.flavor != Flavor::Hochschild {
        return Err(Error::InvalidInput("expected a Hochschild cochain".into()));
    }
    require_hochschild_parity(ext, p)?;
    let bracket = delta_bracket(p, &c.map)?;
    Cochain::new(ext, bracket.scale(&rat(-1)), Flavor::Hochschild)
}

/// The first-order Hochschild formula, an independent evaluation path:
/// with `p = n-1`, `k+1` the argument count of `C`, `kappa` the weight of
/// the structure and `c` the weight of the cochain,
///
/// `(d_P C)(X_0..X_{k+p}) =
///    - sum_{i=0}^{k} (-1)^{p i + <kappa, c> + <kappa, x_0+..+x_{i-1}>}
///        C(X_0,..,P(X_i..X_{i+p}),..,X_{k+p})
///    + sum_{j=0}^{p} (-1)^{p k + k j + <c, x_0+..+x_{j-1}>}
///        P(X_0,..,C(X_j..X_{j+k}),..,X_{k+p})`.
pub fn hochschild_differential_explicit(
    ext: &ExtensionSpace,
    p: &MultiMap,
    c: &Cochain,
) -> Result<Cochain> {
    if c.flavor != Flavor::Hochschild {
        return Err(Error::InvalidInput("expected a Hochschild cochain".into()));
    }
    require_hochschild_parity(ext, p)?;
    let g = ext.base.group();
    let kappa = g_weight_of(p);
    let cw = c.g_weight();
    let kp_pair = g.pairing(&kappa, &cw)?;
    let n = p.arity();
    let pf = n - 1; // insertion span of the structure
    let kc = c.map.arity(); // argument count of the cochain
    let kf = kc as i64 - 1; // its form degree
    let vdim = ext.base.dim();
    let out_args = kc + pf;
    let weight = c.map.weight().add(p.weight());
    let mut out = MultiMap::zero(ext.total.clone(), out_args, weight)?;
    for vt in tuples(vdim, out_args) {
        let t: Vec<usize> = vt.iter().map(|&i| ext.base_index(i)).collect();
        let mut acc = ext.total.zero_vector();
        // C(.., P(..), ..) terms
        for i in 0..kc {
            // exponent p*i + <kappa,c> + <kappa, x_0+..+x_{i-1}>
            let prefix = Degree::sum(g.rank(), vt[..i].iter().map(|&b| ext.base.degree(b)));
            let e = (pf as i64 * i as i64).rem_euclid(2) as u8
                + kp_pair
                + g.pairing(&kappa, &prefix)?;
            let sign = if e % 2 == 0 { rat(-1) } else { rat(1) };
            let inner = p.eval_basis(&t[i..i + n]);
            // expand into C at slot i
            let mut args = Vec::with_capacity(kc);
            args.extend_from_slice(&t[..i]);
            args.push(0);
            args.extend_from_slice(&t[i + n..]);
            for (b, coeff) in inner.coeffs.iter().enumerate() {
                if !coeff.is_zero() {
                    args[i] = b;
                    acc.add_assign_scaled(&c.map.eval_basis(&args), &(&sign * coeff));
                }
            }
        }
        // P(.., C(..), ..) terms
        for j in 0..=pf {
            let prefix = Degree::sum(g.rank(), vt[..j].iter().map(|&b| ext.base.degree(b)));
            let e = ((pf as i64 * kf) + (kf * j as i64)).rem_euclid(2) as u8
                + g.pairing(&cw, &prefix)?;
            let sign = if e % 2 == 0 { rat(1) } else { rat(-1) };
            let inner = c.map.eval_basis(&t[j..j + kc]);
            let mut args = Vec::with_capacity(n);
            args.extend_from_slice(&t[..j]);
            args.push(0);
            args.extend_from_slice(&t[j + kc..]);
            for (b, coeff) in inner.coeffs.iter().enumerate() {
                if !coeff.is_zero() {
                    args[j] = b;
                    acc.add_assign_scaled(&p.eval_basis(&args), &(&sign * coeff));
                }
            }
        }
        if !acc.is_zero() {
            out.accumulate(t, acc);
        }
    }
    Cochain::new(ext, out, Flavor::Hochschild)
}

/// `d_P C = -[P, C]^`, the Chevalley-Eilenberg coboundary (even arity).
pub fn chevalley_differential(
    ext: &ExtensionSpace,
    p: &SkewMultiMap,
    c: &Cochain,
) -> Result<Cochain> {
    chevalley_differential_budgeted(ext, p, c, DEFAULT_ARITY_BUDGET)
}

pub fn chevalley_differential_budgeted(
    ext: &ExtensionSpace,
    p: &SkewMultiMap,
    c: &Cochain,
    cap: usize,
) -> Result<Cochain> {
    if c.flavor != Flavor::Chevalley {
        return Err(Error::InvalidInput("expected a Chevalley cochain".into()));
    }
    require_chevalley(p)?;
    let skew_c = SkewMultiMap::new(c.map.clone())?;
    let bracket = wedge_bracket_budgeted(p, &skew_c, cap)?;
    Cochain::new(ext, bracket.as_map().scale(&rat(-1)), Flavor::Chevalley)
}

/// The permutation-sum Chevalley formula (independent path): with `n` the
/// structure arity, `m = k+1` the cochain argument count and `gamma` its
/// weight,
///
/// `(d_P C)(X_0..X_{m+n-2}) =
///    (1/((n-1)! m!)) sum_sigma s(sigma,x)
///      (-1)^{<x_{sigma(0)}+..+x_{sigma(n-2)}, gamma>}
///      P(X_{sigma(0)},..,X_{sigma(n-2)}, C(X_{sigma(n-1)},..))
///  - (1/(n! (m-1)!)) sum_sigma s(sigma,x)
///      C(mu(X_{sigma(0)},..,X_{sigma(n-1)}), X_{sigma(n)},..)`.
pub fn chevalley_differential_explicit(
    ext: &ExtensionSpace,
    p: &SkewMultiMap,
    c: &Cochain,
) -> Result<Cochain> {
    if c.flavor != Flavor::Chevalley {
        return Err(Error::InvalidInput("expected a Chevalley cochain".into()));
    }
    require_chevalley(p)?;
    let g = ext.base.group();
    let gamma = c.g_weight();
    let n = p.arity();
    let m = c.map.arity();
    let out_args = m + n - 1;
    let vdim = ext.base.dim();
    let weight = c.map.weight().add(p.weight());
    let mut out = MultiMap::zero(ext.total.clone(), out_args, weight)?;
    let perms = permutations(out_args);
    let rho_pref = rat(1) / (factorial(n - 1) * factorial(m));
    let mu_pref = rat(1) / (factorial(n) * factorial(m - 1));
    for vt in tuples(vdim, out_args) {
        let t: Vec<usize> = vt.iter().map(|&i| ext.base_index(i)).collect();
        let degs: Vec<Degree> = vt.iter().map(|&i| ext.base.degree(i).clone()).collect();
        let e_degs = ext.total.tuple_degrees(&t);
        let mut acc = ext.total.zero_vector();
        for sigma in &perms {
            let s = graded_sign(ext.total.group(), sigma, &e_degs)?;
            let s_rat = rat(s as i64);
            // rho-type term: P(X_s0,..,X_s(n-2), C(rest))
            {
                let prefix = Degree::sum(
                    g.rank(),
                    sigma[..n - 1].iter().map(|&j| &degs[j]),
                );
                let wp = g.pairing(&prefix, &gamma)?;
                let inner_tuple: Vec<usize> = sigma[n - 1..].iter().map(|&j| t[j]).collect();
                let inner = c.map.eval_basis(&inner_tuple);
                if !inner.is_zero() {
                    let mut args: Vec<usize> = sigma[..n - 1].iter().map(|&j| t[j]).collect();
                    args.push(0);
                    let mut term = ext.total.zero_vector();
                    for (b, coeff) in inner.coeffs.iter().enumerate() {
                        if !coeff.is_zero() {
                            args[n - 1] = b;
                            term.add_assign_scaled(&p.eval_basis(&args), coeff);
                        }
                    }
                    let sign = if wp == 0 { rho_pref.clone() } else { -rho_pref.clone() };
                    acc.add_assign_scaled(&term, &(&sign * &s_rat));
                }
            }
            // mu-type term: C(mu(X_s0..X_s(n-1)), rest)
            {
                let inner_tuple: Vec<usize> = sigma[..n].iter().map(|&j| t[j]).collect();
                let inner = p.eval_basis(&inner_tuple);
                if !inner.is_zero() {
                    let mut args: Vec<usize> = Vec::with_capacity(m);
                    args.push(0);
                    args.extend(sigma[n..].iter().map(|&j| t[j]));
                    let mut term = ext.total.zero_vector();
                    for (b, coeff) in inner.coeffs.iter().enumerate() {
                        if !coeff.is_zero() {
                            args[0] = b;
                            term.add_assign_scaled(&c.map.eval_basis(&args), coeff);
                        }
                    }
                    acc.add_assign_scaled(&term, &(-&mu_pref * &s_rat));
                }
            }
        }
        if !acc.is_zero() {
            out.accumulate(t, acc);
        }
    }
    Cochain::new(ext, out, Flavor::Chevalley)
}

/// The pointwise binary Chevalley formula (second independent path for
/// `n = 2`), with `alpha_i(x) = i + <x_i, x_0+..+x_{i-1}>`:
///
/// `(d_P C)(X_0..X_k) =
///    sum_i (-1)^{alpha_i(x) + <x_i, gamma>} rho(X_i) C(..hat X_i..)
///  + sum_{i<j} (-1)^{alpha_i + alpha_j + <x_i,x_j>}
///      C(mu(X_i,X_j), ..hat X_i..hat X_j..)`.
pub fn chevalley_differential_pointwise(
    ext: &ExtensionSpace,
    p: &SkewMultiMap,
    c: &Cochain,
) -> Result<Cochain> {
    if p.arity() != 2 {
        return Err(Error::InvalidArity("pointwise formula is binary".into()));
    }
    if c.flavor != Flavor::Chevalley {
        return Err(Error::InvalidInput("expected a Chevalley cochain".into()));
    }
    require_chevalley(p)?;
    let g = ext.base.group();
    let gamma = c.g_weight();
    let m = c.map.arity();
    let out_args = m + 1;
    let vdim = ext.base.dim();
    let weight = c.map.weight().add(p.weight());
    let mut out = MultiMap::zero(ext.total.clone(), out_args, weight)?;
    for vt in tuples(vdim, out_args) {
        let t: Vec<usize> = vt.iter().map(|&i| ext.base_index(i)).collect();
        let degs: Vec<Degree> = vt.iter().map(|&i| ext.base.degree(i).clone()).collect();
        let alpha = |i: usize| -> Result<u8> {
            let prefix = Degree::sum(g.rank(), degs[..i].iter());
            Ok(((i as i64).rem_euclid(2) as u8 + g.pairing(&degs[i], &prefix)?) % 2)
        };
        let mut acc = ext.total.zero_vector();
        for i in 0..out_args {
            let e = (alpha(i)? + g.pairing(&degs[i], &gamma)?) % 2;
            let rest: Vec<usize> = (0..out_args).filter(|&a| a != i).map(|a| t[a]).collect();
            let inner = c.map.eval_basis(&rest);
            if inner.is_zero() {
                continue;
            }
            // rho(X_i) w = P(X_i, w)
            let mut term = ext.total.zero_vector();
            for (b, coeff) in inner.coeffs.iter().enumerate() {
                if !coeff.is_zero() {
                    term.add_assign_scaled(&p.eval_basis(&[t[i], b]), coeff);
                }
            }
            let sign = if e == 0 { rat(1) } else { rat(-1) };
            acc.add_assign_scaled(&term, &sign);
        }
        for i in 0..out_args {
            for j in i + 1..out_args {
                let e = (alpha(i)? + alpha(j)? + g.pairing(&degs[i], &degs[j])?) % 2;
                let inner = p.eval_basis(&[t[i], t[j]]);
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = (0..out_args)
                    .filter(|&a| a != i && a != j)
                    .map(|a| t[a])
                    .collect();
                let mut args = Vec::with_capacity(m);
                args.push(0);
                args.extend_from_slice(&rest);
                let mut term = ext.total.zero_vector();
                for (b, coeff) in inner.coeffs.iter().enumerate() {
                    if !coeff.is_zero() {
                        args[0] = b;
                        term.add_assign_scaled(&c.map.eval_basis(&args), coeff);
                    }
                }
                let sign = if e == 0 { rat(1) } else { rat(-1) };
                acc.add_assign_scaled(&term, &sign);
            }
        }
        if !acc.is_zero() {
            out.accumulate(t, acc);
        }
    }
    Cochain::new(ext, out, Flavor::Chevalley)
}

/// `C1 . C2 = [C1, [C2, nu]]` in the bracket matching the flavor. `nu` is a
/// multiplication on the fiber: arity 2, weight `(-1, *)` on `E`, skew over
/// `Z x G` for the Chevalley flavor (i.e. `G`-graded symmetric on `W`).
pub fn cup_product(
    ext: &ExtensionSpace,
    c1: &Cochain,
    c2: &Cochain,
    nu: &MultiMap,
    cap: usize,
) -> Result<Cochain> {
    if c1.flavor != c2.flavor {
        return Err(Error::InvalidInput("mixed cochain flavors".into()));
    }
    if *nu.space() != ext.total || nu.arity() != 2 || nu.weight().0.first().copied() != Some(-1) {
        return Err(Error::Homogeneity(
            "coefficient multiplication must be binary of fiber level -1".into(),
        ));
    }
    match c1.flavor {
        Flavor::Hochschild => {
            let inner = delta_bracket(&c2.map, nu)?;
            let outer = delta_bracket(&c1.map, &inner)?;
            Cochain::new(ext, outer, Flavor::Hochschild)
        }
        Flavor::Chevalley => {
            let nu_skew = SkewMultiMap::new(nu.clone())?;
            let c2s = SkewMultiMap::new(c2.map.clone())?;
            let c1s = SkewMultiMap::new(c1.map.clone())?;
            let inner = wedge_bracket_budgeted(&c2s, &nu_skew, cap)?;
            let outer = wedge_bracket_budgeted(&c1s, &inner, cap)?;
            Cochain::new(ext, outer.into_map(), Flavor::Chevalley)
        }
    }
}

/// Direct two-term evaluation of the Hochschild cup product,
/// `(C1 . C2)(X) = (-1)^{e_b} nu(C1(X_0..), C2(X_..))
///              + (-1)^{e_a} nu(C2(X_0..), C1(X_..))`,
/// with the exponents read off from the bracket expansion. Independent of
/// the generic insertion machinery; tested against `cup_product`.
pub fn cup_product_direct(
    ext: &ExtensionSpace,
    c1: &Cochain,
    c2: &Cochain,
    nu: &MultiMap,
) -> Result<Cochain> {
    if c1.flavor != Flavor::Hochschild || c2.flavor != Flavor::Hochschild {
        return Err(Error::InvalidInput(
            "direct cup evaluation is for the Hochschild flavor".into(),
        ));
    }
    let g = ext.base.group();
    let (a1, a2) = (c1.map.arity(), c2.map.arity());
    let (cw1, cw2) = (c1.g_weight(), c2.g_weight());
    let nu_g = Degree(nu.weight().0[1..].to_vec());
    let vdim = ext.base.dim();
    let out_args = a1 + a2;
    let weight = c1
        .map
        .weight()
        .add(c2.map.weight())
        .add(nu.weight());
    let mut out = MultiMap::zero(ext.total.clone(), out_args, weight)?;
    let fd1 = (a1 as i64 - 1).rem_euclid(2) as u8;
    let fd2 = (a2 as i64 - 1).rem_euclid(2) as u8;
    let c1c2 = g.pairing(&cw1, &cw2)?;
    let c1nu = g.pairing(&cw1, &nu_g)?;
    let c2nu = g.pairing(&cw2, &nu_g)?;
    for vt in tuples(vdim, out_args) {
        let t: Vec<usize> = vt.iter().map(|&i| ext.base_index(i)).collect();
        let mut acc = ext.total.zero_vector();
        // e_a: nu(C2(X_0..X_{a2-1}), C1(X_{a2}..))
        {
            let prefix = Degree::sum(g.rank(), vt[..a2].iter().map(|&b| ext.base.degree(b)));
            let e = (fd1 * (a2 as i64).rem_euclid(2) as u8)
                + c1c2
                + c1nu
                + g.pairing(&cw1, &prefix)?
                + 1
                + c2nu;
            let v2 = c2.map.eval_basis(&t[..a2]);
            let v1 = c1.map.eval_basis(&t[a2..]);
            let term = eval_nu(nu, &v2, &v1);
            let sign = if e % 2 == 0 { rat(1) } else { rat(-1) };
            acc.add_assign_scaled(&term, &sign);
        }
        // e_b: nu(C1(X_0..X_{a1-1}), C2(X_{a1}..))
        {
            let prefix = Degree::sum(g.rank(), vt[..a1].iter().map(|&b| ext.base.degree(b)));
            let e = fd2 + c1nu + c2nu + g.pairing(&cw2, &prefix)?;
            let v1 = c1.map.eval_basis(&t[..a1]);
            let v2 = c2.map.eval_basis(&t[a1..]);
            let term = eval_nu(nu, &v1, &v2);
            let sign = if e % 2 == 0 { rat(1) } else { rat(-1) };
            acc.add_assign_scaled(&term, &sign);
        }
        if !acc.is_zero() {
            out.accumulate(t, acc);
        }
    }
    Cochain::new(ext, out, Flavor::Hochschild)
}

fn eval_nu(nu: &MultiMap, a: &Vector, b: &Vector) -> Vector {
    let mut out = nu.space().zero_vector();
    for (i, ca) in a.coeffs.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.coeffs.iter().enumerate() {
            if !cb.is_zero() {
                out.add_assign_scaled(&nu.eval_basis(&[i, j]), &(ca * cb));
            }
        }
    }
    out
}

/// The chain map from Hochschild into Chevalley theory: degreewise
/// `C -> (arity)! a(C)`, the same scaling that turns a multiplication into
/// its commutator. Satisfies
/// `d_{gamma P} (Phi C) = Phi (d_P C)` on the nose.
pub fn alternation_chain_map(ext: &ExtensionSpace, c: &Cochain, cap: usize) -> Result<Cochain> {
    if c.flavor != Flavor::Hochschild {
        return Err(Error::InvalidInput("expected a Hochschild cochain".into()));
    }
    let alt = alternator_budgeted(&c.map, cap)?;
    let scaled = alt.scale(&factorial(c.map.arity()));
    Cochain::new(ext, scaled, Flavor::Chevalley)
}

/// Strictly increasing index tuples of the given length.
pub fn increasing_tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    if len > dim {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..len).collect();
    loop {
        out.push(cur.clone());
        // next combination
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < dim - (len - i) {
                cur[i] += 1;
                for j in i + 1..len {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A cochain basis element: input tuple (base indices) and fiber output.
pub type CochainIndex = (Vec<usize>, usize);

/// Enumerates the cochain basis in degree `k`, optionally restricted to one
/// `G`-weight. Hochschild cochains run over all base tuples, Chevalley
/// cochains over strictly increasing ones.
pub fn cochain_basis(
    ext: &ExtensionSpace,
    flavor: Flavor,
    k: usize,
    weight: Option<&Degree>,
) -> Vec<CochainIndex> {
    let tups = match flavor {
        Flavor::Hochschild => tuples(ext.base.dim(), k),
        Flavor::Chevalley => increasing_tuples(ext.base.dim(), k),
    };
    let rank = ext.base.group().rank();
    let mut out = Vec::new();
    for t in tups {
        let tdeg = Degree::sum(rank, t.iter().map(|&i| ext.base.degree(i)));
        for w in 0..ext.fiber.dim() {
            if let Some(c) = weight {
                let want = tdeg.add(c);
                if *ext.fiber.degree(w) != want {
                    continue;
                }
            }
            out.push((t.clone(), w));
        }
    }
    out
}

/// Materializes a basis cochain. For the Chevalley flavor the entry is
/// extended over all permutations with graded signs.
pub fn basis_cochain(
    ext: &ExtensionSpace,
    flavor: Flavor,
    index: &CochainIndex,
) -> Result<Cochain> {
    let (t, w) = index;
    let rank = ext.base.group().rank();
    let tdeg = Degree::sum(rank, t.iter().map(|&i| ext.base.degree(i)));
    let mut cweight = Vec::with_capacity(rank + 1);
    cweight.push(1i64);
    for i in 0..rank {
        cweight.push(ext.fiber.degree(*w).0[i] - tdeg.0[i]);
    }
    let weight = Degree(cweight);
    let mut map = MultiMap::zero(ext.total.clone(), t.len(), weight)?;
    let et: Vec<usize> = t.iter().map(|&i| ext.base_index(i)).collect();
    let wvec = ext.total.basis_vector(ext.fiber_index(*w));
    match flavor {
        Flavor::Hochschild => {
            map.set_entry(et, wvec)?;
        }
        Flavor::Chevalley => {
            let degs = ext.total.tuple_degrees(&et);
            for sigma in permutations(t.len()) {
                let mut u = vec![0usize; t.len()];
                for (j, &s) in sigma.iter().enumerate() {
                    u[s] = et[j];
                }
                let udegs: Vec<Degree> = u.iter().map(|&i| ext.total.degree(i).clone()).collect();
                let s = graded_sign(ext.total.group(), &sigma, &udegs)?;
                let _ = &degs;
                let mut v = wvec.clone();
                if s < 0 {
                    v = v.scale(&rat(-1));
                }
                map.accumulate(u, v);
            }
        }
    }
    Cochain::new(ext, map, flavor)
}

/// One slice of the cochain complex: the coboundary matrix from degree `k`
/// (at one `G`-weight) into degree `k + n - 1`.
#[derive(Clone, Debug)]
pub struct ComplexSlice {
    pub k: usize,
    pub weight: Option<Degree>,
    pub domain_basis: Vec<CochainIndex>,
    pub codomain_basis: Vec<CochainIndex>,
    pub matrix: LinearMap,
}

pub fn build_slice(
    ext: &ExtensionSpace,
    p: &MultiMap,
    flavor: Flavor,
    k: usize,
    weight: Option<&Degree>,
    cap: usize,
) -> Result<ComplexSlice> {
    let n = p.arity();
    let domain_basis = cochain_basis(ext, flavor, k, weight);
    let shifted = weight.map(|c| {
        let kappa = g_weight_of(p);
        c.add(&kappa)
    });
    let codomain_basis = cochain_basis(ext, flavor, k + n - 1, shifted.as_ref());
    let dom = GradedSpace::ungraded(domain_basis.len());
    let cod = GradedSpace::ungraded(codomain_basis.len());
    let mut matrix = LinearMap::zero(dom, cod);
    let skew_p = if flavor == Flavor::Chevalley {
        Some(SkewMultiMap::new(p.clone())?)
    } else {
        None
    };
    for (col, idx) in domain_basis.iter().enumerate() {
        let c = basis_cochain(ext, flavor, idx)?;
        let image = match flavor {
            Flavor::Hochschild => hochschild_differential(ext, p, &c)?,
            Flavor::Chevalley => {
                chevalley_differential_budgeted(ext, skew_p.as_ref().unwrap(), &c, cap)?
            }
        };
        for (row, (t, w)) in codomain_basis.iter().enumerate() {
            let et: Vec<usize> = t.iter().map(|&i| ext.base_index(i)).collect();
            let v = image.map.eval_basis(&et);
            matrix.matrix[row][col] = v.coeffs[ext.fiber_index(*w)].clone();
        }
    }
    Ok(ComplexSlice {
        k,
        weight: weight.cloned(),
        domain_basis,
        codomain_basis,
        matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyDim {
    pub k: usize,
    pub cochain_dim: usize,
    pub kernel_dim: usize,
    pub image_from_below: usize,
    pub dim: usize,
}

/// Exact cohomology dimensions for `k = 0..=k_max`. When a weight filter is
/// given only that `G`-weight is counted (the differential shifts it by the
/// structure weight); otherwise all weights present are summed.
pub fn cohomology_dims(
    ext: &ExtensionSpace,
    p: &MultiMap,
    flavor: Flavor,
    k_max: usize,
    weight: Option<&Degree>,
    cap: usize,
) -> Result<Vec<CohomologyDim>> {
    match flavor {
        Flavor::Hochschild => require_hochschild_parity(ext, p)?,
        Flavor::Chevalley => require_chevalley(p)?,
    }
    let n = p.arity();
    if k_max + n - 1 > cap {
        return Err(Error::ArityBudget {
            needed: k_max + n - 1,
            cap,
        });
    }
    let kappa = g_weight_of(p);
    let mut out = Vec::new();
    for k in 0..=k_max {
        let slice = build_slice(ext, p, flavor, k, weight, cap)?;
        let (rank_out, kernel) = rank_and_kernel(&slice.matrix);
        let _ = rank_out;
        let kernel_dim = kernel.len();
        let image_from_below = if k >= n - 1 {
            let lower_weight = weight.map(|c| {
                // the slice below maps weight c - kappa into weight c
                Degree(
                    c.0.iter()
                        .zip(&kappa.0)
                        .map(|(a, b)| a - b)
                        .collect(),
                )
            });
            let below = build_slice(ext, p, flavor, k - (n - 1), lower_weight.as_ref(), cap)?;
            let (rank, _) = rank_and_kernel(&below.matrix);
            rank
        } else {
            0
        };
        out.push(CohomologyDim {
            k,
            cochain_dim: slice.domain_basis.len(),
            kernel_dim,
            image_from_below,
            dim: kernel_dim - image_from_below,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::structures::{nary_commutator, regular_module, ExtensionSpace};

    fn gl2_bimodule() -> (ExtensionSpace, MultiMap) {
        let mu = examples::gl2();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = regular_module(&ext, &mu).unwrap();
        (ext, p)
    }

    #[test]
    fn regular_module_is_square_zero() {
        let (_, p) = gl2_bimodule();
        assert!(crate::structures::associativity_defect(&p).unwrap().is_zero);
    }

    #[test]
    fn zero_cochain_differential_is_commutator_defect() {
        // (dw)(X) = Xw - wX on the regular bimodule
        let (ext, p) = gl2_bimodule();
        let mu = examples::gl2();
        for w in 0..4 {
            let c = basis_cochain(&ext, Flavor::Hochschild, &(vec![], w)).unwrap();
            let dc = hochschild_differential(&ext, &p, &c).unwrap();
            for x in 0..4 {
                let got = ext.project_fiber(&dc.map().eval_basis(&[ext.base_index(x)]));
                let expect = mu.eval_basis(&[x, w]).sub(&mu.eval_basis(&[w, x]));
                assert_eq!(got, expect, "x={x} w={w}");
            }
        }
    }

    #[test]
    fn one_cochain_differential_classical_formula() {
        // (dC)(X0,X1) = X0 C(X1) - C(mu(X0,X1)) + C(X0) X1
        let (ext, p) = gl2_bimodule();
        let mu = examples::gl2();
        let c = basis_cochain(&ext, Flavor::Hochschild, &(vec![2], 1)).unwrap();
        let dc = hochschild_differential(&ext, &p, &c).unwrap();
        let cval = |i: usize| ext.project_fiber(&c.map().eval_basis(&[ext.base_index(i)]));
        for x0 in 0..4 {
            for x1 in 0..4 {
                let got =
                    ext.project_fiber(&dc.map().eval_basis(&[ext.base_index(x0), ext.base_index(x1)]));
                let mut expect = crate::linalg::Vector::zero(4);
                // lambda(X0) C(X1) = mu(X0, C(X1))
                let cx1 = cval(x1);
                for (b, coeff) in cx1.coeffs.iter().enumerate() {
                    if !coeff.is_zero() {
                        expect.add_assign_scaled(&mu.eval_basis(&[x0, b]), coeff);
                    }
                }
                // - C(mu(X0,X1))
                let m = mu.eval_basis(&[x0, x1]);
                for (b, coeff) in m.coeffs.iter().enumerate() {
                    if !coeff.is_zero() {
                        expect.add_assign_scaled(&cval(b), &-coeff.clone());
                    }
                }
                // + rho(X1) C(X0) = mu(C(X0), X1)
                let cx0 = cval(x0);
                for (b, coeff) in cx0.coeffs.iter().enumerate() {
                    if !coeff.is_zero() {
                        expect.add_assign_scaled(&mu.eval_basis(&[b, x1]), coeff);
                    }
                }
                assert_eq!(got, expect, "x0={x0} x1={x1}");
            }
        }
    }

    #[test]
    fn hochschild_square_zero_and_dual_path() {
        let (ext, p) = gl2_bimodule();
        let c = basis_cochain(&ext, Flavor::Hochschild, &(vec![1, 2], 3)).unwrap();
        let d1 = hochschild_differential(&ext, &p, &c).unwrap();
        let d2 = hochschild_differential(&ext, &p, &d1).unwrap();
        assert!(d2.is_zero());
        let e1 = hochschild_differential_explicit(&ext, &p, &c).unwrap();
        assert_eq!(d1.map(), e1.map());
    }

    #[test]
    fn parity_refusal_for_unweighted_ternary() {
        let mu = examples::nilpotent_ternary();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = regular_module(&ext, &mu).unwrap();
        let c = basis_cochain(&ext, Flavor::Hochschild, &(vec![0], 1)).unwrap();
        assert!(matches!(
            hochschild_differential(&ext, &p, &c),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn weighted_ternary_differential_squares_to_zero() {
        let mu = examples::graded_z2();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = regular_module(&ext, &mu).unwrap();
        assert_eq!(hochschild_parity(&ext, &p).unwrap(), 1);
        let basis = cochain_basis(&ext, Flavor::Hochschild, 1, None);
        for idx in basis {
            let c = basis_cochain(&ext, Flavor::Hochschild, &idx).unwrap();
            let d1 = hochschild_differential(&ext, &p, &c).unwrap();
            let d2 = hochschild_differential(&ext, &p, &d1).unwrap();
            assert!(d2.is_zero(), "idx={idx:?}");
            let e1 = hochschild_differential_explicit(&ext, &p, &c).unwrap();
            assert_eq!(d1.map(), e1.map());
        }
    }

    #[test]
    fn chevalley_cross3_adjoint() {
        // dC(X,Y) = [X,C(Y)] - [Y,C(X)] - C([X,Y]); for C = id this is [X,Y]
        let mu = examples::cross3();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = SkewMultiMap::new(regular_module(&ext, &mu).unwrap()).unwrap();
        // C = id as a 1-cochain
        let mut cmap = MultiMap::zero(
            ext.total.clone(),
            1,
            Degree(vec![1]),
        )
        .unwrap();
        for i in 0..3 {
            cmap.set_entry(
                vec![ext.base_index(i)],
                ext.total.basis_vector(ext.fiber_index(i)),
            )
            .unwrap();
        }
        let c = Cochain::new(&ext, cmap, Flavor::Chevalley).unwrap();
        let dc = chevalley_differential(&ext, &p, &c).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let got = ext
                    .project_fiber(&dc.map().eval_basis(&[ext.base_index(x), ext.base_index(y)]));
                let expect = mu.eval_basis(&[x, y]);
                assert_eq!(got, expect, "x={x} y={y}");
            }
        }
        // dual paths
        let e = chevalley_differential_explicit(&ext, &p, &c).unwrap();
        assert_eq!(dc.map(), e.map());
        let pw = chevalley_differential_pointwise(&ext, &p, &c).unwrap();
        assert_eq!(dc.map(), pw.map());
        // squares to zero
        let d2 = chevalley_differential(&ext, &p, &dc).unwrap();
        assert!(d2.is_zero());
    }

    #[test]
    fn chevalley_odd_arity_refused() {
        let mu = examples::eps4();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = SkewMultiMap::new(regular_module(&ext, &mu).unwrap()).unwrap();
        let c = basis_cochain(&ext, Flavor::Chevalley, &(vec![0], 1)).unwrap();
        assert!(matches!(
            chevalley_differential(&ext, &p, &c),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn abelian2_trivial_module_dims() {
        let mu = examples::abelian2();
        let fiber = GradedSpace::ungraded(1);
        let ext = ExtensionSpace::new(mu.space().clone(), fiber).unwrap();
        let p = ext.lift_base_map(&mu).unwrap(); // rho = 0
        let dims = cohomology_dims(&ext, &p, Flavor::Chevalley, 3, None, 6).unwrap();
        let got: Vec<usize> = dims.iter().map(|d| d.dim).collect();
        assert_eq!(got, vec![1, 2, 1, 0]);
    }

    #[test]
    fn one_dim_unital_hochschild_dims() {
        // K as a bimodule over K: dims 1,0,0,0
        let space = GradedSpace::ungraded(1);
        let mut mu = MultiMap::zero(space, 2, Degree::zero(0)).unwrap();
        mu.set_coeff(vec![0, 0], 0, rat(1)).unwrap();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = regular_module(&ext, &mu).unwrap();
        let dims = cohomology_dims(&ext, &p, Flavor::Hochschild, 3, None, 6).unwrap();
        let got: Vec<usize> = dims.iter().map(|d| d.dim).collect();
        assert_eq!(got, vec![1, 0, 0, 0]);
    }

    #[test]
    fn cross3_adjoint_h0_vanishes() {
        let mu = examples::cross3();
        let ext = ExtensionSpace::new(mu.space().clone(), mu.space().clone()).unwrap();
        let p = regular_module(&ext, &mu).unwrap();
        let dims = cohomology_dims(&ext, &p, Flavor::Chevalley, 0, None, 6).unwrap();
        assert_eq!(dims[0].dim, 0);
    }

    #[test]
    fn chain_map_commutes_with_differentials() {
        let (ext, p) = gl2_bimodule();
        let gamma_p = nary_commutator(&p).unwrap();
        let c = basis_cochain(&ext, Flavor::Hochschild, &(vec![0, 2], 1)).unwrap();
        let lhs = alternation_chain_map(
            &ext,
            &hochschild_differential(&ext, &p, &c).unwrap(),
            8,
        )
        .unwrap();
        let rhs = chevalley_differential_budgeted(
            &ext,
            &gamma_p,
            &alternation_chain_map(&ext, &c, 8).unwrap(),
            8,
        )
        .unwrap();
        assert_eq!(lhs.map(), rhs.map());
    }
}
