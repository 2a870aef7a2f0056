//! Polynomial Nambu calculus: multivariate polynomials over exact
//! rationals, the Jacobian determinant bracket, derivation-style n-Jacobi
//! spot checks, and constant or polynomial coefficient multivector
//! brackets. Smooth function algebras are replaced by polynomial rings at
//! desk scale; identities are checked on sampled tuples, which is exact and
//! enough to falsify.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grading::permutations;
use crate::scalar::{format_rat, parse_rat, rat, Rat};

/// A multivariate polynomial: sparse exponent-vector map, no zero
/// coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    /// number of variables
    pub nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0u32; nvars];
        exps[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, rat(1));
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, coeff: Rat) {
        debug_assert_eq!(exps.len(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::InvalidInput(format!(
                "variable index {i} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * rat(e[i] as i64));
            }
        }
        Ok(out)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    if p == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, p)
                    }
                })
                .collect();
            let negative = crate::scalar::is_negative(c);
            let abs = if negative { -c.clone() } else { c.clone() };
            let coeff = format_rat(&abs);
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for polynomial expressions over named
/// variables: `+ - * ^`, parentheses, integer or `p/q` coefficients.
pub fn parse_polynomial(input: &str, vars: &[String]) -> Result<Polynomial> {
    let mut p = PolyParser {
        chars: input.chars().collect(),
        pos: 0,
        vars,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::InvalidInput(format!(
            "unexpected input at offset {} in polynomial {input:?}",
            p.pos
        )));
    }
    Ok(poly)
}

struct PolyParser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> PolyParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = if self.peek() == Some('-') {
            self.pos += 1;
            self.term()?.scale(&rat(-1))
        } else {
            if self.peek() == Some('+') {
                self.pos += 1;
            }
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                // implicit multiplication before a variable or open paren
                Some(c) if c.is_alphabetic() || c == '(' => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(Error::InvalidInput("missing exponent".into()));
            }
            let e: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::InvalidInput("bad exponent".into()))?;
            let mut acc = Polynomial::constant(base.nvars, rat(1));
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::InvalidInput("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '/')
                {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let r = parse_rat(&text)
                    .ok_or_else(|| Error::InvalidInput(format!("bad rational {text:?}")))?;
                Ok(Polynomial::constant(self.vars.len(), r))
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::UnknownName(name))?;
                Ok(Polynomial::variable(self.vars.len(), idx))
            }
            other => Err(Error::InvalidInput(format!(
                "unexpected token {other:?} in polynomial"
            ))),
        }
    }
}

/// `{f_1,..,f_n} = det(df_i/dx_j)`, expanded as the signed permutation sum.
pub fn nambu_bracket(fs: &[Polynomial]) -> Result<Polynomial> {
    let n = fs.len();
    if n == 0 {
        return Err(Error::InvalidArity("empty bracket".into()));
    }
    for f in fs {
        if f.nvars != n {
            return Err(Error::InvalidArity(format!(
                "{n} polynomials need exactly {n} variables, got {}",
                f.nvars
            )));
        }
    }
    let mut jac = Vec::with_capacity(n);
    for f in fs {
        let row: Vec<Polynomial> = (0..n).map(|j| f.partial(j).unwrap()).collect();
        jac.push(row);
    }
    Ok(poly_det(&jac))
}

fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    let nvars = m[0][0].nvars;
    let mut out = Polynomial::zero(nvars);
    for sigma in permutations(n) {
        let mut prod = Polynomial::constant(nvars, rat(1));
        let mut vanished = false;
        for (i, &j) in sigma.iter().enumerate() {
            if m[i][j].is_zero() {
                vanished = true;
                break;
            }
            prod = prod.mul(&m[i][j]);
        }
        if vanished {
            continue;
        }
        if crate::grading::permutation_sign(&sigma) < 0 {
            prod = prod.scale(&rat(-1));
        }
        out = out.add(&prod);
    }
    out
}

/// Defect of the derivation-style n-Jacobi identity
/// `{u_1,..,u_{n-1},{v_1,..,v_n}} - sum_i {v_1,..,{u_1,..,u_{n-1},v_i},..}`
/// for one sample of `2n-1` polynomials `(u_1..u_{n-1}, v_1..v_n)`.
pub fn nambu_filippov_defect(n: usize, sample: &[Polynomial]) -> Result<Polynomial> {
    if sample.len() != 2 * n - 1 {
        return Err(Error::InvalidArity(format!(
            "need 2n-1 = {} polynomials, got {}",
            2 * n - 1,
            sample.len()
        )));
    }
    let us = &sample[..n - 1];
    let vs = &sample[n - 1..];
    let inner = nambu_bracket(vs)?;
    let mut outer_args: Vec<Polynomial> = us.to_vec();
    outer_args.push(inner);
    let mut defect = nambu_bracket(&outer_args)?;
    for i in 0..n {
        let mut braces: Vec<Polynomial> = us.to_vec();
        braces.push(vs[i].clone());
        let replaced = nambu_bracket(&braces)?;
        let mut args: Vec<Polynomial> = vs.to_vec();
        args[i] = replaced;
        defect = defect.sub(&nambu_bracket(&args)?);
    }
    Ok(defect)
}

/// A k-vector field with polynomial coefficients on strictly increasing
/// index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiVector {
    pub nvars: usize,
    pub degree: usize,
    components: BTreeMap<Vec<usize>, Polynomial>,
}

impl MultiVector {
    pub fn new(nvars: usize, degree: usize) -> Result<Self> {
        if degree > nvars {
            return Err(Error::InvalidArity(format!(
                "multivector degree {degree} exceeds {nvars} variables"
            )));
        }
        Ok(MultiVector {
            nvars,
            degree,
            components: BTreeMap::new(),
        })
    }

    /// `d_1 ^ .. ^ d_n` with constant coefficient one.
    pub fn volume(nvars: usize) -> Self {
        let mut mv = MultiVector::new(nvars, nvars).unwrap();
        mv.set_component((0..nvars).collect(), Polynomial::constant(nvars, rat(1)))
            .unwrap();
        mv
    }

    pub fn set_component(&mut self, idx: Vec<usize>, coeff: Polynomial) -> Result<()> {
        if idx.len() != self.degree {
            return Err(Error::InvalidArity("component index length".into()));
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= self.nvars) {
            return Err(Error::InvalidInput(
                "component indices must be strictly increasing and in range".into(),
            ));
        }
        if coeff.nvars != self.nvars {
            return Err(Error::DimensionMismatch("coefficient variable count".into()));
        }
        if coeff.is_zero() {
            self.components.remove(&idx);
        } else {
            self.components.insert(idx, coeff);
        }
        Ok(())
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Polynomial)> {
        self.components.iter()
    }

    /// `mu(f_1,..,f_k) = P(df_1,..,df_k)`: sum over components of the
    /// coefficient times the corresponding Jacobian minor.
    pub fn bracket(&self, fs: &[Polynomial]) -> Result<Polynomial> {
        if fs.len() != self.degree {
            return Err(Error::InvalidArity(format!(
                "multivector of degree {} applied to {} functions",
                self.degree,
                fs.len()
            )));
        }
        for f in fs {
            if f.nvars != self.nvars {
                return Err(Error::DimensionMismatch("variable count".into()));
            }
        }
        let mut out = Polynomial::zero(self.nvars);
        for (idx, coeff) in &self.components {
            // minor det [ df_a / dx_{idx[b]} ]
            let minor: Vec<Vec<Polynomial>> = fs
                .iter()
                .map(|f| idx.iter().map(|&j| f.partial(j).unwrap()).collect())
                .collect();
            out = out.add(&coeff.mul(&poly_det(&minor)));
        }
        Ok(out)
    }

    /// Leibniz defect `mu(fg, rest..) - f mu(g, rest..) - g mu(f, rest..)`.
    pub fn leibniz_defect(&self, f: &Polynomial, g: &Polynomial, rest: &[Polynomial]) -> Result<Polynomial> {
        let mut args = Vec::with_capacity(self.degree);
        args.push(f.mul(g));
        args.extend_from_slice(rest);
        let lhs = self.bracket(&args)?;
        args[0] = g.clone();
        let t1 = f.mul(&self.bracket(&args)?);
        args[0] = f.clone();
        let t2 = g.mul(&self.bracket(&args)?);
        Ok(lhs.sub(&t1).sub(&t2))
    }

    /// Filippov-identity defect for the induced bracket on one sample of
    /// `2k-1` polynomials.
    pub fn jacobi_defect(&self, sample: &[Polynomial]) -> Result<Polynomial> {
        let n = self.degree;
        if sample.len() != 2 * n - 1 {
            return Err(Error::InvalidArity(format!(
                "need {} polynomials",
                2 * n - 1
            )));
        }
        let us = &sample[..n - 1];
        let vs = &sample[n - 1..];
        let inner = self.bracket(vs)?;
        let mut outer_args: Vec<Polynomial> = us.to_vec();
        outer_args.push(inner);
        let mut defect = self.bracket(&outer_args)?;
        for i in 0..n {
            let mut braces: Vec<Polynomial> = us.to_vec();
            braces.push(vs[i].clone());
            let replaced = self.bracket(&braces)?;
            let mut args: Vec<Polynomial> = vs.to_vec();
            args[i] = replaced;
            defect = defect.sub(&self.bracket(&args)?);
        }
        Ok(defect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn partial_derivative_rules() {
        let v = vars(&["x", "y"]);
        let f = parse_polynomial("x^2*y", &v).unwrap();
        let fx = f.partial(0).unwrap();
        assert_eq!(fx, parse_polynomial("2*x*y", &v).unwrap());
        let c = parse_polynomial("7/2", &v).unwrap();
        assert!(c.partial(0).unwrap().is_zero());
        // product rule on a pair
        let g = parse_polynomial("x + y^2", &v).unwrap();
        let lhs = f.mul(&g).partial(1).unwrap();
        let rhs = f.partial(1).unwrap().mul(&g).add(&f.mul(&g.partial(1).unwrap()));
        assert_eq!(lhs, rhs);
        assert!(f.partial(5).is_err());
    }

    #[test]
    fn coordinate_bracket_is_one() {
        for n in 1..=4usize {
            let fs: Vec<Polynomial> = (0..n).map(|i| Polynomial::variable(n, i)).collect();
            let b = nambu_bracket(&fs).unwrap();
            assert_eq!(b, Polynomial::constant(n, rat(1)));
        }
    }

    #[test]
    fn two_variable_example() {
        let v = vars(&["x", "y"]);
        let f = parse_polynomial("x", &v).unwrap();
        let g = parse_polynomial("y^2", &v).unwrap();
        let b = nambu_bracket(&[f, g]).unwrap();
        assert_eq!(b, parse_polynomial("2*y", &v).unwrap());
    }

    #[test]
    fn bracket_is_alternating() {
        let v = vars(&["x", "y", "z"]);
        let f = parse_polynomial("x*y + z", &v).unwrap();
        let g = parse_polynomial("y^2 - x", &v).unwrap();
        let h = parse_polynomial("z*x", &v).unwrap();
        let b1 = nambu_bracket(&[f.clone(), g.clone(), h.clone()]).unwrap();
        let b2 = nambu_bracket(&[g.clone(), f.clone(), h.clone()]).unwrap();
        assert_eq!(b1, b2.scale(&rat(-1)));
        // repeated argument kills the bracket
        let b3 = nambu_bracket(&[f.clone(), f.clone(), h.clone()]).unwrap();
        assert!(b3.is_zero());
    }

    #[test]
    fn constant_slot_kills_terms() {
        let v = vars(&["x", "y"]);
        let c = parse_polynomial("5", &v).unwrap();
        let g = parse_polynomial("x*y", &v).unwrap();
        assert!(nambu_bracket(&[c, g]).unwrap().is_zero());
    }

    #[test]
    fn filippov_defect_vanishes_poisson_n2() {
        let v = vars(&["x", "y"]);
        let samples = [
            ["x", "y", "x*y"],
            ["x^2", "y^2", "x + y"],
            ["x*y", "x + y^2", "y"],
        ];
        for s in samples {
            let polys: Vec<Polynomial> =
                s.iter().map(|t| parse_polynomial(t, &v).unwrap()).collect();
            let defect = nambu_filippov_defect(2, &polys).unwrap();
            assert!(defect.is_zero(), "sample {s:?}");
        }
    }

    #[test]
    fn filippov_defect_vanishes_nambu_n3() {
        let v = vars(&["x", "y", "z"]);
        let samples = [
            ["x", "y", "x", "y", "z"],
            ["x*y", "z", "x", "y^2", "z"],
            ["x^2", "y*z", "x + y", "y", "z*x"],
        ];
        for s in samples {
            let polys: Vec<Polynomial> =
                s.iter().map(|t| parse_polynomial(t, &v).unwrap()).collect();
            let defect = nambu_filippov_defect(3, &polys).unwrap();
            assert!(defect.is_zero(), "sample {s:?}");
        }
    }

    #[test]
    fn volume_multivector_matches_nambu() {
        let v = vars(&["x", "y", "z"]);
        let p = MultiVector::volume(3);
        let fs: Vec<Polynomial> = ["x*y", "y + z^2", "z*x"]
            .iter()
            .map(|t| parse_polynomial(t, &v).unwrap())
            .collect();
        assert_eq!(p.bracket(&fs).unwrap(), nambu_bracket(&fs).unwrap());
    }

    #[test]
    fn constant_bivector_passes_checks() {
        // P = d1 ^ d2 + 2 d2 ^ d3 on Q^3
        let v = vars(&["x", "y", "z"]);
        let mut p = MultiVector::new(3, 2).unwrap();
        p.set_component(vec![0, 1], Polynomial::constant(3, rat(1)))
            .unwrap();
        p.set_component(vec![1, 2], Polynomial::constant(3, rat(2)))
            .unwrap();
        let f = parse_polynomial("x*y", &v).unwrap();
        let g = parse_polynomial("z^2 + x", &v).unwrap();
        let h = parse_polynomial("y", &v).unwrap();
        assert!(p.leibniz_defect(&f, &g, &[h.clone()]).unwrap().is_zero());
        let defect = p.jacobi_defect(&[f, g, h]).unwrap();
        assert!(defect.is_zero());
    }

    #[test]
    fn adversarial_bivector_fails_jacobi() {
        // P = d_x ^ d_y + x d_x ^ d_z: on the coordinate sample the three
        // terms give 0 - mu(1, z) - mu(y, x) = {x,y} = 1
        let v = vars(&["x", "y", "z"]);
        let mut p = MultiVector::new(3, 2).unwrap();
        p.set_component(vec![0, 1], Polynomial::constant(3, rat(1)))
            .unwrap();
        p.set_component(vec![0, 2], Polynomial::variable(3, 0))
            .unwrap();
        let sample: Vec<Polynomial> = ["x", "y", "z"]
            .iter()
            .map(|t| parse_polynomial(t, &v).unwrap())
            .collect();
        let defect = p.jacobi_defect(&sample).unwrap();
        assert_eq!(defect, Polynomial::constant(3, rat(1)));
    }

    #[test]
    fn parser_round_trips() {
        let v = vars(&["x", "y"]);
        for s in ["x^2*y + 3/2", "-x + y - 1", "(x + y)^2", "2x*y"] {
            let p = parse_polynomial(s, &v).unwrap();
            let printed = p.to_string();
            // reparse with canonical variable names
            let canon = vars(&["x1", "x2"]);
            let p2 = parse_polynomial(&printed, &canon).unwrap();
            assert_eq!(p.terms, p2.terms, "{s}");
        }
        assert!(parse_polynomial("x + w", &v).is_err());
        assert!(parse_polynomial("x +", &v).is_err());
        assert!(parse_polynomial("1.5", &v).is_err());
    }
}
