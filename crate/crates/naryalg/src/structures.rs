//! Structure checkers and constructors: n-ary associative and n-ary Lie
//! algebras, their modules through the two-level extension space, n-ary
//! commutators and Lie admissibility, ideals, quotients, semidirect
//! products and homomorphisms.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::linalg::{in_span, row_reduce_span, GradedSpace, LinearMap, Vector};
use crate::multilinear::{
    alternator_budgeted, i_product_budgeted, j_product, MultiMap, SkewMultiMap,
    DEFAULT_ARITY_BUDGET,
};
use crate::scalar::{factorial, rat, Rat};

/// Number of defect witnesses kept in a report for readability; the full
/// defect map is retained alongside.
pub const MAX_WITNESSES: usize = 16;

/// Outcome of a structure check: the residual map and up to
/// [`MAX_WITNESSES`] basis tuples where it does not vanish.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub defect: MultiMap,
    pub is_zero: bool,
    pub witnesses: Vec<(Vec<usize>, Vector)>,
}

impl StructureReport {
    pub fn from_defect(defect: MultiMap) -> Self {
        let witnesses: Vec<(Vec<usize>, Vector)> = defect
            .entries()
            .take(MAX_WITNESSES)
            .map(|(t, v)| (t.clone(), v.clone()))
            .collect();
        StructureReport {
            is_zero: defect.is_zero(),
            witnesses,
            defect,
        }
    }
}

/// `j(mu)mu`, the n-ary associator. Weighted structures are allowed.
pub fn associativity_defect(mu: &MultiMap) -> Result<StructureReport> {
    Ok(StructureReport::from_defect(j_product(mu, mu)?))
}

/// `i(mu)mu` for graded skew `mu`; zero exactly for n-ary Lie structures.
pub fn lie_defect(mu: &SkewMultiMap) -> Result<StructureReport> {
    lie_defect_budgeted(mu, DEFAULT_ARITY_BUDGET)
}

pub fn lie_defect_budgeted(mu: &SkewMultiMap, cap: usize) -> Result<StructureReport> {
    Ok(StructureReport::from_defect(
        i_product_budgeted(mu, mu, cap)?.into_map(),
    ))
}

/// The n-ary commutator `gamma mu = n! a(mu)`.
pub fn nary_commutator(mu: &MultiMap) -> Result<SkewMultiMap> {
    nary_commutator_budgeted(mu, DEFAULT_ARITY_BUDGET)
}

pub fn nary_commutator_budgeted(mu: &MultiMap, cap: usize) -> Result<SkewMultiMap> {
    let alt = alternator_budgeted(mu, cap)?;
    Ok(SkewMultiMap::new(alt.scale(&factorial(mu.arity())))?)
}

/// Lie admissibility data: the alternated associator `a(j(mu)mu)` together
/// with both sides of the scalar comparison between `i(gamma mu)(gamma mu)`
/// and multiples of `a(j(mu)mu)`.
///
/// The measured relation, checked in the test suite on spaces large enough
/// for skew `(2n-1)`-linear maps to be nonzero, is
/// `i(gamma mu)(gamma mu) = (2n-1)! a(j(mu)mu)`: the commutator `gamma`
/// carries `n! a`, and bilinearity of the insertion product contributes
/// `(n!)^2` on top of the combinatorial prefactor `(2n-1)!/(n!)^2`.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub report: StructureReport,
    /// `i(gamma mu)(gamma mu)`
    pub gamma_side: MultiMap,
    /// `a(j(mu)mu)`
    pub alternated_associator: MultiMap,
    /// scalar `c` with `gamma_side = c * alternated_associator`, when both
    /// sides are proportional (always, by the identity above)
    pub measured_ratio: Option<Rat>,
}

pub fn lie_admissibility_defect(mu: &MultiMap) -> Result<AdmissibilityReport> {
    lie_admissibility_defect_budgeted(mu, DEFAULT_ARITY_BUDGET)
}

pub fn lie_admissibility_defect_budgeted(mu: &MultiMap, cap: usize) -> Result<AdmissibilityReport> {
    let assoc = j_product(mu, mu)?;
    let alternated = alternator_budgeted(&assoc, cap)?;
    let gamma = nary_commutator_budgeted(mu, cap)?;
    let gamma_side = i_product_budgeted(&gamma, &gamma, cap)?.into_map();
    let expected = alternated.scale(&factorial(2 * mu.arity() - 1));
    let measured_ratio = if gamma_side == expected {
        Some(factorial(2 * mu.arity() - 1))
    } else {
        None
    };
    Ok(AdmissibilityReport {
        report: StructureReport::from_defect(alternated.clone()),
        gamma_side,
        alternated_associator: alternated,
        measured_ratio,
    })
}

/// The two-level `(Z x G)`-graded space `E` with `V` in form degree 0 and
/// `W` in form degree 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSpace {
    pub base: Arc<GradedSpace>,
    pub fiber: Arc<GradedSpace>,
    pub total: Arc<GradedSpace>,
}

impl ExtensionSpace {
    pub fn new(base: Arc<GradedSpace>, fiber: Arc<GradedSpace>) -> Result<Self> {
        if base.group() != fiber.group() {
            return Err(Error::SpaceMismatch);
        }
        let group = base.group().extended();
        let mut degrees = Vec::with_capacity(base.dim() + fiber.dim());
        let mut labels = Vec::with_capacity(base.dim() + fiber.dim());
        for i in 0..base.dim() {
            degrees.push(base.degree(i).folded(0));
            labels.push(base.label(i));
        }
        for j in 0..fiber.dim() {
            degrees.push(fiber.degree(j).folded(1));
            labels.push(format!("w:{}", fiber.label(j)));
        }
        let total = GradedSpace::with_labels(group, degrees, labels)?;
        Ok(ExtensionSpace { base, fiber, total })
    }

    pub fn base_index(&self, i: usize) -> usize {
        debug_assert!(i < self.base.dim());
        i
    }

    pub fn fiber_index(&self, j: usize) -> usize {
        debug_assert!(j < self.fiber.dim());
        self.base.dim() + j
    }

    pub fn is_fiber(&self, total_index: usize) -> bool {
        total_index >= self.base.dim()
    }

    /// Restricts a total-space vector of pure fiber support to `W`.
    pub fn project_fiber(&self, v: &Vector) -> Vector {
        Vector::from_coeffs(v.coeffs[self.base.dim()..].to_vec())
    }

    /// Restricts a total-space vector of pure base support to `V`.
    pub fn project_base(&self, v: &Vector) -> Vector {
        Vector::from_coeffs(v.coeffs[..self.base.dim()].to_vec())
    }

    pub fn embed_base(&self, v: &Vector) -> Vector {
        let mut out = self.total.zero_vector();
        out.coeffs[..self.base.dim()].clone_from_slice(&v.coeffs);
        out
    }

    pub fn embed_fiber(&self, v: &Vector) -> Vector {
        let mut out = self.total.zero_vector();
        out.coeffs[self.base.dim()..].clone_from_slice(&v.coeffs);
        out
    }

    /// Lifts an n-ary map on `V` to the all-base fragment of a map on `E`.
    pub fn lift_base_map(&self, mu: &MultiMap) -> Result<MultiMap> {
        if *mu.space() != self.base {
            return Err(Error::SpaceMismatch);
        }
        let weight = mu.weight().folded(0);
        let mut out = MultiMap::zero(self.total.clone(), mu.arity(), weight)?;
        for (t, v) in mu.entries() {
            let tuple: Vec<usize> = t.iter().map(|&i| self.base_index(i)).collect();
            out.set_entry(tuple, self.embed_base(v))?;
        }
        Ok(out)
    }

    /// Lifts an action fragment `rho: V x .. x W(at slot) x .. x V -> W`.
    /// `rho` is given as a map on tuples `(V-indices with a W-index at
    /// `slot`)` through a callback; see the named helpers below for the
    /// common cases.
    pub fn lift_action_fragment(
        &self,
        arity: usize,
        weight: &Degree,
        slot: usize,
        value: impl Fn(&[usize], usize) -> Vector,
    ) -> Result<MultiMap> {
        if slot >= arity {
            return Err(Error::InvalidArity(format!(
                "fiber slot {slot} out of range for arity {arity}"
            )));
        }
        let w = weight.folded(0);
        let mut out = MultiMap::zero(self.total.clone(), arity, w)?;
        let vdim = self.base.dim();
        let wdim = self.fiber.dim();
        for base_tuple in crate::multilinear::tuples(vdim, arity - 1) {
            for wj in 0..wdim {
                let val = value(&base_tuple, wj);
                if !val.is_zero() {
                    let mut tuple = Vec::with_capacity(arity);
                    for (pos, &b) in base_tuple.iter().enumerate() {
                        if pos == slot {
                            tuple.push(self.fiber_index(wj));
                        }
                        tuple.push(self.base_index(b));
                    }
                    if slot == arity - 1 {
                        tuple.push(self.fiber_index(wj));
                    }
                    out.set_entry(tuple, self.embed_fiber(&val))?;
                }
            }
        }
        Ok(out)
    }

    /// Left action for the binary case: `P(X, Y) = lambda(X) Y`.
    pub fn lift_left_action(&self, lambda: impl Fn(usize) -> LinearMap) -> Result<MultiMap> {
        let weight = Degree::zero(self.base.group().rank());
        self.lift_action_fragment(2, &weight, 1, |base, wj| {
            lambda(base[0]).apply(&self.fiber.basis_vector(wj))
        })
    }

    /// Right action for the binary case, stored per the sign convention
    /// `P(Y, X) = (-1)^{<x,y>} rho(X) Y` for `Y` in `W`, `X` in `V`.
    pub fn lift_right_action(&self, rho: impl Fn(usize) -> LinearMap) -> Result<MultiMap> {
        let weight = Degree::zero(self.base.group().rank());
        let g = self.base.group();
        self.lift_action_fragment(2, &weight, 0, |base, wj| {
            let p = g
                .pairing(self.base.degree(base[0]), self.fiber.degree(wj))
                .expect("rank-checked degrees");
            let v = rho(base[0]).apply(&self.fiber.basis_vector(wj));
            if p == 0 {
                v
            } else {
                v.scale(&rat(-1))
            }
        })
    }
}

/// Sums fragments into one weight-`(0,w)` map on `E`, enforcing the
/// form-degree budget: entries with two or more fiber inputs must be zero
/// (they would land in form degree >= 2, which `E` does not have).
pub fn build_extension(ext: &ExtensionSpace, fragments: &[MultiMap]) -> Result<MultiMap> {
    let Some(first) = fragments.first() else {
        return Err(Error::InvalidInput("no fragments".into()));
    };
    let mut total = MultiMap::zero(ext.total.clone(), first.arity(), first.weight().clone())?;
    for frag in fragments {
        if *frag.space() != ext.total {
            return Err(Error::SpaceMismatch);
        }
        for (t, _) in frag.entries() {
            let fiber_inputs = t.iter().filter(|&&i| ext.is_fiber(i)).count();
            if fiber_inputs >= 2 {
                return Err(Error::Homogeneity(format!(
                    "fragment entry {t:?} has {fiber_inputs} fiber inputs"
                )));
            }
        }
        total = total.add(frag)?;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleFlavor {
    Associative,
    Lie,
}

/// Module structure equation on `E`: `j(P)P` for the associative flavor,
/// `i(P)P` (with `P` graded skew over `Z x G`) for the Lie flavor.
pub fn module_defect(p: &MultiMap, flavor: ModuleFlavor) -> Result<StructureReport> {
    module_defect_budgeted(p, flavor, DEFAULT_ARITY_BUDGET)
}

pub fn module_defect_budgeted(
    p: &MultiMap,
    flavor: ModuleFlavor,
    cap: usize,
) -> Result<StructureReport> {
    match flavor {
        ModuleFlavor::Associative => associativity_defect(p),
        ModuleFlavor::Lie => {
            let skew = SkewMultiMap::new(p.clone())?;
            lie_defect_budgeted(&skew, cap)
        }
    }
}

/// The semidirect product `V (x| W`: the module structure `P` read as an
/// n-ary algebra on `E`. Requires a clean module; the fiber is an ideal.
pub fn semidirect_product(
    ext: &ExtensionSpace,
    p: &MultiMap,
    flavor: ModuleFlavor,
) -> Result<MultiMap> {
    let report = module_defect(p, flavor)?;
    if !report.is_zero {
        return Err(Error::Defective(format!(
            "module defect is nonzero on {} tuples",
            report.defect.entry_count()
        )));
    }
    let fiber_span: Vec<Vector> = (0..ext.fiber.dim())
        .map(|j| ext.total.basis_vector(ext.fiber_index(j)))
        .collect();
    if !is_ideal(p, &fiber_span)? {
        return Err(Error::Defective("fiber is not an ideal".into()));
    }
    Ok(p.clone())
}

/// `mu(X_1,...,X_n)` lands in `span(I)` whenever one argument does.
pub fn is_ideal(mu: &MultiMap, span: &[Vector]) -> Result<bool> {
    Ok(ideal_witness(mu, span)?.is_none())
}

fn ideal_witness(mu: &MultiMap, span: &[Vector]) -> Result<Option<(usize, Vec<usize>)>> {
    let space = mu.space();
    let dim = space.dim();
    let (rref, pivots) = row_reduce_span(span, dim);
    let arity = mu.arity();
    if arity == 0 {
        return Ok(None);
    }
    let basis_vecs: Vec<Vector> = (0..dim).map(|i| space.basis_vector(i)).collect();
    for position in 0..arity {
        for gen in span {
            for rest in crate::multilinear::tuples(dim, arity - 1) {
                let mut args: Vec<&Vector> = Vec::with_capacity(arity);
                let mut rest_iter = rest.iter();
                for pos in 0..arity {
                    if pos == position {
                        args.push(gen);
                    } else {
                        args.push(&basis_vecs[*rest_iter.next().unwrap()]);
                    }
                }
                let out = mu.eval(&args)?;
                if !in_span(&rref, &pivots, &out) {
                    return Ok(Some((position, rest)));
                }
            }
        }
    }
    Ok(None)
}

/// A quotient `V/I` with its projection and the chosen complement basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: Arc<GradedSpace>,
    pub map: MultiMap,
    pub projection: LinearMap,
    /// indices of the standard basis vectors completing `I`
    pub complement: Vec<usize>,
}

/// Factors `mu` through `V / span(I)`. The subspace must be an ideal and,
/// when the grading group is nontrivial, graded (each homogeneous component
/// of every spanning vector lies back in the span).
pub fn quotient(mu: &MultiMap, span: &[Vector]) -> Result<Quotient> {
    let space = mu.space();
    let dim = space.dim();
    let (rref, pivots) = row_reduce_span(span, dim);
    if space.group().rank() > 0 {
        for v in span {
            for (_, comp) in v.homogeneous_components(space) {
                if !in_span(&rref, &pivots, &comp) {
                    return Err(Error::NotGraded(
                        "a homogeneous component of a spanning vector leaves the subspace".into(),
                    ));
                }
            }
        }
    }
    if let Some((position, tuple)) = ideal_witness(mu, span)? {
        return Err(Error::NotIdeal { position, tuple });
    }
    // complement: standard basis vectors at the non-pivot columns
    let complement: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let qdim = complement.len();
    let qdegrees: Vec<Degree> = complement.iter().map(|&c| space.degree(c).clone()).collect();
    let qspace = GradedSpace::new(space.group().clone(), qdegrees)?;
    // projection: kill the pivot coordinates by subtracting the RREF rows
    let mut proj = LinearMap::zero(space.clone(), qspace.clone());
    for c in 0..dim {
        let mut residual = space.basis_vector(c);
        for (row, &pc) in rref.iter().zip(&pivots) {
            let coeff = residual.coeffs[pc].clone();
            if !coeff.is_zero() {
                residual.add_assign_scaled(row, &(-coeff));
            }
        }
        for (qi, &ci) in complement.iter().enumerate() {
            proj.matrix[qi][c] = residual.coeffs[ci].clone();
        }
    }
    let proj = proj.with_degree(Degree::zero(space.group().rank()));
    let mut qmap = MultiMap::zero(qspace.clone(), mu.arity(), mu.weight().clone())?;
    for tuple in crate::multilinear::tuples(qdim, mu.arity()) {
        let src: Vec<usize> = tuple.iter().map(|&q| complement[q]).collect();
        let img = proj.apply(&mu.eval_basis(&src));
        if !img.is_zero() {
            qmap.set_entry(tuple, img)?;
        }
    }
    Ok(Quotient {
        space: qspace,
        map: qmap,
        projection: proj,
        complement,
    })
}

/// Defect of `f(mu(X_1,...,X_n)) = nu(f X_1,...,f X_n)` on basis tuples.
#[derive(Clone, Debug)]
pub struct HomomorphismReport {
    pub defects: Vec<(Vec<usize>, Vector)>,
}

impl HomomorphismReport {
    pub fn is_homomorphism(&self) -> bool {
        self.defects.is_empty()
    }
}

pub fn homomorphism_defect(
    f: &LinearMap,
    mu: &MultiMap,
    nu: &MultiMap,
) -> Result<HomomorphismReport> {
    if f.domain != *mu.space() || f.codomain != *nu.space() {
        return Err(Error::SpaceMismatch);
    }
    if mu.arity() != nu.arity() {
        return Err(Error::InvalidArity(
            "mu and nu must have equal arity".into(),
        ));
    }
    match &f.degree {
        Some(d) if d.is_zero() => {}
        Some(_) => {
            return Err(Error::InvalidInput(
                "homomorphisms must have degree 0".into(),
            ))
        }
        None => return Err(Error::MissingDegree),
    }
    let space = mu.space();
    let dim = space.dim();
    let arity = mu.arity();
    let columns: Vec<Vector> = (0..dim).map(|i| f.column(i)).collect();
    let mut defects = Vec::new();
    for tuple in crate::multilinear::tuples(dim, arity) {
        let lhs = f.apply(&mu.eval_basis(&tuple));
        let args: Vec<&Vector> = tuple.iter().map(|&i| &columns[i]).collect();
        let rhs = nu.eval(&args)?;
        let defect = lhs.sub(&rhs);
        if !defect.is_zero() {
            defects.push((tuple, defect));
        }
    }
    Ok(HomomorphismReport { defects })
}

/// Binary bimodule axioms, stated on the pieces `(mu, lambda, rho)`:
/// associativity of `mu`, `lambda(mu(X1,X2)) = lambda(X1) o lambda(X2)`,
/// `rho(mu(X1,X2)) = (-1)^{<x1,x2>} rho(X2) o rho(X1)`, and the graded
/// commutation of `lambda` with `rho`. The equivalent packaged check is
/// `j(P)P = 0` on `E`.
pub struct BimoduleData<'a> {
    pub mu: &'a MultiMap,
    pub lambda: &'a [LinearMap],
    pub rho: &'a [LinearMap],
    pub fiber: Arc<GradedSpace>,
}

pub fn bimodule_axiom_defects(data: &BimoduleData) -> Result<Vec<(usize, String)>> {
    let mu = data.mu;
    if mu.arity() != 2 {
        return Err(Error::InvalidArity("bimodule axioms are binary".into()));
    }
    let space = mu.space();
    let g = space.group();
    let dim = space.dim();
    let mut failures = Vec::new();
    if !associativity_defect(mu)?.is_zero {
        failures.push((1, "j(mu)mu != 0".to_string()));
    }
    for i in 0..dim {
        for j in 0..dim {
            let prod = mu.eval_basis(&[i, j]);
            // lambda(mu(ei,ej)) as a map
            let mut lam_prod = LinearMap::zero(data.fiber.clone(), data.fiber.clone());
            let mut rho_prod = LinearMap::zero(data.fiber.clone(), data.fiber.clone());
            for (c, coeff) in prod.coeffs.iter().enumerate() {
                if !coeff.is_zero() {
                    lam_prod = lam_prod.add(&data.lambda[c].scale(coeff))?;
                    rho_prod = rho_prod.add(&data.rho[c].scale(coeff))?;
                }
            }
            let p = g.pairing(space.degree(i), space.degree(j))?;
            let sgn = if p == 0 { rat(1) } else { rat(-1) };
            let lhs2 = data.lambda[i].compose(&data.lambda[j])?;
            if lam_prod.sub(&lhs2)?.is_zero() == false {
                failures.push((2, format!("lambda axiom fails at ({i},{j})")));
            }
            let rhs3 = data.rho[j].compose(&data.rho[i])?.scale(&sgn);
            if rho_prod.sub(&rhs3)?.is_zero() == false {
                failures.push((3, format!("rho axiom fails at ({i},{j})")));
            }
            let lhs4 = data.lambda[i].compose(&data.rho[j])?;
            let rhs4 = data.rho[j].compose(&data.lambda[i])?.scale(&sgn);
            if lhs4.sub(&rhs4)?.is_zero() == false {
                failures.push((4, format!("lambda/rho commutation fails at ({i},{j})")));
            }
        }
    }
    Ok(failures)
}

/// Packages `(mu, lambda, rho)` into `P` on `E` per the embedding
/// `mu + lambda + (signed) rho`.
pub fn binary_module_map(data: &BimoduleData, ext: &ExtensionSpace) -> Result<MultiMap> {
    let lifted_mu = ext.lift_base_map(data.mu)?;
    let lam = ext.lift_left_action(|i| data.lambda[i].clone())?;
    let rho = ext.lift_right_action(|i| data.rho[i].clone())?;
    build_extension(ext, &[lifted_mu, lam, rho])
}

/// The five residual components of the ternary (ungraded) module equations:
/// `j(P)P` restricted to tuples with the single fiber argument in each of
/// the five positions.
pub fn ternary_module_equation_defects(p: &MultiMap, ext: &ExtensionSpace) -> Result<Vec<StructureReport>> {
    if p.arity() != 3 {
        return Err(Error::InvalidArity("ternary module expected".into()));
    }
    let full = j_product(p, p)?;
    let mut split: Vec<MultiMap> = (0..5)
        .map(|_| MultiMap::zero(p.space().clone(), 5, full.weight().clone()).unwrap())
        .collect();
    for (t, v) in full.entries() {
        let fiber_positions: Vec<usize> =
            t.iter().enumerate().filter(|(_, &i)| ext.is_fiber(i)).map(|(p, _)| p).collect();
        if fiber_positions.len() == 1 {
            split[fiber_positions[0]].accumulate(t.clone(), v.clone());
        }
    }
    Ok(split.into_iter().map(StructureReport::from_defect).collect())
}

/// Builds the regular-style module `P` on `E = V (+) V`: every fragment
/// with at most one fiber argument acts by `mu` through the identification
/// `W ~ V`. This is the ideal-as-module construction specialized to the
/// whole algebra.
pub fn regular_module(ext: &ExtensionSpace, mu: &MultiMap) -> Result<MultiMap> {
    if ext.base != ext.fiber || *mu.space() != ext.base {
        return Err(Error::SpaceMismatch);
    }
    let arity = mu.arity();
    let mut fragments = vec![ext.lift_base_map(mu)?];
    for slot in 0..arity {
        let frag = ext.lift_action_fragment(arity, mu.weight(), slot, |base, wj| {
            let mut tuple = Vec::with_capacity(arity);
            for (pos, &b) in base.iter().enumerate() {
                if pos == slot {
                    tuple.push(wj);
                }
                tuple.push(b);
            }
            if slot == arity - 1 {
                tuple.push(wj);
            }
            mu.eval_basis(&tuple)
        })?;
        fragments.push(frag);
    }
    build_extension(ext, &fragments)
}
