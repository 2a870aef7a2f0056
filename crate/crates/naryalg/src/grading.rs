//! Grading groups, degrees and the graded permutation sign engine.
//!
//! A grading group is `Z^m` equipped with a symmetric bilinear form over
//! `F_2`; the pairing `<x,y> = x^T F y (mod 2)` drives every sign in the
//! crate. The product grading `Z x G` used for form/weight bidegrees is
//! folded into the same representation: rank `m+1` with a `1` in the new
//! corner of the form, so one sign engine serves both gradings.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradingGroup {
    form: Vec<Vec<u8>>,
}

impl GradingGroup {
    /// The rank-zero group; every pairing vanishes.
    pub fn trivial() -> Self {
        GradingGroup { form: Vec::new() }
    }

    /// `Z^m` with the identity form: `<x,y> = sum x^i y^i (mod 2)`.
    pub fn standard(rank: usize) -> Self {
        let form = (0..rank)
            .map(|i| (0..rank).map(|j| u8::from(i == j)).collect())
            .collect();
        GradingGroup { form }
    }

    pub fn new(form: Vec<Vec<u8>>) -> Result<Self> {
        let m = form.len();
        for (i, row) in form.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "form row {i} has length {}, expected {m}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::InvalidInput(format!(
                        "form entry ({i},{j}) must be 0 or 1"
                    )));
                }
                if form[j][i] != v {
                    return Err(Error::InvalidInput(format!(
                        "form is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(GradingGroup { form })
    }

    pub fn rank(&self) -> usize {
        self.form.len()
    }

    pub fn form(&self) -> &[Vec<u8>] {
        &self.form
    }

    /// `x^T F y (mod 2)`.
    pub fn pairing(&self, x: &Degree, y: &Degree) -> Result<u8> {
        if x.rank() != self.rank() || y.rank() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "degree ranks {} and {} vs group rank {}",
                x.rank(),
                y.rank(),
                self.rank()
            )));
        }
        let mut acc: i64 = 0;
        for (i, row) in self.form.iter().enumerate() {
            for (j, &f) in row.iter().enumerate() {
                if f == 1 {
                    acc += x.0[i] * y.0[j];
                }
            }
        }
        Ok((acc.rem_euclid(2)) as u8)
    }

    /// The grading group `Z x G`: rank `m+1`, original form in the lower
    /// block and a `1` in the new `Z`-`Z` corner. Coordinate 0 of a folded
    /// degree is the `Z` (form-degree) component.
    pub fn extended(&self) -> GradingGroup {
        let m = self.rank();
        let mut form = vec![vec![0u8; m + 1]; m + 1];
        form[0][0] = 1;
        for i in 0..m {
            for j in 0..m {
                form[i + 1][j + 1] = self.form[i][j];
            }
        }
        GradingGroup { form }
    }
}

/// An element of the grading group: an integer vector of length `rank`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(pub Vec<i64>);

impl Degree {
    pub fn zero(rank: usize) -> Self {
        Degree(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Degree) -> Degree {
        debug_assert_eq!(self.rank(), other.rank());
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sum<'a>(rank: usize, items: impl IntoIterator<Item = &'a Degree>) -> Degree {
        let mut acc = Degree::zero(rank);
        for d in items {
            acc = acc.add(d);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Prepends a `Z` coordinate, folding into the extended group.
    pub fn folded(&self, z: i64) -> Degree {
        let mut v = Vec::with_capacity(self.rank() + 1);
        v.push(z);
        v.extend_from_slice(&self.0);
        Degree(v)
    }
}

/// A `Z x G` bidegree: the form degree `k` together with a weight in `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiDegree {
    pub form_degree: i64,
    pub weight: Degree,
}

impl BiDegree {
    pub fn new(form_degree: i64, weight: Degree) -> Self {
        BiDegree { form_degree, weight }
    }

    /// The folded representation in `G.extended()`.
    pub fn folded(&self) -> Degree {
        self.weight.folded(self.form_degree)
    }
}

/// `<(k,x),(l,y)> = kl (mod 2) + <x,y>`.
pub fn bidegree_pairing(g: &GradingGroup, a: &BiDegree, b: &BiDegree) -> Result<u8> {
    let w = g.pairing(&a.weight, &b.weight)?;
    let kl = (a.form_degree * b.form_degree).rem_euclid(2) as u8;
    Ok((kl + w) % 2)
}

/// `(sigma . x)_i = x_{sigma(i)}`.
pub fn permute<T: Clone>(sigma: &[usize], items: &[T]) -> Vec<T> {
    sigma.iter().map(|&s| items[s].clone()).collect()
}

/// `(sigma o tau)(i) = sigma(tau(i))`.
pub fn compose(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&t| sigma[t]).collect()
}

pub fn inverse(sigma: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    inv
}

/// Ordinary permutation sign by inversion count.
pub fn permutation_sign(sigma: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn check_sign_args(g: &GradingGroup, sigma: &[usize], degrees: &[Degree]) -> Result<()> {
    if sigma.len() != degrees.len() {
        return Err(Error::DimensionMismatch(format!(
            "permutation length {} vs degree list length {}",
            sigma.len(),
            degrees.len()
        )));
    }
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return Err(Error::InvalidInput(format!("not a permutation: {sigma:?}")));
        }
        seen[s] = true;
    }
    for d in degrees {
        if d.rank() != g.rank() {
            return Err(Error::DimensionMismatch(format!(
                "degree rank {} vs group rank {}",
                d.rank(),
                g.rank()
            )));
        }
    }
    Ok(())
}

/// The graded sign `s(sigma, x)`, generated by
/// `s((i,i+1), x) = -(-1)^{<x_i, x_{i+1}>}` on adjacent transpositions.
///
/// Computed by a left-to-right bubble decomposition: the current list starts
/// at `x` and is swapped step by step into `sigma . x`, each swap
/// contributing the generator sign of the two entries being exchanged.
/// Well-definedness is a tested property, not an assumption.
pub fn graded_sign(g: &GradingGroup, sigma: &[usize], degrees: &[Degree]) -> Result<i8> {
    check_sign_args(g, sigma, degrees)?;
    let n = sigma.len();
    // rank[v] = target position of original index v
    let rank = inverse(sigma);
    let mut order: Vec<usize> = (0..n).collect();
    let mut sign: i8 = 1;
    loop {
        let mut swapped = false;
        for i in 0..n.saturating_sub(1) {
            if rank[order[i]] > rank[order[i + 1]] {
                let p = g.pairing(&degrees[order[i]], &degrees[order[i + 1]])?;
                if p == 0 {
                    sign = -sign;
                }
                order.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    debug_assert!(order.iter().enumerate().all(|(i, &v)| v == sigma[i]));
    Ok(sign)
}

/// Same sign through a selection-sort decomposition (pull the entry destined
/// for each position to the front with adjacent swaps). An independent
/// decomposition used to witness well-definedness.
pub fn graded_sign_selection(g: &GradingGroup, sigma: &[usize], degrees: &[Degree]) -> Result<i8> {
    check_sign_args(g, sigma, degrees)?;
    let n = sigma.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut sign: i8 = 1;
    for i in 0..n {
        let j = order[i..].iter().position(|&v| v == sigma[i]).unwrap() + i;
        for k in (i..j).rev() {
            let p = g.pairing(&degrees[order[k]], &degrees[order[k + 1]])?;
            if p == 0 {
                sign = -sign;
            }
            order.swap(k, k + 1);
        }
    }
    debug_assert_eq!(order, sigma);
    Ok(sign)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Sign picked up by a fully skew map under a block permutation: the Koszul
/// sign `(-1)^{a_i a_j}` over inverted block pairs, with block lengths in
/// place of degrees. Equals `permutation_sign(sigma)` times the graded sign
/// of the length list over the rank-1 standard group.
pub fn block_koszul_sign(sigma: &[usize], lens: &[usize]) -> i8 {
    let z = GradingGroup::standard(1);
    let degs: Vec<Degree> = lens.iter().map(|&l| Degree(vec![l as i64])).collect();
    permutation_sign(sigma) * graded_sign(&z, sigma, &degs).expect("valid block data")
}

/// Element-level permutation realizing a block permutation: block `j` of the
/// result (length `lens[sigma(j)]`) is block `sigma(j)` of the input.
/// Returns the index map `pi` with `result_args[t] = input_args[pi[t]]`.
pub fn block_index_map(sigma: &[usize], lens: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize; lens.len()];
    let mut acc = 0;
    for (b, &l) in lens.iter().enumerate() {
        offsets[b] = acc;
        acc += l;
    }
    let mut map = Vec::with_capacity(acc);
    for &src in sigma {
        for o in 0..lens[src] {
            map.push(offsets[src] + o);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_standard_form() {
        let g = GradingGroup::standard(1);
        assert_eq!(
            g.pairing(&Degree(vec![1]), &Degree(vec![1])).unwrap(),
            1
        );
        let g2 = GradingGroup::standard(2);
        // x arbitrary, y = 0
        assert_eq!(
            g2.pairing(&Degree(vec![3, -2]), &Degree::zero(2)).unwrap(),
            0
        );
        // (1,1) . (1,0) = 1
        assert_eq!(
            g2.pairing(&Degree(vec![1, 1]), &Degree(vec![1, 0])).unwrap(),
            1
        );
    }

    #[test]
    fn pairing_symmetric_biadditive_exhaustive() {
        // exhaustive for rank <= 3, coords in -2..=2, over a non-identity form
        for rank in 1..=3usize {
            let mut form = vec![vec![0u8; rank]; rank];
            for i in 0..rank {
                form[i][i] = 1;
                if i + 1 < rank {
                    form[i][i + 1] = 1;
                    form[i + 1][i] = 1;
                }
            }
            let g = GradingGroup::new(form).unwrap();
            let coords: Vec<i64> = (-2..=2).collect();
            let mut degs = vec![Degree::zero(rank)];
            for _ in 0..rank {
                degs = degs
                    .into_iter()
                    .flat_map(|_d| std::iter::once(_d))
                    .collect();
            }
            // build a modest sample: all degrees with coords in {-2..2} for rank 1,
            // axis + mixed vectors otherwise
            let sample: Vec<Degree> = if rank == 1 {
                coords.iter().map(|&c| Degree(vec![c])).collect()
            } else {
                let mut s = Vec::new();
                for &a in &coords {
                    for &b in &coords {
                        let mut v = vec![0i64; rank];
                        v[0] = a;
                        v[rank - 1] = b;
                        s.push(Degree(v));
                    }
                }
                s
            };
            for x in &sample {
                for y in &sample {
                    assert_eq!(g.pairing(x, y).unwrap(), g.pairing(y, x).unwrap());
                    for z in &sample {
                        let lhs = g.pairing(&x.add(y), z).unwrap();
                        let rhs = (g.pairing(x, z).unwrap() + g.pairing(y, z).unwrap()) % 2;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn bidegree_pairing_cases() {
        let g = GradingGroup::trivial();
        let a = BiDegree::new(1, Degree::zero(0));
        assert_eq!(bidegree_pairing(&g, &a, &a).unwrap(), 1);
        let zero = BiDegree::new(0, Degree::zero(0));
        assert_eq!(bidegree_pairing(&g, &zero, &a).unwrap(), 0);
        // even form degrees contribute nothing
        let g2 = GradingGroup::standard(2);
        let x = Degree(vec![1, 0]);
        let y = Degree(vec![1, 1]);
        let a = BiDegree::new(2, x.clone());
        let b = BiDegree::new(3, y.clone());
        assert_eq!(
            bidegree_pairing(&g2, &a, &b).unwrap(),
            g2.pairing(&x, &y).unwrap()
        );
    }

    #[test]
    fn folded_pairing_matches_bidegree_pairing() {
        let g = GradingGroup::standard(2);
        let ge = g.extended();
        let a = BiDegree::new(3, Degree(vec![1, 0]));
        let b = BiDegree::new(1, Degree(vec![0, 1]));
        assert_eq!(
            bidegree_pairing(&g, &a, &b).unwrap(),
            ge.pairing(&a.folded(), &b.folded()).unwrap()
        );
    }

    #[test]
    fn graded_sign_generators() {
        let g = GradingGroup::standard(1);
        let even = Degree(vec![0]);
        let odd = Degree(vec![1]);
        // identity
        assert_eq!(
            graded_sign(&g, &[0, 1, 2], &[odd.clone(), even.clone(), odd.clone()]).unwrap(),
            1
        );
        // adjacent transposition, pairing 0 -> -1
        assert_eq!(
            graded_sign(&g, &[1, 0], &[even.clone(), even.clone()]).unwrap(),
            -1
        );
        // adjacent transposition, pairing 1 -> +1
        assert_eq!(
            graded_sign(&g, &[1, 0], &[odd.clone(), odd.clone()]).unwrap(),
            1
        );
    }

    #[test]
    fn graded_sign_reduces_to_ordinary() {
        let g = GradingGroup::trivial();
        let degs = vec![Degree::zero(0); 4];
        for sigma in permutations(4) {
            assert_eq!(
                graded_sign(&g, &sigma, &degs).unwrap(),
                permutation_sign(&sigma)
            );
        }
    }

    #[test]
    fn composition_law_small() {
        let g = GradingGroup::standard(2);
        let degs = vec![
            Degree(vec![1, 0]),
            Degree(vec![0, 1]),
            Degree(vec![1, 1]),
            Degree(vec![0, 0]),
        ];
        for sigma in permutations(4) {
            for tau in permutations(4) {
                let st = compose(&sigma, &tau);
                let lhs = graded_sign(&g, &st, &degs).unwrap();
                let sx = permute(&sigma, &degs);
                let rhs =
                    graded_sign(&g, &sigma, &degs).unwrap() * graded_sign(&g, &tau, &sx).unwrap();
                assert_eq!(lhs, rhs, "sigma={sigma:?} tau={tau:?}");
            }
        }
    }

    #[test]
    fn two_decompositions_agree() {
        let g = GradingGroup::standard(2);
        let degs = vec![
            Degree(vec![1, 1]),
            Degree(vec![1, 0]),
            Degree(vec![0, 1]),
            Degree(vec![1, 1]),
            Degree(vec![0, 0]),
        ];
        for sigma in permutations(5) {
            assert_eq!(
                graded_sign(&g, &sigma, &degs).unwrap(),
                graded_sign_selection(&g, &sigma, &degs).unwrap()
            );
        }
    }

    #[test]
    fn sign_rejects_length_mismatch() {
        let g = GradingGroup::trivial();
        assert!(graded_sign(&g, &[0, 1], &[Degree::zero(0)]).is_err());
        assert!(graded_sign(&g, &[0, 0], &[Degree::zero(0), Degree::zero(0)]).is_err());
    }

    #[test]
    fn form_validation() {
        assert!(GradingGroup::new(vec![vec![0, 1], vec![0, 0]]).is_err());
        assert!(GradingGroup::new(vec![vec![2]]).is_err());
        assert!(GradingGroup::new(vec![vec![1, 1], vec![1, 0]]).is_ok());
    }
}
