//! Degree-by-degree normal forms for the quadratic algebra `M(R,F)`.
//!
//! Generators are labelled `A = a·N + b` (0-based) for `M_a^b`. A monomial of degree `n` is a
//! sequence of labels; its flat label is `Σ A_k · (N²)^{n−k}`.
//!
//! The degree-`n` ideal component satisfies `I_n = I_{n−1} ⊗ V + N_{n−2} ⊗ Q` modulo `I_{n−1} ⊗ V`,
//! where `Q` is the quadratic relation space and `N_{n−2}` the normal monomials of degree `n−2`.
//! Each degree therefore echelonizes a subspace of `A_{n−1} ⊗ V`; the non-pivot columns are the
//! normal monomials of degree `n` and the pivot rows give the normal-form projection.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalars::Field;
use crate::tensorops::TensorOperator;

use super::element::QmaElement;

type Op<S> = TensorOperator<S>;

/// A sparse element of the free algebra in a fixed degree, keyed by flat monomial labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeElement<S> {
    pub degree: usize,
    pub terms: BTreeMap<u64, S>,
}

impl<S: Field> FreeElement<S> {
    pub fn zero(degree: usize) -> Self {
        FreeElement {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(labels: &[usize], gens: usize) -> Self {
        let mut e = Self::zero(labels.len());
        e.terms.insert(flat_label(labels, gens), S::one());
        e
    }

    pub fn add_term(&mut self, label: u64, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(label).or_insert_with(S::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&label);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(*l, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.degree);
        for (l, c) in &self.terms {
            out.add_term(*l, c.mul_ref(s));
        }
        out
    }

    /// Concatenation product in the free algebra.
    pub fn mul(&self, other: &Self, gens: usize) -> Self {
        let shift = (gens as u64).pow(other.degree as u32);
        let mut out = Self::zero(self.degree + other.degree);
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                out.add_term(l1 * shift + l2, c1.mul_ref(c2));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn flat_label(labels: &[usize], gens: usize) -> u64 {
    labels
        .iter()
        .fold(0u64, |acc, &a| acc * gens as u64 + a as u64)
}

pub fn unflatten(mut label: u64, degree: usize, gens: usize) -> Vec<usize> {
    let mut out = vec![0; degree];
    for slot in out.iter_mut().rev() {
        *slot = (label % gens as u64) as usize;
        label /= gens as u64;
    }
    out
}

/// One graded component: its normal monomials and the projection from `A_{n−1} ⊗ V`.
#[derive(Clone, Debug)]
struct Level<S> {
    basis: Vec<Vec<u16>>,
    /// Indexed by `m · N² + v` for `m` a normal monomial of degree `n−1`.
    ext: Vec<Vec<(u32, S)>>,
}

/// Normal forms of `M(R,F)` up to a maximal degree.
#[derive(Clone, Debug)]
pub struct IdealReducer<S> {
    dim_v: usize,
    gens: usize,
    max_degree: usize,
    relation_rank: usize,
    /// Echelon basis of the quadratic relation space, over `V ⊗ V` labels.
    relations: Vec<Vec<(u32, S)>>,
    levels: Vec<Level<S>>,
}

/// The entries of `R₁M₁̄M₂̄ − M₁̄M₂̄R₁` with `M₂̄ = F₁M₁F₁⁻¹`, as vectors over `V ⊗ V` labels.
pub fn relation_entries<S: Field>(
    r: &Op<S>,
    f: &Op<S>,
    finv: &Op<S>,
) -> Result<Vec<FreeElement<S>>> {
    let n = r.dim_v();
    let gens = n * n;
    let m1 = FreeOp::generator_matrix(n)?.embed_first(2);
    let m2 = m1.left_scalar(f).right_scalar(finv);
    let prod = m1.mul(&m2, gens);
    let lhs = prod.left_scalar(r);
    let rhs = prod.right_scalar(r);
    Ok(lhs
        .entries
        .iter()
        .zip(&rhs.entries)
        .map(|(a, b)| a.add(&b.scale(&-S::one())))
        .filter(|e| !e.is_zero())
        .collect())
}

impl<S: Field> IdealReducer<S> {
    /// Builds the normal forms for degrees `0..=max_degree` of the algebra with relation
    /// `R₁M₁̄M₂̄ = M₁̄M₂̄R₁`, `M₂̄ = F₁M₁F₁⁻¹`.
    pub fn new(r: &Op<S>, f: &Op<S>, finv: &Op<S>, max_degree: usize) -> Result<Self> {
        if r.legs() != 2 || f.legs() != 2 || finv.legs() != 2 {
            return Err(Error::Shape("R and F must act on V⊗V".into()));
        }
        let dim_v = r.dim_v();
        let gens = dim_v * dim_v;
        let raw = relation_entries(r, f, finv)?;
        let mut levels = vec![
            Level {
                basis: vec![Vec::new()],
                ext: Vec::new(),
            },
            Level {
                basis: (0..gens).map(|v| vec![v as u16]).collect(),
                ext: (0..gens).map(|v| vec![(v as u32, S::one())]).collect(),
            },
        ];
        let mut relations = Vec::new();
        let mut relation_rank = 0;
        for d in 2..=max_degree.max(2) {
            let prev = &levels[d - 1];
            let width = prev.basis.len() * gens;
            let mut ech = Echelon::new(width);
            if d == 2 {
                for e in &raw {
                    let mut v = vec![S::zero(); width];
                    for (l, c) in &e.terms {
                        v[*l as usize] = c.clone();
                    }
                    ech.insert(v);
                }
                relation_rank = ech.rank();
                relations = ech.sparse_rows();
            } else {
                let base = &levels[d - 2];
                let vectors: Vec<Vec<S>> = (0..base.basis.len())
                    .into_par_iter()
                    .flat_map_iter(|w| {
                        relations.iter().map(move |q| {
                            let mut v = vec![S::zero(); width];
                            for (l, c) in q {
                                let (v1, v2) = (*l as usize / gens, *l as usize % gens);
                                for (m, s) in &prev.ext[w * gens + v1] {
                                    v[*m as usize * gens + v2].add_mul(c, s);
                                }
                            }
                            v
                        })
                    })
                    .collect();
                for v in vectors {
                    ech.insert(v);
                }
            }
            let level = ech.into_level(&levels[d - 1].basis, gens);
            if d <= max_degree {
                levels.push(level);
            }
        }
        levels.truncate(max_degree + 1);
        Ok(IdealReducer {
            dim_v,
            gens,
            max_degree,
            relation_rank,
            relations,
            levels,
        })
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Rank of the quadratic relation space.
    pub fn relation_rank(&self) -> usize {
        self.relation_rank
    }

    pub fn relations(&self) -> &[Vec<(u32, S)>] {
        &self.relations
    }

    /// Dimension of each graded component `0..=max_degree`.
    pub fn graded_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.basis.len()).collect()
    }

    pub fn dim(&self, degree: usize) -> Result<usize> {
        Ok(self.level(degree)?.basis.len())
    }

    /// Labels of the `idx`-th normal monomial of the given degree.
    pub fn monomial(&self, degree: usize, idx: usize) -> &[u16] {
        &self.levels[degree].basis[idx]
    }

    fn level(&self, degree: usize) -> Result<&Level<S>> {
        self.levels
            .get(degree)
            .ok_or(Error::DegreeOverflow(degree, self.max_degree))
    }

    pub fn check_degree(&self, degree: usize) -> Result<()> {
        self.level(degree).map(|_| ())
    }

    /// The generator `M_a^b`.
    pub fn generator(&self, a: usize, b: usize) -> QmaElement<S> {
        QmaElement::from_terms(1, vec![((a * self.dim_v + b) as u32, S::one())])
    }

    /// `x · M_v` for a generator label `v`.
    pub fn mul_gen(&self, x: &QmaElement<S>, v: usize) -> Result<QmaElement<S>> {
        let d = x.degree() + 1;
        let level = self.level(d)?;
        let mut acc = vec![S::zero(); level.basis.len()];
        for (m, c) in x.terms() {
            for (t, s) in &level.ext[*m as usize * self.gens + v] {
                acc[*t as usize].add_mul(c, s);
            }
        }
        Ok(QmaElement::from_dense(d, &acc))
    }

    /// Projects a vector over `A_{d−1} ⊗ V` coordinates to degree `d`.
    pub fn project(&self, d: usize, acc: &[S]) -> Result<QmaElement<S>> {
        let level = self.level(d)?;
        let mut out = vec![S::zero(); level.basis.len()];
        for (u, c) in acc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, s) in &level.ext[u] {
                out[*t as usize].add_mul(c, s);
            }
        }
        Ok(QmaElement::from_dense(d, &out))
    }

    /// Product in the quotient algebra.
    pub fn mul(&self, x: &QmaElement<S>, y: &QmaElement<S>) -> Result<QmaElement<S>> {
        let d = x.degree() + y.degree();
        self.check_degree(d)?;
        if y.degree() == 0 {
            return Ok(x.scale(&y.scalar_value()));
        }
        if x.is_zero() || y.is_zero() {
            return Ok(QmaElement::zero(d));
        }
        let mut acc = vec![S::zero(); self.levels[d].basis.len()];
        for (m, c) in y.terms() {
            let mut cur = x.scale(c);
            for &v in self.monomial(y.degree(), *m as usize) {
                cur = self.mul_gen(&cur, v as usize)?;
            }
            for (t, s) in cur.terms() {
                acc[*t as usize] += s.clone();
            }
        }
        Ok(QmaElement::from_dense(d, &acc))
    }

    pub fn pow(&self, x: &QmaElement<S>, k: usize) -> Result<QmaElement<S>> {
        let mut acc = QmaElement::scalar(S::one());
        for _ in 0..k {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Normal form of a free-algebra element.
    pub fn reduce(&self, x: &FreeElement<S>) -> Result<QmaElement<S>> {
        let d = x.degree;
        self.check_degree(d)?;
        let mut acc = vec![S::zero(); self.levels[d].basis.len()];
        for (l, c) in &x.terms {
            let mut cur = QmaElement::scalar(c.clone());
            for v in unflatten(*l, d, self.gens) {
                cur = self.mul_gen(&cur, v)?;
            }
            for (t, s) in cur.terms() {
                acc[*t as usize] += s.clone();
            }
        }
        Ok(QmaElement::from_dense(d, &acc))
    }

    /// The normal-form representative as a free-algebra element.
    pub fn lift(&self, x: &QmaElement<S>) -> FreeElement<S> {
        let mut out = FreeElement::zero(x.degree());
        for (m, c) in x.terms() {
            let labels: Vec<usize> = self
                .monomial(x.degree(), *m as usize)
                .iter()
                .map(|&v| v as usize)
                .collect();
            out.add_term(flat_label(&labels, self.gens), c.clone());
        }
        out
    }

    /// Human-readable form with 1-based indices, e.g. `2·M12M31 + M33M11`.
    pub fn render(&self, x: &QmaElement<S>) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = x
            .terms()
            .iter()
            .take(6)
            .map(|(m, c)| {
                let mono: String = self
                    .monomial(x.degree(), *m as usize)
                    .iter()
                    .map(|&v| {
                        format!(
                            "M{}{}",
                            v as usize / self.dim_v + 1,
                            v as usize % self.dim_v + 1
                        )
                    })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{c}·{mono}")
                }
            })
            .collect();
        let more = if x.terms().len() > 6 {
            format!(" + … ({} terms)", x.terms().len())
        } else {
            String::new()
        };
        format!("{}{more}", parts.join(" + "))
    }
}

/// Incremental reduced row echelon form over dense rows.
struct Echelon<S> {
    width: usize,
    /// Pivot column and sparse row (pivot entry 1, zero at other pivots).
    rows: Vec<(usize, Vec<(u32, S)>)>,
    pivot_of: Vec<Option<usize>>,
}

impl<S: Field> Echelon<S> {
    fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
            pivot_of: vec![None; width],
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, mut v: Vec<S>) {
        for c in 0..self.width {
            if v[c].is_zero() {
                continue;
            }
            if let Some(r) = self.pivot_of[c] {
                let f = v[c].clone();
                for (k, x) in &self.rows[r].1 {
                    v[*k as usize] -= f.mul_ref(x);
                }
            }
        }
        let Some(c) = v.iter().position(|x| !x.is_zero()) else {
            return;
        };
        let inv = v[c].inv().expect("pivot is nonzero");
        let row: Vec<(u32, S)> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (k as u32, x.mul_ref(&inv)))
            .collect();
        for (_, other) in self.rows.iter_mut() {
            let Ok(pos) = other.binary_search_by_key(&(c as u32), |e| e.0) else {
                continue;
            };
            let f = other[pos].1.clone();
            *other = axpy(other, &row, &-f);
        }
        self.pivot_of[c] = Some(self.rows.len());
        self.rows.push((c, row));
    }

    fn sparse_rows(&self) -> Vec<Vec<(u32, S)>> {
        let mut rows: Vec<_> = self.rows.clone();
        rows.sort_by_key(|r| r.0);
        rows.into_iter().map(|r| r.1).collect()
    }

    /// Non-pivot columns become the basis; pivot columns are rewritten through their rows.
    fn into_level(self, prev_basis: &[Vec<u16>], gens: usize) -> Level<S> {
        let mut index = vec![u32::MAX; self.width];
        let mut basis = Vec::new();
        for c in 0..self.width {
            if self.pivot_of[c].is_none() {
                index[c] = basis.len() as u32;
                let mut labels = prev_basis[c / gens].clone();
                labels.push((c % gens) as u16);
                basis.push(labels);
            }
        }
        let ext = (0..self.width)
            .map(|c| match self.pivot_of[c] {
                None => vec![(index[c], S::one())],
                Some(r) => {
                    let mut e: Vec<(u32, S)> = self.rows[r]
                        .1
                        .iter()
                        .filter(|(k, _)| *k as usize != c)
                        .map(|(k, x)| (index[*k as usize], -x.clone()))
                        .collect();
                    e.sort_by_key(|t| t.0);
                    e
                }
            })
            .collect();
        Level { basis, ext }
    }
}

/// `a + f·b` for sorted sparse vectors.
fn axpy<S: Field>(a: &[(u32, S)], b: &[(u32, S)], f: &S) -> Vec<(u32, S)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map(|e| e.0);
        let kb = b.get(j).map(|e| e.0);
        match (ka, kb) {
            (Some(x), Some(y)) if x == y => {
                let v = a[i].1.clone() + f.mul_ref(&b[j].1);
                if !v.is_zero() {
                    out.push((x, v));
                }
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(a[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(a[i].clone());
                i += 1;
            }
            _ => {
                out.push((b[j].0, f.mul_ref(&b[j].1)));
                j += 1;
            }
        }
    }
    out
}

/// An operator on `V^{⊗n}` with free-algebra entries; used for the raw relations and as an
/// unreduced reference.
#[derive(Clone, Debug)]
pub struct FreeOp<S> {
    pub dim: usize,
    pub legs: usize,
    pub entries: Vec<FreeElement<S>>,
}

impl<S: Field> FreeOp<S> {
    /// The one-leg matrix `M` of generators.
    pub fn generator_matrix(n: usize) -> Result<Self> {
        let gens = n * n;
        let entries = (0..gens)
            .map(|l| FreeElement::monomial(&[l], gens))
            .collect();
        Ok(FreeOp {
            dim: n,
            legs: 1,
            entries,
        })
    }

    fn size(&self) -> usize {
        self.dim.pow(self.legs as u32)
    }

    /// `M₁` on `V^{⊗n}`.
    pub fn embed_first(&self, n: usize) -> Self {
        assert_eq!(self.legs, 1);
        let tail = self.dim.pow(n as u32 - 1);
        let size = self.dim * tail;
        let degree = self.entries[0].degree;
        let mut entries = vec![FreeElement::zero(degree); size * size];
        for a in 0..self.dim {
            for b in 0..self.dim {
                for t in 0..tail {
                    entries[(a * tail + t) * size + b * tail + t] =
                        self.entries[a * self.dim + b].clone();
                }
            }
        }
        FreeOp {
            dim: self.dim,
            legs: n,
            entries,
        }
    }

    pub fn left_scalar(&self, x: &Op<S>) -> Self {
        let size = self.size();
        let degree = self.entries[0].degree;
        let mut entries = vec![FreeElement::zero(degree); size * size];
        for i in 0..size {
            for (k, v) in x.row(i) {
                for j in 0..size {
                    let e = &self.entries[*k as usize * size + j];
                    if !e.is_zero() {
                        entries[i * size + j] = entries[i * size + j].add(&e.scale(v));
                    }
                }
            }
        }
        FreeOp {
            dim: self.dim,
            legs: self.legs,
            entries,
        }
    }

    pub fn right_scalar(&self, x: &Op<S>) -> Self {
        let size = self.size();
        let degree = self.entries[0].degree;
        let mut entries = vec![FreeElement::zero(degree); size * size];
        for i in 0..size {
            for k in 0..size {
                let e = &self.entries[i * size + k];
                if e.is_zero() {
                    continue;
                }
                for (j, v) in x.row(k) {
                    let slot = &mut entries[i * size + *j as usize];
                    *slot = slot.add(&e.scale(v));
                }
            }
        }
        FreeOp {
            dim: self.dim,
            legs: self.legs,
            entries,
        }
    }

    pub fn mul(&self, other: &Self, gens: usize) -> Self {
        let size = self.size();
        let degree = self.entries[0].degree + other.entries[0].degree;
        let mut entries = vec![FreeElement::zero(degree); size * size];
        for i in 0..size {
            for k in 0..size {
                let a = &self.entries[i * size + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..size {
                    let b = &other.entries[k * size + j];
                    if !b.is_zero() {
                        let slot = &mut entries[i * size + j];
                        *slot = slot.add(&a.mul(b, gens));
                    }
                }
            }
        }
        FreeOp {
            dim: self.dim,
            legs: self.legs,
            entries,
        }
    }
}
