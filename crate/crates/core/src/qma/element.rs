//! Reduced elements of `M(R,F)` and operators with such entries.

use crate::error::{Error, Result};
use crate::scalars::Field;
use crate::tensorops::TensorOperator;
use crate::twistmaps::MatrixLinearMap;

use super::reducer::IdealReducer;

type Op<S> = TensorOperator<S>;

/// A homogeneous element in normal form: sparse coefficients over the normal monomials of its
/// degree, sorted by index. Two reduced elements are equal iff their coefficients are.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmaElement<S> {
    degree: usize,
    terms: Vec<(u32, S)>,
}

impl<S: Field> QmaElement<S> {
    pub fn zero(degree: usize) -> Self {
        QmaElement {
            degree,
            terms: Vec::new(),
        }
    }

    /// A degree-0 element.
    pub fn scalar(s: S) -> Self {
        Self::from_terms(0, vec![(0, s)])
    }

    pub fn from_terms(degree: usize, mut terms: Vec<(u32, S)>) -> Self {
        terms.retain(|t| !t.1.is_zero());
        terms.sort_by_key(|t| t.0);
        QmaElement { degree, terms }
    }

    pub fn from_dense(degree: usize, v: &[S]) -> Self {
        QmaElement {
            degree,
            terms: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k as u32, c.clone()))
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(u32, S)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of a degree-0 element.
    pub fn scalar_value(&self) -> S {
        assert_eq!(self.degree, 0, "not a scalar");
        self.terms.first().map_or_else(S::zero, |t| t.1.clone())
    }

    /// Panics if the degrees differ.
    pub fn add(&self, other: &Self) -> Self {
        self.axpy(other, &S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(other, &-S::one())
    }

    /// `self + f·other`.
    pub fn axpy(&self, other: &Self, f: &S) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                let v = f.mul_ref(&b[j].1);
                if !v.is_zero() {
                    out.push((b[j].0, v));
                }
                j += 1;
            } else {
                let v = a[i].1.clone() + f.mul_ref(&b[j].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        QmaElement {
            degree: self.degree,
            terms: out,
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.degree);
        }
        QmaElement {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (*k, c.mul_ref(s))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    /// Adds `f·self` into a dense accumulator.
    pub fn accumulate(&self, acc: &mut [S], f: &S) {
        for (k, c) in &self.terms {
            acc[*k as usize].add_mul(c, f);
        }
    }
}

/// An operator on `V^{⊗legs}` whose entries are reduced elements of one common degree.
/// Entries are stored row-major; a one-leg operator is a matrix `N_a^b` in the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmaOp<S> {
    dim: usize,
    legs: usize,
    degree: usize,
    entries: Vec<QmaElement<S>>,
}

impl<S: Field> QmaOp<S> {
    pub fn zero(dim: usize, legs: usize, degree: usize) -> Self {
        let size = dim.pow(legs as u32);
        QmaOp {
            dim,
            legs,
            degree,
            entries: vec![QmaElement::zero(degree); size * size],
        }
    }

    /// A scalar operator viewed in degree 0.
    pub fn from_scalar(x: &Op<S>) -> Self {
        let mut out = Self::zero(x.dim_v(), x.legs(), 0);
        let size = out.size();
        for (r, c, v) in x.entries() {
            out.entries[r * size + c] = QmaElement::scalar(v.clone());
        }
        out
    }

    pub fn identity(dim: usize, legs: usize) -> Self {
        Self::from_scalar(&Op::identity(dim, legs))
    }

    /// The matrix `M` of generators.
    pub fn generators(red: &IdealReducer<S>) -> Self {
        let n = red.dim_v();
        let mut out = Self::zero(n, 1, 1);
        for a in 0..n {
            for b in 0..n {
                out.entries[a * n + b] = red.generator(a, b);
            }
        }
        out
    }

    pub fn from_entries(
        dim: usize,
        legs: usize,
        degree: usize,
        entries: Vec<QmaElement<S>>,
    ) -> Result<Self> {
        let size = dim.pow(legs as u32);
        if entries.len() != size * size || entries.iter().any(|e| e.degree() != degree) {
            return Err(Error::Shape(
                "entries do not match the operator shape or degree".into(),
            ));
        }
        Ok(QmaOp {
            dim,
            legs,
            degree,
            entries,
        })
    }

    pub fn dim_v(&self) -> usize {
        self.dim
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.dim.pow(self.legs as u32)
    }

    pub fn get(&self, r: usize, c: usize) -> &QmaElement<S> {
        &self.entries[r * self.size() + c]
    }

    pub fn entries(&self) -> &[QmaElement<S>] {
        &self.entries
    }

    fn same_shape(&self, other: &Self) {
        assert!(
            self.dim == other.dim && self.legs == other.legs && self.degree == other.degree,
            "operator shapes or degrees differ"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(other, &S::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(other, &-S::one())
    }

    pub fn axpy(&self, other: &Self, f: &S) -> Self {
        self.same_shape(other);
        self.with(
            self.degree,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.axpy(b, f))
                .collect(),
        )
    }

    fn with(&self, degree: usize, entries: Vec<QmaElement<S>>) -> Self {
        QmaOp {
            dim: self.dim,
            legs: self.legs,
            degree,
            entries,
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.with(
            self.degree,
            self.entries.iter().map(|e| e.scale(s)).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Places `self` on the listed legs of `V^{⊗n}`, identity elsewhere.
    pub fn embed(&self, positions: &[usize], n: usize) -> Result<Self> {
        // the pattern of an embedding is that of the scalar embedding of the matrix units
        let size = self.size();
        let mut out = Self::zero(self.dim, n, self.degree);
        let big = out.size();
        for r in 0..size {
            for c in 0..size {
                let e = &self.entries[r * size + c];
                if e.is_zero() {
                    continue;
                }
                let unit = Op::<S>::from_entries(self.dim, self.legs, [(r, c, S::one())])
                    .embed(positions, n)?;
                for (i, j, _) in unit.entries() {
                    out.entries[i * big + j] = e.clone();
                }
            }
        }
        Ok(out)
    }

    /// `X · self` for a scalar operator `X`.
    pub fn left_scalar(&self, x: &Op<S>) -> Self {
        let size = self.size();
        let width = self.entry_width();
        let entries = (0..size)
            .flat_map(|i| {
                let mut acc: Vec<Vec<S>> = vec![Vec::new(); size];
                for (k, v) in x.row(i) {
                    for (j, slot) in acc.iter_mut().enumerate() {
                        let e = &self.entries[*k as usize * size + j];
                        if e.is_zero() {
                            continue;
                        }
                        if slot.is_empty() {
                            *slot = vec![S::zero(); width];
                        }
                        e.accumulate(slot, v);
                    }
                }
                acc.into_iter()
                    .map(|a| QmaElement::from_dense(self.degree, &a))
                    .collect::<Vec<_>>()
            })
            .collect();
        self.with(self.degree, entries)
    }

    /// `self · X` for a scalar operator `X`.
    pub fn right_scalar(&self, x: &Op<S>) -> Self {
        let size = self.size();
        let width = self.entry_width();
        let entries = (0..size)
            .flat_map(|i| {
                let mut acc: Vec<Vec<S>> = vec![Vec::new(); size];
                for k in 0..size {
                    let e = &self.entries[i * size + k];
                    if e.is_zero() {
                        continue;
                    }
                    for (j, v) in x.row(k) {
                        let slot = &mut acc[*j as usize];
                        if slot.is_empty() {
                            *slot = vec![S::zero(); width];
                        }
                        e.accumulate(slot, v);
                    }
                }
                acc.into_iter()
                    .map(|a| QmaElement::from_dense(self.degree, &a))
                    .collect::<Vec<_>>()
            })
            .collect();
        self.with(self.degree, entries)
    }

    fn entry_width(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| e.terms().last().map(|t| t.0 as usize + 1))
            .max()
            .unwrap_or(0)
    }

    /// Entrywise `N_a^b · x`.
    pub fn mul_elem_right(&self, red: &IdealReducer<S>, x: &QmaElement<S>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| red.mul(e, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with(self.degree + x.degree(), entries))
    }

    /// Entrywise `x · N_a^b`.
    pub fn mul_elem_left(&self, red: &IdealReducer<S>, x: &QmaElement<S>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| red.mul(x, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with(self.degree + x.degree(), entries))
    }

    /// Matrix product with entries multiplied in the algebra, left factor first.
    pub fn compose(&self, red: &IdealReducer<S>, other: &Self) -> Result<Self> {
        self.same_legs(other)?;
        let d = self.degree + other.degree;
        red.check_degree(d)?;
        let size = self.size();
        if other.degree == 1 {
            return self.compose_linear(red, other);
        }
        let width = red.dim(d)?;
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                let mut acc = vec![S::zero(); width];
                for k in 0..size {
                    let (a, b) = (&self.entries[i * size + k], &other.entries[k * size + j]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    red.mul(a, b)?.accumulate(&mut acc, &S::one());
                }
                entries.push(QmaElement::from_dense(d, &acc));
            }
        }
        Ok(QmaOp {
            dim: self.dim,
            legs: self.legs,
            degree: d,
            entries,
        })
    }

    /// Product with a degree-1 right factor: accumulate over `A_{d−1} ⊗ V`, then project once.
    fn compose_linear(&self, red: &IdealReducer<S>, other: &Self) -> Result<Self> {
        let size = self.size();
        let d = self.degree + 1;
        let gens = red.gens();
        let width = red.dim(self.degree)? * gens;
        let rows: Vec<Vec<QmaElement<S>>> = {
            use rayon::prelude::*;
            (0..size)
                .into_par_iter()
                .map(|i| {
                    (0..size)
                        .map(|j| {
                            let mut acc = vec![S::zero(); width];
                            for k in 0..size {
                                let (a, b) =
                                    (&self.entries[i * size + k], &other.entries[k * size + j]);
                                if a.is_zero() || b.is_zero() {
                                    continue;
                                }
                                for (v, cb) in b.terms() {
                                    let v = red.monomial(1, *v as usize)[0] as usize;
                                    for (m, ca) in a.terms() {
                                        acc[*m as usize * gens + v].add_mul(ca, cb);
                                    }
                                }
                            }
                            red.project(d, &acc)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(QmaOp {
            dim: self.dim,
            legs: self.legs,
            degree: d,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    fn same_legs(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.legs != other.legs {
            return Err(Error::Shape(format!(
                "{}-leg and {}-leg operators",
                self.legs, other.legs
            )));
        }
        Ok(())
    }

    /// `T(N)` for a one-leg operator and a linear map on matrices.
    pub fn apply_map(&self, map: &MatrixLinearMap<S>) -> Result<Self> {
        if self.legs != 1 || map.dim() != self.dim {
            return Err(Error::Shape("linear maps act on one-leg operators".into()));
        }
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = QmaElement::zero(self.degree);
                for ((c, d), l) in map.terms(a, b) {
                    acc = acc.axpy(&self.entries[c * n + d], l);
                }
                entries.push(acc);
            }
        }
        Ok(self.with(self.degree, entries))
    }

    /// `Tr(W · self)` over all legs.
    pub fn weighted_trace(&self, w: &Op<S>) -> QmaElement<S> {
        let size = self.size();
        let mut acc = QmaElement::zero(self.degree);
        for i in 0..size {
            for (k, v) in w.row(i) {
                acc = acc.axpy(&self.entries[*k as usize * size + i], v);
            }
        }
        acc
    }

    /// First differing entries, rendered with the reducer's monomial labels.
    pub fn diff_witness(
        &self,
        other: &Self,
        red: &IdealReducer<S>,
        limit: usize,
    ) -> Option<String> {
        if self.degree != other.degree || self.legs != other.legs {
            return Some(format!(
                "degree/legs {}/{} vs {}/{}",
                self.degree, self.legs, other.degree, other.legs
            ));
        }
        let size = self.size();
        let diffs: Vec<String> = self
            .entries
            .iter()
            .zip(&other.entries)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .take(limit)
            .map(|(k, (a, b))| format!("[{},{}]: {}", k / size, k % size, red.render(&a.sub(b))))
            .collect();
        if diffs.is_empty() {
            None
        } else {
            Some(format!("lhs − rhs nonzero at {}", diffs.join("; ")))
        }
    }
}
