//! Matrix copies, characteristic elements, descendants and the maps `⋆`, `Mt` on them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::bmwrep::{BmwWord, IdemKind, Representation};
use crate::error::{Error, Result};
use crate::scalars::Field;
use crate::tensorops::TensorOperator;
use crate::twistmaps::{CompatiblePair, MatrixLinearMap};

use super::element::{QmaElement, QmaOp};
use super::reducer::IdealReducer;

type Op<S> = TensorOperator<S>;

/// The algebra `M(R,F)` of a compatible pair, with its reducer and caches.
type ProductCache<S> = Mutex<HashMap<(usize, usize, usize), Arc<QmaOp<S>>>>;

pub struct Qma<'p, 'r, S> {
    pub pair: &'p CompatiblePair<'r, S>,
    pub red: IdealReducer<S>,
    pub rep: Representation<'r, S>,
    products: ProductCache<S>,
    elements: Mutex<HashMap<String, QmaElement<S>>>,
    phi: MatrixLinearMap<S>,
    xi: MatrixLinearMap<S>,
    phi_inv: MatrixLinearMap<S>,
}

/// Builds the normal forms of `M(R,F)` up to `max_degree`.
pub fn build_reducer<S: Field>(
    pair: &CompatiblePair<S>,
    max_degree: usize,
) -> Result<IdealReducer<S>> {
    IdealReducer::new(&pair.r.r, &pair.f.x, &pair.f.xinv, max_degree)
}

impl<'p, 'r, S: Field> Qma<'p, 'r, S> {
    pub fn new(pair: &'p CompatiblePair<'r, S>, max_degree: usize) -> Result<Self> {
        let red = build_reducer(pair, max_degree)?;
        Self::with_reducer(pair, red)
    }

    pub fn with_reducer(pair: &'p CompatiblePair<'r, S>, red: IdealReducer<S>) -> Result<Self> {
        Ok(Qma {
            pair,
            rep: Representation::new(pair.r),
            red,
            products: Mutex::new(HashMap::new()),
            elements: Mutex::new(HashMap::new()),
            phi: pair.phi()?,
            xi: pair.xi()?,
            phi_inv: pair.phi_inv()?,
        })
    }

    pub fn dim_v(&self) -> usize {
        self.pair.dim_v()
    }

    pub fn max_degree(&self) -> usize {
        self.red.max_degree()
    }

    fn q(&self) -> &S {
        &self.pair.r.params.q
    }

    fn mu(&self) -> &S {
        &self.pair.r.params.mu
    }

    /// `D_R^{⊗}` on the listed legs of `V^{⊗n}`, identity elsewhere.
    fn d_on(&self, legs: &[usize], n: usize) -> Result<Op<S>> {
        let mut w = Op::identity(self.dim_v(), n);
        for &l in legs {
            w = w.compose(&self.pair.r.d.embed(&[l], n)?);
        }
        Ok(w)
    }

    /// The matrix `M`.
    pub fn m(&self) -> QmaOp<S> {
        QmaOp::generators(&self.red)
    }

    pub fn identity(&self) -> QmaOp<S> {
        QmaOp::identity(self.dim_v(), 1)
    }

    /// The copy `M_ī` on `V^{⊗n}`: `M_1̄ = M₁`, `M_ī = F_{i−1} M_{i−1̄} F_{i−1}⁻¹`.
    pub fn copy(&self, i: usize, n: usize) -> Result<QmaOp<S>> {
        if i == 0 || i > n {
            return Err(Error::LegRange(format!("copy {i} on {n} legs")));
        }
        let mut c = self.m().embed(&[1], n)?;
        for k in 1..i {
            let f = self.pair.f.x.embed_at(k, n)?;
            let finv = self.pair.f.xinv.embed_at(k, n)?;
            c = c.left_scalar(&f).right_scalar(&finv);
        }
        Ok(c)
    }

    /// `M_ā M_{a+1̄} ⋯ M_b̄` on `V^{⊗n}`, reduced; the empty product is the identity.
    pub fn copies_range(&self, a: usize, b: usize, n: usize) -> Result<Arc<QmaOp<S>>> {
        if b < a {
            return Ok(Arc::new(QmaOp::identity(self.dim_v(), n)));
        }
        self.red.check_degree(b - a + 1)?;
        if let Some(p) = self.products.lock().expect("cache lock").get(&(a, b, n)) {
            return Ok(p.clone());
        }
        let p = if b == a {
            self.copy(a, n)?
        } else {
            let prev = self.copies_range(a, b - 1, n)?;
            prev.compose(&self.red, &self.copy(b, n)?)?
        };
        let p = Arc::new(p);
        self.products
            .lock()
            .expect("cache lock")
            .insert((a, b, n), p.clone());
        Ok(p)
    }

    /// `M_1̄ ⋯ M_n̄`.
    pub fn matrix_copies(&self, n: usize) -> Result<Arc<QmaOp<S>>> {
        self.copies_range(1, n, n)
    }

    /// `ch(X) = Tr_R(1..n)(M_1̄ ⋯ M_n̄ X)`; zero legs give the scalar `X`.
    pub fn ch(&self, x: &Op<S>) -> Result<QmaElement<S>> {
        let n = x.legs();
        let p = self.matrix_copies(n)?;
        let legs: Vec<usize> = (1..=n).collect();
        let w = x.compose(&self.d_on(&legs, n)?);
        Ok(p.weighted_trace(&w))
    }

    /// `(M^X)₁ = Tr_R(2..n)(M_1̄ ⋯ M_n̄ X)`.
    pub fn descendant(&self, x: &Op<S>) -> Result<QmaOp<S>> {
        self.descendant_from(1, x)
    }

    /// `Tr_R(2..n)(M_ā ⋯ M_n̄ X)` for `a ∈ {1, 2}`.
    pub fn descendant_from(&self, a: usize, x: &Op<S>) -> Result<QmaOp<S>> {
        let n = x.legs();
        if n == 0 {
            return Err(Error::LegRange("descendants need at least one leg".into()));
        }
        let p = self.copies_range(a, n, n)?;
        let legs: Vec<usize> = (2..=n).collect();
        let w = x.compose(&self.d_on(&legs, n)?);
        let dim = self.dim_v();
        let tail = dim.pow(n as u32 - 1);
        let size = dim * tail;
        let deg = p.degree();
        let width = self.red.dim(deg)?;
        let mut acc = vec![vec![S::zero(); width]; dim * dim];
        for a in 0..dim {
            for t in 0..tail {
                let r = a * tail + t;
                for k in 0..size {
                    let e = p.get(r, k);
                    if e.is_zero() {
                        continue;
                    }
                    for (col, v) in w.row(k) {
                        let col = *col as usize;
                        if col % tail == t {
                            e.accumulate(&mut acc[a * dim + col / tail], v);
                        }
                    }
                }
            }
        }
        let entries = acc.iter().map(|v| QmaElement::from_dense(deg, v)).collect();
        QmaOp::from_entries(dim, 1, deg, entries)
    }

    pub fn word(&self, w: &BmwWord, n: usize) -> Result<Op<S>> {
        self.rep.represent_word(w, n)
    }

    /// `M^{ρ(w)}` with `w` acting on `n` legs.
    pub fn descendant_word(&self, w: &BmwWord, n: usize) -> Result<QmaOp<S>> {
        self.descendant(&self.word(w, n)?)
    }

    pub fn ch_word(&self, w: &BmwWord, n: usize) -> Result<QmaElement<S>> {
        self.ch(&self.word(w, n)?)
    }

    /// `M^{n̄}`: `I`, `M`, then `M^{σ₁⋯σ_{n−1}}`.
    pub fn power(&self, n: usize) -> Result<QmaOp<S>> {
        match n {
            0 => Ok(self.identity()),
            1 => Ok(self.m()),
            _ => self.descendant_word(&BmwWord::sigma_run(1, n - 1), n),
        }
    }

    /// `M ⋆ N = M · φ(N)`.
    pub fn star(&self, n: &QmaOp<S>) -> Result<QmaOp<S>> {
        self.m().compose(&self.red, &n.apply_map(&self.phi)?)
    }

    /// `Mt(N) = M · ξ(N)`.
    pub fn mt(&self, n: &QmaOp<S>) -> Result<QmaOp<S>> {
        self.m().compose(&self.red, &n.apply_map(&self.xi)?)
    }

    pub fn phi(&self) -> &MatrixLinearMap<S> {
        &self.phi
    }

    pub fn xi(&self) -> &MatrixLinearMap<S> {
        &self.xi
    }

    pub fn phi_inv(&self) -> &MatrixLinearMap<S> {
        &self.phi_inv
    }

    /// `Tr_R N` of a one-leg operator.
    pub fn rtrace(&self, n: &QmaOp<S>) -> QmaElement<S> {
        n.weighted_trace(&self.pair.r.d)
    }

    /// `I · x`.
    pub fn times_identity(&self, x: &QmaElement<S>) -> Result<QmaOp<S>> {
        self.identity().mul_elem_right(&self.red, x)
    }

    fn cached(
        &self,
        key: String,
        build: impl FnOnce() -> Result<QmaElement<S>>,
    ) -> Result<QmaElement<S>> {
        if let Some(v) = self.elements.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = build()?;
        self.elements
            .lock()
            .expect("cache lock")
            .insert(key, v.clone());
        Ok(v)
    }

    /// The 2-contraction `g = η⁻¹ ch(κ₁)`.
    pub fn contraction2(&self) -> Result<QmaElement<S>> {
        self.cached("g".into(), || {
            let etainv = self.pair.r.params.etainv()?;
            Ok(self.ch(&self.pair.r.k)?.scale(&etainv))
        })
    }

    /// `p_0 = Tr_R I = μη`, `p_i = ch(σ₁⋯σ_{i−1})`.
    pub fn power_sum(&self, i: usize) -> Result<QmaElement<S>> {
        self.cached(format!("p{i}"), || match i {
            0 => Ok(QmaElement::scalar(self.pair.r.d.trace())),
            1 => self.ch(&Op::identity(self.dim_v(), 1)),
            _ => self.ch_word(&BmwWord::sigma_run(1, i - 1), i),
        })
    }

    fn idempotent_ch(&self, kind: IdemKind, i: usize) -> Result<QmaElement<S>> {
        if i == 0 {
            return Ok(QmaElement::scalar(S::one()));
        }
        let x = self.rep.idempotent(kind, i)?;
        self.ch(&x)
    }

    /// `a_i = ch(a^(i))`, `a_0 = 1`.
    pub fn elem_sym(&self, i: usize) -> Result<QmaElement<S>> {
        self.cached(format!("a{i}"), || self.idempotent_ch(IdemKind::Anti, i))
    }

    /// `s_i = ch(s^(i))`, `s_0 = 1`.
    pub fn compl_sym(&self, i: usize) -> Result<QmaElement<S>> {
        self.cached(format!("s{i}"), || self.idempotent_ch(IdemKind::Sym, i))
    }

    pub fn mul(&self, x: &QmaElement<S>, y: &QmaElement<S>) -> Result<QmaElement<S>> {
        self.red.mul(x, y)
    }

    /// `ρ(a^(i)↑m) ρ(w)` on `m + i` legs.
    fn shifted_anti_times(&self, i: usize, m: usize, w: &BmwWord) -> Result<Op<S>> {
        let n = m + i;
        let a = self.rep.idempotent(IdemKind::Anti, i)?.shifted(m, n)?;
        Ok(a.compose(&self.word(w, n)?))
    }

    /// The word `σ_m ⋯ σ_1` (empty for `m = 0`).
    fn down_run(m: usize) -> BmwWord {
        if m == 0 {
            BmwWord::unit()
        } else {
            BmwWord::sigma_run(m, 1)
        }
    }

    /// Exponent of `A^(m,i)` for `m ≥ 0`: `a^(i)↑m σ_m ⋯ σ_1` on `m + i` legs.
    pub fn a_exponent(&self, m: usize, i: usize) -> Result<Op<S>> {
        self.shifted_anti_times(i, m, &Self::down_run(m))
    }

    /// Exponent of `B^(m,i)` for `m ≥ 1`: `a^(i)↑m κ_m σ_{m−1} ⋯ σ_1` on `m + i` legs.
    pub fn b_exponent(&self, m: usize, i: usize) -> Result<Op<S>> {
        assert!(m >= 1);
        let w = BmwWord::letter(crate::bmwrep::Letter::Kappa(m)).then(&Self::down_run(m - 1));
        self.shifted_anti_times(i, m, &w)
    }

    /// `A^(m,i)` for `m ≥ −1`, with the boundary `A^(−1,i) = i_q φ⁻¹(Tr_R(2..i) M_2̄ ⋯ M_ī ρ(a^(i)))`
    /// and `A^(m,0) = 0`.
    pub fn descendant_a(&self, m: i64, i: usize) -> Result<QmaOp<S>> {
        let deg = (m + i as i64).max(0) as usize;
        if i == 0 {
            return Ok(QmaOp::zero(self.dim_v(), 1, deg));
        }
        let iq = self.pair.r.params.q_number(i as i64);
        if m == -1 {
            let a = self.rep.idempotent(IdemKind::Anti, i)?;
            let inner = self.descendant_from(2, &a)?;
            return Ok(inner.apply_map(&self.phi_inv)?.scale(&iq));
        }
        let x = self.a_exponent(m as usize, i)?;
        Ok(self.descendant(&x)?.scale(&iq))
    }

    /// `B^(m,i)` for `m ≥ 0`, with `B^(0,i) = i_q φ⁻¹(ξ(M^{a^(i)}))` and `B^(m,0) = 0`.
    pub fn descendant_b(&self, m: usize, i: usize) -> Result<QmaOp<S>> {
        if i == 0 {
            return Ok(QmaOp::zero(self.dim_v(), 1, m));
        }
        let iq = self.pair.r.params.q_number(i as i64);
        if m == 0 {
            let a = self.rep.idempotent(IdemKind::Anti, i)?;
            let ma = self.descendant(&a)?;
            return Ok(ma.apply_map(&self.xi)?.apply_map(&self.phi_inv)?.scale(&iq));
        }
        let x = self.b_exponent(m, i)?;
        Ok(self.descendant(&x)?.scale(&iq))
    }

    /// `A^(m,i)`/`B^(m,i)` dispatch by series.
    pub fn descendants_ab(&self, series: char, m: i64, i: usize) -> Result<QmaOp<S>> {
        match series {
            'A' => self.descendant_a(m, i),
            'B' if m >= 0 => self.descendant_b(m as usize, i),
            _ => Err(Error::InvalidParams(format!(
                "no descendant {series}^({m},{i})"
            ))),
        }
    }

    pub fn q_pow(&self, e: i64) -> S {
        self.q().pow(e).expect("q is invertible")
    }

    pub fn mu_pow(&self, e: i64) -> S {
        self.mu().pow(e).expect("μ is invertible")
    }
}
