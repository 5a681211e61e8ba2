//! R-matrix representations of the BMW algebras: words, baxterized elements, the
//! (anti)symmetrizers and contractors, and the checks on their properties.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Recorder, Report, Verdict};
use crate::rmatrix::BmwRMatrix;
use crate::scalars::{check_admissible, AlgebraParams, Field, Side};
use crate::tensorops::TensorOperator;

type Op<S> = TensorOperator<S>;

/// A generator of the braid group or BMW algebra, with a 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Sigma(usize),
    SigmaInv(usize),
    Kappa(usize),
}

impl Letter {
    pub fn index(self) -> usize {
        match self {
            Letter::Sigma(i) | Letter::SigmaInv(i) | Letter::Kappa(i) => i,
        }
    }

    pub fn shift(self, k: usize) -> Letter {
        match self {
            Letter::Sigma(i) => Letter::Sigma(i + k),
            Letter::SigmaInv(i) => Letter::SigmaInv(i + k),
            Letter::Kappa(i) => Letter::Kappa(i + k),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Sigma(i) => write!(f, "σ{i}"),
            Letter::SigmaInv(i) => write!(f, "σ{i}⁻¹"),
            Letter::Kappa(i) => write!(f, "κ{i}"),
        }
    }
}

/// A word in the generators; the empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BmwWord(pub Vec<Letter>);

impl BmwWord {
    pub fn unit() -> Self {
        BmwWord(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        BmwWord(vec![l])
    }

    pub fn then(&self, other: &BmwWord) -> BmwWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BmwWord(v)
    }

    /// The antiautomorphism ς: letters in reverse order.
    pub fn reverse(&self) -> BmwWord {
        BmwWord(self.0.iter().rev().copied().collect())
    }

    /// `w↑k`: every index raised by `k`.
    pub fn shift_up(&self, k: usize) -> BmwWord {
        BmwWord(self.0.iter().map(|l| l.shift(k)).collect())
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    /// `σ_a σ_{a±1} ⋯ σ_b`, running up or down as needed.
    pub fn sigma_run(a: usize, b: usize) -> BmwWord {
        Self::run(a, b, Letter::Sigma)
    }

    pub fn sigma_inv_run(a: usize, b: usize) -> BmwWord {
        Self::run(a, b, Letter::SigmaInv)
    }

    pub fn kappa_run(a: usize, b: usize) -> BmwWord {
        Self::run(a, b, Letter::Kappa)
    }

    fn run(a: usize, b: usize, f: fn(usize) -> Letter) -> BmwWord {
        if a <= b {
            BmwWord((a..=b).map(f).collect())
        } else {
            BmwWord((b..=a).rev().map(f).collect())
        }
    }
}

impl fmt::Display for BmwWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `τ^(n)`, with `τ^(1) = 1` and `τ^(j+1) = τ^(j) σ_j ⋯ σ_1`.
pub fn tau(n: usize) -> BmwWord {
    let mut w = BmwWord::unit();
    for j in 1..n {
        w = w.then(&BmwWord::sigma_run(j, 1));
    }
    w
}

/// A formal linear combination of words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BmwElement<S> {
    pub terms: BTreeMap<BmwWord, S>,
}

impl<S: Field> BmwElement<S> {
    pub fn zero() -> Self {
        BmwElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn word(w: BmwWord) -> Self {
        Self::term(S::one(), w)
    }

    pub fn unit() -> Self {
        Self::word(BmwWord::unit())
    }

    pub fn term(c: S, w: BmwWord) -> Self {
        let mut e = Self::zero();
        e.push(c, w);
        e
    }

    fn push(&mut self, c: S, w: BmwWord) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w).or_insert_with(S::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = self.clone();
        for (w, c) in &other.terms {
            e.push(c.clone(), w.clone());
        }
        e
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut e = Self::zero();
        for (w, c) in &self.terms {
            e.push(c.mul_ref(s), w.clone());
        }
        e
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                e.push(c1.mul_ref(c2), w1.then(w2));
            }
        }
        e
    }

    pub fn reverse(&self) -> Self {
        let mut e = Self::zero();
        for (w, c) in &self.terms {
            e.push(c.clone(), w.reverse());
        }
        e
    }

    pub fn shift_up(&self, k: usize) -> Self {
        let mut e = Self::zero();
        for (w, c) in &self.terms {
            e.push(c.clone(), w.shift_up(k));
        }
        e
    }

    pub fn max_index(&self) -> usize {
        self.terms.keys().map(BmwWord::max_index).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `σ_i^ε(x) = 1 + (x−1)/(q−q⁻¹) σ_i + (x−1)/(α_ε x+1) κ_i` with `α_ε = −ε q^{−ε} μ⁻¹`.
pub fn baxterized<S: Field>(
    i: usize,
    eps: i64,
    x: &S,
    params: &AlgebraParams<S>,
) -> Result<BmwElement<S>> {
    let alpha = -(S::from_i64(eps) * params.qpow(-eps) * params.muinv());
    let den = alpha * x.clone() + S::one();
    if den.is_zero() {
        return Err(Error::SpectralPole(x.to_string()));
    }
    let xm = x.clone() - S::one();
    Ok(BmwElement::unit()
        .add(&BmwElement::term(
            xm.try_div(&params.qdiff())?,
            BmwWord::letter(Letter::Sigma(i)),
        ))
        .add(&BmwElement::term(
            xm.try_div(&den)?,
            BmwWord::letter(Letter::Kappa(i)),
        )))
}

/// Which recursion builds an idempotent, and at which parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdemKind {
    /// `a^(i)` at `(q, μ)`.
    Anti,
    /// `s^(i)` at `(q, μ)`.
    Sym,
    /// The antisymmetrizer recursion evaluated at `(−q⁻¹, μ)`.
    IotaAnti,
    /// The symmetrizer recursion evaluated at `(−q⁻¹, μ)`.
    IotaSym,
}

impl IdemKind {
    fn antisym(self) -> bool {
        matches!(self, IdemKind::Anti | IdemKind::IotaAnti)
    }

    fn params<S: Field>(self, base: &AlgebraParams<S>) -> Result<AlgebraParams<S>> {
        match self {
            IdemKind::Anti | IdemKind::Sym => Ok(base.clone()),
            IdemKind::IotaAnti | IdemKind::IotaSym => base.iota(),
        }
    }

    fn side(self) -> Side {
        if self.antisym() {
            Side::Antisym
        } else {
            Side::Sym
        }
    }

    /// Prefactor, sign and spectral parameter of the step from order `k` to `k+1`.
    fn step<S: Field>(self, p: &AlgebraParams<S>, k: usize) -> Result<(S, i64, S)> {
        let k = k as i64;
        let norm = p.q_number(k + 1).try_inv()?;
        Ok(if self.antisym() {
            (p.qpow(k) * norm, -1, p.qpow(-2 * k))
        } else {
            (p.qpow(-k) * norm, 1, p.qpow(2 * k))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    Gen(Letter, usize),
    Idem(IdemKind, usize),
    Contractor(usize),
}

/// The representation `ρ_R` of the BMW algebras on tensor powers, with operator caches.
pub struct Representation<'a, S> {
    pub bmw: &'a BmwRMatrix<S>,
    cache: RwLock<HashMap<Key, Arc<Op<S>>>>,
}

impl<'a, S: Field> Representation<'a, S> {
    pub fn new(bmw: &'a BmwRMatrix<S>) -> Self {
        Representation {
            bmw,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &AlgebraParams<S> {
        &self.bmw.params
    }

    pub fn dim_v(&self) -> usize {
        self.bmw.dim_v()
    }

    fn cached(&self, key: Key, build: impl FnOnce() -> Result<Op<S>>) -> Result<Arc<Op<S>>> {
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(build()?);
        let mut w = self.cache.write().expect("cache lock");
        Ok(w.entry(key).or_insert(v).clone())
    }

    /// `ρ_R` of a single generator on `V^{⊗n}`.
    pub fn generator(&self, l: Letter, n: usize) -> Result<Arc<Op<S>>> {
        let i = l.index();
        if i == 0 || i >= n {
            return Err(Error::LegRange(format!("{l} on {n} legs")));
        }
        self.cached(Key::Gen(l, n), || {
            let base = match l {
                Letter::Sigma(_) => &self.bmw.r,
                Letter::SigmaInv(_) => &self.bmw.rinv,
                Letter::Kappa(_) => &self.bmw.k,
            };
            base.embed_at(i, n)
        })
    }

    pub fn represent_word(&self, w: &BmwWord, n: usize) -> Result<Op<S>> {
        let mut acc: Option<Op<S>> = None;
        for &l in &w.0 {
            let g = self.generator(l, n)?;
            acc = Some(match acc {
                None => (*g).clone(),
                Some(a) => a.compose(&g),
            });
        }
        Ok(acc.unwrap_or_else(|| Op::identity(self.dim_v(), n)))
    }

    /// Words are visited in sorted order so that products of shared prefixes are reused.
    pub fn represent(&self, e: &BmwElement<S>, n: usize) -> Result<Op<S>> {
        let mut acc = Op::zero(self.dim_v(), n);
        let mut prev: &[Letter] = &[];
        let mut stack: Vec<Op<S>> = Vec::new();
        for (w, c) in &e.terms {
            let common = prev.iter().zip(&w.0).take_while(|(a, b)| a == b).count();
            stack.truncate(common);
            for &l in &w.0[common..] {
                let g = self.generator(l, n)?;
                let next = match stack.last() {
                    None => (*g).clone(),
                    Some(top) => top.compose(&g),
                };
                stack.push(next);
            }
            prev = &w.0;
            match stack.last() {
                None => acc = acc.add_scalar(c),
                Some(top) => acc = acc.add(&top.scale(c)),
            }
        }
        Ok(acc)
    }

    /// `ρ_R(σ_i^ε(x))` on `V^{⊗n}`, using the given parameters for the coefficients.
    pub fn baxterized_with(
        &self,
        p: &AlgebraParams<S>,
        i: usize,
        eps: i64,
        x: &S,
        n: usize,
    ) -> Result<Op<S>> {
        self.represent(&baxterized(i, eps, x, p)?, n)
    }

    /// An idempotent of order `i` on its own `i` legs; both recursions are evaluated and compared.
    pub fn idempotent(&self, kind: IdemKind, i: usize) -> Result<Arc<Op<S>>> {
        if i == 0 {
            return Err(Error::InvalidParams("order must be positive".into()));
        }
        let p = kind.params(self.params())?;
        check_admissible(&p, i, kind.side())?;
        self.cached(Key::Idem(kind, i), || {
            if i == 1 {
                return Ok(Op::identity(self.dim_v(), 1));
            }
            let k = i - 1;
            let prev = self.idempotent(kind, k)?;
            let (coef, eps, x) = kind.step(&p, k)?;
            let low = prev.shifted(0, i)?;
            let high = prev.shifted(1, i)?;
            let v1 = low
                .compose(&self.baxterized_with(&p, k, eps, &x, i)?)
                .compose(&low)
                .scale(&coef);
            let v2 = high
                .compose(&self.baxterized_with(&p, 1, eps, &x, i)?)
                .compose(&high)
                .scale(&coef);
            if let Some(w) = v1.diff_witness(&v2, 3) {
                return Err(Error::RecursionMismatch(format!("{kind:?} order {i}: {w}")));
            }
            Ok(v1)
        })
    }

    /// `ρ_R(a^(i))` on legs `1..i` of `V^{⊗n}`.
    pub fn antisymmetrizer(&self, i: usize, n: usize) -> Result<Op<S>> {
        self.idempotent(IdemKind::Anti, i)?.shifted(0, n)
    }

    /// `ρ_R(s^(i))` on legs `1..i` of `V^{⊗n}`.
    pub fn symmetrizer(&self, i: usize, n: usize) -> Result<Op<S>> {
        self.idempotent(IdemKind::Sym, i)?.shifted(0, n)
    }

    /// `ρ_R(c^(2i))` on its own `2i` legs; the recursion and the chain form are compared.
    pub fn contractor_base(&self, two_i: usize) -> Result<Arc<Op<S>>> {
        if two_i == 0 || two_i % 2 == 1 {
            return Err(Error::InvalidParams(format!(
                "contractor order {two_i} must be even and positive"
            )));
        }
        self.cached(Key::Contractor(two_i), || {
            let etainv = self.params().etainv()?;
            if two_i == 2 {
                return Ok(self.bmw.k.scale(&etainv));
            }
            let m = two_i;
            let i = m / 2;
            let prev = self.contractor_base(m - 2)?.shifted(1, m)?;
            let k1 = self.generator(Letter::Kappa(1), m)?;
            let kl = self.generator(Letter::Kappa(m - 1), m)?;
            let rec = prev.compose(&k1).compose(&kl).compose(&prev);
            let chain = BmwWord::kappa_run(m - 1, i + 1).then(&BmwWord::kappa_run(1, i));
            let alt = prev
                .compose(&self.represent_word(&chain, m)?)
                .scale(&etainv);
            if let Some(w) = rec.diff_witness(&alt, 3) {
                return Err(Error::RecursionMismatch(format!("contractor {m}: {w}")));
            }
            Ok(rec)
        })
    }

    /// `ρ_R(c^(2i))` shifted up by `shift` inside `V^{⊗n}`.
    pub fn contractor(&self, two_i: usize, shift: usize, n: usize) -> Result<Op<S>> {
        if two_i == 0 {
            return Ok(Op::identity(self.dim_v(), n));
        }
        self.contractor_base(two_i)?.shifted(shift, n)
    }
}

/// Formal expansion of an (anti)symmetrizer by the first recursion.
pub fn idempotent_element<S: Field>(
    kind: IdemKind,
    base: &AlgebraParams<S>,
    i: usize,
) -> Result<BmwElement<S>> {
    let p = kind.params(base)?;
    check_admissible(&p, i, kind.side())?;
    let mut a = BmwElement::unit();
    for k in 1..i {
        let (coef, eps, x) = kind.step(&p, k)?;
        a = a.mul(&baxterized(k, eps, &x, &p)?).mul(&a).scale(&coef);
    }
    Ok(a)
}

/// Formal expansion of `c^(2i)` by its recursion.
pub fn contractor_element<S: Field>(
    base: &AlgebraParams<S>,
    two_i: usize,
) -> Result<BmwElement<S>> {
    let mut c = BmwElement::term(base.etainv()?, BmwWord::letter(Letter::Kappa(1)));
    let mut m = 2;
    while m < two_i {
        let up = c.shift_up(1);
        let kk = BmwElement::word(BmwWord(vec![Letter::Kappa(1), Letter::Kappa(m + 1)]));
        c = up.mul(&kk).mul(&up);
        m += 2;
    }
    Ok(c)
}

fn params_json<S: Field>(b: &BmwRMatrix<S>, key: &str, v: usize) -> serde_json::Value {
    let mut p = b.params_json();
    p[key] = json!(v);
    p
}

fn scaled<S: Field>(x: &Op<S>, s: &S) -> Op<S> {
    x.scale(s)
}

/// Checks the properties of the (anti)symmetrizers and contractors up to order `n_max`.
pub fn verify_proposition22<S: Field>(rep: &Representation<S>, n_max: usize) -> Report {
    let b = rep.bmw;
    let p = rep.params().clone();
    let mut rec = Recorder::new("idempotents", params_json(b, "nMax", n_max));
    let nv = rep.dim_v();
    let q = p.q.clone();
    let mq = -p.qinv();

    rec.check("resolution", "a^(2) + s^(2) + η⁻¹κ1 = 1", || {
        let sum = rep
            .antisymmetrizer(2, 2)?
            .add(&rep.symmetrizer(2, 2)?)
            .add(&b.k.scale(&p.etainv()?));
        Ok(Verdict::ops(&sum, &Op::identity(nv, 2)))
    });
    for n in 2..=n_max {
        for (kind, name) in [(IdemKind::Anti, "a"), (IdemKind::Sym, "s")] {
            let ev = if kind == IdemKind::Anti {
                mq.clone()
            } else {
                q.clone()
            };
            rec.check(
                &format!("recursions-agree-{name}{n}"),
                "two recursions for the idempotent agree",
                || {
                    rep.idempotent(kind, n)?;
                    Ok(Verdict::Pass)
                },
            );
            rec.check(&format!("idempotent-{name}{n}"), "X² = X", || {
                let x = rep.idempotent(kind, n)?;
                Ok(Verdict::ops(&x.compose(&x), &x))
            });
            rec.check(
                &format!("eigen-{name}{n}"),
                if kind == IdemKind::Anti {
                    "a σi = σi a = −q⁻¹ a"
                } else {
                    "s σi = σi s = q s"
                },
                || {
                    let x = rep.idempotent(kind, n)?;
                    let target = x.scale(&ev);
                    let mut vs = Vec::new();
                    for i in 1..n {
                        let s = rep.generator(Letter::Sigma(i), n)?;
                        vs.push(
                            Verdict::ops(&x.compose(&s), &target).context(&format!("right σ{i}")),
                        );
                        vs.push(
                            Verdict::ops(&s.compose(&x), &target).context(&format!("left σ{i}")),
                        );
                    }
                    Ok(Verdict::all(vs))
                },
            );
            rec.check(
                &format!("absorb-{name}{n}"),
                "X^(n) X^(m)↑i = X^(m)↑i X^(n) = X^(n), m + i ≤ n",
                || {
                    let x = rep.idempotent(kind, n)?;
                    let mut vs = Vec::new();
                    for m in 2..=n {
                        let y = rep.idempotent(kind, m)?;
                        for i in 0..=n - m {
                            let ys = y.shifted(i, n)?;
                            vs.push(
                                Verdict::ops(&x.compose(&ys), &x).context(&format!("m={m} i={i}")),
                            );
                            vs.push(
                                Verdict::ops(&ys.compose(&x), &x).context(&format!("m={m} i={i}")),
                            );
                        }
                    }
                    Ok(Verdict::all(vs))
                },
            );
            rec.check(
                &format!("central-{name}{n}"),
                "X^(n) commutes with σi and κi",
                || {
                    let x = rep.idempotent(kind, n)?;
                    let mut vs = Vec::new();
                    for i in 1..n {
                        for l in [Letter::Sigma(i), Letter::Kappa(i)] {
                            let g = rep.generator(l, n)?;
                            vs.push(
                                Verdict::ops(&x.compose(&g), &g.compose(&x))
                                    .context(&l.to_string()),
                            );
                        }
                    }
                    Ok(Verdict::all(vs))
                },
            );
        }
        rec.check(
            &format!("divide-a{n}"),
            "a^(n) σi⁻(q²) = σi⁻(q²) a^(n) = 0",
            || {
                if p.mu == -p.qpow(3) {
                    return Ok(Verdict::Skip("μ = −q³ is a pole of σ⁻(q²)".into()));
                }
                let x = rep.idempotent(IdemKind::Anti, n)?;
                let z = Op::zero(nv, n);
                let mut vs = Vec::new();
                for i in 1..n {
                    let s = rep.baxterized_with(&p, i, -1, &p.qpow(2), n)?;
                    vs.push(Verdict::ops(&x.compose(&s), &z).context(&format!("right i={i}")));
                    vs.push(Verdict::ops(&s.compose(&x), &z).context(&format!("left i={i}")));
                }
                Ok(Verdict::all(vs))
            },
        );
        for m in 2..=n_max {
            rec.check(
                &format!("orthogonal-a{n}-s{m}"),
                "a^(n) s^(m) = s^(m) a^(n) = 0",
                || {
                    let legs = n.max(m);
                    let a = rep.antisymmetrizer(n, legs)?;
                    let s = rep.symmetrizer(m, legs)?;
                    let z = Op::zero(nv, legs);
                    Ok(Verdict::all([
                        Verdict::ops(&a.compose(&s), &z),
                        Verdict::ops(&s.compose(&a), &z),
                    ]))
                },
            );
        }
    }
    for cn in 1..=n_max / 2 {
        let legs = 2 * cn;
        rec.check(&format!("idempotent-c{legs}"), "c² = c", || {
            let c = rep.contractor_base(legs)?;
            Ok(Verdict::ops(&c.compose(&c), &c))
        });
        rec.check(
            &format!("absorb-c{legs}"),
            "c^(2n) c^(2i)↑(n−i) = c^(2i)↑(n−i) c^(2n) = c^(2n)",
            || {
                let c = rep.contractor_base(legs)?;
                let mut vs = Vec::new();
                for i in 1..=cn {
                    let ci = rep.contractor(2 * i, cn - i, legs)?;
                    vs.push(Verdict::ops(&c.compose(&ci), &c).context(&format!("i={i}")));
                    vs.push(Verdict::ops(&ci.compose(&c), &c).context(&format!("i={i}")));
                }
                Ok(Verdict::all(vs))
            },
        );
        rec.check(
            &format!("mirror-c{legs}"),
            "c σi = c σ(2n−i), σi c = σ(2n−i) c",
            || {
                let c = rep.contractor_base(legs)?;
                let mut vs = Vec::new();
                for i in 1..cn {
                    let a = rep.generator(Letter::Sigma(i), legs)?;
                    let bb = rep.generator(Letter::Sigma(legs - i), legs)?;
                    vs.push(
                        Verdict::ops(&c.compose(&a), &c.compose(&bb))
                            .context(&format!("right i={i}")),
                    );
                    vs.push(
                        Verdict::ops(&a.compose(&c), &bb.compose(&c))
                            .context(&format!("left i={i}")),
                    );
                }
                Ok(Verdict::all(vs))
            },
        );
        rec.check(&format!("eigen-c{legs}"), "c σn = σn c = μ c", || {
            let c = rep.contractor_base(legs)?;
            let s = rep.generator(Letter::Sigma(cn), legs)?;
            let t = c.scale(&p.mu);
            Ok(Verdict::all([
                Verdict::ops(&c.compose(&s), &t),
                Verdict::ops(&s.compose(&c), &t),
            ]))
        });
        for m in cn + 1..=n_max {
            rec.check(
                &format!("orthogonal-c{legs}-a{m}-s{m}"),
                "c^(2n) a^(m) = c^(2n) s^(m) = 0, m > n",
                || {
                    let l = legs.max(m);
                    let c = rep.contractor(legs, 0, l)?;
                    let z = Op::zero(nv, l);
                    let mut vs = Vec::new();
                    for (name, x) in [
                        ("a", rep.antisymmetrizer(m, l)),
                        ("s", rep.symmetrizer(m, l)),
                    ] {
                        match x {
                            Ok(x) => {
                                vs.push(Verdict::ops(&c.compose(&x), &z).context(name));
                                vs.push(Verdict::ops(&x.compose(&c), &z).context(name));
                            }
                            Err(Error::Inadmissible(i)) => vs.push(Verdict::Skip(i.to_string())),
                            Err(e) => return Err(e),
                        }
                    }
                    Ok(Verdict::all(vs))
                },
            );
        }
    }
    rec.finish()
}

/// Checks ι, τ-conjugation and ς-symmetry on the idempotents up to order `n_max`.
pub fn verify_morphisms<S: Field>(rep: &Representation<S>, n_max: usize) -> Report {
    let b = rep.bmw;
    let p = rep.params().clone();
    let mut rec = Recorder::new("morphisms", params_json(b, "nMax", n_max));
    rec.check(
        "iota-kappa",
        "κ and η are unchanged under (q, μ) → (−q⁻¹, μ)",
        || {
            let ip = p.iota()?;
            let k2 = crate::rmatrix::kappa(&b.r, &ip)?;
            Ok(Verdict::all([
                Verdict::ops(&k2, &b.k),
                Verdict::scalars(&ip.eta, &p.eta),
            ]))
        },
    );
    for n in 1..=n_max {
        rec.check(&format!("iota-a{n}"), "ι(a^(n)) = s^(n)", || {
            Ok(Verdict::ops(
                &*rep.idempotent(IdemKind::IotaAnti, n)?,
                &*rep.idempotent(IdemKind::Sym, n)?,
            ))
        });
        rec.check(&format!("iota-s{n}"), "ι(s^(n)) = a^(n)", || {
            Ok(Verdict::ops(
                &*rep.idempotent(IdemKind::IotaSym, n)?,
                &*rep.idempotent(IdemKind::Anti, n)?,
            ))
        });
        rec.check(
            &format!("tau-conjugation-{n}"),
            "τ σi τ⁻¹ = σ(n−i)",
            || {
                let t = rep.represent_word(&tau(n), n)?;
                let ti = t.inverse()?;
                let mut vs = Vec::new();
                for i in 1..n {
                    let lhs = t
                        .compose(&*rep.generator(Letter::Sigma(i), n)?)
                        .compose(&ti);
                    vs.push(
                        Verdict::ops(&lhs, &*rep.generator(Letter::Sigma(n - i), n)?)
                            .context(&format!("i={i}")),
                    );
                }
                Ok(Verdict::all(vs))
            },
        );
        for (kind, name) in [(IdemKind::Anti, "a"), (IdemKind::Sym, "s")] {
            rec.check(
                &format!("tau-invariant-{name}{n}"),
                "τ X^(n) τ⁻¹ = X^(n)",
                || {
                    let x = rep.idempotent(kind, n)?;
                    let t = rep.represent_word(&tau(n), n)?;
                    Ok(Verdict::ops(&t.compose(&x).compose(&t.inverse()?), &x))
                },
            );
            rec.check(&format!("varsigma-{name}{n}"), "ς(X^(n)) = X^(n)", || {
                let e = idempotent_element(kind, &p, n)?;
                let x = rep.idempotent(kind, n)?;
                Ok(Verdict::all([
                    Verdict::ops(&rep.represent(&e, n)?, &x).context("expansion"),
                    Verdict::ops(&rep.represent(&e.reverse(), n)?, &x).context("reversed"),
                ]))
            });
        }
    }
    for two_i in [2usize, 4] {
        rec.check(&format!("varsigma-c{two_i}"), "ς(c^(2i)) = c^(2i)", || {
            let e = contractor_element(&p, two_i)?;
            let c = rep.contractor_base(two_i)?;
            Ok(Verdict::all([
                Verdict::ops(&rep.represent(&e, two_i)?, &c).context("expansion"),
                Verdict::ops(&rep.represent(&e.reverse(), two_i)?, &c).context("reversed"),
            ]))
        });
    }
    rec.finish()
}

/// Splits a rank-one operator as `c = u wᵀ`.
fn rank_one_factors<S: Field>(c: &Op<S>) -> Option<(Vec<S>, Vec<S>)> {
    let (r0, c0, _) = c.entries().next()?;
    let size = c.size();
    let mut u = vec![S::zero(); size];
    for (r, col, v) in c.entries() {
        if col == c0 {
            u[r] = v.clone();
        }
    }
    let inv = u[r0].try_inv().ok()?;
    let w: Vec<S> = (0..size).map(|k| c.get(r0, k).mul_ref(&inv)).collect();
    for (r, col, v) in c.entries() {
        if u[r].mul_ref(&w[col]) != *v {
            return None;
        }
    }
    let nnz_outer =
        u.iter().filter(|x| !x.is_zero()).count() * w.iter().filter(|x| !x.is_zero()).count();
    (nnz_outer == c.nnz()).then_some((u, w))
}

/// Sampled primitivity: `c ρ(w) c ∈ span{c}` for every word of length ≤ `max_len` in
/// `σ_i, κ_i`, `i ≤ 2n`, on `V^{⊗(2n+1)}`. Returns the number of words checked, or the
/// first offending word.
///
/// With `c^(2n) = u wᵀ` on the first `2n` legs, `c ρ(x) c = λ c` exactly when the
/// `N × N` block `(wᵀ ⊗ e_a) ρ(x) (u ⊗ e_b)` equals `λ δ_ab`.
pub fn primitivity<S: Field>(
    rep: &Representation<S>,
    n: usize,
    max_len: usize,
) -> Result<std::result::Result<usize, String>> {
    let legs = 2 * n + 1;
    let nv = rep.dim_v();
    let c = rep.contractor_base(2 * n)?;
    let (u, w) = rank_one_factors(&c)
        .ok_or_else(|| Error::ConstructionFailed(format!("c^({}) is not of rank one", 2 * n)))?;
    let letters: Vec<Letter> = (1..=2 * n)
        .flat_map(|i| [Letter::Sigma(i), Letter::Kappa(i)])
        .collect();
    let gens: Vec<Arc<Op<S>>> = letters
        .iter()
        .map(|&l| rep.generator(l, legs))
        .collect::<Result<_>>()?;
    let start: Vec<Vec<S>> = (0..nv)
        .map(|b| {
            let mut v = vec![S::zero(); u.len() * nv];
            for (k, x) in u.iter().enumerate() {
                v[k * nv + b] = x.clone();
            }
            v
        })
        .collect();
    let block = |vs: &[Vec<S>]| -> bool {
        let mut diag: Option<S> = None;
        for (b, v) in vs.iter().enumerate() {
            for a in 0..nv {
                let mut m = S::zero();
                for (k, x) in w.iter().enumerate() {
                    if !x.is_zero() {
                        m.add_mul(x, &v[k * nv + a]);
                    }
                }
                if a != b {
                    if !m.is_zero() {
                        return false;
                    }
                } else if let Some(d) = &diag {
                    if *d != m {
                        return false;
                    }
                } else {
                    diag = Some(m);
                }
            }
        }
        true
    };
    // words are grown on the left, acting on the vectors u ⊗ e_b
    fn dfs<S: Field>(
        gens: &[Arc<Op<S>>],
        letters: &[Letter],
        vs: &[Vec<S>],
        word: &mut Vec<Letter>,
        depth_left: usize,
        block: &(dyn Fn(&[Vec<S>]) -> bool + Sync),
    ) -> std::result::Result<usize, String> {
        if !block(vs) {
            return Err(format!(
                "c ρ({}) c is not proportional to c",
                BmwWord(word.clone())
            ));
        }
        let mut count = 1;
        if depth_left == 0 {
            return Ok(count);
        }
        for (g, &l) in gens.iter().zip(letters) {
            let next: Vec<Vec<S>> = vs.iter().map(|v| g.apply(v)).collect();
            word.insert(0, l);
            count += dfs(gens, letters, &next, word, depth_left - 1, block)?;
            word.remove(0);
        }
        Ok(count)
    }
    if !block(&start) {
        return Ok(Err("c c is not proportional to c".into()));
    }
    if max_len == 0 {
        return Ok(Ok(1));
    }
    let branches: Vec<std::result::Result<usize, String>> = gens
        .par_iter()
        .zip(letters.par_iter())
        .map(|(g, &l)| {
            let next: Vec<Vec<S>> = start.iter().map(|v| g.apply(v)).collect();
            dfs(&gens, &letters, &next, &mut vec![l], max_len - 1, &block)
        })
        .collect();
    let mut total = 1;
    for b in branches {
        match b {
            Ok(k) => total += k,
            Err(w) => return Ok(Err(w)),
        }
    }
    Ok(Ok(total))
}

/// Checks the further properties of the higher contractors up to `c^(2 j_max)`.
pub fn verify_appendices<S: Field>(rep: &Representation<S>, j_max: usize) -> Report {
    verify_appendices_with(rep, j_max, 4)
}

/// As [`verify_appendices`], with the word length bound of the primitivity sampling.
pub fn verify_appendices_with<S: Field>(
    rep: &Representation<S>,
    j_max: usize,
    word_len: usize,
) -> Report {
    let b = rep.bmw;
    let p = rep.params().clone();
    let mut rec = Recorder::new("appendix", params_json(b, "jMax", j_max));
    let mu = p.mu.clone();
    let muinv = p.muinv();
    let eta = p.eta.clone();
    let etainv = || p.etainv();
    let w = |word: BmwWord, n: usize| rep.represent_word(&word, n);
    let sig = |i: usize, n: usize| rep.generator(Letter::Sigma(i), n);

    for j in 1..=j_max {
        let m = 2 * j + 1;
        let c = || rep.contractor(2 * j, 0, m);
        let cup = || rep.contractor(2 * j, 1, m);
        rec.check(
            &format!("c-sigma-c-{j}"),
            "c^(2j) σ(2j) c^(2j) = η⁻¹μ⁻¹ c^(2j)",
            || {
                let c = c()?;
                let lhs = c.compose(&*sig(2 * j, m)?).compose(&c);
                Ok(Verdict::ops(
                    &lhs,
                    &scaled(&c, &(etainv()? * muinv.clone())),
                ))
            },
        );
        rec.check(
            &format!("c-kappa-c-{j}"),
            "c^(2j) κ(2j) c^(2j) = η⁻¹ c^(2j)",
            || {
                let c = c()?;
                let lhs = c
                    .compose(&*rep.generator(Letter::Kappa(2 * j), m)?)
                    .compose(&c);
                Ok(Verdict::ops(&lhs, &scaled(&c, &etainv()?)))
            },
        );
        rec.check(
            &format!("kappa-c-kappa-{j}"),
            "κ(2j) c^(2j) κ(2j) = η⁻¹ κ(2j) c^(2j−2)↑1",
            || {
                let c = c()?;
                let k = rep.generator(Letter::Kappa(2 * j), m)?;
                let lhs = k.compose(&c).compose(&k);
                let rhs = k
                    .compose(&rep.contractor(2 * j - 2, 1, m)?)
                    .scale(&etainv()?);
                Ok(Verdict::ops(&lhs, &rhs))
            },
        );
        rec.check(
            &format!("sigma-run-up-{j}"),
            "c^(2j) σ(j+k) ⋯ σ(2j) c^(2j) = (η⁻¹μ⁻¹)^(j+1−k) c^(2j), 0 < k ≤ j",
            || {
                let c = c()?;
                let mut vs = Vec::new();
                for k in 1..=j {
                    let lhs = c
                        .compose(&w(BmwWord::sigma_run(j + k, 2 * j), m)?)
                        .compose(&c);
                    let f = (etainv()? * muinv.clone()).pow((j + 1 - k) as i64)?;
                    vs.push(Verdict::ops(&lhs, &c.scale(&f)).context(&format!("k={k}")));
                }
                Ok(Verdict::all(vs))
            },
        );
        rec.check(
            &format!("sigma-run-down-{j}"),
            "c^(2j) σ(j−k) ⋯ σ(2j) c^(2j) = η^(−j) μ^(1+k−j) c^(2j), 0 ≤ k < j",
            || {
                let c = c()?;
                let mut vs = Vec::new();
                for k in 0..j {
                    let lhs = c
                        .compose(&w(BmwWord::sigma_run(j - k, 2 * j), m)?)
                        .compose(&c);
                    let f = eta.pow(-(j as i64))? * mu.pow(1 + k as i64 - j as i64)?;
                    vs.push(Verdict::ops(&lhs, &c.scale(&f)).context(&format!("k={k}")));
                }
                Ok(Verdict::all(vs))
            },
        );
        let ej = eta.pow(-(j as i64)).expect("η is invertible");
        rec.check(
            &format!("c-cup-{j}"),
            "c c↑1 = η^(−j) c σ(2j)⁻¹ ⋯ σ1⁻¹ = η^(−j) c σ(2j) ⋯ σ1",
            || {
                let (c, cu) = (c()?, cup()?);
                let lhs = c.compose(&cu);
                Ok(Verdict::all([
                    Verdict::ops(
                        &lhs,
                        &c.compose(&w(BmwWord::sigma_inv_run(2 * j, 1), m)?)
                            .scale(&ej),
                    )
                    .context("inverse run"),
                    Verdict::ops(
                        &lhs,
                        &c.compose(&w(BmwWord::sigma_run(2 * j, 1), m)?).scale(&ej),
                    )
                    .context("direct run"),
                ]))
            },
        );
        rec.check(
            &format!("cup-c-{j}"),
            "c↑1 c = η^(−j) c↑1 σ1 ⋯ σ(2j) = η^(−j) c↑1 σ1⁻¹ ⋯ σ(2j)⁻¹",
            || {
                let (c, cu) = (c()?, cup()?);
                let lhs = cu.compose(&c);
                Ok(Verdict::all([
                    Verdict::ops(
                        &lhs,
                        &cu.compose(&w(BmwWord::sigma_run(1, 2 * j), m)?).scale(&ej),
                    )
                    .context("direct run"),
                    Verdict::ops(
                        &lhs,
                        &cu.compose(&w(BmwWord::sigma_inv_run(1, 2 * j), m)?)
                            .scale(&ej),
                    )
                    .context("inverse run"),
                ]))
            },
        );
        rec.check(
            &format!("sigma-prime-{j}"),
            "σ'j ⋯ σ'1 c↑1 σ'1 ⋯ σ'j = σ'(j+1) ⋯ σ'(2j) c σ'(2j) ⋯ σ'(j+1), σ' = σ − (q−q⁻¹)",
            || {
                let sp = |i: usize| -> Result<Op<S>> { Ok(sig(i, m)?.add_scalar(&-p.qdiff())) };
                let run = |ids: Vec<usize>| -> Result<Op<S>> {
                    let mut acc = Op::identity(rep.dim_v(), m);
                    for i in ids {
                        acc = acc.compose(&sp(i)?);
                    }
                    Ok(acc)
                };
                let lhs = run((1..=j).rev().collect())?
                    .compose(&cup()?)
                    .compose(&run((1..=j).collect())?);
                let rhs = run((j + 1..=2 * j).collect())?
                    .compose(&c()?)
                    .compose(&run((j + 1..=2 * j).rev().collect())?);
                Ok(Verdict::ops(&lhs, &rhs))
            },
        );
        rec.check(
            &format!("cup-c-cup-{j}"),
            "c↑1 c c↑1 = η^(−2j) c↑1",
            || {
                let (c, cu) = (c()?, cup()?);
                Ok(Verdict::ops(
                    &cu.compose(&c).compose(&cu),
                    &cu.scale(&ej.pow(2)?),
                ))
            },
        );
        rec.check(
            &format!("c-tau-{j}"),
            "c^(2j) τ^(2k)↑(j−k) = μ^k c^(2j), k ≤ j",
            || {
                let c = rep.contractor(2 * j, 0, 2 * j)?;
                let mut vs = Vec::new();
                for k in 1..=j {
                    let t = w(tau(2 * k).shift_up(j - k), 2 * j)?;
                    vs.push(
                        Verdict::ops(&c.compose(&t), &c.scale(&mu.pow(k as i64)?))
                            .context(&format!("k={k}")),
                    );
                }
                Ok(Verdict::all(vs))
            },
        );
    }
    for j in 1..j_max {
        let m = 2 * j + 2;
        let big = || rep.contractor(2 * j + 2, 0, m);
        let small = || rep.contractor(2 * j, 0, m);
        let ej = eta.pow(j as i64).expect("η is invertible");
        rec.check(
            &format!("c-sigma-run-{j}"),
            "c^(2j+2) σ1 ⋯ σ(2j) = η^j c^(2j+2) c^(2j)",
            || {
                let cb = big()?;
                Ok(Verdict::ops(
                    &cb.compose(&w(BmwWord::sigma_run(1, 2 * j), m)?),
                    &cb.compose(&small()?).scale(&ej),
                ))
            },
        );
        rec.check(
            &format!("c-c-sigma-{j}"),
            "c^(2j+2) c^(2j) σ(2j+1) = μ c^(2j+2) c^(2j)",
            || {
                let cc = big()?.compose(&small()?);
                Ok(Verdict::ops(
                    &cc.compose(&*sig(2 * j + 1, m)?),
                    &cc.scale(&mu),
                ))
            },
        );
        rec.check(
            &format!("c-tau-odd-{j}"),
            "c^(2j+2) τ^(2j+1) = η^j c^(2j+2) c^(2j) τ^(2j) = (ημ)^j c^(2j+2) c^(2j)",
            || {
                let (cb, cs) = (big()?, small()?);
                let lhs = cb.compose(&w(tau(2 * j + 1), m)?);
                let mid = cb.compose(&cs).compose(&w(tau(2 * j), m)?).scale(&ej);
                let rhs = cb
                    .compose(&cs)
                    .scale(&(eta.clone() * mu.clone()).pow(j as i64)?);
                Ok(Verdict::all([
                    Verdict::ops(&lhs, &mid).context("first"),
                    Verdict::ops(&lhs, &rhs).context("second"),
                ]))
            },
        );
    }
    for n in 1..=j_max {
        rec.check(
            &format!("primitivity-c{}", 2 * n),
            "c^(2n) ρ(w) c^(2n) ∈ span{c^(2n)} for short words w on 2n+1 strands (ρ_R image only)",
            || {
                Ok(match primitivity(rep, n, word_len)? {
                    Ok(_) => Verdict::Pass,
                    Err(w) => Verdict::Fail(w),
                })
            },
        );
    }
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::{make_standard_r, Family};
    use crate::scalars::Rational;

    #[test]
    fn words() {
        assert_eq!(
            tau(3),
            BmwWord(vec![Letter::Sigma(1), Letter::Sigma(2), Letter::Sigma(1)])
        );
        let w = BmwWord(vec![Letter::Kappa(1), Letter::Sigma(2)]);
        assert_eq!(w.reverse().0, vec![Letter::Sigma(2), Letter::Kappa(1)]);
        assert_eq!(w.shift_up(2).max_index(), 4);
    }

    #[test]
    fn baxterized_unit_and_pole() {
        let q = Rational::new(7, 5).unwrap();
        let p = AlgebraParams::new(q.clone(), q.pow(-2).unwrap(), 3).unwrap();
        assert_eq!(
            baxterized(1, 1, &Rational::one(), &p).unwrap(),
            BmwElement::unit()
        );
        let pole = -(-(p.qinv() * p.muinv())).inv().unwrap();
        assert!(matches!(
            baxterized(1, 1, &pole, &p),
            Err(Error::SpectralPole(_))
        ));
    }

    #[test]
    fn so3_low_orders() {
        let q = Rational::new(7, 5).unwrap();
        let b = make_standard_r(Family::Orthogonal, 3, &q).unwrap();
        let rep = Representation::new(&b);
        assert_eq!(
            *rep.idempotent(IdemKind::Anti, 1).unwrap(),
            Op::identity(3, 1)
        );
        let c4 = rep.contractor_base(4).unwrap();
        assert_eq!(c4.compose(&c4), *c4);
    }
}
