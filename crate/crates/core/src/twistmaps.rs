//! Compatible pairs `{R, F}`, twisted R-matrices, the operator `G` and the linear maps φ, ξ, θ.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Recorder, Report, Verdict};
use crate::rmatrix::{cd_matrices, yang_baxter, BmwRMatrix, SkewData};
use crate::scalars::Field;
use crate::tensorops::TensorOperator;

type Op<S> = TensorOperator<S>;

/// Product of operators, each placed on the listed legs of `V^{⊗n}`.
pub fn placed<S: Field>(n: usize, parts: &[(&Op<S>, &[usize])]) -> Result<Op<S>> {
    let mut acc: Option<Op<S>> = None;
    for (x, legs) in parts {
        let e = x.embed(legs, n)?;
        acc = Some(match acc {
            None => e,
            Some(a) => a.compose(&e),
        });
    }
    acc.ok_or_else(|| Error::Shape("empty product".into()))
}

/// `X₂₁ = P X₁₂ P`.
pub fn flip<S: Field>(x: &Op<S>) -> Op<S> {
    let p = Op::swap(x.dim_v());
    p.compose(x).compose(&p)
}

fn compatible<S: Field>(r: &Op<S>, f: &Op<S>) -> Result<Verdict> {
    let r1 = r.embed_at(1, 3)?;
    let r2 = r.embed_at(2, 3)?;
    let f1 = f.embed_at(1, 3)?;
    let f2 = f.embed_at(2, 3)?;
    Ok(Verdict::all([
        Verdict::ops(&r1.compose(&f2).compose(&f1), &f2.compose(&f1).compose(&r2))
            .context("R1 F2 F1 = F2 F1 R2"),
        Verdict::ops(&r2.compose(&f1).compose(&f2), &f1.compose(&f2).compose(&r1))
            .context("R2 F1 F2 = F1 F2 R1"),
    ]))
}

/// A linear map on `N × N` matrices, stored as the coefficient operator `L` on `V⊗2` with
/// `T(M)_a^b = Σ L[(a,b),(c,d)] M_c^d`. Composition of maps is composition of coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixLinearMap<S> {
    coeff: Op<S>,
}

impl<S: Field> MatrixLinearMap<S> {
    pub fn from_coeff(coeff: Op<S>) -> Result<Self> {
        if coeff.legs() != 2 {
            return Err(Error::Shape("coefficient tensor has two legs".into()));
        }
        Ok(MatrixLinearMap { coeff })
    }

    /// Tabulates `f` on the `N²` matrix units.
    pub fn from_fn(n: usize, f: impl Fn(&Op<S>) -> Result<Op<S>>) -> Result<Self> {
        let mut entries = Vec::new();
        for c in 0..n {
            for d in 0..n {
                let image = f(&Op::matrix_unit(n, c, d))?;
                if image.legs() != 1 {
                    return Err(Error::Shape(
                        "a matrix map returns one-leg operators".into(),
                    ));
                }
                for (a, b, v) in image.entries() {
                    entries.push((a * n + b, c * n + d, v.clone()));
                }
            }
        }
        Ok(MatrixLinearMap {
            coeff: Op::from_entries(n, 2, entries),
        })
    }

    pub fn identity(n: usize) -> Self {
        MatrixLinearMap {
            coeff: Op::identity(n, 2),
        }
    }

    /// `M ↦ A M B`.
    pub fn sandwich(a: &Op<S>, b: &Op<S>) -> Result<Self> {
        Self::from_fn(a.dim_v(), |m| Ok(a.compose(m).compose(b)))
    }

    pub fn dim(&self) -> usize {
        self.coeff.dim_v()
    }

    pub fn coeff(&self) -> &Op<S> {
        &self.coeff
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &Self) -> Self {
        MatrixLinearMap {
            coeff: self.coeff.compose(&other.coeff),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        MatrixLinearMap {
            coeff: self.coeff.scale(s),
        }
    }

    pub fn apply(&self, m: &Op<S>) -> Op<S> {
        let n = self.dim();
        let mut v = vec![S::zero(); n * n];
        for (a, b, x) in m.entries() {
            v[a * n + b] = x.clone();
        }
        let out = self.coeff.apply(&v);
        Op::from_entries(
            n,
            1,
            out.into_iter().enumerate().map(|(k, x)| (k / n, k % n, x)),
        )
    }

    /// Nonzero coefficients of the output entry `(a, b)` as `((c, d), L)`.
    pub fn terms(&self, a: usize, b: usize) -> impl Iterator<Item = ((usize, usize), &S)> + '_ {
        let n = self.dim();
        self.coeff
            .row(a * n + b)
            .iter()
            .map(move |(k, v)| ((*k as usize / n, *k as usize % n), v))
    }

    /// `Σ_ab W_b^a T(M)_a^b` as a linear form in `M`, returned as the matrix `Λ` with
    /// `Σ_ab W_b^a T(M)_a^b = tr(Λ M)`.
    pub fn weighted_trace_form(&self, w: &Op<S>) -> Op<S> {
        let n = self.dim();
        let mut entries = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let wba = w.get(b, a);
                if wba.is_zero() {
                    continue;
                }
                for ((c, d), l) in self.terms(a, b) {
                    entries.push((d, c, wba.mul_ref(l)));
                }
            }
        }
        Op::from_entries(n, 1, entries)
    }
}

/// Skew data of an operator and of its inverse.
#[derive(Clone, Debug)]
pub struct SkewPair<S> {
    pub x: Op<S>,
    pub xinv: Op<S>,
    pub skew: SkewData<S>,
    pub inv_skew: SkewData<S>,
}

impl<S: Field> SkewPair<S> {
    pub fn new(x: Op<S>) -> Result<Self> {
        let xinv = x.inverse()?;
        let skew = cd_matrices(&x)?;
        let inv_skew = cd_matrices(&xinv)?;
        Ok(SkewPair {
            x,
            xinv,
            skew,
            inv_skew,
        })
    }

    pub fn c(&self) -> &Op<S> {
        &self.skew.c
    }

    pub fn d(&self) -> &Op<S> {
        &self.skew.d
    }

    pub fn cinv(&self) -> Result<&Op<S>> {
        self.skew
            .cd_inv
            .as_ref()
            .map(|p| &p.0)
            .ok_or(Error::FNotStrict)
    }

    pub fn dinv(&self) -> Result<&Op<S>> {
        self.skew
            .cd_inv
            .as_ref()
            .map(|p| &p.1)
            .ok_or(Error::FNotStrict)
    }
}

/// A compatible pair `{R, F}` with the twisted R-matrix `R_f = F⁻¹RF`.
#[derive(Clone, Debug)]
pub struct CompatiblePair<'a, S> {
    pub r: &'a BmwRMatrix<S>,
    pub f: SkewPair<S>,
    pub rf: BmwRMatrix<S>,
    pub f_label: String,
}

/// Validates `{R, F}` and builds the caches.
pub fn make_pair<'a, S: Field>(
    r: &'a BmwRMatrix<S>,
    f: Op<S>,
    f_label: &str,
) -> Result<CompatiblePair<'a, S>> {
    if f.legs() != 2 || f.dim_v() != r.dim_v() {
        return Err(Error::Shape(format!(
            "F acts on {} legs of dimension {}, R on V⊗2 with N = {}",
            f.legs(),
            f.dim_v(),
            r.dim_v()
        )));
    }
    if let Verdict::Fail(w) = compatible(&r.r, &f)? {
        return Err(Error::NotCompatible(w));
    }
    if let Verdict::Fail(w) = yang_baxter(&f)? {
        return Err(Error::NotCompatible(format!("F is not an R-matrix: {w}")));
    }
    let fp = match SkewPair::new(f) {
        Ok(p) => p,
        Err(Error::NotSkewInvertible) => return Err(Error::FNotStrict),
        Err(e) => return Err(e),
    };
    if !fp.skew.strict() || !fp.inv_skew.strict() {
        return Err(Error::FNotStrict);
    }
    let rf_op = fp.xinv.compose(&r.r).compose(&fp.x);
    let rf = BmwRMatrix::derive(r.family, rf_op, r.q())?;
    Ok(CompatiblePair {
        r,
        f: fp,
        rf,
        f_label: f_label.to_string(),
    })
}

impl<S: Field> CompatiblePair<'_, S> {
    pub fn dim_v(&self) -> usize {
        self.r.dim_v()
    }

    pub fn params_json(&self) -> serde_json::Value {
        let mut p = self.r.params_json();
        p["F"] = json!(self.f_label);
        p
    }

    /// `R_f = F⁻¹RF`, after asserting the twist identities.
    pub fn twist(&self) -> Result<BmwRMatrix<S>> {
        let mut rec = Recorder::new("twist", self.params_json());
        twist_checks(&mut rec, self);
        let report = rec.finish();
        if let Some(f) = report.failures().next() {
            return Err(Error::NotCompatible(format!(
                "{}: {}",
                f.check,
                f.witness.clone().unwrap_or_default()
            )));
        }
        Ok(self.rf.clone())
    }

    /// `G₁ = Tr₂₃ K₂ F₁⁻¹ F₂⁻¹` and `G₁⁻¹ = Tr₂₃ F₂ F₁ K₂`.
    pub fn operator_g(&self) -> Result<(Op<S>, Op<S>)> {
        let (k, f, finv) = (&self.r.k, &self.f.x, &self.f.xinv);
        let g =
            placed(3, &[(k, &[2, 3]), (finv, &[1, 2]), (finv, &[2, 3])])?.partial_trace(&[2, 3])?;
        let ginv =
            placed(3, &[(f, &[2, 3]), (f, &[1, 2]), (k, &[2, 3])])?.partial_trace(&[2, 3])?;
        Ok((g, ginv))
    }

    /// `φ(M)₁ = Tr_R(2) F₁₂ M₁ F₁₂⁻¹ R₁₂`.
    pub fn phi(&self) -> Result<MatrixLinearMap<S>> {
        self.map_with(&self.r.r)
    }

    /// `ξ(M)₁ = Tr_R(2) F₁₂ M₁ F₁₂⁻¹ K₁₂`.
    pub fn xi(&self) -> Result<MatrixLinearMap<S>> {
        self.map_with(&self.r.k)
    }

    fn map_with(&self, x: &Op<S>) -> Result<MatrixLinearMap<S>> {
        let (f, finv) = (&self.f.x, &self.f.xinv);
        MatrixLinearMap::from_fn(self.dim_v(), |m| {
            let body = f.compose(&m.shifted(0, 2)?).compose(finv).compose(x);
            self.r.rtrace(&body, &[2])
        })
    }

    /// `φ⁻¹(M)₁ = μ⁻² Tr_{R_f}(2) F₁₂⁻¹ M₁ R₁₂⁻¹ F₁₂`.
    pub fn phi_inv(&self) -> Result<MatrixLinearMap<S>> {
        self.inv_map_with(&self.r.rinv, &self.rf.d.scale(&self.r.params.mupow(-2)))
    }

    /// The inverse of φ with `D_{R_f⁻¹}` in place of `μ⁻² D_{R_f}`; valid for any strict skew
    /// invertible `R`.
    pub fn phi_inv_strict(&self) -> Result<MatrixLinearMap<S>> {
        let d = cd_matrices(&self.rf.rinv)?.d;
        self.inv_map_with(&self.r.rinv, &d)
    }

    /// `ξ⁻¹(M)₁ = μ⁻² Tr_{R_f}(2) F₁₂⁻¹ M₁ K₁₂ F₁₂`.
    pub fn xi_inv(&self) -> Result<MatrixLinearMap<S>> {
        self.inv_map_with(&self.r.k, &self.rf.d.scale(&self.r.params.mupow(-2)))
    }

    fn inv_map_with(&self, x: &Op<S>, weight: &Op<S>) -> Result<MatrixLinearMap<S>> {
        let (f, finv) = (&self.f.x, &self.f.xinv);
        MatrixLinearMap::from_fn(self.dim_v(), |m| {
            let body = finv.compose(&m.shifted(0, 2)?).compose(x).compose(f);
            body.weighted_trace(&[2], weight)
        })
    }

    /// `θ(M) = μ⁻² Tr_R(2) K₁ M_2̄` with `M_2̄ = F₁ M₁ F₁⁻¹`.
    pub fn theta(&self) -> Result<MatrixLinearMap<S>> {
        let (f, finv, k) = (&self.f.x, &self.f.xinv, &self.r.k);
        let s = self.r.params.mupow(-2);
        MatrixLinearMap::from_fn(self.dim_v(), |m| {
            let m2 = f.compose(&m.shifted(0, 2)?).compose(finv);
            Ok(self.r.rtrace(&k.compose(&m2), &[2])?.scale(&s))
        })
    }

    /// `θ⁻¹(M) = Tr_{R_f}(2) F₁⁻¹ K₁ M₁ F₁`.
    pub fn theta_inv(&self) -> Result<MatrixLinearMap<S>> {
        let (f, finv, k) = (&self.f.x, &self.f.xinv, &self.r.k);
        MatrixLinearMap::from_fn(self.dim_v(), |m| {
            let body = finv.compose(k).compose(&m.shifted(0, 2)?).compose(f);
            self.rf.rtrace(&body, &[2])
        })
    }
}

/// The operators `X` with `{X, F}` compatible that the calculus is exercised on.
fn partners<S: Field>(pair: &CompatiblePair<S>) -> Result<Vec<(&'static str, SkewPair<S>)>> {
    Ok(vec![
        ("R", SkewPair::new(pair.r.r.clone())?),
        ("F", pair.f.clone()),
        ("Rf", SkewPair::new(pair.rf.r.clone())?),
    ])
}

fn twist_checks<S: Field>(rec: &mut Recorder, pair: &CompatiblePair<S>) {
    let r = pair.r;
    let rf = &pair.rf;
    let f = &pair.f;
    rec.check(
        "rf-yang-baxter",
        "R_f = F⁻¹RF satisfies the Yang–Baxter equation",
        || yang_baxter(&rf.r),
    );
    rec.check("rf-compatible", "{R_f, F} is a compatible pair", || {
        compatible(&rf.r, &f.x)
    });
    rec.check("rf-strict", "R_f is strict skew invertible", || {
        let s = cd_matrices(&rf.r)?;
        Ok(Verdict::from_bool(s.strict(), || {
            "C or D of R_f is singular".into()
        }))
    });
    rec.check(
        "cd-twist",
        "C_{R_f} = C_{F⁻¹} D_R C_F, D_{R_f} = D_{F⁻¹} C_R D_F",
        || {
            let c = f.inv_skew.c.compose(&r.d).compose(f.c());
            let d = f.inv_skew.d.compose(&r.c).compose(f.d());
            Ok(Verdict::all([
                Verdict::ops(&rf.c, &c).context("C"),
                Verdict::ops(&rf.d, &d).context("D"),
            ]))
        },
    );
    rec.check(
        "double-twist",
        "D_F1 D_F2 (R_f)_f = R D_F1 D_F2, C_F1 C_F2 (R_f)_f = R C_F1 C_F2",
        || {
            let rff = f.xinv.compose(&rf.r).compose(&f.x);
            let dd = f.d().kron(f.d());
            let cc = f.c().kron(f.c());
            Ok(Verdict::all([
                Verdict::ops(&dd.compose(&rff), &r.r.compose(&dd)).context("D"),
                Verdict::ops(&cc.compose(&rff), &r.r.compose(&cc)).context("C"),
            ]))
        },
    );
    rec.check(
        "commutant",
        "[R, (C_F⁻¹ D_F)₁ (C_F⁻¹ D_F)₂] = 0",
        || {
            let x = f.cinv()?.compose(f.d());
            let xx = x.kron(&x);
            Ok(Verdict::ops(&r.r.compose(&xx), &xx.compose(&r.r)))
        },
    );
}

/// Checks the skew-inverse calculus of a compatible pair and its twist.
pub fn verify_twist_calculus<S: Field>(pair: &CompatiblePair<S>, seed: u64) -> Report {
    let mut params = pair.params_json();
    params["seed"] = json!(seed);
    let mut rec = Recorder::new("twist", params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = pair.dim_v();
    let r = pair.r;
    let rf = &pair.rf;
    let f = &pair.f;
    let p = Op::swap(n);
    let id1 = Op::<S>::identity(n, 1);

    twist_checks(&mut rec, pair);
    rec.check(
        "rf-alternative",
        "R_f = Tr₃₄ F₃₂⁻¹ C_{F⁻¹}₃ R₃₄ D_F₄ F₁₄",
        || {
            let body = placed(
                4,
                &[
                    (&f.xinv, &[3, 2]),
                    (&f.inv_skew.c, &[3]),
                    (&r.r, &[3, 4]),
                    (f.d(), &[4]),
                    (&f.x, &[1, 4]),
                ],
            )?;
            Ok(Verdict::ops(&body.partial_trace(&[3, 4])?, &rf.r))
        },
    );
    rec.check(
        "psi-rf",
        "Ψ_{R_f} = C_{F⁻¹}₂ Tr₃₄(F₂₃⁻¹ Ψ_R₃₄ F₄₁) D_F₁",
        || {
            let inner = placed(4, &[(&f.xinv, &[2, 3]), (&r.psi, &[3, 4]), (&f.x, &[4, 1])])?
                .partial_trace(&[3, 4])?;
            let psi = placed(
                2,
                &[(&f.inv_skew.c, &[2]), (&inner, &[1, 2]), (f.d(), &[1])],
            )?;
            Ok(Verdict::ops(&psi, &rf.psi))
        },
    );
    rec.check(
        "psi-rf-another",
        "Ψ_{R_f} = C_{F⁻¹}₂ F₂₁ D_{F⁻¹}₂ Ψ_R C_F₁ F₂₁⁻¹ D_F₁",
        || {
            let psi = placed(
                2,
                &[
                    (&f.inv_skew.c, &[2]),
                    (&f.x, &[2, 1]),
                    (&f.inv_skew.d, &[2]),
                    (&r.psi, &[1, 2]),
                    (f.c(), &[1]),
                    (&f.xinv, &[2, 1]),
                    (f.d(), &[1]),
                ],
            )?;
            Ok(Verdict::ops(&psi, &rf.psi))
        },
    );

    let xs = match partners(pair) {
        Ok(xs) => xs,
        Err(e) => {
            rec.check("partners", "skew data of R, F and R_f", || Err(e));
            return rec.finish();
        }
    };
    let samples: Vec<Op<S>> = (0..5).map(|_| Op::random(n, 1, &mut rng, 5)).collect();
    for (name, x) in &xs {
        rec.check(
            &format!("inv-tr-c-{name}"),
            "Tr₁(C_X₁ F^ε M₂ F^−ε) = I tr(C_X M), ε = ±1",
            || {
                let mut vs = Vec::new();
                for (t, m) in samples.iter().enumerate() {
                    let rhs = id1.scale(&x.c().compose(m).trace());
                    for (e, fe, fme) in [(1, &f.x, &f.xinv), (-1, &f.xinv, &f.x)] {
                        let lhs = placed(
                            2,
                            &[(x.c(), &[1]), (fe, &[1, 2]), (m, &[2]), (fme, &[1, 2])],
                        )?
                        .partial_trace(&[1])?;
                        vs.push(Verdict::ops(&lhs, &rhs).context(&format!("sample {t}, ε = {e}")));
                    }
                }
                Ok(Verdict::all(vs))
            },
        );
        rec.check(
            &format!("inv-tr-d-{name}"),
            "Tr₂(D_X₂ F^−ε M₁ F^ε) = I tr(D_X M), ε = ±1",
            || {
                let mut vs = Vec::new();
                for (t, m) in samples.iter().enumerate() {
                    let rhs = id1.scale(&x.d().compose(m).trace());
                    for (e, fe, fme) in [(1, &f.x, &f.xinv), (-1, &f.xinv, &f.x)] {
                        let lhs = placed(
                            2,
                            &[(x.d(), &[2]), (fme, &[1, 2]), (m, &[1]), (fe, &[1, 2])],
                        )?
                        .partial_trace(&[2])?;
                        vs.push(Verdict::ops(&lhs, &rhs).context(&format!("sample {t}, ε = {e}")));
                    }
                }
                Ok(Verdict::all(vs))
            },
        );
        rec.check(
            &format!("tr-cpf-{name}"),
            "Tr₁(C_X₁ F₁₂^ε P₂₃ F₁₂^−ε) = C_X₃, Tr₃(D_X₃ F₂₃^−ε P₁₂ F₂₃^ε) = D_X₁",
            || {
                let mut vs = Vec::new();
                for (e, fe, fme) in [(1, &f.x, &f.xinv), (-1, &f.xinv, &f.x)] {
                    let lhs = placed(
                        3,
                        &[(x.c(), &[1]), (fe, &[1, 2]), (&p, &[2, 3]), (fme, &[1, 2])],
                    )?
                    .partial_trace(&[1])?;
                    vs.push(Verdict::ops(&lhs, &id1.kron(x.c())).context(&format!("C, ε = {e}")));
                    let lhs = placed(
                        3,
                        &[(x.d(), &[3]), (fme, &[2, 3]), (&p, &[1, 2]), (fe, &[2, 3])],
                    )?
                    .partial_trace(&[3])?;
                    vs.push(Verdict::ops(&lhs, &x.d().kron(&id1)).context(&format!("D, ε = {e}")));
                }
                Ok(Verdict::all(vs))
            },
        );
        rec.check(
            &format!("psi-c-{name}"),
            "C_X₁ Ψ_F = F₂₁⁻¹ C_X₂, Ψ_F C_X₁ = C_X₂ F₂₁⁻¹",
            || {
                let f21 = flip(&f.xinv);
                let c1 = x.c().kron(&id1);
                let c2 = id1.kron(x.c());
                Ok(Verdict::all([
                    Verdict::ops(&c1.compose(&f.skew.psi), &f21.compose(&c2)).context("left"),
                    Verdict::ops(&f.skew.psi.compose(&c1), &c2.compose(&f21)).context("right"),
                ]))
            },
        );
        rec.check(
            &format!("psi-d-{name}"),
            "Ψ_F D_X₂ = D_X₁ F₂₁⁻¹, D_X₂ Ψ_F = F₂₁⁻¹ D_X₁",
            || {
                let f21 = flip(&f.xinv);
                let d1 = x.d().kron(&id1);
                let d2 = id1.kron(x.d());
                Ok(Verdict::all([
                    Verdict::ops(&f.skew.psi.compose(&d2), &d1.compose(&f21)).context("left"),
                    Verdict::ops(&d2.compose(&f.skew.psi), &f21.compose(&d1)).context("right"),
                ]))
            },
        );
        rec.check(
            &format!("cx-df-{name}"),
            "Tr₁(C_X₁ F⁻¹) = C_X D_F = D_F C_X",
            || {
                let lhs = placed(2, &[(x.c(), &[1]), (&f.xinv, &[1, 2])])?.partial_trace(&[1])?;
                Ok(Verdict::all([
                    Verdict::ops(&lhs, &x.c().compose(f.d())),
                    Verdict::ops(&lhs, &f.d().compose(x.c())),
                ]))
            },
        );
        rec.check(
            &format!("dx-cf-{name}"),
            "Tr₂(D_X₂ F⁻¹) = C_F D_X = D_X C_F",
            || {
                let lhs = placed(2, &[(x.d(), &[2]), (&f.xinv, &[1, 2])])?.partial_trace(&[2])?;
                Ok(Verdict::all([
                    Verdict::ops(&lhs, &f.c().compose(x.d())),
                    Verdict::ops(&lhs, &x.d().compose(f.c())),
                ]))
            },
        );
        rec.check(
            &format!("cd-inverse-{name}"),
            "C_{X⁻¹} = D_X⁻¹, D_{X⁻¹} = C_X⁻¹",
            || {
                Ok(Verdict::all([
                    Verdict::ops(&x.inv_skew.c, x.dinv()?).context("C"),
                    Verdict::ops(&x.inv_skew.d, x.cinv()?).context("D"),
                ]))
            },
        );
        rec.check(
            &format!("commute-cd-{name}"),
            "C_X C_F = C_F C_X, D_X D_F = D_F D_X",
            || {
                Ok(Verdict::all([
                    Verdict::ops(&x.c().compose(f.c()), &f.c().compose(x.c())).context("C"),
                    Verdict::ops(&x.d().compose(f.d()), &f.d().compose(x.d())).context("D"),
                ]))
            },
        );
        for (yname, y) in &xs {
            rec.check(
                &format!("f-cc-{name}-{yname}"),
                "F C_X₁ C_Y₂ = C_Y₁ C_X₂ F, F D_X₁ D_Y₂ = D_Y₁ D_X₂ F",
                || {
                    Ok(Verdict::all([
                        Verdict::ops(
                            &f.x.compose(&x.c().kron(y.c())),
                            &y.c().kron(x.c()).compose(&f.x),
                        )
                        .context("C"),
                        Verdict::ops(
                            &f.x.compose(&x.d().kron(y.d())),
                            &y.d().kron(x.d()).compose(&f.x),
                        )
                        .context("D"),
                    ]))
                },
            );
            rec.check(
                &format!("f-cd-{name}-{yname}"),
                "F (C_X D_Y)₂ = (C_X D_Y)₁ F, F (D_Y C_X)₁ = (D_Y C_X)₂ F",
                || {
                    let a = x.c().compose(y.d());
                    let b = y.d().compose(x.c());
                    Ok(Verdict::all([
                        Verdict::ops(&f.x.compose(&id1.kron(&a)), &a.kron(&id1).compose(&f.x))
                            .context("C_X D_Y"),
                        Verdict::ops(&f.x.compose(&b.kron(&id1)), &id1.kron(&b).compose(&f.x))
                            .context("D_Y C_X"),
                    ]))
                },
            );
        }
    }
    rec.finish()
}

/// Checks the operator `G` of a compatible pair.
pub fn verify_operator_g<S: Field>(pair: &CompatiblePair<S>) -> Report {
    let mut rec = Recorder::new("operator-g", pair.params_json());
    let n = pair.dim_v();
    let r = pair.r;
    let f = &pair.f;
    let gs = pair.operator_g();
    let g = |k: usize| -> Result<Op<S>> {
        let (g, gi) = gs.as_ref().map_err(Clone::clone)?;
        Ok(if k == 0 { g.clone() } else { gi.clone() })
    };
    let id1 = Op::<S>::identity(n, 1);
    rec.check("g-inverse", "G G⁻¹ = G⁻¹ G = I", || {
        let (a, b) = (g(0)?, g(1)?);
        Ok(Verdict::all([
            Verdict::ops(&a.compose(&b), &id1),
            Verdict::ops(&b.compose(&a), &id1),
        ]))
    });
    rec.check("r-gg", "R G₁ G₂ = G₁ G₂ R", || {
        let gg = g(0)?.kron(&g(0)?);
        Ok(Verdict::ops(&r.r.compose(&gg), &gg.compose(&r.r)))
    });
    rec.check("f-g", "F^ε G₁ = G₂ F^ε, ε = ±1", || {
        let g1 = g(0)?.kron(&id1);
        let g2 = id1.kron(&g(0)?);
        Ok(Verdict::all([
            Verdict::ops(&f.x.compose(&g1), &g2.compose(&f.x)).context("ε = 1"),
            Verdict::ops(&f.xinv.compose(&g1), &g2.compose(&f.xinv)).context("ε = −1"),
        ]))
    });
    rec.check("g-commutes-d", "[D_R, G] = 0", || {
        Ok(Verdict::ops(&r.d.commutator(&g(0)?), &Op::zero(n, 1)))
    });
    rec.check("g-commutes-cf-df", "[C_F, G] = [D_F, G] = 0", || {
        let z = Op::zero(n, 1);
        Ok(Verdict::all([
            Verdict::ops(&f.c().commutator(&g(0)?), &z).context("C_F"),
            Verdict::ops(&f.d().commutator(&g(0)?), &z).context("D_F"),
        ]))
    });
    rec.check("g-commutes-e", "[E, G] = 0", || {
        Ok(Verdict::ops(&r.e.commutator(&g(0)?), &Op::zero(n, 1)))
    });
    rec.check("e-commutes-cf-df", "[C_F, E] = [D_F, E] = 0", || {
        let z = Op::zero(n, 1);
        Ok(Verdict::all([
            Verdict::ops(&f.c().commutator(&r.e), &z).context("C_F"),
            Verdict::ops(&f.d().commutator(&r.e), &z).context("D_F"),
        ]))
    });
    rec.check(
        "g-rtrace-form",
        "G₁ = μ⁻² Tr_R(23) K₂ F₁⁻¹ F₂⁻¹",
        || {
            let body = placed(
                3,
                &[(&r.k, &[2, 3]), (&f.xinv, &[1, 2]), (&f.xinv, &[2, 3])],
            )?;
            let lhs = r.rtrace(&body, &[2, 3])?.scale(&r.params.mupow(-2));
            Ok(Verdict::ops(&lhs, &g(0)?))
        },
    );
    rec.check(
        "g-short-forms",
        "G = C_F Tr₂(F⁻¹K), G⁻¹ = Tr₂(K F) D_F⁻¹",
        || {
            let a = f.c().compose(&f.xinv.compose(&r.k).partial_trace(&[2])?);
            let b = r.k.compose(&f.x).partial_trace(&[2])?.compose(f.dinv()?);
            Ok(Verdict::all([
                Verdict::ops(&a, &g(0)?).context("G"),
                Verdict::ops(&b, &g(1)?).context("G⁻¹"),
            ]))
        },
    );
    if f.x == Op::swap(n) {
        rec.check("g-equals-e", "G = E when F = P", || {
            Ok(Verdict::all([
                Verdict::ops(&g(0)?, &r.e).context("G"),
                Verdict::ops(&g(1)?, &r.einv).context("G⁻¹"),
            ]))
        });
    }
    rec.finish()
}

/// Checks φ, ξ, θ, their inverses, their composition and the trace transport.
pub fn verify_maps<S: Field>(pair: &CompatiblePair<S>, seed: u64) -> Report {
    let mut params = pair.params_json();
    params["seed"] = json!(seed);
    let mut rec = Recorder::new("maps", params);
    let n = pair.dim_v();
    let r = pair.r;
    let mu = r.params.mu.clone();
    let id = MatrixLinearMap::identity(n);
    let id1 = Op::<S>::identity(n, 1);
    let maps = (|| -> Result<_> {
        Ok([
            ("phi", pair.phi()?, pair.phi_inv()?),
            ("xi", pair.xi()?, pair.xi_inv()?),
            ("theta", pair.theta()?, pair.theta_inv()?),
        ])
    })();
    let maps = match maps {
        Ok(m) => m,
        Err(e) => {
            rec.check("maps", "φ, ξ, θ and their inverses", || Err(e));
            return rec.finish();
        }
    };
    let [(_, phi, phi_inv), (_, xi, _), (_, theta, _)] = &maps;
    rec.check("phi-unit", "φ(I) = Tr_R(2) R = I", || {
        Ok(Verdict::ops(&phi.apply(&id1), &id1))
    });
    rec.check("xi-unit", "ξ(I) = Tr_R(2) K = μ I", || {
        Ok(Verdict::ops(&xi.apply(&id1), &id1.scale(&mu)))
    });
    for (name, m, minv) in &maps {
        rec.check(
            &format!("{name}-inverse"),
            "T⁻¹ ∘ T = T ∘ T⁻¹ = id on all matrix units",
            || {
                Ok(Verdict::all([
                    Verdict::ops(minv.then_after(m).coeff(), id.coeff()).context("T⁻¹ ∘ T"),
                    Verdict::ops(m.then_after(minv).coeff(), id.coeff()).context("T ∘ T⁻¹"),
                ]))
            },
        );
    }
    rec.check(
        "phi-inverse-strict",
        "φ⁻¹ with D_{R_f⁻¹} in place of μ⁻² D_{R_f} agrees",
        || {
            Ok(Verdict::ops(
                pair.phi_inv_strict()?.coeff(),
                phi_inv.coeff(),
            ))
        },
    );
    rec.check(
        "xi-theta",
        "ξ ∘ θ = θ ∘ ξ = (M ↦ G⁻¹ M G)",
        || {
            let (g, ginv) = pair.operator_g()?;
            let ad = MatrixLinearMap::sandwich(&ginv, &g)?;
            Ok(Verdict::all([
                Verdict::ops(xi.then_after(theta).coeff(), ad.coeff()).context("ξ ∘ θ"),
                Verdict::ops(theta.then_after(xi).coeff(), ad.coeff()).context("θ ∘ ξ"),
            ]))
        },
    );
    rec.check(
        "trace-transport",
        "Tr_{R_f} φ(M) = Tr_R M, Tr_{R_f} ξ(M) = μ Tr_R M",
        || {
            let tr_r = r.d.clone();
            let mut vs = vec![
                Verdict::ops(&phi.weighted_trace_form(&pair.rf.d), &tr_r).context("φ coefficients"),
                Verdict::ops(&xi.weighted_trace_form(&pair.rf.d), &tr_r.scale(&mu))
                    .context("ξ coefficients"),
            ];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for t in 0..5 {
                let m = Op::random(n, 1, &mut rng, 5);
                let base = r.d.compose(&m).trace();
                let a = pair.rf.d.compose(&phi.apply(&m)).trace();
                let b = pair.rf.d.compose(&xi.apply(&m)).trace();
                vs.push(Verdict::scalars(&a, &base).context(&format!("φ sample {t}")));
                vs.push(
                    Verdict::scalars(&b, &(base * mu.clone())).context(&format!("ξ sample {t}")),
                );
            }
            Ok(Verdict::all(vs))
        },
    );
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::{make_standard_r, Family};
    use crate::scalars::Rational;

    #[test]
    fn map_tabulation() {
        let a = Op::<Rational>::from_dense(
            2,
            1,
            &[
                vec![Rational::from_i64(1), Rational::from_i64(2)],
                vec![Rational::from_i64(0), Rational::from_i64(1)],
            ],
        );
        let m = MatrixLinearMap::sandwich(&a, &Op::identity(2, 1)).unwrap();
        let x = Op::matrix_unit(2, 1, 0);
        assert_eq!(m.apply(&x), a.compose(&x));
        assert_eq!(MatrixLinearMap::identity(2).apply(&x), x);
    }

    #[test]
    fn perturbed_f_is_rejected() {
        let q = Rational::new(7, 5).unwrap();
        let b = make_standard_r(Family::Orthogonal, 3, &q).unwrap();
        let bad =
            b.r.add(&Op::matrix_unit(3, 0, 0).kron(&Op::matrix_unit(3, 1, 1)));
        assert!(matches!(
            make_pair(&b, bad, "R+E"),
            Err(Error::NotCompatible(_))
        ));
        let pair = make_pair(&b, b.r.clone(), "R").unwrap();
        assert_eq!(pair.rf.r, b.r);
    }
}
