//! Verification suites for `M(R,F)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bmwrep::{BmwWord, IdemKind, Letter};
use crate::error::Result;
use crate::linalg;
use crate::report::{Recorder, Report, Verdict};
use crate::scalars::Field;
use crate::tensorops::TensorOperator;

use super::algebra::Qma;
use super::element::{QmaElement, QmaOp};
use super::reducer::{relation_entries, FreeElement, FreeOp};

type Op<S> = TensorOperator<S>;

fn w(letters: &[Letter]) -> BmwWord {
    BmwWord(letters.to_vec())
}

use Letter::{Kappa as K, Sigma as Sg, SigmaInv as Si};

fn params<S: Field>(q: &Qma<S>) -> Value {
    let mut p = q.pair.params_json();
    p["backend"] = json!(S::BACKEND);
    p["maxDegree"] = json!(q.max_degree());
    p
}

fn ops<S: Field>(q: &Qma<S>, lhs: &QmaOp<S>, rhs: &QmaOp<S>) -> Verdict {
    match lhs.diff_witness(rhs, &q.red, 3) {
        None => Verdict::Pass,
        Some(w) => Verdict::Fail(w),
    }
}

fn elems<S: Field>(q: &Qma<S>, lhs: &QmaElement<S>, rhs: &QmaElement<S>) -> Verdict {
    if lhs.degree() != rhs.degree() {
        return Verdict::Fail(format!("degrees {} and {}", lhs.degree(), rhs.degree()));
    }
    Verdict::from_bool(lhs == rhs, || {
        format!("lhs − rhs = {}", q.red.render(&lhs.sub(rhs)))
    })
}

/// The rank oracle of the quadratic component: `r_a² + r_s² + 1` from the spectral
/// decomposition of `R`.
pub fn spectral_dim2<S: Field>(q: &Qma<S>) -> Result<usize> {
    let ra = q.rep.idempotent(IdemKind::Anti, 2)?.rank();
    let rs = q.rep.idempotent(IdemKind::Sym, 2)?.rank();
    Ok(ra * ra + rs * rs + 1)
}

/// Graded dimensions, the degree-2 oracles, reducer invariants, matrix copies, characteristic
/// elements and descendants.
pub fn verify_qma<S: Field>(q: &Qma<S>, seed: u64) -> Report {
    let mut rec = Recorder::new("qma", params(q));
    let n = q.dim_v();
    let gens = n * n;
    let red = &q.red;
    let dims = red.graded_dims();

    rec.check(
        "graded-dim-1",
        "degree-1 component is spanned by the N² generators",
        || {
            Ok(Verdict::from_bool(dims.get(1) == Some(&gens), || {
                format!("dim {:?}", dims.get(1))
            }))
        },
    );
    rec.check(
        "graded-dim-2-rank",
        "dim = N⁴ − rank of the relation entries",
        || {
            let raw = relation_entries(&q.pair.r.r, &q.pair.f.x, &q.pair.f.xinv)?;
            let dense: Vec<Vec<S>> = raw
                .iter()
                .map(|e| {
                    let mut v = vec![S::zero(); gens * gens];
                    for (l, c) in &e.terms {
                        v[*l as usize] = c.clone();
                    }
                    v
                })
                .collect();
            let oracle = gens * gens - linalg::rank(&dense);
            Ok(Verdict::from_bool(dims[2] == oracle, || {
                format!("reducer {} rank oracle {oracle}", dims[2])
            }))
        },
    );
    rec.check("graded-dim-2-spectral", "dim = r_a² + r_s² + 1", || {
        let oracle = spectral_dim2(q)?;
        Ok(Verdict::from_bool(dims[2] == oracle, || {
            format!("reducer {} spectral oracle {oracle}", dims[2])
        }))
    });

    rec.check("reduce-relations", "reduce(relation entry) = 0", || {
        let raw = relation_entries(&q.pair.r.r, &q.pair.f.x, &q.pair.f.xinv)?;
        let mut vs = Vec::new();
        for (k, e) in raw.iter().enumerate() {
            let r = red.reduce(e)?;
            vs.push(Verdict::from_bool(r.is_zero(), || {
                format!("entry {k}: {}", red.render(&r))
            }));
        }
        // two-sided multiples in the top degree
        let top = red.max_degree();
        if top >= 3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for t in 0..6 {
                let e = &raw[rng.gen_range(0..raw.len())];
                let left: Vec<usize> = (0..rng.gen_range(0..=top - 2))
                    .map(|_| rng.gen_range(0..gens))
                    .collect();
                let right: Vec<usize> = (0..top - 2 - left.len())
                    .map(|_| rng.gen_range(0..gens))
                    .collect();
                let x = FreeElement::monomial(&left, gens)
                    .mul(e, gens)
                    .mul(&FreeElement::monomial(&right, gens), gens);
                let r = red.reduce(&x)?;
                vs.push(Verdict::from_bool(r.is_zero(), || {
                    format!("sample {t}: {}", red.render(&r))
                }));
            }
        }
        Ok(Verdict::all(vs))
    });
    rec.check(
        "reduce-projection",
        "reduce∘reduce = reduce and reduce is linear",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let mut vs = Vec::new();
            for d in 0..=red.max_degree() {
                let space = (gens as u64).pow(d as u32);
                let sample = |rng: &mut ChaCha8Rng| {
                    let mut x = FreeElement::zero(d);
                    for _ in 0..8 {
                        x.add_term(rng.gen_range(0..space), S::from_i64(rng.gen_range(-5..=5)));
                    }
                    x
                };
                let (x, y) = (sample(&mut rng), sample(&mut rng));
                let c = S::from_i64(rng.gen_range(1..=7));
                let rx = red.reduce(&x)?;
                let ry = red.reduce(&y)?;
                let rr = red.reduce(&red.lift(&rx))?;
                vs.push(Verdict::from_bool(rr == rx, || {
                    format!("degree {d}: not idempotent")
                }));
                let lin = red.reduce(&x.add(&y.scale(&c)))?;
                vs.push(Verdict::from_bool(lin == rx.axpy(&ry, &c), || {
                    format!("degree {d}: not linear")
                }));
            }
            Ok(Verdict::all(vs))
        },
    );
    rec.check(
        "reduce-normal-monomials",
        "normal monomials are fixed by reduce",
        || {
            let mut vs = Vec::new();
            for d in 0..=red.max_degree() {
                for idx in 0..red.dim(d)? {
                    let labels: Vec<usize> =
                        red.monomial(d, idx).iter().map(|&v| v as usize).collect();
                    let r = red.reduce(&FreeElement::monomial(&labels, gens))?;
                    let expected = QmaElement::from_terms(d, vec![(idx as u32, S::one())]);
                    if r != expected {
                        vs.push(Verdict::Fail(format!("degree {d} monomial {idx}")));
                        break;
                    }
                }
            }
            Ok(Verdict::all(vs))
        },
    );
    rec.check(
        "free-product-agrees",
        "reduce(M₁M_2̄ computed freely) = reduced copies product",
        || {
            let raw_m = FreeOp::generator_matrix(n)?.embed_first(2);
            let m2 = raw_m.left_scalar(&q.pair.f.x).right_scalar(&q.pair.f.xinv);
            let prod = raw_m.mul(&m2, gens);
            let reduced = q.matrix_copies(2)?;
            let mut vs = Vec::new();
            for (k, e) in prod.entries.iter().enumerate() {
                let r = red.reduce(e)?;
                let size = n * n;
                if &r != reduced.get(k / size, k % size) {
                    vs.push(Verdict::Fail(format!("entry {k}")));
                    break;
                }
            }
            Ok(Verdict::all(vs))
        },
    );

    copies_checks(&mut rec, q);
    characteristic_checks(&mut rec, q);
    descendant_checks(&mut rec, q);
    rec.finish()
}

/// The relation itself and the copy identities on `V^{⊗legs}`.
fn copies_checks<S: Field>(rec: &mut Recorder, q: &Qma<S>) {
    let legs = (q.max_degree() + 1).clamp(3, 4);
    let f = &q.pair.f.x;
    let r = &q.pair.r.r;
    rec.check(
        "copies-definition",
        "R₁M₁̄M₂̄ = M₁̄M₂̄R₁",
        || {
            let p = q.matrix_copies(2)?;
            Ok(ops(q, &p.left_scalar(r), &p.right_scalar(r)))
        },
    );
    for (name, x) in [("fm", f), ("rm", r)] {
        rec.check(
            &format!("{name}-k"),
            "X_i M_j̄ = M_j̄ X_i for j ≠ i, i+1",
            || {
                let mut vs = Vec::new();
                for i in 1..legs {
                    let xi = x.embed_at(i, legs)?;
                    for j in (1..=legs).filter(|&j| j != i && j != i + 1) {
                        let c = q.copy(j, legs)?;
                        vs.push(
                            ops(q, &c.left_scalar(&xi), &c.right_scalar(&xi))
                                .context(&format!("i={i} j={j}")),
                        );
                    }
                }
                Ok(Verdict::all(vs))
            },
        );
    }
    rec.check("rmm-k", "R_j M_j̄ M_{j+1̄} = M_j̄ M_{j+1̄} R_j", || {
        let mut vs = Vec::new();
        for j in 1..legs {
            let p = q.copies_range(j, j + 1, legs)?;
            let rj = r.embed_at(j, legs)?;
            vs.push(ops(q, &p.left_scalar(&rj), &p.right_scalar(&rj)).context(&format!("j={j}")));
        }
        Ok(Verdict::all(vs))
    });
    rec.check(
        "stringshift",
        "F_i⋯F_k M_ī⋯M_k̄ = M_{i+1̄}⋯M_{k+1̄} F_i⋯F_k",
        || {
            let mut vs = Vec::new();
            for i in 1..legs {
                for k in i..legs {
                    if k - i + 1 > q.max_degree() {
                        continue;
                    }
                    let mut fs = Op::identity(q.dim_v(), legs);
                    for t in i..=k {
                        fs = fs.compose(&f.embed_at(t, legs)?);
                    }
                    let lhs = q.copies_range(i, k, legs)?.left_scalar(&fs);
                    let rhs = q.copies_range(i + 1, k + 1, legs)?.right_scalar(&fs);
                    vs.push(ops(q, &lhs, &rhs).context(&format!("i={i} k={k}")));
                }
            }
            Ok(Verdict::all(vs))
        },
    );
    rec.check(
        "tau2",
        "K_n M_n̄ M_{n+1̄} = M_n̄ M_{n+1̄} K_n = μ⁻² K_n g",
        || {
            let g = q.contraction2()?;
            let mu2 = q.mu_pow(-2);
            let mut vs = Vec::new();
            for j in 1..q.max_degree().min(legs) {
                let nl = j + 1;
                let p = q.copies_range(j, j + 1, nl)?;
                let k = q.pair.r.k.embed_at(j, nl)?;
                let lhs = p.left_scalar(&k);
                let mid = p.right_scalar(&k);
                let rhs = QmaOp::from_scalar(&k.scale(&mu2)).mul_elem_right(&q.red, &g)?;
                vs.push(ops(q, &lhs, &mid).context(&format!("n={j} left/right")));
                vs.push(ops(q, &lhs, &rhs).context(&format!("n={j} contraction")));
            }
            Ok(Verdict::all(vs))
        },
    );
}

fn characteristic_checks<S: Field>(rec: &mut Recorder, q: &Qma<S>) {
    let n = q.dim_v();
    rec.check("p0", "p₀ = Tr_R I = μη", || {
        let p0 = q.power_sum(0)?;
        let params = &q.pair.r.params;
        Ok(Verdict::scalars(
            &p0.scalar_value(),
            &(params.mu.clone() * params.eta.clone()),
        ))
    });
    rec.check("a1-s1-p1", "a₁ = s₁ = p₁", || {
        let p1 = q.power_sum(1)?;
        Ok(Verdict::all([
            elems(q, &q.elem_sym(1)?, &p1).context("a₁"),
            elems(q, &q.compl_sym(1)?, &p1).context("s₁"),
        ]))
    });
    rec.check(
        "resolution-ch",
        "a₂ + s₂ + g = Tr_R(12) M₁̄M₂̄",
        || {
            let lhs = q.elem_sym(2)?.add(&q.compl_sym(2)?).add(&q.contraction2()?);
            Ok(elems(q, &lhs, &q.ch(&Op::identity(n, 2))?))
        },
    );
    rec.check("cyclic", "ch(αβ) = ch(βα)", || {
        let pairs: Vec<(BmwWord, BmwWord, usize)> = vec![
            (w(&[Sg(1)]), w(&[Sg(2)]), 3),
            (w(&[Sg(1)]), w(&[K(2)]), 3),
            (w(&[Si(1)]), w(&[Sg(2), K(1)]), 3),
            (w(&[K(1)]), w(&[Sg(2), Sg(1)]), 3),
        ];
        let mut vs = Vec::new();
        for (a, b, legs) in pairs {
            let lhs = q.ch_word(&a.then(&b), legs)?;
            let rhs = q.ch_word(&b.then(&a), legs)?;
            vs.push(elems(q, &lhs, &rhs).context(&format!("α={a} β={b}")));
        }
        Ok(Verdict::all(vs))
    });
    rec.check(
        "power-sum-orders",
        "p_i = ch(σ₁⋯σ_{i−1}) = ch(σ_{i−1}⋯σ₁)",
        || {
            let mut vs = Vec::new();
            for i in 2..=q.max_degree() {
                let down = q.ch_word(&BmwWord::sigma_run(i - 1, 1), i)?;
                vs.push(elems(q, &q.power_sum(i)?, &down).context(&format!("i={i}")));
            }
            Ok(Verdict::all(vs))
        },
    );
    rec.check(
        "multiplication-rule",
        "ch(α)ch(β) = ch(α β↑n) = ch(α↑i β)",
        || {
            let p1 = q.power_sum(1)?;
            let mut vs =
                vec![elems(q, &q.mul(&p1, &p1)?, &q.ch(&Op::identity(n, 2))?).context("p₁p₁")];
            if q.max_degree() >= 3 {
                let p2 = q.power_sum(2)?;
                vs.push(
                    elems(q, &q.mul(&p1, &p2)?, &q.ch_word(&w(&[Sg(2)]), 3)?)
                        .context("p₁p₂ = ch(σ₂)"),
                );
                vs.push(
                    elems(q, &q.mul(&p2, &p1)?, &q.ch_word(&w(&[Sg(1)]), 3)?)
                        .context("p₂p₁ = ch(σ₁)"),
                );
            }
            if q.max_degree() >= 4 {
                let p2 = q.power_sum(2)?;
                vs.push(
                    elems(q, &q.mul(&p2, &p2)?, &q.ch_word(&w(&[Sg(1), Sg(3)]), 4)?)
                        .context("p₂p₂ = ch(σ₁σ₃)"),
                );
            }
            Ok(Verdict::all(vs))
        },
    );
    rec.check(
        "commutative",
        "xy = yx in the characteristic subalgebra",
        || {
            let named = [
                ("g", q.contraction2()?),
                ("p1", q.power_sum(1)?),
                ("p2", q.power_sum(2)?),
                ("a2", q.elem_sym(2)?),
            ];
            let mut vs = Vec::new();
            for (i, (nx, x)) in named.iter().enumerate() {
                for (ny, y) in &named[i + 1..] {
                    if x.degree() + y.degree() > q.max_degree() {
                        continue;
                    }
                    vs.push(elems(q, &q.mul(x, y)?, &q.mul(y, x)?).context(&format!("{nx}·{ny}")));
                }
            }
            Ok(Verdict::all(vs))
        },
    );
}

fn descendant_checks<S: Field>(rec: &mut Recorder, q: &Qma<S>) {
    let n = q.dim_v();
    rec.check("descendant-unit", "M^1 = M", || {
        Ok(ops(q, &q.descendant(&Op::identity(n, 1))?, &q.m()))
    });
    rec.check("descendant-square", "M^{σ₁} = M^{2̄} = M⋆M", || {
        Ok(ops(
            q,
            &q.descendant_word(&w(&[Sg(1)]), 2)?,
            &q.star(&q.m())?,
        ))
    });
    rec.check(
        "descendant-mirror",
        "M^{κ₁σ₂} = M^{σ₂κ₁}",
        || {
            Ok(ops(
                q,
                &q.descendant_word(&w(&[K(1), Sg(2)]), 3)?,
                &q.descendant_word(&w(&[Sg(2), K(1)]), 3)?,
            ))
        },
    );
    rec.check("reduced-cyclic", "M^{α β↑1} = M^{β↑1 α}", || {
        let cases = [
            (w(&[Sg(1)]), w(&[Sg(1)])),
            (w(&[K(1)]), w(&[Sg(1)])),
            (w(&[Sg(1)]), w(&[K(1)])),
        ];
        let mut vs = Vec::new();
        for (a, b) in cases {
            let b1 = b.shift_up(1);
            let lhs = q.descendant_word(&a.then(&b1), 3)?;
            let rhs = q.descendant_word(&b1.then(&a), 3)?;
            vs.push(ops(q, &lhs, &rhs).context(&format!("α={a} β={b}")));
        }
        Ok(Verdict::all(vs))
    });
    rec.check("descendant-rtrace", "Tr_R(M^X) = ch(X)", || {
        let mut vs = Vec::new();
        for (x, legs) in [
            (w(&[Sg(1)]), 2),
            (w(&[K(1)]), 2),
            (w(&[Sg(1), Sg(2)]), 3),
            (w(&[K(2), Si(1)]), 3),
        ] {
            let lhs = q.rtrace(&q.descendant_word(&x, legs)?);
            vs.push(elems(q, &lhs, &q.ch_word(&x, legs)?).context(&format!("X={x}")));
        }
        Ok(Verdict::all(vs))
    });
}

/// Identities of the ⋆-product on matrix descendants.
pub fn star_identities<S: Field>(q: &Qma<S>) -> Report {
    let mut rec = Recorder::new("qma", params(q));
    let m = q.m();
    rec.check("star-unit", "M ⋆ I = M·φ(I) = M", || {
        Ok(ops(q, &q.star(&q.identity())?, &m))
    });
    rec.check("star-powers", "M^{1̄} ⋆ M^{1̄} = M^{2̄}", || {
        Ok(ops(q, &q.star(&m)?, &q.power(2)?))
    });
    rec.check(
        "star-word",
        "M ⋆ M^β = M^{β↑1 σ₁} = M·φ(M^β)",
        || {
            let lhs = q.star(&q.descendant_word(&w(&[Sg(1)]), 2)?)?;
            Ok(ops(q, &lhs, &q.descendant_word(&w(&[Sg(2), Sg(1)]), 3)?))
        },
    );
    rec.check("star-associative", "(M⋆M)⋆M = M⋆(M⋆M)", || {
        let left = q.descendant_word(&w(&[Sg(1), Sg(2), Sg(1), Si(2)]), 3)?;
        let right = q.descendant_word(&w(&[Si(2), Sg(1), Sg(2), Sg(1)]), 3)?;
        let cube = q.power(3)?;
        Ok(Verdict::all([
            ops(q, &left, &right).context("exponent forms"),
            ops(q, &left, &cube).context("M^{3̄}"),
            ops(q, &q.star(&q.power(2)?)?, &cube).context("M·φ(M^{2̄})"),
        ]))
    });
    rec.check("star-central", "M ⋆ M^{κ₁} = M^{κ₁} ⋆ M", || {
        let left = q.descendant_word(&w(&[K(2), Sg(1)]), 3)?;
        let right = q.descendant_word(&w(&[K(1), Sg(2), Sg(1), Si(2)]), 3)?;
        let direct = q.star(&q.descendant_word(&w(&[K(1)]), 2)?)?;
        Ok(Verdict::all([
            ops(q, &left, &right).context("exponent forms"),
            ops(q, &direct, &left).context("M·φ(M^{κ₁})"),
        ]))
    });
    rec.check("star-module", "M ⋆ (I·g) = M·g", || {
        let g = q.contraction2()?;
        Ok(ops(
            q,
            &q.star(&q.times_identity(&g)?)?,
            &m.mul_elem_right(&q.red, &g)?,
        ))
    });
    rec.check(
        "star-commutative",
        "Mt(M^{2̄}) ⋆ M = M ⋆ Mt(M^{2̄})",
        || {
            q.red.check_degree(4)?;
            let left =
                q.descendant_word(&w(&[K(1), Sg(2), Sg(3), Sg(2), Sg(1), Si(2), Si(3)]), 4)?;
            let right = q.descendant_word(&w(&[K(2), Sg(3), Sg(1)]), 4)?;
            let direct = q.star(&q.mt(&q.power(2)?)?)?;
            Ok(Verdict::all([
                ops(q, &left, &right).context("exponent forms"),
                ops(q, &direct, &right).context("M·φ(Mt(M^{2̄}))"),
            ]))
        },
    );
    rec.finish()
}

/// Identities of `Mt(N) = M·ξ(N)`.
pub fn verify_mt<S: Field>(q: &Qma<S>) -> Report {
    let mut rec = Recorder::new("qma", params(q));
    let m = q.m();
    let mu = q.pair.r.params.mu.clone();
    rec.check("mt-identity", "Mt(I) = μM", || {
        Ok(ops(q, &q.mt(&q.identity())?, &m.scale(&mu)))
    });
    rec.check("mt-m", "Mt(M) = μ⁻¹ I·g = M^{κ₁}", || {
        let lhs = q.mt(&m)?;
        let g = q.contraction2()?;
        Ok(Verdict::all([
            ops(q, &lhs, &q.times_identity(&g)?.scale(&q.mu_pow(-1))).context("μ⁻¹ I·g"),
            ops(q, &lhs, &q.descendant_word(&w(&[K(1)]), 2)?).context("M^{κ₁}"),
        ]))
    });
    rec.check("mt-word", "Mt(M^α) = M^{α↑1 κ₁}", || {
        let m2 = q.power(2)?;
        let lhs = q.mt(&m2)?;
        Ok(Verdict::all([
            ops(q, &lhs, &q.descendant_word(&w(&[Sg(2), K(1)]), 3)?).context("α = σ₁"),
            ops(q, &lhs, &q.descendant_word(&w(&[K(1), Sg(2)]), 3)?).context("M^{κ₁σ₂}"),
        ]))
    });
    rec.check("mt-twice-m", "Mt(Mt(M)) = M·g", || {
        let g = q.contraction2()?;
        Ok(ops(q, &q.mt(&q.mt(&m)?)?, &m.mul_elem_right(&q.red, &g)?))
    });
    rec.check("mt-twice", "Mt(Mt(M^{2̄})) = M^{2̄}·g", || {
        q.red.check_degree(4)?;
        let m2 = q.power(2)?;
        let g = q.contraction2()?;
        Ok(ops(q, &q.mt(&q.mt(&m2)?)?, &m2.mul_elem_right(&q.red, &g)?))
    });
    rec.finish()
}

/// Pairs `(m, i)`.
pub type Instances = Vec<(usize, usize)>;

/// Instances `(m, i)` of the two recursions with `m + i + 1 ≤ budget` whose degrees fit in
/// `max_degree`.
pub fn lemma51_instances(max_degree: usize, budget: usize) -> (Instances, Instances) {
    let mut rek1 = Vec::new();
    let mut rek2 = Vec::new();
    for m in 0..=max_degree {
        for i in 0..=max_degree - m {
            if m + i + 1 > budget {
                continue;
            }
            rek1.push((m, i));
            if m + i + 2 <= max_degree {
                rek2.push((m, i));
            }
        }
    }
    (rek1, rek2)
}

/// The recursions for `A^(m−1,i+1)` and `B^(m+1,i+1)`, as matrix identities and under `Tr_R`.
pub fn verify_lemma51<S: Field>(q: &Qma<S>, budget: usize) -> Report {
    let mut p = params(q);
    p["budget"] = json!(budget);
    let mut rec = Recorder::new("lemma51", p);
    let p = &q.pair.r.params;
    let mu = p.mu.clone();
    let one = S::one();
    let c1 = |i: usize| -> Result<S> {
        let t = mu.clone() * q.q_pow(2 * i as i64 - 1);
        (t.clone() * p.qdiff()).try_div(&(one.clone() + t))
    };
    let c2 = |i: usize| -> Result<S> {
        let t = mu.clone() * q.q_pow(2 * i as i64 - 1);
        p.qdiff().try_div(&(one.clone() + t))
    };
    // independent traces of the A and B series through characteristic elements
    let tr_a = |m: usize, i: usize| -> Result<QmaElement<S>> {
        if i == 0 {
            return Ok(QmaElement::zero(m));
        }
        Ok(q.ch(&q.a_exponent(m, i)?)?.scale(&p.q_number(i as i64)))
    };
    let tr_b = |m: usize, i: usize| -> Result<QmaElement<S>> {
        if i == 0 {
            return Ok(QmaElement::zero(m));
        }
        let iq = p.q_number(i as i64);
        if m == 0 {
            return Ok(q.elem_sym(i)?.scale(&(iq * mu.clone())));
        }
        Ok(q.ch(&q.b_exponent(m, i)?)?.scale(&iq))
    };
    let (rek1, rek2) = lemma51_instances(q.max_degree(), budget);
    rec.check("boundary-a-1", "A^(−1,1) = I", || {
        Ok(ops(q, &q.descendant_a(-1, 1)?, &q.identity()))
    });
    rec.check("boundary-b-1", "B^(1,1) = μ⁻¹ I·g", || {
        q.red.check_degree(2)?;
        let rhs = q.times_identity(&q.contraction2()?)?.scale(&q.mu_pow(-1));
        Ok(ops(q, &q.descendant_b(1, 1)?, &rhs))
    });
    rec.check("boundary-a-0-1", "A^(0,1) = M", || {
        Ok(ops(q, &q.descendant_a(0, 1)?, &q.m()))
    });
    // A^(−1,i)g and B^(0,i)g are expressed through elements of P(R,F)
    for i in 1..q.max_degree().saturating_sub(1) {
        rec.check(
            &format!("boundary-g-i{i}"),
            "A^(−1,i+1)g and B^(0,i)g through the m = 0 recursions",
            || {
                let g = q.contraction2()?;
                let ai = q.elem_sym(i)?;
                let a0 = q.descendant_a(0, i)?;
                let b0 = q.descendant_b(0, i)?;
                let lhs_a = q.descendant_a(-1, i + 1)?.mul_elem_right(&q.red, &g)?;
                let rhs_a = q
                    .times_identity(&ai)?
                    .scale(&q.q_pow(i as i64))
                    .sub(&a0)
                    .mul_elem_right(&q.red, &g)?
                    .axpy(&b0.mul_elem_right(&q.red, &g)?, &-c1(i)?);
                let lhs_b = b0.mul_elem_right(&q.red, &g)?;
                let rhs_b = q
                    .times_identity(&ai)?
                    .scale(&(q.mu_pow(-1) * q.q_pow(-(i as i64))))
                    .axpy(&a0, &c2(i)?)
                    .mul_elem_right(&q.red, &g)?
                    .sub(&q.descendant_b(1, i + 1)?);
                Ok(Verdict::all([
                    ops(q, &lhs_a, &rhs_a).context("A^(−1,i+1)g"),
                    ops(q, &lhs_b, &rhs_b).context("B^(0,i)g"),
                ]))
            },
        );
    }
    for &(m, i) in &rek1 {
        rec.check(
            &format!("rek1-m{m}-i{i}"),
            "A^(m−1,i+1) = q^i M^{m̄} a_i − A^(m,i) − μq^{2i−1}(q−q⁻¹)/(1+μq^{2i−1}) B^(m,i)",
            || {
                let lhs = q.descendant_a(m as i64 - 1, i + 1)?;
                let ai = q.elem_sym(i)?;
                let rhs = q
                    .power(m)?
                    .mul_elem_right(&q.red, &ai)?
                    .scale(&q.q_pow(i as i64))
                    .sub(&q.descendant_a(m as i64, i)?)
                    .axpy(&q.descendant_b(m, i)?, &-c1(i)?);
                Ok(ops(q, &lhs, &rhs))
            },
        );
        rec.check(
            &format!("rek1-trace-m{m}-i{i}"),
            "Tr_R of the A-recursion",
            || {
                let iq1 = p.q_number(i as i64 + 1);
                let lhs = if m == 0 {
                    let a = q.rep.idempotent(IdemKind::Anti, i + 1)?;
                    q.descendant_from(2, &a)?
                        .weighted_trace(&q.pair.rf.d)
                        .scale(&iq1)
                } else {
                    tr_a(m - 1, i + 1)?
                };
                let rhs = q
                    .mul(&q.power_sum(m)?, &q.elem_sym(i)?)?
                    .scale(&q.q_pow(i as i64))
                    .sub(&tr_a(m, i)?)
                    .axpy(&tr_b(m, i)?, &-c1(i)?);
                Ok(elems(q, &lhs, &rhs))
            },
        );
    }
    for &(m, i) in &rek2 {
        rec.check(
            &format!("rek2-m{m}-i{i}"),
            "B^(m+1,i+1) = (μ⁻¹q^{−i} M^{m̄} a_i + (q−q⁻¹)/(1+μq^{2i−1}) A^(m,i) − B^(m,i)) g",
            || {
                let lhs = q.descendant_b(m + 1, i + 1)?;
                let g = q.contraction2()?;
                let inner = q
                    .power(m)?
                    .mul_elem_right(&q.red, &q.elem_sym(i)?)?
                    .scale(&(q.mu_pow(-1) * q.q_pow(-(i as i64))))
                    .axpy(&q.descendant_a(m as i64, i)?, &c2(i)?)
                    .sub(&q.descendant_b(m, i)?);
                Ok(ops(q, &lhs, &inner.mul_elem_right(&q.red, &g)?))
            },
        );
        rec.check(
            &format!("rek2-trace-m{m}-i{i}"),
            "Tr_R of the B-recursion",
            || {
                let lhs = tr_b(m + 1, i + 1)?;
                let g = q.contraction2()?;
                let inner = q
                    .mul(&q.power_sum(m)?, &q.elem_sym(i)?)?
                    .scale(&(q.mu_pow(-1) * q.q_pow(-(i as i64))))
                    .axpy(&tr_a(m, i)?, &c2(i)?)
                    .sub(&tr_b(m, i)?);
                Ok(elems(q, &lhs, &q.mul(&inner, &g)?))
            },
        );
    }
    rec.finish()
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Newton relations for `{a_i}` and `{s_i}`, the Wronski relations, and the recursive
/// re-derivation of `a_n`, `s_n` from the power sums.
pub fn verify_newton_wronski<S: Field>(q: &Qma<S>, n_max: usize) -> Report {
    let mut rec = Recorder::new("newton", params(q));
    let p = &q.pair.r.params;
    let mu = p.mu.clone();
    let s = |v: i64| S::from_i64(v);
    // Σ_{i≥1} c(n,i) x_{n−2i} g^i
    let g_tail = |n: usize,
                  xs: &dyn Fn(usize) -> Result<QmaElement<S>>,
                  c: &dyn Fn(usize, usize) -> S|
     -> Result<QmaElement<S>> {
        let g = q.contraction2()?;
        let mut acc = QmaElement::zero(n);
        for i in 1..=n / 2 {
            let term = q.mul(&xs(n - 2 * i)?, &q.red.pow(&g, i)?)?;
            acc = acc.axpy(&term, &c(n, i));
        }
        Ok(acc)
    };
    let ca = |n: usize, i: usize| {
        mu.clone() * q.q_pow(n as i64 - 2 * i as i64) - q.q_pow(1 - n as i64 + 2 * i as i64)
    };
    let cs = |n: usize, i: usize| {
        mu.clone() * q.q_pow(2 * i as i64 - n as i64) + q.q_pow(n as i64 - 2 * i as i64 - 1)
    };
    // Σ_{i<n} w_i x_i p_{n−i}
    let p_sum = |n: usize,
                 xs: &dyn Fn(usize) -> Result<QmaElement<S>>,
                 wt: &dyn Fn(usize) -> S|
     -> Result<QmaElement<S>> {
        let mut acc = QmaElement::zero(n);
        for i in 0..n {
            acc = acc.axpy(&q.mul(&xs(i)?, &q.power_sum(n - i)?)?, &wt(i));
        }
        Ok(acc)
    };
    let a = |i: usize| q.elem_sym(i);
    let sy = |i: usize| q.compl_sym(i);
    let wa = |i: usize| s(sign(i)) * q.q_pow(i as i64);
    let ws = |i: usize| q.q_pow(-(i as i64));

    for n in 1..=n_max {
        rec.check(
            &format!("newton-a-{n}"),
            "Σ(−q)^i a_i p_{n−i} = (−1)^{n−1} n_q a_n + (−1)^n Σ(μq^{n−2i} − q^{1−n+2i}) a_{n−2i} g^i",
            || {
                let lhs = p_sum(n, &a, &wa)?;
                let rhs = a(n)?
                    .scale(&(s(sign(n - 1)) * p.q_number(n as i64)))
                    .axpy(&g_tail(n, &a, &ca)?, &s(sign(n)));
                Ok(elems(q, &lhs, &rhs))
            },
        );
        rec.check(
            &format!("newton-s-{n}"),
            "Σq^{−i} s_i p_{n−i} = n_q s_n + Σ(μq^{2i−n} + q^{n−2i−1}) s_{n−2i} g^i",
            || {
                let lhs = p_sum(n, &sy, &ws)?;
                let rhs = sy(n)?
                    .scale(&p.q_number(n as i64))
                    .add(&g_tail(n, &sy, &cs)?);
                Ok(elems(q, &lhs, &rhs))
            },
        );
    }
    for n in 0..=n_max {
        rec.check(
            &format!("wronski-{n}"),
            "Σ(−1)^i a_i s_{n−i} = δ_{n,0} − δ_{n,2} g",
            || {
                let mut lhs = QmaElement::zero(n);
                for i in 0..=n {
                    lhs = lhs.axpy(&q.mul(&a(i)?, &sy(n - i)?)?, &s(sign(i)));
                }
                let rhs = match n {
                    0 => QmaElement::scalar(S::one()),
                    2 => q.contraction2()?.neg(),
                    _ => QmaElement::zero(n),
                };
                Ok(elems(q, &lhs, &rhs))
            },
        );
    }
    rec.check(
        "closed-form-newton-2",
        "p₂ − q a₁p₁ = −2_q a₂ + (μ−q) g",
        || {
            q.red.check_degree(2)?;
            let lhs = q
                .power_sum(2)?
                .axpy(&q.mul(&a(1)?, &q.power_sum(1)?)?, &-p.q.clone());
            let rhs = a(2)?
                .scale(&-p.q_number(2))
                .axpy(&q.contraction2()?, &(mu.clone() - p.q.clone()));
            Ok(elems(q, &lhs, &rhs))
        },
    );
    rec.check(
        "closed-form-wronski-2",
        "s₂ − a₁s₁ + a₂ = −g",
        || {
            q.red.check_degree(2)?;
            let lhs = sy(2)?.sub(&q.mul(&a(1)?, &sy(1)?)?).add(&a(2)?);
            Ok(elems(q, &lhs, &q.contraction2()?.neg()))
        },
    );

    // recursive definitions from the power sums, independent of the idempotents
    let mut at: Vec<QmaElement<S>> = vec![QmaElement::scalar(S::one())];
    let mut st: Vec<QmaElement<S>> = vec![QmaElement::scalar(S::one())];
    for n in 1..=n_max {
        let step = |prev: &Vec<QmaElement<S>>,
                    wt: &dyn Fn(usize) -> S,
                    c: &dyn Fn(usize, usize) -> S,
                    tail_sign: S,
                    lead: S|
         -> Result<QmaElement<S>> {
            let xs = |i: usize| Ok(prev[i].clone());
            let body = p_sum(n, &xs, wt)?.axpy(&g_tail(n, &xs, c)?, &-tail_sign);
            Ok(body.scale(&lead.try_inv()?))
        };
        let nq = p.q_number(n as i64);
        let next_a = step(&at, &wa, &ca, s(sign(n)), s(sign(n - 1)) * nq.clone());
        let next_s = step(&st, &ws, &cs, S::one(), nq);
        match (next_a, next_s) {
            (Ok(x), Ok(y)) => {
                rec.check(
                    &format!("recursive-a-{n}"),
                    "a_n from the Newton recursion equals ch(a^(n))",
                    || Ok(elems(q, &x, &a(n)?)),
                );
                rec.check(
                    &format!("recursive-s-{n}"),
                    "s_n from the Newton recursion equals ch(s^(n))",
                    || Ok(elems(q, &y, &sy(n)?)),
                );
                at.push(x);
                st.push(y);
            }
            (Err(e), _) | (_, Err(e)) => {
                let reason = e.to_string();
                rec.skip(
                    &format!("recursive-a-{n}"),
                    "a_n from the Newton recursion",
                    reason.clone(),
                );
                rec.skip(
                    &format!("recursive-s-{n}"),
                    "s_n from the Newton recursion",
                    reason,
                );
                break;
            }
        }
    }
    rec.finish()
}

/// `M·g = g·(G⁻¹MG)`, `M·μξ(M) = I·g`, and `ξθ = θξ = G⁻¹(·)G` on coefficients.
pub fn verify_inversion_identities<S: Field>(q: &Qma<S>) -> Report {
    let mut rec = Recorder::new("inversion", params(q));
    let m = q.m();
    rec.check("mj", "M·g = g·(G⁻¹MG)", || {
        q.red.check_degree(3)?;
        let (gop, ginv) = q.pair.operator_g()?;
        let g = q.contraction2()?;
        let lhs = m.mul_elem_right(&q.red, &g)?;
        let rhs = m
            .left_scalar(&ginv)
            .right_scalar(&gop)
            .mul_elem_left(&q.red, &g)?;
        Ok(ops(q, &lhs, &rhs))
    });
    rec.check("m-inverse", "M·μξ(M) = I·g", || {
        let mu = q.pair.r.params.mu.clone();
        let lhs = m.compose(&q.red, &m.apply_map(q.xi())?.scale(&mu))?;
        Ok(ops(q, &lhs, &q.times_identity(&q.contraction2()?)?))
    });
    rec.check("composition", "ξθ = θξ = G⁻¹(·)G", || {
        let (gop, ginv) = q.pair.operator_g()?;
        let theta = q.pair.theta()?;
        let conj = crate::twistmaps::MatrixLinearMap::sandwich(&ginv, &gop)?;
        Ok(Verdict::all([
            Verdict::ops(q.xi().then_after(&theta).coeff(), conj.coeff()).context("ξθ"),
            Verdict::ops(theta.then_after(q.xi()).coeff(), conj.coeff()).context("θξ"),
        ]))
    });
    rec.finish()
}

/// All `M(R,F)` suites at once.
pub fn verify_all<S: Field>(q: &Qma<S>, n_max: usize, seed: u64) -> Report {
    let mut r = verify_qma(q, seed);
    r.extend(star_identities(q));
    r.extend(verify_mt(q));
    r.extend(verify_lemma51(q, q.max_degree() + 1));
    r.extend(verify_newton_wronski(q, n_max));
    r.extend(verify_inversion_identities(q));
    r
}
