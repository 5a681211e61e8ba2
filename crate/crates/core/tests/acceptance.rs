//! The acceptance criteria, each evaluated exactly and reported on one line.

use std::time::Instant;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmbmw::bmwrep::{self, IdemKind, Representation};
use qmbmw::cli::{self, Cli, Command, RunConfig, Which};
use qmbmw::qma::{self, Qma};
use qmbmw::report::{Report, Status};
use qmbmw::rmatrix::{self, BmwRMatrix, Family};
use qmbmw::scalars::{sample_q, F0, F1};
use qmbmw::twistmaps::{self, make_pair, CompatiblePair};
use qmbmw::{Field, Rational, TensorOperator};

type Op = TensorOperator<Rational>;

const SEED: u64 = 20240611;

struct Outcome {
    ok: bool,
    detail: String,
}

fn summarize(label: &str, r: &Report) -> (bool, String) {
    let s = r.summary();
    let mut d = format!(
        "{label}: {}/{} pass, {} skipped",
        s.pass, s.total, s.skipped
    );
    if let Some(f) = r.failures().next() {
        d.push_str(&format!(
            ", first failure {}/{}: {}",
            f.suite,
            f.check,
            f.witness.clone().unwrap_or_default()
        ));
    }
    (s.fail == 0 && s.pass > 0, d)
}

struct Acc {
    ok: bool,
    parts: Vec<String>,
}

impl Acc {
    fn new() -> Self {
        Acc {
            ok: true,
            parts: Vec::new(),
        }
    }
    fn report(&mut self, label: &str, r: &Report) {
        let (ok, d) = summarize(label, r);
        self.ok &= ok;
        self.parts.push(d);
    }
    fn assert(&mut self, ok: bool, what: String) {
        self.ok &= ok;
        if !ok {
            self.parts.push(format!("FAILED {what}"));
        }
    }
    fn note(&mut self, s: String) {
        self.parts.push(s);
    }
    fn done(self) -> Outcome {
        Outcome {
            ok: self.ok,
            detail: self.parts.join("; "),
        }
    }
}

fn q75() -> Rational {
    Rational::new(7, 5).unwrap()
}

fn families() -> [(Family, usize); 2] {
    [(Family::Orthogonal, 3), (Family::Symplectic, 4)]
}

fn pairs<'a, S: Field>(b: &'a BmwRMatrix<S>) -> Vec<CompatiblePair<'a, S>> {
    vec![
        make_pair(b, b.p(), "P").unwrap(),
        make_pair(b, b.r.clone(), "R").unwrap(),
    ]
}

fn criterion1() -> Outcome {
    let mut acc = Acc::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (fam, n) in families() {
        let mut qs = Vec::new();
        while qs.len() < 5 {
            let q = sample_q(&mut rng, |q| {
                rmatrix::make_standard_r(fam, n, &Rational(q.clone())).is_ok()
            });
            if !qs.contains(&q) {
                qs.push(q);
            }
        }
        for q in qs {
            let t = Instant::now();
            let b = rmatrix::make_standard_r(fam, n, &Rational(q.clone())).unwrap();
            let mut r = rmatrix::verify_bmw_type(&b);
            r.extend(rmatrix::verify_k_identities(&b, 3));
            let secs = t.elapsed().as_secs_f64();
            acc.report(&format!("{} q={q} ({secs:.1}s)", b.label()), &r);
        }
    }
    acc.done()
}

fn criterion2() -> Outcome {
    let mut acc = Acc::new();
    for (fam, n) in families() {
        let b = rmatrix::make_standard_r(fam, n, &q75()).unwrap();
        let rep = Representation::new(&b);
        let p22 = bmwrep::verify_proposition22(&rep, 4);
        for name in [
            "resolution",
            "recursions-agree-a2",
            "recursions-agree-s2",
            "recursions-agree-s3",
            "recursions-agree-s4",
        ] {
            acc.assert(
                p22.find(name).is_some_and(|r| r.status == Status::Pass),
                format!("{} {name} passes", b.label()),
            );
        }
        acc.report(&format!("{} idempotent checks nMax=4", b.label()), &p22);
        acc.report(
            &format!("{} morphisms nMax=3", b.label()),
            &bmwrep::verify_morphisms(&rep, 3),
        );
    }
    acc.done()
}

fn criterion3() -> Outcome {
    let mut acc = Acc::new();
    for (fam, n) in families() {
        let b = rmatrix::make_standard_r(fam, n, &q75()).unwrap();
        let rep = Representation::new(&b);
        let r = bmwrep::verify_appendices(&rep, 2);
        acc.assert(
            r.records
                .iter()
                .any(|c| c.check.starts_with("primitivity") && c.status == Status::Pass),
            format!("{} primitivity checked", b.label()),
        );
        acc.report(&format!("{} appendices jMax=2", b.label()), &r);
    }
    acc.done()
}

fn criterion4() -> Outcome {
    let mut acc = Acc::new();
    for (fam, n) in families() {
        let b = rmatrix::make_standard_r(fam, n, &q75()).unwrap();
        for pair in pairs(&b) {
            let mut r = twistmaps::verify_twist_calculus(&pair, SEED);
            r.extend(twistmaps::verify_operator_g(&pair));
            r.extend(twistmaps::verify_maps(&pair, SEED));
            acc.report(&format!("{} F={}", b.label(), pair.f_label), &r);
        }
    }
    acc.done()
}

fn criterion5() -> Outcome {
    let mut acc = Acc::new();
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q75()).unwrap();
    for pair in pairs(&b) {
        let alg = Qma::new(&pair, 2).unwrap();
        let dims = alg.red.graded_dims().to_vec();
        let report = qma::verify_qma(&alg, SEED);
        for check in ["graded-dim-1", "graded-dim-2-rank", "graded-dim-2-spectral"] {
            acc.assert(
                report.find(check).is_some_and(|r| r.status == Status::Pass),
                format!("F={} {check}", pair.f_label),
            );
        }
        if pair.f_label == "P" {
            let ra = alg.rep.idempotent(IdemKind::Anti, 2).unwrap().rank();
            let rs = alg.rep.idempotent(IdemKind::Sym, 2).unwrap().rank();
            acc.assert(
                (ra, rs) == (3, 5),
                format!("spectral ranks (r_a, r_s) = ({ra}, {rs}), expected (3, 5)"),
            );
            acc.assert(
                dims[2] == 35,
                format!("F=P degree-2 dimension {} = 35", dims[2]),
            );
        }
        acc.note(format!("F={} graded dims {dims:?}", pair.f_label));
    }
    acc.done()
}

fn criterion6() -> Outcome {
    let mut acc = Acc::new();
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q75()).unwrap();
    for pair in pairs(&b) {
        let t = Instant::now();
        let alg = Qma::new(&pair, 3).unwrap();
        let r = qma::verify_newton_wronski(&alg, 3);
        for check in [
            "recursive-a-2",
            "recursive-a-3",
            "recursive-s-2",
            "recursive-s-3",
            "closed-form-newton-2",
            "closed-form-wronski-2",
        ] {
            acc.assert(
                r.find(check).is_some_and(|c| c.status == Status::Pass),
                format!("F={} {check}", pair.f_label),
            );
        }
        acc.report(
            &format!(
                "rational F={} nMax=3 ({:.1}s)",
                pair.f_label,
                t.elapsed().as_secs_f64()
            ),
            &r,
        );
    }
    // nMax = 4 under two primes with agreement
    for label in ["P", "R"] {
        let t = Instant::now();
        let r0 = modular_newton::<F0>(label);
        let r1 = modular_newton::<F1>(label);
        let agree = r0.records.len() == r1.records.len()
            && r0
                .records
                .iter()
                .zip(&r1.records)
                .all(|(a, b)| a.check == b.check && a.status == b.status);
        acc.assert(agree, format!("F={label} statuses agree across primes"));
        acc.report(
            &format!(
                "modular F={label} nMax=4 ({:.1}s)",
                t.elapsed().as_secs_f64()
            ),
            &r0,
        );
    }
    acc.done()
}

fn modular_newton<S: Field>(label: &str) -> Report {
    let q = S::from_rational(q75().inner()).unwrap();
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q).unwrap();
    let f = if label == "P" { b.p() } else { b.r.clone() };
    let pair = make_pair(&b, f, label).unwrap();
    let alg = Qma::new(&pair, 4).unwrap();
    qma::verify_newton_wronski(&alg, 4)
}

fn criterion7() -> Outcome {
    let mut acc = Acc::new();
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q75()).unwrap();
    let (rek1, rek2) = qma::lemma51_instances(4, 3);
    for pair in pairs(&b) {
        let t = Instant::now();
        let alg = Qma::new(&pair, 4).unwrap();
        let r = qma::verify_lemma51(&alg, 3);
        for (m, i) in &rek1 {
            for name in [format!("rek1-m{m}-i{i}"), format!("rek1-trace-m{m}-i{i}")] {
                acc.assert(
                    r.find(&name).is_some_and(|c| c.status == Status::Pass),
                    format!("F={} {name}", pair.f_label),
                );
            }
        }
        for (m, i) in &rek2 {
            for name in [format!("rek2-m{m}-i{i}"), format!("rek2-trace-m{m}-i{i}")] {
                acc.assert(
                    r.find(&name).is_some_and(|c| c.status == Status::Pass),
                    format!("F={} {name}", pair.f_label),
                );
            }
        }
        acc.report(
            &format!("F={} ({:.1}s)", pair.f_label, t.elapsed().as_secs_f64()),
            &r,
        );
    }
    acc.assert(
        rek1.len() == 6 && rek2.len() == 6,
        format!("instances {} + {}", rek1.len(), rek2.len()),
    );
    acc.done()
}

fn criterion8() -> Outcome {
    let mut acc = Acc::new();
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q75()).unwrap();
    for pair in pairs(&b) {
        let alg = Qma::new(&pair, 3).unwrap();
        let r = qma::verify_inversion_identities(&alg);
        acc.assert(
            r.summary().skipped == 0,
            format!("F={} no skipped inversion checks", pair.f_label),
        );
        acc.report(&format!("SO_q(3) F={}", pair.f_label), &r);
    }
    let q = F0::from_rational(q75().inner()).unwrap();
    let b = rmatrix::make_standard_r(Family::Symplectic, 4, &q).unwrap();
    for pair in pairs(&b) {
        let alg = Qma::new(&pair, 3).unwrap();
        acc.report(
            &format!("Sp_q(4) F={} mod p", pair.f_label),
            &qma::verify_inversion_identities(&alg),
        );
    }
    acc.done()
}

fn config(args: &[&str]) -> RunConfig {
    let cli = Cli::try_parse_from(args).unwrap();
    match cli.command {
        Command::Verify(a) => RunConfig::from_verify(&a).unwrap(),
        Command::Dump(a) => RunConfig::from_instance(&a.instance).unwrap(),
        Command::DumpR(a) => RunConfig::from_instance(&a).unwrap(),
    }
}

fn reimport(text: &str) -> Op {
    let op = Op::from_json_str(text).unwrap();
    assert_eq!(op.to_json_string(), text);
    op
}

fn criterion9() -> Outcome {
    let mut acc = Acc::new();
    let runs: [&[&str]; 2] = [
        &[
            "qmbmw",
            "verify",
            "--suite",
            "all",
            "--family",
            "so",
            "--dim",
            "3",
            "--q",
            "7/5",
            "--f-matrix",
            "R",
            "--max-degree",
            "2",
            "--seed",
            "17",
        ],
        &[
            "qmbmw",
            "verify",
            "--suite",
            "twist,qma",
            "--family",
            "sp",
            "--dim",
            "4",
            "--q",
            "-3/7",
            "--max-degree",
            "3",
            "--backend",
            "modular",
            "--seed",
            "5",
        ],
    ];
    for args in runs {
        let cfg = config(args);
        let a = cli::run_verify(&cfg).unwrap();
        let b = cli::run_verify(&cfg).unwrap();
        acc.assert(
            a.to_jsonl_without_timings() == b.to_jsonl_without_timings(),
            format!("byte-identical rerun of {args:?}"),
        );
        acc.assert(a.exit_code() == 0, format!("{args:?} passes"));
        acc.note(format!(
            "{} rerun identical ({} records)",
            cfg.suites.len(),
            a.report.records.len()
        ));
    }

    let so = [
        "qmbmw",
        "dump",
        "--family",
        "so",
        "--dim",
        "3",
        "--q",
        "7/5",
        "--f-matrix",
        "R",
        "--which",
        "R",
    ];
    let cfg = config(&so);
    let b = rmatrix::make_standard_r(Family::Orthogonal, 3, &q75()).unwrap();
    let dump = |w: Which, o: Option<usize>| cli::dump_operator(&cfg, w, o).unwrap();

    let r = reimport(&dump(Which::R, None));
    acc.assert(r == b.r, "R re-imports bit-exactly".into());
    let again = rmatrix::verify_operator(Family::Imported, &r, &q75());
    acc.report("re-imported R", &again);
    let derived = BmwRMatrix::derive(Family::Imported, r, &q75()).unwrap();

    let k = reimport(&dump(Which::K, None));
    acc.assert(k == derived.k, "K re-imports".into());
    acc.assert(
        b.r.compose(&k) == k.scale(b.mu()) && k.compose(&b.r) == k.scale(b.mu()),
        "RK = KR = μK after re-import".into(),
    );
    let psi = reimport(&dump(Which::PsiR, None));
    acc.assert(
        psi == derived.psi && rmatrix::skew_inverse(&b.r).unwrap() == psi,
        "Ψ_R re-imports and is the skew inverse".into(),
    );
    let e = reimport(&dump(Which::E, None));
    acc.assert(
        e == derived.e && e.compose(&derived.einv) == Op::identity(3, 1),
        "E re-imports and E·E⁻¹ = I".into(),
    );
    let g = reimport(&dump(Which::G, None));
    let pair = make_pair(&derived, derived.r.clone(), "R").unwrap();
    acc.assert(g == pair.operator_g().unwrap().0, "G re-imports".into());

    let rep = Representation::new(&derived);
    for n in 1..=4 {
        for (w, kind) in [(Which::AN, IdemKind::Anti), (Which::SN, IdemKind::Sym)] {
            let x = reimport(&dump(w, Some(n)));
            acc.assert(
                x == *rep.idempotent(kind, n).unwrap(),
                format!("{w:?} order {n} re-imports"),
            );
            acc.assert(
                x.compose(&x) == x,
                format!("{w:?} order {n} idempotent after re-import"),
            );
        }
    }
    for n in 1..=2 {
        let c = reimport(&dump(Which::C2N, Some(n)));
        acc.assert(
            c.compose(&c) == c,
            format!("c^({}) idempotent after re-import", 2 * n),
        );
    }
    acc.assert(
        cli::dump_operator(&cfg, Which::AN, Some(5)).is_err(),
        "order above maxOrder is a config error".into(),
    );

    let m = config(&[
        "qmbmw",
        "dump-r",
        "--family",
        "sp",
        "--dim",
        "4",
        "--q",
        "7/5",
        "--backend",
        "modular",
    ]);
    if m.backend == cli::Backend::Modular {
        let text = cli::dump_operator(&m, Which::R, None).unwrap();
        let op = TensorOperator::<F0>::from_json_str(&text).unwrap();
        acc.assert(
            op.to_json_string() == text,
            "modular dump re-imports bit-exactly".into(),
        );
        let bm = BmwRMatrix::derive(
            Family::Imported,
            op,
            &F0::from_rational(q75().inner()).unwrap(),
        )
        .unwrap();
        acc.report("re-imported modular R", &rmatrix::verify_bmw_type(&bm));
    }
    acc.done()
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 BMW-type axioms", criterion1),
        ("2 idempotent calculus", criterion2),
        ("3 contractor appendices", criterion3),
        ("4 twist calculus", criterion4),
        ("5 graded dimensions", criterion5),
        ("6 Newton and Wronski relations", criterion6),
        ("7 descendant recursions", criterion7),
        ("8 inversion identities", criterion8),
        ("9 determinism and round-trip", criterion9),
    ];
    let outcomes: Vec<(&str, Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(name, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let o = std::panic::catch_unwind(f).unwrap_or_else(|e| Outcome {
                        ok: false,
                        detail: format!(
                            "panicked: {}",
                            e.downcast_ref::<String>()
                                .cloned()
                                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                                .unwrap_or_default()
                        ),
                    });
                    (*name, o, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut all = true;
    for (name, o, secs) in &outcomes {
        all &= o.ok;
        println!(
            "criterion {name}: {} ({secs:.1}s) {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
