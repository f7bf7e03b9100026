//! Acceptance suite. Runs as a plain binary so that every criterion prints
//! its verdict line whether or not it passes.

use std::time::{Duration, Instant};

use cartan_grids::cli::{self, Document};
use cartan_grids::grids::{
    hermitian_grid, hermitian_to_matrix_units, random_signed_permutation, rectangular_grid, spin_grid,
    spin_system, spin_to_spin_system, symplectic_grid, symplectic_to_matrix_units, verify_grid, Grid,
    MatrixUnits,
};
use cartan_grids::hnk::{
    build_hnk, diag_hnk, diag_rect, hnk_projection, peirce_split, projection_report, random_matrix,
    rect_split, trace_formula_check, verify_hnk, verify_hnk_uij, HnkSpace,
};
use cartan_grids::numlin::{ExactMatrix, ExactScalar};
use cartan_grids::opspace::cb_separation;
use cartan_grids::report::{CheckStatus, VerificationReport};
use cartan_grids::triple::triple_product;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("{what} took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn construct(args: &[&str]) -> Result<Document, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = ["cartan-grids", "--format", "json", "construct"].into_iter().chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    ensure(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn reproduce(args: &[&str], want: &[ExactMatrix]) -> Outcome {
    let start = Instant::now();
    let doc = construct(args)?;
    let got = doc.matrices().map_err(|e| e.to_string())?;
    within(start.elapsed(), 1.0, "construction")?;
    ensure(got.len() == want.len(), || format!("{} matrices, expected {}", got.len(), want.len()))?;
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        ensure(g == w, || format!("u_{} differs:\n{g:?}\nexpected\n{w:?}", i + 1))?;
    }
    Ok(format!("{} matrices identical in {:.0} ms", want.len(), start.elapsed().as_secs_f64() * 1e3))
}

fn criterion_1() -> Outcome {
    reproduce(
        &["hnk", "--n", "3", "--k", "2"],
        &[
            ExactMatrix::from_ints(&[&[0, 0, 0], &[0, 0, 1], &[0, -1, 0]]),
            ExactMatrix::from_ints(&[&[0, 0, -1], &[0, 0, 0], &[1, 0, 0]]),
            ExactMatrix::from_ints(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]),
        ],
    )
}

fn criterion_2() -> Outcome {
    reproduce(
        &["hnk", "--n", "4", "--k", "3"],
        &[
            ExactMatrix::from_ints(&[
                &[0, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 1],
                &[0, 0, 0, 0, -1, 0],
                &[0, 0, 0, 1, 0, 0],
            ]),
            ExactMatrix::from_ints(&[
                &[0, 0, 0, 0, 0, -1],
                &[0, 0, 0, 0, 0, 0],
                &[0, 0, 1, 0, 0, 0],
                &[0, -1, 0, 0, 0, 0],
            ]),
            ExactMatrix::from_ints(&[
                &[0, 0, 0, 0, 1, 0],
                &[0, 0, -1, 0, 0, 0],
                &[0, 0, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0, 0],
            ]),
            ExactMatrix::from_ints(&[
                &[0, 0, 0, -1, 0, 0],
                &[0, 1, 0, 0, 0, 0],
                &[-1, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 0],
            ]),
        ],
    )
}

fn support_sums(space: &HnkSpace) -> (ExactMatrix, ExactMatrix) {
    let (r, c) = space.shape();
    let mut left = ExactMatrix::zeros(r, r);
    let mut right = ExactMatrix::zeros(c, c);
    for u in space.basis() {
        left = &left + &(u * &u.adjoint());
        right = &right + &(&u.adjoint() * u);
    }
    (left, right)
}

fn criterion_3() -> Outcome {
    let s = cb_separation(3, 2).map_err(|e| e.to_string())?;
    ensure((s.row.norm - 2f64.sqrt()).abs() <= 1e-9, || format!("row norm {}", s.row.norm))?;
    ensure((s.row.image_norm - 3f64.sqrt()).abs() <= 1e-9, || format!("image norm {}", s.row.image_norm))?;
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for n in 1..=6 {
        for k in 1..=n {
            cases += 1;
            let space = build_hnk(n, k).map_err(|e| e.to_string())?;
            let (left, right) = support_sums(&space);
            let (r, c) = space.shape();
            let kk = ExactScalar::from_int(k as i64);
            let ll = ExactScalar::from_int((n - k + 1) as i64);
            if left != ExactMatrix::identity(r).scale(&kk) || right != ExactMatrix::identity(c).scale(&ll) {
                mismatches.push(format!("({n},{k}) support sums"));
            }
            let sep = cb_separation(n, k).map_err(|e| e.to_string())?;
            let expect = [
                (sep.row.norm, (k as f64).sqrt()),
                (sep.col.norm, ((n - k + 1) as f64).sqrt()),
                (sep.row.image_norm, (n as f64).sqrt()),
                (sep.col.image_norm, (n as f64).sqrt()),
            ];
            if expect.iter().any(|(got, want)| (got - want).abs() > 1e-9) || !sep.report.passed() {
                mismatches.push(format!("({n},{k}) norms {expect:?}"));
            }
        }
    }
    ensure(mismatches.is_empty(), || mismatches.join("; "))?;
    Ok(format!(
        "H_3^2: {:.8} and {:.8}; {cases} (n,k) pairs match sqrt(k), sqrt(n-k+1) with exact support sums",
        s.row.norm, s.row.image_norm
    ))
}

fn rank_one_triple_identities(space: &HnkSpace) -> Result<usize, String> {
    let n = space.n();
    let u: Vec<&ExactMatrix> = space.basis().collect();
    let zero = ExactMatrix::zeros(space.shape().0, space.shape().1);
    let half = ExactScalar::half();
    let mut checked = 0;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let t = |x: &ExactMatrix, y: &ExactMatrix, z: &ExactMatrix| triple_product(x, y, z).unwrap();
            ensure(t(u[a], u[a], u[b]) == u[b].scale(&half), || format!("{{u{a} u{a} u{b}}}"))?;
            ensure(t(u[a], u[b], u[a]) == zero, || format!("{{u{a} u{b} u{a}}}"))?;
            checked += 2;
            for c in 0..n {
                if c != a && c != b {
                    ensure(t(u[a], u[b], u[c]) == zero, || format!("{{u{a} u{b} u{c}}}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// Largest residual among checks that count toward the verdict.
fn exact_residual(report: &VerificationReport) -> f64 {
    report
        .checks
        .iter()
        .filter(|c| c.status != CheckStatus::Flagged)
        .map(|c| c.residual)
        .fold(0.0, f64::max)
}

fn grid_passes(name: String, g: &Grid, failures: &mut Vec<String>) {
    let report = verify_grid(g);
    if !report.passed() || exact_residual(&report) != 0.0 {
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        failures.push(format!("{name}: {}", failed.join(", ")));
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut grids = 0;
    let mut identities = 0;
    let ok = |r: cartan_grids::Result<Grid>| r.map_err(|e| e.to_string());
    for p in 1..=4 {
        for q in 1..=4 {
            grid_passes(format!("rectangular {p}x{q}"), &ok(rectangular_grid(p, q))?, &mut failures);
            grids += 1;
        }
    }
    for m in 2..=6 {
        grid_passes(format!("hermitian {m}"), &ok(hermitian_grid(m))?, &mut failures);
        grids += 1;
    }
    for m in 4..=6 {
        grid_passes(format!("symplectic {m}"), &ok(symplectic_grid(m))?, &mut failures);
        grids += 1;
    }
    for r in 2..=4 {
        for odd in [false, true] {
            grid_passes(format!("spin r={r} odd={odd}"), &ok(spin_grid(r, odd))?, &mut failures);
            grids += 1;
        }
    }
    for n in 1..=6 {
        for k in 1..=n {
            let space = build_hnk(n, k).map_err(|e| e.to_string())?;
            grid_passes(format!("H_{n}^{k}"), &space.grid().map_err(|e| e.to_string())?, &mut failures);
            grids += 1;
            let indices = space.realization().indices().map_err(|e| e.to_string())?;
            if indices != (k, n - k + 1) {
                failures.push(format!("H_{n}^{k} indices {indices:?}"));
            }
            match rank_one_triple_identities(&space) {
                Ok(c) => identities += c,
                Err(e) => failures.push(format!("H_{n}^{k} {e}")),
            }
            let report = verify_hnk(&space).map_err(|e| e.to_string())?;
            if !report.passed() {
                failures.push(format!("verify_hnk({n},{k})"));
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    within(start.elapsed(), 60.0, "grid axioms")?;
    Ok(format!(
        "{grids} grids with zero residual, {identities} triple identities, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut flagged = 0;
    for n in 1..=5 {
        for k in 1..=n {
            let space = build_hnk(n, k).map_err(|e| e.to_string())?;
            let report = verify_hnk_uij(&space).map_err(|e| e.to_string())?;
            checks += report.checks.len();
            flagged += report.flagged().count();
            for c in report.failures() {
                failures.push(format!("({n},{k}) {}: {}", c.name, c.detail));
            }
            for name in ["u_c = sum of disjoint u_IJ", "decomposition into ones", "e(IJ) u_IJ = E_JI"] {
                if !report.checks.iter().any(|c| c.name.starts_with(name)) {
                    failures.push(format!("({n},{k}) missing check {name}"));
                }
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    within(start.elapsed(), 120.0, "u_IJ calculus")?;
    Ok(format!(
        "15 spaces, {checks} exact checks, {flagged} flagged, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn units_are_standard(mu: &MatrixUnits, left: &ExactMatrix, right: &ExactMatrix) -> bool {
    (1..=mu.m).all(|i| {
        (1..=mu.m).all(|j| mu.e(i, j) == &(&(left * &ExactMatrix::unit(mu.m, mu.m, i - 1, j - 1)) * right))
    })
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut conjugations = 0;
    for m in [5, 6] {
        for (name, g, transform) in [
            ("hermitian", hermitian_grid(m), hermitian_to_matrix_units as fn(&Grid) -> _),
            ("symplectic", symplectic_grid(m), symplectic_to_matrix_units),
        ] {
            let g = g.map_err(|e| e.to_string())?;
            let id = ExactMatrix::identity(m);
            let mu = transform(&g).map_err(|e| e.to_string())?;
            if !mu.report.passed() || exact_residual(&mu.report) != 0.0 || !units_are_standard(&mu, &id, &id) {
                failures.push(format!("{name} {m} canonical"));
            }
            for _ in 0..20 {
                let left = random_signed_permutation(m, &mut rng);
                let right = random_signed_permutation(m, &mut rng);
                let conj = g.conjugate(&left, &right).map_err(|e| e.to_string())?;
                conjugations += 1;
                match transform(&conj) {
                    Ok(mu) if mu.report.passed() && units_are_standard(&mu, &left, &right) => {}
                    _ => failures.push(format!("{name} {m} conjugation {conjugations}")),
                }
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("canonical units exact for m = 5, 6; {conjugations} conjugations natural"))
}

fn criterion_7() -> Outcome {
    let mut pairs = 0;
    for k in 2..=8 {
        let s = spin_system(k).map_err(|e| e.to_string())?;
        let d = s[0].rows();
        let two = ExactMatrix::identity(d).scale(&ExactScalar::from_int(2));
        for i in 0..k {
            for j in 0..k {
                let anti = &(&s[i] * &s[j]) + &(&s[j] * &s[i]);
                let want = if i == j { two.clone() } else { ExactMatrix::zeros(d, d) };
                ensure(anti == want, || format!("k={k}: s_{} s_{} anticommutator", i + 1, j + 1))?;
                pairs += 1;
            }
        }
    }
    let mut transforms = 0;
    for r in 2..=4 {
        for odd in [false, true] {
            let g = spin_grid(r, odd).map_err(|e| e.to_string())?;
            let t = spin_to_spin_system(&g).map_err(|e| e.to_string())?;
            ensure(t.report.passed() && exact_residual(&t.report) == 0.0, || {
                format!("spin grid r={r} odd={odd}: {}", t.report)
            })?;
            transforms += 1;
        }
    }
    Ok(format!("{pairs} anticommutators exact for k <= 8; {transforms} spin grids transformed"))
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut flagged = 0;
    for n in 1..=6 {
        for k in 1..=n {
            let space = build_hnk(n, k).map_err(|e| e.to_string())?;
            let report = projection_report(&space, 1000, &mut rng).map_err(|e| e.to_string())?;
            if !report.passed() {
                failures.push(format!("projection ({n},{k})"));
            }
            let (r, c) = space.shape();
            for _ in 0..20 {
                let x = random_matrix(r, c, &mut rng);
                let px = hnk_projection(&space, &x).map_err(|e| e.to_string())?;
                let ppx = hnk_projection(&space, &px).map_err(|e| e.to_string())?;
                let ratio = px.operator_norm().unwrap() / x.operator_norm().unwrap();
                worst = worst.max(ratio);
                if ppx.sub(&px).unwrap().max_abs() > 1e-12 || ratio > 1.0 + 1e-9 {
                    failures.push(format!("({n},{k}) sample ratio {ratio}"));
                }
            }
            let a: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let t = trace_formula_check(&space, &a).map_err(|e| e.to_string())?;
            let a_norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let m = space.multiplicity() as f64;
            if !t.report.passed() || (t.lhs - m * a_norm).abs() > 1e-9 * m * a_norm.max(1.0) {
                failures.push(format!("trace ({n},{k}) {} vs {}", t.lhs, m * a_norm));
            }
            if (t.literal_rhs - m.sqrt() * a_norm).abs() > 1e-12 {
                failures.push(format!("literal value ({n},{k})"));
            }
            flagged += t.report.flagged().count();
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!(
        "21 spaces idempotent and contractive (max ratio {worst:.12}); trace norm = m|a|, literal m^(1/2)|a| flagged {flagged} times"
    ))
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    for (n, ks) in [(3, vec![2, 1]), (4, vec![3, 1])] {
        let d = diag_hnk(n, &ks).map_err(|e| e.to_string())?;
        let s = peirce_split(&d).map_err(|e| e.to_string())?;
        ensure(s.report.passed(), || format!("split {n} {ks:?}: {}", s.report))?;
        let q = s.q_part.as_ref().ok_or_else(|| format!("split {n} {ks:?} has no remainder"))?;
        let (ip, _) = s.p_part.indices().map_err(|e| e.to_string())?;
        let (iq, _) = q.indices().map_err(|e| e.to_string())?;
        ensure(ip > iq, || format!("i_R {ip} then {iq}"))?;
        for (part, idx) in [(&s.p_part, ip), (q, iq)] {
            let report = verify_grid(&part.grid().map_err(|e| e.to_string())?);
            ensure(report.passed(), || format!("part with i_R {idx}: {report}"))?;
        }
        for a in s.p_part.matrices() {
            for b in q.matrices() {
                ensure((&a * &b.adjoint()).is_zero() && (&a.adjoint() * &b).is_zero(), || {
                    "parts not orthogonal".to_string()
                })?;
            }
        }
        notes.push(format!("Diag({n};{ks:?}) i_R {ip} > {iq}"));
    }
    for (p, q) in [(2, 2), (3, 2)] {
        let g = diag_rect(p, q).map_err(|e| e.to_string())?;
        let s = rect_split(&g).map_err(|e| e.to_string())?;
        ensure(s.report.passed() && exact_residual(&s.report) == 0.0, || format!("rect ({p},{q}): {}", s.report))?;
        notes.push(format!("Diag(B({p},{q}),B({q},{p})) split"));
    }
    Ok(notes.join(", "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("H_3^2 basis reproduction", criterion_1),
        ("H_4^3 basis reproduction", criterion_2),
        ("cb witnesses", criterion_3),
        ("grid axioms", criterion_4),
        ("u_IJ calculus", criterion_5),
        ("matrix-unit transforms", criterion_6),
        ("spin systems", criterion_7),
        ("projection and trace norm", criterion_8),
        ("splittings", criterion_9),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(e) => {
                all = false;
                println!("criterion {}: FAIL  {name}: {e}", i + 1);
            }
        }
    }
    if all {
        println!("criterion 10: PASS  finite shadows: criteria 1-9 hold at desk scale");
    } else {
        println!("criterion 10: FAIL  finite shadows: some of criteria 1-9 failed");
        std::process::exit(1);
    }
}
