//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured runtime. Tolerances are pinned in the assertions.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cyclogaudin::autom::{build_automorphism, AutoSpec, AutoTable};
use cyclogaudin::bethe::{canonicalize, solve, SolveOptions};
use cyclogaudin::eig::{cluster_eigenvalues, complex_eigenvalues};
use cyclogaudin::exact::{rat, Cyclo, CycloCtx, Rational};
use cyclogaudin::hamiltonians::{
    build_h, commutator_check, double_pole_identity, resummed_h_check, u_pole_cancellation_check,
    validate_model, Model, ModuleKind,
};
use cyclogaudin::lie::{Gen, LieAlgebra, LieElement, Series, Weight};
use cyclogaudin::linalg;
use cyclogaudin::ratfun::{gamma_orbit_sum, residue_pairing, split_global, AdjointSpace, GammaSpace, LaurentData};
use cyclogaudin::repn::{
    build_irrep, project_to_irrep, verma_act, verma_act_gen, TensorState, VermaState,
};
use cyclogaudin::weight_function::{
    build_psi, circle_lemma_sum, classical_degeneration_check, swapping_oracle, verify_eigenpair,
};
use cyclogaudin::bethe::untwisted_reduction_check;

fn report(criterion: usize, name: &str, pass: bool, started: Instant, budget_s: Option<f64>) {
    let dt = started.elapsed().as_secs_f64();
    println!(
        "ACCEPTANCE {criterion}: {} - {name} ({dt:.2}s{})",
        if pass { "PASS" } else { "FAIL" },
        budget_s.map(|b| format!(" / budget {b:.0}s")).unwrap_or_default()
    );
    assert!(pass, "criterion {criterion} failed: {name}");
    if let Some(b) = budget_s {
        assert!(dt < b, "criterion {criterion} exceeded its runtime budget: {dt:.2}s >= {b}s");
    }
}

fn sl3_flip(t: u32) -> (Arc<LieAlgebra>, Arc<CycloCtx>, Arc<AutoTable>) {
    let alg = LieAlgebra::build(Series::A, 2).unwrap();
    let ctx = CycloCtx::new(t);
    let auto = build_automorphism(
        &alg,
        &ctx,
        &AutoSpec { t, permutation: vec![1, 0], phases: vec![0, 0] },
    )
    .unwrap();
    (alg, ctx, auto)
}

fn sl3_example_exact(z1: Rational, z2: Rational, kind: ModuleKind) -> Model<Cyclo> {
    let (alg, ctx, auto) = sl3_flip(2);
    let w = Weight::fundamental(2, 0);
    validate_model::<Cyclo>(
        &alg,
        &auto,
        vec![Cyclo::from_rational(&ctx, &z1), Cyclo::from_rational(&ctx, &z2)],
        vec![w.clone(), w],
        vec![kind, kind],
    )
    .unwrap()
}

fn sl3_example_complex(z1: f64, z2: f64, kind: ModuleKind) -> Model<Complex64> {
    let (alg, _ctx, auto) = sl3_flip(2);
    let w = Weight::fundamental(2, 0);
    validate_model::<Complex64>(
        &alg,
        &auto,
        vec![Complex64::new(z1, 0.0), Complex64::new(z2, 0.0)],
        vec![w.clone(), w],
        vec![kind, kind],
    )
    .unwrap()
}

#[test]
fn criterion_1_sl3_spectrum() {
    let started = Instant::now();
    let (z1, z2) = (1.0f64, 2.0f64);
    let model = sl3_example_complex(z1, z2, ModuleKind::Irrep);
    let irreps = model.irreps(64).unwrap();
    let h1 = build_h(&model, 0).matrix(&model.sctx, &irreps);
    let clusters = cluster_eigenvalues(&complex_eigenvalues(&h1), 1e-8);
    let den = 3.0 * z1.powi(3) - 3.0 * z1 * z2 * z2;
    let closed = [
        ((z2 * z2 + z1 * z2 + 2.0 * z1 * z1) / den, 5usize),
        ((z2 * z2 - 5.0 * z1 * z2 - 4.0 * z1 * z1) / den, 3),
        ((z2 * z2 + 10.0 * z1 * z2 - 7.0 * z1 * z1) / den, 1),
    ];
    let mut pass = clusters.len() == 3;
    for (value, mult) in closed {
        pass &= clusters
            .iter()
            .any(|(c, m)| (*c - Complex64::new(value, 0.0)).norm() < 1e-9 && *m == mult);
    }
    report(1, "sl3 diagram-flip spectrum with multiplicities 5,3,1", pass, started, Some(5.0));
}

#[test]
fn criterion_2_commutativity_matrix() {
    let started = Instant::now();
    let cases: Vec<(&str, Series, usize, AutoSpec, usize)> = vec![
        ("sl2 id T=1 N=3", Series::A, 1, AutoSpec::identity(1, 1), 3),
        (
            "sl3 flip T=2 N=2",
            Series::A,
            2,
            AutoSpec { t: 2, permutation: vec![1, 0], phases: vec![0, 0] },
            2,
        ),
        ("sl3 inner(1,0) T=3 N=2", Series::A, 2, AutoSpec::inner(vec![1, 0], 3), 2),
        (
            "sl4 flip T=2 N=2",
            Series::A,
            3,
            AutoSpec { t: 2, permutation: vec![2, 1, 0], phases: vec![0, 0, 0] },
            2,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut pass = true;
    for (name, series, rank, spec, n) in cases {
        let alg = LieAlgebra::build(series, rank).unwrap();
        let ctx = CycloCtx::new(spec.t);
        let auto = build_automorphism(&alg, &ctx, &spec).unwrap();
        let hw = Weight::fundamental(rank, 0);
        // 3 random exact-rational site configurations with disjoint orbits
        let mut models = Vec::new();
        while models.len() < 3 {
            let sites: Vec<Rational> = (0..n)
                .map(|_| rat(rng.random_range(1..40), rng.random_range(1..8)))
                .collect();
            let model = validate_model::<Cyclo>(
                &alg,
                &auto,
                sites.iter().map(|z| Cyclo::from_rational(&ctx, z)).collect(),
                vec![hw.clone(); n],
                vec![ModuleKind::Irrep; n],
            );
            if let Ok(m) = model {
                models.push(m);
            }
        }
        let irreps = models[0].irreps(64).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let cert = commutator_check(&models, &irreps, i, j);
                if !cert.exact_zero {
                    eprintln!("{name}: [H_{i}, H_{j}] != 0: {:?}", cert.first_failure);
                    pass = false;
                }
            }
        }
    }
    report(2, "[H_i, H_j] = 0 exactly across the model matrix", pass, started, Some(60.0));
}

#[test]
fn criterion_3_bethe_roots() {
    let started = Instant::now();
    let (z1, z2) = (1.0f64, 2.0f64);
    let model = sl3_example_complex(z1, z2, ModuleKind::Verma);
    let mut pass = true;

    let set1 = solve(&model, &[0], &SolveOptions::default());
    let (_, want1) = canonicalize(&model, &[0], &[Complex64::new((z1 + z2) / 2.0, 0.0)]);
    pass &= set1.solutions.len() == 1;
    pass &= set1
        .solutions
        .first()
        .map(|s| (s.canonical_roots[0] - want1[0]).norm() < 1e-10)
        .unwrap_or(false);

    let set2 = solve(&model, &[0, 1], &SolveOptions::default());
    let s = Complex64::new((z2 - 5.0 * z1) * (5.0 * z2 - z1), 0.0).sqrt();
    let w1 = (Complex64::new(z1 + z2, 0.0) - s) / Complex64::new(6.0, 0.0);
    let w2 = -(Complex64::new(z1 + z2, 0.0) + s) / Complex64::new(6.0, 0.0);
    let (_, want2) = canonicalize(&model, &[0, 1], &[w1, w2]);
    // twist-image duplicates must merge into exactly one canonical entry
    pass &= set2.solutions.len() == 1;
    pass &= set2
        .solutions
        .first()
        .map(|s| {
            s.canonical_roots
                .iter()
                .zip(&want2)
                .all(|(a, b)| (a - b).norm() < 1e-10)
        })
        .unwrap_or(false);

    report(3, "Bethe roots match the closed forms, twist images merged", pass, started, Some(5.0));
}

#[test]
fn criterion_4_bethe_vectors() {
    let started = Instant::now();
    let (z1, z2) = (1.0f64, 2.0f64);
    let mut pass = true;

    // m = 1 projected closed form (exact arithmetic at the rational root).
    let exact = sl3_example_exact(rat(1, 1), rat(2, 1), ModuleKind::Verma);
    let ctx = &exact.sctx;
    let alg = &exact.alg;
    let irr = build_irrep(alg, &Weight::fundamental(2, 0), 64).unwrap();
    let irreps = vec![irr.clone(), irr.clone()];
    let psi1 = build_psi(&exact, &[0], &[Cyclo::from_rational(ctx, &rat(3, 2))]);
    let got1 = project_to_irrep::<Cyclo>(ctx, &psi1, &irreps);
    let r1 = alg.simple_root_index(0);
    let vac = VermaState::<Cyclo>::highest(ctx, Weight::fundamental(2, 0));
    let f1v = verma_act_gen::<Cyclo>(alg, ctx, Gen::F(r1), &vac);
    let want_state = TensorState::from_factors(ctx, &[f1v.clone(), vac.clone()])
        .sub(&TensorState::from_factors(ctx, &[vac.clone(), f1v.clone()]))
        .scale(&Cyclo::from_rational(ctx, &(rat(2, 1) / (rat(2, 1) - rat(1, 1)))));
    let want1 = project_to_irrep::<Cyclo>(ctx, &want_state, &irreps);
    pass &= got1 == want1;

    // m = 2 projected closed form at the irrational roots (complex).
    let cmodel = sl3_example_complex(z1, z2, ModuleKind::Verma);
    let cctx = &cmodel.sctx;
    let s = Complex64::new((z2 - 5.0 * z1) * (5.0 * z2 - z1), 0.0).sqrt();
    let w1 = (Complex64::new(z1 + z2, 0.0) - s) / Complex64::new(6.0, 0.0);
    let w2 = -(Complex64::new(z1 + z2, 0.0) + s) / Complex64::new(6.0, 0.0);
    let psi2 = build_psi(&cmodel, &[0, 1], &[w1, w2]);
    let got2 = project_to_irrep::<Complex64>(cctx, &psi2, &irreps);
    let r2 = alg.simple_root_index(1);
    let cvac = VermaState::<Complex64>::highest(cctx, Weight::fundamental(2, 0));
    let cf1 = verma_act_gen::<Complex64>(alg, cctx, Gen::F(r1), &cvac);
    let cf21 = verma_act_gen::<Complex64>(alg, cctx, Gen::F(r2), &cf1);
    let c9 = Complex64::new(9.0 / (z1 + z2).powi(2), 0.0);
    let want2s = TensorState::from_factors(cctx, &[cf21.clone(), cvac.clone()])
        .add(&TensorState::from_factors(cctx, &[cvac.clone(), cf21]))
        .sub(&TensorState::from_factors(cctx, &[cf1.clone(), cf1]))
        .scale(&c9);
    let want2 = project_to_irrep::<Complex64>(cctx, &want2s, &irreps);
    let diff2 = got2
        .iter()
        .zip(&want2)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    pass &= diff2 < 1e-9;

    // Eigenpair residuals for m = 0, 1, 2; the m = 0 eigenvalue is the
    // multiplicity-5 eigenvalue of the spectrum.
    let mult5 = (z2 * z2 + z1 * z2 + 2.0 * z1 * z1) / (3.0 * z1.powi(3) - 3.0 * z1 * z2 * z2);
    for (colors, roots) in [
        (vec![], vec![]),
        (vec![0usize], vec![Complex64::new((z1 + z2) / 2.0, 0.0)]),
        (vec![0, 1], vec![w1, w2]),
    ] {
        for site in 0..2 {
            let rep = verify_eigenpair(&cmodel, &colors, &roots, site).unwrap();
            pass &= rep.residual_direct < 1e-8;
            if colors.is_empty() && site == 0 {
                pass &= (rep.eigenvalue - Complex64::new(mult5, 0.0)).norm() < 1e-12;
            }
        }
    }

    report(4, "projected Bethe vectors and eigenpair residuals", pass, started, None);
}

#[test]
fn criterion_5_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pass = true;

    for t in 1..=3u32 {
        // A fixed automorphism of order dividing T per level.
        let (alg, ctx, auto): (Arc<LieAlgebra>, Arc<CycloCtx>, Arc<AutoTable>) = match t {
            1 => {
                let alg = LieAlgebra::build(Series::A, 1).unwrap();
                let ctx = CycloCtx::new(1);
                let auto = build_automorphism(&alg, &ctx, &AutoSpec::identity(1, 1)).unwrap();
                (alg, ctx, auto)
            }
            2 => {
                let (a, c, au) = sl3_flip(2);
                (a, c, au)
            }
            _ => {
                let alg = LieAlgebra::build(Series::A, 2).unwrap();
                let ctx = CycloCtx::new(3);
                let auto = build_automorphism(&alg, &ctx, &AutoSpec::inner(vec![1, 0], 3)).unwrap();
                (alg, ctx, auto)
            }
        };
        let rank = alg.rank;
        for n in 1..=2usize {
            for m in 0..=3usize {
                for _config in 0..10 {
                    // Random rational sites/roots with pairwise disjoint
                    // Gamma-orbits (checked through T-th powers), random
                    // weights and colors.
                    let mut points: Vec<Rational> = Vec::new();
                    while points.len() < n + m {
                        let cand = rat(rng.random_range(1..60), rng.random_range(1..6))
                            * if rng.random_bool(0.5) { rat(1, 1) } else { rat(-1, 1) };
                        let mut power = rat(1, 1);
                        for _ in 0..t {
                            power *= cand.clone();
                        }
                        let distinct = points.iter().all(|p| {
                            let mut pp = rat(1, 1);
                            for _ in 0..t {
                                pp *= p.clone();
                            }
                            pp != power
                        });
                        if distinct {
                            points.push(cand);
                        }
                    }
                    let sites: Vec<Cyclo> = points[..n]
                        .iter()
                        .map(|p| Cyclo::from_rational(&ctx, p))
                        .collect();
                    let roots: Vec<Cyclo> = points[n..]
                        .iter()
                        .map(|p| Cyclo::from_rational(&ctx, p))
                        .collect();
                    let weights: Vec<Weight> = (0..n)
                        .map(|_| Weight {
                            fund: (0..rank)
                                .map(|_| rat(rng.random_range(0..5), 1))
                                .collect(),
                        })
                        .collect();
                    let colors: Vec<usize> =
                        (0..m).map(|_| rng.random_range(0..rank)).collect();
                    let model = validate_model::<Cyclo>(
                        &alg,
                        &auto,
                        sites,
                        weights,
                        vec![ModuleKind::Verma; n],
                    )
                    .unwrap();
                    let a = build_psi(&model, &colors, &roots);
                    let b = swapping_oracle(&model, &colors, &roots);
                    if a != b {
                        eprintln!("oracle mismatch at T={t} N={n} m={m} colors {colors:?}");
                        pass = false;
                    }
                }
            }
        }
    }
    report(5, "closed form == swapping oracle, exactly, on rational data", pass, started, Some(120.0));
}

#[test]
fn criterion_6_untwisted_degeneration() {
    let started = Instant::now();
    let mut pass = true;
    // sigma = id at T = 3, sl2, N = 2, against the classical model at z^3.
    let alg = LieAlgebra::build(Series::A, 1).unwrap();
    let ctx = CycloCtx::new(3);
    let auto = build_automorphism(&alg, &ctx, &AutoSpec::identity(1, 3)).unwrap();
    let hw = Weight::fundamental(1, 0);
    let model = validate_model::<Complex64>(
        &alg,
        &auto,
        vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
        vec![hw.clone(), hw.clone()],
        vec![ModuleKind::Verma, ModuleKind::Verma],
    )
    .unwrap();
    let ctx1 = CycloCtx::new(1);
    let auto1 = build_automorphism(&alg, &ctx1, &AutoSpec::identity(1, 1)).unwrap();
    let classical = validate_model::<Complex64>(
        &alg,
        &auto1,
        vec![Complex64::new(1.0, 0.0), Complex64::new(8.0, 0.0)],
        vec![hw.clone(), hw.clone()],
        vec![ModuleKind::Verma, ModuleKind::Verma],
    )
    .unwrap();
    // Residual transform within 1e-10 (and the exact 1/w~ cancellation).
    for root in [Complex64::new(0.7, 0.9), Complex64::new(-1.3, 0.4), Complex64::new(2.5, -1.1)] {
        pass &= untwisted_reduction_check(&model, &classical, &[0], &[root], 1e-10).is_ok();
    }
    // Resummed Hamiltonian identity, exact, on irreps.
    let exact_model = validate_model::<Cyclo>(
        &alg,
        &auto,
        vec![Cyclo::from_int(&ctx, 1), Cyclo::from_int(&ctx, 2)],
        vec![hw.clone(), hw.clone()],
        vec![ModuleKind::Irrep, ModuleKind::Irrep],
    )
    .unwrap();
    let irreps = exact_model.irreps(64).unwrap();
    pass &= resummed_h_check(&exact_model, &irreps, 0).is_ok();
    pass &= resummed_h_check(&exact_model, &irreps, 1).is_ok();
    // psi degeneration within 1e-10.
    for (colors, roots) in [
        (vec![0usize], vec![Complex64::new(0.7, 0.3)]),
        (vec![0, 0], vec![Complex64::new(0.7, 0.3), Complex64::new(-1.2, 0.5)]),
    ] {
        pass &= classical_degeneration_check(&model, &classical, &colors, &roots, 1e-10).is_ok();
    }
    report(6, "sigma = id degeneration to the classical Gaudin model", pass, started, None);
}

#[test]
fn criterion_7_exact_identities() {
    let started = Instant::now();
    let mut pass = true;

    // Cyclotomic sum identities for T = 2..8.
    for t in 2..=8u32 {
        let ctx = CycloCtx::new(t);
        let mut s = Cyclo::zero(&ctx);
        for k in 0..t {
            s = s.add(&Cyclo::omega_pow(&ctx, k as i64));
        }
        pass &= s.is_zero();
        let mut g = Cyclo::zero(&ctx);
        for r in 1..t {
            g = g.add(&Cyclo::one(&ctx).sub(&Cyclo::omega_pow(&ctx, r as i64)).inv().unwrap());
        }
        pass &= g.as_rational() == Some(rat(t as i64 - 1, 2));
        // orbit partial fractions at random rationals
        let w = Cyclo::from_rational(&ctx, &rat(9, 4));
        let z = Cyclo::from_rational(&ctx, &rat(-5, 7));
        let mut lhs = Cyclo::zero(&ctx);
        for r in 0..t {
            lhs = lhs.add(&w.sub(&Cyclo::omega_pow(&ctx, r as i64).mul(&z)).inv().unwrap());
        }
        let pow = |x: &Cyclo, e: u32| {
            let mut acc = Cyclo::one(&ctx);
            for _ in 0..e {
                acc = acc.mul(x);
            }
            acc
        };
        let rhs = pow(&w, t - 1)
            .scale(&rat(t as i64, 1))
            .div(&pow(&w, t).sub(&pow(&z, t)))
            .unwrap();
        pass &= lhs == rhs;
    }

    // Circle lemma for n <= 8 over 100 random rational tuples.
    let ctx1 = CycloCtx::new(1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = 2 + trial % 7;
        let mut pts: Vec<Cyclo> = Vec::new();
        while pts.len() < n {
            let c = Cyclo::from_rational(
                &ctx1,
                &rat(rng.random_range(-400..400), rng.random_range(1..40)),
            );
            if pts.iter().all(|p| !p.sub(&c).is_zero()) {
                pts.push(c);
            }
        }
        pass &= circle_lemma_sum::<Cyclo>(&ctx1, &pts).is_zero();
    }

    // The remaining identities run per automorphism in the test matrix.
    let autos: Vec<(Series, usize, AutoSpec)> = vec![
        (Series::A, 1, AutoSpec::identity(1, 1)),
        (Series::A, 2, AutoSpec { t: 2, permutation: vec![1, 0], phases: vec![0, 0] }),
        (Series::A, 2, AutoSpec::inner(vec![1, 0], 3)),
        (Series::A, 3, AutoSpec { t: 2, permutation: vec![2, 1, 0], phases: vec![0, 0, 0] }),
    ];
    for (series, rank, spec) in autos {
        let alg = LieAlgebra::build(series, rank).unwrap();
        let ctx = CycloCtx::new(spec.t);
        let auto = build_automorphism(&alg, &ctx, &spec).unwrap();
        // lambda_0 o Pi_0 = lambda_0, i.e. L_sigma lambda_0 = lambda_0.
        pass &= auto.l_sigma(&auto.lambda0, 1) == auto.lambda0;
        // Double-pole identity and the 1/u cancellation.
        let hw = Weight::fundamental(rank, 0);
        let model = validate_model::<Cyclo>(
            &alg,
            &auto,
            vec![Cyclo::from_int(&ctx, 1)],
            vec![hw],
            vec![ModuleKind::Irrep],
        )
        .unwrap();
        pass &= double_pole_identity(&model).is_ok();
        pass &= u_pole_cancellation_check(&model);

        // Residue theorem, only-if direction and reconstruction round trip.
        let sp = AdjointSpace::<Cyclo> { alg: alg.clone(), auto: auto.clone(), ctx: ctx.clone() };
        let x1 = Cyclo::from_int(&ctx, 1);
        let x2 = Cyclo::from_rational(&ctx, &rat(7, 2));
        let pair = |a: &LieElement<Cyclo>, b: &LieElement<Cyclo>| alg.form::<Cyclo>(&ctx, a, b);
        for k in 0..spec.t as i64 {
            let mut h = gamma_orbit_sum(
                spec.t,
                k,
                &sp,
                LieElement::gen(Gen::E(0), Cyclo::one(&ctx)),
                x1.clone(),
                2,
            );
            h.add_orbit(&sp, LieElement::gen(Gen::H(0), Cyclo::from_int(&ctx, 2)), x2.clone(), 1);
            let tuple: Vec<(Cyclo, LaurentData<LieElement<Cyclo>>)> = [&x1, &x2]
                .iter()
                .map(|x| ((*x).clone(), h.expand_at(&ctx, &sp, x, 3)))
                .collect();
            for g0 in [Gen::E(0), Gen::F(0), Gen::H(rank - 1)] {
                let g = gamma_orbit_sum(
                    spec.t,
                    -k - 1,
                    &sp,
                    LieElement::gen(g0, Cyclo::one(&ctx)),
                    x2.clone(),
                    2,
                );
                pass &= residue_pairing::<Cyclo, AdjointSpace<Cyclo>, AdjointSpace<Cyclo>, _>(
                    &ctx, &sp, &tuple, None, &g, pair,
                )
                .is_zero();
            }
            let (global, taylors) = split_global(&ctx, &sp, spec.t, k, &tuple);
            for (i, (x, data)) in tuple.iter().enumerate() {
                let expansion = global.expand_at(&ctx, &sp, x, 3);
                for (j, c) in data {
                    let gpart = expansion
                        .iter()
                        .find(|(jj, _)| jj == j)
                        .map(|(_, cc)| cc.clone())
                        .unwrap_or_else(|| sp.zero());
                    let tpart = taylors[i]
                        .iter()
                        .find(|(jj, _)| jj == j)
                        .map(|(_, cc)| cc.clone())
                        .unwrap_or_else(|| sp.zero());
                    pass &= sp.add(&gpart, &tpart) == *c;
                }
            }
        }
    }
    report(7, "cyclotomic sums, circle lemma, residue theorem, lambda_0, double pole", pass, started, Some(30.0));
}

#[test]
fn criterion_8_representation_layer() {
    let started = Instant::now();
    let mut pass = true;
    let qctx = CycloCtx::new(1);
    let algebras = vec![
        LieAlgebra::build(Series::A, 1).unwrap(),
        LieAlgebra::build(Series::A, 2).unwrap(),
        LieAlgebra::build(Series::A, 3).unwrap(),
        LieAlgebra::build(Series::B, 2).unwrap(),
        LieAlgebra::build(Series::C, 3).unwrap(),
        LieAlgebra::build(Series::D, 4).unwrap(),
    ];
    for alg in &algebras {
        let gens = alg.all_gens();
        // Jacobi on basis triples (sampled stride on the bigger algebras).
        let stride = if gens.len() <= 10 { 1 } else { 4 };
        for &a in gens.iter().step_by(stride) {
            for &b in gens.iter().step_by(stride) {
                for &c in gens.iter().step_by(stride) {
                    let ea = LieElement::<Cyclo>::gen(a, Cyclo::one(&qctx));
                    let eb = LieElement::<Cyclo>::gen(b, Cyclo::one(&qctx));
                    let ec = LieElement::<Cyclo>::gen(c, Cyclo::one(&qctx));
                    let s = alg
                        .bracket::<Cyclo>(&qctx, &ea, &alg.bracket(&qctx, &eb, &ec))
                        .add(&alg.bracket::<Cyclo>(&qctx, &eb, &alg.bracket(&qctx, &ec, &ea)))
                        .add(&alg.bracket::<Cyclo>(&qctx, &ec, &alg.bracket(&qctx, &ea, &eb)));
                    pass &= s.is_zero();
                }
            }
        }
        // Form invariance and the Killing normalization.
        let dim = gens.len();
        let index: std::collections::HashMap<Gen, usize> =
            gens.iter().cloned().zip(0..).collect();
        let ad = |g: Gen| -> linalg::RMat {
            let mut m = vec![vec![Rational::from_integer(0.into()); dim]; dim];
            for (j, &h) in gens.iter().enumerate() {
                for (out, c) in alg.bracket_gens(g, h) {
                    m[index[out]][j] = c.clone();
                }
            }
            m
        };
        let h2 = rat(2 * alg.dual_coxeter(), 1);
        for (s, &a) in gens.iter().enumerate().step_by(3) {
            for &b in gens.iter().skip(s % 2).step_by(5) {
                let ea = LieElement::<Cyclo>::gen(a, Cyclo::one(&qctx));
                let eb = LieElement::<Cyclo>::gen(b, Cyclo::one(&qctx));
                // invariance on a third generator
                let ec = LieElement::<Cyclo>::gen(gens[(s + 3) % dim], Cyclo::one(&qctx));
                let lhs = alg.form::<Cyclo>(&qctx, &alg.bracket(&qctx, &ea, &eb), &ec);
                let rhs = alg.form::<Cyclo>(&qctx, &eb, &alg.bracket(&qctx, &ea, &ec)).neg();
                pass &= lhs == rhs;
                // Killing normalization
                let prod = linalg::mat_mul(&ad(a), &ad(b));
                let tr: Rational = (0..dim).map(|i| prod[i][i].clone()).sum();
                pass &= alg.form::<Cyclo>(&qctx, &ea, &eb).as_rational().unwrap() == tr / &h2;
            }
        }
    }

    // Bracket compatibility of the Verma action.
    let alg = LieAlgebra::build(Series::A, 2).unwrap();
    let hw = Weight { fund: vec![rat(7, 3), rat(1, 2)] };
    let gens = alg.all_gens();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let gx = gens[rng.random_range(0..gens.len())];
        let gy = gens[rng.random_range(0..gens.len())];
        let x = LieElement::<Cyclo>::gen(gx, Cyclo::from_int(&qctx, rng.random_range(1..5)));
        let y = LieElement::<Cyclo>::gen(gy, Cyclo::from_int(&qctx, rng.random_range(1..5)));
        let mut s = VermaState::<Cyclo>::highest(&qctx, hw.clone());
        for _ in 0..rng.random_range(0..3) {
            s = verma_act_gen::<Cyclo>(&alg, &qctx, Gen::F(rng.random_range(0..3)), &s);
        }
        let lhs = verma_act::<Cyclo>(&alg, &qctx, &x, &verma_act(&alg, &qctx, &y, &s))
            .add(&verma_act::<Cyclo>(&alg, &qctx, &y, &verma_act(&alg, &qctx, &x, &s)).scale(&Cyclo::from_int(&qctx, -1)));
        let rhs = verma_act::<Cyclo>(&alg, &qctx, &alg.bracket(&qctx, &x, &y), &s);
        pass &= lhs == rhs;
    }

    // Irrep dimensions against the Weyl formula, for all dominant integral
    // weights with dimension <= 50.
    for alg in &algebras {
        let rank = alg.rank;
        let mut coords = vec![0i64; rank];
        loop {
            let hw = Weight {
                fund: coords.iter().map(|&c| rat(c, 1)).collect(),
            };
            let dim = alg.weyl_dim(&hw);
            if dim <= rat(50, 1) {
                let ir = build_irrep(alg, &hw, 50).unwrap();
                pass &= rat(ir.dim as i64, 1) == dim;
            }
            // next coordinate tuple with entries <= 3
            let mut i = 0;
            loop {
                if i == rank {
                    break;
                }
                coords[i] += 1;
                if coords[i] <= 3 {
                    break;
                }
                coords[i] = 0;
                i += 1;
            }
            if i == rank {
                break;
            }
        }
    }

    report(8, "Jacobi, invariance, Killing, Verma action, Weyl dimensions", pass, started, None);
}
