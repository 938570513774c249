//! The cyclotomic Schechtman-Varchenko weight function: the closed-form sum
//! over ordered partitions and twist phases, an independent oracle that
//! computes the same vector through the swapping recursion, the circle
//! lemma, and eigenpair verification against the quadratic Hamiltonians.
//!
//! `build_psi` and `swapping_oracle` deliberately share no formula code:
//! the first enumerates the closed form termwise, the second peels lowering
//! operators off the right with pole-weighted redistribution onto sites and
//! earlier operators.

use num_complex::Complex64;

use crate::exact::mod_t_bracket;
use crate::hamiltonians::{build_h, diagonal_operator, eigenvalue_e_i, Model};
use crate::lie::{Gen, LieElement};
use crate::par;
use crate::repn::{verma_act, TensorState, VermaState};
use crate::scalar::Scalar;

/// All ordered partitions of {1, ..., m} (0-based: {0, ..., m-1}) into n
/// ordered blocks, in a deterministic order. The count is
/// m! * C(m + n - 1, n - 1).
pub fn enumerate_partitions(m: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    assert!(n >= 1);
    let mut compositions = Vec::new();
    let mut cur = vec![0usize; n];
    fn comp_rec(rest: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot == cur.len() - 1 {
            cur[slot] = rest;
            out.push(cur.clone());
            return;
        }
        for take in 0..=rest {
            cur[slot] = take;
            comp_rec(rest - take, slot + 1, cur, out);
        }
    }
    comp_rec(m, 0, &mut cur, &mut compositions);

    let mut perms = Vec::new();
    let mut items: Vec<usize> = (0..m).collect();
    fn perm_rec(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        // lexicographic order: pick each remaining item in increasing order
        let mut rest: Vec<usize> = items[k..].to_vec();
        rest.sort_unstable();
        for &x in &rest {
            let pos = items[k..].iter().position(|&y| y == x).unwrap() + k;
            items.swap(k, pos);
            // keep the tail sorted for deterministic descent
            items[k + 1..].sort_unstable();
            perm_rec(items, k + 1, out);
        }
        items[k..].sort_unstable();
    }
    perm_rec(&mut items, 0, &mut perms);

    let mut out = Vec::with_capacity(perms.len() * compositions.len());
    for comp in &compositions {
        for perm in &perms {
            let mut blocks = Vec::with_capacity(n);
            let mut pos = 0;
            for &p in comp {
                blocks.push(perm[pos..pos + p].to_vec());
                pos += p;
            }
            out.push(blocks);
        }
    }
    out
}

/// sigma-check operator: omega^k sigma^k (F_{c}) as a Lie element.
fn check_sigma_f<S: Scalar>(model: &Model<S>, node: usize, k: u32) -> LieElement<S> {
    let ctx = &model.sctx;
    let f = LieElement::<S>::gen(
        Gen::F(model.alg.simple_root_index(node)),
        S::one(ctx),
    );
    model
        .auto
        .apply_power::<S>(ctx, k, &f)
        .scale(&model.omega(k as i64))
}

/// The cyclotomic weight function, by direct enumeration of the closed form:
/// for each ordered partition and each phase tuple (k_1,...,k_m) in Z_T^m,
/// the site-i factor applies check{sigma}^{k}(F_c) along the block, divided
/// by the telescoping chain of differences ending at z_i.
///
/// The vector is only defined up to overall scale; the convention here
/// carries no global (-1)^m prefactor, matching the sl3 worked example
/// that the test suite pins. The swapping oracle uses the same convention.
pub fn build_psi<S: Scalar>(model: &Model<S>, colors: &[usize], roots: &[S]) -> TensorState<S> {
    let m = colors.len();
    let n = model.n_sites();
    let t = model.t as usize;
    let phase_count = (t as f64).powi(m as i32);
    assert!(
        phase_count <= 1e6,
        "phase enumeration T^m = {phase_count} exceeds the supported size"
    );
    let partitions = enumerate_partitions(m, n);
    let ctx = model.sctx.clone();

    // Work items: (partition, phase index block). Phases are decoded in
    // mixed radix T.
    let total_phases = (0..m).fold(1usize, |acc, _| acc * t);
    let items: Vec<(usize, usize)> = (0..partitions.len())
        .flat_map(|p| (0..total_phases).map(move |ph| (p, ph)))
        .collect();

    let zero = TensorState::<S>::zero(model.weights.clone());
    par::map_reduce(
        items,
        |(pidx, phidx)| {
            let partition = &partitions[pidx];
            let mut phases = vec![0u32; m];
            let mut rem = phidx;
            for slot in phases.iter_mut() {
                *slot = (rem % t) as u32;
                rem /= t;
            }
            let mut factors: Vec<VermaState<S>> = Vec::with_capacity(n);
            let mut denom = S::one(&ctx);
            for (i, block) in partition.iter().enumerate() {
                let mut state = VermaState::<S>::highest(&ctx, model.weights[i].clone());
                // Apply operators right to left: the last block entry acts
                // first on the highest-weight vector.
                for &label in block.iter().rev() {
                    let op = check_sigma_f(model, colors[label], phases[label]);
                    state = verma_act::<S>(&model.alg, &ctx, &op, &state);
                    if state.is_zero() {
                        break;
                    }
                }
                // Chain denominators.
                for w in block.windows(2) {
                    let a = model.omega(phases[w[0]] as i64).mul(&roots[w[0]]);
                    let b = model.omega(phases[w[1]] as i64).mul(&roots[w[1]]);
                    denom = denom.mul(&a.sub(&b));
                }
                if let Some(&last) = block.last() {
                    let a = model.omega(phases[last] as i64).mul(&roots[last]);
                    denom = denom.mul(&a.sub(&model.sites[i]));
                }
                factors.push(state);
            }
            if factors.iter().any(|f| f.is_zero()) {
                TensorState::zero(model.weights.clone())
            } else {
                let coeff = denom.inv().expect("denominator collision in psi");
                TensorState::from_factors(&ctx, &factors).scale(&coeff)
            }
        },
        move || zero.clone(),
        |a, b| a.add(&b),
    )
}

/// The same vector through the swapping recursion: remove the last operator
/// y_s, distributing sigma^j(y_s) onto each site with weight
/// 1/(w_s - omega^{-j} z_i) and onto each earlier operator as a commutator
/// with weight 1/(w_s - omega^{-j} w_i).
pub fn swapping_oracle<S: Scalar>(
    model: &Model<S>,
    colors: &[usize],
    roots: &[S],
) -> TensorState<S> {
    let ctx = &model.sctx;
    let sites: Vec<VermaState<S>> = model
        .weights
        .iter()
        .map(|w| VermaState::<S>::highest(ctx, w.clone()))
        .collect();
    let ys: Vec<LieElement<S>> = colors
        .iter()
        .map(|&c| LieElement::gen(Gen::F(model.alg.simple_root_index(c)), S::one(ctx)))
        .collect();
    swap_rec(model, &sites, &ys, roots)
}

fn swap_rec<S: Scalar>(
    model: &Model<S>,
    sites: &[VermaState<S>],
    ys: &[LieElement<S>],
    ws: &[S],
) -> TensorState<S> {
    let ctx = &model.sctx;
    if ys.is_empty() {
        return TensorState::from_factors(ctx, sites);
    }
    let s = ys.len() - 1;
    let y = &ys[s];
    let w = &ws[s];
    let mut acc = TensorState::zero(model.weights.clone());
    for j in 0..model.t {
        let sig_y = model.auto.apply_power::<S>(ctx, j, y);
        if sig_y.is_zero() {
            continue;
        }
        let omega_mj = model.omega(-(j as i64));
        for i in 0..sites.len() {
            let denom = w.sub(&omega_mj.mul(&model.sites[i]));
            let coeff = denom.inv().expect("root orbit hits a site in swapping");
            let acted = verma_act::<S>(&model.alg, ctx, &sig_y, &sites[i]);
            if acted.is_zero() {
                continue;
            }
            let mut new_sites = sites.to_vec();
            new_sites[i] = acted;
            acc = acc.add(&swap_rec(model, &new_sites, &ys[..s], &ws[..s]).scale(&coeff));
        }
        for i in 0..s {
            let denom = w.sub(&omega_mj.mul(&ws[i]));
            let coeff = denom.inv().expect("coincident root orbits in swapping");
            let br = model.alg.bracket::<S>(ctx, &sig_y, &ys[i]);
            if br.is_zero() {
                continue;
            }
            let mut new_ys = ys[..s].to_vec();
            new_ys[i] = br;
            acc = acc.add(&swap_rec(model, sites, &new_ys, &ws[..s]).scale(&coeff));
        }
    }
    acc
}

/// Resummed fast path for inner automorphisms, cross-checking the phase
/// resummation: psi = T^m sum_partitions (x)_i f(...) / (chain in w^T, z^T)
/// applied lowering operators without twist phases.
pub fn build_psi_inner_resummed<S: Scalar>(
    model: &Model<S>,
    colors: &[usize],
    roots: &[S],
) -> TensorState<S> {
    let chi = model
        .auto
        .chi
        .as_ref()
        .expect("resummed path requires an inner automorphism");
    let ctx = &model.sctx;
    let t = model.t;
    let m = colors.len();
    let n = model.n_sites();
    let pow = |x: &S, e: u32| {
        let mut acc = S::one(ctx);
        for _ in 0..e {
            acc = acc.mul(x);
        }
        acc
    };
    let tilde = |x: &S| pow(x, t);
    let mut acc = TensorState::zero(model.weights.clone());
    for partition in enumerate_partitions(m, n) {
        let mut factors = Vec::with_capacity(n);
        let mut denom = S::one(ctx);
        let mut numer = S::one(ctx);
        for (i, block) in partition.iter().enumerate() {
            let mut state = VermaState::<S>::highest(ctx, model.weights[i].clone());
            for &label in block.iter().rev() {
                let f = LieElement::<S>::gen(
                    Gen::F(model.alg.simple_root_index(colors[label])),
                    S::one(ctx),
                );
                state = verma_act::<S>(&model.alg, ctx, &f, &state);
                if state.is_zero() {
                    break;
                }
            }
            for w in block.windows(2) {
                denom = denom.mul(&tilde(&roots[w[0]]).sub(&tilde(&roots[w[1]])));
            }
            if let Some(&last) = block.last() {
                denom = denom.mul(&tilde(&roots[last]).sub(&tilde(&model.sites[i])));
            }
            // f(w_1,...,w_p, z_i; chi_1,...,chi_p)
            if !block.is_empty() {
                let chis: Vec<i64> = block
                    .iter()
                    .map(|&l| chi[model.alg.simple_root_index(colors[l])] as i64)
                    .collect();
                let br = |x: i64| mod_t_bracket(x, t);
                numer = numer.mul(&pow(&roots[block[0]], br(chis[0] - 1)));
                let mut cum = chis[0];
                for (s, &label) in block.iter().enumerate().skip(1) {
                    let prev = br(cum - 1);
                    cum += chis[s];
                    let here = br(cum - 1);
                    let e = t - 1 - prev + here;
                    numer = numer.mul(&pow(&roots[label], e));
                }
                let zfactor = t - 1 - br(cum - 1);
                numer = numer.mul(&pow(&model.sites[i], zfactor));
            }
            factors.push(state);
        }
        if factors.iter().any(|f| f.is_zero()) {
            continue;
        }
        let coeff = numer.mul(&denom.inv().expect("denominator collision"));
        acc = acc.add(&TensorState::from_factors(ctx, &factors).scale(&coeff));
    }
    let tm = pow(&S::from_int(ctx, t as i64), m as u32);
    // T^m overall; with the mixed radix this is the resummed sum over
    // phases.
    acc.scale(&tm)
}

/// The circle-lemma sum over a cyclically indexed tuple of distinct points:
/// sum_{i in Z_n} prod_{j != i} 1/(x_j - x_{j+1}); the expected value is 0.
pub fn circle_lemma_sum<S: Scalar>(ctx: &S::Ctx, points: &[S]) -> S {
    let n = points.len();
    assert!(n >= 2, "circle lemma needs at least two points");
    let mut total = S::zero(ctx);
    for i in 0..n {
        let mut prod = S::one(ctx);
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = points[j].sub(&points[(j + 1) % n]);
            prod = prod.mul(&d.inv().expect("coincident points in circle lemma"));
        }
        total = total.add(&prod);
    }
    total
}

/// Eigenpair verification report: residuals of both H_i and iota(H_i)
/// against the eigenvalue E_i, all relative to |psi|.
#[derive(Clone, Debug)]
pub struct EigenpairReport {
    pub site: usize,
    pub eigenvalue: Complex64,
    pub psi_norm: f64,
    pub residual_direct: f64,
    pub residual_iota: f64,
}

/// Builds psi, applies both H_i and iota(H_i), and compares each against
/// E_i psi.
pub fn verify_eigenpair<S: Scalar>(
    model: &Model<S>,
    colors: &[usize],
    roots: &[S],
    site: usize,
) -> Result<EigenpairReport, String> {
    let ctx = &model.sctx;
    let psi = build_psi(model, colors, roots);
    let norm = psi.norm();
    if norm == 0.0 {
        return Err("degenerate configuration: psi vanishes".to_string());
    }
    let e = eigenvalue_e_i(model, colors, roots, site);
    let h = build_h(model, site);
    let target = psi.scale(&e);
    let direct = h.apply(&model.alg, ctx, &psi).sub(&target);
    let iota = h.iota().apply(&model.alg, ctx, &psi).sub(&target);
    Ok(EigenpairReport {
        site,
        eigenvalue: e.to_c64(),
        psi_norm: norm,
        residual_direct: direct.norm() / norm,
        residual_iota: iota.norm() / norm,
    })
}

/// Diagnostic only: norms of (Pi_0 E_{alpha_i}) applied diagonally to psi,
/// for each simple raising generator of the stable subalgebra.
pub fn singular_diagnostic<S: Scalar>(
    model: &Model<S>,
    psi: &TensorState<S>,
) -> Vec<(usize, f64)> {
    let ctx = &model.sctx;
    let norm = psi.norm().max(f64::MIN_POSITIVE);
    (0..model.alg.rank)
        .map(|node| {
            let e = LieElement::<S>::gen(
                Gen::E(model.alg.simple_root_index(node)),
                S::one(ctx),
            );
            let proj = model.auto.projector::<S>(ctx, 0, &e);
            if proj.is_zero() {
                return (node, 0.0);
            }
            let op = diagonal_operator(model, &proj);
            (node, op.apply(&model.alg, ctx, psi).norm() / norm)
        })
        .collect()
}

/// For sigma = id: psi of the order-T model equals the classical (T = 1)
/// weight function in the variables z^T, w^T, times T^m (w_1...w_m)^{T-1}.
/// The two models live in different cyclotomic contexts, so the comparison
/// runs on the complex backend.
pub fn classical_degeneration_check(
    model: &Model<Complex64>,
    classical: &Model<Complex64>,
    colors: &[usize],
    roots: &[Complex64],
    tol: f64,
) -> Result<(), String> {
    assert_eq!(model.auto.order, 1, "degeneration check requires sigma = id");
    assert_eq!(classical.t, 1);
    let t = model.t;
    let troots: Vec<Complex64> = roots.iter().map(|w| w.powu(t)).collect();
    for (i, z) in model.sites.iter().enumerate() {
        let zt = z.powu(t);
        assert!(
            (classical.sites[i] - zt).norm() < 1e-12,
            "classical model must sit at the T-th powers of the sites"
        );
    }
    let psi = build_psi(model, colors, roots);
    let classical_psi = build_psi(classical, colors, &troots);
    let mut factor = Complex64::new((t as f64).powi(colors.len() as i32), 0.0);
    for w in roots {
        factor *= w.powu(t - 1);
    }
    let want = classical_psi.scale(&factor);
    let diff = psi.max_diff(&want);
    let scale = want.norm().max(1.0);
    if diff <= tol * scale {
        Ok(())
    } else {
        Err(format!("mismatch {diff} above tolerance"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autom::{build_automorphism, AutoSpec};
    use crate::exact::{rat, Cyclo, CycloCtx, Rational};
    use crate::hamiltonians::{validate_model, ModuleKind};
    use crate::lie::{LieAlgebra, Series, Weight};
    use crate::repn::{build_irrep, project_to_irrep, PbwMonomial};
    use std::sync::Arc;

    fn sl3_flip_model(z1: Rational, z2: Rational) -> Model<Cyclo> {
        let alg = LieAlgebra::build(Series::A, 2).unwrap();
        let ctx = CycloCtx::new(2);
        let auto = build_automorphism(
            &alg,
            &ctx,
            &AutoSpec { t: 2, permutation: vec![1, 0], phases: vec![0, 0] },
        )
        .unwrap();
        let w = Weight::fundamental(2, 0);
        validate_model::<Cyclo>(
            &alg,
            &auto,
            vec![Cyclo::from_rational(&ctx, &z1), Cyclo::from_rational(&ctx, &z2)],
            vec![w.clone(), w],
            vec![ModuleKind::Verma, ModuleKind::Verma],
        )
        .unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_partitions(0, 1).len(), 1);
        assert_eq!(enumerate_partitions(0, 3).len(), 1);
        assert_eq!(enumerate_partitions(1, 2).len(), 2);
        assert_eq!(enumerate_partitions(2, 2).len(), 6);
        assert_eq!(enumerate_partitions(3, 2).len(), 24);
        assert_eq!(enumerate_partitions(2, 3).len(), 12);
        // blocks partition the label set
        for p in enumerate_partitions(3, 2) {
            let mut all: Vec<usize> = p.iter().flatten().cloned().collect();
            all.sort_unstable();
            assert_eq!(all, vec![0, 1, 2]);
        }
    }

    #[test]
    fn psi_m0_is_the_vacuum() {
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let psi = build_psi(&model, &[], &[]);
        let vac = TensorState::<Cyclo>::highest(&model.sctx, model.weights.clone());
        assert_eq!(psi, vac);
        assert_eq!(swapping_oracle(&model, &[], &[]), vac);
    }

    #[test]
    fn sl3_m1_projected_closed_form() {
        // psi at w_1 = (z1+z2)/2, projected to L x L, equals
        // (2/(z2-z1)) (F_1 v (x) v  -  v (x) F_1 v).
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        let w1 = Cyclo::from_rational(ctx, &rat(3, 2));
        let psi = build_psi(&model, &[0], &[w1]);
        let ir = build_irrep(&model.alg, &Weight::fundamental(2, 0), 200).unwrap();
        let irreps = vec![ir.clone(), ir.clone()];
        let got = project_to_irrep::<Cyclo>(ctx, &psi, &irreps);

        let r1 = model.alg.simple_root_index(0);
        let mut want_state = TensorState::<Cyclo>::zero(model.weights.clone());
        // 2/(z2-z1) = 2
        want_state.add_term(
            vec![PbwMonomial(vec![r1]), PbwMonomial::unit()],
            Cyclo::from_int(ctx, 2),
        );
        want_state.add_term(
            vec![PbwMonomial::unit(), PbwMonomial(vec![r1])],
            Cyclo::from_int(ctx, -2),
        );
        let want = project_to_irrep::<Cyclo>(ctx, &want_state, &irreps);
        assert_eq!(got, want);
    }

    #[test]
    fn oracle_agrees_with_closed_form_exactly() {
        // Exact equality of the two independent code paths on rational data.
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        for (colors, roots) in [
            (vec![0usize], vec![rat(5, 7)]),
            (vec![1], vec![rat(-3, 4)]),
            (vec![0, 1], vec![rat(5, 7), rat(11, 3)]),
            (vec![0, 0], vec![rat(1, 5), rat(7, 2)]),
            (vec![1, 0, 0], vec![rat(1, 5), rat(7, 2), rat(-9, 4)]),
        ] {
            let roots: Vec<Cyclo> = roots.iter().map(|r| Cyclo::from_rational(ctx, r)).collect();
            let a = build_psi(&model, &colors, &roots);
            let b = swapping_oracle(&model, &colors, &roots);
            assert_eq!(a, b, "paths disagree for colors {colors:?}");
        }
    }

    #[test]
    fn circle_lemma_exact() {
        let ctx = CycloCtx::new(1);
        // n = 2 and n = 3 displays
        let pts2 = vec![Cyclo::from_int(&ctx, 3), Cyclo::from_int(&ctx, -5)];
        assert!(circle_lemma_sum::<Cyclo>(&ctx, &pts2).is_zero());
        let pts3: Vec<Cyclo> = [rat(1, 2), rat(7, 3), rat(-4, 5)]
            .iter()
            .map(|r| Cyclo::from_rational(&ctx, r))
            .collect();
        assert!(circle_lemma_sum::<Cyclo>(&ctx, &pts3).is_zero());
        // n = 7 on pseudo-random rationals
        let pts7: Vec<Cyclo> = (0..7)
            .map(|k| Cyclo::from_rational(&ctx, &rat(3 * k * k - 7 * k + 5, k + 2)))
            .collect();
        assert!(circle_lemma_sum::<Cyclo>(&ctx, &pts7).is_zero());
    }

    #[test]
    fn eigenpair_sl3_m1_exact() {
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        let w1 = Cyclo::from_rational(ctx, &rat(3, 2));
        let report = verify_eigenpair(&model, &[0], &[w1], 0).unwrap();
        assert!(report.residual_direct < 1e-12, "direct residual {report:?}");
        assert!(report.residual_iota < 1e-12, "iota residual {report:?}");
        // the m = 0 case reproduces the vacuum eigenvalue
        let report0 = verify_eigenpair(&model, &[], &[], 0).unwrap();
        assert!(report0.residual_direct < 1e-12);
        let want = rat(-8, 9); // (z2^2+z1z2+2z1^2)/(3z1^3-3z1z2^2) at (1,2)
        assert!((report0.eigenvalue.re - crate::exact::rational_to_f64(&want)).abs() < 1e-12);
    }

    #[test]
    fn inner_eigenpairs_diagonalize_the_direct_hamiltonian() {
        // For a nontrivial inner automorphism, iota(H_i) differs from H_i by
        // Cartan-valued self-interaction terms; solved Bethe configurations
        // are eigenvectors of the direct H_i with eigenvalue E_i, while the
        // iota applier misses by O(1).
        use crate::bethe::{solve, SolveOptions};
        let alg = LieAlgebra::build(Series::A, 2).unwrap();
        let ctx = CycloCtx::new(3);
        let auto = build_automorphism(&alg, &ctx, &AutoSpec::inner(vec![1, 0], 3)).unwrap();
        let hw = Weight { fund: vec![rat(2, 1), rat(1, 1)] };
        let model = validate_model::<Complex64>(
            &alg,
            &auto,
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![hw.clone(), hw],
            vec![ModuleKind::Verma, ModuleKind::Verma],
        )
        .unwrap();
        let set = solve(&model, &[0], &SolveOptions::default());
        assert!(!set.solutions.is_empty());
        let mut saw_iota_gap = false;
        for sol in &set.solutions {
            for site in 0..2 {
                let rep = verify_eigenpair(&model, &[0], &sol.roots, site).unwrap();
                assert!(rep.residual_direct < 1e-8, "direct residual: {rep:?}");
                saw_iota_gap |= rep.residual_iota > 1e-2;
            }
        }
        assert!(saw_iota_gap, "iota(H_i) should differ from H_i for this twist");
    }

    #[test]
    fn psi_terms_share_the_projected_weight() {
        // Every PBW term of psi has Pi_0-projected total weight equal to
        // Pi_0(sum lambda_i - sum alpha_{c(j)}).
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        let alg = &model.alg;
        let auto = &model.auto;
        let t = model.t;
        let pi0 = |w: &Weight| -> Weight {
            let mut acc = Weight::zero(alg.rank);
            for k in 0..t {
                acc = acc.add(&auto.l_sigma(w, k));
            }
            acc.scale(&rat(1, t as i64))
        };
        for (colors, roots) in [
            (vec![0usize], vec![rat(5, 7)]),
            (vec![0, 1], vec![rat(5, 7), rat(11, 3)]),
        ] {
            let roots: Vec<Cyclo> = roots.iter().map(|r| Cyclo::from_rational(ctx, r)).collect();
            let psi = build_psi(&model, &colors, &roots);
            let mut expected = Weight::zero(alg.rank);
            for w in &model.weights {
                expected = expected.add(w);
            }
            for &c in &colors {
                expected = expected.sub(&alg.root_weight(alg.simple_root_index(c)));
            }
            let expected = pi0(&expected);
            for (monos, _) in psi.iter() {
                let mut total = Weight::zero(alg.rank);
                for (i, m) in monos.iter().enumerate() {
                    total = total.add(&model.weights[i]);
                    for &b in &m.0 {
                        total = total.sub(&alg.root_weight(b));
                    }
                }
                assert_eq!(pi0(&total), expected, "term weight escapes the sector");
            }
        }
    }

    #[test]
    fn s_u_diagonalizes_the_bethe_vector() {
        // The assembled S(u), evaluated at a generic rational u, acts on the
        // m = 1 Bethe vector with eigenvalue
        // <lambda(u), lambda(u)>/2 - <lambda'(u), rho>, exactly.
        use crate::hamiltonians::{eigenvalue_s, master_weight, s_u_assembly};
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        let w1 = Cyclo::from_rational(ctx, &rat(3, 2));
        let psi = build_psi(&model, &[0], &[w1.clone()]);
        let su = s_u_assembly(&model);
        let mw = master_weight(&model, &[0], &[w1]);
        for u in [rat(7, 3), rat(-9, 4)] {
            let u = Cyclo::from_rational(ctx, &u);
            let op = su.evaluate(&model, &u);
            let lhs = op.apply(&model.alg, ctx, &psi);
            let rhs = psi.scale(&eigenvalue_s(&model, &mw, &u));
            assert_eq!(lhs, rhs, "S(u) psi != eigenvalue psi at u");
        }
    }

    #[test]
    fn eigenpair_fails_for_non_bethe_roots() {
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        let w1 = Cyclo::from_rational(ctx, &rat(7, 8)); // not a Bethe root
        let report = verify_eigenpair(&model, &[0], &[w1], 0).unwrap();
        assert!(report.residual_direct > 1e-3, "should fail: {report:?}");
    }

    #[test]
    fn singular_diagnostic_on_bethe_vector() {
        let model = sl3_flip_model(rat(1, 1), rat(2, 1));
        let ctx = &model.sctx;
        let w1 = Cyclo::from_rational(ctx, &rat(3, 2));
        let psi = build_psi(&model, &[0], &[w1]);
        for (node, r) in singular_diagnostic(&model, &psi) {
            assert!(r < 1e-12, "node {node} not annihilated: {r}");
        }
        // m = 0 vacuum is singular as well
        let vac = TensorState::<Cyclo>::highest(ctx, model.weights.clone());
        for (_, r) in singular_diagnostic(&model, &vac) {
            assert!(r < 1e-12);
        }
        // generic non-Bethe roots are not singular
        let bad = build_psi(&model, &[0], &[Cyclo::from_rational(ctx, &rat(7, 8))]);
        let any_nonzero = singular_diagnostic(&model, &bad).iter().any(|(_, r)| *r > 1e-6);
        assert!(any_nonzero);
    }

    #[test]
    fn inner_resummed_path_matches_direct_sum() {
        // sl3, inner sigma with chi = (1, 0), T = 3.
        let alg = LieAlgebra::build(Series::A, 2).unwrap();
        let ctx = CycloCtx::new(3);
        let auto = build_automorphism(&alg, &ctx, &AutoSpec::inner(vec![1, 0], 3)).unwrap();
        let w = Weight::fundamental(2, 0);
        let model = validate_model::<Cyclo>(
            &alg,
            &auto,
            vec![Cyclo::from_int(&ctx, 1), Cyclo::from_int(&ctx, 2)],
            vec![w.clone(), w],
            vec![ModuleKind::Verma, ModuleKind::Verma],
        )
        .unwrap();
        for (colors, roots) in [
            (vec![0usize], vec![rat(5, 7)]),
            (vec![1], vec![rat(-3, 4)]),
            (vec![0, 1], vec![rat(5, 7), rat(9, 2)]),
        ] {
            let roots: Vec<Cyclo> =
                roots.iter().map(|r| Cyclo::from_rational(&ctx, r)).collect();
            let direct = build_psi(&model, &colors, &roots);
            let fast = build_psi_inner_resummed(&model, &colors, &roots);
            assert_eq!(direct, fast, "resummation identity fails for {colors:?}");
        }
    }

    #[test]
    fn classical_degeneration() {
        // sigma = id at T = 3 vs the classical model at z^3.
        let alg = LieAlgebra::build(Series::A, 1).unwrap();
        let ctx = CycloCtx::new(3);
        let ctx1 = CycloCtx::new(1);
        let w = Weight::fundamental(1, 0);
        let auto = build_automorphism(&alg, &ctx, &AutoSpec::identity(1, 3)).unwrap();
        let model_c = validate_model::<Complex64>(
            &alg,
            &auto,
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![w.clone(), w.clone()],
            vec![ModuleKind::Verma, ModuleKind::Verma],
        )
        .unwrap();
        let auto1 = build_automorphism(&alg, &ctx1, &AutoSpec::identity(1, 1)).unwrap();
        let classical_c = validate_model::<Complex64>(
            &alg,
            &auto1,
            vec![Complex64::new(1.0, 0.0), Complex64::new(8.0, 0.0)],
            vec![w.clone(), w],
            vec![ModuleKind::Verma, ModuleKind::Verma],
        )
        .unwrap();
        for (colors, roots) in [
            (vec![0usize], vec![Complex64::new(0.7, 0.3)]),
            (vec![0, 0], vec![Complex64::new(0.7, 0.3), Complex64::new(-1.2, 0.5)]),
        ] {
            classical_degeneration_check(&model_c, &classical_c, &colors, &roots, 1e-10)
                .unwrap();
        }
        let _ = Arc::strong_count(&alg);
    }
}
