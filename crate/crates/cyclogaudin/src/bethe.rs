//! The cyclotomic Bethe equations: residuals, the analytic Jacobian, a
//! damped multistart Newton solver with deflation, and the twist-symmetry
//! canonicalization that merges equivalent solutions.

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact::{rint, Rational};
use crate::hamiltonians::Model;
use crate::scalar::Scalar;

/// The value of the j-th cyclotomic Bethe equation at the configuration
/// (colors, roots); all of them vanish on a Bethe solution.
pub fn residual_j<S: Scalar>(model: &Model<S>, colors: &[usize], roots: &[S], j: usize) -> S {
    let ctx = &model.sctx;
    let alg = &model.alg;
    let alpha_j = alg.root_weight(alg.simple_root_index(colors[j]));
    let mut r = S::zero(ctx);
    for s in 0..model.t {
        for (i, z) in model.sites.iter().enumerate() {
            let c = alg.ip(&alpha_j, &model.auto.l_sigma(&model.weights[i], s));
            if !c.is_zero() {
                let denom = roots[j].sub(&model.omega(s as i64).mul(z));
                r = r.add(&denom.inv().expect("root collides with a site orbit").mul_rat(&c));
            }
        }
        for (k, w) in roots.iter().enumerate() {
            if k == j {
                continue;
            }
            let alpha_k = alg.root_weight(alg.simple_root_index(colors[k]));
            let c = alg.ip(&alpha_j, &model.auto.l_sigma(&alpha_k, s));
            if !c.is_zero() {
                let denom = roots[j].sub(&model.omega(s as i64).mul(w));
                r = r.sub(&denom.inv().expect("coincident root orbits").mul_rat(&c));
            }
        }
    }
    let mut bracket = model.alg.ip(&alpha_j, &model.auto.lambda0);
    let mut self_sum = Rational::zero();
    for s in 1..model.t {
        self_sum += alg.ip(&alpha_j, &model.auto.l_sigma(&alpha_j, s));
    }
    bracket -= self_sum / rint(2);
    if !bracket.is_zero() {
        r = r.add(&roots[j].inv().expect("zero Bethe root").mul_rat(&bracket));
    }
    r
}

pub fn residual_vec<S: Scalar>(model: &Model<S>, colors: &[usize], roots: &[S]) -> Vec<S> {
    (0..roots.len()).map(|j| residual_j(model, colors, roots, j)).collect()
}

/// Analytic Jacobian d residual_j / d w_l.
pub fn jacobian<S: Scalar>(model: &Model<S>, colors: &[usize], roots: &[S]) -> Vec<Vec<S>> {
    let ctx = &model.sctx;
    let alg = &model.alg;
    let m = roots.len();
    let mut jac = vec![vec![S::zero(ctx); m]; m];
    for j in 0..m {
        let alpha_j = alg.root_weight(alg.simple_root_index(colors[j]));
        // Diagonal: differentiate every w_j occurrence.
        let mut diag = S::zero(ctx);
        for s in 0..model.t {
            for (i, z) in model.sites.iter().enumerate() {
                let c = alg.ip(&alpha_j, &model.auto.l_sigma(&model.weights[i], s));
                if !c.is_zero() {
                    let d = roots[j].sub(&model.omega(s as i64).mul(z));
                    let inv2 = d.mul(&d).inv().unwrap();
                    diag = diag.sub(&inv2.mul_rat(&c));
                }
            }
            for (k, w) in roots.iter().enumerate() {
                if k == j {
                    continue;
                }
                let alpha_k = alg.root_weight(alg.simple_root_index(colors[k]));
                let c = alg.ip(&alpha_j, &model.auto.l_sigma(&alpha_k, s));
                if !c.is_zero() {
                    let d = roots[j].sub(&model.omega(s as i64).mul(w));
                    let inv2 = d.mul(&d).inv().unwrap();
                    diag = diag.add(&inv2.mul_rat(&c));
                }
            }
        }
        let mut bracket = alg.ip(&alpha_j, &model.auto.lambda0);
        let mut self_sum = Rational::zero();
        for s in 1..model.t {
            self_sum += alg.ip(&alpha_j, &model.auto.l_sigma(&alpha_j, s));
        }
        bracket -= self_sum / rint(2);
        if !bracket.is_zero() {
            let w2 = roots[j].mul(&roots[j]);
            diag = diag.sub(&w2.inv().unwrap().mul_rat(&bracket));
        }
        jac[j][j] = diag;
        // Off-diagonal: d/dw_l of -c/(w_j - omega^s w_l) = -c omega^s/(...)^2.
        for l in 0..m {
            if l == j {
                continue;
            }
            let alpha_l = alg.root_weight(alg.simple_root_index(colors[l]));
            let mut off = S::zero(ctx);
            for s in 0..model.t {
                let c = alg.ip(&alpha_j, &model.auto.l_sigma(&alpha_l, s));
                if !c.is_zero() {
                    let d = roots[j].sub(&model.omega(s as i64).mul(&roots[l]));
                    let inv2 = d.mul(&d).inv().unwrap();
                    off = off.sub(&model.omega(s as i64).mul(&inv2).mul_rat(&c));
                }
            }
            jac[j][l] = off;
        }
    }
    jac
}

/// The Bethe system with every pairing constant precomputed, for the hot
/// Newton loops. Mirrors `residual_j`/`jacobian` exactly.
struct CompiledSystem {
    m: usize,
    t: u32,
    sites: Vec<Complex64>,
    omega: Vec<Complex64>,
    /// [j][s][i] = <alpha_{c(j)}, L_sigma^s lambda_i>
    site_coeff: Vec<Vec<Vec<f64>>>,
    /// [j][s][k] = <alpha_{c(j)}, L_sigma^s alpha_{c(k)}>
    root_coeff: Vec<Vec<Vec<f64>>>,
    /// [j] = <alpha_{c(j)}, lambda_0> - (1/2) sum_{s>=1} <alpha_{c(j)}, L^s alpha_{c(j)}>
    bracket: Vec<f64>,
}

impl CompiledSystem {
    fn new(model: &Model<Complex64>, colors: &[usize]) -> Self {
        let alg = &model.alg;
        let m = colors.len();
        let t = model.t;
        let f64_of = crate::exact::rational_to_f64;
        let alphas: Vec<_> = colors
            .iter()
            .map(|&c| alg.root_weight(alg.simple_root_index(c)))
            .collect();
        let site_coeff = (0..m)
            .map(|j| {
                (0..t)
                    .map(|s| {
                        model
                            .weights
                            .iter()
                            .map(|w| f64_of(&alg.ip(&alphas[j], &model.auto.l_sigma(w, s))))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let root_coeff = (0..m)
            .map(|j| {
                (0..t)
                    .map(|s| {
                        alphas
                            .iter()
                            .map(|ak| f64_of(&alg.ip(&alphas[j], &model.auto.l_sigma(ak, s))))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let bracket = (0..m)
            .map(|j| {
                let mut b = alg.ip(&alphas[j], &model.auto.lambda0);
                let mut self_sum = Rational::zero();
                for s in 1..t {
                    self_sum += alg.ip(&alphas[j], &model.auto.l_sigma(&alphas[j], s));
                }
                b -= self_sum / rint(2);
                f64_of(&b)
            })
            .collect();
        let omega = (0..t)
            .map(|s| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / t as f64))
            .collect();
        CompiledSystem { m, t, sites: model.sites.clone(), omega, site_coeff, root_coeff, bracket }
    }

    fn residual(&self, w: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|j| {
                let mut r = Complex64::new(0.0, 0.0);
                for s in 0..self.t as usize {
                    for (i, z) in self.sites.iter().enumerate() {
                        let c = self.site_coeff[j][s][i];
                        if c != 0.0 {
                            r += c / (w[j] - self.omega[s] * z);
                        }
                    }
                    for (k, wk) in w.iter().enumerate() {
                        if k == j {
                            continue;
                        }
                        let c = self.root_coeff[j][s][k];
                        if c != 0.0 {
                            r -= c / (w[j] - self.omega[s] * wk);
                        }
                    }
                }
                if self.bracket[j] != 0.0 {
                    r += self.bracket[j] / w[j];
                }
                r
            })
            .collect()
    }

    fn jacobian(&self, w: &[Complex64]) -> Vec<Vec<Complex64>> {
        let m = self.m;
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for j in 0..m {
            let mut diag = Complex64::new(0.0, 0.0);
            for s in 0..self.t as usize {
                for (i, z) in self.sites.iter().enumerate() {
                    let c = self.site_coeff[j][s][i];
                    if c != 0.0 {
                        let d = w[j] - self.omega[s] * z;
                        diag -= c / (d * d);
                    }
                }
                for (k, wk) in w.iter().enumerate() {
                    if k == j {
                        continue;
                    }
                    let c = self.root_coeff[j][s][k];
                    if c != 0.0 {
                        let d = w[j] - self.omega[s] * wk;
                        diag += c / (d * d);
                        jac[j][k] -= c * self.omega[s] / (d * d);
                    }
                }
            }
            if self.bracket[j] != 0.0 {
                diag -= self.bracket[j] / (w[j] * w[j]);
            }
            jac[j][j] = diag;
        }
        jac
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    /// Minimum distance between distinct root orbits and to site orbits.
    pub coincidence_tol: f64,
    /// Iterates beyond this multiple of the largest site modulus are
    /// treated as diverged: the residual also vanishes at infinity, which
    /// would otherwise trap Newton on a spurious run-away.
    pub radius_factor: f64,
    /// Roots closer to the forbidden origin than this multiple of the
    /// smallest site modulus are rejected; when the 1/w coefficient
    /// vanishes the residual extends continuously by 0 there, which would
    /// otherwise attract Newton just like the zero at infinity.
    pub origin_exclusion: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            starts: 256,
            seed: 7,
            max_iter: 200,
            tol: 1e-12,
            coincidence_tol: 1e-9,
            radius_factor: 50.0,
            origin_exclusion: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub roots: Vec<Complex64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub canonical_colors: Vec<usize>,
    pub canonical_roots: Vec<Complex64>,
}

#[derive(Clone, Debug, Default)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub attempts: usize,
    pub converged: usize,
}

/// Canonical form under the twist symmetry w_j -> omega^{k_j} w_j,
/// c(j) -> sigma^{k_j}(c(j)): every root is rotated into the principal
/// sector arg in [0, 2*pi/T), then the (color, root) pairs are sorted.
pub fn canonicalize(
    model: &Model<Complex64>,
    colors: &[usize],
    roots: &[Complex64],
) -> (Vec<usize>, Vec<Complex64>) {
    let t = model.t;
    let sector = 2.0 * std::f64::consts::PI / t as f64;
    let mut pairs: Vec<(usize, Complex64)> = Vec::with_capacity(roots.len());
    for (j, w) in roots.iter().enumerate() {
        let mut theta = w.arg();
        if theta < 0.0 {
            theta += 2.0 * std::f64::consts::PI;
        }
        // Arguments within a small band of a sector boundary are snapped to
        // it, so that numerical noise on either side of the boundary cannot
        // split one solution into two canonical forms.
        let nearest = (theta / sector).round();
        let q = if (theta - nearest * sector).abs() < 1e-9 {
            nearest as i64
        } else {
            (theta / sector).floor() as i64
        };
        let k = ((t as i64 - q) % t as i64 + t as i64) % t as i64;
        let tw = Complex64::from_polar(1.0, sector * k as f64);
        let node = (0..k).fold(colors[j], |c, _| model.auto.spec.permutation[c]);
        pairs.push((node, w * tw));
    }
    pairs.sort_by(|a, b| {
        (a.0, ord_key(a.1)).partial_cmp(&(b.0, ord_key(b.1))).unwrap()
    });
    (pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
}

fn ord_key(z: Complex64) -> (f64, f64) {
    // Rounded so float jitter does not flip orderings between near-equal
    // solutions found from different starts.
    ((z.re / 1e-9).round() * 1e-9, (z.im / 1e-9).round() * 1e-9)
}

fn fingerprint(colors: &[usize], roots: &[Complex64]) -> Vec<(usize, i64, i64)> {
    colors
        .iter()
        .zip(roots)
        .map(|(&c, w)| (c, (w.re / 1e-7).round() as i64, (w.im / 1e-7).round() as i64))
        .collect()
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting for small complex systems.
fn solve_linear(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if mag < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

fn valid_configuration(
    model: &Model<Complex64>,
    roots: &[Complex64],
    tol: f64,
    origin_radius: f64,
) -> bool {
    let t = model.t;
    for (j, w) in roots.iter().enumerate() {
        if w.norm() < tol.max(origin_radius) {
            return false;
        }
        for s in 0..t {
            let img = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / t as f64);
            for z in &model.sites {
                if (w - img * z).norm() < tol {
                    return false;
                }
            }
            for (k, w2) in roots.iter().enumerate() {
                // distinct roots may not share an orbit
                if k != j && (w - img * w2).norm() < tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Damped Newton with analytic Jacobian, multistart initialization from
/// perturbed site-orbit barycenters, deflation of found solutions, and
/// canonicalization-based deduplication.
pub fn solve(
    model: &Model<Complex64>,
    colors: &[usize],
    opts: &SolveOptions,
) -> SolutionSet {
    let m = colors.len();
    let mut set = SolutionSet::default();
    if m == 0 {
        set.solutions.push(Solution {
            roots: vec![],
            residual_norm: 0.0,
            iterations: 0,
            canonical_colors: vec![],
            canonical_roots: vec![],
        });
        return set;
    }
    let sys = CompiledSystem::new(model, colors);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let barycenter: Complex64 =
        model.sites.iter().sum::<Complex64>() / Complex64::new(model.sites.len() as f64, 0.0);
    let spread = model
        .sites
        .iter()
        .map(|z| (z - barycenter).norm())
        .fold(0.0, f64::max)
        .max(barycenter.norm())
        .max(1.0);
    let site_max = model.sites.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let radius_cap = opts.radius_factor * site_max;
    let site_min = model.sites.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let origin_radius = opts.origin_exclusion * site_min;

    let mut found_raw: Vec<Vec<Complex64>> = Vec::new();
    let mut seen = std::collections::HashSet::new();

    // Anchor points: every site-orbit image plus the twisted barycenters.
    let mut anchors: Vec<Complex64> = Vec::new();
    for k in 0..model.t {
        let tw = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / model.t as f64);
        for z in &model.sites {
            anchors.push(tw * z);
        }
        anchors.push(tw * barycenter);
    }
    let min_gap = {
        let mut g = f64::INFINITY;
        for (i, a) in anchors.iter().enumerate() {
            for b in anchors.iter().skip(i + 1) {
                let d = (a - b).norm();
                if d > 1e-9 {
                    g = g.min(d);
                }
            }
        }
        if g.is_finite() {
            g
        } else {
            spread
        }
    };
    // Deterministic cycling over anchor tuples for small m, random picks
    // otherwise.
    let tuple_count = (anchors.len() as f64).powi(m as i32);
    let enumerable = tuple_count <= 4096.0;

    for start in 0..opts.starts {
        set.attempts += 1;
        let (tuple, amp_idx) = if enumerable {
            let tc = tuple_count as usize;
            (start % tc, (start / tc) % 4)
        } else {
            (0, start % 4)
        };
        let amp = [0.12 * min_gap, 0.3 * min_gap, 0.6 * min_gap, 0.35 * spread][amp_idx];
        let mut tuple_idx = tuple;
        let mut w: Vec<Complex64> = (0..m)
            .map(|_| {
                let anchor = if enumerable {
                    let a = anchors[tuple_idx % anchors.len()];
                    tuple_idx /= anchors.len();
                    a
                } else {
                    anchors[rng.random_range(0..anchors.len())]
                };
                let jitter = Complex64::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ) * amp;
                anchor + jitter
            })
            .collect();
        if !valid_configuration(model, &w, opts.coincidence_tol, origin_radius) {
            continue;
        }

        let mut converged = false;
        let mut iters = 0;
        for it in 0..opts.max_iter {
            iters = it + 1;
            if w.iter().any(|c| c.norm() > radius_cap) {
                break; // run-away towards the zero of the residual at infinity
            }
            let f = sys.residual(&w);
            let fnorm = inf_norm(&f);
            if fnorm < opts.tol {
                converged = true;
                break;
            }
            let mut jac = sys.jacobian(&w);
            // Deflation against already-found raw solutions:
            // G = F / prod_{s,l} (w_l - w_l^{(s)}), whose Newton system is
            // (J_F - F dlog^T) delta = -F.
            if !found_raw.is_empty() {
                let dlog: Vec<Complex64> = (0..m)
                    .map(|l| {
                        found_raw
                            .iter()
                            .map(|sol| {
                                let d = w[l] - sol[l];
                                if d.norm() > 1e-13 {
                                    1.0 / d
                                } else {
                                    Complex64::new(1e13, 0.0)
                                }
                            })
                            .sum()
                    })
                    .collect();
                for (r, row) in jac.iter_mut().enumerate() {
                    for (l, entry) in row.iter_mut().enumerate() {
                        *entry -= f[r] * dlog[l];
                    }
                }
            }
            let Some(step) = solve_linear(jac, f.iter().map(|c| -c).collect()) else {
                break;
            };
            // Backtracking damping on the undeflated residual norm.
            let mut accepted = false;
            let mut scale = 1.0;
            for _ in 0..12 {
                let trial: Vec<Complex64> =
                    w.iter().zip(&step).map(|(a, d)| a + d * scale).collect();
                if valid_configuration(model, &trial, opts.coincidence_tol * 0.01, origin_radius) {
                    let fnew = inf_norm(&sys.residual(&trial));
                    if fnew < fnorm || fnew < opts.tol {
                        w = trial;
                        accepted = true;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if !converged || !valid_configuration(model, &w, opts.coincidence_tol, origin_radius) {
            continue;
        }
        set.converged += 1;
        let (cc, cw) = canonicalize(model, colors, &w);
        let fp = fingerprint(&cc, &cw);
        if seen.insert(fp) {
            found_raw.push(w.clone());
            set.solutions.push(Solution {
                residual_norm: inf_norm(&sys.residual(&w)),
                roots: w,
                iterations: iters,
                canonical_colors: cc,
                canonical_roots: cw,
            });
        }
    }
    set
}

/// For sigma = id: certifies the exact vanishing of the 1/w~ coefficient
/// (sum_{alpha > 0} <alpha, alpha_c> = <alpha_c, alpha_c>) and numerically
/// checks residual(w) = T w^{T-1} * classical residual at (z^T, w^T).
pub fn untwisted_reduction_check(
    model: &Model<Complex64>,
    classical: &Model<Complex64>,
    colors: &[usize],
    roots: &[Complex64],
    tol: f64,
) -> Result<(), String> {
    assert_eq!(model.auto.order, 1);
    let alg = &model.alg;
    // Exact part.
    for &c in colors {
        let alpha_c = alg.root_weight(alg.simple_root_index(c));
        let mut s = Rational::zero();
        for idx in 0..alg.num_pos_roots() {
            s += alg.ip(&alg.root_weight(idx), &alpha_c);
        }
        if s != alg.ip(&alpha_c, &alpha_c) {
            return Err(format!("1/w~ coefficient does not vanish for color {c}"));
        }
    }
    // Numeric transform.
    let t = model.t;
    let pow_t = |z: &Complex64| z.powu(t);
    let troots: Vec<Complex64> = roots.iter().map(pow_t).collect();
    for j in 0..roots.len() {
        let lhs = residual_j(model, colors, roots, j);
        let classical_res = residual_j(classical, colors, &troots, j);
        let rhs = Complex64::new(t as f64, 0.0) * roots[j].powu(t - 1) * classical_res;
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        if (lhs - rhs).norm() > tol * scale {
            return Err(format!(
                "residual transform mismatch at root {j}: {lhs} vs {rhs}"
            ));
        }
    }
    Ok(())
}
