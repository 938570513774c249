//! Command-line entry point: JSON model configs, run records, spectra,
//! Bethe solving, eigenpair certificates, the worked-example reproduction,
//! and the exact identity selftest.
//!
//! Exit codes: 0 success, 2 validation failure, 3 parse failure,
//! 4 no solution found, 5 verification failure.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::autom::{build_automorphism, AutoSpec, AutoTable};
use crate::bethe::{self, SolveOptions};
use crate::eig;
use crate::exact::{parse_rational, rat, rational_to_f64, Cyclo, CycloCtx, Rational};
use crate::hamiltonians::{
    build_h, commutator_check, double_pole_identity, resummed_h_check, validate_model, Model,
    ModuleKind,
};
use crate::lie::{LieAlgebra, Series, Weight};
use crate::lie::Gen;
use crate::repn::{project_to_irrep, verma_act_gen, PbwMonomial, TensorState, VermaState};
use crate::weight_function::{
    build_psi, build_psi_inner_resummed, circle_lemma_sum, classical_degeneration_check,
    swapping_oracle, verify_eigenpair,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NO_SOLUTION: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

// ---------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelConfig {
    pub algebra: AlgebraConfig,
    #[serde(rename = "T")]
    pub t: u32,
    pub automorphism: AutoConfig,
    pub sites: Vec<SiteConfig>,
    #[serde(default)]
    pub bethe: BetheConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraConfig {
    pub series: String,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutoConfig {
    /// 1-based node images: node i maps to permutation[i-1].
    pub permutation: Vec<usize>,
    pub phases: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZValue {
    /// Exact rational "p/q".
    Rational(String),
    /// Complex [re, im].
    Complex([f64; 2]),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordValue {
    Int(i64),
    Frac(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteConfig {
    pub z: ZValue,
    pub weight: Vec<CoordValue>,
    pub module: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BetheConfig {
    #[serde(default)]
    pub m: usize,
    /// 1-based Dynkin nodes.
    #[serde(default)]
    pub colors: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub starts: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        SolverConfig { starts: d.starts, tol: d.tol, seed: d.seed, max_iter: d.max_iter }
    }
}

fn parse_series(s: &str) -> Result<Series, String> {
    match s.trim().to_uppercase().as_str() {
        "A" => Ok(Series::A),
        "B" => Ok(Series::B),
        "C" => Ok(Series::C),
        "D" => Ok(Series::D),
        other => Err(format!("unknown series `{other}` (expected A, B, C or D)")),
    }
}

fn coord_to_rational(c: &CoordValue) -> Result<Rational, String> {
    match c {
        CoordValue::Int(n) => Ok(Rational::from_integer((*n).into())),
        CoordValue::Frac(s) => parse_rational(s).map_err(|e| e.to_string()),
    }
}

pub struct BuiltParts {
    pub alg: Arc<LieAlgebra>,
    pub ctx: Arc<CycloCtx>,
    pub auto: Arc<AutoTable>,
    pub weights: Vec<Weight>,
    pub kinds: Vec<ModuleKind>,
    pub colors0: Vec<usize>,
}

/// Builds the algebra/automorphism layer and checks ranges; the sites are
/// materialized separately per scalar backend.
pub fn build_parts(cfg: &ModelConfig) -> Result<BuiltParts, String> {
    let series = parse_series(&cfg.algebra.series)?;
    let alg = LieAlgebra::build(series, cfg.algebra.rank).map_err(|e| e.to_string())?;
    let ctx = CycloCtx::new(cfg.t);
    let rank = alg.rank;
    if cfg.automorphism.permutation.len() != rank || cfg.automorphism.phases.len() != rank {
        return Err(format!("automorphism arrays must have length {rank}"));
    }
    let mut perm0 = Vec::with_capacity(rank);
    for &p in &cfg.automorphism.permutation {
        if p == 0 || p > rank {
            return Err(format!("permutation entry {p} out of range 1..={rank}"));
        }
        perm0.push(p - 1);
    }
    let spec = AutoSpec { t: cfg.t, permutation: perm0, phases: cfg.automorphism.phases.clone() };
    let auto = build_automorphism(&alg, &ctx, &spec).map_err(|e| e.to_string())?;
    let mut weights = Vec::new();
    let mut kinds = Vec::new();
    for (i, site) in cfg.sites.iter().enumerate() {
        if site.weight.len() != rank {
            return Err(format!("site {} weight must have {rank} coordinates", i + 1));
        }
        let fund = site
            .weight
            .iter()
            .map(coord_to_rational)
            .collect::<Result<Vec<_>, _>>()?;
        weights.push(Weight { fund });
        kinds.push(match site.module.as_str() {
            "verma" => ModuleKind::Verma,
            "irrep" => ModuleKind::Irrep,
            other => return Err(format!("site {}: unknown module kind `{other}`", i + 1)),
        });
    }
    if cfg.bethe.colors.len() != cfg.bethe.m {
        return Err(format!(
            "bethe.colors has {} entries but m = {}",
            cfg.bethe.colors.len(),
            cfg.bethe.m
        ));
    }
    let mut colors0 = Vec::new();
    for &c in &cfg.bethe.colors {
        if c == 0 || c > rank {
            return Err(format!("color {c} out of range 1..={rank}"));
        }
        colors0.push(c - 1);
    }
    Ok(BuiltParts { alg, ctx, auto, weights, kinds, colors0 })
}

fn site_to_c64(z: &ZValue) -> Result<Complex64, String> {
    match z {
        ZValue::Rational(s) => Ok(Complex64::new(
            rational_to_f64(&parse_rational(s).map_err(|e| e.to_string())?),
            0.0,
        )),
        ZValue::Complex([re, im]) => Ok(Complex64::new(*re, *im)),
    }
}

pub fn build_complex_model(cfg: &ModelConfig, parts: &BuiltParts) -> Result<Model<Complex64>, String> {
    let sites = cfg
        .sites
        .iter()
        .map(|s| site_to_c64(&s.z))
        .collect::<Result<Vec<_>, _>>()?;
    validate_model::<Complex64>(&parts.alg, &parts.auto, sites, parts.weights.clone(), parts.kinds.clone())
        .map_err(|e| e.to_string())
}

/// Exact model, available when every site is rational.
pub fn build_exact_model(cfg: &ModelConfig, parts: &BuiltParts) -> Result<Option<Model<Cyclo>>, String> {
    let mut sites = Vec::new();
    for s in &cfg.sites {
        match &s.z {
            ZValue::Rational(txt) => sites.push(Cyclo::from_rational(
                &parts.ctx,
                &parse_rational(txt).map_err(|e| e.to_string())?,
            )),
            ZValue::Complex(_) => return Ok(None),
        }
    }
    validate_model::<Cyclo>(&parts.alg, &parts.auto, sites, parts.weights.clone(), parts.kinds.clone())
        .map(Some)
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------
// Run store
// ---------------------------------------------------------------------

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn config_hash(cfg: &ModelConfig) -> String {
    let canon = serde_json::to_string(cfg).expect("config serializes");
    format!("{:016x}", fnv1a64(canon.as_bytes()))
}

fn run_dir(out_dir: &Path, cfg: &ModelConfig) -> std::io::Result<PathBuf> {
    let dir = out_dir.join(config_hash(cfg));
    std::fs::create_dir_all(&dir)?;
    let cfg_path = dir.join("config.json");
    if !cfg_path.exists() {
        std::fs::write(&cfg_path, serde_json::to_string_pretty(cfg).unwrap())?;
    }
    Ok(dir)
}

// ---------------------------------------------------------------------
// Output records
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize, Debug)]
pub struct SolutionsFile {
    pub colors: Vec<usize>, // 1-based
    pub m: usize,
    pub attempts: usize,
    pub converged: usize,
    pub solutions: Vec<SolutionRecord>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct SolutionRecord {
    pub roots: Vec<[f64; 2]>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub canonical_colors: Vec<usize>, // 1-based
    pub canonical_roots: Vec<[f64; 2]>,
}

/// One term of an exported Bethe vector: the per-site PBW monomials as
/// lists of positive-root coordinate vectors, plus the coefficient.
#[derive(Serialize, Deserialize, Debug)]
pub struct PsiTerm {
    pub sites: Vec<Vec<Vec<i64>>>,
    pub coeff: [f64; 2],
}

#[derive(Serialize, Deserialize, Debug)]
pub struct PsiRecord {
    pub solution: usize,
    pub terms: Vec<PsiTerm>,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct Certificate {
    pub solution: usize,
    pub site: usize, // 1-based
    pub eigenvalue: [f64; 2],
    pub residual_direct: f64,
    pub residual_iota: f64,
    pub pass: bool,
}

// ---------------------------------------------------------------------
// CLI surface
// ---------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(name = "cyclogaudin", about = "Cyclotomic Gaudin models: Hamiltonians, Bethe equations, Bethe vectors")]
pub struct Cli {
    /// Directory for run records.
    #[arg(long, default_value = "runs", global = true)]
    pub out_dir: PathBuf,
    /// Recompute even when an identical run record exists.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a model config.
    Validate { config: PathBuf },
    /// Assemble H_site on the tensor product of irreps and diagonalize.
    Spectrum {
        config: PathBuf,
        /// Site index, 1-based.
        #[arg(long, default_value_t = 1)]
        site: usize,
        /// Dimension cap for the tensor product.
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
    /// Solve the cyclotomic Bethe equations.
    Bethe { config: PathBuf },
    /// Verify eigenpairs for solved Bethe roots.
    Verify {
        config: PathBuf,
        #[arg(long)]
        solutions: PathBuf,
    },
    /// Reproduce the full sl3 diagram-automorphism worked example.
    ReproSl3 {
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        z1: String,
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        z2: String,
    },
    /// Run the exact identity suite.
    Selftest {
        /// Flip one derived structure phase to demonstrate that the
        /// double-pole identity detects corruption.
        #[arg(long)]
        corrupt_sign: bool,
    },
}

pub fn run(cli: Cli) -> i32 {
    crate::par::init_thread_pool();
    match cli.command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Spectrum { config, site, cap } => {
            cmd_spectrum(&config, site, cap, &cli.out_dir, cli.force)
        }
        Command::Bethe { config } => cmd_bethe(&config, &cli.out_dir, cli.force),
        Command::Verify { config, solutions } => {
            cmd_verify(&config, &solutions, &cli.out_dir, cli.force)
        }
        Command::ReproSl3 { z1, z2 } => cmd_repro_sl3(&z1, &z2),
        Command::Selftest { corrupt_sign } => cmd_selftest(corrupt_sign),
    }
}

fn load_config(path: &Path) -> Result<ModelConfig, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: cannot parse {}: {e}", path.display());
        EXIT_PARSE
    })
}

fn cmd_validate(config: &Path) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let parts = match build_parts(&cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let model = match build_complex_model(&cfg, &parts) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    println!(
        "model ok: {}{}  T={}  automorphism order {}  {} sites",
        cfg.algebra.series,
        cfg.algebra.rank,
        cfg.t,
        parts.auto.order,
        model.n_sites()
    );
    let l0: Vec<String> = parts.auto.lambda0.fund.iter().map(|c| c.to_string()).collect();
    println!("lambda_0 (fundamental coords): [{}]", l0.join(", "));
    for (i, z) in model.sites.iter().enumerate() {
        println!(
            "  site {}: z = {:+.6}{:+.6}i  weight {:?}  {:?}",
            i + 1,
            z.re,
            z.im,
            model.weights[i].fund.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            model.kinds[i]
        );
    }
    EXIT_OK
}

fn cmd_spectrum(config: &Path, site: usize, cap: usize, out_dir: &Path, force: bool) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let parts = match build_parts(&cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let model = match build_complex_model(&cfg, &parts) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    if site == 0 || site > model.n_sites() {
        eprintln!("validation failed: site {site} out of range");
        return EXIT_VALIDATION;
    }
    let dir = match run_dir(out_dir, &cfg) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let csv_path = dir.join("spectrum.csv");
    if csv_path.exists() && !force {
        println!("spectrum already computed: {}", csv_path.display());
        if let Ok(text) = std::fs::read_to_string(&csv_path) {
            print!("{text}");
        }
        return EXIT_OK;
    }
    let irreps = match model.irreps(cap) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let total: usize = irreps.iter().map(|i| i.dim).product();
    if total > cap {
        eprintln!("validation failed: total dimension {total} exceeds cap {cap}");
        return EXIT_VALIDATION;
    }
    let h = build_h(&model, site - 1).matrix(&model.sctx, &irreps);
    let eigs = eig::complex_eigenvalues(&h);
    let clusters = eig::cluster_eigenvalues(&eigs, 1e-8);
    let mut csv = String::from("re,im,multiplicity\n");
    for (v, mult) in &clusters {
        csv.push_str(&format!("{:.15e},{:.15e},{}\n", v.re, v.im, mult));
    }
    if let Err(e) = std::fs::write(&csv_path, &csv) {
        eprintln!("error writing {}: {e}", csv_path.display());
        return EXIT_VALIDATION;
    }
    println!("H_{site} on a {total}-dimensional space: {} clusters", clusters.len());
    print!("{csv}");
    println!("written: {}", csv_path.display());
    EXIT_OK
}

fn cmd_bethe(config: &Path, out_dir: &Path, force: bool) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let parts = match build_parts(&cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let model = match build_complex_model(&cfg, &parts) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let dir = match run_dir(out_dir, &cfg) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let path = dir.join("solutions.json");
    if path.exists() && !force {
        println!("solutions already computed: {}", path.display());
        let file: Option<SolutionsFile> = std::fs::read_to_string(&path)
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok());
        return match file {
            Some(f) if f.m == 0 || !f.solutions.is_empty() => EXIT_OK,
            Some(_) => EXIT_NO_SOLUTION,
            None => EXIT_PARSE,
        };
    }
    let opts = SolveOptions {
        starts: cfg.solver.starts,
        seed: cfg.solver.seed,
        max_iter: cfg.solver.max_iter,
        tol: cfg.solver.tol,
        ..Default::default()
    };
    let set = bethe::solve(&model, &parts.colors0, &opts);
    let record = SolutionsFile {
        colors: cfg.bethe.colors.clone(),
        m: cfg.bethe.m,
        attempts: set.attempts,
        converged: set.converged,
        solutions: set
            .solutions
            .iter()
            .map(|s| SolutionRecord {
                roots: s.roots.iter().map(|w| [w.re, w.im]).collect(),
                residual_norm: s.residual_norm,
                iterations: s.iterations,
                canonical_colors: s.canonical_colors.iter().map(|c| c + 1).collect(),
                canonical_roots: s.canonical_roots.iter().map(|w| [w.re, w.im]).collect(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&record).unwrap();
    if let Err(e) = std::fs::write(&path, &json) {
        eprintln!("error writing {}: {e}", path.display());
        return EXIT_VALIDATION;
    }
    println!(
        "{} canonical solution(s) from {} converged / {} starts",
        record.solutions.len(),
        record.converged,
        record.attempts
    );
    for (i, s) in record.solutions.iter().enumerate() {
        let roots: Vec<String> = s
            .canonical_roots
            .iter()
            .map(|[re, im]| format!("{re:+.12}{im:+.12}i"))
            .collect();
        println!(
            "  #{}: colors {:?} roots [{}]  |residual| = {:.3e}",
            i,
            s.canonical_colors,
            roots.join(", "),
            s.residual_norm
        );
    }
    println!("written: {}", path.display());
    if cfg.bethe.m == 0 || !record.solutions.is_empty() {
        EXIT_OK
    } else {
        eprintln!("no solution found");
        EXIT_NO_SOLUTION
    }
}

fn cmd_verify(config: &Path, solutions: &Path, out_dir: &Path, force: bool) -> i32 {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let parts = match build_parts(&cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let model = match build_complex_model(&cfg, &parts) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let text = match std::fs::read_to_string(solutions) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", solutions.display());
            return EXIT_PARSE;
        }
    };
    let file: SolutionsFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot parse {}: {e}", solutions.display());
            return EXIT_PARSE;
        }
    };
    let dir = match run_dir(out_dir, &cfg) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let cert_path = dir.join("certificates.json");
    if cert_path.exists() && !force {
        println!("certificates already computed: {}", cert_path.display());
        let certs: Option<Vec<Certificate>> = std::fs::read_to_string(&cert_path)
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok());
        return match certs {
            Some(cs) if cs.iter().all(|c| c.pass) => EXIT_OK,
            Some(_) => EXIT_VERIFY,
            None => EXIT_PARSE,
        };
    }
    // m = 0 verifies the vacuum against the m = 0 eigenvalue.
    let configs: Vec<Vec<Complex64>> = if file.m == 0 {
        vec![vec![]]
    } else {
        file.solutions
            .iter()
            .map(|s| s.roots.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
            .collect()
    };
    let mut certs = Vec::new();
    let mut psis = Vec::new();
    let mut all_pass = true;
    for (si, roots) in configs.iter().enumerate() {
        let psi = build_psi(&model, &parts.colors0, roots);
        psis.push(PsiRecord {
            solution: si,
            terms: psi
                .iter()
                .map(|(monos, c)| PsiTerm {
                    sites: monos
                        .iter()
                        .map(|m| {
                            m.0.iter()
                                .map(|&r| model.alg.pos_roots[r].coords.clone())
                                .collect()
                        })
                        .collect(),
                    coeff: [c.re, c.im],
                })
                .collect(),
        });
        for site in 0..model.n_sites() {
            match verify_eigenpair(&model, &parts.colors0, roots, site) {
                Ok(rep) => {
                    let pass = rep.residual_direct < 1e-8;
                    all_pass &= pass;
                    println!(
                        "solution {si} site {}: E = {:+.9}{:+.9}i  residual(H) = {:.3e}  residual(iota H) = {:.3e}  {}",
                        site + 1,
                        rep.eigenvalue.re,
                        rep.eigenvalue.im,
                        rep.residual_direct,
                        rep.residual_iota,
                        if pass { "PASS" } else { "FAIL" }
                    );
                    certs.push(Certificate {
                        solution: si,
                        site: site + 1,
                        eigenvalue: [rep.eigenvalue.re, rep.eigenvalue.im],
                        residual_direct: rep.residual_direct,
                        residual_iota: rep.residual_iota,
                        pass,
                    });
                }
                Err(e) => {
                    eprintln!("solution {si} site {}: {e}", site + 1);
                    all_pass = false;
                    certs.push(Certificate {
                        solution: si,
                        site: site + 1,
                        eigenvalue: [f64::NAN, f64::NAN],
                        residual_direct: f64::INFINITY,
                        residual_iota: f64::INFINITY,
                        pass: false,
                    });
                }
            }
        }
    }
    if let Err(e) = std::fs::write(&cert_path, serde_json::to_string_pretty(&certs).unwrap()) {
        eprintln!("error writing {}: {e}", cert_path.display());
        return EXIT_VALIDATION;
    }
    let psi_path = dir.join("bethe_vectors.json");
    if let Err(e) = std::fs::write(&psi_path, serde_json::to_string_pretty(&psis).unwrap()) {
        eprintln!("error writing {}: {e}", psi_path.display());
        return EXIT_VALIDATION;
    }
    println!("written: {}", cert_path.display());
    println!("written: {}", psi_path.display());
    if all_pass {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

// ---------------------------------------------------------------------
// Worked-example reproduction
// ---------------------------------------------------------------------

struct CheckTable {
    rows: Vec<(String, bool, String)>,
}

impl CheckTable {
    fn new() -> Self {
        CheckTable { rows: Vec::new() }
    }
    fn add(&mut self, name: &str, pass: bool, detail: String) {
        self.rows.push((name.to_string(), pass, detail));
    }
    fn print_and_code(&self, fail_code: i32) -> i32 {
        let mut ok = true;
        for (name, pass, detail) in &self.rows {
            println!("{:<44} {}  {}", name, if *pass { "PASS" } else { "FAIL" }, detail);
            ok &= *pass;
        }
        if ok {
            println!("all checks passed");
            EXIT_OK
        } else {
            println!("some checks FAILED");
            fail_code
        }
    }
}

fn sl3_flip_parts() -> (Arc<LieAlgebra>, Arc<CycloCtx>, Arc<AutoTable>) {
    let alg = LieAlgebra::build(Series::A, 2).unwrap();
    let ctx = CycloCtx::new(2);
    let auto = build_automorphism(
        &alg,
        &ctx,
        &AutoSpec { t: 2, permutation: vec![1, 0], phases: vec![0, 0] },
    )
    .unwrap();
    (alg, ctx, auto)
}

fn cmd_repro_sl3(z1_text: &str, z2_text: &str) -> i32 {
    let (z1, z2) = match (parse_rational(z1_text), parse_rational(z2_text)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            eprintln!("error: z1, z2 must be rationals like 3/2");
            return EXIT_PARSE;
        }
    };
    let (alg, ctx, auto) = sl3_flip_parts();
    let w = Weight::fundamental(2, 0);
    let exact = match validate_model::<Cyclo>(
        &alg,
        &auto,
        vec![Cyclo::from_rational(&ctx, &z1), Cyclo::from_rational(&ctx, &z2)],
        vec![w.clone(), w.clone()],
        vec![ModuleKind::Irrep, ModuleKind::Irrep],
    ) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("validation failed: {e}");
            return EXIT_VALIDATION;
        }
    };
    let cmodel = validate_model::<Complex64>(
        &alg,
        &auto,
        vec![
            Complex64::new(rational_to_f64(&z1), 0.0),
            Complex64::new(rational_to_f64(&z2), 0.0),
        ],
        vec![w.clone(), w.clone()],
        vec![ModuleKind::Irrep, ModuleKind::Irrep],
    )
    .unwrap();

    let mut table = CheckTable::new();

    // lambda_0 = -(alpha_1 + alpha_2)/2.
    let want_l0 = alg
        .root_weight(alg.simple_root_index(0))
        .add(&alg.root_weight(alg.simple_root_index(1)))
        .scale(&rat(-1, 2));
    table.add(
        "lambda_0 = -(alpha1+alpha2)/2",
        auto.lambda0 == want_l0,
        format!("{:?}", auto.lambda0.fund.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
    );

    // Double-pole identity, exactly.
    table.add(
        "double pole identity at u = 0",
        double_pole_identity(&exact).is_ok(),
        "-(h/2) sum omega^r<s^r I^a, I_a>/(omega^r-1)^2 = Delta(lambda_0)".into(),
    );

    // Commutativity, exactly.
    let irreps = exact.irreps(64).unwrap();
    let cert = commutator_check(
        &[validate_model::<Cyclo>(
            &alg,
            &auto,
            vec![Cyclo::from_rational(&ctx, &z1), Cyclo::from_rational(&ctx, &z2)],
            vec![w.clone(), w.clone()],
            vec![ModuleKind::Irrep, ModuleKind::Irrep],
        )
        .unwrap()],
        &irreps,
        0,
        1,
    );
    table.add("[H_1, H_2] = 0 exactly", cert.exact_zero, format!("degree bound {}", cert.degree_bound));

    // Spectrum of H_1 against the closed forms.
    let z1f = rational_to_f64(&z1);
    let z2f = rational_to_f64(&z2);
    let den = 3.0 * z1f.powi(3) - 3.0 * z1f * z2f * z2f;
    let closed = [
        ((z2f * z2f + z1f * z2f + 2.0 * z1f * z1f) / den, 5usize),
        ((z2f * z2f - 5.0 * z1f * z2f - 4.0 * z1f * z1f) / den, 3),
        ((z2f * z2f + 10.0 * z1f * z2f - 7.0 * z1f * z1f) / den, 1),
    ];
    let cirreps = cmodel.irreps(64).unwrap();
    let h1 = build_h(&cmodel, 0).matrix(&cmodel.sctx, &cirreps);
    let clusters = eig::cluster_eigenvalues(&eig::complex_eigenvalues(&h1), 1e-8);
    let mut spec_ok = clusters.len() == 3;
    if spec_ok {
        for (val, mult) in &closed {
            let hit = clusters
                .iter()
                .any(|(c, m)| (*c - Complex64::new(*val, 0.0)).norm() < 1e-9 && m == mult);
            spec_ok &= hit;
        }
    }
    table.add(
        "H_1 spectrum = closed forms (mult 5,3,1)",
        spec_ok,
        format!(
            "clusters: {}",
            clusters
                .iter()
                .map(|(c, m)| format!("{:.6} x{}", c.re, m))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );

    // Bethe m = 1: w = (z1 + z2)/2, compared in canonical form.
    let set1 = bethe::solve(&cmodel, &[0], &SolveOptions::default());
    let (_, want1) = bethe::canonicalize(&cmodel, &[0], &[Complex64::new((z1f + z2f) / 2.0, 0.0)]);
    let m1_ok = set1.solutions.len() == 1
        && (set1.solutions[0].canonical_roots[0] - want1[0]).norm() < 1e-10;
    table.add(
        "Bethe m=1 root = (z1+z2)/2",
        m1_ok,
        format!("{} solution(s)", set1.solutions.len()),
    );

    // Bethe m = 2: the square-root pair, up to canonicalization.
    let set2 = bethe::solve(&cmodel, &[0, 1], &SolveOptions::default());
    let s = Complex64::new((z2f - 5.0 * z1f) * (5.0 * z2f - z1f), 0.0).sqrt();
    let w1c = (Complex64::new(z1f + z2f, 0.0) - s) / Complex64::new(6.0, 0.0);
    let w2c = -(Complex64::new(z1f + z2f, 0.0) + s) / Complex64::new(6.0, 0.0);
    let (_, want2) = bethe::canonicalize(&cmodel, &[0, 1], &[w1c, w2c]);
    let m2_ok = set2.solutions.len() == 1
        && set2.solutions[0]
            .canonical_roots
            .iter()
            .zip(&want2)
            .all(|(a, b)| (a - b).norm() < 1e-10);
    table.add(
        "Bethe m=2 roots = square-root pair",
        m2_ok,
        format!("{} canonical solution(s)", set2.solutions.len()),
    );

    // psi for m = 1 projected to L x L equals (2/(z2-z1))(F1 v (x) v - v (x) F1 v).
    let w1_exact = Cyclo::from_rational(&ctx, &((z1.clone() + z2.clone()) / rat(2, 1)));
    let psi1 = build_psi(&exact, &[0], &[w1_exact.clone()]);
    let proj1 = project_to_irrep::<Cyclo>(&exact.sctx, &psi1, &irreps);
    let r1 = alg.simple_root_index(0);
    let mut want_state = TensorState::<Cyclo>::zero(exact.weights.clone());
    let coeff = Cyclo::from_rational(&ctx, &(rat(2, 1) / (z2.clone() - z1.clone())));
    want_state.add_term(vec![PbwMonomial(vec![r1]), PbwMonomial::unit()], coeff.clone());
    want_state.add_term(vec![PbwMonomial::unit(), PbwMonomial(vec![r1])], coeff.neg());
    let want_proj = project_to_irrep::<Cyclo>(&exact.sctx, &want_state, &irreps);
    table.add("psi (m=1) closed form in L x L", proj1 == want_proj, "exact".into());

    // psi for m = 2 projected equals 9/(z1+z2)^2 (F2F1 v x v + v x F2F1 v - F1 v x F1 v).
    let psi2 = build_psi(&cmodel, &[0, 1], &[w1c, w2c]);
    let proj2 = project_to_irrep::<Complex64>(&cmodel.sctx, &psi2, &cirreps);
    let r2i = alg.simple_root_index(1);
    let vac = VermaState::<Complex64>::highest(&cmodel.sctx, w.clone());
    let f1v = verma_act_gen::<Complex64>(&alg, &cmodel.sctx, Gen::F(r1), &vac);
    let f21v = verma_act_gen::<Complex64>(&alg, &cmodel.sctx, Gen::F(r2i), &f1v);
    let c9 = Complex64::new(9.0 / (z1f + z2f).powi(2), 0.0);
    let want2s = TensorState::from_factors(&cmodel.sctx, &[f21v.clone(), vac.clone()])
        .add(&TensorState::from_factors(&cmodel.sctx, &[vac.clone(), f21v]))
        .sub(&TensorState::from_factors(&cmodel.sctx, &[f1v.clone(), f1v]))
        .scale(&c9);
    let want2p = project_to_irrep::<Complex64>(&cmodel.sctx, &want2s, &cirreps);
    let diff2 = proj2
        .iter()
        .zip(&want2p)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    table.add("psi (m=2) closed form in L x L", diff2 < 1e-9, format!("max diff {diff2:.2e}"));

    // Eigenpair residuals for m = 0, 1, 2 at both sites.
    let mut eig_ok = true;
    let mut worst: f64 = 0.0;
    for (colors, roots) in [
        (vec![], vec![]),
        (vec![0usize], vec![Complex64::new((z1f + z2f) / 2.0, 0.0)]),
        (vec![0, 1], vec![w1c, w2c]),
    ] {
        for site in 0..2 {
            match verify_eigenpair(&cmodel, &colors, &roots, site) {
                Ok(rep) => {
                    worst = worst.max(rep.residual_direct);
                    eig_ok &= rep.residual_direct < 1e-8;
                }
                Err(_) => eig_ok = false,
            }
        }
    }
    table.add("eigenpair residuals (m=0,1,2)", eig_ok, format!("worst {worst:.2e}"));

    table.print_and_code(EXIT_VERIFY)
}

// ---------------------------------------------------------------------
// Selftest
// ---------------------------------------------------------------------

fn cmd_selftest(corrupt_sign: bool) -> i32 {
    let started = Instant::now();
    let mut table = CheckTable::new();

    // Cyclotomic sum identities, exactly, for T = 2..8.
    let mut sums_ok = true;
    for t in 2..=8u32 {
        let ctx = CycloCtx::new(t);
        let mut s = Cyclo::zero(&ctx);
        for k in 0..t {
            s = s.add(&Cyclo::omega_pow(&ctx, k as i64));
        }
        sums_ok &= s.is_zero();
        let mut g = Cyclo::zero(&ctx);
        for r in 1..t {
            g = g.add(&Cyclo::one(&ctx).sub(&Cyclo::omega_pow(&ctx, r as i64)).inv().unwrap());
        }
        sums_ok &= g.as_rational() == Some(rat(t as i64 - 1, 2));
    }
    table.add("cyclotomic sum identities (T=2..8)", sums_ok, "exact".into());

    // Circle lemma for n = 2..8 over 100 pseudo-random rational tuples.
    let ctx1 = CycloCtx::new(1);
    let mut circle_ok = true;
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for trial in 0..100 {
        let n = 2 + (trial % 7);
        let mut pts = Vec::new();
        while pts.len() < n {
            let p = (next() % 2000) as i64 - 1000;
            let q = (next() % 60 + 1) as i64;
            let c = Cyclo::from_rational(&ctx1, &rat(p, q));
            if pts.iter().all(|x: &Cyclo| !x.sub(&c).is_zero()) {
                pts.push(c);
            }
        }
        circle_ok &= circle_lemma_sum::<Cyclo>(&ctx1, &pts).is_zero();
    }
    table.add("circle lemma (n<=8, 100 tuples)", circle_ok, "exact".into());

    // Residue theorem both directions on the sl3 flip adjoint space.
    {
        use crate::lie::{Gen, LieElement};
        use crate::ratfun::{gamma_orbit_sum, residue_pairing, split_global, AdjointSpace, GammaSpace, LaurentData};
        let (alg, ctx, auto) = sl3_flip_parts();
        let sp = AdjointSpace::<Cyclo> { alg: alg.clone(), auto: auto.clone(), ctx: ctx.clone() };
        let x1 = Cyclo::from_int(&ctx, 1);
        let x2 = Cyclo::from_rational(&ctx, &rat(5, 2));
        let pair = |a: &LieElement<Cyclo>, b: &LieElement<Cyclo>| alg.form::<Cyclo>(&ctx, a, b);
        let mut rt_ok = true;
        for k in 0..2i64 {
            let mut h = gamma_orbit_sum(2, k, &sp, LieElement::gen(Gen::E(1), Cyclo::one(&ctx)), x1.clone(), 2);
            h.add_orbit(&sp, LieElement::gen(Gen::F(2), Cyclo::from_int(&ctx, 3)), x2.clone(), 1);
            let tuple: Vec<(Cyclo, LaurentData<LieElement<Cyclo>>)> = [&x1, &x2]
                .iter()
                .map(|x| ((*x).clone(), h.expand_at(&ctx, &sp, x, 4)))
                .collect();
            for g0 in [Gen::E(0), Gen::F(1), Gen::H(0)] {
                let g = gamma_orbit_sum(2, -k - 1, &sp, LieElement::gen(g0, Cyclo::one(&ctx)), x2.clone(), 2);
                rt_ok &= residue_pairing::<Cyclo, AdjointSpace<Cyclo>, AdjointSpace<Cyclo>, _>(
                    &ctx, &sp, &tuple, None, &g, pair,
                )
                .is_zero();
            }
            // Reconstruction round trip.
            let (global, taylors) = split_global(&ctx, &sp, 2, k, &tuple);
            for (i, (x, data)) in tuple.iter().enumerate() {
                let expansion = global.expand_at(&ctx, &sp, x, 4);
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
                    rt_ok &= sp.add(&gpart, &tpart) == *c;
                }
            }
        }
        table.add("Gamma-equivariant residue theorem", rt_ok, "only-if + round trip".into());
    }

    // Commutativity matrix, exactly, at 3 random rational configurations.
    {
        let mut comm_ok = true;
        let configs: [(&str, Series, usize, AutoSpec, usize); 4] = [
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
        for (name, series, rank, spec, n) in configs {
            let alg = LieAlgebra::build(series, rank).unwrap();
            let ctx = CycloCtx::new(spec.t);
            let auto = build_automorphism(&alg, &ctx, &spec).unwrap();
            let hw = Weight::fundamental(rank, 0);
            let site_sets: [Vec<Rational>; 3] = [
                (0..n).map(|i| rat(2 * i as i64 + 1, 1)).collect(),
                (0..n).map(|i| rat(3 * i as i64 + 2, 2)).collect(),
                (0..n).map(|i| rat(7 * i as i64 + 5, 3)).collect(),
            ];
            let models: Vec<Model<Cyclo>> = site_sets
                .iter()
                .map(|zs| {
                    validate_model::<Cyclo>(
                        &alg,
                        &auto,
                        zs.iter().map(|z| Cyclo::from_rational(&ctx, z)).collect(),
                        vec![hw.clone(); n],
                        vec![ModuleKind::Irrep; n],
                    )
                    .unwrap()
                })
                .collect();
            let irreps = models[0].irreps(64).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    let cert = commutator_check(&models, &irreps, i, j);
                    comm_ok &= cert.exact_zero;
                    if !cert.exact_zero {
                        eprintln!("commutator failure in {name}: {:?}", cert.first_failure);
                    }
                }
            }
        }
        table.add("commutativity matrix (4 models x 3 configs)", comm_ok, "exact".into());
    }

    // Double-pole identity (optionally against a corrupted table).
    {
        let (alg, ctx, auto) = sl3_flip_parts();
        let auto_used = if corrupt_sign { auto.corrupt_highest_phase() } else { auto };
        let hw = Weight::fundamental(2, 0);
        let model = validate_model::<Cyclo>(
            &alg,
            &auto_used,
            vec![Cyclo::from_int(&ctx, 1), Cyclo::from_int(&ctx, 2)],
            vec![hw.clone(), hw],
            vec![ModuleKind::Irrep, ModuleKind::Irrep],
        );
        let ok = model
            .map(|m| double_pole_identity(&m).is_ok())
            .unwrap_or(false);
        table.add(
            if corrupt_sign { "double pole identity (corrupted table)" } else { "double pole identity" },
            ok,
            if corrupt_sign { "expected to FAIL under corruption".into() } else { "exact".into() },
        );
    }

    // Resummation checks for sigma = id, and the inner fast path.
    {
        let alg = LieAlgebra::build(Series::A, 1).unwrap();
        let ctx = CycloCtx::new(3);
        let auto = build_automorphism(&alg, &ctx, &AutoSpec::identity(1, 3)).unwrap();
        let hw = Weight::fundamental(1, 0);
        let model = validate_model::<Cyclo>(
            &alg,
            &auto,
            vec![Cyclo::from_int(&ctx, 1), Cyclo::from_int(&ctx, 2)],
            vec![hw.clone(), hw.clone()],
            vec![ModuleKind::Irrep, ModuleKind::Irrep],
        )
        .unwrap();
        let irreps = model.irreps(64).unwrap();
        let mut ok = resummed_h_check(&model, &irreps, 0).is_ok();

        // untwisted Bethe reduction, numerically.
        let cauto = build_automorphism(&alg, &ctx, &AutoSpec::identity(1, 3)).unwrap();
        let cmodel = validate_model::<Complex64>(
            &alg,
            &cauto,
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
        ok &= bethe::untwisted_reduction_check(
            &cmodel,
            &classical,
            &[0],
            &[Complex64::new(0.7, 0.9)],
            1e-10,
        )
        .is_ok();
        ok &= classical_degeneration_check(
            &cmodel,
            &classical,
            &[0],
            &[Complex64::new(0.7, 0.3)],
            1e-10,
        )
        .is_ok();

        // Inner fast path.
        let alg3 = LieAlgebra::build(Series::A, 2).unwrap();
        let ctx3 = CycloCtx::new(3);
        let auto3 = build_automorphism(&alg3, &ctx3, &AutoSpec::inner(vec![1, 0], 3)).unwrap();
        let hw3 = Weight::fundamental(2, 0);
        let m3 = validate_model::<Cyclo>(
            &alg3,
            &auto3,
            vec![Cyclo::from_int(&ctx3, 1), Cyclo::from_int(&ctx3, 2)],
            vec![hw3.clone(), hw3],
            vec![ModuleKind::Verma, ModuleKind::Verma],
        )
        .unwrap();
        let roots = vec![Cyclo::from_rational(&ctx3, &rat(5, 7))];
        ok &= build_psi(&m3, &[0], &roots) == build_psi_inner_resummed(&m3, &[0], &roots);

        // Oracle equivalence spot checks.
        let roots2 = vec![Cyclo::from_rational(&ctx3, &rat(5, 7)), Cyclo::from_rational(&ctx3, &rat(9, 2))];
        ok &= build_psi(&m3, &[0, 1], &roots2) == swapping_oracle(&m3, &[0, 1], &roots2);

        table.add("resummation + degeneration checks", ok, "sigma = id and inner".into());
    }

    println!("selftest completed in {:.2}s", started.elapsed().as_secs_f64());
    table.print_and_code(EXIT_VERIFY)
}
