//! Convergence study and uniform-bound scan over a ladder of boxes.

use super::config::{OutputFormat, StudyConfig};
use crate::bulk::{pressure_bulk, susceptibility_bulk, BulkMethod, ThermoParams};
use crate::finite_gas::{
    build_contour, chi_from_slopes, fd_from_spectra, level_slopes, pressure_eigsum, shifted_spectra_for, ChiMethod, FdOptions,
    FiniteBox, FiniteChi, FugacityCompact,
};
use crate::kernel_lab::{trace_derivatives, LabPoint};
use crate::spectrum::{self, BoxGrid};
use crate::{Complex64, Error, Result, Statistics};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// One finite-box value `chi_L^N(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub h: f64,
    pub n: usize,
    pub omega: f64,
    pub stats: Statistics,
    pub re_z: f64,
    pub im_z: f64,
    #[serde(rename = "N")]
    pub order: u32,
    pub chi_re: Option<f64>,
    pub chi_im: Option<f64>,
    pub method: ChiMethod,
    pub error_estimate: Option<f64>,
    pub status: String,
}

impl PointRow {
    pub fn value(&self) -> Option<Complex64> {
        Some(Complex64::new(self.chi_re?, self.chi_im?))
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re_z, self.im_z)
    }
}

/// Thermodynamic-limit reference `chi_inf^N(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkRow {
    pub omega: f64,
    pub stats: Statistics,
    pub re_z: f64,
    pub im_z: f64,
    #[serde(rename = "N")]
    pub order: u32,
    pub chi_re: Option<f64>,
    pub chi_im: Option<f64>,
    pub error_estimate: Option<f64>,
    pub status: String,
}

impl BulkRow {
    pub fn value(&self) -> Option<Complex64> {
        Some(Complex64::new(self.chi_re?, self.chi_im?))
    }
}

/// Suprema over the fugacity set for one box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupRow {
    pub omega: f64,
    pub stats: Statistics,
    #[serde(rename = "N")]
    pub order: u32,
    #[serde(rename = "L")]
    pub l: f64,
    /// `sup_K |chi_L - chi_inf|` at spacing `h`.
    pub sup_diff: Option<f64>,
    /// `sup_K |chi_L|`.
    pub sup_abs: Option<f64>,
    /// `sup_K |chi_L(h) - chi_L(2h)| / 3`, the leading discretisation error.
    pub discretization: Option<f64>,
    /// `sup_K |chi_L^extrapolated - chi_inf|`, the finite-size part.
    pub finite_size: Option<f64>,
    /// Largest error estimate among the points entering the suprema.
    pub max_error_estimate: Option<f64>,
    pub failed_points: usize,
}

/// Kernel-lab trace derivative for one box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub order: u32,
    /// `sup_xi sup_z |d^N Tr g / d omega^N|`.
    pub sup_derivative: Option<f64>,
    pub per_area: Option<f64>,
    pub max_error_estimate: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub kind: String,
    pub seed: u64,
    pub config: StudyConfig,
    /// The fugacity set actually used, as `[re, im]`.
    pub fugacities: Vec<[f64; 2]>,
    pub points: Vec<PointRow>,
    pub bulk: Vec<BulkRow>,
    pub sups: Vec<SupRow>,
    pub lab: Vec<LabRow>,
    pub checks: Vec<CheckOutcome>,
}

impl StudyResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes `<kind>.json`, or one CSV per table next to `<kind>_meta.json`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            OutputFormat::Json => {
                let p = dir.join(format!("{}.json", self.kind));
                std::fs::write(&p, self.to_json()?)?;
                written.push(p);
            }
            OutputFormat::Csv => {
                let meta = Meta { kind: self.kind.clone(), seed: self.seed, config: self.config.clone(), fugacities: self.fugacities.clone() };
                let p = dir.join(format!("{}_meta.json", self.kind));
                std::fs::write(&p, serde_json::to_string_pretty(&meta)?)?;
                written.push(p);
                for (table, path) in self.tables(dir) {
                    let f = std::fs::File::create(&path)?;
                    table(self, f)?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }

    /// Reads what [`StudyResult::write`] produced.
    pub fn read(dir: &Path, kind: &str, format: OutputFormat) -> Result<Self> {
        match format {
            OutputFormat::Json => Self::from_json(&std::fs::read_to_string(dir.join(format!("{kind}.json")))?),
            OutputFormat::Csv => {
                let meta: Meta = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{kind}_meta.json")))?)?;
                let open = |t: &str| std::fs::File::open(dir.join(format!("{kind}_{t}.csv")));
                Ok(StudyResult {
                    kind: meta.kind,
                    seed: meta.seed,
                    config: meta.config,
                    fugacities: meta.fugacities,
                    points: read_csv(open("points")?)?,
                    bulk: read_csv(open("bulk")?)?,
                    sups: read_csv(open("sups")?)?,
                    lab: read_csv(open("lab")?)?,
                    checks: read_csv(open("checks")?)?,
                })
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn tables(&self, dir: &Path) -> Vec<(fn(&StudyResult, std::fs::File) -> Result<()>, PathBuf)> {
        let path = |t: &str| dir.join(format!("{}_{t}.csv", self.kind));
        vec![
            (|r, f| write_csv(&r.points, f), path("points")),
            (|r, f| write_csv(&r.bulk, f), path("bulk")),
            (|r, f| write_csv(&r.sups, f), path("sups")),
            (|r, f| write_csv(&r.lab, f), path("lab")),
            (|r, f| write_csv(&r.checks, f), path("checks")),
        ]
    }

    /// Plain-text summary of the suprema and checks.
    pub fn summary(&self) -> String {
        let mut s = format!("{} study, seed {}, {} fugacities\n", self.kind, self.seed, self.fugacities.len());
        s.push_str("omega  stats  N     L   sup|chi_L-chi_inf|   sup|chi_L|   discretization   failed\n");
        for r in &self.sups {
            let f = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "{:<6} {:<6} {:<2} {:>5}   {:>18}   {:>10}   {:>14}   {}\n",
                r.omega,
                r.stats.name(),
                r.order,
                r.l,
                f(r.sup_diff),
                f(r.sup_abs),
                f(r.discretization),
                r.failed_points
            ));
        }
        for r in &self.lab {
            s.push_str(&format!(
                "lab L={} N={}: sup|d^N Tr g| = {}  per area = {}  {}\n",
                r.l,
                r.order,
                r.sup_derivative.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into()),
                r.per_area.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into()),
                r.status
            ));
        }
        for c in &self.checks {
            s.push_str(&format!("{} {}: {:.6e} (threshold {:.3e}) {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold, c.detail));
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct Meta {
    kind: String,
    seed: u64,
    config: StudyConfig,
    fugacities: Vec<[f64; 2]>,
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(r: R) -> Result<Vec<T>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Fixed fugacities followed by the seeded random ones.
pub fn fugacity_set(cfg: &StudyConfig) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = cfg.fugacities.points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.fugacities.random {
        let r = cfg.fugacities.random_radius * rng.random::<f64>().sqrt();
        let t = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        out.push(Complex64::from_polar(r, t));
    }
    out
}

fn orders(cfg: &StudyConfig) -> Vec<u32> {
    (cfg.min_order..=cfg.max_order).collect()
}

fn failed(e: &Error) -> String {
    format!("failed: {e}")
}

/// Finite-box values on one grid for every (omega, stats, z, N).
fn box_points(grid: BoxGrid, cfg: &StudyConfig, zs: &[Complex64]) -> Vec<PointRow> {
    let mut rows = Vec::new();
    let opts = FdOptions { steps: cfg.methods.fd_steps.clone(), contour_nodes: cfg.methods.contour_nodes };
    let bx = FiniteBox::new(grid, cfg.beta);
    for &omega in &cfg.omegas {
        let fd_orders: Vec<u32> = orders(cfg).into_iter().filter(|&n| n > 0 && cfg.methods.for_order(n) != ChiMethod::Hellmann).collect();
        let spectra = match &bx {
            Ok(b) if !fd_orders.is_empty() => Some(shifted_spectra_for(b, omega, &fd_orders, &opts.steps)),
            _ => None,
        };
        let base = bx.as_ref().ok().map(|b| b.spectrum(omega));
        let slopes = if orders(cfg).iter().any(|&n| n == 1 && cfg.methods.for_order(1) == ChiMethod::Hellmann) {
            bx.as_ref().ok().map(|b| level_slopes(b, omega))
        } else {
            None
        };
        for &stats in &cfg.stats {
            for &z in zs {
                for n in orders(cfg) {
                    let method = cfg.methods.for_order(n);
                    let value: Result<FiniteChi> = (|| {
                        let b = bx.as_ref().map_err(Error::replicate)?;
                        let p = ThermoParams::new(cfg.beta, omega, stats, z)?;
                        match (n, method) {
                            (0, _) => {
                                let s = base.as_ref().expect("computed with the box").as_ref().map_err(Error::replicate)?;
                                let v = pressure_eigsum(s, &p)?.value;
                                Ok(FiniteChi { value: v, error_estimate: 1e-14 * v.norm(), method: ChiMethod::EigFd, order: 0, step: 0.0 })
                            }
                            (_, ChiMethod::Hellmann) => {
                                let d = slopes.as_ref().expect("computed for N = 1").as_ref().map_err(Error::replicate)?;
                                let _ = b;
                                Ok(chi_from_slopes(d, &p))
                            }
                            _ => {
                                let sp = spectra.as_ref().expect("computed for fd orders").as_ref().map_err(Error::replicate)?;
                                if method == ChiMethod::ContourFd {
                                    // Fail early with the domain error rather than inside the quadrature.
                                    let e0 = sp.values().filter_map(|s| s.ground()).fold(f64::INFINITY, f64::min);
                                    build_contour(&FugacityCompact::new(vec![z])?, cfg.beta, e0, None, opts.contour_nodes)?;
                                }
                                fd_from_spectra(sp, &p, n, method, &opts)
                            }
                        }
                    })();
                    rows.push(match value {
                        Ok(c) => PointRow {
                            l: grid.side(),
                            h: grid.spacing(),
                            n: grid.n(),
                            omega,
                            stats,
                            re_z: z.re,
                            im_z: z.im,
                            order: n,
                            chi_re: Some(c.value.re),
                            chi_im: Some(c.value.im),
                            method: c.method,
                            error_estimate: Some(c.error_estimate),
                            status: "ok".into(),
                        },
                        Err(e) => PointRow {
                            l: grid.side(),
                            h: grid.spacing(),
                            n: grid.n(),
                            omega,
                            stats,
                            re_z: z.re,
                            im_z: z.im,
                            order: n,
                            chi_re: None,
                            chi_im: None,
                            method,
                            error_estimate: None,
                            status: failed(&e),
                        },
                    });
                }
            }
        }
    }
    rows
}

fn bulk_rows(cfg: &StudyConfig, zs: &[Complex64]) -> Vec<BulkRow> {
    let mut rows = Vec::new();
    for &omega in &cfg.omegas {
        for &stats in &cfg.stats {
            for &z in zs {
                for n in orders(cfg) {
                    let v: Result<(Complex64, f64)> = (|| {
                        let p = ThermoParams::new(cfg.beta, omega, stats, z)?;
                        if n == 0 {
                            let s = pressure_bulk(&p, cfg.bulk_tol)?;
                            Ok((s.value, s.tail_bound + 1e-15 * s.value.norm()))
                        } else {
                            let s = susceptibility_bulk(&p, n, BulkMethod::Analytic)?;
                            Ok((s.value, s.error_estimate))
                        }
                    })();
                    rows.push(match v {
                        Ok((v, e)) => BulkRow {
                            omega,
                            stats,
                            re_z: z.re,
                            im_z: z.im,
                            order: n,
                            chi_re: Some(v.re),
                            chi_im: Some(v.im),
                            error_estimate: Some(e),
                            status: "ok".into(),
                        },
                        Err(e) => BulkRow {
                            omega,
                            stats,
                            re_z: z.re,
                            im_z: z.im,
                            order: n,
                            chi_re: None,
                            chi_im: None,
                            error_estimate: None,
                            status: failed(&e),
                        },
                    });
                }
            }
        }
    }
    rows
}

fn grids(cfg: &StudyConfig) -> Result<Vec<BoxGrid>> {
    let mut out = Vec::new();
    for &l in &cfg.sides {
        out.push(BoxGrid::with_spacing(l, cfg.spacing, 2)?);
        if cfg.refine {
            out.push(BoxGrid::with_spacing(l, 2.0 * cfg.spacing, 2)?);
        }
    }
    Ok(out)
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn sup_rows(cfg: &StudyConfig, points: &[PointRow], bulk: &[BulkRow]) -> Vec<SupRow> {
    let mut out = Vec::new();
    for &omega in &cfg.omegas {
        for &stats in &cfg.stats {
            for n in orders(cfg) {
                for &l in &cfg.sides {
                    let fine: Vec<&PointRow> = points
                        .iter()
                        .filter(|p| same(p.omega, omega) && p.stats == stats && p.order == n && same(p.l, l) && same(p.h, cfg.spacing))
                        .collect();
                    let mut row = SupRow {
                        omega,
                        stats,
                        order: n,
                        l,
                        sup_diff: None,
                        sup_abs: None,
                        discretization: None,
                        finite_size: None,
                        max_error_estimate: None,
                        failed_points: 0,
                    };
                    let upd = |slot: &mut Option<f64>, v: f64| *slot = Some(slot.map_or(v, |s: f64| s.max(v)));
                    for p in fine {
                        let (Some(v), Some(b)) = (
                            p.value(),
                            bulk.iter()
                                .find(|b| same(b.omega, omega) && b.stats == stats && b.order == n && b.re_z == p.re_z && b.im_z == p.im_z)
                                .and_then(|b| b.value()),
                        ) else {
                            row.failed_points += 1;
                            continue;
                        };
                        upd(&mut row.sup_diff, (v - b).norm());
                        upd(&mut row.sup_abs, v.norm());
                        if let Some(e) = p.error_estimate {
                            upd(&mut row.max_error_estimate, e);
                        }
                        let coarse = points.iter().find(|c| {
                            same(c.omega, omega)
                                && c.stats == stats
                                && c.order == n
                                && same(c.l, l)
                                && same(c.h, 2.0 * cfg.spacing)
                                && c.re_z == p.re_z
                                && c.im_z == p.im_z
                        });
                        if let Some(c) = coarse.and_then(|c| c.value()) {
                            // Second-order scheme: the error at h is about (v_h - v_2h) / 3.
                            let d = (v - c) / 3.0;
                            upd(&mut row.discretization, d.norm());
                            upd(&mut row.finite_size, (v + d - b).norm());
                        }
                    }
                    out.push(row);
                }
            }
        }
    }
    out
}

fn ladder_label(omega: f64, stats: Statistics, n: u32) -> String {
    format!("omega={omega},{},N={n}", stats.name())
}

/// Runs every box of the ladder (in parallel) plus the bulk references.
fn ladder(cfg: &StudyConfig) -> Result<(Vec<Complex64>, Vec<PointRow>, Vec<BulkRow>, Vec<SupRow>)> {
    cfg.validate()?;
    let zs = fugacity_set(cfg);
    let gs = grids(cfg)?;
    let mut points: Vec<PointRow> = gs.par_iter().map(|g| box_points(*g, cfg, &zs)).flatten().collect();
    points.sort_by(|a, b| a.l.total_cmp(&b.l).then(a.h.total_cmp(&b.h)));
    let bulk = bulk_rows(cfg, &zs);
    let sups = sup_rows(cfg, &points, &bulk);
    Ok((zs, points, bulk, sups))
}

/// `chi_L^N` over the ladder against `chi_inf^N`: reports `sup_K |chi_L - chi_inf|`
/// per box and whether it decreases strictly along the ladder.
pub fn converge_study(cfg: &StudyConfig) -> Result<StudyResult> {
    let (zs, points, bulk, sups) = ladder(cfg)?;
    let mut checks = Vec::new();
    for &omega in &cfg.omegas {
        for &stats in &cfg.stats {
            for n in orders(cfg) {
                let seq: Vec<&SupRow> = sups.iter().filter(|r| same(r.omega, omega) && r.stats == stats && r.order == n).collect();
                let vals: Vec<Option<f64>> = seq.iter().map(|r| r.sup_diff).collect();
                let complete = vals.iter().all(Option::is_some);
                let v: Vec<f64> = vals.iter().flatten().copied().collect();
                let worst_step = v.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
                let decreasing = complete && v.windows(2).all(|w| w[1] < w[0]);
                checks.push(CheckOutcome {
                    name: format!("decreasing[{}]", ladder_label(omega, stats, n)),
                    passed: decreasing,
                    value: worst_step,
                    threshold: 1.0,
                    detail: format!("largest ratio of consecutive sup_K|chi_L - chi_inf| along L = {:?}", cfg.sides),
                });
            }
        }
    }
    Ok(StudyResult {
        kind: "converge".into(),
        seed: cfg.seed,
        config: cfg.clone(),
        fugacities: zs.iter().map(|z| [z.re, z.im]).collect(),
        points,
        bulk,
        sups,
        lab: Vec::new(),
        checks,
    })
}

/// Lab trace derivatives `sup_xi sup_z |d^N Tr g / d omega^N|` over `cfg.lab_sides`.
pub fn lab_trace_scan(cfg: &StudyConfig, zs: &[Complex64]) -> Vec<LabRow> {
    let lab = &cfg.lab;
    let zs: Vec<Complex64> = zs.iter().copied().filter(|z| z.norm() > 0.0).collect();
    let max_n = cfg.max_order.clamp(1, 2);
    let rows: Vec<Vec<LabRow>> = cfg
        .lab_sides
        .par_iter()
        .map(|&l| {
            let res: Result<(BoxGrid, Vec<Vec<crate::numdiff::Derivative>>)> = (|| {
                let grid = BoxGrid::with_spacing(l, cfg.spacing, 2)?;
                let h = spectrum::build_magnetic_hamiltonian_2d(&grid, lab.omega0)?;
                let e0 = spectrum::eigenvalues(&h)?.ground().unwrap_or(0.0);
                let k = FugacityCompact::new(zs.clone())?;
                // Shrink the ground level by the largest field step so the
                // contour stays clear of every shifted spectrum.
                let guard = 0.1 * e0;
                let c = build_contour(&k, lab.scan_beta, e0 - guard, None, 8)?;
                let mut pts = Vec::new();
                for &a in &lab.scan_angles {
                    for &z in &zs {
                        pts.push(LabPoint { xi: Complex64::from_polar(c.radius, a), z });
                    }
                }
                Ok((grid, trace_derivatives(&grid, lab.scan_beta, lab.omega0, &pts, max_n as usize, &lab.fd_steps)?))
            })();
            match res {
                Ok((grid, ds)) => (1..=max_n)
                    .map(|n| {
                        let sup = ds.iter().map(|d| d[n as usize - 1].value.norm()).fold(0.0, f64::max);
                        let err = ds.iter().map(|d| d[n as usize - 1].error).fold(0.0, f64::max);
                        LabRow {
                            l,
                            n: grid.n(),
                            order: n,
                            sup_derivative: Some(sup),
                            per_area: Some(sup / grid.volume()),
                            max_error_estimate: Some(err),
                            status: "ok".into(),
                        }
                    })
                    .collect(),
                Err(e) => (1..=max_n)
                    .map(|n| LabRow { l, n: 0, order: n, sup_derivative: None, per_area: None, max_error_estimate: None, status: failed(&e) })
                    .collect(),
            }
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// `sup_K |chi_L^N|` across the ladder with its max/min ratio, plus the lab
/// trace-derivative spread per area.
pub fn uniform_bound_scan(cfg: &StudyConfig) -> Result<StudyResult> {
    let (zs, points, bulk, sups) = ladder(cfg)?;
    let mut checks = Vec::new();
    for &omega in &cfg.omegas {
        for &stats in &cfg.stats {
            for n in orders(cfg) {
                let seq: Vec<Option<f64>> = sups
                    .iter()
                    .filter(|r| same(r.omega, omega) && r.stats == stats && r.order == n)
                    .map(|r| r.sup_abs)
                    .collect();
                let complete = seq.iter().all(Option::is_some);
                let v: Vec<f64> = seq.into_iter().flatten().collect();
                let hi = v.iter().copied().fold(0.0, f64::max);
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let ratio = if hi == 0.0 { 1.0 } else { hi / lo };
                checks.push(CheckOutcome {
                    name: format!("bounded[{}]", ladder_label(omega, stats, n)),
                    passed: complete && ratio <= cfg.bound_ratio,
                    value: ratio,
                    threshold: cfg.bound_ratio,
                    detail: "max/min over the ladder of sup_K |chi_L|".into(),
                });
            }
        }
    }
    let lab = if cfg.lab_sides.is_empty() { Vec::new() } else { lab_trace_scan(cfg, &zs) };
    for n in 1..=cfg.max_order.clamp(1, 2) {
        let v: Vec<Option<f64>> = lab.iter().filter(|r| r.order == n).map(|r| r.per_area).collect();
        if v.is_empty() {
            continue;
        }
        let complete = v.iter().all(Option::is_some);
        let v: Vec<f64> = v.into_iter().flatten().collect();
        let hi = v.iter().copied().fold(0.0, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = if lo > 0.0 { (hi - lo) / lo } else { f64::INFINITY };
        checks.push(CheckOutcome {
            name: format!("lab_spread[N={n}]"),
            passed: complete && spread <= cfg.lab_spread,
            value: spread,
            threshold: cfg.lab_spread,
            detail: "(max - min) / min over the lab sides of sup |d^N Tr g| / L^2".into(),
        });
    }
    Ok(StudyResult {
        kind: "bounds".into(),
        seed: cfg.seed,
        config: cfg.clone(),
        fugacities: zs.iter().map(|z| [z.re, z.im]).collect(),
        points,
        bulk,
        sups,
        lab,
        checks,
    })
}
