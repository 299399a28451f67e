//! Study configuration, read from TOML or JSON.

use crate::finite_gas::ChiMethod;
use crate::kernel_lab::SimplexRule;
use crate::{Complex64, Error, Result, Statistics};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}' (csv or json)"))),
        }
    }
}

/// Susceptibility method per derivative order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodConfig {
    /// Method for N = 1.
    pub first: ChiMethod,
    /// Method for N >= 2.
    pub higher: ChiMethod,
    /// Base steps of the field differences.
    pub fd_steps: Vec<f64>,
    pub contour_nodes: usize,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig { first: ChiMethod::Hellmann, higher: ChiMethod::EigFd, fd_steps: vec![0.2, 0.1, 0.05], contour_nodes: 256 }
    }
}

impl MethodConfig {
    pub fn for_order(&self, n: u32) -> ChiMethod {
        match n {
            0 => ChiMethod::EigFd,
            1 => self.first,
            _ => self.higher,
        }
    }
}

/// Fugacity samples: fixed points plus optional seeded random points in a disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FugacityConfig {
    /// `[re, im]` pairs.
    pub points: Vec<[f64; 2]>,
    pub random: usize,
    pub random_radius: f64,
}

impl Default for FugacityConfig {
    fn default() -> Self {
        FugacityConfig { points: vec![[0.3, 0.0], [0.5, 0.0], [0.0, 0.5], [-0.4, 0.0]], random: 0, random_radius: 0.5 }
    }
}

/// Kernel-lab settings shared by the `kernels` command and the bound scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    pub side: f64,
    pub n: usize,
    pub beta: f64,
    pub omega0: f64,
    pub z: [f64; 2],
    /// Angle of `xi` on the contour circle.
    pub xi_angle: f64,
    pub max_order: usize,
    pub dw_samples: Vec<f64>,
    pub rule_single: SimplexRule,
    pub rule_nested: SimplexRule,
    pub fd_steps: Vec<f64>,
    /// Inverse temperature of the lab trace-derivative scan.
    pub scan_beta: f64,
    /// `xi` angles of the lab trace-derivative scan.
    pub scan_angles: Vec<f64>,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            side: 6.0,
            n: 24,
            beta: 1.0,
            omega0: 1.0,
            z: [0.5, 0.0],
            xi_angle: std::f64::consts::FRAC_PI_4,
            max_order: 2,
            dw_samples: vec![0.01, 0.02, 0.04, 0.08, 0.16],
            rule_single: SimplexRule { order: 8, ratio: 2.0 },
            rule_nested: SimplexRule { order: 3, ratio: 4.0 },
            fd_steps: vec![0.1, 0.05, 0.025],
            scan_beta: 0.25,
            scan_angles: vec![0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI],
        }
    }
}

impl LabConfig {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z[0], self.z[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), format: OutputFormat::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    /// Box sides of the ladder.
    pub sides: Vec<f64>,
    /// Grid spacing, held fixed across the ladder.
    pub spacing: f64,
    /// Also run every box at spacing `2 h` to separate discretisation error.
    pub refine: bool,
    pub beta: f64,
    pub omegas: Vec<f64>,
    pub stats: Vec<Statistics>,
    pub fugacities: FugacityConfig,
    /// Highest derivative order; 0 is the pressure itself.
    pub max_order: u32,
    /// Lowest derivative order.
    pub min_order: u32,
    pub methods: MethodConfig,
    /// Relative truncation tolerance of the Landau-level sums.
    pub bulk_tol: f64,
    /// Threshold on the max/min ratio of `sup_K |chi_L|` across the ladder.
    pub bound_ratio: f64,
    /// Threshold on the relative spread of the lab trace derivative per area.
    pub lab_spread: f64,
    /// Sides of the lab trace-derivative scan (empty disables it).
    pub lab_sides: Vec<f64>,
    pub lab: LabConfig,
    pub seed: u64,
    pub output: OutputConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            sides: vec![6.0, 8.0, 10.0, 12.0],
            spacing: 0.25,
            refine: true,
            beta: 1.0,
            omegas: vec![1.0],
            stats: vec![Statistics::Bose, Statistics::Fermi],
            fugacities: FugacityConfig::default(),
            max_order: 1,
            min_order: 0,
            methods: MethodConfig::default(),
            bulk_tol: 1e-15,
            bound_ratio: 1.5,
            lab_spread: 0.3,
            lab_sides: vec![6.0, 8.0, 10.0],
            lab: LabConfig::default(),
            seed: 0,
            output: OutputConfig::default(),
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Config(e.to_string())
}

impl StudyConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: StudyConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(config_err)?
        } else {
            toml::from_str(text).map_err(config_err)?
        };
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(config_err)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(config_err)
    }

    /// Checks the invariants shared by all studies.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sides.len() < 2 {
            return bad(format!("a study needs at least 2 box sides, got {}", self.sides.len()));
        }
        if self.sides.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("box sides must be strictly increasing".into());
        }
        if !(self.spacing > 0.0) {
            return bad(format!("spacing must be positive, got {}", self.spacing));
        }
        for &l in &self.sides {
            let cells = l / self.spacing;
            if (cells - cells.round()).abs() > 1e-9 || cells.round() < 3.0 {
                return bad(format!("side {l} is not a multiple (>= 3) of the spacing {}", self.spacing));
            }
            if self.refine && (cells.round() as u64 % 2 != 0 || cells.round() < 6.0) {
                return bad(format!("refinement needs side {l} to be an even multiple (>= 6) of the spacing"));
            }
        }
        if !(self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.omegas.is_empty() || self.omegas.iter().any(|w| !(*w > 0.0)) {
            return bad("field values must be positive (the bulk formulas need omega > 0)".into());
        }
        if self.stats.is_empty() {
            return bad("at least one statistics is required".into());
        }
        if self.min_order > self.max_order {
            return bad(format!("min_order {} exceeds max_order {}", self.min_order, self.max_order));
        }
        if self.max_order > 4 {
            return bad(format!("max_order {} is above the supported 4", self.max_order));
        }
        if self.methods.first == ChiMethod::Hellmann || self.methods.higher != ChiMethod::Hellmann {
            // fine
        } else {
            return bad("the eigenvalue-slope method only gives N = 1".into());
        }
        if self.methods.fd_steps.is_empty() || self.methods.fd_steps.iter().any(|s| !(*s > 0.0)) {
            return bad("finite-difference steps must be positive".into());
        }
        if self.fugacities.points.is_empty() && self.fugacities.random == 0 {
            return bad("the fugacity set is empty".into());
        }
        if !(self.fugacities.random_radius > 0.0 && self.fugacities.random_radius < 1.0) {
            return bad("random fugacities need a radius in (0, 1)".into());
        }
        if !(self.bulk_tol > 0.0) {
            return bad("bulk_tol must be positive".into());
        }
        if !self.lab_sides.is_empty() && self.lab_sides.len() < 2 {
            return bad("the lab scan needs at least 2 sides".into());
        }
        for &l in &self.lab_sides {
            let cells = l / self.spacing;
            if (cells - cells.round()).abs() > 1e-9 || cells.round() < 3.0 {
                return bad(format!("lab side {l} is not a multiple (>= 3) of the spacing {}", self.spacing));
            }
        }
        self.lab.validate()
    }
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.side > 0.0) || self.n < 2 {
            return bad("lab grid needs a positive side and n >= 2".into());
        }
        if !(self.beta > 0.0) || !(self.scan_beta > 0.0) {
            return bad("lab inverse temperatures must be positive".into());
        }
        if self.max_order == 0 || self.max_order > 2 {
            return bad(format!("lab max_order {} (1 or 2 supported)", self.max_order));
        }
        if self.dw_samples.iter().any(|d| *d == 0.0 || !d.is_finite()) {
            return bad("field increments must be finite and non-zero".into());
        }
        if self.rule_single.order == 0 || self.rule_nested.order == 0 || self.rule_single.ratio <= 1.0 || self.rule_nested.ratio <= 1.0 {
            return bad("quadrature rules need order >= 1 and ratio > 1".into());
        }
        if self.z().norm() >= 1.0 {
            return bad("lab fugacity must satisfy |z| < 1".into());
        }
        Ok(())
    }
}

/// One documented configuration key.
struct KeyDoc {
    key: &'static str,
    doc: &'static str,
}

const KEY_DOCS: &[KeyDoc] = &[
    KeyDoc { key: "sides", doc: "Box sides L of the ladder, strictly increasing, at least two." },
    KeyDoc { key: "spacing", doc: "Grid spacing h, fixed across the ladder; every side must be a multiple of it." },
    KeyDoc { key: "refine", doc: "Also run each box at spacing 2h and report the discretisation estimate." },
    KeyDoc { key: "beta", doc: "Inverse temperature." },
    KeyDoc { key: "omegas", doc: "Field strengths (positive)." },
    KeyDoc { key: "stats", doc: "Statistics to run: \"bose\", \"fermi\"." },
    KeyDoc { key: "fugacities.points", doc: "Fixed fugacities as [re, im] pairs." },
    KeyDoc { key: "fugacities.random", doc: "Number of extra fugacities drawn uniformly in a disc (seeded)." },
    KeyDoc { key: "fugacities.random_radius", doc: "Radius of that disc, in (0, 1)." },
    KeyDoc { key: "max_order", doc: "Highest derivative order N (0 = pressure), at most 4." },
    KeyDoc { key: "min_order", doc: "Lowest derivative order N." },
    KeyDoc { key: "methods.first", doc: "Method for N = 1: \"hellmann\", \"eig_fd\" or \"contour_fd\"." },
    KeyDoc { key: "methods.higher", doc: "Method for N >= 2: \"eig_fd\" or \"contour_fd\"." },
    KeyDoc { key: "methods.fd_steps", doc: "Base steps of the Richardson-extrapolated field differences." },
    KeyDoc { key: "methods.contour_nodes", doc: "Trapezoidal nodes on the contour circle." },
    KeyDoc { key: "bulk_tol", doc: "Relative truncation tolerance of the Landau-level sums." },
    KeyDoc { key: "bound_ratio", doc: "Pass threshold on max/min of sup_K |chi_L^N| across the ladder." },
    KeyDoc { key: "lab_spread", doc: "Pass threshold on the relative spread of sup |d^N Tr g| / L^2." },
    KeyDoc { key: "lab_sides", doc: "Sides of the kernel-lab trace-derivative scan (empty disables it)." },
    KeyDoc { key: "lab.side", doc: "Side of the kernel-lab box." },
    KeyDoc { key: "lab.n", doc: "Interior points per axis of the kernel-lab box." },
    KeyDoc { key: "lab.beta", doc: "Inverse temperature of the expansions." },
    KeyDoc { key: "lab.omega0", doc: "Reference field of the expansions." },
    KeyDoc { key: "lab.z", doc: "Fugacity [re, im] of the resolvent expansion." },
    KeyDoc { key: "lab.xi_angle", doc: "Angle of xi on the contour circle." },
    KeyDoc { key: "lab.max_order", doc: "Expansion order, 1 or 2." },
    KeyDoc { key: "lab.dw_samples", doc: "Field increments at which remainders are measured." },
    KeyDoc { key: "lab.rule_single", doc: "Graded Gauss-Legendre rule {order, ratio} for single time integrals." },
    KeyDoc { key: "lab.rule_nested", doc: "Rule per variable for iterated time integrals." },
    KeyDoc { key: "lab.fd_steps", doc: "Base steps of the trace-derivative cross-check." },
    KeyDoc { key: "lab.scan_beta", doc: "Inverse temperature of the trace-derivative scan." },
    KeyDoc { key: "lab.scan_angles", doc: "Angles of xi on the contour circle in the scan." },
    KeyDoc { key: "seed", doc: "Seed of the random fugacities; recorded in every result." },
    KeyDoc { key: "output.dir", doc: "Output directory." },
    KeyDoc { key: "output.format", doc: "\"csv\" or \"json\"." },
];

fn lookup<'a>(v: &'a serde_json::Value, key: &str) -> Option<&'a serde_json::Value> {
    key.split('.').try_fold(v, |acc, part| acc.get(part))
}

/// Markdown reference page listing every key with its default.
pub fn reference_page() -> String {
    let defaults = serde_json::to_value(StudyConfig::default()).expect("defaults serialise");
    let mut out = String::from("# Configuration reference\n\n");
    out.push_str("Generated by `diamag config --reference`. Studies read TOML, or JSON when the file starts with `{`.\n");
    out.push_str("Unknown keys are rejected; omitted keys take the defaults below.\n\n");
    out.push_str("| key | default | meaning |\n|---|---|---|\n");
    for k in KEY_DOCS {
        let d = lookup(&defaults, k.key).map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("| `{}` | `{}` | {} |\n", k.key, d, k.doc.replace('|', "\\|")));
    }
    out.push_str("\n## Defaults as TOML\n\n```toml\n");
    out.push_str(&StudyConfig::default().to_toml().expect("defaults serialise"));
    out.push_str("```\n");
    out
}

/// Keys of the serialised defaults that have no entry in the reference page.
pub fn undocumented_keys() -> Vec<String> {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut Vec<String>) {
        if let serde_json::Value::Object(m) = v {
            for (k, child) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                let documented = KEY_DOCS.iter().any(|d| d.key == key);
                if !documented {
                    if child.is_object() && !key.starts_with("lab.rule") {
                        walk(&key, child, out);
                    } else {
                        out.push(key);
                    }
                }
            }
        }
    }
    let defaults = serde_json::to_value(StudyConfig::default()).expect("defaults serialise");
    let mut out = Vec::new();
    walk("", &defaults, &mut out);
    out
}
