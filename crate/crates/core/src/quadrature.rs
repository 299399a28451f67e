//! One-dimensional quadrature: Gauss-Legendre rules, graded composite rules
//! for integrands with boundary layers, and adaptive Gauss-Kronrod for
//! complex-valued integrands.

use crate::{Complex64, Error, Result};
use std::collections::BinaryHeap;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// A list of `(node, weight)` pairs for some interval.
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    fn push_panel(&mut self, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in gl.0.iter().zip(&gl.1) {
            self.nodes.push(c + r * x);
            self.weights.push(r * w);
        }
    }
}

/// Composite Gauss-Legendre rule on `[a, b]` whose panels shrink
/// geometrically (by `ratio`) toward the ends flagged in `grade`, until the
/// innermost panel is no wider than `1 / rate`.
///
/// Suited to integrands like `exp(-rate * (t - a))` superposed on a smooth
/// background.
pub fn graded_rule(a: f64, b: f64, order: usize, rate: f64, ratio: f64, grade: (bool, bool)) -> Rule {
    assert!(b > a && ratio > 1.0);
    let gl = gauss_legendre(order);
    let mut rule = Rule::default();
    let len = b - a;
    let ends = grade.0 as usize + grade.1 as usize;
    if ends == 0 {
        rule.push_panel(a, b, &gl);
        return rule;
    }
    // Each graded end owns half (or all) of the interval.
    let span = len / ends as f64;
    let levels = if rate * span <= 1.0 {
        0
    } else {
        ((rate * span).ln() / ratio.ln()).ceil() as usize
    };
    // Breakpoints measured from the graded end: 0, span/ratio^levels, ..., span.
    let mut cuts = vec![0.0];
    for k in (0..levels).rev() {
        cuts.push(span / ratio.powi(k as i32 + 1));
    }
    cuts.push(span);
    cuts.dedup();
    if grade.0 {
        for p in cuts.windows(2) {
            rule.push_panel(a + p[0], a + p[1], &gl);
        }
    } else if len > span {
        rule.push_panel(a, b - span, &gl);
    }
    if grade.1 {
        for p in cuts.windows(2) {
            rule.push_panel(b - p[1], b - p[0], &gl);
        }
    } else if len > span {
        rule.push_panel(a + span, b, &gl);
    }
    let mut pairs: Vec<(f64, f64)> = rule.iter().collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let dx = r * GK_NODES[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * GK_WK[j];
        if j % 2 == 1 {
            gauss += s * GK_WG[j / 2];
        }
    }
    (kron * r, ((kron - gauss) * r).norm())
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over the
/// partition defined by `points` (sorted, at least two entries).
pub fn integrate_adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Integral> {
    assert!(points.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in points.windows(2) {
        if p[1] <= p[0] {
            continue;
        }
        let (v, e) = gk15(&mut f, p[0], p[1]);
        total += v;
        err += e;
        heap.push(Piece { a: p[0], b: p[1], value: v, err: e });
    }
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() >= max_intervals {
            return Err(Error::numerical(
                "adaptive quadrature",
                format!("error estimate {err:.3e} after {} intervals (|I| = {:.3e})", heap.len(), total.norm()),
            ));
        }
        let worst = heap.pop().expect("non-empty heap");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::numerical("adaptive quadrature", "interval collapsed below machine precision"));
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: m, value: v1, err: e1 });
        heap.push(Piece { a: m, b: worst.b, value: v2, err: e2 });
    }
    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Integral { value, error, intervals: heap.len() })
}
