//! Rectangular parameter domains, node indexing and finite differences.

use crate::error::{GeomError, Result};
use crate::lorentz::MinkowskiVector;
use crate::utb::UtbPoint;

/// Minimal vector-space interface for finite differences.
pub trait Lin: Copy + Send + Sync {
    fn scaled(&self, a: f64) -> Self;
    fn plus(&self, o: &Self) -> Self;
}

impl Lin for f64 {
    fn scaled(&self, a: f64) -> Self {
        self * a
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
}

impl Lin for MinkowskiVector {
    fn scaled(&self, a: f64) -> Self {
        *self * a
    }
    fn plus(&self, o: &Self) -> Self {
        *self + *o
    }
}

/// An ambient pair in R^{n+2} × R^{n+2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pair(pub MinkowskiVector, pub MinkowskiVector);

impl Lin for Pair {
    fn scaled(&self, a: f64) -> Self {
        Pair(self.0 * a, self.1 * a)
    }
    fn plus(&self, o: &Self) -> Self {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl From<UtbPoint> for Pair {
    fn from(p: UtbPoint) -> Self {
        Pair(p.x(), p.v())
    }
}

impl<T: Lin> Lin for [T; 3] {
    fn scaled(&self, a: f64) -> Self {
        [self[0].scaled(a), self[1].scaled(a), self[2].scaled(a)]
    }
    fn plus(&self, o: &Self) -> Self {
        [self[0].plus(&o[0]), self[1].plus(&o[1]), self[2].plus(&o[2])]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub samples: Vec<usize>,
    pub periodic: Vec<bool>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, samples: Vec<usize>, periodic: Vec<bool>) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n || samples.len() != n || periodic.len() != n {
            return Err(GeomError::BadParams("domain arrays differ in length".into()));
        }
        crate::lorentz::check_n(n)?;
        for a in 0..n {
            if !(hi[a] > lo[a]) || !lo[a].is_finite() || !hi[a].is_finite() {
                return Err(GeomError::BadParams(format!("axis {a}: empty or non-finite interval")));
            }
            let min = if periodic[a] { 4 } else { 7 };
            if samples[a] < min {
                return Err(GeomError::BadParams(format!("axis {a}: need at least {min} samples")));
            }
        }
        Ok(Domain { lo, hi, samples, periodic })
    }

    /// Non-periodic box with the same sample count on every axis.
    pub fn cube(lo: &[f64], hi: &[f64], samples: usize) -> Result<Self> {
        let n = lo.len();
        Self::new(lo.to_vec(), hi.to_vec(), vec![samples; n], vec![false; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.samples.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.samples[axis] as f64;
        if self.periodic[axis] {
            self.width(axis) / n
        } else {
            self.width(axis) / (n - 1.0)
        }
    }

    /// Step for derivatives of analytic evaluators: width / (8 · samples).
    pub fn fd_step(&self, axis: usize) -> f64 {
        self.width(axis) / (8.0 * self.samples[axis] as f64)
    }

    /// Multi-index of a flat node index (axis 0 varies fastest).
    pub fn multi(&self, mut idx: usize) -> Vec<usize> {
        let mut m = Vec::with_capacity(self.dim());
        for &s in &self.samples {
            m.push(idx % s);
            idx /= s;
        }
        m
    }

    pub fn flat(&self, m: &[usize]) -> usize {
        let mut idx = 0;
        for a in (0..self.dim()).rev() {
            idx = idx * self.samples[a] + m[a];
        }
        idx
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi(idx).iter().enumerate().map(|(a, &k)| self.lo[a] + k as f64 * self.spacing(a)).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| 0.5 * (self.lo[a] + self.hi[a])).collect()
    }

    /// Neighbor `off` steps along `axis`, wrapping on periodic axes.
    pub fn neighbor(&self, idx: usize, axis: usize, off: isize) -> Option<usize> {
        let mut m = self.multi(idx);
        let s = self.samples[axis] as isize;
        let k = m[axis] as isize + off;
        let k = if self.periodic[axis] {
            k.rem_euclid(s)
        } else if (0..s).contains(&k) {
            k
        } else {
            return None;
        };
        m[axis] = k as usize;
        Some(self.flat(&m))
    }

    /// Undirected grid edges (i, j) along each axis, including periodic wraps.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for a in 0..self.dim() {
                if let Some(j) = self.neighbor(i, a, 1) {
                    if j != i {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }

    /// Elementary cells: (lower corner, axis a, axis b) with a < b.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for a in 0..self.dim() {
                for b in a + 1..self.dim() {
                    if self.neighbor(i, a, 1).is_some() && self.neighbor(i, b, 1).is_some() {
                        out.push((i, a, b));
                    }
                }
            }
        }
        out
    }

    pub fn contains(&self, u: &[f64], slack: f64) -> bool {
        u.iter().enumerate().all(|(a, &x)| self.periodic[a] || (x >= self.lo[a] - slack && x <= self.hi[a] + slack))
    }

    pub fn any_periodic(&self) -> bool {
        self.periodic.iter().any(|&p| p)
    }
}

/// Fourth-order central derivative of an evaluator along `axis`.
pub fn fd_axis<T: Lin>(f: &dyn Fn(&[f64]) -> T, u: &[f64], axis: usize, h: f64) -> T {
    let at = |e: f64| {
        let mut w = u.to_vec();
        w[axis] += e;
        f(&w)
    };
    let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
    let c = 1.0 / (12.0 * h);
    p1.scaled(8.0 * c).plus(&m1.scaled(-8.0 * c)).plus(&p2.scaled(-c)).plus(&m2.scaled(c))
}

/// Finite-difference weights for the first derivative at `x0` on nodes `xs` (Fornberg).
pub fn fornberg_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let m = 1;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|r| r[m]).collect()
}

/// Sixth-order derivative of node data along `axis` (seven-point stencil,
/// shifted one-sided near non-periodic boundaries).
pub fn grid_deriv<T: Lin>(dom: &Domain, vals: &[T], idx: usize, axis: usize) -> T {
    let s = dom.samples[axis] as isize;
    let k = dom.multi(idx)[axis] as isize;
    let half = 3isize;
    let start = if dom.periodic[axis] { k - half } else { (k - half).clamp(0, s - 7) };
    let offs: Vec<isize> = (start..start + 7).collect();
    let h = dom.spacing(axis);
    let xs: Vec<f64> = offs.iter().map(|&o| (o - k) as f64 * h).collect();
    let w = fornberg_weights(0.0, &xs);
    let mut acc: Option<T> = None;
    for (o, wi) in offs.iter().zip(w) {
        let j = dom.neighbor(idx, axis, o - k).expect("stencil inside grid");
        let term = vals[j].scaled(wi);
        acc = Some(match acc {
            None => term,
            Some(a) => a.plus(&term),
        });
    }
    acc.expect("non-empty stencil")
}

/// Four-point Gauss-Legendre nodes and weights on [−1, 1].
pub const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

/// ∫_a^b f by four-point Gauss-Legendre.
pub fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL4.iter().map(|(z, w)| w * f(m + r * z)).sum::<f64>() * r
}

/// Composite Simpson rule on uniformly spaced samples (odd count), falling
/// back to the trapezoid rule on the last interval otherwise.
pub fn simpson(vals: &[f64], h: f64) -> f64 {
    let n = vals.len();
    if n < 2 {
        return 0.0;
    }
    let m = if n % 2 == 1 { n } else { n - 1 };
    let mut s = 0.0;
    for i in (0..m - 1).step_by(2) {
        s += vals[i] + 4.0 * vals[i + 1] + vals[i + 2];
    }
    s *= h / 3.0;
    if m < n {
        s += 0.5 * h * (vals[n - 2] + vals[n - 1]);
    }
    s
}
