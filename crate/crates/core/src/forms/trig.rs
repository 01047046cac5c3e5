//! Band-limited forms on T³ stored as trigonometric coefficient tables, where
//! the exterior derivative and the wedge product are exact table operations.

use std::f64::consts::TAU;

use rand::Rng;
use rustfft::num_complex::Complex64;

/// Real trigonometric polynomial `Σ c_k e^{i(k₁x + k₂y + k₃z)}`, `|k_i| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    k: i64,
    coef: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(k: i64) -> Self {
        let side = (2 * k + 1) as usize;
        Self {
            k,
            coef: vec![Complex64::new(0.0, 0.0); side * side * side],
        }
    }

    pub fn bandwidth(&self) -> i64 {
        self.k
    }

    fn side(&self) -> i64 {
        2 * self.k + 1
    }

    fn index(&self, k: [i64; 3]) -> usize {
        let s = self.side();
        (((k[0] + self.k) * s + (k[1] + self.k)) * s + (k[2] + self.k)) as usize
    }

    pub fn get(&self, k: [i64; 3]) -> Complex64 {
        if k.iter().any(|x| x.abs() > self.k) {
            Complex64::new(0.0, 0.0)
        } else {
            self.coef[self.index(k)]
        }
    }

    pub fn set(&mut self, k: [i64; 3], c: Complex64) {
        let i = self.index(k);
        self.coef[i] = c;
    }

    fn modes(k: i64) -> impl Iterator<Item = [i64; 3]> {
        (-k..=k).flat_map(move |a| (-k..=k).flat_map(move |b| (-k..=k).map(move |c| [a, b, c])))
    }

    /// Random real polynomial with coefficients uniform in the unit square.
    pub fn random<R: Rng>(k: i64, rng: &mut R) -> Self {
        let mut p = Self::zero(k);
        for m in Self::modes(k) {
            let neg = [-m[0], -m[1], -m[2]];
            if m < neg {
                continue;
            }
            let c = if m == neg {
                Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            };
            p.set(m, c);
            p.set(neg, c.conj());
        }
        p
    }

    /// `a cos(k·x) + b sin(k·x)` for a single wave vector.
    pub fn wave(k: [i64; 3], cos: f64, sin: f64) -> Self {
        let band = k.iter().map(|x| x.abs()).max().unwrap_or(0);
        let mut p = Self::zero(band);
        let neg = [-k[0], -k[1], -k[2]];
        if k == neg {
            p.set(k, Complex64::new(cos, 0.0));
        } else {
            p.set(k, Complex64::new(0.5 * cos, -0.5 * sin));
            p.set(neg, Complex64::new(0.5 * cos, 0.5 * sin));
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.k.max(other.k);
        let mut p = Self::zero(k);
        for m in Self::modes(k) {
            p.set(m, self.get(m) + other.get(m));
        }
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            k: self.k,
            coef: self.coef.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Exact partial derivative along axis `axis ∈ {0, 1, 2}`.
    pub fn partial(&self, axis: usize) -> Self {
        let mut p = self.clone();
        for m in Self::modes(self.k) {
            let i = p.index(m);
            p.coef[i] *= Complex64::new(0.0, m[axis] as f64);
        }
        p
    }

    /// Product, by convolution of the coefficient tables.
    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.k + other.k);
        for a in Self::modes(self.k) {
            let ca = self.get(a);
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in Self::modes(other.k) {
                let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                let i = p.index(m);
                p.coef[i] += ca * other.get(b);
            }
        }
        p
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        Self::modes(self.k)
            .map(|m| {
                let phase = m[0] as f64 * x[0] + m[1] as f64 * x[1] + m[2] as f64 * x[2];
                (self.get(m) * Complex64::from_polar(1.0, phase)).re
            })
            .sum()
    }

    /// Values on the `n³` grid `2π(i, j, l)/n`, evaluated axis by axis;
    /// index `(i·n + j)·n + l`.
    pub fn eval_grid(&self, n: usize) -> Vec<f64> {
        let k = self.k;
        let side = self.side() as usize;
        let h = TAU / n as f64;
        let phases: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                (-k..=k)
                    .map(|m| Complex64::from_polar(1.0, m as f64 * h * i as f64))
                    .collect()
            })
            .collect();
        // contract z, then y, then x
        let mut stage1 = vec![Complex64::new(0.0, 0.0); side * side * n];
        for a in 0..side {
            for b in 0..side {
                let base = (a * side + b) * side;
                for (l, ph) in phases.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..side {
                        acc += self.coef[base + c] * ph[c];
                    }
                    stage1[(a * side + b) * n + l] = acc;
                }
            }
        }
        let mut stage2 = vec![Complex64::new(0.0, 0.0); side * n * n];
        for a in 0..side {
            for (j, ph) in phases.iter().enumerate() {
                for l in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..side {
                        acc += stage1[(a * side + b) * n + l] * ph[b];
                    }
                    stage2[(a * n + j) * n + l] = acc;
                }
            }
        }
        let mut out = vec![0.0; n * n * n];
        for (i, ph) in phases.iter().enumerate() {
            for j in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for a in 0..side {
                        acc += (stage2[(a * n + j) * n + l] * ph[a]).re;
                    }
                    out[(i * n + j) * n + l] = acc;
                }
            }
        }
        out
    }

    /// `∫_{T³}` via the constant coefficient.
    pub fn integral(&self) -> f64 {
        TAU.powi(3) * self.get([0, 0, 0]).re
    }

    /// Largest imaginary part of `c_k + conj(c_{−k})` deviation; zero for a real polynomial.
    pub fn reality_defect(&self) -> f64 {
        Self::modes(self.k)
            .map(|m| (self.get(m) - self.get([-m[0], -m[1], -m[2]]).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// `α = p dx + q dy + r dz` with trigonometric coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigOneForm(pub [TrigPoly; 3]);

/// `A dy∧dz + B dz∧dx + C dx∧dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTwoForm(pub [TrigPoly; 3]);

/// Coefficient of `dx∧dy∧dz`.
pub type TrigThreeForm = TrigPoly;

impl TrigOneForm {
    pub fn random<R: Rng>(k: i64, rng: &mut R) -> Self {
        Self([
            TrigPoly::random(k, rng),
            TrigPoly::random(k, rng),
            TrigPoly::random(k, rng),
        ])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self([0, 1, 2].map(|i| self.0[i].sub(&other.0[i])))
    }

    pub fn d(&self) -> TrigTwoForm {
        let [p, q, r] = &self.0;
        TrigTwoForm([
            r.partial(1).sub(&q.partial(2)),
            p.partial(2).sub(&r.partial(0)),
            q.partial(0).sub(&p.partial(1)),
        ])
    }

    pub fn wedge(&self, other: &Self) -> TrigTwoForm {
        let [p1, q1, r1] = &self.0;
        let [p2, q2, r2] = &other.0;
        TrigTwoForm([
            q1.mul(r2).sub(&r1.mul(q2)),
            r1.mul(p2).sub(&p1.mul(r2)),
            p1.mul(q2).sub(&q1.mul(p2)),
        ])
    }

    pub fn wedge2(&self, omega: &TrigTwoForm) -> TrigThreeForm {
        let [p, q, r] = &self.0;
        let [a, b, c] = &omega.0;
        p.mul(a).add(&q.mul(b)).add(&r.mul(c))
    }
}

impl TrigTwoForm {
    pub fn add(&self, other: &Self) -> Self {
        Self([0, 1, 2].map(|i| self.0[i].add(&other.0[i])))
    }

    pub fn d(&self) -> TrigThreeForm {
        let [a, b, c] = &self.0;
        a.partial(0).add(&b.partial(1)).add(&c.partial(2))
    }
}

/// Residuals of `α∧dα − β∧dβ = (α − β)∧(dα + dβ) + d(α∧β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `sup` over the sample grid of `|LHS − RHS|`.
    pub pointwise: f64,
    /// `|∫ LHS − ∫ RHS|` by equispaced quadrature.
    pub integral: f64,
    /// `|∫ d(α∧β)|` by equispaced quadrature.
    pub exact_term: f64,
}

/// Sample grid for [`check_identity_31`].
pub const IDENTITY_GRID: usize = 32;

pub fn check_identity_31(alpha: &TrigOneForm, beta: &TrigOneForm) -> IdentityResiduals {
    let da = alpha.d();
    let db = beta.d();
    let lhs = alpha.wedge2(&da).sub(&beta.wedge2(&db));
    let exact = alpha.wedge(beta).d();
    let rhs = alpha.sub(beta).wedge2(&da.add(&db)).add(&exact);
    let n = IDENTITY_GRID;
    let (l, r, e) = (lhs.eval_grid(n), rhs.eval_grid(n), exact.eval_grid(n));
    let pointwise = l
        .iter()
        .zip(&r)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let volume = TAU.powi(3) / (n * n * n) as f64;
    let sum = |v: &[f64]| v.iter().sum::<f64>() * volume;
    IdentityResiduals {
        pointwise,
        integral: (sum(&l) - sum(&r)).abs(),
        exact_term: sum(&e).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wave_and_grid_agree() {
        let p = TrigPoly::wave([1, -2, 3], 0.7, -0.4);
        let g = p.eval_grid(8);
        let h = TAU / 8.0;
        for (i, j, l) in [(0, 0, 0), (1, 2, 3), (7, 5, 4)] {
            let x = [h * i as f64, h * j as f64, h * l as f64];
            let phase = x[0] - 2.0 * x[1] + 3.0 * x[2];
            let exact = 0.7 * phase.cos() - 0.4 * phase.sin();
            assert!((g[(i * 8 + j) * 8 + l] - exact).abs() < 1e-13);
            assert!((p.eval(x) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn products_and_derivatives_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = TrigPoly::random(2, &mut rng);
        let b = TrigPoly::random(2, &mut rng);
        let ab = a.mul(&b);
        assert!(ab.reality_defect() < 1e-13);
        let x = [0.3, 1.9, -2.2];
        assert!((ab.eval(x) - a.eval(x) * b.eval(x)).abs() < 1e-11);
        // derivative against a centred difference of the closed form
        let e = 1e-5;
        let fd = (a.eval([x[0], x[1] + e, x[2]]) - a.eval([x[0], x[1] - e, x[2]])) / (2.0 * e);
        assert!((a.partial(1).eval(x) - fd).abs() < 1e-7);
        assert!(a.partial(0).integral().abs() < 1e-13);
    }

    #[test]
    fn dd_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = TrigOneForm::random(3, &mut rng);
        let dd = a.d().d();
        assert!(dd.eval_grid(8).iter().all(|x| x.abs() < 1e-11));
    }

    #[test]
    fn identity_examples() {
        let zero = TrigPoly::zero(1);
        let alpha = TrigOneForm([
            TrigPoly::wave([0, 0, 1], 0.0, 1.0),
            TrigPoly::wave([1, 0, 0], 1.0, 0.0),
            zero.clone(),
        ]);
        let beta = TrigOneForm([
            zero.clone(),
            zero.clone(),
            TrigPoly::wave([0, 1, 0], 0.0, 1.0),
        ]);
        let r = check_identity_31(&alpha, &beta);
        assert!(r.pointwise < 1e-12 && r.integral < 1e-12 && r.exact_term < 1e-12);
        let r = check_identity_31(&alpha, &alpha);
        assert_eq!(r.pointwise, 0.0);
    }
}
