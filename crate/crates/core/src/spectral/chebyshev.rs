//! Chebyshev–Gauss–Lobatto collocation on `[0, a]`.
//!
//! Nodes are ordered by increasing height: `z_0 = 0` is the bottom wall and
//! `z_{n-1} = a` the upper wall.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct ChebyshevBasis {
    n: usize,
    height: f64,
    nodes: Vec<f64>,
    /// Reference nodes `x_j = cos(π j / N)` on `[-1, 1]`.
    ref_nodes: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebyshevBasis {
    /// `n` collocation points (polynomial degree `n - 1`).
    pub fn new(n: usize, height: f64) -> Self {
        assert!(n >= 3, "need at least three Chebyshev points");
        let deg = n - 1;
        let pi = std::f64::consts::PI;
        let ref_nodes: Vec<f64> = (0..n).map(|j| (pi * j as f64 / deg as f64).cos()).collect();
        let nodes: Vec<f64> = ref_nodes.iter().map(|x| 0.5 * height * (1.0 - x)).collect();

        // Differentiation on the reference nodes, then chain rule dz = -(a/2) dx.
        let c = |j: usize| if j == 0 || j == deg { 2.0 } else { 1.0 };
        let mut dx = vec![0.0; n * n];
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let v = c(i) / c(j) * sign / (ref_nodes[i] - ref_nodes[j]);
                    dx[i * n + j] = v;
                    row_sum += v;
                }
            }
            dx[i * n + i] = -row_sum;
        }
        let scale = -2.0 / height;
        let d1: Vec<f64> = dx.iter().map(|v| v * scale).collect();
        let d2 = matmul(&d1, &d1, n);

        Self {
            n,
            height,
            nodes,
            ref_nodes,
            d1,
            d2,
            weights: clenshaw_curtis(deg).into_iter().map(|w| 0.5 * height * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Clenshaw–Curtis weights for `∫_0^a`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Row-major first-derivative matrix.
    pub fn d1(&self) -> &[f64] {
        &self.d1
    }

    pub fn d2(&self) -> &[f64] {
        &self.d2
    }

    pub fn diff(&self, f: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.d1, f, self.n)
    }

    pub fn diff2(&self, f: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.d2, f, self.n)
    }

    pub fn diff_real(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| self.d1[i * n..(i + 1) * n].iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Chebyshev coefficients `c_k` with `f(z) = Σ c_k T_k(x(z))`.
    pub fn coefficients(&self, f: &[f64]) -> Vec<f64> {
        let deg = self.n - 1;
        let pi = std::f64::consts::PI;
        (0..self.n)
            .map(|k| {
                let mut s = 0.0;
                for (j, &v) in f.iter().enumerate() {
                    let half = if j == 0 || j == deg { 0.5 } else { 1.0 };
                    s += half * v * (pi * (j * k) as f64 / deg as f64).cos();
                }
                let ck = if k == 0 || k == deg { 1.0 } else { 2.0 };
                ck * s / deg as f64
            })
            .collect()
    }

    /// Barycentric interpolation of nodal values at height `z`.
    pub fn interpolate<T>(&self, f: &[T], z: f64) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Default,
    {
        let x = 1.0 - 2.0 * z / self.height;
        let deg = self.n - 1;
        let mut num = T::default();
        let mut den = 0.0;
        for (j, &xj) in self.ref_nodes.iter().enumerate() {
            let diff = x - xj;
            if diff == 0.0 {
                return f[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == deg {
                w *= 0.5;
            }
            let t = w / diff;
            num = num + f[j] * t;
            den += t;
        }
        num * (1.0 / den)
    }
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Dense row-major real matrix times complex vector.
pub fn matvec(m: &[f64], f: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let row = &m[i * n..(i + 1) * n];
            let (mut re, mut im) = (0.0, 0.0);
            for (a, z) in row.iter().zip(f) {
                re += a * z.re;
                im += a * z.im;
            }
            Complex64::new(re, im)
        })
        .collect()
}

/// Clenshaw–Curtis weights on `[-1, 1]` for nodes `cos(π j / deg)`.
fn clenshaw_curtis(deg: usize) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let n = deg;
    let mut w = vec![0.0; n + 1];
    let theta: Vec<f64> = (0..=n).map(|j| pi * j as f64 / n as f64).collect();
    let interior = 1..n;
    let mut v = vec![1.0; n + 1];
    if n % 2 == 0 {
        w[0] = 1.0 / ((n * n) as f64 - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            for j in interior.clone() {
                v[j] -= 2.0 * (2.0 * k as f64 * theta[j]).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
        }
        for j in interior.clone() {
            v[j] -= (n as f64 * theta[j]).cos() / ((n * n) as f64 - 1.0);
        }
    } else {
        w[0] = 1.0 / (n * n) as f64;
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            for j in interior.clone() {
                v[j] -= 2.0 * (2.0 * k as f64 * theta[j]).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
        }
    }
    for j in interior {
        w[j] = 2.0 * v[j] / n as f64;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_span_the_channel() {
        let b = ChebyshevBasis::new(17, 2.0);
        assert_eq!(b.nodes()[0], 0.0);
        assert_relative_eq!(b.nodes()[16], 2.0, epsilon = 1e-15);
        assert!(b.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn differentiates_polynomials_exactly() {
        let b = ChebyshevBasis::new(12, 1.5);
        let f: Vec<Complex64> = b.nodes().iter().map(|&z| Complex64::new(z.powi(5) - 2.0 * z, z * z)).collect();
        let df = b.diff(&f);
        let d2f = b.diff2(&f);
        for (j, &z) in b.nodes().iter().enumerate() {
            assert_relative_eq!(df[j].re, 5.0 * z.powi(4) - 2.0, epsilon = 1e-10);
            assert_relative_eq!(df[j].im, 2.0 * z, epsilon = 1e-11);
            assert_relative_eq!(d2f[j].re, 20.0 * z.powi(3), epsilon = 1e-9);
        }
    }

    #[test]
    fn quadrature_is_exact_to_degree() {
        for n in [9, 10, 33] {
            let b = ChebyshevBasis::new(n, 3.0);
            let f: Vec<f64> = b.nodes().iter().map(|z| z.powi(6)).collect();
            assert_relative_eq!(b.integrate(&f), 3f64.powi(7) / 7.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn coefficients_and_interpolation() {
        let b = ChebyshevBasis::new(9, 1.0);
        // T_3(x) with x = 1 - 2z
        let f: Vec<f64> = b.nodes().iter().map(|&z| {
            let x = 1.0 - 2.0 * z;
            4.0 * x.powi(3) - 3.0 * x
        }).collect();
        let c = b.coefficients(&f);
        for (k, ck) in c.iter().enumerate() {
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert!((ck - expect).abs() < 1e-13, "c[{k}] = {ck}");
        }
        let x = 1.0 - 2.0 * 0.37;
        assert_relative_eq!(b.interpolate(&f, 0.37), 4.0 * x * x * x - 3.0 * x, epsilon = 1e-13);
    }
}
