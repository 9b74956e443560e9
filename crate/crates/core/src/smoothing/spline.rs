/// Natural cubic spline through samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    step: f64,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x0: f64, step: f64, ys: Vec<f64>) -> Self {
        let n = ys.len();
        assert!(n >= 3, "a spline needs at least three samples");
        // Thomas algorithm for the interior second derivatives (natural ends).
        let mut second = vec![0.0; n];
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let rhs = 6.0 * (ys[i + 1] - 2.0 * ys[i] + ys[i - 1]) / (step * step);
            let denom = 4.0 - c_prime[i - 1];
            c_prime[i] = 1.0 / denom;
            d_prime[i] = (rhs - d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            second[i] = d_prime[i] - c_prime[i] * second[i + 1];
        }
        Self { x0, step, ys, second }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.step * (self.ys.len() - 1) as f64)
    }

    pub fn knots(&self) -> &[f64] {
        &self.ys
    }

    /// Value, first and second derivative at `x` (clamped to the grid).
    pub fn eval(&self, x: f64) -> [f64; 3] {
        let n = self.ys.len();
        let s = ((x - self.x0) / self.step).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let h = self.step;
        let a = (i + 1) as f64 - s;
        let b = s - i as f64;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        [value, d1, d2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let ys: Vec<f64> = (0..11).map(|i| 2.0 - 0.5 * i as f64 * 0.1).collect();
        let s = CubicSpline::new(0.0, 0.1, ys);
        for &x in &[0.0, 0.033, 0.5, 0.97, 1.0] {
            let [v, d1, d2] = s.eval(x);
            assert!((v - (2.0 - 0.5 * x)).abs() < 1e-13);
            assert!((d1 + 0.5).abs() < 1e-12);
            assert!(d2.abs() < 1e-10);
        }
    }

    #[test]
    fn interpolates_smooth_function() {
        let n = 201;
        let h = 3.0 / (n - 1) as f64;
        let s = CubicSpline::new(0.0, h, (0..n).map(|i| (i as f64 * h).sin()).collect());
        for &x in &[0.5, 1.234, 2.5] {
            let [v, d1, _] = s.eval(x);
            assert!((v - x.sin()).abs() < 1e-8);
            assert!((d1 - x.cos()).abs() < 1e-5);
        }
    }
}
